//! Adam optimizer state.

use crate::error::{Error, Result};

pub const DEFAULT_LR: f64 = 0.001;
pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPS: f64 = 1e-8;

/// First/second moment buffers, laid out exactly like the model's
/// `ParamVector`. Running-stat slots exist in the buffers but are never
/// touched because their entries are skipped during the step.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step_count: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(param_len: usize, lr: f64) -> AdamState {
        AdamState {
            step_count: 0,
            m: vec![0.0; param_len],
            v: vec![0.0; param_len],
            lr,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            eps: DEFAULT_EPS,
        }
    }

    /// One bias-corrected Adam update over the index ranges in `trainable`,
    /// applied in place to `params`.
    pub fn step(
        &mut self,
        params: &mut [f64],
        gradient: &[f64],
        trainable: &[(usize, usize)],
    ) -> Result<()> {
        if params.len() != gradient.len() || params.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam step: params {} / gradient {} / state {}",
                params.len(),
                gradient.len(),
                self.m.len()
            )));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let bias1 = 1.0 - self.beta1.powi(t);
        let bias2 = 1.0 - self.beta2.powi(t);
        for &(start, end) in trainable {
            for i in start..end {
                let g = gradient[i];
                self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
                self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = self.m[i] / bias1;
                let v_hat = self.v[i] / bias2;
                params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut state = AdamState::new(3, DEFAULT_LR);
        let mut params = vec![0.5, -0.25, 1.0];
        let before = params.clone();
        state.step(&mut params, &[0.0; 3], &[(0, 3)]).unwrap();
        assert_eq!(params, before);
        assert_eq!(state.step_count, 1);
    }

    #[test]
    fn first_step_magnitude_is_lr() {
        // m_hat = g, v_hat = g^2 at t = 1, so the step is lr * g/(|g| + eps).
        let mut state = AdamState::new(1, DEFAULT_LR);
        let mut params = vec![0.0];
        state.step(&mut params, &[1.0], &[(0, 1)]).unwrap();
        let expected = -DEFAULT_LR / (1.0 + DEFAULT_EPS);
        assert!((params[0] - expected).abs() < 1e-15);
        assert!((params[0] + DEFAULT_LR).abs() < 1e-10);
    }

    #[test]
    fn skipped_ranges_stay_untouched() {
        let mut state = AdamState::new(4, DEFAULT_LR);
        let mut params = vec![1.0; 4];
        state.step(&mut params, &[1.0; 4], &[(0, 2)]).unwrap();
        assert_ne!(params[0], 1.0);
        assert_eq!(params[2], 1.0);
        assert_eq!(params[3], 1.0);
    }

    #[test]
    fn identical_inputs_give_identical_updates() {
        let grad = vec![0.3, -0.7];
        let mut s1 = AdamState::new(2, DEFAULT_LR);
        let mut s2 = AdamState::new(2, DEFAULT_LR);
        let mut p1 = vec![0.1, 0.2];
        let mut p2 = vec![0.1, 0.2];
        for _ in 0..5 {
            s1.step(&mut p1, &grad, &[(0, 2)]).unwrap();
            s2.step(&mut p2, &grad, &[(0, 2)]).unwrap();
        }
        assert_eq!(p1, p2);
    }
}
