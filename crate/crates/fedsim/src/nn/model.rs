//! The MLP: parameters, forward pass, manual backpropagation.
//!
//! Batchnorm uses batch statistics in train mode (population variance) and
//! running statistics in eval mode; running stats are updated with momentum
//! 0.9. Dropout is inverted (kept activations scaled by `1/(1 - rate)`), so
//! eval mode is the identity. Everything is `f64` and every random draw comes
//! from the model's own seeded generator, so a model's trajectory is a pure
//! function of (seed, data, config).

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::adam::{AdamState, DEFAULT_LR};
use crate::nn::layers::{validate_stack, LayerSpec};
use crate::nn::loss::bce_grad;
use crate::nn::params::{Layout, ParamRole, ParamVector};
use crate::seeds;

/// Momentum for the batchnorm running statistics.
pub const BN_MOMENTUM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// A mini-batch: standardized features plus {0,1} labels.
#[derive(Debug, Clone)]
pub struct Batch {
    pub features: Matrix,
    pub labels: Vec<f64>,
}

impl Batch {
    pub fn new(features: Matrix, labels: Vec<f64>) -> Result<Batch> {
        if features.rows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows vs {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.rows() == 0 {
            return Err(Error::Shape("empty batch".into()));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::Config("labels must be 0 or 1".into()));
        }
        Ok(Batch { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-layer values saved by a train-mode forward pass.
#[derive(Debug)]
enum LayerAux {
    Dense { input: Matrix },
    BatchNorm { centered: Matrix, x_hat: Matrix, inv_std: Vec<f64> },
    Relu { active: Vec<bool> },
    /// Retention factors, `0` or `1/(1 - rate)`; empty when the layer was an identity.
    Dropout { mask: Vec<f64> },
    Sigmoid { output: Matrix },
}

/// Activations captured during a train-mode forward, consumed by `backward`.
#[derive(Debug)]
pub struct ForwardCache {
    rows: usize,
    stamp: u64,
    mode: Mode,
    aux: Vec<LayerAux>,
}

#[derive(Debug, Clone)]
pub struct MlpModel {
    spec: Vec<LayerSpec>,
    params: ParamVector,
    adam: AdamState,
    rng: ChaCha8Rng,
    trainable_ranges: Vec<(usize, usize)>,
    /// Bumped on every optimizer step; caches remember the stamp they saw.
    stamp: u64,
}

fn trainable_ranges(layout: &Layout) -> Vec<(usize, usize)> {
    layout
        .entries()
        .iter()
        .filter(|e| e.role.trainable())
        .map(|e| (e.offset, e.offset + e.len()))
        .collect()
}

impl MlpModel {
    /// He fan-in initialization for dense weights; biases zero; batchnorm at
    /// identity (gamma 1, beta 0, running mean 0, running var 1); Adam zeroed.
    pub fn init(spec: Vec<LayerSpec>, seed: u64) -> Result<MlpModel> {
        validate_stack(&spec)?;
        let layout = Arc::new(Layout::from_stack(&spec));
        let mut params = ParamVector::zeros(Arc::clone(&layout));
        let mut weight_rng = seeds::rng(seed, &[0]);
        for entry in layout.entries() {
            match entry.role {
                ParamRole::Weight => {
                    let fan_in = entry.shape.0 as f64;
                    let dist = Normal::new(0.0, (2.0 / fan_in).sqrt())
                        .map_err(|e| Error::Config(format!("weight init: {e}")))?;
                    for w in params.slice_mut(entry) {
                        *w = dist.sample(&mut weight_rng);
                    }
                }
                ParamRole::BnGamma | ParamRole::BnRunningVar => {
                    params.slice_mut(entry).fill(1.0);
                }
                ParamRole::Bias | ParamRole::BnBeta | ParamRole::BnRunningMean => {}
            }
        }
        let ranges = trainable_ranges(&layout);
        Ok(MlpModel {
            spec,
            adam: AdamState::new(params.len(), DEFAULT_LR),
            rng: seeds::rng(seed, &[1]),
            trainable_ranges: ranges,
            params,
            stamp: 0,
        })
    }

    /// Model around existing parameters with a fresh optimizer; used when a
    /// federation client receives the global vector.
    pub fn from_params(
        spec: Vec<LayerSpec>,
        params: ParamVector,
        lr: f64,
        rng_seed: u64,
    ) -> Result<MlpModel> {
        validate_stack(&spec)?;
        let expected = Layout::from_stack(&spec);
        if **params.layout() != expected {
            return Err(Error::Shape("params layout does not match spec".into()));
        }
        let ranges = trainable_ranges(params.layout());
        Ok(MlpModel {
            spec,
            adam: AdamState::new(params.len(), lr),
            rng: seeds::rng(rng_seed, &[1]),
            trainable_ranges: ranges,
            params,
            stamp: 0,
        })
    }

    pub fn spec(&self) -> &[LayerSpec] {
        &self.spec
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn into_params(self) -> ParamVector {
        self.params
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.adam.lr = lr;
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn input_dim(&self) -> usize {
        self.spec[0].in_dim()
    }

    /// Forward pass. Train mode uses batch statistics, draws dropout masks
    /// from the model's generator and updates the running stats; eval mode is
    /// a pure function of (params, input).
    pub fn forward(&mut self, batch: &Batch, mode: Mode) -> Result<(Vec<f64>, ForwardCache)> {
        if batch.features.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch width {} vs input dim {}",
                batch.features.cols(),
                self.input_dim()
            )));
        }
        if mode == Mode::Train && batch.len() < 2 {
            return Err(Error::DegenerateBatch(
                "train-mode batch needs at least 2 rows for batch statistics".into(),
            ));
        }
        let mut x = batch.features.clone();
        let mut aux = Vec::new();
        let rows = x.rows();
        let spec = std::mem::take(&mut self.spec);
        let result = (|| -> Result<Matrix> {
            for (li, layer) in spec.iter().enumerate() {
                x = match *layer {
                    LayerSpec::Dense { in_dim, out_dim } => {
                        let out = self.dense_forward(li, in_dim, out_dim, &x);
                        if mode == Mode::Train {
                            aux.push(LayerAux::Dense {
                                input: std::mem::replace(&mut x, Matrix::zeros(0, 0)),
                            });
                        }
                        out
                    }
                    LayerSpec::BatchNorm { dim, epsilon } => {
                        self.batchnorm_forward(li, dim, epsilon, &x, mode, &mut aux)
                    }
                    LayerSpec::Relu { .. } => relu_forward(&x, mode, &mut aux),
                    LayerSpec::Dropout { rate, .. } => {
                        dropout_forward(&x, rate, mode, &mut self.rng, &mut aux)
                    }
                    LayerSpec::Sigmoid { .. } => sigmoid_forward(&x, mode, &mut aux),
                };
            }
            Ok(std::mem::replace(&mut x, Matrix::zeros(0, 0)))
        })();
        self.spec = spec;
        let out = result?;
        debug_assert_eq!(out.cols(), 1);
        let predictions = out.data().to_vec();
        Ok((
            predictions,
            ForwardCache { rows, stamp: self.stamp, mode, aux },
        ))
    }

    /// Eval-mode predictions without touching any model state.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>> {
        if features.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input width {} vs input dim {}",
                features.cols(),
                self.input_dim()
            )));
        }
        if features.rows() == 0 {
            return Err(Error::Shape("empty input".into()));
        }
        let mut x = features.clone();
        let mut sink = Vec::new();
        for (li, layer) in self.spec.iter().enumerate() {
            x = match *layer {
                LayerSpec::Dense { in_dim, out_dim } => self.dense_forward(li, in_dim, out_dim, &x),
                LayerSpec::BatchNorm { dim, epsilon } => {
                    self.batchnorm_eval(li, dim, epsilon, &x)
                }
                LayerSpec::Relu { .. } => relu_forward(&x, Mode::Eval, &mut sink),
                LayerSpec::Dropout { .. } => x,
                LayerSpec::Sigmoid { .. } => sigmoid_forward(&x, Mode::Eval, &mut sink),
            };
        }
        Ok(x.data().to_vec())
    }

    /// Gradient of the mean BCE loss with respect to every parameter.
    /// Running-stat slots get zero gradient so the result shares the params
    /// layout and federation arithmetic stays uniform.
    pub fn backward(&self, cache: &ForwardCache, labels: &[f64]) -> Result<ParamVector> {
        if cache.mode != Mode::Train {
            return Err(Error::Internal("backward requires a train-mode cache".into()));
        }
        if cache.stamp != self.stamp {
            return Err(Error::Internal(
                "cache is stale: params changed since the forward pass".into(),
            ));
        }
        if cache.rows != labels.len() {
            return Err(Error::Shape(format!(
                "cache rows {} vs {} labels",
                cache.rows,
                labels.len()
            )));
        }
        let mut grad = ParamVector::zeros(Arc::clone(self.params.layout()));
        // d(loss)/d(prediction), one column.
        let last = match cache.aux.last() {
            Some(LayerAux::Sigmoid { output }) => output,
            _ => return Err(Error::Internal("cache does not end at the sigmoid output".into())),
        };
        let dl = bce_grad(last.data(), labels)?;
        let mut delta = Matrix::from_flat(cache.rows, 1, dl);

        let mut aux_iter = cache.aux.iter().rev();
        for (li, layer) in self.spec.iter().enumerate().rev() {
            let aux = aux_iter.next().ok_or_else(|| {
                Error::Internal("cache layer count does not match spec".into())
            })?;
            delta = match (layer, aux) {
                (&LayerSpec::Sigmoid { .. }, LayerAux::Sigmoid { output }) => {
                    let mut d = delta;
                    for (dv, &y) in d.data_mut().iter_mut().zip(output.data()) {
                        *dv *= y * (1.0 - y);
                    }
                    d
                }
                (&LayerSpec::Dropout { .. }, LayerAux::Dropout { mask }) => {
                    let mut d = delta;
                    if !mask.is_empty() {
                        for (dv, &m) in d.data_mut().iter_mut().zip(mask) {
                            *dv *= m;
                        }
                    }
                    d
                }
                (&LayerSpec::Relu { .. }, LayerAux::Relu { active }) => {
                    let mut d = delta;
                    for (dv, &a) in d.data_mut().iter_mut().zip(active) {
                        if !a {
                            *dv = 0.0;
                        }
                    }
                    d
                }
                (&LayerSpec::BatchNorm { dim, .. }, LayerAux::BatchNorm { centered, x_hat, inv_std }) => {
                    self.batchnorm_backward(li, dim, centered, x_hat, inv_std, &delta, &mut grad)
                }
                (&LayerSpec::Dense { in_dim, out_dim }, LayerAux::Dense { input }) => {
                    self.dense_backward(li, in_dim, out_dim, input, &delta, &mut grad)
                }
                _ => return Err(Error::Internal("cache entry does not match layer kind".into())),
            };
        }
        Ok(grad)
    }

    /// One Adam update; running-stat slots are untouched.
    pub fn adam_step(&mut self, gradient: &ParamVector) -> Result<()> {
        if !self.params.same_layout(gradient) {
            return Err(Error::Shape("gradient layout does not match params".into()));
        }
        self.adam
            .step(self.params.values_mut(), gradient.values(), &self.trainable_ranges)?;
        self.stamp += 1;
        Ok(())
    }

    fn entry_slice(&self, layer: usize, role: ParamRole) -> &[f64] {
        let entry = self
            .params
            .layout()
            .entry(layer, role)
            .expect("layout entry missing for layer");
        self.params.slice(entry)
    }

    fn dense_forward(&self, layer: usize, in_dim: usize, out_dim: usize, x: &Matrix) -> Matrix {
        let w = self.entry_slice(layer, ParamRole::Weight);
        let b = self.entry_slice(layer, ParamRole::Bias);
        let mut out = Matrix::zeros(x.rows(), out_dim);
        for i in 0..x.rows() {
            let xr = x.row(i);
            let or = out.row_mut(i);
            or.copy_from_slice(b);
            for (p, &xv) in xr.iter().enumerate().take(in_dim) {
                let wr = &w[p * out_dim..(p + 1) * out_dim];
                for (o, &wv) in or.iter_mut().zip(wr) {
                    *o += xv * wv;
                }
            }
        }
        out
    }

    fn dense_backward(
        &self,
        layer: usize,
        in_dim: usize,
        out_dim: usize,
        input: &Matrix,
        delta: &Matrix,
        grad: &mut ParamVector,
    ) -> Matrix {
        let layout = Arc::clone(self.params.layout());
        let w_entry = layout.entry(layer, ParamRole::Weight).expect("weight entry");
        let b_entry = layout.entry(layer, ParamRole::Bias).expect("bias entry");
        let rows = input.rows();
        {
            let dw = grad.slice_mut(w_entry);
            for i in 0..rows {
                let xr = input.row(i);
                let dr = delta.row(i);
                for (p, &xv) in xr.iter().enumerate().take(in_dim) {
                    let dwr = &mut dw[p * out_dim..(p + 1) * out_dim];
                    for (g, &dv) in dwr.iter_mut().zip(dr) {
                        *g += xv * dv;
                    }
                }
            }
        }
        {
            let db = grad.slice_mut(b_entry);
            for i in 0..rows {
                for (g, &dv) in db.iter_mut().zip(delta.row(i)) {
                    *g += dv;
                }
            }
        }
        // dX = delta * W^T
        let w = self.entry_slice(layer, ParamRole::Weight);
        let mut dx = Matrix::zeros(rows, in_dim);
        for i in 0..rows {
            let dr = delta.row(i);
            let dxr = dx.row_mut(i);
            for (p, dxv) in dxr.iter_mut().enumerate() {
                let wr = &w[p * out_dim..(p + 1) * out_dim];
                let mut acc = 0.0;
                for (&dv, &wv) in dr.iter().zip(wr) {
                    acc += dv * wv;
                }
                *dxv = acc;
            }
        }
        dx
    }

    fn batchnorm_forward(
        &mut self,
        layer: usize,
        dim: usize,
        epsilon: f64,
        x: &Matrix,
        mode: Mode,
        aux: &mut Vec<LayerAux>,
    ) -> Matrix {
        if mode == Mode::Eval {
            return self.batchnorm_eval(layer, dim, epsilon, x);
        }
        let m = x.rows() as f64;
        let mut mean = vec![0.0; dim];
        for i in 0..x.rows() {
            for (mj, &v) in mean.iter_mut().zip(x.row(i)) {
                *mj += v;
            }
        }
        for mj in &mut mean {
            *mj /= m;
        }
        let mut centered = x.clone();
        for i in 0..x.rows() {
            for (v, &mj) in centered.row_mut(i).iter_mut().zip(&mean) {
                *v -= mj;
            }
        }
        let mut var = vec![0.0; dim];
        for i in 0..centered.rows() {
            for (vj, &c) in var.iter_mut().zip(centered.row(i)) {
                *vj += c * c;
            }
        }
        for vj in &mut var {
            *vj /= m;
        }
        let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / (v + epsilon).sqrt()).collect();
        let mut x_hat = centered.clone();
        for i in 0..x_hat.rows() {
            for (v, &s) in x_hat.row_mut(i).iter_mut().zip(&inv_std) {
                *v *= s;
            }
        }
        let gamma = self.entry_slice(layer, ParamRole::BnGamma).to_vec();
        let beta = self.entry_slice(layer, ParamRole::BnBeta).to_vec();
        let mut out = x_hat.clone();
        for i in 0..out.rows() {
            for ((v, &g), &b) in out.row_mut(i).iter_mut().zip(&gamma).zip(&beta) {
                *v = *v * g + b;
            }
        }
        // update running statistics in place
        let layout = Arc::clone(self.params.layout());
        let rm_entry = layout.entry(layer, ParamRole::BnRunningMean).expect("bn mean entry");
        let rv_entry = layout.entry(layer, ParamRole::BnRunningVar).expect("bn var entry");
        for (rm, &mj) in self.params.slice_mut(rm_entry).iter_mut().zip(&mean) {
            *rm = BN_MOMENTUM * *rm + (1.0 - BN_MOMENTUM) * mj;
        }
        for (rv, &vj) in self.params.slice_mut(rv_entry).iter_mut().zip(&var) {
            *rv = BN_MOMENTUM * *rv + (1.0 - BN_MOMENTUM) * vj;
        }
        aux.push(LayerAux::BatchNorm { centered, x_hat, inv_std });
        out
    }

    fn batchnorm_eval(&self, layer: usize, dim: usize, epsilon: f64, x: &Matrix) -> Matrix {
        let gamma = self.entry_slice(layer, ParamRole::BnGamma);
        let beta = self.entry_slice(layer, ParamRole::BnBeta);
        let rm = self.entry_slice(layer, ParamRole::BnRunningMean);
        let rv = self.entry_slice(layer, ParamRole::BnRunningVar);
        let inv_std: Vec<f64> = rv.iter().map(|&v| 1.0 / (v + epsilon).sqrt()).collect();
        let mut out = x.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for j in 0..dim {
                row[j] = gamma[j] * (row[j] - rm[j]) * inv_std[j] + beta[j];
            }
        }
        out
    }

    fn batchnorm_backward(
        &self,
        layer: usize,
        dim: usize,
        centered: &Matrix,
        x_hat: &Matrix,
        inv_std: &[f64],
        delta: &Matrix,
        grad: &mut ParamVector,
    ) -> Matrix {
        let m = centered.rows() as f64;
        let layout = Arc::clone(self.params.layout());
        let g_entry = layout.entry(layer, ParamRole::BnGamma).expect("bn gamma entry");
        let b_entry = layout.entry(layer, ParamRole::BnBeta).expect("bn beta entry");

        let mut dgamma = vec![0.0; dim];
        let mut dbeta = vec![0.0; dim];
        for i in 0..delta.rows() {
            let dr = delta.row(i);
            let xr = x_hat.row(i);
            for j in 0..dim {
                dgamma[j] += dr[j] * xr[j];
                dbeta[j] += dr[j];
            }
        }
        grad.slice_mut(g_entry).copy_from_slice(&dgamma);
        grad.slice_mut(b_entry).copy_from_slice(&dbeta);

        let gamma = self.entry_slice(layer, ParamRole::BnGamma);
        // dvar and dmean summed per feature, then distributed per sample.
        let mut dvar = vec![0.0; dim];
        let mut dxhat_sum = vec![0.0; dim];
        let mut centered_sum = vec![0.0; dim];
        for i in 0..delta.rows() {
            let dr = delta.row(i);
            let cr = centered.row(i);
            for j in 0..dim {
                let dxh = dr[j] * gamma[j];
                dxhat_sum[j] += dxh;
                dvar[j] += dxh * cr[j];
                centered_sum[j] += cr[j];
            }
        }
        for j in 0..dim {
            dvar[j] *= -0.5 * inv_std[j] * inv_std[j] * inv_std[j];
        }
        let mut dmean = vec![0.0; dim];
        for j in 0..dim {
            dmean[j] = -inv_std[j] * dxhat_sum[j] + dvar[j] * (-2.0 / m) * centered_sum[j];
        }
        let mut dx = Matrix::zeros(delta.rows(), dim);
        for i in 0..delta.rows() {
            let dr = delta.row(i);
            let cr = centered.row(i);
            let dxr = dx.row_mut(i);
            for j in 0..dim {
                let dxh = dr[j] * gamma[j];
                dxr[j] = dxh * inv_std[j] + dvar[j] * 2.0 * cr[j] / m + dmean[j] / m;
            }
        }
        dx
    }
}

fn relu_forward(x: &Matrix, mode: Mode, aux: &mut Vec<LayerAux>) -> Matrix {
    let mut out = x.clone();
    if mode == Mode::Train {
        let mut active = Vec::with_capacity(out.data().len());
        for v in out.data_mut() {
            active.push(*v > 0.0);
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        aux.push(LayerAux::Relu { active });
    } else {
        for v in out.data_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    out
}

fn dropout_forward(
    x: &Matrix,
    rate: f64,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    aux: &mut Vec<LayerAux>,
) -> Matrix {
    let mut out = x.clone();
    if mode == Mode::Train && rate > 0.0 {
        let scale = 1.0 / (1.0 - rate);
        let mut mask = Vec::with_capacity(out.data().len());
        for v in out.data_mut() {
            let keep = rng.random::<f64>() >= rate;
            let factor = if keep { scale } else { 0.0 };
            mask.push(factor);
            *v *= factor;
        }
        aux.push(LayerAux::Dropout { mask });
    } else if mode == Mode::Train {
        aux.push(LayerAux::Dropout { mask: Vec::new() });
    }
    out
}

fn stable_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn sigmoid_forward(x: &Matrix, mode: Mode, aux: &mut Vec<LayerAux>) -> Matrix {
    let mut out = x.clone();
    for v in out.data_mut() {
        *v = stable_sigmoid(*v);
    }
    if mode == Mode::Train {
        aux.push(LayerAux::Sigmoid { output: out.clone() });
    }
    out
}
