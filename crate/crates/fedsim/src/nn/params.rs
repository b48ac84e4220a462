//! Flat parameter vector and its layout.
//!
//! All trainable weights plus the batchnorm running statistics live in one
//! ordered `Vec<f64>`. The federation layer exchanges and averages these
//! vectors without knowing anything about layers; the layout maps slices back
//! to (layer, role, shape).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nn::layers::LayerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Weight,
    Bias,
    BnGamma,
    BnBeta,
    BnRunningMean,
    BnRunningVar,
}

impl ParamRole {
    /// Running statistics ride along in the vector but are not optimized.
    pub fn trainable(self) -> bool {
        !matches!(self, ParamRole::BnRunningMean | ParamRole::BnRunningVar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutEntry {
    pub layer: usize,
    pub role: ParamRole,
    /// (rows, cols); vectors are stored as (1, n).
    pub shape: (usize, usize),
    pub offset: usize,
}

impl LayoutEntry {
    pub fn len(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    entries: Vec<LayoutEntry>,
    total: usize,
}

impl Layout {
    pub fn from_stack(stack: &[LayerSpec]) -> Layout {
        let mut entries = Vec::new();
        let mut offset = 0;
        let mut push = |layer: usize, role: ParamRole, shape: (usize, usize)| {
            let entry = LayoutEntry { layer, role, shape, offset };
            offset += entry.len();
            entries.push(entry);
        };
        for (i, layer) in stack.iter().enumerate() {
            match *layer {
                LayerSpec::Dense { in_dim, out_dim } => {
                    push(i, ParamRole::Weight, (in_dim, out_dim));
                    push(i, ParamRole::Bias, (1, out_dim));
                }
                LayerSpec::BatchNorm { dim, .. } => {
                    push(i, ParamRole::BnGamma, (1, dim));
                    push(i, ParamRole::BnBeta, (1, dim));
                    push(i, ParamRole::BnRunningMean, (1, dim));
                    push(i, ParamRole::BnRunningVar, (1, dim));
                }
                _ => {}
            }
        }
        Layout { entries, total: offset }
    }

    pub fn entries(&self) -> &[LayoutEntry] {
        &self.entries
    }

    pub fn total_len(&self) -> usize {
        self.total
    }

    pub fn entry(&self, layer: usize, role: ParamRole) -> Option<&LayoutEntry> {
        self.entries.iter().find(|e| e.layer == layer && e.role == role)
    }
}

/// Flat, ordered vector of every model parameter, sharing its layout.
#[derive(Debug, Clone)]
pub struct ParamVector {
    layout: Arc<Layout>,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(layout: Arc<Layout>) -> ParamVector {
        let values = vec![0.0; layout.total_len()];
        ParamVector { layout, values }
    }

    pub fn from_values(layout: Arc<Layout>, values: Vec<f64>) -> Result<ParamVector> {
        if values.len() != layout.total_len() {
            return Err(Error::Shape(format!(
                "param vector length {} does not match layout length {}",
                values.len(),
                layout.total_len()
            )));
        }
        Ok(ParamVector { layout, values })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn slice(&self, entry: &LayoutEntry) -> &[f64] {
        &self.values[entry.offset..entry.offset + entry.len()]
    }

    pub fn slice_mut(&mut self, entry: &LayoutEntry) -> &mut [f64] {
        &mut self.values[entry.offset..entry.offset + entry.len()]
    }

    pub fn same_layout(&self, other: &ParamVector) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout
    }

    fn check_layout(&self, other: &ParamVector) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::Shape("param vector layouts differ".into()))
        }
    }

    /// `self - other`, elementwise.
    pub fn sub(&self, other: &ParamVector) -> Result<ParamVector> {
        self.check_layout(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ParamVector { layout: Arc::clone(&self.layout), values })
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &ParamVector, scale: f64) -> Result<()> {
        self.check_layout(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn max_abs_diff(&self, other: &ParamVector) -> Result<f64> {
        self.check_layout(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Weighted sum of vectors, accumulated in the order given.
    pub fn weighted_sum(terms: &[(f64, &ParamVector)]) -> Result<ParamVector> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Config("weighted_sum over no terms".into()))?;
        let mut acc = ParamVector::zeros(Arc::clone(first.layout()));
        for &(w, pv) in terms {
            acc.add_scaled(pv, w)?;
        }
        Ok(acc)
    }

    /// Clamp batchnorm running-variance slots to stay strictly positive.
    /// Momentum server steps can overshoot; normalization needs var > 0.
    pub fn floor_running_var(&mut self, min: f64) {
        let layout = Arc::clone(&self.layout);
        for entry in layout.entries() {
            if entry.role == ParamRole::BnRunningVar {
                for v in self.slice_mut(entry) {
                    if *v < min {
                        *v = min;
                    }
                }
            }
        }
    }
}
