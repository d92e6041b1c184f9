//! Problem dimensions and the canonical flat tensor layout.
//!
//! Every quantity indexed by (time, state, action) is stored as a flat
//! `Vec<f64>` in t-major order: index (t, s, a) maps to `(t*S + s)*A + a`.
//! Transition kernels use the four-index order (t, destination, source,
//! action). All modules share these two layouts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Horizon, state and action counts of an instance.
///
/// `horizon` is the number of transition steps T; tensors over time carry
/// T+1 slices. A single-stage problem (no transitions) has `horizon = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    /// Number of transition steps T.
    #[serde(rename = "T")]
    pub horizon: usize,
    /// Number of states S.
    #[serde(rename = "S")]
    pub states: usize,
    /// Number of actions A.
    #[serde(rename = "A")]
    pub actions: usize,
}

impl Dimensions {
    pub fn new(horizon: usize, states: usize, actions: usize) -> Result<Self> {
        if states == 0 || actions == 0 {
            return Err(Error::dim(format!(
                "states and actions must be positive, got S={states}, A={actions}"
            )));
        }
        Ok(Self { horizon, states, actions })
    }

    /// Length of a flattened (T+1) x S x A tensor.
    pub fn flat_len(&self) -> usize {
        (self.horizon + 1) * self.states * self.actions
    }

    /// Length of a flattened T x S x S x A kernel.
    pub fn kernel_len(&self) -> usize {
        self.horizon * self.states * self.states * self.actions
    }

    /// Flat index of (t, s, a), t-major then state then action.
    #[inline]
    pub fn idx(&self, t: usize, s: usize, a: usize) -> usize {
        debug_assert!(t <= self.horizon && s < self.states && a < self.actions);
        (t * self.states + s) * self.actions + a
    }

    /// Flat kernel index of (t, destination, source, action).
    #[inline]
    pub fn kidx(&self, t: usize, dest: usize, src: usize, a: usize) -> usize {
        debug_assert!(t < self.horizon && dest < self.states && src < self.states && a < self.actions);
        ((t * self.states + dest) * self.states + src) * self.actions + a
    }

    /// Inverse of [`Dimensions::idx`]: recovers (t, s, a) from a flat index.
    pub fn unravel(&self, flat: usize) -> (usize, usize, usize) {
        let a = flat % self.actions;
        let rest = flat / self.actions;
        let s = rest % self.states;
        let t = rest / self.states;
        (t, s, a)
    }

    pub(crate) fn check_flat(&self, len: usize, what: &str) -> Result<()> {
        if len != self.flat_len() {
            return Err(Error::dim(format!(
                "{what} has length {len}, expected {} for T={}, S={}, A={}",
                self.flat_len(),
                self.horizon,
                self.states,
                self.actions
            )));
        }
        Ok(())
    }
}

/// JSON document for flat tensors: `{"dims":{"T":..,"S":..,"A":..},"data":[..]}`.
///
/// Population tensors have `(T+1)*S*A` entries in (t, s, a) order; kernels
/// have `T*S*S*A` entries in (t, s, s', a) order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDoc {
    pub dims: Dimensions,
    pub data: Vec<f64>,
}
