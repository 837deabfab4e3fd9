use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type MigFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Confidence-width schedule `β_t`.
///
/// Either a constant, or `β_t = B + σ·√(2(γ_{t−1} + 1 + ln(1/δ)))` with `γ`
/// supplied by an information-gain evaluator.
#[derive(Clone)]
pub struct BetaSchedule {
    kind: Kind,
}

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Theoretical {
        rkhs_bound: f64,
        noise_sd: f64,
        delta: f64,
        mig: MigFn,
    },
}

impl fmt::Debug for BetaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(v) => f.debug_tuple("BetaSchedule::Constant").field(v).finish(),
            Kind::Theoretical {
                rkhs_bound,
                noise_sd,
                delta,
                ..
            } => f
                .debug_struct("BetaSchedule::Theoretical")
                .field("rkhs_bound", rkhs_bound)
                .field("noise_sd", noise_sd)
                .field("delta", delta)
                .finish_non_exhaustive(),
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("failure probability δ = {delta} must lie in (0, 1)")))
    }
}

impl BetaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::config(format!("β override {value} must be positive")));
        }
        Ok(BetaSchedule {
            kind: Kind::Constant(value),
        })
    }

    pub fn theoretical<F>(rkhs_bound: f64, noise_sd: f64, delta: f64, mig: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        check_delta(delta)?;
        if !(rkhs_bound.is_finite() && rkhs_bound > 0.0) {
            return Err(Error::config(format!("RKHS bound {rkhs_bound} must be positive")));
        }
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::config(format!("noise level {noise_sd} must be nonnegative")));
        }
        Ok(BetaSchedule {
            kind: Kind::Theoretical {
                rkhs_bound,
                noise_sd,
                delta,
                mig: Arc::new(mig),
            },
        })
    }

    /// Theoretical schedule reading `γ_t` from a precomputed curve, held at
    /// its last value past the end.
    pub fn from_mig_curve(rkhs_bound: f64, noise_sd: f64, delta: f64, curve: Vec<f64>) -> Result<Self> {
        if curve.is_empty() {
            return Err(Error::config("information-gain curve is empty"));
        }
        Self::theoretical(rkhs_bound, noise_sd, delta, move |t| {
            curve[t.min(curve.len() - 1)]
        })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant(_))
    }

    /// `β_t` for `t ≥ 1`.
    pub fn beta(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(Error::config("β_t is defined for t ≥ 1"));
        }
        match &self.kind {
            Kind::Constant(v) => Ok(*v),
            Kind::Theoretical {
                rkhs_bound,
                noise_sd,
                delta,
                mig,
            } => {
                check_delta(*delta)?;
                let gamma = mig(t - 1);
                Ok(rkhs_bound + noise_sd * (2.0 * (gamma + 1.0 + (1.0 / delta).ln())).sqrt())
            }
        }
    }
}
