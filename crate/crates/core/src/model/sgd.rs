//! Stochastic gradient ascent on the conditional log-likelihood.

use crate::ccg::Lexicon;
use crate::chart::ChartConfig;
use crate::lambda::Term;
use crate::model::{gradient, ModelError, ParamVector};

/// Learning-rate schedule: step(t) = α₀ / (1 + c·t), where t = i + k·n
/// counts updates across passes (i is the 1-based example index within
/// pass k of n examples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdSchedule {
    pub alpha0: f64,
    pub c: f64,
    pub passes: usize,
}

impl Default for SgdSchedule {
    fn default() -> Self {
        SgdSchedule { alpha0: 0.1, c: 0.001, passes: 3 }
    }
}

impl SgdSchedule {
    pub fn step(&self, t: u64) -> f64 {
        self.alpha0 / (1.0 + self.c * t as f64)
    }
}

/// Knobs for [`estimate`]. The objective itself carries no
/// regularization; `l2`, off by default, subtracts `l2·θ_j` from each
/// touched coordinate's gradient for experimentation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateOptions {
    pub chart: ChartConfig,
    pub l2: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EstimateOutcome {
    pub params: ParamVector,
    /// (pass, example index) of examples skipped because their logical
    /// form was not derivable under the lexicon.
    pub skipped: Vec<(usize, usize)>,
}

/// Fits θ by stochastic gradient ascent: `passes` sweeps over the
/// examples in fixed order, one update per example. Examples whose
/// logical form cannot be derived are skipped (and reported); parameters
/// of lexical items never touched by any chart are left unchanged.
pub fn estimate(
    lexicon: &Lexicon,
    examples: &[(Vec<String>, Term)],
    initial: &ParamVector,
    sched: &SgdSchedule,
    opts: &EstimateOptions,
) -> Result<EstimateOutcome, ModelError> {
    let mut params = initial.clone();
    let mut skipped = Vec::new();
    let n = examples.len() as u64;
    for pass in 0..sched.passes {
        for (idx, (tokens, target)) in examples.iter().enumerate() {
            // t = i + k·n with 1-based i; t advances by loop position
            // whether or not the example yields an update.
            let t = (idx as u64 + 1) + pass as u64 * n;
            let step = sched.step(t);
            match gradient(tokens, target, lexicon, &params, &opts.chart) {
                Ok(grad) => {
                    for (item, g) in grad {
                        let mut delta = step * g;
                        if let Some(l2) = opts.l2 {
                            delta -= step * l2 * params.weight(&item);
                        }
                        params.add(&item, delta);
                    }
                }
                Err(ModelError::EmptyChart) | Err(ModelError::UnderivableTarget) => {
                    skipped.push((pass, idx));
                }
                Err(err) => return Err(err),
            }
        }
    }
    Ok(EstimateOutcome { params, skipped })
}
