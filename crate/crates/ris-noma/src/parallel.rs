//! Rayon-backed fitness evaluation.

use rayon::prelude::*;
use ris_noma_core::optimizer::{evaluate_fitness, DecisionVector, Fitness, FitnessEvaluator, Problem};
use ris_noma_core::Result;

/// Evaluates a batch on the rayon pool. Results come back in batch order,
/// so GA runs are identical to [`ris_noma_core::optimizer::Sequential`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl FitnessEvaluator for Parallel {
    fn evaluate_batch(&self, problem: &Problem, batch: &[DecisionVector]) -> Result<Vec<Fitness>> {
        batch.par_iter().map(|x| evaluate_fitness(x, problem)).collect()
    }
}
