//! Genetic algorithm for the energy-efficiency maximisation problem.
//!
//! The GA minimises `1/η` over user powers, RIS phases and amplitudes,
//! blocklength and repetition count. Every gene lives in `[0, 1]` and is
//! mapped affinely onto its box at decode time, so box constraints hold by
//! construction. The remaining constraints (delay, reliability, queue
//! stability, SIC power ordering) are handled with feasibility dominance:
//! feasible beats infeasible, then lower objective, then lower violation.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_positive, Error, Result};
use crate::link::{BeamformConfig, PowerAllocation};
use crate::system::SystemModel;
use crate::traffic::STRICT_MARGIN;

/// Objective assigned when `η` is zero or undefined (unstable queue).
pub const PENALTY_OBJECTIVE: f64 = f64::MAX;

/// Thresholds and box bounds of the optimisation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    /// Mean delay ceiling `τ̄^thr` (s).
    pub delay_thr: f64,
    /// Reliability floor `Rel^thr`.
    pub rel_thr: f64,
    /// Amplitude ceiling `β^max` (dimensionless).
    pub beta_max: f64,
    /// Smallest power the genome can decode to (W); keeps `P_k > 0`.
    pub p_min: f64,
    /// `P_max` (W).
    pub p_max: f64,
    /// `𝓛_max`.
    pub l_max: u32,
    /// Inclusive blocklength search range.
    pub blocklength_min: u32,
    pub blocklength_max: u32,
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        check_positive("delay_thr", self.delay_thr)?;
        if !(self.rel_thr > 0.0 && self.rel_thr < 1.0) {
            return Err(Error::InvalidParameter { name: "rel_thr", value: self.rel_thr });
        }
        check_positive("beta_max", self.beta_max)?;
        check_positive("p_min", self.p_min)?;
        check_positive("p_max", self.p_max)?;
        if self.p_min > self.p_max {
            return Err(Error::InvalidParameter { name: "p_min", value: self.p_min });
        }
        if self.l_max == 0 {
            return Err(Error::InvalidParameter { name: "l_max", value: 0.0 });
        }
        if self.blocklength_min == 0 || self.blocklength_min > self.blocklength_max {
            return Err(Error::InvalidParameter {
                name: "blocklength_min",
                value: self.blocklength_min as f64,
            });
        }
        Ok(())
    }
}

/// Decoded decision variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector {
    pub user_powers: Vec<f64>,
    pub phases: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub blocklength: u32,
    pub retransmissions: u32,
}

impl DecisionVector {
    /// `K + 2N + 2`.
    pub fn dimension(users: usize, elements: usize) -> usize {
        users + 2 * elements + 2
    }

    pub fn beamform(&self, beta_max: f64) -> Result<BeamformConfig> {
        BeamformConfig::new(self.amplitudes.clone(), self.phases.clone(), beta_max)
    }

    pub fn powers(&self) -> Result<PowerAllocation> {
        PowerAllocation::new(self.user_powers.clone())
    }

    /// True when every box constraint holds exactly.
    pub fn within_bounds(&self, c: &ConstraintSet) -> bool {
        self.user_powers.iter().all(|&p| p > 0.0 && p >= c.p_min && p <= c.p_max)
            && self.amplitudes.iter().all(|&b| (0.0..=c.beta_max).contains(&b))
            && self.phases.iter().all(|&t| (0.0..=2.0 * PI).contains(&t))
            && (c.blocklength_min..=c.blocklength_max).contains(&self.blocklength)
            && (1..=c.l_max).contains(&self.retransmissions)
    }
}

/// Non-negative constraint residuals, summed over users.
///
/// Delay overshoot is relative to `τ̄^thr`; ordering residuals are relative
/// to `P_max`; reliability and utilisation residuals are absolute.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Violations {
    pub delay: f64,
    pub reliability: f64,
    pub stability: f64,
    pub ordering: f64,
}

impl Violations {
    pub fn total(&self) -> f64 {
        self.delay + self.reliability + self.stability + self.ordering
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    /// `1/η`, or [`PENALTY_OBJECTIVE`] when `η` is zero or undefined.
    pub objective: f64,
    pub violations: Violations,
}

impl Fitness {
    pub fn is_feasible(&self, tolerance: f64) -> bool {
        self.violations.total() <= effective_tolerance(tolerance)
    }

    /// `η`, if defined and positive.
    pub fn eta(&self) -> Option<f64> {
        (self.objective < PENALTY_OBJECTIVE).then(|| 1.0 / self.objective)
    }
}

/// Tolerances below machine epsilon mean exact feasibility.
pub fn effective_tolerance(tolerance: f64) -> f64 {
    if tolerance < f64::EPSILON {
        0.0
    } else {
        tolerance
    }
}

/// A scenario together with its constraint set.
#[derive(Debug, Clone)]
pub struct Problem {
    model: SystemModel,
    constraints: ConstraintSet,
}

impl Problem {
    pub fn new(model: SystemModel, constraints: ConstraintSet) -> Result<Self> {
        constraints.validate()?;
        Ok(Self { model, constraints })
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn users(&self) -> usize {
        self.model.scenario().user_count()
    }

    pub fn elements(&self) -> usize {
        self.model.scenario().element_count()
    }

    pub fn dimension(&self) -> usize {
        DecisionVector::dimension(self.users(), self.elements())
    }

    /// Maps a normalised genome onto the decision box. Out-of-range genes are
    /// clamped, phase genes wrap.
    pub fn decode(&self, genome: &[f64]) -> Result<DecisionVector> {
        let (k, n) = (self.users(), self.elements());
        if genome.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                what: "genome",
                expected: self.dimension(),
                found: genome.len(),
            });
        }
        let c = &self.constraints;
        let unit = |g: f64| g.clamp(0.0, 1.0);
        let user_powers = genome[..k]
            .iter()
            .map(|&g| (c.p_min + unit(g) * (c.p_max - c.p_min)).clamp(c.p_min, c.p_max))
            .collect();
        let phases = genome[k..k + n].iter().map(|&g| 2.0 * PI * wrap_unit(g)).collect();
        let amplitudes = genome[k + n..k + 2 * n]
            .iter()
            .map(|&g| (unit(g) * c.beta_max).min(c.beta_max))
            .collect();
        let lerp_int = |g: f64, lo: u32, hi: u32| -> u32 {
            let v = libm::round(lo as f64 + unit(g) * (hi - lo) as f64) as u32;
            v.clamp(lo, hi)
        };
        Ok(DecisionVector {
            user_powers,
            phases,
            amplitudes,
            blocklength: lerp_int(genome[k + 2 * n], c.blocklength_min, c.blocklength_max),
            retransmissions: lerp_int(genome[k + 2 * n + 1], 1, c.l_max),
        })
    }

    /// Inverse of [`Problem::decode`] for in-bounds decision vectors.
    pub fn encode(&self, x: &DecisionVector) -> Result<Vec<f64>> {
        let c = &self.constraints;
        let (k, n) = (self.users(), self.elements());
        if x.user_powers.len() != k || x.phases.len() != n || x.amplitudes.len() != n {
            return Err(Error::LengthMismatch {
                what: "decision vector",
                expected: self.dimension(),
                found: DecisionVector::dimension(x.user_powers.len(), x.phases.len()),
            });
        }
        let span = |v: f64, lo: f64, hi: f64| if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
        let mut genome = Vec::with_capacity(self.dimension());
        genome.extend(x.user_powers.iter().map(|&p| span(p, c.p_min, c.p_max)));
        genome.extend(x.phases.iter().map(|&t| wrap_unit(t / (2.0 * PI))));
        genome.extend(x.amplitudes.iter().map(|&b| span(b, 0.0, c.beta_max)));
        genome.push(span(
            x.blocklength as f64,
            c.blocklength_min as f64,
            c.blocklength_max as f64,
        ));
        genome.push(span(x.retransmissions as f64, 1.0, c.l_max as f64));
        Ok(genome)
    }
}

fn wrap_unit(g: f64) -> f64 {
    let w = g - libm::floor(g);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Objective and constraint residuals of one decision vector, through the
/// full metric chain. Unstable queues do not error: they get
/// [`PENALTY_OBJECTIVE`] and a positive stability residual.
pub fn evaluate_fitness(x: &DecisionVector, problem: &Problem) -> Result<Fitness> {
    let c = &problem.constraints;
    let model = &problem.model;
    let beam = x.beamform(c.beta_max)?;
    let powers = x.powers()?;
    let m = model.metrics(&beam, &powers, x.blocklength, x.retransmissions)?;
    let s = model.scenario();
    let service = x.retransmissions as f64
        * (s.header_time + x.blocklength as f64 / s.bandwidth);

    let mut v = Violations::default();
    for k in 0..m.sjnr.len() {
        let delay = m.mean_delay[k].unwrap_or(service);
        v.delay += (delay / c.delay_thr - 1.0).max(0.0);
        v.reliability += (c.rel_thr - m.reliability[k]).max(0.0);
        v.stability += (m.utilization[k] - (1.0 - STRICT_MARGIN)).max(0.0);
    }
    v.ordering = x
        .user_powers
        .windows(2)
        .map(|w| ((w[0] - w[1]) / c.p_max).max(0.0))
        .sum();

    let objective = match m.energy_efficiency {
        Some(eta) if eta > 0.0 && eta.is_finite() => 1.0 / eta,
        _ => PENALTY_OBJECTIVE,
    };
    Ok(Fitness { objective, violations: v })
}

/// Feasibility-dominance comparison; `Less` means `a` ranks ahead of `b`.
pub fn compare(a: &Fitness, b: &Fitness, tolerance: f64) -> Ordering {
    match (a.is_feasible(tolerance), b.is_feasible(tolerance)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a.objective.total_cmp(&b.objective),
        (false, false) => a.violations.total().total_cmp(&b.violations.total()),
    }
}

/// Indices of `evals` from best to worst; ties keep the lower index first.
pub fn rank(evals: &[Fitness], tolerance: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&i, &j| compare(&evals[i], &evals[j], tolerance).then(i.cmp(&j)));
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaSettings {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means `1/dimension`.
    pub mutation_rate: Option<f64>,
    /// Initial Gaussian mutation width as a fraction of each gene range.
    pub mutation_scale: f64,
    /// Per-generation multiplier applied to the mutation width.
    pub mutation_decay: f64,
    pub elite_count: usize,
    pub tournament_size: usize,
    pub rng_seed: u64,
    pub constraint_tolerance: f64,
    /// Relative best-objective improvement below which a generation counts as
    /// stalled; disabled below machine epsilon.
    pub function_tolerance: f64,
    pub stall_generations: usize,
    /// Fraction of the initial population whose phases are co-phased to one
    /// of the users.
    pub cophase_fraction: f64,
}

impl GaSettings {
    /// Published scale: population 2000, 200 generations.
    pub fn paper() -> Self {
        Self { population_size: 2000, max_generations: 200, ..Self::desk() }
    }

    /// Desk scale: population 200, 100 generations.
    pub fn desk() -> Self {
        Self {
            population_size: 200,
            max_generations: 100,
            crossover_rate: 0.9,
            mutation_rate: None,
            mutation_scale: 0.1,
            mutation_decay: 0.99,
            elite_count: 2,
            tournament_size: 2,
            rng_seed: 0,
            constraint_tolerance: 1e-30,
            function_tolerance: 1e-30,
            stall_generations: 50,
            cophase_fraction: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::InvalidSettings("population size must be positive"));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::InvalidSettings("elite count must be below the population size"));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidSettings("tournament size must be positive"));
        }
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.crossover_rate) || !self.mutation_rate.is_none_or(prob) {
            return Err(Error::InvalidSettings("rates must be probabilities"));
        }
        if !prob(self.cophase_fraction) {
            return Err(Error::InvalidSettings("cophase fraction must be in [0, 1]"));
        }
        if !(self.mutation_scale >= 0.0 && self.mutation_decay > 0.0) {
            return Err(Error::InvalidSettings("mutation scale and decay must be non-negative"));
        }
        if !(self.constraint_tolerance >= 0.0 && self.function_tolerance >= 0.0) {
            return Err(Error::InvalidSettings("tolerances must be non-negative"));
        }
        Ok(())
    }
}

/// Summary of one generation for the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    /// 1-based generation number.
    pub generation: usize,
    /// Objective of the ranked-best individual.
    pub best_objective: f64,
    /// Total violation of the ranked-best individual.
    pub best_violation: f64,
    /// Mean objective over individuals with a defined `η`.
    pub mean_objective: Option<f64>,
    pub feasible_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_solution: DecisionVector,
    pub best_fitness: Fitness,
    /// `η` of the best solution (0 when undefined).
    pub best_eta: f64,
    pub fitness_history: Vec<GenerationStats>,
    pub feasible: bool,
    pub constraint_violations: Violations,
}

/// Evaluates a batch of decision vectors. Implementations must return
/// results in input order; they may evaluate concurrently.
pub trait FitnessEvaluator {
    fn evaluate_batch(&self, problem: &Problem, batch: &[DecisionVector]) -> Result<Vec<Fitness>>;
}

/// Evaluates one individual after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl FitnessEvaluator for Sequential {
    fn evaluate_batch(&self, problem: &Problem, batch: &[DecisionVector]) -> Result<Vec<Fitness>> {
        batch.iter().map(|x| evaluate_fitness(x, problem)).collect()
    }
}

pub fn run_ga(problem: &Problem, settings: &GaSettings) -> Result<OptimizationResult> {
    run_ga_with(problem, settings, &Sequential)
}

/// Runs the GA with a caller-supplied evaluator. The random stream is
/// consumed only by the driver, so results do not depend on how the
/// evaluator schedules its work.
pub fn run_ga_with<E: FitnessEvaluator + ?Sized>(
    problem: &Problem,
    settings: &GaSettings,
    evaluator: &E,
) -> Result<OptimizationResult> {
    settings.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.rng_seed);
    let dim = problem.dimension();
    let (users, elements) = (problem.users(), problem.elements());
    let tol = settings.constraint_tolerance;
    let mutation_rate = settings.mutation_rate.unwrap_or(1.0 / dim as f64);

    let cophased: Vec<Vec<f64>> = (1..=users)
        .map(|k| problem.model().cophased(k))
        .collect::<Result<_>>()?;
    let seeded = libm::round(settings.cophase_fraction * settings.population_size as f64) as usize;
    let mut population: Vec<Vec<f64>> = (0..settings.population_size)
        .map(|i| {
            let mut genome: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            if i < seeded {
                for (g, theta) in genome[users..users + elements].iter_mut().zip(&cophased[i % users]) {
                    *g = wrap_unit(theta / (2.0 * PI));
                }
            }
            genome
        })
        .collect();
    let mut fitness = evaluate_genomes(problem, evaluator, &population)?;
    let mut order = rank(&fitness, tol);
    let (mut best_genome, mut best_fit) = (population[order[0]].clone(), fitness[order[0]]);

    let mut history = Vec::with_capacity(settings.max_generations);
    let mut sigma = settings.mutation_scale;
    let stall_enabled = settings.function_tolerance >= f64::EPSILON && settings.stall_generations > 0;

    for generation in 1..=settings.max_generations {
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(settings.population_size);
        let mut next_fit: Vec<Fitness> = Vec::with_capacity(settings.population_size);
        for &idx in order.iter().take(settings.elite_count) {
            next.push(population[idx].clone());
            next_fit.push(fitness[idx]);
        }
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(settings.population_size - next.len());
        while next.len() + children.len() < settings.population_size {
            let a = tournament(&mut rng, &fitness, settings.tournament_size, tol);
            let b = tournament(&mut rng, &fitness, settings.tournament_size, tol);
            let (mut c1, mut c2) = (population[a].clone(), population[b].clone());
            if rng.random::<f64>() < settings.crossover_rate {
                for (x, y) in c1.iter_mut().zip(c2.iter_mut()) {
                    if rng.random::<bool>() {
                        core::mem::swap(x, y);
                    }
                }
            }
            for child in [&mut c1, &mut c2] {
                mutate(&mut rng, child, users, elements, mutation_rate, sigma);
            }
            children.push(c1);
            if next.len() + children.len() < settings.population_size {
                children.push(c2);
            }
        }
        next_fit.extend(evaluate_genomes(problem, evaluator, &children)?);
        next.extend(children);
        population = next;
        fitness = next_fit;
        order = rank(&fitness, tol);
        sigma *= settings.mutation_decay;

        let best = fitness[order[0]];
        if compare(&best, &best_fit, tol) == Ordering::Less {
            best_genome = population[order[0]].clone();
            best_fit = best;
        }
        history.push(generation_stats(generation, &fitness, &best, tol));

        if stall_enabled && generation > settings.stall_generations {
            let then = history[generation - 1 - settings.stall_generations];
            let feasible_then = then.best_violation <= effective_tolerance(tol);
            if feasible_then && best_fit.is_feasible(tol) {
                let gain = (then.best_objective - best_fit.objective) / then.best_objective.abs();
                if gain < settings.function_tolerance {
                    break;
                }
            }
        }
    }

    let best_solution = problem.decode(&best_genome)?;
    Ok(OptimizationResult {
        best_eta: best_fit.eta().unwrap_or(0.0),
        feasible: best_fit.is_feasible(tol),
        constraint_violations: best_fit.violations,
        best_fitness: best_fit,
        best_solution,
        fitness_history: history,
    })
}

fn evaluate_genomes<E: FitnessEvaluator + ?Sized>(
    problem: &Problem,
    evaluator: &E,
    genomes: &[Vec<f64>],
) -> Result<Vec<Fitness>> {
    let decoded = genomes
        .iter()
        .map(|g| problem.decode(g))
        .collect::<Result<Vec<_>>>()?;
    let out = evaluator.evaluate_batch(problem, &decoded)?;
    if out.len() != decoded.len() {
        return Err(Error::LengthMismatch {
            what: "evaluator output",
            expected: decoded.len(),
            found: out.len(),
        });
    }
    Ok(out)
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[Fitness], size: usize, tol: f64) -> usize {
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let challenger = rng.random_range(0..fitness.len());
        let ord = compare(&fitness[challenger], &fitness[winner], tol)
            .then(challenger.cmp(&winner));
        if ord == Ordering::Less {
            winner = challenger;
        }
    }
    winner
}

fn mutate(
    rng: &mut ChaCha8Rng,
    genome: &mut [f64],
    users: usize,
    elements: usize,
    rate: f64,
    sigma: f64,
) {
    for (i, g) in genome.iter_mut().enumerate() {
        if rng.random::<f64>() >= rate {
            continue;
        }
        let step: f64 = StandardNormal.sample(rng);
        let moved = *g + sigma * step;
        *g = if (users..users + elements).contains(&i) {
            wrap_unit(moved)
        } else {
            moved.clamp(0.0, 1.0)
        };
    }
}

fn generation_stats(generation: usize, fitness: &[Fitness], best: &Fitness, tol: f64) -> GenerationStats {
    let defined: Vec<f64> = fitness
        .iter()
        .map(|f| f.objective)
        .filter(|&o| o < PENALTY_OBJECTIVE)
        .collect();
    let mean_objective = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    let feasible = fitness.iter().filter(|f| f.is_feasible(tol)).count();
    GenerationStats {
        generation,
        best_objective: best.objective,
        best_violation: best.violations.total(),
        mean_objective,
        feasible_fraction: feasible as f64 / fitness.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::tests::two_user_scenario;
    use alloc::vec;

    fn constraints() -> ConstraintSet {
        ConstraintSet {
            delay_thr: 1e-3,
            rel_thr: 0.99999,
            beta_max: 100.0,
            p_min: 1e-6,
            p_max: 0.1,
            l_max: 10,
            blocklength_min: 20,
            blocklength_max: 400,
        }
    }

    fn problem(side: usize) -> Problem {
        // With both users on one bearing, user 1's SJNR is capped near
        // |G_1|²/|G_2|² ≈ 1.56, so the 32-byte payload cannot meet 1 ms.
        let mut s = two_user_scenario(side);
        s.payload_bits = 128;
        s.arrival_rates = vec![50.0, 50.0];
        Problem::new(SystemModel::new(s).unwrap(), constraints()).unwrap()
    }

    fn fit(objective: f64, violation: f64) -> Fitness {
        Fitness { objective, violations: Violations { delay: violation, ..Violations::default() } }
    }

    #[test]
    fn ranking_rules() {
        let tol = 1e-30;
        assert_eq!(compare(&fit(5.0, 0.0), &fit(1.0, 0.01), tol), Ordering::Less);
        assert_eq!(compare(&fit(2.0, 0.0), &fit(3.0, 0.0), tol), Ordering::Less);
        assert_eq!(compare(&fit(1.0, 0.4), &fit(9.0, 0.2), tol), Ordering::Greater);
        let evals = [fit(3.0, 0.0), fit(1.0, 0.5), fit(2.0, 0.0), fit(2.0, 0.0), fit(1.0, 0.1)];
        assert_eq!(rank(&evals, tol), vec![2, 3, 0, 4, 1]);
        // A loose tolerance admits small violations.
        assert_eq!(compare(&fit(1.0, 0.01), &fit(2.0, 0.0), 0.1), Ordering::Less);
    }

    #[test]
    fn decode_respects_bounds_and_round_trips() {
        let p = problem(2);
        assert_eq!(p.dimension(), 2 + 8 + 2);
        let x = p.decode(&vec![0.0; 12]).unwrap();
        assert_eq!(x.user_powers, vec![1e-6, 1e-6]);
        assert_eq!(x.blocklength, 20);
        assert_eq!(x.retransmissions, 1);
        let x = p.decode(&vec![1.0; 12]).unwrap();
        assert_eq!(x.user_powers, vec![0.1, 0.1]);
        assert_eq!(x.amplitudes, vec![100.0; 4]);
        assert_eq!(x.phases, vec![0.0; 4]);
        assert_eq!((x.blocklength, x.retransmissions), (400, 10));
        let wild = [-3.0, 7.0, 1.25, -0.25, 0.5, 2.0, -1.0, 3.0, 0.3, 0.9, -9.0, 9.0];
        let x = p.decode(&wild).unwrap();
        assert!(x.within_bounds(p.constraints()));
        assert!((x.phases[0] - 0.5 * PI).abs() < 1e-12);
        assert!((x.phases[1] - 1.5 * PI).abs() < 1e-12);
        let again = p.decode(&p.encode(&x).unwrap()).unwrap();
        assert_eq!(again.blocklength, x.blocklength);
        assert_eq!(again.retransmissions, x.retransmissions);
        for (a, b) in again.user_powers.iter().zip(&x.user_powers) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(p.decode(&[0.5; 3]).is_err());
    }

    #[test]
    fn fitness_residuals() {
        let p = problem(2);
        let mut x = p.decode(&vec![0.5; 12]).unwrap();
        x.blocklength = 200;
        x.retransmissions = 1;
        x.phases = p.model().cophased(2).unwrap();
        x.amplitudes = vec![50.0; 4];
        x.user_powers = vec![0.05, 0.01];
        let f = evaluate_fitness(&x, &p).unwrap();
        assert!((f.violations.ordering - 0.4).abs() < 1e-12);

        // 𝓛·T_f·Λ ≥ 1 always yields a stability residual and the penalty.
        x.user_powers = vec![0.01, 0.05];
        x.retransmissions = 10;
        x.blocklength = 400;
        let f = evaluate_fitness(&x, &p).unwrap();
        assert!(f.violations.stability > 0.0);
        assert_eq!(f.objective, PENALTY_OBJECTIVE);
        assert!(!f.is_feasible(1e-30));
    }

    #[test]
    fn feasible_interior_point() {
        // Strong SIC-ordered powers on a big array with a long code.
        let p = problem(10);
        let x = DecisionVector {
            user_powers: vec![0.05, 0.05],
            phases: p.model().cophased(2).unwrap(),
            amplitudes: vec![1.0; 100],
            blocklength: 160,
            retransmissions: 1,
        };
        let f = evaluate_fitness(&x, &p).unwrap();
        assert_eq!(f.violations.total(), 0.0, "{f:?}");
        assert!(f.objective > 0.0 && f.objective < PENALTY_OBJECTIVE);
        assert!(f.is_feasible(1e-30));
    }

    #[test]
    fn settings_validation() {
        assert!(GaSettings { population_size: 0, elite_count: 0, ..GaSettings::desk() }
            .validate()
            .is_err());
        assert!(GaSettings { population_size: 2, elite_count: 2, ..GaSettings::desk() }
            .validate()
            .is_err());
        assert!(GaSettings { crossover_rate: 1.5, ..GaSettings::desk() }.validate().is_err());
        let p = problem(2);
        assert!(matches!(
            run_ga(&p, &GaSettings { population_size: 0, elite_count: 0, ..GaSettings::desk() }),
            Err(Error::InvalidSettings(_))
        ));
        assert_eq!(GaSettings::paper().population_size, 2000);
        assert_eq!(GaSettings::paper().max_generations, 200);
    }

    #[test]
    fn zero_generations_returns_best_initial() {
        let p = problem(2);
        let s = GaSettings { population_size: 30, max_generations: 0, rng_seed: 5, ..GaSettings::desk() };
        let r = run_ga(&p, &s).unwrap();
        assert!(r.fitness_history.is_empty());
        // Re-create the initial population's evaluations and find its best.
        let again = run_ga(&p, &s).unwrap();
        assert_eq!(r, again);
        assert!(r.best_solution.within_bounds(p.constraints()));
    }

    #[test]
    fn elite_keeps_best_monotone_and_run_is_deterministic() {
        let p = problem(2);
        let s = GaSettings { population_size: 40, max_generations: 30, rng_seed: 9, ..GaSettings::desk() };
        let r = run_ga(&p, &s).unwrap();
        assert_eq!(r.fitness_history.len(), 30);
        let tol = s.constraint_tolerance;
        for w in r.fitness_history.windows(2) {
            let a = Fitness { objective: w[0].best_objective, violations: Violations { delay: w[0].best_violation, ..Default::default() } };
            let b = Fitness { objective: w[1].best_objective, violations: Violations { delay: w[1].best_violation, ..Default::default() } };
            assert_ne!(compare(&b, &a, tol), Ordering::Greater);
        }
        assert_eq!(r, run_ga(&p, &s).unwrap());
        let other = run_ga(&p, &GaSettings { rng_seed: 10, ..s.clone() }).unwrap();
        assert_ne!(r.fitness_history, other.fitness_history);
    }

    #[test]
    fn stall_detection_stops_early() {
        let p = problem(2);
        let s = GaSettings {
            population_size: 20,
            max_generations: 400,
            function_tolerance: 1e-3,
            stall_generations: 5,
            rng_seed: 1,
            ..GaSettings::desk()
        };
        let r = run_ga(&p, &s).unwrap();
        if r.feasible {
            assert!(r.fitness_history.len() < 400);
        }
    }
}
