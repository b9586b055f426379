//! Genetic-algorithm tuning of the four dynamics parameters.
//!
//! Mutation-only, elitist: each generation the top quarter of the population
//! survives unchanged and each parent is cloned into three children whose
//! genes are jointly perturbed with probability `mutation_rate`. Fitness is
//! the negated sum of absolute differences between the decoded and the
//! analytically integrated trajectory over a seeded random-velocity trial,
//! so it approaches zero from below as tuning improves.

use crate::attractor::{
    NetworkParams, ACTIVATION_RADIUS_RANGE, EXCITATION_RADIUS_RANGE, GAMMA_RANGE, PHI_RANGE,
};
use crate::error::{CoreError, Result};
use crate::heading::HeadDirection;
use crate::multiscale::{ScaleStack, StackConfig};
use crate::seed::derive_seed;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// A candidate `[A, E, gamma, phi]` vector. The radii are stored as reals
/// and rounded when instantiated into [`NetworkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub a: f64,
    pub e: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl Genome {
    pub fn genes(&self) -> [f64; 4] {
        [self.a, self.e, self.gamma, self.phi]
    }

    pub fn from_genes(genes: [f64; 4]) -> Self {
        Self { a: genes[0], e: genes[1], gamma: genes[2], phi: genes[3] }
    }

    pub fn within_ranges(&self) -> bool {
        let r = gene_ranges();
        self.genes().iter().zip(&r).all(|(g, (lo, hi))| g >= lo && g <= hi)
    }

    pub fn to_params(&self) -> Result<NetworkParams> {
        NetworkParams::new(
            self.a.round().clamp(ACTIVATION_RADIUS_RANGE.0, ACTIVATION_RADIUS_RANGE.1) as usize,
            self.e.round().clamp(EXCITATION_RADIUS_RANGE.0, EXCITATION_RADIUS_RANGE.1) as usize,
            self.gamma,
            self.phi,
        )
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Config(format!("genome serialization: {e}")))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let genome: Genome = serde_json::from_str(&text)
            .map_err(|e| CoreError::parse(path.display().to_string(), None, e.to_string()))?;
        if !genome.within_ranges() {
            return Err(CoreError::Config(format!(
                "genome in {} violates the parameter ranges",
                path.display()
            )));
        }
        Ok(genome)
    }
}

/// Per-gene bounds `[A, E, gamma, phi]`.
pub fn gene_ranges() -> [(f64, f64); 4] {
    [ACTIVATION_RADIUS_RANGE, EXCITATION_RADIUS_RANGE, GAMMA_RANGE, PHI_RANGE]
}

/// Which network a fitness trial drives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialTopology {
    /// Head-direction ring of `n` neurons.
    Ring { n: usize },
    /// Position stack; `scales` has one entry for the single-scale baseline.
    Stack { side: usize, scales: Vec<f64> },
}

/// Seeded random path-integration trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub topology: TrialTopology,
    pub steps: usize,
    /// 2D: speeds drawn uniform from `[0, max_speed]` m/s.
    pub max_speed: f64,
    /// Heading (2D) or ring (1D) change per step drawn uniform from
    /// `[-max_turn_deg, max_turn_deg]` degrees.
    pub max_turn_deg: f64,
    pub dt: f64,
}

impl TrialSpec {
    pub fn default_2d() -> Self {
        Self {
            topology: TrialTopology::Stack { side: 100, scales: vec![0.25, 1.0, 4.0, 16.0] },
            steps: 1000,
            max_speed: 20.0,
            max_turn_deg: 30.0,
            dt: 1.0,
        }
    }

    pub fn default_1d() -> Self {
        Self {
            topology: TrialTopology::Ring { n: 360 },
            steps: 1000,
            max_speed: 20.0,
            max_turn_deg: 30.0,
            dt: 1.0,
        }
    }
}

/// Tuner configuration; the defaults mirror the experimental setup
/// (24 genomes, 20 generations, 14 parallel workers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Probability that a child is perturbed at all.
    pub mutation_rate: f64,
    /// Per-gene Gaussian step as a fraction of the gene's range width
    /// (`phi` is mutated in log-space; its range spans 2.7 decades).
    pub mutation_scale: f64,
    pub parent_fraction: f64,
    pub children_per_parent: usize,
    pub parallel_workers: usize,
    pub rng_seed: u64,
    pub trial: TrialSpec,
}

impl GaConfig {
    pub fn defaults_2d() -> Self {
        Self {
            population_size: 24,
            max_generations: 20,
            mutation_rate: 0.8,
            mutation_scale: 0.1,
            parent_fraction: 0.25,
            children_per_parent: 3,
            parallel_workers: 14,
            rng_seed: 0,
            trial: TrialSpec::default_2d(),
        }
    }

    pub fn defaults_1d() -> Self {
        Self { trial: TrialSpec::default_1d(), ..Self::defaults_2d() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.max_generations == 0 {
            return Err(CoreError::Config("population and generations must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(CoreError::Config("mutation rate must be in [0, 1]".into()));
        }
        if !(0.0 < self.parent_fraction && self.parent_fraction <= 1.0) {
            return Err(CoreError::Config("parent fraction must be in (0, 1]".into()));
        }
        let parents = parent_count(self.population_size, self.parent_fraction);
        let next = parents * (1 + self.children_per_parent);
        if next != self.population_size {
            return Err(CoreError::Config(format!(
                "population of {} cannot be rebuilt from {parents} parents x (1 + {} children)",
                self.population_size, self.children_per_parent
            )));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: GaConfig = serde_json::from_str(&text)
            .map_err(|e| CoreError::parse(path.display().to_string(), None, e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Config(format!("config serialization: {e}")))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

pub fn parent_count(population_size: usize, parent_fraction: f64) -> usize {
    ((population_size as f64 * parent_fraction).ceil() as usize).max(1)
}

/// Top `ceil(fraction*N)` population indices by fitness, ties broken toward
/// the lower index.
pub fn select_parents(fitnesses: &[f64], parent_fraction: f64) -> Result<Vec<usize>> {
    if fitnesses.is_empty() {
        return Err(CoreError::Input("cannot select parents from an empty population".into()));
    }
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&i, &j| {
        fitnesses[j]
            .partial_cmp(&fitnesses[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    order.truncate(parent_count(fitnesses.len(), parent_fraction));
    Ok(order)
}

/// Jointly perturbs every gene with probability `rate`, resampling the whole
/// genome until it falls within the ranges (capped at 1000 attempts, then
/// clamped). Returns the genome and whether the clamp fallback fired.
pub fn mutate(genome: &Genome, rate: f64, scale: f64, rng: &mut ChaCha8Rng) -> (Genome, bool) {
    if rng.random_range(0.0..1.0) >= rate {
        return (*genome, false);
    }
    let ranges = gene_ranges();
    let log_phi_width = (PHI_RANGE.1.ln() - PHI_RANGE.0.ln()) * scale;
    let normals: Vec<Normal<f64>> = ranges
        .iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let sigma = if i == 3 { log_phi_width } else { (hi - lo) * scale };
            Normal::new(0.0, sigma).expect("sigma is finite and positive")
        })
        .collect();

    for _ in 0..1000 {
        let mut genes = genome.genes();
        for (i, gene) in genes.iter_mut().enumerate() {
            if i == 3 {
                *gene = (gene.ln() + normals[i].sample(rng)).exp();
            } else {
                *gene += normals[i].sample(rng);
            }
        }
        let candidate = Genome::from_genes(genes);
        if candidate.within_ranges() {
            return (candidate, false);
        }
    }

    let mut genes = genome.genes();
    for (i, gene) in genes.iter_mut().enumerate() {
        *gene += normals[i].sample(rng);
        *gene = gene.clamp(ranges[i].0, ranges[i].1);
    }
    (Genome::from_genes(genes), true)
}

/// Per-generation tuning record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_genome: Genome,
}

/// Result of a tuning run.
#[derive(Debug, Clone)]
pub struct GaOutcome {
    /// Highest-fitness genome ever evaluated.
    pub best: Genome,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
    /// Genomes whose mutation hit the clamp fallback.
    pub clamp_events: u64,
}

/// Runs the tuner. `fitness` must be pure given the run seed; evaluations
/// within a generation are dispatched to a worker pool and collected
/// positionally, so worker count never affects the outcome.
pub fn run_ga<F>(config: &GaConfig, fitness: F) -> Result<GaOutcome>
where
    F: Fn(&Genome) -> f64 + Sync,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel_workers.max(1))
        .build()
        .map_err(|e| CoreError::Config(format!("worker pool: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, "ga"));
    let ranges = gene_ranges();
    let mut population: Vec<Genome> = (0..config.population_size)
        .map(|_| {
            Genome::from_genes([
                rng.random_range(ranges[0].0..=ranges[0].1),
                rng.random_range(ranges[1].0..=ranges[1].1),
                rng.random_range(ranges[2].0..=ranges[2].1),
                rng.random_range(ranges[3].0..=ranges[3].1),
            ])
        })
        .collect();
    let mut cached: Vec<Option<f64>> = vec![None; population.len()];

    let mut history = Vec::with_capacity(config.max_generations);
    let mut best_ever: Option<(f64, Genome)> = None;
    let mut clamp_events = 0;

    for generation in 0..config.max_generations {
        let fitnesses: Vec<f64> = pool.install(|| {
            use rayon::prelude::*;
            population
                .par_iter()
                .zip(cached.par_iter())
                .map(|(genome, cache)| {
                    let f = cache.unwrap_or_else(|| fitness(genome));
                    if f.is_finite() {
                        f
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        });

        let mut best_idx = 0;
        for (i, &f) in fitnesses.iter().enumerate() {
            if f > fitnesses[best_idx] {
                best_idx = i;
            }
            if best_ever.is_none() || f > best_ever.unwrap().0 {
                best_ever = Some((f, population[i]));
            }
        }
        let finite: Vec<f64> = fitnesses.iter().copied().filter(|f| f.is_finite()).collect();
        let mean = if finite.is_empty() {
            f64::NEG_INFINITY
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        history.push(GenerationStats {
            generation,
            best_fitness: fitnesses[best_idx],
            mean_fitness: mean,
            best_genome: population[best_idx],
        });

        let parents = select_parents(&fitnesses, config.parent_fraction)?;
        let mut next_population = Vec::with_capacity(config.population_size);
        let mut next_cached = Vec::with_capacity(config.population_size);
        for &p in &parents {
            next_population.push(population[p]);
            next_cached.push(Some(fitnesses[p]));
        }
        for &p in &parents {
            for _ in 0..config.children_per_parent {
                let (child, clamped) =
                    mutate(&population[p], config.mutation_rate, config.mutation_scale, &mut rng);
                if clamped {
                    clamp_events += 1;
                }
                next_population.push(child);
                next_cached.push(None);
            }
        }
        population = next_population;
        cached = next_cached;
    }

    let (best_fitness, best) = best_ever.expect("at least one generation ran");
    Ok(GaOutcome { best, best_fitness, history, clamp_events })
}

/// Writes the per-generation history in CSV form
/// (`generation,best_fitness,mean_fitness,best_a,best_e,best_gamma,best_phi`).
pub fn write_history_csv(history: &[GenerationStats], path: &std::path::Path) -> Result<()> {
    let mut out = String::from("generation,best_fitness,mean_fitness,best_a,best_e,best_gamma,best_phi\n");
    for row in history {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.generation,
            row.best_fitness,
            row.mean_fitness,
            row.best_genome.a,
            row.best_genome.e,
            row.best_genome.gamma,
            row.best_genome.phi
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Outcome of one path-integration trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialResult {
    /// `-SAD` against the analytically integrated trajectory; approaches
    /// zero as integration improves. `-inf` if the network collapsed.
    pub fitness: f64,
    pub collapsed: bool,
}

/// Builds the trial network from the genome, drives it with a seeded random
/// velocity sequence and scores `-SAD` against exact integration.
///
/// The trial seed is fixed per tuning run, so every genome in every
/// generation faces the identical sequence.
pub fn fitness_path_integration(genome: &Genome, trial: &TrialSpec, trial_seed: u64) -> TrialResult {
    let collapsed = TrialResult { fitness: f64::NEG_INFINITY, collapsed: true };
    let params = match genome.to_params() {
        Ok(p) => p,
        Err(_) => return collapsed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);

    match &trial.topology {
        TrialTopology::Ring { n } => {
            let mut hd = match HeadDirection::with_ring_size(*n, 0.0, params) {
                Ok(hd) => hd,
                Err(_) => return collapsed,
            };
            let mut truth_deg = 0.0f64;
            let mut sad = 0.0;
            for _ in 0..trial.steps {
                let dtheta = rng.random_range(-trial.max_turn_deg..=trial.max_turn_deg);
                let omega = dtheta.to_radians() / trial.dt;
                match hd.step(omega, trial.dt) {
                    Ok(rep) if !rep.collapsed => {}
                    _ => return collapsed,
                }
                truth_deg += dtheta;
                let diff = (hd.heading_deg() - truth_deg.rem_euclid(360.0)).abs();
                sad += diff.min(360.0 - diff);
            }
            TrialResult { fitness: -sad, collapsed: false }
        }
        TrialTopology::Stack { side, scales } => {
            let config = StackConfig {
                side: *side,
                scales: scales.clone(),
                params,
                max_speed: trial.max_speed,
            };
            let mut stack = match ScaleStack::new(&config) {
                Ok(s) => s,
                Err(_) => return collapsed,
            };
            let mut heading_deg = 0.0f64;
            let (mut tx, mut ty) = (0.0f64, 0.0f64);
            let mut sad = 0.0;
            for _ in 0..trial.steps {
                heading_deg += rng.random_range(-trial.max_turn_deg..=trial.max_turn_deg);
                let v = rng.random_range(0.0..=trial.max_speed);
                match stack.step(v, heading_deg, trial.dt) {
                    Ok(rep) if !rep.collapsed => {}
                    _ => return collapsed,
                }
                let theta = heading_deg.to_radians();
                tx += v * trial.dt * theta.cos();
                ty += v * trial.dt * theta.sin();
                let (ex, ey) = stack.decode();
                sad += (ex - tx).abs() + (ey - ty).abs();
            }
            TrialResult { fitness: -sad, collapsed: false }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_arithmetic_matches_setup() {
        let config = GaConfig::defaults_2d();
        assert_eq!(config.population_size, 24);
        assert_eq!(parent_count(24, 0.25), 6);
        config.validate().unwrap();
        assert!(GaConfig { population_size: 25, ..GaConfig::defaults_2d() }.validate().is_err());
    }

    #[test]
    fn select_parents_orders_and_breaks_ties_by_index() {
        let picked = select_parents(&[-3.0, -1.0, -2.0, -4.0], 0.25).unwrap();
        assert_eq!(picked, vec![1]);
        let picked = select_parents(&[0.5; 8], 0.25).unwrap();
        assert_eq!(picked, vec![0, 1]);
        assert!(select_parents(&[], 0.25).is_err());
        let picked = select_parents(&[f64::NEG_INFINITY, -2.0, -1.0, -3.0], 0.5).unwrap();
        assert_eq!(picked, vec![2, 1]);
    }

    #[test]
    fn mutate_zero_rate_is_identity() {
        let g = Genome { a: 5.0, e: 5.0, gamma: 0.5, phi: 0.001 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (out, clamped) = mutate(&g, 0.0, 0.1, &mut rng);
            assert_eq!(out, g);
            assert!(!clamped);
        }
    }

    #[test]
    fn mutate_always_lands_in_ranges() {
        let g = Genome { a: 9.9, e: 1.05, gamma: 0.99, phi: 0.0000101 };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let (out, _) = mutate(&g, 1.0, 0.1, &mut rng);
            assert!(out.within_ranges(), "out of range: {out:?}");
        }
    }

    #[test]
    fn mutate_vanishing_noise_stays_close() {
        let g = Genome { a: 5.0, e: 5.0, gamma: 0.5, phi: 0.001 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (out, _) = mutate(&g, 1.0, 1e-9, &mut rng);
        assert!((out.a - g.a).abs() < 1e-6);
        assert!((out.e - g.e).abs() < 1e-6);
        assert!((out.gamma - g.gamma).abs() < 1e-6);
        assert!((out.phi - g.phi).abs() / g.phi < 1e-6);
    }

    fn sphere_fitness(target: &Genome) -> impl Fn(&Genome) -> f64 + Sync + '_ {
        move |g: &Genome| {
            let ranges = gene_ranges();
            -g.genes()
                .iter()
                .zip(target.genes())
                .zip(&ranges)
                .map(|((gi, ti), (lo, hi))| {
                    let d = (gi - ti) / (hi - lo);
                    d * d
                })
                .sum::<f64>()
        }
    }

    #[test]
    fn ga_population_flow_and_elitism() {
        let target = Genome { a: 6.0, e: 4.0, gamma: 0.7, phi: 0.003 };
        let config = GaConfig { rng_seed: 7, max_generations: 8, ..GaConfig::defaults_2d() };
        let outcome = run_ga(&config, sphere_fitness(&target)).unwrap();
        assert_eq!(outcome.history.len(), 8);
        for w in outcome.history.windows(2) {
            assert!(
                w[1].best_fitness >= w[0].best_fitness,
                "best fitness decreased: {} -> {}",
                w[0].best_fitness,
                w[1].best_fitness
            );
        }
    }

    #[test]
    fn ga_zero_mutation_keeps_children_identical() {
        let target = Genome { a: 6.0, e: 4.0, gamma: 0.7, phi: 0.003 };
        let config = GaConfig {
            rng_seed: 1,
            max_generations: 4,
            mutation_rate: 0.0,
            ..GaConfig::defaults_2d()
        };
        let outcome = run_ga(&config, sphere_fitness(&target)).unwrap();
        // with no variation the best cannot improve after generation 0
        let f0 = outcome.history[0].best_fitness;
        assert!(outcome.history.iter().all(|s| s.best_fitness == f0));
    }

    #[test]
    fn ga_recovers_sphere_target() {
        let target = Genome { a: 6.0, e: 4.0, gamma: 0.7, phi: 0.003 };
        let config = GaConfig { rng_seed: 9, ..GaConfig::defaults_2d() };
        let outcome = run_ga(&config, sphere_fitness(&target)).unwrap();
        let ranges = gene_ranges();
        for ((b, t), (lo, hi)) in outcome.best.genes().iter().zip(target.genes()).zip(&ranges) {
            assert!(
                (b - t).abs() <= 0.05 * (hi - lo),
                "gene {b} missed target {t} by more than 5% of range"
            );
        }
    }

    #[test]
    fn ga_determinism_is_independent_of_worker_count() {
        let target = Genome { a: 3.0, e: 8.0, gamma: 0.2, phi: 0.0001 };
        let base = GaConfig { rng_seed: 11, max_generations: 5, ..GaConfig::defaults_2d() };
        let one = run_ga(&GaConfig { parallel_workers: 1, ..base.clone() }, sphere_fitness(&target)).unwrap();
        let many = run_ga(&GaConfig { parallel_workers: 14, ..base }, sphere_fitness(&target)).unwrap();
        assert_eq!(one.best, many.best);
        assert_eq!(one.history.len(), many.history.len());
        for (a, b) in one.history.iter().zip(&many.history) {
            assert_eq!(a.best_fitness, b.best_fitness);
            assert_eq!(a.mean_fitness, b.mean_fitness);
        }
    }

    #[test]
    fn non_finite_fitness_never_selected() {
        let config = GaConfig { rng_seed: 5, max_generations: 3, ..GaConfig::defaults_2d() };
        let outcome = run_ga(&config, |g: &Genome| {
            if g.gamma > 0.5 {
                f64::NAN
            } else {
                -g.gamma
            }
        })
        .unwrap();
        assert!(outcome.best.gamma <= 0.5);
        assert!(outcome.best_fitness.is_finite());
    }

    #[test]
    fn fitness_trial_is_deterministic() {
        let genome = Genome { a: 3.0, e: 10.0, gamma: 1.0, phi: 0.0001 };
        let trial = TrialSpec { steps: 50, ..TrialSpec::default_1d() };
        let a = fitness_path_integration(&genome, &trial, 42);
        let b = fitness_path_integration(&genome, &trial, 42);
        assert_eq!(a.fitness, b.fitness);
        assert!(a.fitness <= 0.0);
    }

    #[test]
    fn fitness_perfect_decoder_scores_zero() {
        // SAD arithmetic check on the 1D trial shape: an oracle that follows
        // the analytic heading exactly has SAD 0; a constant 1-degree offset
        // over k steps scores -k.
        let diffs = [0.0f64; 100];
        assert_eq!(-diffs.iter().sum::<f64>(), 0.0);
        let offset = [1.0f64; 100];
        assert_eq!(-offset.iter().sum::<f64>(), -100.0);
    }

    #[test]
    fn genome_roundtrip_through_file() {
        let dir = std::env::temp_dir().join("mcan-genome-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("genome.json");
        let g = Genome { a: 3.0, e: 10.0, gamma: 0.95, phi: 0.00012 };
        g.save(&path).unwrap();
        let loaded = Genome::load(&path).unwrap();
        assert_eq!(g, loaded);
        std::fs::remove_dir_all(&dir).ok();
    }
}
