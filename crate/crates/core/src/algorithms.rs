//! Steady-state (mu+1) EA and (mu+1) GA with `lambda_c` competing crossover
//! offspring, with exact function-evaluation accounting.
//!
//! A generation is split into three parts so experiments can reuse them
//! without touching the population: [`propose`] breeds the candidate,
//! [`Pool::select_victim`] picks whom it would replace, and
//! [`RunState::step`] applies both.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitpop::{BitString, Population};
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessSpec};
use crate::rng::{stream, Purpose, StreamRng};
use crate::theory::ceil_tolerant;
use crate::variation::{CrossoverKind, MutationSpec, Mutator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ea,
    Ga,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum InitPolicy {
    UniformRandom,
    /// Independent uniform points with exactly `n - k` ones.
    PlateauRandom,
    /// `mu` copies of one uniform plateau point (diversity 0).
    PlateauClone,
    /// Independent points, each with a uniform number of zeros in
    /// `0..=max_zeros` at uniform positions.
    BoundedZeros {
        max_zeros: usize,
    },
    Fixture {
        path: PathBuf,
    },
    Explicit {
        members: Vec<BitString>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub fitness: FitnessSpec,
    pub mu: usize,
    /// Crossover probability; ignored by the EA.
    pub p_c: f64,
    /// Offspring per crossover generation; ignored by the EA.
    pub lambda_c: usize,
    pub mutation: MutationSpec,
    #[serde(default)]
    pub crossover: CrossoverKind,
    pub init: InitPolicy,
    pub seed: u64,
    /// Maximum number of fitness evaluations, initialization included.
    pub budget: u64,
    /// Record the diversity every this many generations.
    #[serde(default)]
    pub trajectory_every: Option<u64>,
}

impl AlgorithmConfig {
    /// (mu+1) EA with standard bit mutation and uniform random initialization.
    pub fn ea(fitness: FitnessSpec, mu: usize, chi: f64, seed: u64, budget: u64) -> Self {
        AlgorithmConfig {
            algorithm: Algorithm::Ea,
            fitness,
            mu,
            p_c: 0.0,
            lambda_c: 1,
            mutation: MutationSpec::StandardBit { chi },
            crossover: CrossoverKind::Uniform,
            init: InitPolicy::UniformRandom,
            seed,
            budget,
            trajectory_every: None,
        }
    }

    /// GA with uniform crossover, standard bit mutation and uniform random initialization.
    pub fn ga(
        fitness: FitnessSpec,
        mu: usize,
        chi: f64,
        p_c: f64,
        lambda_c: usize,
        seed: u64,
        budget: u64,
    ) -> Self {
        AlgorithmConfig {
            algorithm: Algorithm::Ga,
            p_c,
            lambda_c,
            ..AlgorithmConfig::ea(fitness, mu, chi, seed, budget)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fitness.validate()?;
        let n = self.fitness.n();
        if self.mu == 0 {
            return Err(Error::invalid("mu must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.p_c) {
            return Err(Error::invalid(format!(
                "p_c must lie in [0, 1); got {}",
                self.p_c
            )));
        }
        if self.lambda_c == 0 {
            return Err(Error::invalid("lambda_c must be at least 1"));
        }
        self.mutation.validate(n)?;
        match &self.init {
            InitPolicy::PlateauRandom | InitPolicy::PlateauClone
                if self.fitness.plateau_ones().is_none() =>
            {
                Err(Error::invalid(format!(
                    "{:?} has no plateau to initialize on",
                    self.fitness
                )))
            }
            InitPolicy::Explicit { members } => check_members(members, self.mu, n),
            InitPolicy::BoundedZeros { max_zeros } if *max_zeros > n => Err(Error::invalid(
                format!("max_zeros={max_zeros} exceeds n={n}"),
            )),
            _ => Ok(()),
        }
    }

    /// Stable 64-bit FNV-1a hash of the JSON form, as 16 hex digits.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

fn check_members(members: &[BitString], mu: usize, n: usize) -> Result<()> {
    if members.len() != mu {
        return Err(Error::invalid(format!(
            "initial population has {} members, mu is {mu}",
            members.len()
        )));
    }
    if let Some(bad) = members.iter().find(|m| m.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: bad.len(),
        });
    }
    Ok(())
}

/// `ceil(max(6 sqrt(k) e^chi ln(mu), 1/p_c))`.
pub fn default_lambda_c(k: usize, chi: f64, mu: usize, p_c: f64) -> Result<usize> {
    if k == 0 || mu < 2 || !(chi > 0.0) {
        return Err(Error::invalid(format!(
            "need k >= 1, mu >= 2, chi > 0 (k={k}, mu={mu}, chi={chi})"
        )));
    }
    if !(p_c > 0.0 && p_c <= 1.0) {
        return Err(Error::invalid(format!("p_c must lie in (0, 1]; got {p_c}")));
    }
    let competing = 6.0 * (k as f64).sqrt() * chi.exp() * (mu as f64).ln();
    Ok((ceil_tolerant(competing.max(1.0 / p_c)) as usize).max(1))
}

/// Draws a uniform point with exactly `zeros` zero bits.
pub fn random_with_zeros<R: Rng + ?Sized>(n: usize, zeros: usize, rng: &mut R) -> BitString {
    let positions = index::sample(rng, n, zeros).into_vec();
    BitString::with_zeros_at(n, &positions).expect("positions in range")
}

pub fn random_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitString {
    let words = (0..n.div_ceil(64)).map(|_| rng.random::<u64>()).collect();
    BitString::from_words(words, n)
}

/// Builds the initial members for `cfg` (validated) from `rng`.
pub fn initial_members<R: Rng + ?Sized>(
    cfg: &AlgorithmConfig,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    let n = cfg.fitness.n();
    let plateau_zeros = || n - cfg.fitness.plateau_ones().expect("validated");
    let members = match &cfg.init {
        InitPolicy::UniformRandom => (0..cfg.mu).map(|_| random_uniform(n, rng)).collect(),
        InitPolicy::PlateauRandom => (0..cfg.mu)
            .map(|_| random_with_zeros(n, plateau_zeros(), rng))
            .collect(),
        InitPolicy::PlateauClone => vec![random_with_zeros(n, plateau_zeros(), rng); cfg.mu],
        InitPolicy::BoundedZeros { max_zeros } => (0..cfg.mu)
            .map(|_| {
                let zeros = rng.random_range(0..=*max_zeros);
                random_with_zeros(n, zeros, rng)
            })
            .collect(),
        InitPolicy::Fixture { path } => {
            let members = Population::load_fixture(path)?.members().to_vec();
            check_members(&members, cfg.mu, n)?;
            members
        }
        InitPolicy::Explicit { members } => members.clone(),
    };
    Ok(members)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Mutation,
    Crossover,
}

/// A bred candidate before selection.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub genotype: BitString,
    pub fitness: Fitness,
    pub branch: Branch,
    /// Evaluations spent producing it (1, or `lambda_c`).
    pub evaluations: u64,
    /// 1-based position within the batch of the first optimal offspring.
    pub optimum_at: Option<u64>,
    trial: BitString,
}

impl Candidate {
    pub fn new(n: usize) -> Self {
        Candidate {
            genotype: BitString::all_zeros(n),
            fitness: Fitness(i64::MIN),
            branch: Branch::Mutation,
            evaluations: 0,
            optimum_at: None,
            trial: BitString::all_zeros(n),
        }
    }
}

/// Population plus the fitness bookkeeping needed for worst-member selection.
#[derive(Clone, Debug)]
pub struct Pool {
    population: Population,
    fitness: Vec<Fitness>,
    levels: BTreeMap<Fitness, Vec<usize>>,
    slot: Vec<usize>,
    plateau_ones: Option<usize>,
    on_plateau: usize,
}

impl Pool {
    pub fn new(population: Population, spec: &FitnessSpec) -> Result<Self> {
        if population.genotype_len() != spec.n() {
            return Err(Error::LengthMismatch {
                left: spec.n(),
                right: population.genotype_len(),
            });
        }
        let fitness: Vec<Fitness> = population
            .members()
            .iter()
            .map(|m| spec.value_for_ones(m.count_ones()))
            .collect();
        let mut levels: BTreeMap<Fitness, Vec<usize>> = BTreeMap::new();
        let mut slot = vec![0; fitness.len()];
        for (i, &f) in fitness.iter().enumerate() {
            let bucket = levels.entry(f).or_default();
            slot[i] = bucket.len();
            bucket.push(i);
        }
        let plateau_ones = spec.plateau_ones();
        let on_plateau = population
            .members()
            .iter()
            .filter(|m| Some(m.count_ones()) == plateau_ones)
            .count();
        Ok(Pool {
            population,
            fitness,
            levels,
            slot,
            plateau_ones,
            on_plateau,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn into_population(self) -> Population {
        self.population
    }

    pub fn fitness_of(&self, i: usize) -> Fitness {
        self.fitness[i]
    }

    pub fn min_fitness(&self) -> Fitness {
        *self.levels.keys().next().expect("nonempty")
    }

    pub fn best_fitness(&self) -> Fitness {
        *self.levels.keys().next_back().expect("nonempty")
    }

    /// Whether every member sits on the plateau level.
    pub fn all_on_plateau(&self) -> bool {
        self.on_plateau == self.population.size()
    }

    /// Members with minimum fitness.
    pub fn worst_members(&self) -> &[usize] {
        self.levels.values().next().expect("nonempty")
    }

    /// Uniform minimum-fitness member to evict, or `None` when a candidate
    /// of fitness `f` would be rejected.
    pub fn select_victim<R: Rng + ?Sized>(&self, f: Fitness, rng: &mut R) -> Option<usize> {
        let (&min, worst) = self.levels.iter().next().expect("nonempty");
        if f < min {
            return None;
        }
        Some(worst[rng.random_range(0..worst.len())])
    }

    pub fn replace(&mut self, victim: usize, incoming: &BitString, f: Fitness) {
        let old_f = self.fitness[victim];
        if old_f != f {
            let bucket = self.levels.get_mut(&old_f).expect("level present");
            let pos = self.slot[victim];
            bucket.swap_remove(pos);
            if let Some(&moved) = bucket.get(pos) {
                self.slot[moved] = pos;
            }
            if bucket.is_empty() {
                self.levels.remove(&old_f);
            }
            let bucket = self.levels.entry(f).or_default();
            self.slot[victim] = bucket.len();
            bucket.push(victim);
            self.fitness[victim] = f;
        }
        let was = Some(self.population.member(victim).count_ones()) == self.plateau_ones;
        let now = Some(incoming.count_ones()) == self.plateau_ones;
        self.on_plateau = self.on_plateau + now as usize - was as usize;
        self.population.replace_unchecked(victim, incoming);
    }
}

/// Breeds one generation's candidate. `forced` pins the GA branch; the EA
/// always mutates.
pub fn propose<R: Rng + ?Sized>(
    pool: &Pool,
    cfg: &AlgorithmConfig,
    mutator: &Mutator,
    forced: Option<Branch>,
    rng: &mut R,
    out: &mut Candidate,
) -> Result<()> {
    let members = pool.population.members();
    let mu = members.len();
    let branch = match (cfg.algorithm, forced) {
        (Algorithm::Ea, _) => Branch::Mutation,
        (Algorithm::Ga, Some(b)) => b,
        (Algorithm::Ga, None) => {
            if rng.random::<f64>() < cfg.p_c {
                Branch::Crossover
            } else {
                Branch::Mutation
            }
        }
    };
    out.branch = branch;
    out.optimum_at = None;
    match branch {
        Branch::Mutation => {
            let parent = &members[rng.random_range(0..mu)];
            out.genotype.copy_from(parent);
            mutator.apply(&mut out.genotype, rng)?;
            out.fitness = cfg.fitness.value_for_ones(out.genotype.count_ones());
            out.evaluations = 1;
            if cfg.fitness.is_global_optimum(&out.genotype) {
                out.optimum_at = Some(1);
            }
        }
        Branch::Crossover => {
            let x1 = &members[rng.random_range(0..mu)];
            let x2 = &members[rng.random_range(0..mu)];
            let mut ties = 0u64;
            for j in 0..cfg.lambda_c {
                cfg.crossover.apply_into(x1, x2, &mut out.trial, rng)?;
                mutator.apply(&mut out.trial, rng)?;
                let f = cfg.fitness.value_for_ones(out.trial.count_ones());
                if out.optimum_at.is_none() && cfg.fitness.is_global_optimum(&out.trial) {
                    out.optimum_at = Some(j as u64 + 1);
                }
                // Reservoir choice keeps a uniform pick among the best.
                let take = if j == 0 || f > out.fitness {
                    ties = 1;
                    true
                } else if f == out.fitness {
                    ties += 1;
                    rng.random_range(0..ties) == 0
                } else {
                    false
                };
                if take {
                    out.fitness = f;
                    std::mem::swap(&mut out.genotype, &mut out.trial);
                }
            }
            out.evaluations = cfg.lambda_c as u64;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub generation: u64,
    pub evaluations: u64,
    pub diversity: u64,
}

/// Result of one generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub branch: Branch,
    pub accepted: bool,
    pub evaluations: u64,
}

/// Mutable state of one run.
#[derive(Clone, Debug)]
pub struct RunState {
    pool: Pool,
    mutator: Mutator,
    rng: StreamRng,
    candidate: Candidate,
    pub generation: u64,
    pub evaluations: u64,
    pub mutation_generations: u64,
    pub crossover_generations: u64,
    /// Evaluation count at which the optimum was first sampled.
    pub optimum_eval: Option<u64>,
    /// Evaluation count at which the whole population first sat on the
    /// plateau level (or the optimum was sampled, if that came first).
    pub plateau_eval: Option<u64>,
}

impl RunState {
    /// Initializes from `cfg`, counting `mu` evaluations.
    pub fn new(cfg: &AlgorithmConfig) -> Result<Self> {
        RunState::for_replicate(cfg, 0)
    }

    /// Like [`RunState::new`] on the stream of replicate `replicate`.
    pub fn for_replicate(cfg: &AlgorithmConfig, replicate: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream(cfg.seed, replicate, Purpose::Run);
        let members = initial_members(cfg, &mut rng)?;
        RunState::from_population(cfg, Population::new(members)?, rng)
    }

    /// Starts from an explicit population and RNG stream.
    pub fn from_population(
        cfg: &AlgorithmConfig,
        population: Population,
        rng: StreamRng,
    ) -> Result<Self> {
        cfg.validate()?;
        if population.size() != cfg.mu {
            return Err(Error::invalid(format!(
                "population has {} members, mu is {}",
                population.size(),
                cfg.mu
            )));
        }
        let n = cfg.fitness.n();
        let optimum_eval = population
            .members()
            .iter()
            .position(|m| cfg.fitness.is_global_optimum(m))
            .map(|i| i as u64 + 1);
        let pool = Pool::new(population, &cfg.fitness)?;
        let evaluations = cfg.mu as u64;
        let plateau_eval = if pool.all_on_plateau() {
            Some(evaluations)
        } else {
            optimum_eval
        };
        Ok(RunState {
            pool,
            mutator: cfg.mutation.prepare(n)?,
            rng,
            candidate: Candidate::new(n),
            generation: 0,
            evaluations,
            mutation_generations: 0,
            crossover_generations: 0,
            optimum_eval,
            plateau_eval,
        })
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn population(&self) -> &Population {
        &self.pool.population
    }

    pub fn best_fitness(&self) -> Fitness {
        self.pool.best_fitness()
    }

    pub fn rng_mut(&mut self) -> &mut StreamRng {
        &mut self.rng
    }

    pub fn step(&mut self, cfg: &AlgorithmConfig) -> Result<StepOutcome> {
        self.step_forced(cfg, None)
    }

    /// One EA generation; errors if `cfg` is not an EA config.
    pub fn step_ea(&mut self, cfg: &AlgorithmConfig) -> Result<StepOutcome> {
        if cfg.algorithm != Algorithm::Ea {
            return Err(Error::invalid("step_ea needs an EA config"));
        }
        self.step_forced(cfg, None)
    }

    /// One GA generation; errors if `cfg` is not a GA config.
    pub fn step_ga(&mut self, cfg: &AlgorithmConfig) -> Result<StepOutcome> {
        if cfg.algorithm != Algorithm::Ga {
            return Err(Error::invalid("step_ga needs a GA config"));
        }
        self.step_forced(cfg, None)
    }

    /// One generation with the GA branch optionally pinned.
    pub fn step_forced(
        &mut self,
        cfg: &AlgorithmConfig,
        forced: Option<Branch>,
    ) -> Result<StepOutcome> {
        propose(
            &self.pool,
            cfg,
            &self.mutator,
            forced,
            &mut self.rng,
            &mut self.candidate,
        )?;
        let c = &self.candidate;
        if self.optimum_eval.is_none() {
            if let Some(at) = c.optimum_at {
                self.optimum_eval = Some(self.evaluations + at);
            }
        }
        self.evaluations += c.evaluations;
        self.generation += 1;
        match c.branch {
            Branch::Mutation => self.mutation_generations += 1,
            Branch::Crossover => self.crossover_generations += 1,
        }
        let victim = self.pool.select_victim(c.fitness, &mut self.rng);
        if let Some(v) = victim {
            self.pool.replace(v, &c.genotype, c.fitness);
        }
        if self.plateau_eval.is_none() {
            if self.pool.all_on_plateau() {
                self.plateau_eval = Some(self.evaluations);
            } else if self.optimum_eval.is_some() {
                self.plateau_eval = self.optimum_eval;
            }
        }
        Ok(StepOutcome {
            branch: c.branch,
            accepted: victim.is_some(),
            evaluations: c.evaluations,
        })
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config_hash: String,
    pub seed: u64,
    #[serde(default)]
    pub replicate: u64,
    /// Evaluations until the optimum was sampled, or all evaluations spent on timeout.
    pub evaluations: u64,
    /// All evaluations performed, including the rest of the batch in which the optimum appeared.
    #[serde(default)]
    pub spent_evaluations: u64,
    pub generations: u64,
    pub mutation_generations: u64,
    pub crossover_generations: u64,
    pub plateau_eval: Option<u64>,
    pub timeout: bool,
    pub final_diversity: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

#[derive(Serialize)]
struct TrialRow<'a> {
    config_hash: &'a str,
    seed: u64,
    replicate: u64,
    evaluations: u64,
    spent_evaluations: u64,
    generations: u64,
    mutation_generations: u64,
    crossover_generations: u64,
    plateau_eval: Option<u64>,
    timeout: bool,
    final_diversity: u64,
}

impl TrialRecord {
    pub fn optimum_eval(&self) -> Option<u64> {
        (!self.timeout).then_some(self.evaluations)
    }

    /// Writes records as CSV with columns
    /// `config_hash,seed,replicate,evaluations,spent_evaluations,generations,mutation_generations,crossover_generations,plateau_eval,timeout,final_diversity`.
    pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if records.is_empty() {
            w.write_record([
                "config_hash",
                "seed",
                "replicate",
                "evaluations",
                "spent_evaluations",
                "generations",
                "mutation_generations",
                "crossover_generations",
                "plateau_eval",
                "timeout",
                "final_diversity",
            ])?;
        }
        for r in records {
            w.serialize(TrialRow {
                config_hash: &r.config_hash,
                seed: r.seed,
                replicate: r.replicate,
                evaluations: r.evaluations,
                spent_evaluations: r.spent_evaluations,
                generations: r.generations,
                mutation_generations: r.mutation_generations,
                crossover_generations: r.crossover_generations,
                plateau_eval: r.plateau_eval,
                timeout: r.timeout,
                final_diversity: r.final_diversity,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs until the optimum is sampled or the budget is spent.
pub fn run(cfg: &AlgorithmConfig) -> Result<TrialRecord> {
    run_replicate(cfg, 0)
}

/// [`run`] on the stream of replicate `replicate`.
pub fn run_replicate(cfg: &AlgorithmConfig, replicate: u64) -> Result<TrialRecord> {
    let mut state = RunState::for_replicate(cfg, replicate)?;
    let mut trajectory = cfg.trajectory_every.map(|_| Vec::new());
    let record_point = |state: &RunState, trajectory: &mut Option<Vec<TrajectoryPoint>>| {
        if let (Some(t), Some(every)) = (trajectory.as_mut(), cfg.trajectory_every) {
            if every > 0 && state.generation.is_multiple_of(every) {
                t.push(TrajectoryPoint {
                    generation: state.generation,
                    evaluations: state.evaluations,
                    diversity: state.population().diversity(),
                });
            }
        }
    };
    record_point(&state, &mut trajectory);
    while state.optimum_eval.is_none() && state.evaluations < cfg.budget {
        state.step(cfg)?;
        record_point(&state, &mut trajectory);
    }
    Ok(TrialRecord {
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        replicate,
        evaluations: state.optimum_eval.unwrap_or(state.evaluations),
        spent_evaluations: state.evaluations,
        generations: state.generation,
        mutation_generations: state.mutation_generations,
        crossover_generations: state.crossover_generations,
        plateau_eval: state.plateau_eval,
        timeout: state.optimum_eval.is_none(),
        final_diversity: state.population().diversity(),
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn default_lambda_examples() {
        assert_eq!(default_lambda_c(4, 1.0, 100, 0.05).unwrap(), 151);
        assert_eq!(default_lambda_c(1, 1.0, 3, 1e-3).unwrap(), 1000);
        assert!(default_lambda_c(1, 1.0, 3, 0.0).is_err());
        assert!(default_lambda_c(1, 1.0, 2, 0.999).unwrap() >= 1);
    }

    // High-precision check of the first example: 12 e ln 100 = 150.2178...
    #[test]
    fn default_lambda_arithmetic() {
        let v = 12.0 * std::f64::consts::E * 100f64.ln();
        assert!((v - 150.2178).abs() < 1e-4, "{v}");
    }

    #[test]
    fn rejects_full_crossover_probability() {
        let mut cfg =
            AlgorithmConfig::ga(FitnessSpec::Jump { n: 10, k: 2 }, 4, 1.0, 1.0, 3, 1, 100);
        assert!(cfg.validate().is_err());
        cfg.p_c = 0.5;
        assert!(cfg.validate().is_ok());
        cfg.mu = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn onemax_single_member_finds_optimum() {
        let cfg = AlgorithmConfig::ea(FitnessSpec::OneMax { n: 20 }, 1, 1.0, 3, 1_000_000);
        let rec = run(&cfg).unwrap();
        assert!(!rec.timeout);
        assert!(rec.evaluations < 10_000);
        assert_eq!(rec.plateau_eval, Some(rec.evaluations));
        assert_eq!(rec.evaluations, rec.generations + 1);
    }

    #[test]
    fn jump_prime_never_terminates() {
        let mut cfg = AlgorithmConfig::ea(FitnessSpec::JumpPrime { n: 6, k: 1 }, 2, 1.0, 4, 5_000);
        cfg.init = InitPolicy::Explicit {
            members: vec![BitString::all_ones(6); 2],
        };
        let rec = run(&cfg).unwrap();
        assert!(rec.timeout);
        assert_eq!(rec.evaluations, 5_000);
    }

    #[test]
    fn plateau_fixture_reaches_plateau_at_init() {
        let mut cfg = AlgorithmConfig::ea(FitnessSpec::JumpPrime { n: 4, k: 2 }, 3, 1.0, 5, 50);
        cfg.init = InitPolicy::Explicit {
            members: vec![bs("0011"), bs("0101"), bs("1100")],
        };
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.plateau_eval, Some(3));
    }

    #[test]
    fn optimum_in_initial_population_counts_its_position() {
        let mut cfg = AlgorithmConfig::ea(FitnessSpec::Jump { n: 4, k: 2 }, 3, 1.0, 5, 50);
        cfg.init = InitPolicy::Explicit {
            members: vec![bs("0011"), bs("1111"), bs("1100")],
        };
        let rec = run(&cfg).unwrap();
        assert!(!rec.timeout);
        assert_eq!(rec.evaluations, 2);
        assert_eq!(rec.generations, 0);
    }

    #[test]
    fn worse_mutant_is_rejected() {
        let mut cfg = AlgorithmConfig::ea(FitnessSpec::OneMax { n: 8 }, 2, 8.0, 6, 100);
        cfg.init = InitPolicy::Explicit {
            members: vec![BitString::all_ones(8); 2],
        };
        // chi = n complements every bit, so the mutant is all zeros.
        let mut state = RunState::new(&cfg).unwrap();
        let before = state.population().clone();
        let outcome = state.step_ea(&cfg).unwrap();
        assert!(!outcome.accepted);
        assert_eq!(state.population(), &before);
        assert!(state.step_ga(&cfg).is_err());
    }

    #[test]
    fn equal_fitness_mutant_is_accepted() {
        let mut cfg = AlgorithmConfig::ea(FitnessSpec::JumpPrime { n: 4, k: 2 }, 2, 1.0, 7, 100);
        cfg.mutation = MutationSpec::PairedFlip { ell: 1 };
        cfg.init = InitPolicy::Explicit {
            members: vec![bs("0011"), bs("0011")],
        };
        let mut state = RunState::new(&cfg).unwrap();
        let outcome = state.step_ea(&cfg).unwrap();
        assert!(outcome.accepted);
        assert_eq!(state.population().diversity(), 4);
    }

    #[test]
    fn evaluation_identity_and_elitism() {
        let cfg = AlgorithmConfig::ga(
            FitnessSpec::Jump { n: 30, k: 3 },
            12,
            1.0,
            0.3,
            7,
            11,
            60_000,
        );
        let mut state = RunState::new(&cfg).unwrap();
        let mut best = state.best_fitness();
        for _ in 0..3_000 {
            state.step_ga(&cfg).unwrap();
            assert!(state.best_fitness() >= best);
            best = state.best_fitness();
            assert_eq!(state.population().size(), 12);
            assert_eq!(
                state.evaluations,
                state.mutation_generations + 7 * state.crossover_generations + 12
            );
        }
        assert!(state.crossover_generations > 0 && state.mutation_generations > 0);
    }

    #[test]
    fn plateau_population_stays_on_plateau_under_jump_prime() {
        let mut cfg = AlgorithmConfig::ga(
            FitnessSpec::JumpPrime { n: 20, k: 3 },
            8,
            1.0,
            0.4,
            5,
            12,
            30_000,
        );
        cfg.init = InitPolicy::PlateauRandom;
        let mut state = RunState::new(&cfg).unwrap();
        for _ in 0..5_000 {
            state.step(&cfg).unwrap();
            assert!(state.pool().all_on_plateau());
        }
    }

    #[test]
    fn crossover_generation_costs_lambda() {
        let mut cfg =
            AlgorithmConfig::ga(FitnessSpec::Jump { n: 16, k: 2 }, 4, 1.0, 0.5, 9, 13, 1000);
        cfg.init = InitPolicy::PlateauRandom;
        let mut state = RunState::new(&cfg).unwrap();
        let out = state.step_forced(&cfg, Some(Branch::Crossover)).unwrap();
        assert_eq!(out.evaluations, 9);
        assert_eq!(state.evaluations, 4 + 9);
    }

    #[test]
    fn runs_are_deterministic() {
        let mut cfg = AlgorithmConfig::ga(
            FitnessSpec::Jump { n: 24, k: 3 },
            10,
            1.0,
            0.2,
            6,
            99,
            2_000_000,
        );
        cfg.trajectory_every = Some(50);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.trajectory.as_ref().unwrap().len() > 1);
        cfg.seed = 100;
        assert_ne!(run(&cfg).unwrap(), a);
    }

    #[test]
    fn ties_evict_uniformly() {
        // Three members tie at the minimum; count evictions over many draws.
        let spec = FitnessSpec::OneMax { n: 4 };
        let pop = Population::new(vec![bs("0011"), bs("0101"), bs("0110"), bs("1111")]).unwrap();
        let pool = Pool::new(pop, &spec).unwrap();
        let mut rng = stream(1, 0, Purpose::Fixture);
        let mut counts = [0u64; 4];
        let trials = 30_000;
        for _ in 0..trials {
            counts[pool.select_victim(Fitness(2), &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[3], 0);
        let expected = trials as f64 / 3.0;
        let chi2: f64 = counts[..3]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 2 degrees of freedom; 13.82 is the 0.999 quantile.
        assert!(chi2 < 13.82, "{counts:?}");
        assert_eq!(pool.select_victim(Fitness(1), &mut rng), None);
    }

    #[test]
    fn pool_tracks_levels_through_replacements() {
        let spec = FitnessSpec::Jump { n: 6, k: 2 };
        let pop =
            Population::new(vec![bs("000011"), bs("001111"), bs("011111"), bs("000111")]).unwrap();
        let mut pool = Pool::new(pop, &spec).unwrap();
        let mut rng = stream(2, 0, Purpose::Fixture);
        for _ in 0..500 {
            let y = random_uniform(6, &mut rng);
            let f = spec.value_for_ones(y.count_ones());
            if let Some(v) = pool.select_victim(f, &mut rng) {
                pool.replace(v, &y, f);
            }
            let rebuilt = Pool::new(pool.population().clone(), &spec).unwrap();
            assert_eq!(rebuilt.min_fitness(), pool.min_fitness());
            assert_eq!(rebuilt.best_fitness(), pool.best_fitness());
            assert_eq!(rebuilt.on_plateau, pool.on_plateau);
            let mut a = rebuilt.worst_members().to_vec();
            let mut b = pool.worst_members().to_vec();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    // With p_c = 0 the GA and EA consume the same stream apart from the
    // branch draw, so compare distributions instead of paths.
    #[test]
    fn ga_without_crossover_matches_ea_in_distribution() {
        let spec = FitnessSpec::JumpPrime { n: 8, k: 2 };
        let members = vec![bs("00111111"), bs("11001111")];
        let mut ea = AlgorithmConfig::ea(spec, 2, 1.0, 1, 10);
        ea.init = InitPolicy::Explicit {
            members: members.clone(),
        };
        let ga = AlgorithmConfig {
            algorithm: Algorithm::Ga,
            p_c: 0.0,
            lambda_c: 4,
            ..ea.clone()
        };
        let trials = 100_000;
        let mean = |cfg: &AlgorithmConfig, seed: u64| {
            let start = RunState::new(cfg).unwrap();
            let mut total = 0.0;
            let mut sq = 0.0;
            let mut state = start.clone();
            *state.rng_mut() = stream(seed, 0, Purpose::Drift);
            for _ in 0..trials {
                let mut s = start.clone();
                std::mem::swap(s.rng_mut(), state.rng_mut());
                s.step(cfg).unwrap();
                std::mem::swap(s.rng_mut(), state.rng_mut());
                let d = s.population().diversity() as f64;
                total += d;
                sq += d * d;
            }
            let m = total / trials as f64;
            (m, ((sq / trials as f64 - m * m) / trials as f64).sqrt())
        };
        let (m1, s1) = mean(&ea, 5);
        let (m2, s2) = mean(&ga, 6);
        assert!(
            (m1 - m2).abs() < 4.0 * (s1 * s1 + s2 * s2).sqrt(),
            "{m1} vs {m2}"
        );
    }

    #[test]
    fn csv_rows() {
        let cfg = AlgorithmConfig::ea(FitnessSpec::OneMax { n: 10 }, 1, 1.0, 3, 100_000);
        let rec = run(&cfg).unwrap();
        let mut buf = Vec::new();
        TrialRecord::write_csv(std::slice::from_ref(&rec), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "config_hash,seed,replicate,evaluations,spent_evaluations,generations,mutation_generations,crossover_generations,plateau_eval,timeout,final_diversity"
        );
        assert!(lines.next().unwrap().starts_with(&rec.config_hash));
        let json = serde_json::to_string(&rec).unwrap();
        let back: TrialRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }
}
