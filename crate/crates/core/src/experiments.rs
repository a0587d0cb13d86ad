//! Monte Carlo and exact-enumeration harnesses that check the closed forms
//! in [`crate::theory`] against simulation.
//!
//! Sampling work is split into fixed-size chunks; chunk `i` draws from
//! `stream(seed, i, purpose)` and results are gathered by chunk index, so
//! every aggregate is identical for any thread count.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    default_lambda_c, propose, run_replicate, Algorithm, AlgorithmConfig, Branch, Candidate,
    InitPolicy, Pool, RunState, TrialRecord,
};
use crate::bitpop::{hamming_unchecked, BitString, Population};
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessSpec};
use crate::rng::{stream, Purpose};
use crate::theory::{self, binomial_exact, PlateauParams};
use crate::variation::{CrossoverKind, MutationSpec};

/// Samples per RNG chunk.
pub const CHUNK: u64 = 10_000;
/// Largest enumeration accepted by the exact oracles.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build a pool of {t} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn chunked<T: Send>(total: u64, f: impl Fn(u64, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| f(i, CHUNK.min(total - i * CHUNK)))
        .collect()
}

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count as f64 / count as f64,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / count as f64,
        }
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.sample_variance() / self.count.max(1) as f64).sqrt()
    }
}

fn merge_all(parts: impl IntoIterator<Item = Moments>) -> Moments {
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conditioning {
    /// Unconditioned generations.
    All,
    /// The crossover branch is forced.
    CrossoverOnly,
    /// The mutation branch is forced.
    MutationOnly,
    /// Unconditioned, but an offspring off the plateau is always rejected.
    AcceptedOnPlateau,
}

impl Conditioning {
    fn forced(self) -> Option<Branch> {
        match self {
            Conditioning::CrossoverOnly => Some(Branch::Crossover),
            Conditioning::MutationOnly => Some(Branch::Mutation),
            _ => None,
        }
    }
}

/// Measured `E(S(P_{t+1}) | P_t)` from repeated single generations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub initial_s: u64,
    pub samples: u64,
    pub mean_next_s: f64,
    /// Sample standard deviation of `S(P_{t+1})` over `sqrt(samples)`.
    pub stderr: f64,
    pub conditioning: Conditioning,
    pub acceptance_rate: f64,
    /// Exact expectation, where a closed form applies.
    pub predicted: Option<f64>,
    /// Lower bound on the expectation, where one applies.
    pub lower_bound: Option<f64>,
}

impl DriftReport {
    pub fn mean_change(&self) -> f64 {
        self.mean_next_s - self.initial_s as f64
    }

    /// Whether the mean lies within `sigmas` standard errors of `predicted`.
    pub fn matches_prediction(&self, sigmas: f64) -> Option<bool> {
        self.predicted
            .map(|p| (self.mean_next_s - p).abs() <= sigmas * self.stderr + 1e-9 * p.abs().max(1.0))
    }

    /// Whether the mean is at least `lower_bound - sigmas * stderr`.
    pub fn respects_lower_bound(&self, sigmas: f64) -> Option<bool> {
        self.lower_bound
            .map(|b| self.mean_next_s >= b - sigmas * self.stderr - 1e-9 * b.abs().max(1.0))
    }
}

fn plateau_check(pop: &Population, spec: &FitnessSpec) -> Result<usize> {
    if !spec.is_jump_family() {
        return Err(Error::invalid(format!("{spec:?} has no plateau")));
    }
    if pop.genotype_len() != spec.n() {
        return Err(Error::LengthMismatch {
            left: spec.n(),
            right: pop.genotype_len(),
        });
    }
    let plateau = spec.plateau_ones().expect("jump family");
    for (index, m) in pop.members().iter().enumerate() {
        if m.count_ones() != plateau {
            return Err(Error::NotOnPlateau {
                index,
                ones: m.count_ones(),
                plateau,
            });
        }
    }
    Ok(plateau)
}

/// Probability that one application of `mutation` moves a plateau point by
/// exactly `ell` ones and `ell` zeros, for `ell = 0..=q`.
pub fn plateau_move_probabilities(n: usize, k: usize, mutation: &MutationSpec) -> Result<Vec<f64>> {
    let q = k.min(n - k);
    Ok(match *mutation {
        MutationSpec::StandardBit { chi } => theory::p_ell_table(&PlateauParams {
            n,
            k,
            mu: 2,
            chi,
            p_c: 0.0,
        }),
        MutationSpec::PairedFlip { ell } => {
            if ell > q {
                return Err(Error::invalid(format!(
                    "paired flip of {ell} exceeds q={q}"
                )));
            }
            (0..=q).map(|l| if l == ell { 1.0 } else { 0.0 }).collect()
        }
        MutationSpec::FixedRadius { radius } => (0..=q)
            .map(|l| {
                if 2 * l == radius {
                    theory::binomial(k as u64, l as u64)
                        * theory::binomial((n - k) as u64, l as u64)
                        / theory::binomial(n as u64, radius as u64)
                } else {
                    0.0
                }
            })
            .collect(),
    })
}

fn mutation_chi(n: usize, mutation: &MutationSpec) -> f64 {
    match *mutation {
        MutationSpec::StandardBit { chi } => chi,
        MutationSpec::PairedFlip { ell } => 2.0 * ell as f64,
        MutationSpec::FixedRadius { radius } => radius as f64,
    }
    .min(n as f64)
}

/// Closed-form `(predicted, lower_bound)` for one generation from a plateau population.
pub fn predict_drift(
    pop: &Population,
    cfg: &AlgorithmConfig,
    conditioning: Conditioning,
) -> Result<(Option<f64>, Option<f64>)> {
    plateau_check(pop, &cfg.fitness)?;
    let s = pop.diversity() as f64;
    let mu = pop.size();
    if mu < 2 {
        return Ok((Some(0.0), Some(0.0)));
    }
    let n = cfg.fitness.n();
    let k = cfg.fitness.gap();
    let mu_f = mu as f64;
    // Off-plateau offspring lose unless the fitness rewards them.
    let off_plateau_rejected = matches!(cfg.fitness, FitnessSpec::JumpPrime { .. })
        || conditioning == Conditioning::AcceptedOnPlateau;
    let mutation_exact = if off_plateau_rejected {
        let p = plateau_move_probabilities(n, k, &cfg.mutation)?;
        let params = PlateauParams {
            n,
            k,
            mu,
            chi: 1.0,
            p_c: 0.0,
        };
        Some(theory::ea_drift(&params, &p, s))
    } else {
        None
    };
    let chi = mutation_chi(n, &cfg.mutation);
    let competing_ok = cfg.lambda_c as f64 >= 6.0 * (k as f64).sqrt() * chi.exp() * mu_f.ln();
    let crossover_exact = (cfg.crossover == CrossoverKind::Balanced
        && cfg.mutation == MutationSpec::PairedFlip { ell: 0 })
    .then(|| (1.0 - 2.0 / (mu_f * mu_f)) * s);
    let crossover_bound = (cfg.crossover == CrossoverKind::Uniform
        && matches!(cfg.mutation, MutationSpec::StandardBit { .. })
        && competing_ok)
        .then(|| (1.0 - 3.0 / (mu_f * mu_f)) * s - 9.0 * k as f64 * mu_f * chi / n as f64);
    let mixed = |m: Option<f64>, c: Option<f64>| match (m, c) {
        (Some(m), Some(c)) => Some((1.0 - cfg.p_c) * m + cfg.p_c * c),
        _ => None,
    };
    Ok(match (cfg.algorithm, conditioning) {
        (Algorithm::Ea, _) | (_, Conditioning::MutationOnly) => (mutation_exact, mutation_exact),
        (Algorithm::Ga, Conditioning::CrossoverOnly) => {
            (crossover_exact, crossover_exact.or(crossover_bound))
        }
        (Algorithm::Ga, _) if cfg.p_c == 0.0 => (mutation_exact, mutation_exact),
        (Algorithm::Ga, _) => (
            mixed(mutation_exact, crossover_exact),
            mixed(mutation_exact, crossover_exact.or(crossover_bound)),
        ),
    })
}

/// Runs `samples` independent generations from `pop` (left untouched) and
/// averages the next diversity.
pub fn one_step_drift(
    pop: &Population,
    cfg: &AlgorithmConfig,
    samples: u64,
    conditioning: Conditioning,
    seed: u64,
) -> Result<DriftReport> {
    cfg.validate()?;
    let plateau = plateau_check(pop, &cfg.fitness)?;
    if samples < 1000 {
        return Err(Error::invalid(format!(
            "need at least 1000 samples; got {samples}"
        )));
    }
    if pop.size() != cfg.mu {
        return Err(Error::invalid(format!(
            "population has {} members, mu is {}",
            pop.size(),
            cfg.mu
        )));
    }
    if cfg.algorithm == Algorithm::Ea && conditioning == Conditioning::CrossoverOnly {
        return Err(Error::invalid("the EA has no crossover branch"));
    }
    let (predicted, lower_bound) = predict_drift(pop, cfg, conditioning)?;
    let n = cfg.fitness.n();
    let pool = Pool::new(pop.clone(), &cfg.fitness)?;
    let mutator = cfg.mutation.prepare(n)?;
    let s = pop.diversity();
    let plateau_fitness = cfg.fitness.value_for_ones(plateau);
    let parts = chunked(samples, |chunk, count| {
        let mut rng = stream(seed, chunk, Purpose::Drift);
        let mut cand = Candidate::new(n);
        let mut moments = Moments::default();
        let mut accepted = 0u64;
        for _ in 0..count {
            propose(
                &pool,
                cfg,
                &mutator,
                conditioning.forced(),
                &mut rng,
                &mut cand,
            )?;
            let victim = if conditioning == Conditioning::AcceptedOnPlateau {
                if cand.genotype.count_ones() == plateau {
                    pool.select_victim(plateau_fitness, &mut rng)
                } else {
                    None
                }
            } else {
                pool.select_victim(cand.fitness, &mut rng)
            };
            let next = match victim {
                Some(v) => {
                    accepted += 1;
                    pool.population()
                        .diversity_after_replace_unchecked(v, &cand.genotype)
                }
                None => s,
            };
            moments.push(next as f64 - s as f64);
        }
        Ok((moments, accepted))
    })?;
    let accepted: u64 = parts.iter().map(|p| p.1).sum();
    let moments = merge_all(parts.into_iter().map(|p| p.0));
    Ok(DriftReport {
        initial_s: s,
        samples,
        mean_next_s: s as f64 + moments.mean,
        stderr: moments.stderr(),
        conditioning,
        acceptance_rate: accepted as f64 / samples as f64,
        predicted,
        lower_bound,
    })
}

/// Arithmetic used by the exact enumerations: exact rationals, or `f64`
/// when the operator's probabilities are irrational.
pub trait Weight:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn ratio(num: u64, den: u64) -> Self;
    fn from_f64(x: f64) -> Self;
    fn powu(&self, e: usize) -> Self;
    fn as_f64(&self) -> f64;
}

impl Weight for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn powu(&self, e: usize) -> Self {
        self.powi(e as i32)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite")
    }
    fn powu(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().expect("finite")
    }
}

/// Calls `f` with every `r`-subset of `0..m` in lexicographic order.
fn for_each_combination(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > m {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + m - r) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn to_mask(x: &BitString) -> u64 {
    x.words().first().copied().unwrap_or(0)
}

fn from_mask(mask: u64, n: usize) -> BitString {
    BitString::from_words(vec![mask], n)
}

fn bit_positions(mask: u64, n: usize, value: bool) -> Vec<usize> {
    (0..n)
        .filter(|&i| ((mask >> i) & 1 == 1) == value)
        .collect()
}

type Dist<W> = BTreeMap<u64, W>;

fn add_to<W: Weight>(dist: &mut Dist<W>, key: u64, w: W) {
    match dist.get_mut(&key) {
        Some(v) => *v = v.clone() + w,
        None => {
            dist.insert(key, w);
        }
    }
}

fn crossover_dist<W: Weight>(kind: CrossoverKind, x1: u64, x2: u64, n: usize) -> Result<Dist<W>> {
    let diff = x1 ^ x2;
    let positions = bit_positions(diff, n, true);
    let d = positions.len();
    if d > 24 {
        return Err(Error::EnumerationTooLarge {
            outcomes: 1u128 << d,
            limit: 1 << 24,
        });
    }
    let common = x1 & x2;
    let mut dist = Dist::new();
    match kind {
        CrossoverKind::Uniform => {
            for pattern in 0u64..1 << d {
                let mut y = common;
                for (b, &p) in positions.iter().enumerate() {
                    y |= ((pattern >> b) & 1) << p;
                }
                add_to(&mut dist, y, W::ratio(1, 1 << d));
            }
        }
        CrossoverKind::Balanced => {
            let sizes: Vec<(usize, u64)> = if d.is_multiple_of(2) {
                vec![(d / 2, 1)]
            } else {
                vec![(d / 2, 2), (d / 2 + 1, 2)]
            };
            for (ones, share) in sizes {
                let count = binomial_exact(d as u64, ones as u64)
                    .to_u64()
                    .expect("d <= 24");
                for_each_combination(d, ones, |chosen| {
                    let y = chosen.iter().fold(common, |y, &b| y | (1 << positions[b]));
                    add_to(&mut dist, y, W::ratio(1, share * count));
                });
            }
        }
        CrossoverKind::Boring => {
            add_to(&mut dist, x1, W::ratio(1, 2));
            add_to(&mut dist, x2, W::ratio(1, 2));
        }
    }
    Ok(dist)
}

/// Exact offspring distribution of a crossover operator.
pub fn crossover_outcomes(
    kind: CrossoverKind,
    x1: &BitString,
    x2: &BitString,
) -> Result<Vec<(BitString, BigRational)>> {
    let n = check_small_pair(x1, x2)?;
    Ok(
        crossover_dist::<BigRational>(kind, to_mask(x1), to_mask(x2), n)?
            .into_iter()
            .map(|(m, w)| (from_mask(m, n), w))
            .collect(),
    )
}

fn check_small_pair(x1: &BitString, x2: &BitString) -> Result<usize> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            left: x1.len(),
            right: x2.len(),
        });
    }
    if x1.len() > 64 {
        return Err(Error::invalid("exact enumeration needs n <= 64"));
    }
    Ok(x1.len())
}

/// Number of outcomes one input expands to under `mutation`.
fn mutation_branching(mutation: &MutationSpec, n: usize, ones: usize) -> u128 {
    match *mutation {
        MutationSpec::StandardBit { .. } => 1u128 << n,
        MutationSpec::PairedFlip { ell } => (binomial_exact(ones as u64, ell as u64)
            * binomial_exact((n - ones) as u64, ell as u64))
        .to_u128()
        .unwrap_or(u128::MAX),
        MutationSpec::FixedRadius { radius } => binomial_exact(n as u64, radius as u64)
            .to_u128()
            .unwrap_or(u128::MAX),
    }
}

fn mutate_dist<W: Weight>(input: &Dist<W>, mutation: &MutationSpec, n: usize) -> Result<Dist<W>> {
    match *mutation {
        MutationSpec::StandardBit { chi } => {
            if n > 20 {
                return Err(Error::EnumerationTooLarge {
                    outcomes: 1u128 << n,
                    limit: 1 << 20,
                });
            }
            let rate = W::from_f64(chi / n as f64);
            let stay = W::one() - rate.clone();
            let mut dense = vec![W::zero(); 1 << n];
            for (&m, w) in input {
                dense[m as usize] = w.clone();
            }
            for bit in 0..n {
                let step = 1usize << bit;
                for m in 0..dense.len() {
                    if m & step == 0 {
                        let (a, b) = (dense[m].clone(), dense[m | step].clone());
                        dense[m] = stay.clone() * a.clone() + rate.clone() * b.clone();
                        dense[m | step] = stay.clone() * b + rate.clone() * a;
                    }
                }
            }
            Ok(dense
                .into_iter()
                .enumerate()
                .map(|(m, w)| (m as u64, w))
                .collect())
        }
        MutationSpec::PairedFlip { ell } => {
            let mut out = Dist::new();
            for (&m, w) in input {
                let ones = bit_positions(m, n, true);
                let zeros = bit_positions(m, n, false);
                if ell > ones.len().min(zeros.len()) {
                    return Err(Error::invalid(format!(
                        "paired flip of {ell} needs {ell} ones and {ell} zeros"
                    )));
                }
                let share =
                    w.clone() / W::ratio(mutation_branching(mutation, n, ones.len()) as u64, 1);
                for_each_combination(ones.len(), ell, |a| {
                    let flipped_ones = a.iter().fold(m, |y, &i| y ^ (1 << ones[i]));
                    for_each_combination(zeros.len(), ell, |b| {
                        let y = b.iter().fold(flipped_ones, |y, &i| y ^ (1 << zeros[i]));
                        add_to(&mut out, y, share.clone());
                    });
                });
            }
            Ok(out)
        }
        MutationSpec::FixedRadius { radius } => {
            let mut out = Dist::new();
            let count = mutation_branching(mutation, n, 0) as u64;
            for (&m, w) in input {
                let share = w.clone() / W::ratio(count, 1);
                for_each_combination(n, radius, |flip| {
                    let y = flip.iter().fold(m, |y, &i| y ^ (1 << i));
                    add_to(&mut out, y, share.clone());
                });
            }
            Ok(out)
        }
    }
}

/// The variation applied in the enumerated generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum ExactOperator {
    /// One uniformly chosen parent, mutated.
    Mutation { mutation: MutationSpec },
    /// Two parents chosen uniformly with replacement; `lambda_c` offspring
    /// of crossover then mutation, best kept (uniform among ties).
    Crossover {
        crossover: CrossoverKind,
        mutation: MutationSpec,
        lambda_c: usize,
    },
}

impl ExactOperator {
    fn mutation(&self) -> &MutationSpec {
        match self {
            ExactOperator::Mutation { mutation } | ExactOperator::Crossover { mutation, .. } => {
                mutation
            }
        }
    }
}

/// Exact `E(S(P_{t+1}))` for one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDrift {
    pub initial_s: u64,
    pub expected_next_s: f64,
    /// Present when every probability involved is rational.
    #[serde(skip)]
    pub exact: Option<BigRational>,
    /// Weighted outcomes enumerated (parents, offspring, victims).
    pub outcomes: u128,
}

struct Selection<'a> {
    pop: &'a Population,
    spec: &'a FitnessSpec,
    min: Fitness,
    worst: Vec<usize>,
}

impl Selection<'_> {
    fn new<'a>(pop: &'a Population, spec: &'a FitnessSpec) -> Selection<'a> {
        let fitness: Vec<Fitness> = pop
            .members()
            .iter()
            .map(|m| spec.value_for_ones(m.count_ones()))
            .collect();
        let min = *fitness.iter().min().expect("nonempty");
        let worst = (0..fitness.len()).filter(|&i| fitness[i] == min).collect();
        Selection {
            pop,
            spec,
            min,
            worst,
        }
    }

    fn fitness(&self, y: u64) -> Fitness {
        self.spec.value_for_ones(y.count_ones() as usize)
    }

    /// Expected next diversity given candidate `y`.
    fn next_s<W: Weight>(&self, y: u64) -> W {
        if self.fitness(y) < self.min {
            return W::ratio(self.pop.diversity(), 1);
        }
        let y = from_mask(y, self.pop.genotype_len());
        let total: u64 = self
            .worst
            .iter()
            .map(|&v| self.pop.diversity_after_replace_unchecked(v, &y))
            .sum();
        W::ratio(total, self.worst.len() as u64)
    }
}

/// Expected next diversity when the best of `lambda` draws from `dist` competes.
fn best_of<W: Weight>(dist: &Dist<W>, lambda: usize, sel: &Selection) -> W {
    let mut levels: BTreeMap<Fitness, (W, W)> = BTreeMap::new();
    for (&y, w) in dist {
        let e = levels
            .entry(sel.fitness(y))
            .or_insert((W::zero(), W::zero()));
        e.0 = e.0.clone() + w.clone();
        e.1 = e.1.clone() + w.clone() * sel.next_s::<W>(y);
    }
    let mut below = W::zero();
    let mut total = W::zero();
    for (mass, weighted) in levels.into_values() {
        let upto = below.clone() + mass.clone();
        let p_max = upto.powu(lambda) - below.powu(lambda);
        total = total + p_max * weighted / mass;
        below = upto;
    }
    total
}

fn drift_with<W: Weight>(
    pop: &Population,
    spec: &FitnessSpec,
    op: &ExactOperator,
) -> Result<(W, u128)> {
    let n = pop.genotype_len();
    let mu = pop.size() as u64;
    let sel = Selection::new(pop, spec);
    let masks: Vec<u64> = pop.members().iter().map(to_mask).collect();
    let mut cache: BTreeMap<(u64, u64), W> = BTreeMap::new();
    let mut total = W::zero();
    let mut outcomes = 0u128;
    let victims = sel.worst.len() as u128;
    match *op {
        ExactOperator::Mutation { mutation } => {
            for &x in &masks {
                let e = match cache.get(&(x, x)) {
                    Some(e) => e.clone(),
                    None => {
                        let dist = mutate_dist(&Dist::from([(x, W::one())]), &mutation, n)?;
                        let e = best_of(&dist, 1, &sel);
                        cache.insert((x, x), e.clone());
                        e
                    }
                };
                outcomes += mutation_branching(&mutation, n, x.count_ones() as usize) * victims;
                total = total + e;
            }
            Ok((total / W::ratio(mu, 1), outcomes))
        }
        ExactOperator::Crossover {
            crossover,
            mutation,
            lambda_c,
        } => {
            for &x1 in &masks {
                for &x2 in &masks {
                    let e = match cache.get(&(x1, x2)) {
                        Some(e) => e.clone(),
                        None => {
                            let dist = mutate_dist(
                                &crossover_dist::<W>(crossover, x1, x2, n)?,
                                &mutation,
                                n,
                            )?;
                            let e = best_of(&dist, lambda_c, &sel);
                            cache.insert((x1, x2), e.clone());
                            e
                        }
                    };
                    total = total + e;
                }
            }
            Ok((total / W::ratio(mu * mu, 1), outcomes))
        }
    }
}

fn estimate_outcomes(pop: &Population, op: &ExactOperator) -> u128 {
    let n = pop.genotype_len();
    let mu = pop.size() as u128;
    let members = pop.members();
    match op {
        ExactOperator::Mutation { mutation } => members
            .iter()
            .map(|x| mutation_branching(mutation, n, x.count_ones()).saturating_mul(mu))
            .fold(0u128, u128::saturating_add),
        ExactOperator::Crossover {
            crossover,
            mutation,
            ..
        } => {
            let mut total = 0u128;
            for x1 in members {
                for x2 in members {
                    let d = hamming_unchecked(x1, x2);
                    let support: u128 = match crossover {
                        CrossoverKind::Boring => 2,
                        _ if d > 100 => u128::MAX,
                        _ => 1u128 << d,
                    };
                    let branch =
                        mutation_branching(mutation, n, x1.count_ones().max(x2.count_ones()));
                    total = total.saturating_add(support.saturating_mul(branch).saturating_mul(mu));
                }
            }
            total
        }
    }
}

/// Exact expected next diversity over parent choices, operator outcomes and
/// victim choices, with selection per `spec`.
pub fn enumerate_drift_exact(
    pop: &Population,
    spec: &FitnessSpec,
    op: &ExactOperator,
) -> Result<ExactDrift> {
    spec.validate()?;
    if pop.genotype_len() != spec.n() {
        return Err(Error::LengthMismatch {
            left: spec.n(),
            right: pop.genotype_len(),
        });
    }
    if pop.genotype_len() > 64 {
        return Err(Error::invalid("exact enumeration needs n <= 64"));
    }
    op.mutation().validate(pop.genotype_len())?;
    if let ExactOperator::Crossover { lambda_c: 0, .. } = op {
        return Err(Error::invalid("lambda_c must be at least 1"));
    }
    let estimate = estimate_outcomes(pop, op);
    if estimate > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            outcomes: estimate,
            limit: ENUMERATION_LIMIT,
        });
    }
    let initial_s = pop.diversity();
    if matches!(op.mutation(), MutationSpec::StandardBit { .. }) {
        let (e, _) = drift_with::<f64>(pop, spec, op)?;
        Ok(ExactDrift {
            initial_s,
            expected_next_s: e,
            exact: None,
            outcomes: estimate,
        })
    } else {
        let (e, _) = drift_with::<BigRational>(pop, spec, op)?;
        Ok(ExactDrift {
            initial_s,
            expected_next_s: e.as_f64(),
            exact: Some(e),
            outcomes: estimate,
        })
    }
}

/// Exact expected next diversity of one unconditioned generation of `cfg`.
pub fn enumerate_generation_exact(pop: &Population, cfg: &AlgorithmConfig) -> Result<ExactDrift> {
    cfg.validate()?;
    let mutation = ExactOperator::Mutation {
        mutation: cfg.mutation,
    };
    let m = enumerate_drift_exact(pop, &cfg.fitness, &mutation)?;
    if cfg.algorithm == Algorithm::Ea || cfg.p_c == 0.0 {
        return Ok(m);
    }
    let c = enumerate_drift_exact(
        pop,
        &cfg.fitness,
        &ExactOperator::Crossover {
            crossover: cfg.crossover,
            mutation: cfg.mutation,
            lambda_c: cfg.lambda_c,
        },
    )?;
    let exact = match (&m.exact, &c.exact) {
        (Some(a), Some(b)) => {
            let pc = BigRational::from_f64(cfg.p_c);
            Some((BigRational::one() - pc.clone()) * a.clone() + pc * b.clone())
        }
        _ => None,
    };
    Ok(ExactDrift {
        initial_s: m.initial_s,
        expected_next_s: exact
            .as_ref()
            .map(|e| e.as_f64())
            .unwrap_or((1.0 - cfg.p_c) * m.expected_next_s + cfg.p_c * c.expected_next_s),
        exact,
        outcomes: m.outcomes + c.outcomes,
    })
}

/// Exact mean of `H(z, y)` over every `z` obtained from `x` by flipping
/// `ell` ones and `ell` zeros.
pub fn enumerate_paired_flip_distance(
    x: &BitString,
    y: &BitString,
    ell: usize,
) -> Result<BigRational> {
    let n = check_small_pair(x, y)?;
    let start = Dist::from([(to_mask(x), BigRational::one())]);
    let dist = mutate_dist(&start, &MutationSpec::PairedFlip { ell }, n)?;
    let ym = to_mask(y);
    Ok(dist
        .into_iter()
        .map(|(z, w)| w * BigRational::from_integer(BigInt::from((z ^ ym).count_ones())))
        .fold(BigRational::zero(), |a, b| a + b))
}

/// Both sides of the diversity-neutrality identity,
/// `E(H(c(x1,x2),z) + H(c(x2,x1),z))` and `H(x1,z) + H(x2,z)`, exactly.
pub fn neutrality_sides(
    kind: CrossoverKind,
    x1: &BitString,
    x2: &BitString,
    z: &BitString,
) -> Result<(BigRational, BigRational)> {
    check_small_pair(x1, z)?;
    let zm = to_mask(z);
    let expected = |a: &BitString, b: &BitString| -> Result<BigRational> {
        Ok(crossover_outcomes(kind, a, b)?
            .into_iter()
            .map(|(y, w)| {
                w * BigRational::from_integer(BigInt::from((to_mask(&y) ^ zm).count_ones()))
            })
            .fold(BigRational::zero(), |s, t| s + t))
    };
    let lhs = expected(x1, x2)? + expected(x2, x1)?;
    let rhs = BigRational::from_integer(BigInt::from(
        hamming_unchecked(x1, z) + hamming_unchecked(x2, z),
    ));
    Ok((lhs, rhs))
}

/// The two-cluster plateau population: `mu/4` copies of
/// `0^r 1^(n-k) 0^(k-r)` and `3mu/4` copies of `1^r 0^r 1^(n-k-r) 0^(k-r)`,
/// with `r = sqrt(k)`.
pub fn counterexample_population(n: usize, k: usize, mu: usize) -> Result<Population> {
    let r = (k as f64).sqrt().round() as usize;
    let mut problems = Vec::new();
    if k == 0 || r * r != k {
        problems.push(format!("k={k} is not a positive perfect square"));
    }
    if mu == 0 || !mu.is_multiple_of(4) {
        problems.push(format!("mu={mu} is not a positive multiple of 4"));
    }
    if 2 * k + r > n {
        problems.push(format!(
            "layout needs sqrt(k) <= k <= n-k-sqrt(k) (n={n}, k={k})"
        ));
    }
    if !problems.is_empty() {
        return Err(Error::invalid(problems.join("; ")));
    }
    let tail: Vec<usize> = (n - (k - r)..n).collect();
    let a_zeros: Vec<usize> = (0..r).chain(tail.iter().copied()).collect();
    let b_zeros: Vec<usize> = (r..2 * r).chain(tail.iter().copied()).collect();
    let a = BitString::with_zeros_at(n, &a_zeros)?;
    let b = BitString::with_zeros_at(n, &b_zeros)?;
    let mut members = vec![a; mu / 4];
    members.extend(std::iter::repeat_n(b, 3 * mu / 4));
    Population::new(members)
}

/// `3 sqrt(k) mu^2 / 4`.
pub fn counterexample_diversity(k: usize, mu: usize) -> u64 {
    let r = (k as f64).sqrt().round() as u64;
    3 * r * (mu * mu) as u64 / 4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub k: usize,
    pub mu: usize,
    pub diversity: u64,
    pub expected_diversity: u64,
    /// `lambda_c = 1`.
    pub single: DriftReport,
    pub competing_lambda_c: usize,
    pub competing: DriftReport,
}

/// Crossover-conditioned drift on the counterexample population with one
/// crossover offspring and with the default number of competing offspring.
/// With `p_c = 0` both reports are unconditioned (mutation only).
#[allow(clippy::too_many_arguments)]
pub fn counterexample_drift(
    n: usize,
    k: usize,
    mu: usize,
    chi: f64,
    p_c: f64,
    lambda_c: Option<usize>,
    samples: u64,
    seed: u64,
) -> Result<CounterexampleReport> {
    let pop = counterexample_population(n, k, mu)?;
    let competing_lambda_c = match lambda_c {
        Some(l) => l,
        None if p_c > 0.0 => default_lambda_c(k, chi, mu, p_c)?,
        None => default_lambda_c(k, chi, mu, 1.0)?,
    };
    let fitness = FitnessSpec::JumpPrime { n, k };
    let conditioning = if p_c > 0.0 {
        Conditioning::CrossoverOnly
    } else {
        Conditioning::All
    };
    let cfg_for = |l: usize| {
        let mut cfg = AlgorithmConfig::ga(fitness, mu, chi, p_c, l, seed, u64::MAX);
        cfg.init = InitPolicy::Explicit {
            members: pop.members().to_vec(),
        };
        cfg
    };
    let single = one_step_drift(&pop, &cfg_for(1), samples, conditioning, seed)?;
    let competing = one_step_drift(
        &pop,
        &cfg_for(competing_lambda_c),
        samples,
        conditioning,
        seed ^ 0x5bd1_e995,
    )?;
    Ok(CounterexampleReport {
        n,
        k,
        mu,
        diversity: pop.diversity(),
        expected_diversity: counterexample_diversity(k, mu),
        single,
        competing_lambda_c,
        competing,
    })
}

/// Ordered pairs `(x, y)` of members with `H(x, y) > (1 - 2 eps) 2k`.
pub fn count_diverse_pairs(pop: &Population, k: usize, eps: f64) -> u64 {
    let cut = (1.0 - 2.0 * eps) * 2.0 * k as f64;
    let m = pop.members();
    let mut count = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if hamming_unchecked(&m[i], &m[j]) as f64 > cut {
                count += 2;
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub replicate: u64,
    pub burn_in: u64,
    pub horizon: u64,
    pub eps: f64,
    /// Mean of `S` after each of the `horizon` generations following burn-in.
    pub time_avg_s: f64,
    pub fraction_above_threshold: f64,
    /// `ceil((1 - 4 eps) 2 k mu^2)`.
    pub threshold: u64,
    pub max_s: u64,
    pub final_s: u64,
}

/// `ceil((1 - 4 eps) 2 k mu^2)`, at least 0.
pub fn equilibrium_threshold(k: usize, mu: usize, eps: f64) -> u64 {
    theory::ceil_tolerant(((1.0 - 4.0 * eps) * 2.0 * k as f64 * (mu * mu) as f64).max(0.0)) as u64
}

/// Runs a plateau-initialized Jump' population for `burn_in` generations and
/// then records the diversity for `horizon` generations.
pub fn equilibrium_run(
    cfg: &AlgorithmConfig,
    burn_in: u64,
    horizon: u64,
    eps: f64,
    replicate: u64,
) -> Result<EquilibriumReport> {
    cfg.validate()?;
    if !matches!(cfg.fitness, FitnessSpec::JumpPrime { .. }) {
        return Err(Error::invalid("equilibrium runs need the Jump' fitness"));
    }
    if !matches!(
        cfg.init,
        InitPolicy::PlateauRandom
            | InitPolicy::PlateauClone
            | InitPolicy::Explicit { .. }
            | InitPolicy::Fixture { .. }
    ) {
        return Err(Error::invalid("equilibrium runs start on the plateau"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let mut state = RunState::for_replicate(cfg, replicate)?;
    if !state.pool().all_on_plateau() {
        return Err(Error::invalid("initial population is not on the plateau"));
    }
    for _ in 0..burn_in {
        state.step(cfg)?;
    }
    let threshold = equilibrium_threshold(cfg.fitness.gap(), cfg.mu, eps);
    let mut sum = 0u128;
    let mut above = 0u64;
    let mut max_s = 0;
    for _ in 0..horizon {
        state.step(cfg)?;
        let s = state.population().diversity();
        sum += s as u128;
        above += (s >= threshold) as u64;
        max_s = max_s.max(s);
    }
    Ok(EquilibriumReport {
        replicate,
        burn_in,
        horizon,
        eps,
        time_avg_s: sum as f64 / horizon as f64,
        fraction_above_threshold: above as f64 / horizon as f64,
        threshold,
        max_s,
        final_s: state.population().diversity(),
    })
}

/// [`equilibrium_run`] for replicates `0..trials`, in parallel.
pub fn equilibrium_trials(
    cfg: &AlgorithmConfig,
    burn_in: u64,
    horizon: u64,
    eps: f64,
    trials: u64,
) -> Result<Vec<EquilibriumReport>> {
    (0..trials)
        .into_par_iter()
        .map(|r| equilibrium_run(cfg, burn_in, horizon, eps, r))
        .collect()
}

/// Order statistics of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q10: f64,
    pub q25: f64,
    pub q75: f64,
    pub q90: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Summary {
            count: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: q(0.5),
            q10: q(0.1),
            q25: q(0.25),
            q75: q(0.75),
            q90: q(0.9),
            min: v[0],
            max: v[v.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config_hash: String,
    pub repetitions: u64,
    pub successes: u64,
    /// Evaluations to the optimum (timeouts count their whole budget).
    pub evaluations: Option<Summary>,
    /// Evaluations until the whole population reached the plateau level.
    pub plateau: Option<Summary>,
    /// Evaluations after the plateau was reached, over successful runs.
    pub post_plateau: Option<Summary>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl CampaignReport {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        TrialRecord::write_csv(&self.records, out)
    }
}

/// Runs replicates `0..repetitions` of `cfg` in parallel.
pub fn runtime_campaign(cfg: &AlgorithmConfig, repetitions: u64) -> Result<CampaignReport> {
    cfg.validate()?;
    if repetitions == 0 {
        return Err(Error::invalid("repetitions must be at least 1"));
    }
    let records: Vec<TrialRecord> = (0..repetitions)
        .into_par_iter()
        .map(|r| run_replicate(cfg, r))
        .collect::<Result<_>>()?;
    let evaluations: Vec<f64> = records.iter().map(|r| r.evaluations as f64).collect();
    let plateau: Vec<f64> = records
        .iter()
        .filter_map(|r| r.plateau_eval.map(|p| p as f64))
        .collect();
    let post: Vec<f64> = records
        .iter()
        .filter(|r| !r.timeout)
        .filter_map(|r| {
            r.plateau_eval
                .map(|p| (r.evaluations - p.min(r.evaluations)) as f64)
        })
        .collect();
    Ok(CampaignReport {
        config_hash: cfg.config_hash(),
        repetitions,
        successes: records.iter().filter(|r| !r.timeout).count() as u64,
        evaluations: Summary::of(&evaluations),
        plateau: Summary::of(&plateau),
        post_plateau: Summary::of(&post),
        records,
    })
}

/// Whether the record satisfies `spent = mutation gens + lambda_c * crossover gens + mu`.
pub fn evaluation_identity_holds(record: &TrialRecord, cfg: &AlgorithmConfig) -> bool {
    let lambda = if cfg.algorithm == Algorithm::Ga {
        cfg.lambda_c as u64
    } else {
        1
    };
    record.spent_evaluations
        == record.mutation_generations + lambda * record.crossover_generations + cfg.mu as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurdleReport {
    pub n: usize,
    pub w: usize,
    /// False when the start population does not satisfy the few-zeros hypothesis.
    pub start_meets_hypothesis: bool,
    pub budget: u64,
    pub campaign: CampaignReport,
}

/// Runtime campaign on Hurdle. The start must be `BoundedZeros` with at
/// most `sqrt(n)/7` zeros, or `UniformRandom` (flagged).
pub fn hurdle_campaign(cfg: &AlgorithmConfig, repetitions: u64) -> Result<HurdleReport> {
    let FitnessSpec::Hurdle { n, w } = cfg.fitness else {
        return Err(Error::invalid("hurdle campaigns need the Hurdle fitness"));
    };
    let start_meets_hypothesis = match cfg.init {
        InitPolicy::BoundedZeros { max_zeros } if (max_zeros as f64) <= (n as f64).sqrt() / 7.0 => {
            true
        }
        InitPolicy::UniformRandom => false,
        _ => return Err(Error::invalid(
            "hurdle start must be bounded_zeros with at most sqrt(n)/7 zeros, or uniform_random",
        )),
    };
    Ok(HurdleReport {
        n,
        w,
        start_meets_hypothesis,
        budget: cfg.budget,
        campaign: runtime_campaign(cfg, repetitions)?,
    })
}

/// Monte Carlo estimate of a probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub hits: u64,
    pub samples: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl RateEstimate {
    pub fn new(hits: u64, samples: u64) -> Self {
        let rate = hits as f64 / samples as f64;
        RateEstimate {
            hits,
            samples,
            rate,
            stderr: (rate * (1.0 - rate) / samples as f64).sqrt(),
        }
    }

    /// `|rate - p|` in units of the standard error at `p`.
    pub fn z_score(&self, p: f64) -> f64 {
        let sd = (p * (1.0 - p) / self.samples as f64).sqrt();
        if sd == 0.0 {
            if (self.rate - p).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.rate - p).abs() / sd
        }
    }
}

fn check_plateau_pair(x1: &BitString, x2: &BitString) -> Result<usize> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            left: x1.len(),
            right: x2.len(),
        });
    }
    if x1.count_ones() != x2.count_ones() || x1.count_zeros() == 0 {
        return Err(Error::invalid(
            "parents must be plateau points with the same number k >= 1 of zeros",
        ));
    }
    Ok(x1.len())
}

/// Fraction of `samples` draws of mutate(uniform_crossover(x1, x2)) that equal `1^n`.
pub fn mc_opt_hit(
    x1: &BitString,
    x2: &BitString,
    chi: f64,
    samples: u64,
    seed: u64,
) -> Result<RateEstimate> {
    let n = check_plateau_pair(x1, x2)?;
    let mutator = MutationSpec::StandardBit { chi }.prepare(n)?;
    let hits: u64 = chunked(samples, |chunk, count| {
        let mut rng = stream(seed, chunk, Purpose::HitProbability);
        let mut y = BitString::all_zeros(n);
        let mut hits = 0u64;
        for _ in 0..count {
            CrossoverKind::Uniform.apply_into(x1, x2, &mut y, &mut rng)?;
            mutator.apply(&mut y, &mut rng)?;
            hits += (y.count_ones() == n) as u64;
        }
        Ok(hits)
    })?
    .into_iter()
    .sum();
    Ok(RateEstimate::new(hits, samples))
}

const MAX_CROSSOVER_SPREAD: usize = 30;

/// Exact chance that uniform crossover of `x1, x2` followed by standard bit
/// mutation yields `1^n`, by enumerating the `2^d` crossover outcomes.
pub fn exact_opt_hit(x1: &BitString, x2: &BitString, chi: f64) -> Result<f64> {
    let n = check_plateau_pair(x1, x2)?;
    if !(chi > 0.0 && chi <= n as f64) {
        return Err(Error::invalid(format!("chi must lie in (0, n]; got {chi}")));
    }
    let d = hamming_unchecked(x1, x2);
    if d > MAX_CROSSOVER_SPREAD {
        return Err(Error::invalid(format!(
            "parents differ in {d} positions; exact enumeration allows {MAX_CROSSOVER_SPREAD}"
        )));
    }
    let rate = chi / n as f64;
    // Equal weights split the disputed positions evenly between the parents.
    let common_zeros = x1.count_zeros() - d / 2;
    // Each crossover pattern keeps `d - popcount` of the disputed zeros.
    let hit: Vec<f64> = (0..=n)
        .map(|z| rate.powi(z as i32) * (1.0 - rate).powi((n - z) as i32))
        .collect();
    let total: f64 = (0u64..1 << d)
        .map(|pattern| hit[common_zeros + d - pattern.count_ones() as usize])
        .sum();
    Ok(total / (1u64 << d) as f64)
}

/// Measured chances for one offset `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpOffsetEstimate {
    pub delta: usize,
    /// Offspring with at least `n - k + delta` ones.
    pub at_least: RateEstimate,
    /// Offspring with exactly `n - k + delta` ones.
    pub exactly: RateEstimate,
}

/// Uniform crossover of the complementary plateau pair `0^k 1^(n-k)`,
/// `1^k 0^k 1^(n-2k)`, counting offspring that clear the offset valley.
pub fn mc_jump_offset(
    n: usize,
    k: usize,
    deltas: &[usize],
    samples: u64,
    seed: u64,
) -> Result<Vec<JumpOffsetEstimate>> {
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!(
            "need 1 <= k and 2k <= n (n={n}, k={k})"
        )));
    }
    if let Some(&d) = deltas.iter().find(|&&d| d == 0 || d > k) {
        return Err(Error::invalid(format!("delta={d} outside 1..={k}")));
    }
    let x1 = BitString::with_zeros_at(n, &(0..k).collect::<Vec<_>>())?;
    let x2 = BitString::with_zeros_at(n, &(k..2 * k).collect::<Vec<_>>())?;
    let parts = chunked(samples, |chunk, count| {
        let mut rng = stream(seed, chunk, Purpose::Crossover);
        let mut y = BitString::all_zeros(n);
        let mut histogram = vec![0u64; 2 * k + 1];
        for _ in 0..count {
            CrossoverKind::Uniform.apply_into(&x1, &x2, &mut y, &mut rng)?;
            histogram[y.count_ones() - (n - 2 * k)] += 1;
        }
        Ok(histogram)
    })?;
    let mut histogram = vec![0u64; 2 * k + 1];
    for part in parts {
        for (h, p) in histogram.iter_mut().zip(part) {
            *h += p;
        }
    }
    Ok(deltas
        .iter()
        .map(|&delta| JumpOffsetEstimate {
            delta,
            at_least: RateEstimate::new(histogram[k + delta..].iter().sum(), samples),
            exactly: RateEstimate::new(histogram[k + delta], samples),
        })
        .collect())
}

/// Uniform plateau population drawn from the fixture stream.
pub fn random_plateau_population(n: usize, k: usize, mu: usize, seed: u64) -> Result<Population> {
    if k > n || mu == 0 {
        return Err(Error::invalid(format!(
            "need k <= n and mu >= 1 (n={n}, k={k}, mu={mu})"
        )));
    }
    let mut rng = stream(seed, 0, Purpose::Fixture);
    Population::new(
        (0..mu)
            .map(|_| crate::algorithms::random_with_zeros(n, k, &mut rng))
            .collect(),
    )
}

/// Plateau population whose members share all but `spread` of their zero
/// positions: zeros at `0..k-spread` plus `spread` uniform positions from
/// `k-spread..k+spread`.
pub fn clustered_plateau_population(
    n: usize,
    k: usize,
    mu: usize,
    spread: usize,
    seed: u64,
) -> Result<Population> {
    if spread > k || k + spread > n || mu == 0 {
        return Err(Error::invalid(format!(
            "need spread <= k and k + spread <= n (n={n}, k={k}, spread={spread})"
        )));
    }
    let mut rng = stream(seed, 1, Purpose::Fixture);
    let members = (0..mu)
        .map(|_| {
            let mut zeros: Vec<usize> = (0..k - spread).collect();
            let window = 2 * spread;
            let picked = rand::seq::index::sample(&mut rng, window, spread);
            zeros.extend(picked.into_iter().map(|i| k - spread + i));
            BitString::with_zeros_at(n, &zeros)
        })
        .collect::<Result<Vec<_>>>()?;
    Population::new(members)
}

/// Draws `count` uniform points with exactly `zeros` zeros (fixture helper).
pub fn random_points<R: Rng + ?Sized>(
    n: usize,
    zeros: usize,
    count: usize,
    rng: &mut R,
) -> Vec<BitString> {
    (0..count)
        .map(|_| crate::algorithms::random_with_zeros(n, zeros, rng))
        .collect()
}
