//! Closed-form predictions: plateau-preserving mutation probabilities,
//! diversity drift coefficients and equilibria, the GA drift bound, and the
//! runtime-bound ingredients.
//!
//! Binomial coefficients are exact (big integers) up to `n = 64` and use
//! log-gamma beyond that.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algorithms::default_lambda_c;
use crate::error::{Error, Result};

const EXACT_LIMIT: u64 = 64;
const REL_TOL: f64 = 1e-12;

/// `ceil(x)`, except values within rounding noise of an integer snap to it.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn le_tol(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
}

pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n <= EXACT_LIMIT {
        return binomial_exact(n, k).to_f64().expect("finite").ln();
    }
    ln_binomial_gamma(n, k)
}

pub(crate) fn ln_binomial_gamma(n: u64, k: u64) -> f64 {
    let lg = |x: u64| libm::lgamma(x as f64 + 1.0);
    lg(n) - lg(k) - lg(n - k)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_LIMIT {
        return binomial_exact(n, k).to_f64().expect("finite");
    }
    ln_binomial_gamma(n, k).exp()
}

fn ratio_to_f64(num: BigUint, den: BigUint) -> f64 {
    BigRational::new(BigInt::from(num), BigInt::from(den))
        .to_f64()
        .expect("finite ratio")
}

/// Parameters of a plateau population under standard bit mutation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauParams {
    pub n: usize,
    pub k: usize,
    pub mu: usize,
    pub chi: f64,
    pub p_c: f64,
}

impl PlateauParams {
    pub fn new(n: usize, k: usize, mu: usize, chi: f64, p_c: f64) -> Result<Self> {
        let p = PlateauParams { n, k, mu, chi, p_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.k >= 1 && self.k < self.n) {
            problems.push(format!("need 1 <= k < n (n={}, k={})", self.n, self.k));
        }
        if self.mu < 2 {
            problems.push(format!("need mu >= 2 (mu={})", self.mu));
        }
        if !(self.chi > 0.0 && self.chi <= self.n as f64) {
            problems.push(format!("need 0 < chi <= n (chi={})", self.chi));
        }
        if !(0.0..1.0).contains(&self.p_c) {
            problems.push(format!("need 0 <= p_c < 1 (p_c={})", self.p_c));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(problems.join("; ")))
        }
    }

    /// `q = min(k, n - k)`, the largest paired-flip size.
    pub fn q(&self) -> usize {
        self.k.min(self.n - self.k)
    }

    fn kk(&self) -> f64 {
        (self.k * (self.n - self.k)) as f64
    }
}

/// Probability that standard bit mutation flips exactly `ell` ones and `ell`
/// zeros of a plateau point (and nothing else).
pub fn p_ell(params: &PlateauParams, ell: usize) -> Result<f64> {
    if ell > params.q() {
        return Err(Error::invalid(format!(
            "ell={ell} exceeds q={}",
            params.q()
        )));
    }
    let (n, k) = (params.n as u64, params.k as u64);
    let rate = params.chi / params.n as f64;
    let stay = n - 2 * ell as u64;
    let ln_stay = if stay == 0 {
        0.0
    } else {
        stay as f64 * (-rate).ln_1p()
    };
    let ln_flip = if ell == 0 {
        0.0
    } else {
        2.0 * ell as f64 * rate.ln()
    };
    Ok((ln_binomial(k, ell as u64) + ln_binomial(n - k, ell as u64) + ln_flip + ln_stay).exp())
}

/// `p_0, ..., p_q`.
pub fn p_ell_table(params: &PlateauParams) -> Vec<f64> {
    (0..=params.q())
        .map(|l| p_ell(params, l).expect("in range"))
        .collect()
}

fn mass(p: &[f64]) -> (f64, f64) {
    let total = p.iter().sum();
    let first_moment = p.iter().enumerate().map(|(l, pl)| l as f64 * pl).sum();
    (total, first_moment)
}

/// Expected `H(z, y)` when `z` flips `ell` uniform ones and `ell` uniform
/// zeros of a plateau point `x` with `H(x, y) = h`.
pub fn paired_flip_expected_distance(n: usize, k: usize, ell: usize, h: usize) -> f64 {
    let kk = (k * (n - k)) as f64;
    2.0 * ell as f64 + (1.0 - ell as f64 * n as f64 / kk) * h as f64
}

/// Coefficients of the (mu+1) EA diversity drift `E S' = (1 - gamma) S + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftCoefficients {
    pub beta: f64,
    pub gamma: f64,
}

/// `p` holds the probabilities of flipping `ell` ones and `ell` zeros, indexed by `ell`.
pub fn drift_coefficients(params: &PlateauParams, p: &[f64]) -> DriftCoefficients {
    let mu = params.mu as f64;
    let n = params.n as f64;
    let beta = 4.0 * (mu - 1.0) * mass(p).1;
    let gamma = p
        .iter()
        .enumerate()
        .map(|(l, pl)| {
            pl * (2.0 / (mu * mu) + 2.0 * (mu - 1.0) * l as f64 * n / (mu * mu * params.kk()))
        })
        .sum();
    DriftCoefficients { beta, gamma }
}

/// Expected next diversity of the (mu+1) EA from a plateau population with diversity `s`.
pub fn ea_drift(params: &PlateauParams, p: &[f64], s: f64) -> f64 {
    let c = drift_coefficients(params, p);
    (1.0 - c.gamma) * s + c.beta
}

/// Equilibrium `beta / gamma`, or `None` when no mutation moves along the
/// plateau (then the diversity keeps its initial value by convention).
pub fn equilibrium_s0(params: &PlateauParams, p: &[f64]) -> Option<f64> {
    if p.iter().skip(1).all(|&pl| pl == 0.0) {
        return None;
    }
    let c = drift_coefficients(params, p);
    Some(c.beta / c.gamma)
}

/// Leading-order equilibrium `2 mu^2 k(n-k)/n / (n/((mu-1) chi^2) + 1)`.
pub fn asymptotic_s0(params: &PlateauParams) -> f64 {
    let (n, mu, chi) = (params.n as f64, params.mu as f64, params.chi);
    2.0 * mu * mu * params.kk() / n / (n / ((mu - 1.0) * chi * chi) + 1.0)
}

/// `C1 = sum p_ell` and `C2 = (n/k) sum ell p_ell`.
pub fn c1_c2(params: &PlateauParams, p: &[f64]) -> (f64, f64) {
    let (total, first) = mass(p);
    (total, params.n as f64 / params.k as f64 * first)
}

/// GA drift lower bound `E S' >= (1 - delta) S + alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaDriftBound {
    pub alpha: f64,
    pub delta: f64,
}

impl GaDriftBound {
    pub fn predict(&self, s: f64) -> f64 {
        (1.0 - self.delta) * s + self.alpha
    }

    pub fn equilibrium(&self) -> f64 {
        self.alpha / self.delta
    }
}

/// Mixes the EA drift (weight `1 - p_c`) with the crossover-step bound
/// `(1 - 3/mu^2) S - 9 k mu chi / n` (weight `p_c`).
pub fn alpha_delta(params: &PlateauParams, p: &[f64]) -> GaDriftBound {
    let (mu, n, k, pc, chi) = (
        params.mu as f64,
        params.n as f64,
        params.k as f64,
        params.p_c,
        params.chi,
    );
    let first = mass(p).1;
    // (1 - p_c) beta with beta = 4(mu - 1) sum ell p_ell.
    let alpha = (1.0 - pc) * 4.0 * (mu - 1.0) * first - 9.0 * pc * k * mu * chi / n;
    let spread: f64 = p
        .iter()
        .enumerate()
        .map(|(l, pl)| pl * (1.0 + (mu - 1.0) * l as f64 * n / params.kk()))
        .sum();
    let delta = (3.0 * pc + (2.0 - 2.0 * pc) * spread) / (mu * mu);
    GaDriftBound { alpha, delta }
}

/// Closed-form lower bound on `alpha / delta`.
pub fn alpha_over_delta_bound(params: &PlateauParams, c1: f64, c2: f64) -> f64 {
    let (mu, n, k, pc, chi) = (
        params.mu as f64,
        params.n as f64,
        params.k as f64,
        params.p_c,
        params.chi,
    );
    2.0 * k
        * mu
        * mu
        * (1.0
            - pc * (c2 + 9.0 * chi / 4.0) / c2
            - k / (n - k)
            - n / (mu - 1.0) * (2.0 * c1 + 3.0 * pc) / (2.0 * c2))
}

/// `ceil(ln(1/eps) / delta)`: generations for the diversity to come within `eps` of equilibrium.
pub fn tau0(eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1); got {eps}")));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid(format!(
            "delta must be positive; got {delta}"
        )));
    }
    Ok(ceil_tolerant(-eps.ln() / delta) as u64)
}

/// Lower bounds on the chance that one offspring of a complementary
/// plateau pair lands on the plateau.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauHitBound {
    /// `C(2k, k) 4^-k (1 - chi/n)^n`.
    pub binomial_form: f64,
    /// `e^-chi / (3 sqrt(k))`.
    pub simplified: f64,
}

pub fn pr_plateau_lower_bound(k: usize, chi: f64, n: usize) -> Result<PlateauHitBound> {
    if k == 0 || n == 0 || !(chi > 0.0 && chi <= n as f64) {
        return Err(Error::invalid(format!(
            "need k >= 1 and 0 < chi <= n (k={k}, chi={chi}, n={n})"
        )));
    }
    let central = ratio_to_f64(
        binomial_exact(2 * k as u64, k as u64),
        BigUint::one() << (2 * k),
    );
    let stay = if chi == n as f64 {
        0.0
    } else {
        (n as f64 * (-chi / n as f64).ln_1p()).exp()
    };
    Ok(PlateauHitBound {
        binomial_form: central * stay,
        simplified: (-chi).exp() / (3.0 * (k as f64).sqrt()),
    })
}

/// Smallest `n` from which `binomial_form >= simplified` holds for every `k`.
///
/// Since `C(2k,k) 4^-k >= 1/(2 sqrt k)`, it suffices that
/// `(1 - chi/n)^n >= (2/3) e^-chi`; the left side increases in `n`.
pub fn plateau_bound_threshold(chi: f64) -> usize {
    let target = 2.0 / 3.0 * (-chi).exp();
    let mut n = chi.ceil().max(1.0) as usize;
    while (n as f64 <= chi) || (n as f64 * (-chi / n as f64).ln_1p()).exp() < target {
        n += 1;
    }
    n
}

/// Upper bound on the chance that crossover plus an unbiased mutation of
/// two plateau parents at distance `2d` produces `1^n`.
pub fn opt_hit_bound(n: usize, k: usize, d: usize) -> Result<f64> {
    if d > k || k > n || k + d > n {
        return Err(Error::invalid(format!(
            "need d <= k and k + d <= n (n={n}, k={k}, d={d})"
        )));
    }
    let (n, k, d) = (n as u64, k as u64, d as u64);
    let sum: f64 = (0..=2 * d)
        .map(|i| (ln_binomial(2 * d, i) - ln_binomial(n, k + d - i)).exp())
        .sum();
    Ok(sum / 4f64.powi(d as i32))
}

/// `(1/2) min{C(n,k)/(1-p_c), c 4^k / p_c}` for a caller-chosen constant `c`.
pub fn lower_bound_runtime(n: usize, k: usize, p_c: f64, c: f64) -> Result<f64> {
    if !(p_c > 0.0 && p_c < 1.0) || !(c > 0.0) || k > n {
        return Err(Error::invalid(format!(
            "need 0 < p_c < 1, c > 0, k <= n (p_c={p_c}, c={c})"
        )));
    }
    let blind = binomial(n as u64, k as u64) / (1.0 - p_c);
    let crossing = c * 4f64.powi(k as i32) / p_c;
    Ok(0.5 * blind.min(crossing))
}

/// Chance that uniform crossover of a complementary pair gains at least
/// `k + delta` of the `2k` disputed ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpOffsetSuccess {
    /// `C(2k, k+delta) 4^-k`.
    pub single_term: f64,
    /// `sum_{i=0}^{k-delta} C(2k, k+delta+i) 4^-k` (exact).
    pub full_sum: f64,
}

pub fn jump_offset_success(k: usize, delta: usize) -> Result<JumpOffsetSuccess> {
    if !(1 <= delta && delta <= k) {
        return Err(Error::invalid(format!(
            "need 1 <= delta <= k (k={k}, delta={delta})"
        )));
    }
    let (k, delta) = (k as u64, delta as u64);
    let den = BigUint::one() << (2 * k);
    let single = binomial_exact(2 * k, k + delta);
    let full = (0..=k - delta)
        .map(|i| binomial_exact(2 * k, k + delta + i))
        .sum::<BigUint>();
    Ok(JumpOffsetSuccess {
        single_term: ratio_to_f64(single, den.clone()),
        full_sum: ratio_to_f64(full, den),
    })
}

/// Hypotheses of the runtime bound at a given `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreconditionFlags {
    pub eps: f64,
    /// `0 < eps < 1/4`.
    pub eps_in_range: bool,
    /// `p_c <= (eps/3) 2 C2 / (2 C2 + 9 chi/4)`.
    pub crossover_probability: bool,
    /// `mu >= 1 + (3n/eps)(2 C1 + 3 p_c)/(2 C2)`.
    pub population_size: bool,
    /// `k <= (n - k) eps / 3`.
    pub gap_size: bool,
    /// `lambda_c >= 6 sqrt(k) e^chi ln(mu)`.
    pub competing_offspring: bool,
    /// `lambda_c >= 1/p_c`, which removes the `1/p_c` terms.
    pub lambda_covers_crossover_rate: bool,
    pub specialized: SpecializedFlags,
}

/// The same hypotheses at the preset `eps = 1/(16k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecializedFlags {
    pub eps: f64,
    /// `floor(8 eps k) = 0`, so the `(n/chi)^floor(8 eps k)` factor vanishes.
    pub floor_term_vanishes: bool,
    /// `p_c <= (1/(48k)) 2 C2 / (2 C2 + 9 chi/4)`.
    pub crossover_probability: bool,
    /// `mu >= 1 + 48 k n (2 C1 + 3 p_c)/(2 C2)`.
    pub population_size: bool,
    /// `k^2 <= (n - k)/48`.
    pub gap_size: bool,
    pub competing_offspring: bool,
    /// `p_c >= 4^-k`.
    pub crossover_rate_floor: bool,
    /// `log2(mu) <= n log2(k)`.
    pub population_cap: bool,
}

impl PreconditionFlags {
    pub fn general_ok(&self) -> bool {
        self.eps_in_range
            && self.crossover_probability
            && self.population_size
            && self.gap_size
            && self.competing_offspring
    }

    /// Names of the violated general hypotheses.
    pub fn violations(&self) -> Vec<&'static str> {
        [
            (self.eps_in_range, "0 < eps < 1/4"),
            (
                self.crossover_probability,
                "p_c <= (eps/3) 2C2/(2C2 + 9chi/4)",
            ),
            (self.population_size, "mu >= 1 + (3n/eps)(2C1 + 3p_c)/(2C2)"),
            (self.gap_size, "k <= (n-k) eps/3"),
            (
                self.competing_offspring,
                "lambda_c >= 6 sqrt(k) e^chi ln(mu)",
            ),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

fn pc_limit(eps: f64, c2: f64, chi: f64) -> f64 {
    eps / 3.0 * 2.0 * c2 / (2.0 * c2 + 9.0 * chi / 4.0)
}

fn mu_requirement(eps: f64, n: f64, c1: f64, c2: f64, p_c: f64) -> f64 {
    1.0 + 3.0 * n / eps * (2.0 * c1 + 3.0 * p_c) / (2.0 * c2)
}

fn competing_requirement(k: usize, chi: f64, mu: usize) -> f64 {
    6.0 * (k as f64).sqrt() * chi.exp() * (mu as f64).ln()
}

pub fn check_preconditions(params: &PlateauParams, eps: f64, lambda_c: usize) -> PreconditionFlags {
    let p = p_ell_table(params);
    let (c1, c2) = c1_c2(params, &p);
    let (n, k, mu, chi, pc) = (
        params.n as f64,
        params.k as f64,
        params.mu as f64,
        params.chi,
        params.p_c,
    );
    let lambda = lambda_c as f64;
    let competing = lambda >= competing_requirement(params.k, chi, params.mu);
    let covers = pc > 0.0 && lambda >= ceil_tolerant(1.0 / pc);
    let flags_at = |e: f64| {
        (
            le_tol(pc, pc_limit(e, c2, chi)),
            c2 > 0.0 && le_tol(mu_requirement(e, n, c1, c2, pc), mu),
            le_tol(k, (n - k) * e / 3.0),
        )
    };
    let (cp, ps, gs) = flags_at(eps);
    let special_eps = 1.0 / (16.0 * k);
    let (scp, sps, _) = flags_at(special_eps);
    PreconditionFlags {
        eps,
        eps_in_range: eps > 0.0 && eps < 0.25,
        crossover_probability: cp,
        population_size: ps,
        gap_size: gs,
        competing_offspring: competing,
        lambda_covers_crossover_rate: covers,
        specialized: SpecializedFlags {
            eps: special_eps,
            floor_term_vanishes: (8.0 * special_eps * k).floor() == 0.0,
            crossover_probability: scp,
            population_size: sps,
            gap_size: k * k <= (n - k) / 48.0,
            competing_offspring: competing,
            crossover_rate_floor: pc >= 0.25f64.powi(params.k as i32),
            population_cap: mu.log2() <= n * k.log2(),
        },
    }
}

/// Parameters built from the hypotheses at a given `eps`: the largest
/// allowed `p_c`, the smallest allowed `mu`, and the default `lambda_c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub eps: f64,
    pub p_c: f64,
    pub mu: usize,
    pub lambda_c: usize,
}

impl Preset {
    pub fn params(&self, n: usize, k: usize, chi: f64) -> PlateauParams {
        PlateauParams {
            n,
            k,
            mu: self.mu,
            chi,
            p_c: self.p_c,
        }
    }
}

pub fn preset_for_eps(n: usize, k: usize, chi: f64, eps: f64) -> Result<Preset> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1); got {eps}")));
    }
    let probe = PlateauParams::new(n, k, 2, chi, 0.0)?;
    let (c1, c2) = c1_c2(&probe, &p_ell_table(&probe));
    if !(c2 > 0.0) {
        return Err(Error::invalid(
            "mutation never moves along the plateau (C2 = 0)",
        ));
    }
    let p_c = pc_limit(eps, c2, chi);
    let mu = ceil_tolerant(mu_requirement(eps, n as f64, c1, c2, p_c)).max(2.0) as usize;
    let lambda_c = default_lambda_c(k, chi, mu, p_c)?;
    Ok(Preset {
        eps,
        p_c,
        mu,
        lambda_c,
    })
}

/// Preset at `eps = 1/(16k)`.
pub fn specialized_preset(n: usize, k: usize, chi: f64) -> Result<Preset> {
    preset_for_eps(n, k, chi, 1.0 / (16.0 * k as f64))
}

/// Scans `eps` over `steps` grid points in `(0, 1/4)` and returns the first
/// preset meeting every general hypothesis.
pub fn search_feasible(n: usize, k: usize, chi: f64, steps: usize) -> Result<Option<Preset>> {
    for i in 1..steps {
        let eps = 0.25 * i as f64 / steps as f64;
        let preset = preset_for_eps(n, k, chi, eps)?;
        let flags = check_preconditions(&preset.params(n, k, chi), eps, preset.lambda_c);
        if flags.general_ok() {
            return Ok(Some(preset));
        }
    }
    Ok(None)
}

/// `ceil(lambda_c p_c)(mu n + n ln n + mu ln mu)`: scale of the time to reach the plateau.
pub fn plateau_time_scale(n: usize, mu: usize, lambda_c: usize, p_c: f64) -> f64 {
    let (n, mu) = (n as f64, mu as f64);
    (lambda_c as f64 * p_c).ceil().max(1.0) * (mu * n + n * n.ln() + mu * mu.ln())
}

/// Every closed-form quantity for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub params: PlateauParams,
    pub eps: f64,
    pub lambda_c: Option<usize>,
    pub p_ell: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    /// `None` when no mutation moves along the plateau.
    pub s0: Option<f64>,
    pub s0_asymptotic: f64,
    pub max_plateau_diversity: u64,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub delta: f64,
    pub alpha_over_delta: f64,
    pub alpha_over_delta_bound: f64,
    pub tau0: Option<u64>,
    pub pr_plateau_lb: PlateauHitBound,
    pub precondition_flags: Option<PreconditionFlags>,
    /// `(d, bound)` for `d = 0..=q`.
    pub opt_hit_bounds: Vec<(usize, f64)>,
    /// `(delta, success)` for `delta = 1..=k`.
    pub jump_offset_success: Vec<(usize, JumpOffsetSuccess)>,
    /// With the constant set to 1; absent when `p_c = 0`.
    pub lower_bound_runtime: Option<f64>,
}

/// Builds the report. `lambda_c` defaults to [`default_lambda_c`] when `p_c > 0`.
pub fn report(params: &PlateauParams, eps: f64, lambda_c: Option<usize>) -> Result<TheoryReport> {
    params.validate()?;
    let p = p_ell_table(params);
    let coeff = drift_coefficients(params, &p);
    let (c1, c2) = c1_c2(params, &p);
    let ga = alpha_delta(params, &p);
    let lambda_c = match lambda_c {
        Some(l) => Some(l),
        None if params.p_c > 0.0 => Some(default_lambda_c(
            params.k, params.chi, params.mu, params.p_c,
        )?),
        None => None,
    };
    let q = params.q();
    Ok(TheoryReport {
        params: *params,
        eps,
        lambda_c,
        beta: coeff.beta,
        gamma: coeff.gamma,
        s0: equilibrium_s0(params, &p),
        s0_asymptotic: asymptotic_s0(params),
        max_plateau_diversity: crate::bitpop::max_plateau_diversity(params.n, params.k, params.mu)?,
        c1,
        c2,
        alpha: ga.alpha,
        delta: ga.delta,
        alpha_over_delta: ga.equilibrium(),
        alpha_over_delta_bound: alpha_over_delta_bound(params, c1, c2),
        tau0: tau0(eps, ga.delta).ok(),
        pr_plateau_lb: pr_plateau_lower_bound(params.k, params.chi, params.n)?,
        precondition_flags: lambda_c.map(|l| check_preconditions(params, eps, l)),
        opt_hit_bounds: (0..=q)
            .map(|d| (d, opt_hit_bound(params.n, params.k, d).expect("d <= q")))
            .collect(),
        jump_offset_success: (1..=params.k)
            .map(|d| {
                (
                    d,
                    jump_offset_success(params.k, d).expect("1 <= delta <= k"),
                )
            })
            .collect(),
        lower_bound_runtime: (params.p_c > 0.0)
            .then(|| lower_bound_runtime(params.n, params.k, params.p_c, 1.0))
            .transpose()?,
        p_ell: p,
    })
}
