//! Subcommand bodies: resolve settings, validate, run, report.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use jumplab::algorithms::{default_lambda_c, Algorithm, AlgorithmConfig, InitPolicy};
use jumplab::bitpop::{hamming, BitString, Population};
use jumplab::experiments::{
    clustered_plateau_population, counterexample_drift, counterexample_population,
    enumerate_generation_exact, equilibrium_trials, evaluation_identity_holds, exact_opt_hit,
    hurdle_campaign, mc_jump_offset, mc_opt_hit, one_step_drift, random_plateau_population,
    runtime_campaign, with_threads, CampaignReport, Conditioning, DriftReport,
};
use jumplab::fitness::FitnessSpec;
use jumplab::theory::{self, PlateauParams, Preset};
use jumplab::variation::{CrossoverKind, MutationSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::settings::{List, Settings};
use crate::CliError;

/// Acceptance band for Monte Carlo comparisons, in standard errors.
const SIGMAS: f64 = 3.0;
/// Largest parent spread for which the optimum-hit chance is enumerated.
const EXACT_HIT_SPREAD: usize = 30;

macro_rules! choice {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        enum $name {
            $($variant),+
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($name::$variant => $text),+
                })
            }
        }
    };
}

choice!(AlgorithmChoice { Ea => "ea", Ga => "ga" });
choice!(PresetChoice { Manual => "manual", Specialized => "specialized", Search => "search" });
choice!(MutationChoice { Standard => "standard", Paired => "paired", Radius => "radius" });
choice!(CrossoverChoice { Uniform => "uniform", Balanced => "balanced", Boring => "boring" });
choice!(ConditioningChoice {
    All => "all",
    CrossoverOnly => "crossover-only",
    MutationOnly => "mutation-only",
    AcceptedOnPlateau => "accepted-on-plateau",
});
choice!(PopulationChoice {
    Random => "random",
    Cluster => "cluster",
    Counterexample => "counterexample",
    File => "file",
});
choice!(FitnessChoice {
    Jump => "jump",
    JumpPrime => "jump_prime",
    OneMax => "onemax",
    JumpOffset => "jump_offset",
    Hurdle => "hurdle",
});
choice!(InitChoice {
    Uniform => "uniform",
    PlateauRandom => "plateau_random",
    PlateauClone => "plateau_clone",
    BoundedZeros => "bounded_zeros",
});
choice!(HitMode { Opt => "opt", Offset => "offset" });

impl From<AlgorithmChoice> for Algorithm {
    fn from(c: AlgorithmChoice) -> Self {
        match c {
            AlgorithmChoice::Ea => Algorithm::Ea,
            AlgorithmChoice::Ga => Algorithm::Ga,
        }
    }
}

impl From<CrossoverChoice> for CrossoverKind {
    fn from(c: CrossoverChoice) -> Self {
        match c {
            CrossoverChoice::Uniform => CrossoverKind::Uniform,
            CrossoverChoice::Balanced => CrossoverKind::Balanced,
            CrossoverChoice::Boring => CrossoverKind::Boring,
        }
    }
}

impl From<ConditioningChoice> for Conditioning {
    fn from(c: ConditioningChoice) -> Self {
        match c {
            ConditioningChoice::All => Conditioning::All,
            ConditioningChoice::CrossoverOnly => Conditioning::CrossoverOnly,
            ConditioningChoice::MutationOnly => Conditioning::MutationOnly,
            ConditioningChoice::AcceptedOnPlateau => Conditioning::AcceptedOnPlateau,
        }
    }
}

/// Seed, pool size and output paths of one invocation.
struct RunContext {
    seed: u64,
    threads: Option<usize>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
}

impl RunContext {
    fn resolve(s: &mut Settings) -> Result<Self, CliError> {
        let seed = match s.opt::<u64>("seed")? {
            Some(seed) => seed,
            None => {
                let seed = rand::random::<u64>();
                eprintln!("seed = {seed} (randomly chosen)");
                s.record("seed", seed);
                seed
            }
        };
        let threads = s.opt::<usize>("threads")?;
        if threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(RunContext {
            seed,
            threads,
            out: s.opt::<String>("out")?.map(PathBuf::from),
            summary: s.opt::<String>("summary")?.map(PathBuf::from),
        })
    }

    fn pooled<T: Send>(
        &self,
        f: impl FnOnce() -> jumplab::Result<T> + Send,
    ) -> Result<T, CliError> {
        Ok(with_threads(self.threads, f)??)
    }
}

/// Warns about unused keys and logs the resolved configuration to stderr.
fn log_config(s: &Settings) {
    for key in s.unused() {
        eprintln!("warning: `{key}` has no effect with these settings");
    }
    eprintln!("# resolved configuration");
    eprint!("{}", s.to_config_text());
}

fn write_summary(path: Option<&Path>, summary: &Value) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(summary).map_err(|e| CliError::Output(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<S: Serialize>(path: Option<&Path>, rows: &[S]) -> Result<(), CliError> {
    let Some(path) = path else {
        return Ok(());
    };
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn write_campaign(path: Option<&Path>, campaign: &CampaignReport) -> Result<(), CliError> {
    match path {
        Some(p) => campaign
            .write_csv(create(p)?)
            .map_err(|e| CliError::Output(e.to_string())),
        None => Ok(()),
    }
}

/// Summary document shared by every experiment.
fn summary(command: &str, s: &Settings, results: Value, checks: Vec<(&str, bool)>) -> Value {
    let pass = checks.iter().all(|(_, ok)| *ok);
    let checks: serde_json::Map<String, Value> = checks
        .into_iter()
        .map(|(name, ok)| (name.to_string(), Value::Bool(ok)))
        .collect();
    json!({
        "command": command,
        "config": s.resolved(),
        "results": results,
        "checks": checks,
        "pass": pass,
    })
}

fn reject_when_derived(s: &Settings, preset: PresetChoice, keys: &[&str]) -> Result<(), CliError> {
    match keys.iter().find(|k| s.is_set(k)) {
        Some(key) => Err(CliError::Config(format!(
            "`{key}` is derived by preset = {preset}; drop it or use preset = manual"
        ))),
        None => Ok(()),
    }
}

fn derive_preset(
    s: &mut Settings,
    choice: PresetChoice,
    n: usize,
    k: usize,
    chi: f64,
) -> Result<Preset, CliError> {
    match choice {
        PresetChoice::Manual => unreachable!("manual settings are read directly"),
        PresetChoice::Specialized => Ok(theory::specialized_preset(n, k, chi)?),
        PresetChoice::Search => {
            let steps = s.get("search_steps", 1000usize)?;
            theory::search_feasible(n, k, chi, steps)?.ok_or_else(|| {
                CliError::Config(format!(
                    "no eps on a {steps}-point grid in (0, 1/4) satisfies every hypothesis for n={n}, k={k}, chi={chi}"
                ))
            })
        }
    }
}

fn crossover_lambda(k: usize, chi: f64, mu: usize, p_c: f64) -> jumplab::Result<usize> {
    default_lambda_c(k, chi, mu, if p_c > 0.0 { p_c } else { 1.0 })
}

fn warn_hypotheses(violations: &[&str]) {
    for v in violations {
        eprintln!("warning: hypothesis violated: {v}");
    }
}

pub fn predict(mut s: Settings) -> Result<(), CliError> {
    let summary_path = s.opt::<String>("summary")?.map(PathBuf::from);
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let chi = s.get("chi", 1.0f64)?;
    let choice = s.get("preset", PresetChoice::Manual)?;
    let (params, eps, lambda_c, preset) = if choice == PresetChoice::Manual {
        let mu = s.required::<usize>("mu")?;
        let p_c = s.get("pc", 0.0f64)?;
        let eps = s.get("eps", 1.0 / (16.0 * k as f64))?;
        let lambda_c = s.opt::<usize>("lambda_c")?;
        (PlateauParams::new(n, k, mu, chi, p_c)?, eps, lambda_c, None)
    } else {
        reject_when_derived(&s, choice, &["mu", "pc", "eps", "lambda_c"])?;
        let preset = derive_preset(&mut s, choice, n, k, chi)?;
        let params = preset.params(n, k, chi);
        params.validate()?;
        (params, preset.eps, Some(preset.lambda_c), Some(preset))
    };
    log_config(&s);
    let report = theory::report(&params, eps, lambda_c)?;
    if let Some(flags) = &report.precondition_flags {
        warn_hypotheses(&flags.violations());
    }
    let doc = json!({
        "command": "predict",
        "config": s.resolved(),
        "preset": preset,
        "report": report,
    });
    write_summary(summary_path.as_deref(), &doc)
}

fn mutation_from(s: &mut Settings, chi: f64) -> Result<MutationSpec, CliError> {
    Ok(match s.get("mutation", MutationChoice::Standard)? {
        MutationChoice::Standard => MutationSpec::StandardBit { chi },
        MutationChoice::Paired => MutationSpec::PairedFlip {
            ell: s.required("ell")?,
        },
        MutationChoice::Radius => MutationSpec::FixedRadius {
            radius: s.required("radius")?,
        },
    })
}

#[derive(Debug, Serialize)]
struct DriftRow {
    lambda_c: usize,
    initial_s: u64,
    samples: u64,
    mean_next_s: f64,
    stderr: f64,
    change: f64,
    conditioning: Conditioning,
    acceptance_rate: f64,
    predicted: Option<f64>,
    lower_bound: Option<f64>,
    exact: Option<f64>,
}

impl DriftRow {
    fn new(lambda_c: usize, r: &DriftReport, exact: Option<f64>) -> Self {
        DriftRow {
            lambda_c,
            initial_s: r.initial_s,
            samples: r.samples,
            mean_next_s: r.mean_next_s,
            stderr: r.stderr,
            change: r.mean_change(),
            conditioning: r.conditioning,
            acceptance_rate: r.acceptance_rate,
            predicted: r.predicted,
            lower_bound: r.lower_bound,
            exact,
        }
    }
}

fn within(measured: f64, expected: f64, stderr: f64) -> bool {
    (measured - expected).abs() <= SIGMAS * stderr + 1e-9 * expected.abs().max(1.0)
}

pub fn drift(mut s: Settings) -> Result<(), CliError> {
    let ctx = RunContext::resolve(&mut s)?;
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let pop = match s.get("population", PopulationChoice::Random)? {
        PopulationChoice::File => {
            let path = PathBuf::from(s.required::<String>("population_file")?);
            let pop = Population::load_fixture(&path)?;
            if let Some(mu) = s.opt::<usize>("mu")? {
                if mu != pop.size() {
                    return Err(CliError::Config(format!(
                        "mu = {mu} but {} holds {} members",
                        path.display(),
                        pop.size()
                    )));
                }
            }
            pop
        }
        PopulationChoice::Random => random_plateau_population(n, k, s.required("mu")?, ctx.seed)?,
        PopulationChoice::Cluster => {
            let mu = s.required("mu")?;
            clustered_plateau_population(n, k, mu, s.get("spread", 2usize)?, ctx.seed)?
        }
        PopulationChoice::Counterexample => counterexample_population(n, k, s.required("mu")?)?,
    };
    let mu = pop.size();
    let algorithm = s.get("algorithm", AlgorithmChoice::Ea)?;
    let fitness = match s.get("fitness", FitnessChoice::JumpPrime)? {
        FitnessChoice::JumpPrime => FitnessSpec::JumpPrime { n, k },
        FitnessChoice::Jump => FitnessSpec::Jump { n, k },
        other => {
            return Err(CliError::Config(format!(
                "drift needs fitness jump or jump_prime, got {other}"
            )))
        }
    };
    let chi = s.get("chi", 1.0f64)?;
    let mutation = mutation_from(&mut s, chi)?;
    let (p_c, lambda_c, crossover) = if algorithm == AlgorithmChoice::Ga {
        let p_c = s.get("pc", 0.0f64)?;
        let lambda_c = match s.opt("lambda_c")? {
            Some(l) => l,
            None => crossover_lambda(k, chi, mu, p_c)?,
        };
        s.record("lambda_c", lambda_c);
        let crossover = s.get("crossover", CrossoverChoice::Uniform)?;
        (p_c, lambda_c, crossover)
    } else {
        (0.0, 1, CrossoverChoice::Uniform)
    };
    let conditioning: Conditioning = s.get("conditioning", ConditioningChoice::All)?.into();
    let samples = s.get("samples", 100_000u64)?;
    let exact = s.get("exact", false)?;
    let cfg = AlgorithmConfig {
        algorithm: algorithm.into(),
        fitness,
        mu,
        p_c,
        lambda_c,
        mutation,
        crossover: crossover.into(),
        init: InitPolicy::Explicit {
            members: pop.members().to_vec(),
        },
        seed: ctx.seed,
        budget: u64::MAX,
        trajectory_every: None,
    };
    cfg.validate()?;
    log_config(&s);

    let report = ctx.pooled(|| one_step_drift(&pop, &cfg, samples, conditioning, ctx.seed))?;
    let exact_next = if exact {
        Some(enumerate_generation_exact(&pop, &cfg)?.expected_next_s)
    } else {
        None
    };
    let unconditioned = conditioning == Conditioning::All
        || (conditioning == Conditioning::AcceptedOnPlateau
            && matches!(fitness, FitnessSpec::JumpPrime { .. }));
    let mut checks = Vec::new();
    if let Some(ok) = report.matches_prediction(SIGMAS) {
        checks.push(("matches_prediction", ok));
    }
    if let Some(ok) = report.respects_lower_bound(SIGMAS) {
        checks.push(("respects_lower_bound", ok));
    }
    if let (Some(e), true) = (exact_next, unconditioned) {
        checks.push((
            "matches_exact",
            within(report.mean_next_s, e, report.stderr),
        ));
    }
    write_rows(
        ctx.out.as_deref(),
        &[DriftRow::new(lambda_c, &report, exact_next)],
    )?;
    let results = json!({
        "mu": mu,
        "lambda_c": lambda_c,
        "measured": report.mean_next_s,
        "stderr": report.stderr,
        "predicted": report.predicted,
        "lower_bound": report.lower_bound,
        "exact": exact_next,
        "change": report.mean_change(),
        "report": report,
    });
    write_summary(
        ctx.summary.as_deref(),
        &summary("drift", &s, results, checks),
    )
}

pub fn equilibrium(mut s: Settings) -> Result<(), CliError> {
    let ctx = RunContext::resolve(&mut s)?;
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let mu = s.required::<usize>("mu")?;
    let chi = s.get("chi", 1.0f64)?;
    let algorithm = s.get("algorithm", AlgorithmChoice::Ea)?;
    let eps = s.get("eps", 1.0 / (16.0 * k as f64))?;
    let init = match s.get("init", InitChoice::PlateauRandom)? {
        InitChoice::PlateauRandom => InitPolicy::PlateauRandom,
        InitChoice::PlateauClone => InitPolicy::PlateauClone,
        other => {
            return Err(CliError::Config(format!(
                "equilibrium runs start on the plateau; init = {other} is not allowed"
            )))
        }
    };
    let fitness = FitnessSpec::JumpPrime { n, k };
    let mut cfg = if algorithm == AlgorithmChoice::Ga {
        let p_c = s.get("pc", 0.0f64)?;
        let lambda_c = match s.opt("lambda_c")? {
            Some(l) => l,
            None => crossover_lambda(k, chi, mu, p_c)?,
        };
        s.record("lambda_c", lambda_c);
        let mut cfg = AlgorithmConfig::ga(fitness, mu, chi, p_c, lambda_c, ctx.seed, u64::MAX);
        cfg.crossover = s.get("crossover", CrossoverChoice::Uniform)?.into();
        cfg
    } else {
        AlgorithmConfig::ea(fitness, mu, chi, ctx.seed, u64::MAX)
    };
    cfg.init = init;
    cfg.validate()?;
    let params = PlateauParams::new(n, k, mu, chi, cfg.p_c)?;
    let p = theory::p_ell_table(&params);
    let ga_bound = theory::alpha_delta(&params, &p);
    let tau0 = theory::tau0(eps, ga_bound.delta).ok();
    let violations: Vec<&str> = if algorithm == AlgorithmChoice::Ga {
        theory::check_preconditions(&params, eps, cfg.lambda_c).violations()
    } else {
        Vec::new()
    };
    if s.get("strict", false)? && !violations.is_empty() {
        return Err(CliError::Preconditions(
            violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    let default_burn_in = match (algorithm, tau0) {
        (AlgorithmChoice::Ga, Some(t)) => t,
        _ => 100_000,
    };
    let burn_in = s.get("burn_in", default_burn_in)?;
    let horizon = s.get("horizon", 1_000_000u64)?;
    let trials = s.get("trials", 1u64)?;
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    log_config(&s);
    warn_hypotheses(&violations);

    let reports = ctx.pooled(|| equilibrium_trials(&cfg, burn_in, horizon, eps, trials))?;
    write_rows(ctx.out.as_deref(), &reports)?;
    let time_avg = reports.iter().map(|r| r.time_avg_s).sum::<f64>() / reports.len() as f64;
    let event_trials = reports
        .iter()
        .filter(|r| r.fraction_above_threshold >= 0.25)
        .count();
    let mut checks = Vec::new();
    let results = if algorithm == AlgorithmChoice::Ea {
        let s0 = theory::equilibrium_s0(&params, &p);
        let relative_error = s0.map(|s0| (time_avg - s0).abs() / s0);
        if let Some(err) = relative_error {
            checks.push(("within_5_percent_of_s0", err <= 0.05));
        }
        json!({
            "time_avg_s": time_avg,
            "predicted_s0": s0,
            "relative_error": relative_error,
            "trials": reports,
        })
    } else {
        let bound = ga_bound.equilibrium();
        if bound > 0.0 {
            checks.push(("above_drift_bound_equilibrium", time_avg >= bound));
        }
        let target = 1.0 / 3.0;
        let allowance = 2.0 * (target * (1.0 - target) / trials as f64).sqrt();
        let event_rate = event_trials as f64 / trials as f64;
        checks.push(("diversity_event_rate", event_rate >= target - allowance));
        json!({
            "time_avg_s": time_avg,
            "alpha_over_delta": bound,
            "tau0": tau0,
            "hypotheses_hold": violations.is_empty(),
            "violated_hypotheses": violations,
            "event_trials": event_trials,
            "event_rate": event_rate,
            "event_rate_floor": target - allowance,
            "trials": reports,
        })
    };
    write_summary(
        ctx.summary.as_deref(),
        &summary("equilibrium", &s, results, checks),
    )
}

pub fn runtime(mut s: Settings) -> Result<(), CliError> {
    let ctx = RunContext::resolve(&mut s)?;
    let n = s.required::<usize>("n")?;
    let fitness = match s.get("fitness", FitnessChoice::Jump)? {
        FitnessChoice::Jump => FitnessSpec::Jump {
            n,
            k: s.required("k")?,
        },
        FitnessChoice::OneMax => FitnessSpec::OneMax { n },
        FitnessChoice::JumpOffset => FitnessSpec::JumpOffset {
            n,
            k: s.required("k")?,
            delta: s.required("delta")?,
        },
        FitnessChoice::Hurdle => FitnessSpec::Hurdle {
            n,
            w: s.required("w")?,
        },
        FitnessChoice::JumpPrime => {
            return Err(CliError::Config(
                "jump_prime has no reachable optimum; use the equilibrium command".into(),
            ))
        }
    };
    fitness.validate()?;
    let gap = fitness.gap();
    let algorithm = s.get("algorithm", AlgorithmChoice::Ea)?;
    let chi = s.get("chi", 1.0f64)?;
    let budget = s.get("budget", 100_000_000u64)?;
    let mut cfg = if algorithm == AlgorithmChoice::Ga {
        let choice = s.get("preset", PresetChoice::Manual)?;
        let (mu, p_c, lambda_c) = if choice == PresetChoice::Manual {
            let mu = s.required::<usize>("mu")?;
            let p_c = s.get("pc", 0.0f64)?;
            let lambda_c = match s.opt("lambda_c")? {
                Some(l) => l,
                None => crossover_lambda(gap.max(1), chi, mu.max(2), p_c)?,
            };
            s.record("lambda_c", lambda_c);
            (mu, p_c, lambda_c)
        } else {
            reject_when_derived(&s, choice, &["mu", "pc", "lambda_c"])?;
            let preset = derive_preset(&mut s, choice, n, gap, chi)?;
            eprintln!(
                "preset: eps = {}, pc = {}, mu = {}, lambda_c = {}",
                preset.eps, preset.p_c, preset.mu, preset.lambda_c
            );
            (preset.mu, preset.p_c, preset.lambda_c)
        };
        let mut cfg = AlgorithmConfig::ga(fitness, mu, chi, p_c, lambda_c, ctx.seed, budget);
        cfg.crossover = s.get("crossover", CrossoverChoice::Uniform)?.into();
        cfg
    } else {
        AlgorithmConfig::ea(fitness, s.required("mu")?, chi, ctx.seed, budget)
    };
    cfg.init = match s.get("init", InitChoice::Uniform)? {
        InitChoice::Uniform => InitPolicy::UniformRandom,
        InitChoice::PlateauRandom => InitPolicy::PlateauRandom,
        InitChoice::PlateauClone => InitPolicy::PlateauClone,
        InitChoice::BoundedZeros => InitPolicy::BoundedZeros {
            max_zeros: s.required("max_zeros")?,
        },
    };
    let repetitions = s.get("repetitions", 20u64)?;
    cfg.validate()?;
    log_config(&s);

    let (campaign, hurdle_start) = if matches!(fitness, FitnessSpec::Hurdle { .. }) {
        let report = ctx.pooled(|| hurdle_campaign(&cfg, repetitions))?;
        (report.campaign, Some(report.start_meets_hypothesis))
    } else {
        (ctx.pooled(|| runtime_campaign(&cfg, repetitions))?, None)
    };
    write_campaign(ctx.out.as_deref(), &campaign)?;

    let mut checks = vec![
        ("all_succeeded", campaign.successes == repetitions),
        (
            "evaluation_accounting",
            campaign
                .records
                .iter()
                .all(|r| evaluation_identity_holds(r, &cfg)),
        ),
    ];
    // A single plateau point jumps with a fixed chance per generation.
    let jump_waiting_time = match (fitness, algorithm, cfg.mu) {
        (FitnessSpec::Jump { n, k }, AlgorithmChoice::Ea, 1) => {
            let rate = chi / n as f64;
            let p = rate.powi(k as i32) * (1.0 - rate).powi((n - k) as i32);
            Some((1.0 / p, (1.0 - p).sqrt() / p))
        }
        _ => None,
    };
    if let (Some((mean, sd)), Some(post)) = (jump_waiting_time, campaign.post_plateau) {
        if campaign.successes == repetitions {
            let stderr = sd / (post.count as f64).sqrt();
            checks.push((
                "post_plateau_matches_waiting_time",
                within(post.mean, mean, stderr),
            ));
        }
    }
    let lower_bound = match fitness {
        FitnessSpec::Jump { n, k } if cfg.algorithm == Algorithm::Ga && cfg.p_c > 0.0 => {
            Some(theory::lower_bound_runtime(n, k, cfg.p_c, 1.0)?)
        }
        _ => None,
    };
    let results = json!({
        "mu": cfg.mu,
        "p_c": cfg.p_c,
        "lambda_c": cfg.lambda_c,
        "campaign": campaign,
        "hurdle_start_meets_hypothesis": hurdle_start,
        "expected_jump_waiting_time": jump_waiting_time.map(|(m, _)| m),
        "lower_bound_runtime_c1": lower_bound,
    });
    write_summary(
        ctx.summary.as_deref(),
        &summary("runtime", &s, results, checks),
    )
}

pub fn counterexample(mut s: Settings) -> Result<(), CliError> {
    let ctx = RunContext::resolve(&mut s)?;
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let mu = s.required::<usize>("mu")?;
    let chi = s.get("chi", 1.0f64)?;
    let p_c = s.get("pc", 0.01f64)?;
    let lambda_c = s.opt::<usize>("lambda_c")?;
    let samples = s.get("samples", 100_000u64)?;
    counterexample_population(n, k, mu)?;
    log_config(&s);

    let report =
        ctx.pooled(|| counterexample_drift(n, k, mu, chi, p_c, lambda_c, samples, ctx.seed))?;
    write_rows(
        ctx.out.as_deref(),
        &[
            DriftRow::new(1, &report.single, None),
            DriftRow::new(report.competing_lambda_c, &report.competing, None),
        ],
    )?;
    let mut checks = vec![(
        "diversity_exact",
        report.diversity == report.expected_diversity,
    )];
    if p_c > 0.0 {
        let single = &report.single;
        checks.push((
            "single_offspring_drift_negative",
            single.mean_change() + SIGMAS * single.stderr < 0.0,
        ));
        if let Some(ok) = report.competing.respects_lower_bound(SIGMAS) {
            checks.push(("competing_respects_lower_bound", ok));
        }
    } else {
        for (name, r) in [
            ("single_matches_prediction", &report.single),
            ("competing_matches_prediction", &report.competing),
        ] {
            if let Some(ok) = r.matches_prediction(SIGMAS) {
                checks.push((name, ok));
            }
        }
    }
    let results = json!({
        "diversity": report.diversity,
        "expected_diversity": report.expected_diversity,
        "single_change": report.single.mean_change(),
        "competing_change": report.competing.mean_change(),
        "report": report,
    });
    write_summary(
        ctx.summary.as_deref(),
        &summary("counterexample", &s, results, checks),
    )
}

#[derive(Debug, Serialize)]
struct OptHitRow {
    n: usize,
    k: usize,
    d: usize,
    chi: f64,
    samples: u64,
    hits: u64,
    rate: f64,
    stderr: f64,
    exact: Option<f64>,
    bound: f64,
}

#[derive(Debug, Serialize)]
struct OffsetRow {
    delta: usize,
    samples: u64,
    at_least_rate: f64,
    at_least_stderr: f64,
    full_sum: f64,
    exactly_rate: f64,
    exactly_stderr: f64,
    single_term: f64,
}

fn parent_pair(s: &mut Settings) -> Result<(BitString, BitString), CliError> {
    if let Some(path) = s.opt::<String>("parents_file")? {
        let pop = Population::load_fixture(Path::new(&path))?;
        if pop.size() != 2 {
            return Err(CliError::Config(format!(
                "{path} must hold exactly two parents, found {}",
                pop.size()
            )));
        }
        return Ok((pop.member(0).clone(), pop.member(1).clone()));
    }
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let d = s.get("d", k)?;
    if k == 0 || d > k || k + d > n {
        return Err(CliError::Config(format!(
            "need 1 <= k, d <= k and k + d <= n (n={n}, k={k}, d={d})"
        )));
    }
    let x1 = BitString::with_zeros_at(n, &(0..k).collect::<Vec<_>>())?;
    let x2 = BitString::with_zeros_at(n, &(d..d + k).collect::<Vec<_>>())?;
    Ok((x1, x2))
}

pub fn hitprob(mut s: Settings) -> Result<(), CliError> {
    let ctx = RunContext::resolve(&mut s)?;
    match s.get("mode", HitMode::Opt)? {
        HitMode::Opt => opt_hit(s, ctx),
        HitMode::Offset => offset_hit(s, ctx),
    }
}

fn opt_hit(mut s: Settings, ctx: RunContext) -> Result<(), CliError> {
    let (x1, x2) = parent_pair(&mut s)?;
    let (n, k) = (x1.len(), x1.count_zeros());
    let d = hamming(&x1, &x2)? / 2;
    let chi = s.get("chi", 1.0f64)?;
    let samples = s.get("samples", 1_000_000u64)?;
    log_config(&s);

    let mc = ctx.pooled(|| mc_opt_hit(&x1, &x2, chi, samples, ctx.seed))?;
    let exact = if 2 * d <= EXACT_HIT_SPREAD {
        Some(exact_opt_hit(&x1, &x2, chi)?)
    } else {
        None
    };
    let bound = theory::opt_hit_bound(n, k, d)?;
    let mut checks = Vec::new();
    if let Some(e) = exact {
        checks.push(("mc_matches_exact", mc.z_score(e) <= SIGMAS));
        checks.push(("exact_within_bound", e <= bound * (1.0 + 1e-12)));
    }
    write_rows(
        ctx.out.as_deref(),
        &[OptHitRow {
            n,
            k,
            d,
            chi,
            samples,
            hits: mc.hits,
            rate: mc.rate,
            stderr: mc.stderr,
            exact,
            bound,
        }],
    )?;
    let results = json!({
        "parents": [x1.to_string(), x2.to_string()],
        "d": d,
        "measured": mc,
        "exact": exact,
        "z": exact.map(|e| mc.z_score(e)),
        "bound": bound,
    });
    write_summary(
        ctx.summary.as_deref(),
        &summary("hitprob", &s, results, checks),
    )
}

fn offset_hit(mut s: Settings, ctx: RunContext) -> Result<(), CliError> {
    let n = s.required::<usize>("n")?;
    let k = s.required::<usize>("k")?;
    let deltas = s.get("deltas", List((1..=k).collect::<Vec<usize>>()))?.0;
    let samples = s.get("samples", 1_000_000u64)?;
    log_config(&s);

    let estimates = ctx.pooled(|| mc_jump_offset(n, k, &deltas, samples, ctx.seed))?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for e in &estimates {
        let exact = theory::jump_offset_success(k, e.delta)?;
        checks.push(e.at_least.z_score(exact.full_sum) <= SIGMAS);
        checks.push(e.exactly.z_score(exact.single_term) <= SIGMAS);
        rows.push(OffsetRow {
            delta: e.delta,
            samples,
            at_least_rate: e.at_least.rate,
            at_least_stderr: e.at_least.stderr,
            full_sum: exact.full_sum,
            exactly_rate: e.exactly.rate,
            exactly_stderr: e.exactly.stderr,
            single_term: exact.single_term,
        });
        results.push(json!({
            "delta": e.delta,
            "measured": e,
            "predicted": exact,
            "z_at_least": e.at_least.z_score(exact.full_sum),
            "z_exactly": e.exactly.z_score(exact.single_term),
        }));
    }
    write_rows(ctx.out.as_deref(), &rows)?;
    let checks = vec![("mc_matches_formula", checks.iter().all(|ok| *ok))];
    write_summary(
        ctx.summary.as_deref(),
        &summary("hitprob", &s, Value::Array(results), checks),
    )
}
