use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gtkit::formats::{matrix_to_string, read_matrix, read_vector, vector_to_string, write_text};
use gtkit::{run_experiment, DefectiveCount, ExperimentConfig, NoiseConfig, OutputPaths, RunOptions, TestCount};
use gtkit_core::bounds::{gamma_params, lower_bound, upper_bound, BoundAlgo, BoundQuery, BoundResult, LogBase};
use gtkit_core::decode::{
    decode_coco, decode_coma, decode_lipo, decode_nocoma, decode_nolipo, decode_nolipo_minus, decode_nolipo_plus,
    decode_nounlipo, LpDecodeOutput,
};
use gtkit_core::noise::NoiseModel;
use gtkit_core::trial::{draw_trial, Algorithm};

#[derive(Parser)]
#[command(name = "gtkit", version, about = "Noisy non-adaptive group testing: simulate, decode, and size designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one trial's matrix, outcomes and defective set.
    Generate(GenerateArgs),
    /// Decode an outcome vector against a matrix file.
    Decode(DecodeArgs),
    /// Run a Monte Carlo experiment and write trial and summary CSVs.
    Simulate(SimulateArgs),
    /// Evaluate closed-form test counts.
    Bounds(BoundsArgs),
}

#[derive(Args, Clone, Default)]
struct NoiseArgs {
    /// noiseless, bsc, asym or activation
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    q1: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
}

impl NoiseArgs {
    fn is_set(&self) -> bool {
        self.noise.is_some() || self.q.is_some() || self.q0.is_some() || self.q1.is_some() || self.u.is_some()
    }

    fn to_config(&self) -> NoiseConfig {
        let kind = self.noise.clone().unwrap_or_else(|| {
            if self.u.is_some() {
                "activation"
            } else if self.q0.is_some() || self.q1.is_some() {
                "asym"
            } else if self.q.is_some() {
                "bsc"
            } else {
                "noiseless"
            }
            .to_string()
        });
        NoiseConfig {
            kind,
            q: self.q,
            q0: self.q0,
            q1: self.q1,
            u: self.u,
        }
    }

    fn to_model(&self) -> Result<NoiseModel> {
        Ok(self.to_config().to_model()?)
    }
}

/// A JSON config file, individual flags, or a file with flag overrides.
#[derive(Args, Clone)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "D")]
    max_defectives: Option<usize>,
    /// Integer or "random".
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    algo: Option<String>,
    /// Integer or "auto".
    #[arg(long = "T")]
    tests: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tau: Option<f64>,
    #[command(flatten)]
    noise: NoiseArgs,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig {
                n: self.n.context("--n is required without --config")?,
                max_defectives: self.max_defectives.context("--D is required without --config")?,
                d: None,
                delta: 1.0,
                noise: NoiseConfig::default(),
                algo: self.algo.clone().context("--algo is required without --config")?,
                tests: TestCount::Auto,
                trials: 2000,
                seed: 0,
                tau: None,
                defectives: None,
            },
        };
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.max_defectives {
            c.max_defectives = v;
        }
        if let Some(v) = &self.d {
            c.d = Some(match v.as_str() {
                "random" => DefectiveCount::Random,
                s => DefectiveCount::Exact(s.parse().context("--d must be an integer or \"random\"")?),
            });
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = &self.algo {
            c.algo = v.clone();
        }
        if let Some(v) = &self.tests {
            c.tests = match v.as_str() {
                "auto" => TestCount::Auto,
                s => TestCount::Exact(s.parse().context("--T must be an integer or \"auto\"")?),
            };
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.tau.is_some() {
            c.tau = self.tau;
        }
        if self.noise.is_set() {
            c.noise = self.noise.to_config();
        }
        Ok(c)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Trial index whose draw to emit.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Matrix file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    outcomes: Option<PathBuf>,
    /// Defective indicator vector.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    outcomes: PathBuf,
    /// coco, coma, nocoma, lipo, nolipo, nolipo+, nolipo-, nounlipo
    #[arg(long)]
    algo: String,
    /// Exact defective count for the LP decoders.
    #[arg(long)]
    d: Option<usize>,
    /// Defective cap for nounlipo.
    #[arg(long = "D")]
    max_defectives: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long)]
    tau: Option<f64>,
    /// Error exponent used for the default tau.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Write per-test slack values here (LP decoders).
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Trial CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    max_defectives: usize,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// A bound tag, or "all" for every tag valid under the noise model.
    #[arg(long, default_value = "all")]
    algo: String,
    /// Defective count for the activation term.
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Report coco with the column-matching constant β*.
    #[arg(long)]
    as_stated: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let config = a.config.resolve()?;
    let trial = config.to_trial_config()?;
    let data = draw_trial(&trial, a.trial)?;
    let text = matrix_to_string(&data.matrix);
    match &a.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.outcomes {
        write_text(path, &(vector_to_string(&data.outcomes) + "\n"))?;
    }
    if let Some(path) = &a.truth {
        write_text(path, &(vector_to_string(&data.instance.indicator()) + "\n"))?;
    }
    Ok(())
}

fn decode(a: DecodeArgs) -> Result<()> {
    let m = read_matrix(&a.matrix)?;
    let y = read_vector(&a.outcomes)?;
    let algo = Algorithm::from_name(&a.algo).with_context(|| format!("unknown algo {:?}", a.algo))?;
    let need_d = || a.d.context("--d is required for this decoder");
    let tau = |cap: usize| -> Result<f64> {
        if let Some(t) = a.tau {
            return Ok(t);
        }
        if a.q == 0.0 {
            return Ok(0.0);
        }
        let (_, gamma) = gamma_params(m.cols(), cap, a.delta)?;
        Ok(gtkit_core::bounds::tau_star(a.q, gamma)?)
    };
    let (estimate, lp): (Option<_>, Option<LpDecodeOutput>) = match algo {
        Algorithm::Coco => (Some(decode_coco(&m, &y)?.estimate), None),
        Algorithm::Coma => (Some(decode_coma(&m, &y)?.estimate), None),
        Algorithm::Nocoma => {
            let cap = a.max_defectives.or(a.d).context("--D (or --d) sets the default tau for nocoma")?;
            (Some(decode_nocoma(&m, &y, a.q, tau(cap)?)?.estimate), None)
        }
        Algorithm::Lipo => wrap(decode_lipo(&m, &y, need_d()?)?),
        Algorithm::Nolipo => wrap(Some(decode_nolipo(&m, &y, need_d()?)?)),
        Algorithm::NolipoPlus => wrap(Some(decode_nolipo_plus(&m, &y, need_d()?)?)),
        Algorithm::NolipoMinus => wrap(Some(decode_nolipo_minus(&m, &y, need_d()?)?)),
        Algorithm::Nounlipo => {
            let cap = a.max_defectives.context("--D is required for nounlipo")?;
            wrap(decode_nounlipo(&m, &y, cap, a.q, tau(cap)?)?)
        }
    };
    if let (Some(path), Some(out)) = (&a.eta, &lp) {
        let mut text = String::from("test,eta\n");
        for (i, e) in out.eta.iter().enumerate() {
            text.push_str(&format!("{i},{e}\n"));
        }
        write_text(path, &text)?;
    }
    let est = estimate.as_ref().map(vector_to_string);
    if a.json {
        let v = json!({
            "algo": algo.name(),
            "failed": est.is_none(),
            "estimate": est,
            "objective": lp.as_ref().map(|o| o.objective_value),
            "integral": lp.as_ref().map(|o| o.integral),
            "assumed_defectives": lp.as_ref().map(|o| o.assumed_defectives),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(());
    }
    match est {
        Some(e) => println!("estimate {e}"),
        None => println!("decode failure"),
    }
    if let Some(o) = &lp {
        println!("objective {}", o.objective_value);
        println!("integral {}", o.integral);
        println!("assumed_defectives {}", o.assumed_defectives);
    }
    Ok(())
}

fn wrap(out: Option<LpDecodeOutput>) -> (Option<gtkit_core::bits::BitVec>, Option<LpDecodeOutput>) {
    match out {
        Some(o) => (Some(o.estimate.clone()), Some(o)),
        None => (None, None),
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let config = a.config.resolve()?;
    let out = OutputPaths {
        trials: a.out.clone(),
        summary: a.summary.clone(),
    };
    let options = RunOptions {
        parallel: !a.serial,
        ..RunOptions::default()
    };
    let (_, s) = run_experiment(&config, options, &out)?;
    println!(
        "{} {} n={} D={} d={} T={} (theory {}) trials={} errors={} rate={:.5} wilson95=[{:.5}, {:.5}] eps={:.5}",
        s.algo,
        s.noise,
        s.n,
        s.max_defectives,
        s.d,
        s.tests,
        s.tests_theory.map_or("-".to_string(), |t| t.to_string()),
        s.trials,
        s.errors,
        s.err_rate,
        s.wilson_lo,
        s.wilson_hi,
        s.eps_target
    );
    Ok(())
}

fn bound_json(algo: BoundAlgo, r: &BoundResult) -> serde_json::Value {
    json!({
        "algo": algo.name(),
        "T": r.tests,
        "T_ceil": r.tests.ceil() as u64,
        "beta": r.beta,
        "log": match r.log_base { LogBase::Two => "log2", LogBase::Natural => "ln" },
        "Gamma": r.big_gamma,
        "gamma": r.gamma,
        "tau_star": r.tau_star,
        "w": r.w,
    })
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let noise = a.noise.to_model()?;
    let tags: Vec<BoundAlgo> = if a.algo == "all" {
        BoundAlgo::ALL
            .into_iter()
            .filter(|t| *t != BoundAlgo::CocoAsStated || a.as_stated)
            .filter(|t| *t != BoundAlgo::Coco || !a.as_stated)
            .collect()
    } else {
        let tag = BoundAlgo::from_name(&a.algo).with_context(|| format!("unknown bound tag {:?}", a.algo))?;
        vec![if a.as_stated && tag == BoundAlgo::Coco { BoundAlgo::CocoAsStated } else { tag }]
    };
    let mut rows = Vec::new();
    for tag in tags {
        let result = match tag {
            BoundAlgo::LowerNoisy => noise
                .symmetric_q()
                .context("lower_noisy needs noiseless or BSC noise")
                .and_then(|q| Ok(lower_bound(a.n, a.max_defectives, a.delta, q)?)),
            _ => {
                let mut query = BoundQuery::new(a.n, a.max_defectives, a.delta, noise, tag);
                query.d = a.d;
                upper_bound(&query).map_err(Into::into)
            }
        };
        match result {
            Ok(r) => rows.push((tag, r)),
            Err(e) if a.algo != "all" => return Err(e),
            Err(_) => {}
        }
    }
    if rows.is_empty() {
        bail!("no bound applies to {noise}");
    }
    if a.json {
        let v: Vec<_> = rows.iter().map(|(t, r)| bound_json(*t, r)).collect();
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{:<16} {:>14} {:>8} {:>14} {:>5}", "algo", "T", "ceil", "beta", "log");
        for (t, r) in &rows {
            let base = match r.log_base {
                LogBase::Two => "log2",
                LogBase::Natural => "ln",
            };
            println!("{:<16} {:>14.6} {:>8} {:>14.6} {:>5}", t.name(), r.tests, r.tests.ceil(), r.beta, base);
        }
    }
    Ok(())
}
