//! One Monte Carlo trial: draw a defective set, pool, corrupt, decode, score.
//!
//! Every random stage takes its own seed split from the trial seed, so a
//! trial is a pure function of `(config, trial index)`.

use alloc::format;
use alloc::string::String;

use crate::bits::BitVec;
use crate::bounds::{gamma_params, tau_star, upper_bound, BoundAlgo, BoundQuery};
use crate::decode::{
    decode_coco, decode_coma, decode_lipo, decode_nocoma, decode_nolipo, decode_nolipo_minus,
    decode_nolipo_plus, decode_nounlipo,
};
use crate::error::{param, Error, Result};
use crate::model::{
    coco_group_size, design_probability, gen_bernoulli_matrix, gen_coco_matrix, noiseless_outcomes,
    ProblemInstance, TestMatrix,
};
use crate::noise::{apply_activation, apply_noise, NoiseModel};
use crate::rng::{derive_seed, GtRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Coco,
    Coma,
    Nocoma,
    Lipo,
    Nolipo,
    NolipoPlus,
    NolipoMinus,
    Nounlipo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Coco,
        Algorithm::Coma,
        Algorithm::Nocoma,
        Algorithm::Lipo,
        Algorithm::Nolipo,
        Algorithm::NolipoPlus,
        Algorithm::NolipoMinus,
        Algorithm::Nounlipo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Coco => "coco",
            Algorithm::Coma => "coma",
            Algorithm::Nocoma => "nocoma",
            Algorithm::Lipo => "lipo",
            Algorithm::Nolipo => "nolipo",
            Algorithm::NolipoPlus => "nolipo+",
            Algorithm::NolipoMinus => "nolipo-",
            Algorithm::Nounlipo => "nounlipo",
        }
    }

    /// Accepts the canonical names plus `nolipo_plus` / `nolipo_minus`.
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "nolipo_plus" => Some(Algorithm::NolipoPlus),
            "nolipo_minus" => Some(Algorithm::NolipoMinus),
            _ => Algorithm::ALL.into_iter().find(|a| a.name() == s),
        }
    }

    pub fn is_lp(self) -> bool {
        matches!(
            self,
            Algorithm::Lipo
                | Algorithm::Nolipo
                | Algorithm::NolipoPlus
                | Algorithm::NolipoMinus
                | Algorithm::Nounlipo
        )
    }

    /// The bound that sizes `T` for this decoder under `noise`.
    pub fn bound_algo(self, noise: &NoiseModel) -> BoundAlgo {
        match self {
            Algorithm::Coco => BoundAlgo::Coco,
            Algorithm::Coma => BoundAlgo::Coma,
            Algorithm::Nocoma => BoundAlgo::Nocoma,
            Algorithm::Lipo => BoundAlgo::Lipo,
            Algorithm::Nolipo => match noise {
                NoiseModel::Asymmetric { .. } => BoundAlgo::NolipoAsym,
                NoiseModel::Activation { .. } => BoundAlgo::NolipoAct,
                _ => BoundAlgo::Nolipo,
            },
            Algorithm::NolipoPlus | Algorithm::NolipoMinus => BoundAlgo::NolipoPm,
            Algorithm::Nounlipo => BoundAlgo::Nounlipo,
        }
    }
}

/// How the hidden set is chosen per trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectiveSpec {
    /// Uniform over all subsets of this size.
    Count(usize),
    /// Size uniform on `1..=D`, then a uniform subset of that size.
    Random,
    /// The same set in every trial.
    Fixed(alloc::vec::Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub max_defectives: usize,
    pub defectives: DefectiveSpec,
    pub delta: f64,
    pub noise: NoiseModel,
    pub algo: Algorithm,
    pub tests: usize,
    /// Column-matching slack; `τ*` when unset.
    pub tau: Option<f64>,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(param("n must be positive"));
        }
        if self.max_defectives > self.n {
            return Err(param(format!("D = {} exceeds n = {}", self.max_defectives, self.n)));
        }
        if self.tests < 1 {
            return Err(param("T must be at least 1"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(param(format!("delta = {} must be positive", self.delta)));
        }
        match &self.defectives {
            DefectiveSpec::Count(d) if *d > self.max_defectives => {
                return Err(param(format!("d = {d} exceeds D = {}", self.max_defectives)))
            }
            DefectiveSpec::Random if self.max_defectives < 1 => {
                return Err(param("random d needs D >= 1"))
            }
            DefectiveSpec::Fixed(set) => {
                let inst = ProblemInstance::new(self.n, set.iter().copied())?;
                if inst.d() > self.max_defectives {
                    return Err(param(format!("fixed set has {} > D items", inst.d())));
                }
            }
            _ => {}
        }
        self.noise.validate()?;
        if let NoiseModel::Activation { .. } = self.noise {
            self.noise.validate_for(self.max_defectives)?;
        }
        match self.algo {
            Algorithm::Coco => {
                coco_group_size(self.n, self.max_defectives)?;
            }
            Algorithm::Nocoma | Algorithm::Nounlipo => {
                let q = self.noise.symmetric_q().ok_or_else(|| {
                    param(format!("{} needs noiseless or BSC noise", self.algo.name()))
                })?;
                if self.algo == Algorithm::Nocoma && q == 0.0 {
                    return Err(Error::Usage(
                        "nocoma at q = 0 is coma; choose coma".into(),
                    ));
                }
                self.resolved_tau()?;
            }
            _ => {}
        }
        Ok(())
    }

    /// `tau` if given, else `τ*` (zero when `q = 0`).
    pub fn resolved_tau(&self) -> Result<f64> {
        if let Some(t) = self.tau {
            return Ok(t);
        }
        let q = self.noise.symmetric_q().unwrap_or(0.0);
        if q == 0.0 {
            return Ok(0.0);
        }
        let (_, gamma) = gamma_params(self.n, self.max_defectives, self.delta)?;
        tau_star(q, gamma)
    }

    /// Target error probability `n^{-δ}`.
    pub fn eps_target(&self) -> f64 {
        libm::pow(self.n as f64, -self.delta)
    }
}

/// `⌈T⌉` from the decoder's bound.
pub fn theory_tests(
    n: usize,
    max_defectives: usize,
    delta: f64,
    noise: &NoiseModel,
    algo: Algorithm,
) -> Result<usize> {
    let query = BoundQuery::new(n, max_defectives, delta, *noise, algo.bound_algo(noise));
    let t = upper_bound(&query)?.tests;
    Ok(libm::ceil(t) as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub tests: usize,
    pub algo: Algorithm,
    /// Estimate equals the truth and the decoder did not fail.
    pub exact: bool,
    /// Non-defectives placed in the estimate.
    pub false_def: usize,
    /// Defectives missing from the estimate.
    pub false_nondef: usize,
    pub fail: bool,
    /// LP decoders only.
    pub integral: Option<bool>,
    /// Wall time in milliseconds; filled in by the caller.
    pub ms: f64,
}

impl TrialRecord {
    pub fn is_error(&self) -> bool {
        !self.exact
    }
}

/// Everything a trial draws, for inspection and tests.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub instance: ProblemInstance,
    pub matrix: TestMatrix,
    pub outcomes: BitVec,
}

const STREAM_SET: u64 = 0;
const STREAM_SIZE: u64 = 1;
const STREAM_MATRIX: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Draws instance, matrix and noisy outcomes for trial `index`.
pub fn draw_trial(config: &TrialConfig, index: u64) -> Result<TrialData> {
    let seed = derive_seed(config.seed, index);
    let instance = match &config.defectives {
        DefectiveSpec::Fixed(set) => ProblemInstance::new(config.n, set.iter().copied())?,
        DefectiveSpec::Count(d) => {
            ProblemInstance::random(config.n, *d, derive_seed(seed, STREAM_SET))?
        }
        DefectiveSpec::Random => {
            let d = 1 + GtRng::new(derive_seed(seed, STREAM_SIZE)).below(config.max_defectives);
            ProblemInstance::random(config.n, d, derive_seed(seed, STREAM_SET))?
        }
    };
    let matrix_seed = derive_seed(seed, STREAM_MATRIX);
    let matrix = match config.algo {
        Algorithm::Coco => {
            let g = coco_group_size(config.n, config.max_defectives)?;
            gen_coco_matrix(config.tests, config.n, g, matrix_seed)?
        }
        _ => gen_bernoulli_matrix(
            config.tests,
            config.n,
            design_probability(config.max_defectives),
            matrix_seed,
        )?,
    };
    let noise_seed = derive_seed(seed, STREAM_NOISE);
    let outcomes = match config.noise {
        NoiseModel::Activation { u, q0 } => apply_activation(&matrix, &instance, u, q0, noise_seed)?.0,
        _ => apply_noise(&noiseless_outcomes(&matrix, &instance)?, &config.noise, noise_seed)?.0,
    };
    Ok(TrialData {
        instance,
        matrix,
        outcomes,
    })
}

/// Runs trial `index`. Decoder failures and solver breakdowns are recorded
/// in the result; configuration errors are returned.
pub fn run_trial(config: &TrialConfig, index: u64) -> Result<TrialRecord> {
    let data = draw_trial(config, index)?;
    let TrialData {
        instance,
        matrix: m,
        outcomes: y,
    } = &data;
    let d = instance.d();
    let q = config.noise.symmetric_q().unwrap_or(0.0);

    let decoded: Result<Option<(BitVec, Option<bool>)>> = match config.algo {
        Algorithm::Coco => decode_coco(m, y).map(|o| Some((o.estimate, None))),
        Algorithm::Coma => decode_coma(m, y).map(|o| Some((o.estimate, None))),
        Algorithm::Nocoma => {
            decode_nocoma(m, y, q, config.resolved_tau()?).map(|o| Some((o.estimate, None)))
        }
        Algorithm::Lipo => {
            decode_lipo(m, y, d).map(|o| o.map(|o| (o.estimate, Some(o.integral))))
        }
        Algorithm::Nolipo => decode_nolipo(m, y, d).map(|o| Some((o.estimate, Some(o.integral)))),
        Algorithm::NolipoPlus => {
            decode_nolipo_plus(m, y, d).map(|o| Some((o.estimate, Some(o.integral))))
        }
        Algorithm::NolipoMinus => {
            decode_nolipo_minus(m, y, d).map(|o| Some((o.estimate, Some(o.integral))))
        }
        Algorithm::Nounlipo => {
            decode_nounlipo(m, y, config.max_defectives, q, config.resolved_tau()?)
                .map(|o| o.map(|o| (o.estimate, Some(o.integral))))
        }
    };
    let decoded = match decoded {
        Ok(v) => v,
        Err(Error::Solver(_)) => None,
        Err(e) => return Err(e),
    };

    let mut record = TrialRecord {
        trial: index,
        seed: derive_seed(config.seed, index),
        tests: config.tests,
        algo: config.algo,
        exact: false,
        false_def: 0,
        false_nondef: 0,
        fail: true,
        integral: None,
        ms: 0.0,
    };
    if config.algo.is_lp() {
        record.integral = Some(false);
    }
    if let Some((estimate, integral)) = decoded {
        let truth = instance.indicator();
        record.false_def = estimate.iter_ones().filter(|&j| !truth.get(j)).count();
        record.false_nondef = truth.iter_ones().filter(|&j| !estimate.get(j)).count();
        record.fail = false;
        record.exact = record.false_def == 0 && record.false_nondef == 0;
        record.integral = integral;
    }
    Ok(record)
}

/// Two-sided normal quantile used for 95% intervals.
pub const Z_95: f64 = 1.959964;

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Short human label, e.g. `coma/noiseless`.
pub fn label(config: &TrialConfig) -> String {
    format!("{}/{}", config.algo.name(), config.noise.kind())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn config(algo: Algorithm, n: usize, d: usize, tests: usize, noise: NoiseModel) -> TrialConfig {
        TrialConfig {
            n,
            max_defectives: d.max(1),
            defectives: DefectiveSpec::Count(d),
            delta: 1.0,
            noise,
            algo,
            tests,
            tau: None,
            seed: 7,
        }
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_name(a.name()), Some(a));
        }
        assert_eq!(Algorithm::from_name("nolipo_plus"), Some(Algorithm::NolipoPlus));
        assert_eq!(Algorithm::from_name("bogus"), None);
    }

    #[test]
    fn wilson_zero_errors() {
        let (lo, hi) = wilson_interval(0, 1000, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.003827).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coma_single_item_empty_set() {
        // n = 1, d = 0: the item is wrongly declared defective exactly when
        // its column is all zero.
        let tests = 3;
        let mut cfg = config(Algorithm::Coma, 1, 0, tests, NoiseModel::Noiseless);
        cfg.max_defectives = 1;
        let trials = 4000;
        let ok = (0..trials)
            .filter(|&i| run_trial(&cfg, i).unwrap().exact)
            .count() as f64;
        let expect = 1.0 - 0.125;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((ok / trials as f64 - expect).abs() < 4.0 * sigma);
    }

    #[test]
    fn lp_failure_is_recorded() {
        // Heavy noise with LiPo almost surely makes the program infeasible.
        let cfg = config(Algorithm::Lipo, 30, 3, 60, NoiseModel::Bsc { q: 0.3 });
        let fails = (0..20).filter(|&i| run_trial(&cfg, i).unwrap().fail).count();
        assert!(fails > 0);
        for i in 0..20 {
            let r = run_trial(&cfg, i).unwrap();
            assert!(!(r.fail && r.exact));
        }
    }

    #[test]
    fn config_errors_surface() {
        let cfg = config(Algorithm::Nocoma, 20, 2, 10, NoiseModel::Noiseless);
        assert!(matches!(run_trial(&cfg, 0).unwrap_err(), Error::Usage(_)) || cfg.validate().is_err());
        assert!(config(Algorithm::Coma, 10, 11, 5, NoiseModel::Noiseless).validate().is_err());
        let asym = NoiseModel::Asymmetric { q0: 0.1, q1: 0.2 };
        assert!(config(Algorithm::Nounlipo, 10, 2, 5, asym).validate().is_err());
    }

    #[test]
    fn random_size_covers_range() {
        let mut cfg = config(Algorithm::Coma, 40, 4, 10, NoiseModel::Noiseless);
        cfg.defectives = DefectiveSpec::Random;
        let mut seen = vec![false; 5];
        for i in 0..200 {
            seen[draw_trial(&cfg, i).unwrap().instance.d()] = true;
        }
        assert_eq!(seen, vec![false, true, true, true, true]);
    }

    #[test]
    fn theory_matches_bounds() {
        let t = theory_tests(500, 8, 1.0, &NoiseModel::Noiseless, Algorithm::Coma).unwrap();
        assert_eq!(t, 271);
    }

    #[test]
    fn fixed_set_mode() {
        let mut cfg = config(Algorithm::Coma, 30, 3, 40, NoiseModel::Noiseless);
        cfg.defectives = DefectiveSpec::Fixed(vec![2, 5, 9]);
        for i in 0..5 {
            assert_eq!(draw_trial(&cfg, i).unwrap().instance.defectives(), &[2, 5, 9]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deterministic_and_consistent(
            algo_idx in 0usize..8,
            n in 5usize..30,
            d in 1usize..4,
            tests in 5usize..40,
            seed in any::<u64>(),
            index in 0u64..1000,
        ) {
            let algo = Algorithm::ALL[algo_idx];
            let noise = match algo {
                Algorithm::Nocoma | Algorithm::Nounlipo => NoiseModel::Bsc { q: 0.05 },
                _ => NoiseModel::Noiseless,
            };
            let mut cfg = config(algo, n, d, tests, noise);
            cfg.seed = seed;
            let a = run_trial(&cfg, index).unwrap();
            let b = run_trial(&cfg, index).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.exact, a.false_def == 0 && a.false_nondef == 0 && !a.fail);
            prop_assert_eq!(a.integral.is_some(), algo.is_lp());
        }

        #[test]
        fn coma_never_misses(n in 5usize..60, d in 0usize..5, tests in 1usize..80, seed in any::<u64>()) {
            let mut cfg = config(Algorithm::Coma, n, d.min(n), tests, NoiseModel::Noiseless);
            cfg.seed = seed;
            for i in 0..4 {
                prop_assert_eq!(run_trial(&cfg, i).unwrap().false_nondef, 0);
            }
        }

        // More rows with the same seed extend the same matrix, so CoMa's
        // false positives can only shrink.
        #[test]
        fn coma_errors_shrink_with_tests(n in 5usize..60, d in 1usize..5, tests in 1usize..60, extra in 0usize..60, seed in any::<u64>()) {
            let mut cfg = config(Algorithm::Coma, n, d.min(n - 1), tests, NoiseModel::Noiseless);
            cfg.seed = seed;
            let small: Vec<_> = (0..4).map(|i| run_trial(&cfg, i).unwrap().false_def).collect();
            cfg.tests += extra;
            let big: Vec<_> = (0..4).map(|i| run_trial(&cfg, i).unwrap().false_def).collect();
            for (s, b) in small.iter().zip(&big) {
                prop_assert!(b <= s);
            }
        }
    }
}
