//! Closed-form test counts: information-theoretic lower bounds and the
//! sufficient counts for each decoder.
//!
//! Logarithms are kept distinct: `log2` where a bound is stated as
//! `β·D·log n`, natural log for the coupon-collector and column-matching
//! counts stated as `...·ln n`.

use alloc::format;

use crate::error::{param, Error, Result};
use crate::noise::NoiseModel;

use core::f64::consts::{E, LN_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundAlgo {
    LowerNoiseless,
    LowerNoisy,
    /// Coupon collector, `2e(1+δ)D ln n`.
    Coco,
    /// Coupon collector sized with the column-matching constant `β*`
    /// (noise terms included) and `log2`.
    CocoAsStated,
    Coma,
    Nocoma,
    Nolipo,
    NolipoAsym,
    NolipoAct,
    Lipo,
    /// Both one-sided variants share one constant.
    NolipoPm,
    Nounlipo,
}

impl BoundAlgo {
    pub const ALL: [BoundAlgo; 12] = [
        BoundAlgo::LowerNoiseless,
        BoundAlgo::LowerNoisy,
        BoundAlgo::Coco,
        BoundAlgo::CocoAsStated,
        BoundAlgo::Coma,
        BoundAlgo::Nocoma,
        BoundAlgo::Nolipo,
        BoundAlgo::NolipoAsym,
        BoundAlgo::NolipoAct,
        BoundAlgo::Lipo,
        BoundAlgo::NolipoPm,
        BoundAlgo::Nounlipo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundAlgo::LowerNoiseless => "lower_noiseless",
            BoundAlgo::LowerNoisy => "lower_noisy",
            BoundAlgo::Coco => "coco",
            BoundAlgo::CocoAsStated => "coco_as_stated",
            BoundAlgo::Coma => "coma",
            BoundAlgo::Nocoma => "nocoma",
            BoundAlgo::Nolipo => "nolipo",
            BoundAlgo::NolipoAsym => "nolipo_asym",
            BoundAlgo::NolipoAct => "nolipo_act",
            BoundAlgo::Lipo => "lipo",
            BoundAlgo::NolipoPm => "nolipo_pm",
            BoundAlgo::Nounlipo => "nounlipo",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        BoundAlgo::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub n: usize,
    pub max_defectives: usize,
    pub delta: f64,
    pub noise: NoiseModel,
    pub algo: BoundAlgo,
    /// Defective count for the activation term `u^d`; `D` when unset.
    pub d: Option<usize>,
}

impl BoundQuery {
    pub fn new(n: usize, max_defectives: usize, delta: f64, noise: NoiseModel, algo: BoundAlgo) -> Self {
        BoundQuery {
            n,
            max_defectives,
            delta,
            noise,
            algo,
            d: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Two,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// Real-valued test count; callers take the ceiling.
    pub tests: f64,
    /// `tests = beta · D · log(n)` in `log_base`.
    pub beta: f64,
    pub log_base: LogBase,
    /// `ln D / ln n`.
    pub big_gamma: f64,
    pub gamma: f64,
    pub tau_star: Option<f64>,
    pub w: Option<f64>,
}

/// `(Γ, γ) = (ln D / ln n, (Γ + δ)/(1 + δ))`.
pub fn gamma_params(n: usize, max_defectives: usize, delta: f64) -> Result<(f64, f64)> {
    if max_defectives < 1 || max_defectives >= n {
        return Err(param(format!(
            "bounds need 1 <= D < n (D = {max_defectives}, n = {n})"
        )));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(param(format!("delta = {delta} must be positive")));
    }
    let big_gamma = libm::log(max_defectives as f64) / libm::log(n as f64);
    Ok((big_gamma, (big_gamma + delta) / (1.0 + delta)))
}

/// Column-matching threshold slack `(1 - 2q) / (4q (1 + γ^{-1/2}))`.
pub fn tau_star(q: f64, gamma: f64) -> Result<f64> {
    if q == 0.0 {
        return Err(Error::Usage(
            "tau* is undefined at q = 0; use exact column matching".into(),
        ));
    }
    if !(q > 0.0 && q < 0.5) {
        return Err(param(format!("q = {q} outside (0, 1/2)")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(param(format!("gamma = {gamma} outside (0, 1]")));
    }
    Ok((1.0 - 2.0 * q) / (4.0 * q * (1.0 + 1.0 / libm::sqrt(gamma))))
}

/// Binary entropy in bits.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * libm::log2(q) - (1.0 - q) * libm::log2(1.0 - q)
}

fn log2n(n: usize) -> f64 {
    libm::log2(n as f64)
}

/// `(1 - n^{-δ})(1 - Γ) D log2 n / (1 - H(q))`.
pub fn lower_bound(n: usize, max_defectives: usize, delta: f64, q: f64) -> Result<BoundResult> {
    let (big_gamma, gamma) = gamma_params(n, max_defectives, delta)?;
    if !(0.0..0.5).contains(&q) {
        return Err(param(format!("q = {q} outside [0, 1/2)")));
    }
    let beta = (1.0 - libm::pow(n as f64, -delta)) * (1.0 - big_gamma) / (1.0 - binary_entropy(q));
    Ok(BoundResult {
        tests: beta * max_defectives as f64 * log2n(n),
        beta,
        log_base: LogBase::Two,
        big_gamma,
        gamma,
        tau_star: None,
        w: None,
    })
}

/// `β* = 16(1+√γ)²(1+δ) ln2 / ((1 - e^{-2})(1 - 2q)²)`.
fn beta_star(gamma: f64, big_gamma: f64, delta: f64, q: f64) -> f64 {
    let denom = (1.0 - libm::exp(-2.0)) * (1.0 - 2.0 * q) * (1.0 - 2.0 * q);
    let sg = libm::sqrt(gamma);
    let beta = 16.0 * (1.0 + sg) * (1.0 + sg) * (1.0 + delta) * LN_2 / denom;
    // Same constant written through Γ: (1 + γ^{-1/2})² (Γ + δ).
    let alt = 16.0 * (1.0 + 1.0 / sg) * (1.0 + 1.0 / sg) * (big_gamma + delta) * LN_2 / denom;
    debug_assert!((beta - alt).abs() <= 1e-9 * beta);
    beta
}

fn lp_beta(big_gamma: f64, delta: f64, margin: f64, d_cap: f64) -> (f64, f64) {
    let w = 1.0 + 2.0 * margin / d_cap;
    let beta = (delta + 1.0 + big_gamma) * LN_2 * E * E * w * (w + margin / 3.0) / (margin * margin);
    (beta, w)
}

fn symmetric_q(noise: &NoiseModel, algo: BoundAlgo) -> Result<f64> {
    noise.validate()?;
    noise.symmetric_q().ok_or_else(|| {
        param(format!(
            "bound '{}' needs noiseless or BSC noise, got {noise}",
            algo.name()
        ))
    })
}

fn noiseless_only(noise: &NoiseModel, algo: BoundAlgo) -> Result<()> {
    if symmetric_q(noise, algo)? != 0.0 {
        return Err(param(format!(
            "bound '{}' applies to noiseless outcomes only",
            algo.name()
        )));
    }
    Ok(())
}

pub fn upper_bound(query: &BoundQuery) -> Result<BoundResult> {
    let BoundQuery {
        n,
        max_defectives,
        delta,
        noise,
        algo,
        d,
    } = *query;
    let (big_gamma, gamma) = gamma_params(n, max_defectives, delta)?;
    let dd = max_defectives as f64;
    let mut out = BoundResult {
        tests: 0.0,
        beta: 0.0,
        log_base: LogBase::Two,
        big_gamma,
        gamma,
        tau_star: None,
        w: None,
    };
    let natural = |out: &mut BoundResult, beta: f64| {
        out.beta = beta;
        out.log_base = LogBase::Natural;
        out.tests = beta * dd * libm::log(n as f64);
    };
    let binary = |out: &mut BoundResult, beta: f64| {
        out.beta = beta;
        out.tests = beta * dd * log2n(n);
    };
    match algo {
        BoundAlgo::LowerNoiseless => {
            noiseless_only(&noise, algo)?;
            return lower_bound(n, max_defectives, delta, 0.0);
        }
        BoundAlgo::LowerNoisy => {
            let q = symmetric_q(&noise, algo)?;
            return lower_bound(n, max_defectives, delta, q);
        }
        BoundAlgo::Coma => {
            noiseless_only(&noise, algo)?;
            natural(&mut out, E * (1.0 + delta));
        }
        BoundAlgo::Coco => {
            noiseless_only(&noise, algo)?;
            natural(&mut out, 2.0 * E * (1.0 + delta));
        }
        BoundAlgo::CocoAsStated | BoundAlgo::Nocoma => {
            let q = symmetric_q(&noise, algo)?;
            if q > 0.0 {
                out.tau_star = Some(tau_star(q, gamma)?);
            }
            binary(&mut out, beta_star(gamma, big_gamma, delta, q));
        }
        BoundAlgo::Nolipo => {
            let q = symmetric_q(&noise, algo)?;
            let (beta, w) = lp_beta(big_gamma, delta, 1.0 - 2.0 * q, dd);
            out.w = Some(w);
            binary(&mut out, beta);
        }
        BoundAlgo::NolipoAsym => {
            noise.validate()?;
            let (q0, q1) = match noise {
                NoiseModel::Noiseless => (0.0, 0.0),
                NoiseModel::Bsc { q } => (q, q),
                NoiseModel::Asymmetric { q0, q1 } => (q0, q1),
                NoiseModel::Activation { .. } => {
                    return Err(param("bound 'nolipo_asym' needs asymmetric noise"))
                }
            };
            let (beta, w) = lp_beta(big_gamma, delta, 1.0 - q0 - q1, dd);
            out.w = Some(w);
            binary(&mut out, beta);
        }
        BoundAlgo::NolipoAct => {
            let NoiseModel::Activation { u, q0 } = noise else {
                return Err(param("bound 'nolipo_act' needs activation noise"));
            };
            let d = d.unwrap_or(max_defectives);
            noise.validate_for(d)?;
            let ud = libm::pow(u, d as f64);
            let margin = 2.0 - ud - 2.0 * q0;
            let w = 1.0 + margin / dd;
            let beta = (delta + 1.0 + big_gamma) * 2.0 * LN_2 * E * E * w
                * (3.0 * w * (2.0 + u - ud) - margin)
                / (3.0 * margin * margin);
            out.w = Some(w);
            binary(&mut out, beta);
        }
        BoundAlgo::Lipo => {
            noiseless_only(&noise, algo)?;
            let (beta, w) = lp_beta(big_gamma, delta, 1.0, dd);
            out.w = Some(w);
            binary(&mut out, beta);
        }
        BoundAlgo::NolipoPm => {
            let q = symmetric_q(&noise, algo)?;
            let margin = 1.0 - 2.0 * q;
            let w = 1.0 + margin / dd;
            let beta = 2.0 * (delta + 1.0 + big_gamma) * LN_2 * E * E * w * (w + margin / 3.0)
                / (margin * margin);
            out.w = Some(w);
            binary(&mut out, beta);
        }
        BoundAlgo::Nounlipo => {
            let q = symmetric_q(&noise, algo)?;
            let (lp, w) = lp_beta(big_gamma, delta, 1.0 - 2.0 * q, dd);
            let star = beta_star(gamma, big_gamma, delta, q);
            if q > 0.0 {
                out.tau_star = Some(tau_star(q, gamma)?);
            }
            out.w = Some(w);
            binary(&mut out, lp.max(star));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapFactor {
    /// Column-matching upper bound over the noisy lower bound.
    pub ratio: f64,
    /// `12.83 (1+√γ)² (1+δ) / (1-2q)²`.
    pub closed_form: f64,
    /// `closed_form / (1 - n^{-δ})`.
    pub closed_form_with_slack: f64,
}

pub fn gap_factor(n: usize, max_defectives: usize, delta: f64, q: f64) -> Result<GapFactor> {
    if !(q > 0.0 && q < 0.5) {
        return Err(param(format!("q = {q} outside (0, 1/2)")));
    }
    let noise = NoiseModel::Bsc { q };
    let upper = upper_bound(&BoundQuery::new(n, max_defectives, delta, noise, BoundAlgo::Nocoma))?;
    let lower = lower_bound(n, max_defectives, delta, q)?;
    let sg = libm::sqrt(upper.gamma);
    let closed_form = 12.83 * (1.0 + sg) * (1.0 + sg) * (1.0 + delta) / ((1.0 - 2.0 * q) * (1.0 - 2.0 * q));
    Ok(GapFactor {
        ratio: upper.tests / lower.tests,
        closed_form,
        closed_form_with_slack: closed_form / (1.0 - libm::pow(n as f64, -delta)),
    })
}

/// Per-test law of the slack change `η_i(x + φ) - η_i(x)` for one
/// perturbation, split by observed outcome. Probabilities are joint with
/// the outcome (they are not conditioned on it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationLaw {
    /// Positive outcome, change `+1`.
    pub pos_up: f64,
    /// Positive outcome, change `-1`.
    pub pos_down: f64,
    /// Negative outcome, change `+1`.
    pub neg_up: f64,
    /// Negative outcome, change `-1`.
    pub neg_down: f64,
    /// Expected signed change per test.
    pub expected_change: f64,
    /// Expected number of nonzero changes per test.
    pub expected_count: f64,
}

/// Closed forms for entry density `p`, `d` defectives, and the given channel.
///
/// For activation noise the four probabilities follow the published
/// approximation; the two expectations are their exact sums.
pub fn perturbation_expectations(p: f64, d: usize, noise: &NoiseModel) -> Result<PerturbationLaw> {
    if !(p > 0.0 && p < 1.0) {
        return Err(param(format!("p = {p} outside (0, 1)")));
    }
    if d < 1 {
        return Err(param("perturbations need d >= 1"));
    }
    noise.validate()?;
    let df = d as f64;
    let a = p * libm::pow(1.0 - p, df);
    let b = p * (1.0 - p);
    let (pos_up, pos_down, neg_up, neg_down) = match *noise {
        NoiseModel::Activation { u, q0 } => {
            let ud = libm::pow(u, df);
            let mix = libm::pow(1.0 - p + p * u, df - 1.0);
            (
                a * (1.0 - ud),
                a * q0,
                b * (mix - libm::pow(1.0 - p, df - 1.0) * q0),
                b * mix * u,
            )
        }
        _ => {
            let (q0, q1) = match *noise {
                NoiseModel::Noiseless => (0.0, 0.0),
                NoiseModel::Bsc { q } => (q, q),
                NoiseModel::Asymmetric { q0, q1 } => (q0, q1),
                NoiseModel::Activation { .. } => unreachable!(),
            };
            let clean = libm::pow(1.0 - p, df - 1.0);
            (
                a * (1.0 - q1),
                a * q0,
                b * ((1.0 - q0 - q1) * clean + q1),
                b * q1,
            )
        }
    };
    Ok(PerturbationLaw {
        pos_up,
        pos_down,
        neg_up,
        neg_down,
        expected_change: pos_up - pos_down + neg_up - neg_down,
        expected_count: pos_up + pos_down + neg_up + neg_down,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn gamma_examples() {
        let (g, gm) = gamma_params(1000, 10, 1.0).unwrap();
        assert!(close(g, 1.0 / 3.0, 1e-12));
        assert!(close(gm, 2.0 / 3.0, 1e-12));
        let (g, gm) = gamma_params(50, 1, 0.5).unwrap();
        assert_eq!(g, 0.0);
        assert!(close(gm, 1.0 / 3.0, 1e-12));
        assert!(gamma_params(10, 10, 1.0).is_err());
    }

    #[test]
    fn tau_examples() {
        assert!(close(tau_star(0.1, 1.0).unwrap(), 1.0, 1e-12));
        assert!(matches!(tau_star(0.0, 0.5), Err(Error::Usage(_))));
        assert!(tau_star(0.4999999, 0.5).unwrap() < 1e-5);
    }

    #[test]
    fn lower_examples() {
        let r = lower_bound(1024, 1, 1.0, 0.0).unwrap();
        assert!(close(r.tests, (1.0 - 1.0 / 1024.0) * 10.0, 1e-12));
        let noisy = lower_bound(1024, 1, 1.0, 0.11).unwrap();
        assert!(close(noisy.tests / r.tests, 2.0, 1e-3));
    }

    #[test]
    fn coma_example() {
        let r = upper_bound(&BoundQuery::new(1000, 10, 1.0, NoiseModel::Noiseless, BoundAlgo::Coma)).unwrap();
        assert!((r.tests - 375.5445).abs() < 1e-3, "{}", r.tests);
        assert_eq!(r.log_base, LogBase::Natural);
    }

    #[test]
    fn tag_noise_mismatch() {
        let bsc = NoiseModel::Bsc { q: 0.1 };
        for algo in [BoundAlgo::Lipo, BoundAlgo::Coma, BoundAlgo::Coco, BoundAlgo::LowerNoiseless] {
            assert!(upper_bound(&BoundQuery::new(100, 3, 1.0, bsc, algo)).is_err());
        }
        let asym = NoiseModel::Asymmetric { q0: 0.1, q1: 0.1 };
        assert!(upper_bound(&BoundQuery::new(100, 3, 1.0, asym, BoundAlgo::Nolipo)).is_err());
        assert!(upper_bound(&BoundQuery::new(100, 3, 1.0, bsc, BoundAlgo::NolipoAct)).is_err());
    }

    #[test]
    fn lipo_is_nolipo_at_zero_noise() {
        let a = upper_bound(&BoundQuery::new(500, 7, 0.7, NoiseModel::Noiseless, BoundAlgo::Lipo)).unwrap();
        let b = upper_bound(&BoundQuery::new(500, 7, 0.7, NoiseModel::Noiseless, BoundAlgo::Nolipo)).unwrap();
        assert!(close(a.tests, b.tests, 1e-14));
    }

    #[test]
    fn pm_factor_two_structure() {
        let noise = NoiseModel::Bsc { q: 0.1 };
        let pm = upper_bound(&BoundQuery::new(500, 7, 1.0, noise, BoundAlgo::NolipoPm)).unwrap();
        let (g, _) = gamma_params(500, 7, 1.0).unwrap();
        let m = 0.8;
        let w2 = 1.0 + m / 7.0;
        let single = (1.0 + 1.0 + g) * LN_2 * E * E * w2 * (w2 + m / 3.0) / (m * m);
        assert!(close(pm.beta, 2.0 * single, 1e-12));
    }

    #[test]
    fn bsc_and_symmetric_asym_agree() {
        let a = upper_bound(&BoundQuery::new(900, 9, 1.0, NoiseModel::Bsc { q: 0.07 }, BoundAlgo::Nolipo)).unwrap();
        let b = upper_bound(&BoundQuery::new(
            900,
            9,
            1.0,
            NoiseModel::Asymmetric { q0: 0.07, q1: 0.07 },
            BoundAlgo::NolipoAsym,
        ))
        .unwrap();
        assert!(close(a.tests, b.tests, 1e-14));
    }

    #[test]
    fn gap_closed_form_example() {
        // gamma = 1 is the limit; check the closed form's arithmetic directly.
        let v: f64 = 12.83 * 4.0 * 2.0 / 0.64;
        assert!((v - 160.375).abs() < 1e-9);
        let g = gap_factor(1000, 10, 1.0, 0.1).unwrap();
        assert!(g.ratio > 0.0 && g.closed_form > 0.0);
        assert!(close(g.closed_form_with_slack * (1.0 - 1e-3), g.closed_form, 1e-12));
    }

    #[test]
    fn perturbation_bsc_example() {
        let law = perturbation_expectations(1.0 / 3.0, 2, &NoiseModel::Bsc { q: 0.1 }).unwrap();
        assert!(close(law.pos_up, 0.133333333, 1e-6));
        let clean = perturbation_expectations(0.2, 3, &NoiseModel::Noiseless).unwrap();
        assert_eq!(clean.pos_down, 0.0);
        assert_eq!(clean.neg_down, 0.0);
    }

    #[test]
    fn perturbation_closed_form_totals() {
        let (p, d, q) = (0.15, 4, 0.12);
        let law = perturbation_expectations(p, d, &NoiseModel::Bsc { q }).unwrap();
        let pd = libm::pow(1.0 - p, d as f64);
        assert!(close(law.expected_change, 2.0 * p * pd * (1.0 - 2.0 * q), 1e-12));
        assert!(close(law.expected_count, 2.0 * p * (pd * (1.0 - q) + (1.0 - p) * q), 1e-12));

        let (q0, q1) = (0.05, 0.15);
        let law = perturbation_expectations(p, d, &NoiseModel::Asymmetric { q0, q1 }).unwrap();
        assert!(close(law.expected_change, 2.0 * p * pd * (1.0 - q0 - q1), 1e-12));
        assert!(close(law.expected_count, 2.0 * p * (pd * (1.0 - q1) + (1.0 - p) * q1), 1e-12));
    }

    #[test]
    fn stratum_expectations_at_d_two() {
        // Per stratum the signed change has mean (1-2q)(1-p)^2 p.
        for (p, q) in [(0.2, 0.1), (1.0 / 3.0, 0.2)] {
            let law = perturbation_expectations(p, 2, &NoiseModel::Bsc { q }).unwrap();
            let target = (1.0 - 2.0 * q) * (1.0 - p) * (1.0 - p) * p;
            assert!(close(law.pos_up - law.pos_down, target, 1e-12));
            assert!(close(law.neg_up - law.neg_down, target, 1e-12));
        }
    }

    fn any_query() -> impl Strategy<Value = (usize, usize, f64, f64)> {
        (20usize..100_000, 0.05f64..0.95, 0.1f64..3.0, 0.001f64..0.45).prop_map(|(n, frac, delta, q)| {
            let d = ((n as f64).powf(frac) as usize).clamp(1, n - 1);
            (n, d, delta, q)
        })
    }

    const NOISY: [BoundAlgo; 5] = [
        BoundAlgo::Nocoma,
        BoundAlgo::Nolipo,
        BoundAlgo::NolipoPm,
        BoundAlgo::Nounlipo,
        BoundAlgo::CocoAsStated,
    ];

    proptest! {
        #[test]
        fn gamma_range((n, d, delta, _q) in any_query()) {
            let (g, gm) = gamma_params(n, d, delta).unwrap();
            prop_assert!((0.0..1.0).contains(&g));
            prop_assert!(gm >= delta / (delta + 1.0) - 1e-15 && gm < 1.0);
        }

        #[test]
        fn tau_inside_validity_region(q in 0.001f64..0.499, gm in 0.01f64..=1.0) {
            let t = tau_star(q, gm).unwrap();
            prop_assert!(t > 0.0 && t < (1.0 - 2.0 * q) / (4.0 * q));
        }

        #[test]
        fn nounlipo_is_max((n, d, delta, q) in any_query()) {
            let noise = NoiseModel::Bsc { q };
            let t = |a| upper_bound(&BoundQuery::new(n, d, delta, noise, a)).unwrap().tests;
            prop_assert_eq!(t(BoundAlgo::Nounlipo), t(BoundAlgo::Nolipo).max(t(BoundAlgo::Nocoma)));
        }

        #[test]
        fn lower_below_upper((n, d, delta, q) in any_query()) {
            let noise = NoiseModel::Bsc { q };
            let lower = lower_bound(n, d, delta, q).unwrap().tests;
            for algo in NOISY {
                prop_assert!(lower <= upper_bound(&BoundQuery::new(n, d, delta, noise, algo)).unwrap().tests);
            }
            let lower0 = lower_bound(n, d, delta, 0.0).unwrap().tests;
            for algo in [BoundAlgo::Coma, BoundAlgo::Coco, BoundAlgo::Lipo] {
                prop_assert!(lower0 <= upper_bound(&BoundQuery::new(n, d, delta, NoiseModel::Noiseless, algo)).unwrap().tests);
            }
        }

        #[test]
        fn monotone_in_delta_and_q((n, d, delta, q) in any_query(), bump in 0.0f64..0.5, qbump in 0.0f64..0.04) {
            for algo in NOISY {
                let t = |delta, q| upper_bound(&BoundQuery::new(n, d, delta, NoiseModel::Bsc { q }, algo)).unwrap().tests;
                prop_assert!(t(delta + bump, q) >= t(delta, q) * (1.0 - 1e-12));
                prop_assert!(t(delta, q + qbump) >= t(delta, q) * (1.0 - 1e-12));
            }
        }

        // The LP constants carry w = 1 + c/D, which shrinks as D grows, so
        // the D = 1 to D = 2 step is excluded.
        #[test]
        fn monotone_in_max_defectives(n in 100usize..100_000, d in 2usize..50, delta in 0.1f64..3.0, q in 0.001f64..0.45) {
            prop_assume!(d + 1 < n);
            for algo in NOISY {
                let t = |d| upper_bound(&BoundQuery::new(n, d, delta, NoiseModel::Bsc { q }, algo)).unwrap().tests;
                prop_assert!(t(d + 1) >= t(d) * (1.0 - 1e-12));
            }
        }

        #[test]
        fn perturbation_law_is_probability(p in 0.01f64..0.99, d in 1usize..20, q in 0.0f64..0.5, u in 0.0f64..0.99, q0 in 0.0f64..0.4) {
            for noise in [NoiseModel::Bsc { q }, NoiseModel::Activation { u, q0 }, NoiseModel::Asymmetric { q0, q1: q }] {
                let law = perturbation_expectations(p, d, &noise).unwrap();
                for v in [law.pos_up, law.pos_down, law.neg_up, law.neg_down] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                let s = law.pos_up - law.pos_down + law.neg_up - law.neg_down;
                prop_assert!((s - law.expected_change).abs() < 1e-15);
            }
        }
    }
}
