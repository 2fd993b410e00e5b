//! Seeded verification suites over the oracles, with a JSON-serializable
//! per-check report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::moments::{mu2, mu3, normalization_a, standardized_m3};
use crate::oracle::mc::{mc_moments, McConfig};
use crate::oracle::{
    check_half_line_product, check_interval_product, moment_quadrature, moment_semianalytic,
    simplex_integral_closed, simplex_integral_numeric, BetaExponents, CheckOutcome,
};
use crate::params::{Amplitude, GammaPair};
use crate::quadrature::QuadratureConfig;

pub const LEMMA_TOLERANCE: f64 = 1e-7;
pub const PIPELINE_TOLERANCE: f64 = 1e-10;
pub const QUADRATURE_PIPELINE_TOLERANCE: f64 = 1e-6;
pub const HALF_LINE_DRAWS: usize = 50;
pub const INTERVAL_DRAWS: usize = 50;
pub const SIMPLEX_DRAWS: usize = 30;
pub const PIPELINE_PAIRS: usize = 20;
pub const QUADRATURE_PIPELINE_PAIRS: usize = 5;
/// Allowed relative deviation of the MC variance from 1.
pub const MC_VARIANCE_SLACK: f64 = 0.05;
/// Allowed relative deviation of the MC third moment from the closed form.
pub const MC_THIRD_MOMENT_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Pipeline,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    /// Infinite when the numerical side could not be computed.
    pub achieved_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check: String, achieved_error: f64, tolerance: f64) -> Self {
        Self {
            check,
            achieved_error,
            tolerance,
            pass: achieved_error <= tolerance,
        }
    }

    fn from_outcome(check: String, r: Result<CheckOutcome<f64>>, tolerance: f64) -> Self {
        match r {
            Ok(o) => Self {
                check,
                achieved_error: o.error,
                tolerance: o.allowed,
                pass: o.pass,
            },
            Err(_) => Self::new(check, f64::INFINITY, tolerance),
        }
    }

    fn relative(check: String, value: Result<f64>, reference: f64, tolerance: f64) -> Self {
        let err = match value {
            Ok(v) => ((v - reference) / reference).abs(),
            Err(_) => f64::INFINITY,
        };
        Self::new(check, err, tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn new(suite: Suite, seed: u64, checks: Vec<CheckRecord>) -> Self {
        Self {
            suite,
            seed,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Uniform draw of a valid pair kept `margin` away from the boundary.
pub fn random_pair<R: Rng>(rng: &mut R, margin: f64) -> GammaPair<f64> {
    loop {
        let g1 = rng.random_range(-1.0 + margin..-0.5 - margin);
        let g2 = rng.random_range(-1.0 + margin..-0.5 - margin);
        if g1 + g2 > -1.5 + margin {
            return GammaPair::new(g1, g2).expect("drawn inside the domain");
        }
    }
}

fn random_betas<R: Rng>(rng: &mut R, m: usize) -> BetaExponents<f64> {
    loop {
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-0.95..1.5)).collect();
        if let Ok(e) = BetaExponents::new(&b) {
            if b.iter().sum::<f64>() + m as f64 > 1.05 {
                return e;
            }
        }
    }
}

/// Quadrature checks of the half-line, interval and simplex identities.
pub fn verify_lemmas(seed: u64, tolerance: Option<f64>) -> VerifyReport {
    let tol = tolerance.unwrap_or(LEMMA_TOLERANCE);
    let cfg = QuadratureConfig::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    for k in 0..HALF_LINE_DRAWS {
        let a = rng.random_range(-0.99..-0.51);
        let b = rng.random_range(-0.99..-0.51);
        let s1: f64 = rng.random_range(-2.0..2.0);
        let mut s2: f64 = rng.random_range(-2.0..2.0);
        if (s1 - s2).abs() < 1e-3 {
            s2 = s1 + 0.5;
        }
        checks.push(CheckRecord::from_outcome(
            format!("half_line[{k}] a={a:.6} b={b:.6} s1={s1:.6} s2={s2:.6}"),
            check_half_line_product(a, b, s1, s2, &cfg, tol),
            tol,
        ));
    }
    for k in 0..INTERVAL_DRAWS {
        let a = rng.random_range(-0.99..2.0);
        let b = rng.random_range(-0.99..2.0);
        let x = rng.random_range(-2.0..2.0);
        let y = x + rng.random_range(0.01..3.0);
        checks.push(CheckRecord::from_outcome(
            format!("interval[{k}] a={a:.6} b={b:.6} x={x:.6} y={y:.6}"),
            check_interval_product(a, b, x, y, &cfg, tol),
            tol,
        ));
    }
    for m in [2, 3] {
        for k in 0..SIMPLEX_DRAWS {
            let b = random_betas(&mut rng, m);
            let closed = simplex_integral_closed(&b);
            let betas: Vec<String> = b.betas().iter().map(|v| format!("{v:.6}")).collect();
            checks.push(CheckRecord::relative(
                format!("simplex_m{m}[{k}] beta=({})", betas.join(",")),
                simplex_integral_numeric(&b, &cfg),
                closed,
                tol,
            ));
        }
    }
    VerifyReport::new(Suite::Lemmas, seed, checks)
}

/// Closed-form `μ2`, `μ3` against the cumulant-integral assembly on random
/// pairs and amplitudes.
pub fn two_path_checks(seed: u64, tolerance: Option<f64>) -> Vec<CheckRecord> {
    let tol = tolerance.unwrap_or(PIPELINE_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for k in 0..PIPELINE_PAIRS {
        let p = random_pair(&mut rng, 1e-3);
        let a = Amplitude::new(rng.random_range(0.1..3.0)).expect("positive");
        let tag = format!("g1={:.6} g2={:.6} A={:.6}", p.gamma1(), p.gamma2(), a.get());
        checks.push(CheckRecord::relative(
            format!("mu2[{k}] {tag}"),
            moment_semianalytic(&p, a, 2),
            mu2(&p, a),
            tol,
        ));
        checks.push(CheckRecord::relative(
            format!("mu3[{k}] {tag}"),
            moment_semianalytic(&p, a, 3),
            mu3(&p, a),
            tol,
        ));
    }
    checks
}

/// `μ3` with every simplex integral done by quadrature, against the closed
/// form.
pub fn quadrature_moment_checks(seed: u64, tolerance: Option<f64>) -> Vec<CheckRecord> {
    let tol = tolerance.unwrap_or(QUADRATURE_PIPELINE_TOLERANCE);
    let cfg = QuadratureConfig::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..QUADRATURE_PIPELINE_PAIRS)
        .map(|k| {
            let p = random_pair(&mut rng, 0.01);
            let a = Amplitude::new(1.0).expect("positive");
            CheckRecord::relative(
                format!("mu3_quadrature[{k}] g1={:.6} g2={:.6}", p.gamma1(), p.gamma2()),
                moment_quadrature(&p, a, 3, &cfg),
                mu3(&p, a),
                tol,
            )
        })
        .collect()
}

/// Both moment pipelines: [`two_path_checks`] then [`quadrature_moment_checks`].
pub fn verify_pipeline(seed: u64, tolerance: Option<f64>, quadrature_tolerance: Option<f64>) -> VerifyReport {
    let mut checks = two_path_checks(seed, tolerance);
    checks.extend(quadrature_moment_checks(seed, quadrature_tolerance));
    VerifyReport::new(Suite::Pipeline, seed, checks)
}

/// Monte-Carlo smoke test at `(−0.7, −0.7)` with the standardizing amplitude.
pub fn verify_mc(cfg: &McConfig) -> Result<VerifyReport> {
    let p = GammaPair::new(-0.7, -0.7)?;
    let a = Amplitude::new(normalization_a(&p))?;
    let target_m3 = standardized_m3(&p);
    let r = mc_moments(&p, a, cfg)?;
    let checks = vec![
        CheckRecord::new("mc_mean".into(), r.mean.abs(), 3.0 * r.stderr1),
        CheckRecord::new(
            "mc_variance".into(),
            (r.m2 - 1.0).abs(),
            (3.0 * r.stderr2).max(MC_VARIANCE_SLACK),
        ),
        CheckRecord::new(
            "mc_third_moment".into(),
            (r.m3 - target_m3).abs(),
            (3.0 * r.stderr3).max(MC_THIRD_MOMENT_SLACK * target_m3),
        ),
    ];
    Ok(VerifyReport::new(Suite::Mc, cfg.seed, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemmas_pass_and_are_deterministic() {
        let r = verify_lemmas(42, None);
        assert_eq!(r.checks.len(), HALF_LINE_DRAWS + INTERVAL_DRAWS + 2 * SIMPLEX_DRAWS);
        let failures: Vec<_> = r.failures().collect();
        assert!(r.pass, "{failures:#?}");
        assert_eq!(r, verify_lemmas(42, None));
    }

    #[test]
    fn pipeline_passes() {
        let r = verify_pipeline(3, None, None);
        assert_eq!(r.checks.len(), 2 * PIPELINE_PAIRS + QUADRATURE_PIPELINE_PAIRS);
        let failures: Vec<_> = r.failures().collect();
        assert!(r.pass, "{failures:#?}");
    }

    #[test]
    fn impossible_tolerance_fails() {
        let r = verify_pipeline(3, Some(0.0), Some(0.0));
        assert!(!r.pass);
    }

    #[test]
    fn random_pairs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = random_pair(&mut rng, 1e-3);
            assert!(p.gamma1() + p.gamma2() > -1.499);
        }
    }

    #[test]
    fn report_serializes() {
        let r = VerifyReport::new(Suite::Mc, 1, vec![CheckRecord::new("x".into(), 0.5, 1.0)]);
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(
            j,
            r#"{"suite":"mc","seed":1,"pass":true,"checks":[{"check":"x","achieved_error":0.5,"tolerance":1.0,"pass":true}]}"#
        );
    }
}
