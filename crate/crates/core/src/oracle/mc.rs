//! Monte-Carlo estimate of the first three moments of `Z`.
//!
//! `Z = A ∫_0^1 :Y1(s) Y2(s): ds` with `Ya(s) = ∫ (s−x)₊^{γa} B(dx)`. The time
//! axis is cut into `n` cells and each `Ya` is replaced by its cell averages
//! `Ȳa,i = ∫ φa,i(x) B(dx)`; the Wick product removes the diagonal of the
//! double integral exactly. The averages are jointly Gaussian, so with
//! `Ȳ = S ε` the discretized variable is `Σ_k μ_k (ε_k² − 1)`, `μ_k` the
//! eigenvalues of `Sᵀ D S`. Their covariance is assembled on a graded
//! x-grid over `[−T, 1]` plus a quadrature rule for `(−∞, −T]`.
//!
//! Cell averaging loses variance at rate `n^{1−2H}`. The loss is estimated
//! by Richardson extrapolation between `n` and `n/2` cells and restored as an
//! independent Gaussian term; the third moment is taken from the discrete
//! chaos alone.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Amplitude, GammaPair};
use crate::quadrature::{gauss_jacobi_rule, gauss_legendre_rule};
use crate::sum::CompensatedSum;

/// Quadrature nodes for the x-range beyond the truncation point.
pub const TAIL_NODES: usize = 32;
/// Replications per RNG stream.
pub const CHUNK: usize = 1024;
const INTERIOR_SHARE: f64 = 0.6;
const GL_NODES: usize = 8;
/// Cells left of this point use Gauss-Legendre averages; the closed-form
/// average cancels badly far from the time interval.
const EXACT_AVERAGE_LIMIT: f64 = -2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Time cells on `[0, 1]`; must be even, the coarse level uses half.
    pub grid_points_n: usize,
    /// Noise components on the x-axis, tail nodes included.
    pub noise_points: usize,
    /// Left end `−T` of the graded x-grid.
    pub truncation: f64,
    pub replications: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            grid_points_n: 256,
            noise_points: 4096,
            truncation: 1000.0,
            replications: 100_000,
            seed: 0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_n < 4 || !self.grid_points_n.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "grid_points_n must be even and at least 4 (got {})",
                self.grid_points_n
            )));
        }
        let min_noise = 2 * (TAIL_NODES + 8);
        if self.noise_points < min_noise {
            return Err(Error::domain(format!(
                "noise_points must be at least {min_noise} (got {})",
                self.noise_points
            )));
        }
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(Error::domain("truncation must be positive and finite"));
        }
        if self.replications < 2 {
            return Err(Error::domain("replications must be at least 2"));
        }
        Ok(())
    }
}

/// Sample moments with standard errors, plus the deterministic pieces of
/// the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMoments {
    pub mean: f64,
    /// Sample `E[Z²]`.
    pub m2: f64,
    /// Sample `E[Z³]`.
    pub m3: f64,
    pub stderr1: f64,
    pub stderr2: f64,
    pub stderr3: f64,
    pub replications: usize,
    /// `2 Σ μ_k²` at `n` cells.
    pub discrete_variance: f64,
    /// `8 Σ μ_k³` at `n` cells.
    pub discrete_third_moment: f64,
    pub extrapolated_variance: f64,
    /// Variance of the added Gaussian term.
    pub completion_variance: f64,
}

/// `∫_{s_lo}^{s_hi} (s−x)₊^γ ds / w` for `x < s_lo`, written so that
/// `(d+w)^p − d^p` does not cancel when `w ≪ d`.
fn point_average(gamma: f64, s_lo: f64, w: f64, x: f64) -> f64 {
    let p = gamma + 1.0;
    let d = s_lo - x;
    d.powf(p) * (p * (w / d).ln_1p()).exp_m1() / (p * w)
}

/// `∫_{x1}^{x2} ∫_{s_lo}^{s_hi} (s−x)₊^γ ds dx / (w (x2−x1))`.
fn cell_average(gamma: f64, s_lo: f64, s_hi: f64, x1: f64, x2: f64) -> f64 {
    let k = (gamma + 1.0) * (gamma + 2.0);
    let f = |c: f64, x: f64| -> f64 {
        let d = c - x;
        if d > 0.0 {
            -d.powf(gamma + 2.0) / k
        } else {
            0.0
        }
    };
    (f(s_hi, x2) - f(s_hi, x1) - f(s_lo, x2) + f(s_lo, x1)) / ((s_hi - s_lo) * (x2 - x1))
}

/// One noise component: an x-cell (averaged) or a tail node (point value),
/// with its variance weight.
enum Component {
    Cell { x1: f64, x2: f64 },
    Node { x: f64, weight: f64 },
}

fn noise_components(noise_points: usize, truncation: f64, e_tail: f64) -> Result<Vec<Component>> {
    let interior = ((noise_points as f64) * INTERIOR_SHARE).round() as usize;
    let graded = noise_points - interior - TAIL_NODES;
    let mut out = Vec::with_capacity(noise_points);

    // x = −T/t on t ∈ (0, 1]: ∫_{−∞}^{−T} h dx = ∫_0^1 t^e [h(−T/t) T t^{−e−2}] dt
    let (u, w) = gauss_jacobi_rule::<f64>(TAIL_NODES, 0.0, e_tail)?;
    for (u, w) in u.into_iter().zip(w) {
        let t = 0.5 * (1.0 + u);
        let weight = w * 2f64.powf(-e_tail - 1.0) * truncation * t.powf(-e_tail - 2.0);
        out.push(Component::Node {
            x: -truncation / t,
            weight,
        });
    }
    // geometric grading on [−T, 0], finest next to the time interval
    let base = truncation + 1.0;
    let edge = |j: usize| -> f64 {
        if j == 0 {
            -truncation
        } else if j == graded {
            0.0
        } else {
            -(base.powf((graded - j) as f64 / graded as f64) - 1.0)
        }
    };
    for j in 0..graded {
        out.push(Component::Cell {
            x1: edge(j),
            x2: edge(j + 1),
        });
    }
    for j in 0..interior {
        out.push(Component::Cell {
            x1: j as f64 / interior as f64,
            x2: (j + 1) as f64 / interior as f64,
        });
    }
    Ok(out)
}

/// Eigenvalues `μ_k` of the discretized chaos with `n` time cells.
pub fn chaos_spectrum(
    p: &GammaPair<f64>,
    amplitude: Amplitude<f64>,
    n: usize,
    noise_points: usize,
    truncation: f64,
) -> Result<Vec<f64>> {
    let gammas = [p.gamma1(), p.gamma2()];
    let e_tail = -2.0 * p.gamma1().max(p.gamma2()) - 2.0;
    let comps = noise_components(noise_points, truncation, e_tail)?;
    let (gl_x, gl_w) = gauss_legendre_rule::<f64>(GL_NODES)?;
    let w = 1.0 / n as f64;

    // rows (a, i), columns scaled by the square root of the component variance
    let mut phi = DMatrix::<f64>::zeros(2 * n, comps.len());
    phi.par_column_iter_mut()
        .zip(comps.par_iter())
        .for_each(|(mut col, comp)| {
            for (a, &gamma) in gammas.iter().enumerate() {
                for i in 0..n {
                    let s_lo = i as f64 * w;
                    let s_hi = (i + 1) as f64 * w;
                    col[a * n + i] = match *comp {
                        Component::Node { x, weight } => point_average(gamma, s_lo, w, x) * weight.sqrt(),
                        Component::Cell { x1, x2 } if x1 < EXACT_AVERAGE_LIMIT => {
                            let (mid, half) = (0.5 * (x1 + x2), 0.5 * (x2 - x1));
                            let avg: f64 = gl_x
                                .iter()
                                .zip(&gl_w)
                                .map(|(&t, &wt)| wt * point_average(gamma, s_lo, w, mid + half * t))
                                .sum::<f64>()
                                * 0.5;
                            avg * (x2 - x1).sqrt()
                        }
                        Component::Cell { x1, x2 } => {
                            cell_average(gamma, s_lo, s_hi, x1, x2) * (x2 - x1).sqrt()
                        }
                    };
                }
            }
        });

    let cov = &phi * phi.transpose();
    let eig = SymmetricEigen::new(cov);
    let mut s = eig.eigenvectors;
    for (k, mut col) in s.column_iter_mut().enumerate() {
        col *= eig.eigenvalues[k].max(0.0).sqrt();
    }
    let mut d = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let c = 0.5 * amplitude.get() * w;
    for i in 0..n {
        d[(i, n + i)] = c;
        d[(n + i, i)] = c;
    }
    let m = s.transpose() * d * &s;
    // symmetrize against rounding before the second decomposition
    let m = (&m + m.transpose()) * 0.5;
    let mut mu: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    let largest = mu.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    mu.retain(|x| x.abs() > largest * 1e-14);
    mu.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    Ok(mu)
}

fn variance_of(mu: &[f64]) -> f64 {
    2.0 * mu.iter().map(|m| m * m).collect::<CompensatedSum<f64>>().total()
}

fn third_moment_of(mu: &[f64]) -> f64 {
    8.0 * mu.iter().map(|m| m * m * m).collect::<CompensatedSum<f64>>().total()
}

/// Power sums `Σz, Σz², Σz³, Σz⁴, Σz⁶` of one chunk.
fn sample_chunk(mu: &[f64], completion_sd: f64, seed: u64, chunk: u64, count: usize) -> [f64; 5] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut sums = [0.0; 5];
    for _ in 0..count {
        let mut z = 0.0;
        for &m in mu {
            let e: f64 = rng.sample(StandardNormal);
            z += m * (e * e - 1.0);
        }
        let e: f64 = rng.sample(StandardNormal);
        z += completion_sd * e;
        let z2 = z * z;
        sums[0] += z;
        sums[1] += z2;
        sums[2] += z2 * z;
        sums[3] += z2 * z2;
        sums[4] += z2 * z2 * z2;
    }
    sums
}

/// Sample mean, `E[Z²]` and `E[Z³]` of the simulated variable. Output depends
/// only on `(p, amplitude, cfg)`, not on the thread count.
pub fn mc_moments(p: &GammaPair<f64>, amplitude: Amplitude<f64>, cfg: &McConfig) -> Result<McMoments> {
    cfg.validate()?;
    let n = cfg.grid_points_n;
    let fine = chaos_spectrum(p, amplitude, n, cfg.noise_points, cfg.truncation)?;
    let coarse = chaos_spectrum(p, amplitude, n / 2, cfg.noise_points / 2, cfg.truncation)?;
    let var_fine = variance_of(&fine);
    let var_coarse = variance_of(&coarse);
    let r = 2f64.powf(2.0 * p.hurst() - 1.0);
    let extrapolated = (r * var_fine - var_coarse) / (r - 1.0);
    let completion = (extrapolated - var_fine).max(0.0);

    let chunks = cfg.replications.div_ceil(CHUNK);
    let sums: Vec<[f64; 5]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(cfg.replications - c * CHUNK);
            sample_chunk(&fine, completion.sqrt(), cfg.seed, c as u64, count)
        })
        .collect();
    let mut acc: [CompensatedSum<f64>; 5] = Default::default();
    for s in &sums {
        for (a, v) in acc.iter_mut().zip(s) {
            a.add(*v);
        }
    }
    let reps = cfg.replications as f64;
    let [e1, e2, e3, e4, e6] = acc.map(|a| a.total() / reps);
    let se = |second: f64, first: f64| ((second - first * first).max(0.0) / reps).sqrt();
    Ok(McMoments {
        mean: e1,
        m2: e2,
        m3: e3,
        stderr1: se(e2, e1),
        stderr2: se(e4, e2),
        stderr3: se(e6, e3),
        replications: cfg.replications,
        discrete_variance: var_fine,
        discrete_third_moment: third_moment_of(&fine),
        extrapolated_variance: extrapolated,
        completion_variance: completion,
    })
}
