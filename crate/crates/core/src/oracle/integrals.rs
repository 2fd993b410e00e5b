//! Quadrature checks of the integral identities behind the closed forms, and
//! an independent assembly of the moments from the circular cumulant
//! integral.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{enumerate_sigma, Amplitude, GammaPair, SigmaVector};
use crate::quadrature::{integrate_endpoint_weighted, try_integrate_endpoint_weighted, QuadratureConfig};
use crate::scalar::Real;
use crate::special::{beta_checked, ln_gamma_unchecked};
use crate::sum::CompensatedSum;

/// `g(x, y) = A/2 (x₊^{γ1} y₊^{γ2} + x₊^{γ2} y₊^{γ1})`, zero unless both
/// arguments are positive.
pub fn kernel_g<T: Real>(p: &GammaPair<T>, amplitude: Amplitude<T>, x: T, y: T) -> T {
    if !(x > T::zero() && y > T::zero()) {
        return T::zero();
    }
    let (g1, g2) = (p.gamma1(), p.gamma2());
    // x^a y^b + x^b y^a summed in a fixed order so that g(x, y) == g(y, x)
    let u = x.powf(g1) * y.powf(g2);
    let v = x.powf(g2) * y.powf(g1);
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    amplitude.get() * T::lit(0.5) * (lo + hi)
}

/// Numeric value, closed form and the verdict of one identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome<T> {
    pub numeric: T,
    pub closed: T,
    /// `|numeric − closed|`
    pub error: T,
    /// `max(tol, tol · |closed|)`
    pub allowed: T,
    pub pass: bool,
}

impl<T: Real> CheckOutcome<T> {
    pub fn new(numeric: T, closed: T, tolerance: T) -> Self {
        let error = (numeric - closed).abs();
        let allowed = tolerance.max(tolerance * closed.abs());
        Self {
            numeric,
            closed,
            error,
            allowed,
            pass: error <= allowed,
        }
    }

    pub fn relative_error(&self) -> T {
        self.error / self.closed.abs()
    }
}

/// Closed form of `∫_ℝ (s1−u)₊^a (s2−u)₊^b du`:
/// `(s2−s1)₊^{a+b+1} B(a+1, −a−b−1) + (s1−s2)₊^{a+b+1} B(b+1, −a−b−1)`.
pub fn half_line_product_closed<T: Real>(a: T, b: T, s1: T, s2: T) -> Result<T> {
    check_half_line_args(a, b, s1, s2)?;
    let one = T::one();
    let e = a + b + one;
    Ok(if s1 < s2 {
        (s2 - s1).powf(e) * beta_checked(a + one, -e)?
    } else {
        (s1 - s2).powf(e) * beta_checked(b + one, -e)?
    })
}

fn check_half_line_args<T: Real>(a: T, b: T, s1: T, s2: T) -> Result<()> {
    let half = T::lit(-0.5);
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > -T::one() && v < half) {
            return Err(Error::domain(format!(
                "{name} must lie in the open interval (−1, −1/2) (got {v})"
            )));
        }
    }
    if s1 == s2 || !(s1.is_finite() && s2.is_finite()) {
        return Err(Error::domain("s1 and s2 must be distinct finite reals"));
    }
    Ok(())
}

/// Quadrature of `∫_ℝ (s1−u)₊^a (s2−u)₊^b du`.
///
/// With `d = min(s1,s2) − u` and `Δ = |s2 − s1|` the integral is
/// `∫_0^∞ d^c (d+Δ)^e dd`, `c` the exponent attached to the smaller `s`.
/// It is split at `R = truncation_radius · Δ`; the tail is folded onto
/// `(0, 1]` with `d = R/t`, giving `R^{c+e+1} ∫_0^1 t^{−c−e−2} (1+Δt/R)^e dt`,
/// whose endpoint exponent lies in `(−1, 0)`.
pub fn half_line_product_numeric<T: Real>(
    a: T,
    b: T,
    s1: T,
    s2: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    check_half_line_args(a, b, s1, s2)?;
    let one = T::one();
    let (c, e) = if s1 < s2 { (a, b) } else { (b, a) };
    let delta = (s2 - s1).abs();
    let r = cfg.truncation_radius * delta;
    let head = integrate_endpoint_weighted(cfg, T::zero(), r, c, T::zero(), |d, _, _| {
        (d + delta).powf(e)
    })?;
    let tail = integrate_endpoint_weighted(cfg, T::zero(), one, -c - e - T::lit(2.0), T::zero(), |t, _, _| {
        (one + delta * t / r).powf(e)
    })?;
    Ok(head.value + r.powf(c + e + one) * tail.value)
}

/// Checks the half-line product identity at `(a, b, s1, s2)`.
pub fn check_half_line_product<T: Real>(
    a: T,
    b: T,
    s1: T,
    s2: T,
    cfg: &QuadratureConfig<T>,
    tolerance: T,
) -> Result<CheckOutcome<T>> {
    let closed = half_line_product_closed(a, b, s1, s2)?;
    let numeric = half_line_product_numeric(a, b, s1, s2, cfg)?;
    Ok(CheckOutcome::new(numeric, closed, tolerance))
}

/// Checks `∫_x^y (u−x)^a (y−u)^b du = (y−x)^{a+b+1} B(a+1, b+1)`.
pub fn check_interval_product<T: Real>(
    a: T,
    b: T,
    x: T,
    y: T,
    cfg: &QuadratureConfig<T>,
    tolerance: T,
) -> Result<CheckOutcome<T>> {
    let one = T::one();
    if !(a > -one && b > -one) {
        return Err(Error::domain(format!("exponents must exceed −1 (got {a}, {b})")));
    }
    if !(x < y) {
        return Err(Error::domain(format!("need x < y (got {x}, {y})")));
    }
    let closed = (y - x).powf(a + b + one) * beta_checked(a + one, b + one)?;
    let numeric = integrate_endpoint_weighted(cfg, x, y, a, b, |_, _, _| one)?.value;
    Ok(CheckOutcome::new(numeric, closed, tolerance))
}

/// Exponents `(β1, …, βm)` of an ordered-simplex integral, `m ∈ {2, 3}`,
/// with every `βj > −1` and `Σβ + m > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaExponents<T> {
    betas: Vec<T>,
}

impl<T: Real> BetaExponents<T> {
    pub fn new(betas: &[T]) -> Result<Self> {
        let m = betas.len();
        if !(m == 2 || m == 3) {
            return Err(Error::domain(format!(
                "simplex integrals are supported for m ∈ {{2, 3}} (got {m})"
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > -T::one())) {
            return Err(Error::domain(format!("every exponent must exceed −1 (got {b})")));
        }
        let total = betas.iter().fold(T::zero(), |a, &b| a + b);
        if !(total + T::from_usize_lossy(m) > T::one()) {
            return Err(Error::domain(format!(
                "need β1 + … + βm + m > 1 (got {})",
                total + T::from_usize_lossy(m)
            )));
        }
        Ok(Self {
            betas: betas.to_vec(),
        })
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }

    pub fn order(&self) -> usize {
        self.betas.len()
    }

    fn total(&self) -> T {
        self.betas.iter().fold(T::zero(), |a, &b| a + b)
    }
}

/// Closed form of
/// `∫_{0<s1<…<sm<1} (sm−s1)^{β1} (s2−s1)^{β2} ⋯ (sm−s_{m−1})^{βm} ds`:
///
/// `(m+Σβ)^{-1} (m−1+Σβ)^{-1} Γ(β2+1)⋯Γ(βm+1) / Γ(β2+⋯+βm+m−1)`.
pub fn simplex_integral_closed<T: Real>(b: &BetaExponents<T>) -> T {
    let one = T::one();
    let m = T::from_usize_lossy(b.order());
    let total = b.total();
    let rest = &b.betas()[1..];
    let rest_sum = rest.iter().fold(T::zero(), |a, &x| a + x);
    let ln_num = rest
        .iter()
        .map(|&x| ln_gamma_unchecked(x + one))
        .fold(T::zero(), |a, x| a + x);
    let ln_ratio = ln_num - ln_gamma_unchecked(rest_sum + m - one);
    ln_ratio.exp() / ((m + total) * (m - one + total))
}

/// Quadrature value of the same simplex integral.
///
/// Scaling out `s_m` (`u_i = s_i/s_m`) separates the integral into
/// `∫_0^1 s^{Σβ+m−1} ds` times an `(m−1)`-dimensional integral over
/// `0 < u1 < … < u_{m−1} < 1`; each one-dimensional layer is integrated with
/// its endpoint singularities handled by the quadrature scheme.
pub fn simplex_integral_numeric<T: Real>(
    b: &BetaExponents<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let one = T::one();
    let zero = T::zero();
    let m = b.order();
    let total = b.total();
    let scale = integrate_endpoint_weighted(
        cfg,
        zero,
        one,
        total + T::from_usize_lossy(m) - one,
        zero,
        |_, _, _| one,
    )?
    .value;
    let beta = b.betas();
    let inner = match m {
        // ∫_0^1 (1−u)^{β1+β2} du
        2 => integrate_endpoint_weighted(cfg, zero, one, zero, beta[0] + beta[1], |_, _, _| one)?.value,
        // ∫_0^1 (1−u1)^{β1} ∫_{u1}^1 (u2−u1)^{β2} (1−u2)^{β3} du2 du1
        3 => {
            let inner_cfg = cfg.scaled_tolerances(T::lit(0.1));
            let inner_degree = beta[1] + beta[2] + one;
            // the inner integral scales like L^{β2+β3+1}; that power is moved
            // into the outer endpoint weight
            try_integrate_endpoint_weighted(
                cfg,
                zero,
                one,
                zero,
                beta[0] + inner_degree,
                |_, _, len| {
                    // the ratio is scale invariant, so a closed-rule node at
                    // u1 = 1 is evaluated on a short positive interval
                    let len = len.max(T::epsilon());
                    let v = integrate_endpoint_weighted(&inner_cfg, zero, len, beta[1], beta[2], |_, _, _| one)?
                        .value;
                    Ok(v / len.powf(inner_degree))
                },
            )?
            .value
        }
        _ => unreachable!("order validated"),
    };
    Ok(scale * inner)
}

/// Simplex exponents for the σ-term: `β1 = γ_{σm′} + γ_{σ1} + 1`,
/// `βi = γ_{σ(i−1)′} + γ_{σi} + 1`.
pub fn j_sigma_exponents<T: Real>(p: &GammaPair<T>, sigma: &SigmaVector) -> Result<BetaExponents<T>> {
    let m = sigma.len();
    let one = T::one();
    let mut betas = Vec::with_capacity(m);
    betas.push(p.gamma(sigma.complement_at(m)) + p.gamma(sigma.at(1)) + one);
    for i in 2..=m {
        betas.push(p.gamma(sigma.complement_at(i - 1)) + p.gamma(sigma.at(i)) + one);
    }
    BetaExponents::new(&betas)
}

/// `J_σ` from the closed simplex formula.
pub fn j_sigma<T: Real>(p: &GammaPair<T>, sigma: &SigmaVector) -> T {
    let b = j_sigma_exponents(p, sigma).expect("σ-exponents satisfy the simplex constraints on the domain");
    simplex_integral_closed(&b)
}

/// `J_σ` by quadrature.
pub fn j_sigma_numeric<T: Real>(
    p: &GammaPair<T>,
    sigma: &SigmaVector,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    simplex_integral_numeric(&j_sigma_exponents(p, sigma)?, cfg)
}

/// Product of the beta prefactors of the σ-term:
/// `B(γ_{σ1}+1, −γ_{σm′}−γ_{σ1}−1) ∏_{i=2}^m B(γ_{σ(i−1)′}+1, −γ_{σ(i−1)′}−γ_{σi}−1)`.
pub fn sigma_prefactor<T: Real>(p: &GammaPair<T>, sigma: &SigmaVector) -> T {
    let m = sigma.len();
    let one = T::one();
    let first = sigma.at(1);
    let last_c = sigma.complement_at(m);
    let mut prod = beta_checked(p.gamma(first) + one, -p.gamma(last_c) - p.gamma(first) - one)
        .expect("positive on the domain");
    for i in 2..=m {
        let prev_c = p.gamma(sigma.complement_at(i - 1));
        let cur = p.gamma(sigma.at(i));
        prod = prod * beta_checked(prev_c + one, -prev_c - cur - one).expect("positive on the domain");
    }
    prod
}

/// One summand `prefactor(σ) · J_σ` of the cumulant integral, without the
/// `m! A^m 2^{−m}` factor.
pub fn cumulant_term<T: Real>(p: &GammaPair<T>, sigma: &SigmaVector) -> T {
    sigma_prefactor(p, sigma) * j_sigma(p, sigma)
}

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

/// `m! A^m 2^{−m} Σ_σ prefactor(σ) · J_σ` with `J_σ` supplied by `j`.
pub fn cumulant_integral_with<T, J>(p: &GammaPair<T>, amplitude: Amplitude<T>, m: usize, mut j: J) -> Result<T>
where
    T: Real,
    J: FnMut(&SigmaVector) -> Result<T>,
{
    let mut acc = CompensatedSum::new();
    for sigma in enumerate_sigma(m)? {
        acc.add(sigma_prefactor(p, &sigma) * j(&sigma)?);
    }
    let mf = T::from_usize_lossy(factorial(m));
    let amp = amplitude.get().powi(m as i32);
    Ok(mf * amp * T::lit(2.0).powi(-(m as i32)) * acc.total())
}

/// The circular cumulant integral `c_m`, `m ∈ {2, 3}`, with closed-form `J_σ`.
pub fn cumulant_integral<T: Real>(p: &GammaPair<T>, amplitude: Amplitude<T>, m: usize) -> Result<T> {
    cumulant_integral_with(p, amplitude, m, |s| Ok(j_sigma(p, s)))
}

/// `μ_m = 2^{m−1} (m−1)! c_m`.
pub fn moment_from_cumulant_integral<T: Real>(m: usize, c_m: T) -> T {
    T::lit(2.0).powi(m as i32 - 1) * T::from_usize_lossy(factorial(m - 1)) * c_m
}

/// `μ_m` through the cumulant-integral route with closed-form `J_σ`.
pub fn moment_semianalytic<T: Real>(p: &GammaPair<T>, amplitude: Amplitude<T>, m: usize) -> Result<T> {
    Ok(moment_from_cumulant_integral(m, cumulant_integral(p, amplitude, m)?))
}

/// `μ_m` through the cumulant-integral route with every `J_σ` computed by
/// quadrature.
pub fn moment_quadrature<T: Real>(
    p: &GammaPair<T>,
    amplitude: Amplitude<T>,
    m: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let c = cumulant_integral_with(p, amplitude, m, |s| j_sigma_numeric(p, s, cfg))?;
    Ok(moment_from_cumulant_integral(m, c))
}
