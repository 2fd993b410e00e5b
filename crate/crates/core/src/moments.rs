//! Closed-form second and third moments of `Z_{γ1,γ2}(1)`.
//!
//! With `α = γ1 + γ2` the variance is
//!
//! ```text
//! μ2 = A² / ((α+2)(2α+3)) · D,
//! D  = B(γ1+1, −α−1) B(γ2+1, −α−1) + B(γ1+1, −2γ1−1) B(γ2+1, −2γ2−1),
//! ```
//!
//! and the third moment is `μ3 = 2A³ / ((α+2)(3α+5)) · S`, where `S` sums
//! four-beta products over `σ ∈ {1,2}³` (see [`MU3_FACTORS`]). Fixing `A` so
//! that `μ2 = 1` gives the standardized third moment `M3 = F1 · F2 · F3` with
//! `F1 = 2(α+2)^{1/2}(2α+3)^{3/2}/(3α+5)`, `F2 = S` and `F3 = D^{-3/2}`.
//!
//! Every beta product is formed as `exp(Σ ln B)` and the σ-sum uses
//! compensated summation.

use serde::Serialize;

use crate::params::{enumerate_sigma, Amplitude, GammaPair, SigmaVector};
use crate::scalar::Real;
use crate::special::ln_beta_unchecked;
use crate::sum::CompensatedSum;

/// Reference to `σ_i` or `σ′_i` (1-based `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Sigma(usize),
    Complement(usize),
}

/// Linear form `sign · Σ γ_slot + shift` giving one beta argument.
#[derive(Debug, Clone, Copy)]
pub struct BetaArg {
    pub sign: i8,
    pub slots: &'static [Slot],
    pub shift: f64,
}

/// One factor `B(x, y)` of a σ-term.
#[derive(Debug, Clone, Copy)]
pub struct BetaFactor {
    pub x: BetaArg,
    pub y: BetaArg,
}

use Slot::{Complement as C, Sigma as S};

const fn arg(sign: i8, slots: &'static [Slot], shift: f64) -> BetaArg {
    BetaArg { sign, slots, shift }
}

/// The four beta factors of each σ-term of the third moment:
///
/// ```text
/// B(γ_{σ1}+1,  −γ_{σ1}−γ_{σ3′}−1)
/// B(γ_{σ1′}+1, −γ_{σ1′}−γ_{σ2}−1)
/// B(γ_{σ2′}+1, −γ_{σ2′}−γ_{σ3}−1)
/// B(γ_{σ1′}+γ_{σ2}+2, γ_{σ2′}+γ_{σ3}+2)
/// ```
pub const MU3_FACTORS: [BetaFactor; 4] = [
    BetaFactor {
        x: arg(1, &[S(1)], 1.0),
        y: arg(-1, &[S(1), C(3)], -1.0),
    },
    BetaFactor {
        x: arg(1, &[C(1)], 1.0),
        y: arg(-1, &[C(1), S(2)], -1.0),
    },
    BetaFactor {
        x: arg(1, &[C(2)], 1.0),
        y: arg(-1, &[C(2), S(3)], -1.0),
    },
    BetaFactor {
        x: arg(1, &[C(1), S(2)], 2.0),
        y: arg(1, &[C(2), S(3)], 2.0),
    },
];

impl BetaArg {
    fn eval<T: Real>(&self, p: &GammaPair<T>, sigma: &SigmaVector) -> T {
        let mut acc = T::zero();
        for slot in self.slots {
            let idx = match *slot {
                Slot::Sigma(i) => sigma.at(i),
                Slot::Complement(i) => sigma.complement_at(i),
            };
            acc += p.gamma(idx);
        }
        let signed = if self.sign < 0 { -acc } else { acc };
        signed + T::lit(self.shift)
    }
}

impl BetaFactor {
    /// `(x, y)` for this factor at `(p, σ)`.
    pub fn arguments<T: Real>(&self, p: &GammaPair<T>, sigma: &SigmaVector) -> (T, T) {
        (self.x.eval(p, sigma), self.y.eval(p, sigma))
    }
}

/// `ln` of the σ-term `∏ B(·,·)` of the third moment.
pub fn mu3_log_term<T: Real>(p: &GammaPair<T>, sigma: &SigmaVector) -> T {
    MU3_FACTORS
        .iter()
        .map(|f| {
            let (x, y) = f.arguments(p, sigma);
            debug_assert!(x > T::zero() && y > T::zero());
            ln_beta_unchecked(x, y)
        })
        .fold(T::zero(), |a, b| a + b)
}

/// `D`, the beta bracket shared by `μ2`, `A(γ1,γ2)` and `F3`.
pub fn variance_bracket<T: Real>(p: &GammaPair<T>) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let (g1, g2) = (p.gamma1(), p.gamma2());
    let a = p.alpha();
    let cross = ln_beta_unchecked(g1 + one, -a - one) + ln_beta_unchecked(g2 + one, -a - one);
    let diag =
        ln_beta_unchecked(g1 + one, -two * g1 - one) + ln_beta_unchecked(g2 + one, -two * g2 - one);
    let mut s = CompensatedSum::new();
    s.add(cross.exp());
    s.add(diag.exp());
    s.total()
}

/// Second moment (variance) of `Z_{γ1,γ2}(1)` at amplitude `A`.
pub fn mu2<T: Real>(p: &GammaPair<T>, amplitude: Amplitude<T>) -> T {
    let a = p.alpha();
    let two = T::lit(2.0);
    let amp = amplitude.get();
    amp * amp / ((a + two) * (two * a + T::lit(3.0))) * variance_bracket(p)
}

/// The positive amplitude `A(γ1, γ2)` for which `μ2 = 1`.
pub fn normalization_a<T: Real>(p: &GammaPair<T>) -> T {
    let a = p.alpha();
    let two = T::lit(2.0);
    ((a + two) * (two * a + T::lit(3.0)) / variance_bracket(p)).sqrt()
}

/// The σ-sum `S` of the third moment, equal to `F2`.
pub fn sigma_sum<T: Real>(p: &GammaPair<T>) -> T {
    enumerate_sigma(3)
        .expect("m = 3")
        .iter()
        .map(|s| mu3_log_term(p, s).exp())
        .collect::<CompensatedSum<T>>()
        .total()
}

/// Third moment of `Z_{γ1,γ2}(1)` at amplitude `A`.
pub fn mu3<T: Real>(p: &GammaPair<T>, amplitude: Amplitude<T>) -> T {
    let a = p.alpha();
    let two = T::lit(2.0);
    let amp = amplitude.get();
    two * amp * amp * amp / ((a + two) * (T::lit(3.0) * a + T::lit(5.0))) * sigma_sum(p)
}

/// `F1 = 2(α+2)^{1/2}(2α+3)^{3/2}/(3α+5)`, a function of `α` alone.
pub fn f1<T: Real>(p: &GammaPair<T>) -> T {
    let a = p.alpha();
    let two = T::lit(2.0);
    two * (a + two).sqrt() * (two * a + T::lit(3.0)).powf(T::lit(1.5))
        / (T::lit(3.0) * a + T::lit(5.0))
}

pub fn f2<T: Real>(p: &GammaPair<T>) -> T {
    sigma_sum(p)
}

/// `F3 = D^{-3/2}`.
pub fn f3<T: Real>(p: &GammaPair<T>) -> T {
    variance_bracket(p).powf(T::lit(-1.5))
}

/// Third moment of the standardized variable (unit variance, `A > 0`).
pub fn standardized_m3<T: Real>(p: &GammaPair<T>) -> T {
    f1(p) * f2(p) * f3(p)
}

/// All moments at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub pair: GammaPair<T>,
    pub amplitude: T,
    pub mu1: T,
    pub mu2: T,
    pub mu3: T,
    pub m3_standardized: T,
    pub f1: T,
    pub f2: T,
    pub f3: T,
}

/// Moments at `p`; the amplitude defaults to the standardizing `A(γ1,γ2)`.
pub fn report<T: Real>(p: &GammaPair<T>, amplitude: Option<Amplitude<T>>) -> MomentReport<T> {
    let amplitude = amplitude.unwrap_or_else(|| {
        Amplitude::new(normalization_a(p)).expect("normalization is finite and positive")
    });
    let (f1, f2, f3) = (f1(p), f2(p), f3(p));
    MomentReport {
        pair: *p,
        amplitude: amplitude.get(),
        mu1: T::zero(),
        mu2: mu2(p, amplitude),
        mu3: mu3(p, amplitude),
        m3_standardized: f1 * f2 * f3,
        f1,
        f2,
        f3,
    }
}
