//! Parameter domain of the generalized Rosenblatt distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponent pair `(γ1, γ2)` with `γi ∈ (-1, -1/2)` and `γ1 + γ2 > -3/2`.
///
/// Validation is exact: points such as `γ1 = -0.505` are accepted, `-0.5`
/// is not. Construct with [`GammaPair::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPair<T> {
    gamma1: T,
    gamma2: T,
}

impl<T: Real> GammaPair<T> {
    pub fn new(gamma1: T, gamma2: T) -> Result<Self> {
        check_exponent("γ1", gamma1)?;
        check_exponent("γ2", gamma2)?;
        let sum = gamma1 + gamma2;
        if !(sum > T::lit(-1.5)) {
            return Err(Error::domain(format!(
                "γ1 + γ2 must exceed −3/2 (got {gamma1} + {gamma2} = {sum})"
            )));
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// `(γ1, α − γ1)`, the parameterization used along lines of constant
    /// Hurst index.
    pub fn from_alpha(alpha: T, gamma1: T) -> Result<Self> {
        Self::new(gamma1, alpha - gamma1)
    }

    #[inline]
    pub fn gamma1(&self) -> T {
        self.gamma1
    }

    #[inline]
    pub fn gamma2(&self) -> T {
        self.gamma2
    }

    /// Exponent selected by a σ-entry: 1 → γ1, 2 → γ2.
    #[inline]
    pub fn gamma(&self, index: SigmaIndex) -> T {
        match index {
            SigmaIndex::One => self.gamma1,
            SigmaIndex::Two => self.gamma2,
        }
    }

    /// Homogeneity degree of the kernel, `α = γ1 + γ2 ∈ (-3/2, -1)`.
    #[inline]
    pub fn alpha(&self) -> T {
        self.gamma1 + self.gamma2
    }

    /// Hurst index `H = α + 2 ∈ (1/2, 1)`.
    #[inline]
    pub fn hurst(&self) -> T {
        self.alpha() + T::lit(2.0)
    }

    /// The pair with `γ1` and `γ2` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            gamma1: self.gamma2,
            gamma2: self.gamma1,
        }
    }
}

fn check_exponent<T: Real>(name: &str, g: T) -> Result<()> {
    if g > -T::one() && g < T::lit(-0.5) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must lie in the open interval (−1, −1/2) (got {g})"
        )))
    }
}

/// Validated pair from raw exponents.
pub fn make_gamma_pair<T: Real>(g1: T, g2: T) -> Result<GammaPair<T>> {
    GammaPair::new(g1, g2)
}

pub fn alpha<T: Real>(p: &GammaPair<T>) -> T {
    p.alpha()
}

pub fn hurst<T: Real>(p: &GammaPair<T>) -> T {
    p.hurst()
}

pub fn pair_from_alpha<T: Real>(alpha: T, gamma1: T) -> Result<GammaPair<T>> {
    GammaPair::from_alpha(alpha, gamma1)
}

/// `α = H − 2`, rejecting Hurst indices outside `(1/2, 1)`.
pub fn alpha_from_hurst<T: Real>(h: T) -> Result<T> {
    if h > T::lit(0.5) && h < T::one() {
        Ok(h - T::lit(2.0))
    } else {
        Err(Error::domain(format!(
            "Hurst index must lie in the open interval (1/2, 1) (got {h})"
        )))
    }
}

/// Checks `α ∈ (−3/2, −1)`.
pub fn check_alpha<T: Real>(alpha: T) -> Result<T> {
    if alpha > T::lit(-1.5) && alpha < -T::one() {
        Ok(alpha)
    } else {
        Err(Error::domain(format!(
            "α must lie in the open interval (−3/2, −1) (got {alpha})"
        )))
    }
}

/// Nonzero amplitude `A` multiplying the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude<T>(T);

impl<T: Real> Amplitude<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_finite() && value != T::zero() {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!(
                "amplitude must be finite and nonzero (got {value})"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// One entry of a σ-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SigmaIndex {
    One,
    Two,
}

impl SigmaIndex {
    /// `σ′ = 3 − σ`.
    #[inline]
    pub fn complement(self) -> Self {
        match self {
            SigmaIndex::One => SigmaIndex::Two,
            SigmaIndex::Two => SigmaIndex::One,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            SigmaIndex::One => 1,
            SigmaIndex::Two => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(SigmaIndex::One),
            2 => Ok(SigmaIndex::Two),
            _ => Err(Error::domain(format!("σ entries must be 1 or 2 (got {v})"))),
        }
    }
}

/// Element of `{1, 2}^m` for `m ∈ {2, 3}`.
///
/// Longer vectors are not representable: the cumulant integrand is only
/// symmetric in its time arguments for orders two and three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaVector {
    entries: [SigmaIndex; 3],
    len: u8,
}

impl SigmaVector {
    pub fn new(entries: &[SigmaIndex]) -> Result<Self> {
        check_order(entries.len())?;
        let mut e = [SigmaIndex::One; 3];
        e[..entries.len()].copy_from_slice(entries);
        Ok(Self {
            entries: e,
            len: entries.len() as u8,
        })
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let idx = digits
            .iter()
            .map(|&d| SigmaIndex::from_u8(d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&idx)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn entries(&self) -> &[SigmaIndex] {
        &self.entries[..self.len()]
    }

    /// `σ_i` with 1-based `i`.
    #[inline]
    pub fn at(&self, i: usize) -> SigmaIndex {
        self.entries()[i - 1]
    }

    /// `σ′_i` with 1-based `i`.
    #[inline]
    pub fn complement_at(&self, i: usize) -> SigmaIndex {
        self.at(i).complement()
    }

    pub fn complement(&self) -> Self {
        let mut out = *self;
        for e in out.entries.iter_mut().take(self.len()) {
            *e = e.complement();
        }
        out
    }

    pub fn digits(&self) -> Vec<u8> {
        self.entries().iter().map(|e| e.as_u8()).collect()
    }
}

fn check_order(m: usize) -> Result<()> {
    if m == 2 || m == 3 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "σ-vectors are defined for m ∈ {{2, 3}} only (got m = {m})"
        )))
    }
}

/// All `2^m` σ-vectors in lexicographic order, `(1,…,1)` first.
pub fn enumerate_sigma(m: usize) -> Result<Vec<SigmaVector>> {
    check_order(m)?;
    Ok((0..1usize << m)
        .map(|bits| {
            let idx: Vec<SigmaIndex> = (0..m)
                .map(|i| {
                    if bits >> (m - 1 - i) & 1 == 0 {
                        SigmaIndex::One
                    } else {
                        SigmaIndex::Two
                    }
                })
                .collect();
            SigmaVector::new(&idx).expect("order checked")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn accepts_table_points() {
        let p = make_gamma_pair(-0.7f64, -0.7).unwrap();
        assert!((alpha(&p) + 1.4).abs() < 1e-15);
        assert!((hurst(&p) - 0.6).abs() < 1e-15);
        assert!(make_gamma_pair(-0.505, -0.895).is_ok());
    }

    #[test]
    fn boundary_is_excluded() {
        let e = make_gamma_pair(-0.5, -0.7).unwrap_err();
        assert!(e.to_string().contains("γ1 must lie in the open interval (−1, −1/2)"));
        let e = make_gamma_pair(-0.7, -1.0).unwrap_err();
        assert!(e.to_string().contains("γ2"));
        let e = make_gamma_pair(-0.9, -0.7).unwrap_err();
        assert!(e.to_string().contains("−3/2"));
        assert!(make_gamma_pair(-0.75, -0.75).is_err());
        assert!(make_gamma_pair(f64::NAN, -0.7).is_err());
    }

    #[test]
    fn alpha_and_hurst_examples() {
        let cases = [
            ((-0.65, -0.65), -1.3, 0.7),
            ((-0.6, -0.6), -1.2, 0.8),
            ((-0.55, -0.55), -1.1, 0.9),
            ((-0.505, -0.595), -1.1, 0.9),
        ];
        for ((g1, g2), a, h) in cases {
            let p: GammaPair<f64> = make_gamma_pair(g1, g2).unwrap();
            assert!((p.alpha() - a).abs() < 1e-15);
            assert!((p.hurst() - h).abs() < 1e-15);
        }
    }

    #[test]
    fn from_alpha_examples() {
        let p = pair_from_alpha(-1.4f64, -0.678).unwrap();
        assert_eq!(p.gamma1(), -0.678);
        assert!((p.gamma2() + 0.722).abs() < 1e-15);
        let p = pair_from_alpha(-1.3f64, -0.505).unwrap();
        assert!((p.gamma2() + 0.795).abs() < 1e-15);
        assert!(pair_from_alpha(-1.2, -0.7).is_err());
    }

    #[test]
    fn hurst_conversion() {
        assert_eq!(alpha_from_hurst(0.6).unwrap(), 0.6 - 2.0);
        assert!(alpha_from_hurst(0.5).is_err());
        assert!(alpha_from_hurst(1.0).is_err());
        assert!(check_alpha(-1.5).is_err());
        assert!(check_alpha(-1.0).is_err());
    }

    #[test]
    fn amplitude_nonzero() {
        assert!(Amplitude::new(0.0).is_err());
        assert!(Amplitude::new(f64::INFINITY).is_err());
        assert_eq!(Amplitude::new(-2.0).unwrap().get(), -2.0);
    }

    #[test]
    fn sigma_enumeration() {
        let s2: Vec<Vec<u8>> = enumerate_sigma(2).unwrap().iter().map(|s| s.digits()).collect();
        assert_eq!(s2, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        let s3 = enumerate_sigma(3).unwrap();
        assert_eq!(s3.len(), 8);
        assert_eq!(s3[0].digits(), vec![1, 1, 1]);
        assert_eq!(s3[7].digits(), vec![2, 2, 2]);
        assert!(s3.windows(2).all(|w| w[0] < w[1]));
        assert!(enumerate_sigma(4).is_err());
        assert!(enumerate_sigma(1).is_err());
    }

    #[test]
    fn sigma_complement() {
        let s = SigmaVector::from_digits(&[1, 2, 1]).unwrap();
        assert_eq!(s.complement().digits(), vec![2, 1, 2]);
        assert_eq!(s.complement_at(2), SigmaIndex::One);
        assert!(SigmaVector::from_digits(&[1, 3]).is_err());
        for m in [2, 3] {
            let all = enumerate_sigma(m).unwrap();
            let set: HashSet<SigmaVector> = all.iter().copied().collect();
            let image: HashSet<SigmaVector> = all.iter().map(|s| s.complement()).collect();
            assert_eq!(set.len(), 1 << m);
            assert_eq!(set, image);
            assert!(all.iter().all(|s| s.complement().complement() == *s));
        }
    }

    fn valid_pair() -> impl Strategy<Value = GammaPair<f64>> {
        (-0.999f64..-0.501, -0.999f64..-0.501)
            .prop_filter_map("sum constraint", |(a, b)| GammaPair::new(a, b).ok())
    }

    proptest! {
        #[test]
        fn hurst_in_range(p in valid_pair()) {
            let h = p.hurst();
            prop_assert_eq!(h, p.alpha() + 2.0);
            prop_assert!(h > 0.5 && h < 1.0);
        }

        // α − γ1 is only correctly rounded, so γ2 comes back within one ulp.
        #[test]
        fn from_alpha_round_trip(p in valid_pair()) {
            let q = pair_from_alpha(p.alpha(), p.gamma1()).unwrap();
            prop_assert_eq!(q.gamma1(), p.gamma1());
            prop_assert!((q.gamma2() - p.gamma2()).abs() <= f64::EPSILON);
        }
    }
}
