use std::fmt;

use num_rational::Ratio;

use super::SymTerm;
use crate::scalar::Real;

/// Magnitude `O(h^h_power eps^eps_power)` of a term.
///
/// Purely descriptive: it drives pruning and diagnostics, nothing checks it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeTag {
    pub eps_power: Ratio<i64>,
    pub h_power: Ratio<i64>,
}

impl SizeTag {
    pub fn new(eps_power: Ratio<i64>, h_power: Ratio<i64>) -> Self {
        Self { eps_power, h_power }
    }

    /// Exponent `p` in `O(eps^p)` once `h = O(eps^sigma)`.
    pub fn sigma_exponent(&self, sigma: Ratio<i64>) -> Ratio<i64> {
        self.eps_power + sigma * self.h_power
    }

    /// The larger of two sizes for small `h`: lower `h` power wins, ties go to
    /// the lower `eps` power.
    pub fn max(self, other: Self) -> Self {
        if (self.h_power, self.eps_power) <= (other.h_power, other.eps_power) {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for SizeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O(h^{} eps^{})", self.h_power, self.eps_power)
    }
}

/// What the caller knows about the pieces of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeMeta {
    pub coeff_eps: Ratio<i64>,
    pub coeff_h: Ratio<i64>,
    pub f_h: Ratio<i64>,
}

impl SizeMeta {
    pub fn new(coeff_eps: i64, coeff_h: i64, f_h: i64) -> Self {
        Self { coeff_eps: Ratio::from(coeff_eps), coeff_h: Ratio::from(coeff_h), f_h: Ratio::from(f_h) }
    }
}

/// Each derivative in `<f>_k` costs one power of `eps` once discretised on a
/// grid resolving `eps`-wavelengths.
pub fn size_of<T: Real>(term: &SymTerm<T>, meta: SizeMeta) -> SizeTag {
    SizeTag { eps_power: meta.coeff_eps - Ratio::from(term.k as i64), h_power: meta.coeff_h + meta.f_h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, GridFunction};
    use num_complex::Complex;

    fn term(k: usize) -> SymTerm<f64> {
        let g = Grid::new(0.0, 1.0, 8).unwrap();
        SymTerm::new(Complex::new(0.0, 1.0), GridFunction::constant(&g, 1.0), k).unwrap()
    }

    #[test]
    fn kinetic_term() {
        let s = size_of(&term(2), SizeMeta::new(1, 1, 0));
        assert_eq!(s, SizeTag::new(Ratio::from(-1), Ratio::from(1)));
        // h = eps^sigma: leading terms are O(eps^(sigma - 1))
        assert_eq!(s.sigma_exponent(Ratio::new(1, 2)), Ratio::new(-1, 2));
    }

    #[test]
    fn potential_and_first_correction() {
        assert_eq!(size_of(&term(0), SizeMeta::new(-1, 0, 1)), SizeTag::new(Ratio::from(-1), Ratio::from(1)));
        assert_eq!(size_of(&term(1), SizeMeta::new(0, 0, 3)), SizeTag::new(Ratio::from(-1), Ratio::from(3)));
    }

    #[test]
    fn larger_of_two() {
        let a = SizeTag::new(Ratio::from(-1), Ratio::from(3));
        let b = SizeTag::new(Ratio::from(1), Ratio::from(3));
        let c = SizeTag::new(Ratio::from(-1), Ratio::from(5));
        assert_eq!(a.max(b), a);
        assert_eq!(c.max(a), a);
    }
}
