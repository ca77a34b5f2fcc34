//! Linear combinations of symmetrised operators `<f>_k = (f d^k + d^k f)/2`,
//! their commutators, and size bookkeeping.

mod apply;
mod rules;
mod size;

use std::fmt;

use num_complex::Complex;

pub use apply::{apply_symop, PreparedOp};
pub use rules::{bracket, commutator, nested_bracket};
pub use size::{size_of, SizeMeta, SizeTag};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{GridFunction, MAX_ORDER};

/// `coeff * <f>_k`.
#[derive(Clone, Debug)]
pub struct SymTerm<T: Real> {
    pub coeff: Complex<T>,
    pub f: GridFunction<T>,
    pub k: usize,
    pub size: Option<SizeTag>,
}

impl<T: Real> SymTerm<T> {
    pub fn new(coeff: Complex<T>, f: GridFunction<T>, k: usize) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order: k, max: MAX_ORDER });
        }
        Ok(Self { coeff, f, k, size: None })
    }

    pub fn real(coeff: T, f: GridFunction<T>, k: usize) -> Result<Self> {
        Self::new(Complex::new(coeff, T::zero()), f, k)
    }

    pub fn with_size(mut self, size: SizeTag) -> Self {
        self.size = Some(size);
        self
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { coeff: self.coeff * c, ..self.clone() }
    }

    fn is_zero(&self) -> bool {
        self.coeff == Complex::new(T::zero(), T::zero()) || self.f.is_zero()
    }
}

/// Matrix structure of a sum of symmetrised operators with real `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Hermitian,
    SkewHermitian,
    General,
}

#[derive(Clone, Debug)]
pub struct SymOpSum<T: Real> {
    terms: Vec<SymTerm<T>>,
}

impl<T: Real> Default for SymOpSum<T> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<T: Real> From<SymTerm<T>> for SymOpSum<T> {
    fn from(t: SymTerm<T>) -> Self {
        Self { terms: vec![t] }
    }
}

impl<T: Real> FromIterator<SymTerm<T>> for SymOpSum<T> {
    fn from_iter<I: IntoIterator<Item = SymTerm<T>>>(iter: I) -> Self {
        Self { terms: iter.into_iter().collect() }
    }
}

impl<T: Real> SymOpSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[SymTerm<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: SymTerm<T>) {
        self.terms.push(term);
    }

    /// Convenience for `coeff * <f>_k`.
    pub fn add_term(&mut self, coeff: Complex<T>, f: GridFunction<T>, k: usize) -> Result<()> {
        self.terms.push(SymTerm::new(coeff, f, k)?);
        Ok(())
    }

    pub fn extend(&mut self, other: SymOpSum<T>) {
        self.terms.extend(other.terms);
    }

    pub fn plus(mut self, other: &SymOpSum<T>) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        self.terms.iter().map(|t| t.scaled(c)).collect()
    }

    pub fn negated(&self) -> Self {
        self.scaled(Complex::new(-T::one(), T::zero()))
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.k).max()
    }

    /// Merges terms with equal order and bit-identical samples and drops zero
    /// terms. The first occurrence fixes the position of a merged term.
    pub fn collect(&self) -> Self {
        let mut out: Vec<SymTerm<T>> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match out.iter_mut().find(|o| o.k == t.k && o.f.same_samples(&t.f)) {
                Some(o) => {
                    o.coeff = o.coeff + t.coeff;
                    o.size = match (o.size, t.size) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        _ => None,
                    };
                }
                None => out.push(t.clone()),
            }
        }
        out.retain(|t| !t.is_zero());
        Self { terms: out }
    }

    /// Removes every size-tagged term whose magnitude `eps^(eps_power + sigma h_power)`
    /// is at or below `eps^threshold`.
    pub fn prune_by_sigma(&self, sigma: num_rational::Ratio<i64>, threshold: num_rational::Ratio<i64>) -> Self {
        self.terms
            .iter()
            .filter(|t| t.size.map_or(true, |s| s.sigma_exponent(sigma) < threshold))
            .cloned()
            .collect()
    }

    /// Structure of the discretised operator, assuming real `f`.
    pub fn structure(&self) -> Structure {
        let tol = T::epsilon();
        let mut herm = true;
        let mut skew = true;
        for t in &self.terms {
            let (re, im) = (num_traits::Float::abs(t.coeff.re), num_traits::Float::abs(t.coeff.im));
            let scale = re.max(im);
            let pure_real = im <= tol * scale;
            let pure_imag = re <= tol * scale;
            // <f>_k is Hermitian for even k, skew-Hermitian for odd k
            let (h, s) = if t.k % 2 == 0 { (pure_real, pure_imag) } else { (pure_imag, pure_real) };
            herm &= h;
            skew &= s;
        }
        // the zero operator counts as skew-Hermitian: it is mostly an exponent
        if skew {
            Structure::SkewHermitian
        } else if herm {
            Structure::Hermitian
        } else {
            Structure::General
        }
    }

    /// Multi-line listing, one `coeff * <label>_k` per term.
    pub fn pretty(&self) -> String {
        self.to_string()
    }
}

impl<T: Real> fmt::Display for SymOpSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for t in &self.terms {
            write!(f, "({:.6e}{:+.6e}i) * <{}>_{}", t.coeff.re, t.coeff.im, t.f.label(), t.k)?;
            if let Some(s) = t.size {
                write!(f, "    [{s}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn collect_merges_identical_samples() {
        let g = Grid::new(0.0_f64, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(&g, |x| x.sin()).with_label("f");
        let f2 = GridFunction::from_fn(&g, |x| x.sin()).with_label("f again");
        let h = GridFunction::from_fn(&g, |x| x.cos());
        let mut s = SymOpSum::new();
        s.add_term(Complex::new(1.0, 0.0), f.clone(), 1).unwrap();
        s.add_term(Complex::new(2.0, 0.0), h, 1).unwrap();
        s.add_term(Complex::new(0.5, 1.0), f2, 1).unwrap();
        s.add_term(Complex::new(3.0, 0.0), f.clone(), 2).unwrap();
        s.add_term(Complex::new(-3.0, 0.0), f, 2).unwrap();
        let c = s.collect();
        assert_eq!(c.len(), 2);
        assert_eq!(c.terms()[0].coeff, Complex::new(1.5, 1.0));
        assert_eq!(c.terms()[0].f.label(), "f");
    }

    #[test]
    fn order_above_six_is_rejected() {
        let g = Grid::new(0.0_f64, 1.0, 16).unwrap();
        let f = GridFunction::constant(&g, 1.0);
        assert!(matches!(SymTerm::real(1.0, f, 7), Err(Error::UnsupportedOrder { order: 7, .. })));
    }

    #[test]
    fn structure_from_parities() {
        let g = Grid::new(0.0_f64, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(&g, |x| x.sin());
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let skew: SymOpSum<f64> =
            [SymTerm::new(i, f.clone(), 2).unwrap(), SymTerm::new(one, f.clone(), 1).unwrap()].into_iter().collect();
        assert_eq!(skew.structure(), Structure::SkewHermitian);
        let herm: SymOpSum<f64> = SymTerm::new(one, f.clone(), 2).unwrap().into();
        assert_eq!(herm.structure(), Structure::Hermitian);
        let gen: SymOpSum<f64> = [SymTerm::new(one, f.clone(), 2).unwrap(), SymTerm::new(i, f, 2).unwrap()]
            .into_iter()
            .collect();
        assert_eq!(gen.structure(), Structure::General);
    }

    #[test]
    fn pretty_lists_terms() {
        let g = Grid::new(0.0_f64, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(&g, |x| x).with_label("mu00");
        let s: SymOpSum<f64> = SymTerm::real(-2.0, f, 1).unwrap().into();
        let text = s.pretty();
        assert!(text.contains("* <mu00>_1"), "{text}");
    }
}
