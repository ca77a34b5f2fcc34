use std::sync::Arc;

use num_complex::Complex;

use super::SymOpSum;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::{Grid, Wavefunction};

/// A [`SymOpSum`] with its terms grouped by order, ready for repeated
/// application (e.g. as a Lanczos matvec).
///
/// With `g_k = sum coeff * f` over the terms of order `k`,
/// `S v = g_0 v + 1/2 sum_k g_k F^-1(c_k F v) + 1/2 F^-1 sum_k c_k F(g_k v)`,
/// which costs `2n + 2` transforms for `n` distinct orders `k >= 1`.
#[derive(Clone, Debug)]
pub struct PreparedOp<T: Real> {
    grid: Arc<Grid<T>>,
    g0: Option<Vec<Complex<T>>>,
    orders: Vec<(usize, Vec<Complex<T>>)>,
}

impl<T: Real> PreparedOp<T> {
    pub fn new(op: &SymOpSum<T>, grid: &Arc<Grid<T>>) -> Result<Self> {
        let n = grid.len();
        let mut g0: Option<Vec<Complex<T>>> = None;
        let mut orders: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
        for t in op.terms() {
            grid.check_same(t.f.grid(), "symmetrised operator term")?;
            grid.symbol(t.k)?;
            let slot = if t.k == 0 {
                g0.get_or_insert_with(|| vec![Complex::new(T::zero(), T::zero()); n])
            } else {
                let pos = match orders.iter().position(|(k, _)| *k == t.k) {
                    Some(p) => p,
                    None => {
                        orders.push((t.k, vec![Complex::new(T::zero(), T::zero()); n]));
                        orders.len() - 1
                    }
                };
                &mut orders[pos].1
            };
            for (s, &f) in slot.iter_mut().zip(t.f.values()) {
                *s = *s + t.coeff * f;
            }
        }
        orders.sort_by_key(|(k, _)| *k);
        Ok(Self { grid: Arc::clone(grid), g0, orders })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    /// `(k, g_k)` for every order present, `k = 0` first.
    pub fn grouped(&self) -> Vec<(usize, &[Complex<T>])> {
        let mut out: Vec<(usize, &[Complex<T>])> = Vec::new();
        if let Some(g) = &self.g0 {
            out.push((0, g));
        }
        out.extend(self.orders.iter().map(|(k, g)| (*k, g.as_slice())));
        out
    }

    /// Number of FFTs one application costs.
    pub fn transforms_per_apply(&self) -> usize {
        if self.orders.is_empty() {
            0
        } else {
            2 * self.orders.len() + 2
        }
    }

    pub fn apply(&self, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
        self.grid.check_same(u.grid(), "operator application")?;
        let zero = Complex::new(T::zero(), T::zero());
        let half = T::lit(0.5);
        let v = u.values();
        let mut out = match &self.g0 {
            Some(g) => g.iter().zip(v).map(|(&a, &b)| a * b).collect(),
            None => vec![zero; v.len()],
        };
        if !self.orders.is_empty() {
            let mut v_hat = v.to_vec();
            self.grid.forward(&mut v_hat);
            let mut acc_hat = vec![zero; v.len()];
            let mut tmp = vec![zero; v.len()];
            for (k, g) in &self.orders {
                let c = self.grid.symbol(*k)?;
                // post-multiplication: g_k * d^k v
                for ((t, &a), &ck) in tmp.iter_mut().zip(&v_hat).zip(c) {
                    *t = a * ck;
                }
                self.grid.inverse(&mut tmp);
                for ((o, &gk), &t) in out.iter_mut().zip(g).zip(&tmp) {
                    *o = *o + gk * t * half;
                }
                // pre-multiplication: d^k (g_k v), summed in frequency space
                for ((t, &gk), &a) in tmp.iter_mut().zip(g).zip(v) {
                    *t = gk * a;
                }
                self.grid.forward(&mut tmp);
                for ((s, &t), &ck) in acc_hat.iter_mut().zip(&tmp).zip(c) {
                    *s = *s + t * ck;
                }
            }
            self.grid.inverse(&mut acc_hat);
            for (o, &a) in out.iter_mut().zip(&acc_hat) {
                *o = *o + a * half;
            }
        }
        Wavefunction::new(&self.grid, out)
    }
}

/// `S u` for a sum of symmetrised operators.
pub fn apply_symop<T: Real>(op: &SymOpSum<T>, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
    PreparedOp::new(op, u.grid())?.apply(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SymTerm;
    use crate::scalar::re;
    use crate::spectral::{l2_error, l2_norm, GridFunction};
    use std::f64::consts::TAU;

    fn state(grid: &Arc<Grid<f64>>) -> Wavefunction<f64> {
        Wavefunction::from_fn(grid, |x| Complex::new((2.0 * x).cos() + 0.3, (x * 3.0).sin() * x))
    }

    #[test]
    fn identity_and_multiplication() {
        let g = Grid::new(0.0, TAU, 32).unwrap();
        let u = state(&g);
        let one: SymOpSum<f64> = SymTerm::real(1.0, GridFunction::constant(&g, 1.0), 0).unwrap().into();
        assert_eq!(l2_error(&apply_symop(&one, &u).unwrap(), &u).unwrap(), 0.0);
        let f = GridFunction::from_fn(&g, |x| x.sin() + 2.0);
        let s: SymOpSum<f64> = SymTerm::real(1.0, f.clone(), 0).unwrap().into();
        let v = apply_symop(&s, &u).unwrap();
        for ((a, b), fv) in v.values().iter().zip(u.values()).zip(f.values()) {
            assert_eq!(*a, b * fv);
        }
    }

    #[test]
    fn plain_second_derivative() {
        // <1>_2 is just d^2
        let g = Grid::new(0.0, TAU, 32).unwrap();
        let u = Wavefunction::from_fn(&g, |x| re((3.0 * x).sin()));
        let s: SymOpSum<f64> = SymTerm::real(1.0, GridFunction::constant(&g, 1.0), 2).unwrap().into();
        let v = apply_symop(&s, &u).unwrap();
        let expect = u.scaled(re(-9.0));
        assert!(l2_error(&v, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn transform_count_is_two_per_order_plus_two() {
        let g = Grid::new(0.0, TAU, 32).unwrap();
        let f = GridFunction::from_fn(&g, |x| x.cos());
        let mut s = SymOpSum::new();
        for k in [0, 1, 2, 2, 3] {
            s.add_term(re(1.0), f.clone(), k).unwrap();
        }
        let op = PreparedOp::new(&s, &g).unwrap();
        let before = g.transform_count();
        op.apply(&state(&g)).unwrap();
        assert_eq!(g.transform_count() - before, 8);
        assert_eq!(op.transforms_per_apply(), 8);
    }

    #[test]
    fn grouping_matches_term_by_term() {
        let g = Grid::new(-1.0, 2.0, 64).unwrap();
        let u = state(&g);
        let f = GridFunction::from_fn(&g, |x| (TAU * x / 3.0).sin());
        let h = GridFunction::from_fn(&g, |x| (TAU * x / 3.0).cos());
        let terms = [
            SymTerm::new(Complex::new(0.0, 0.7), f.clone(), 2).unwrap(),
            SymTerm::new(Complex::new(1.5, 0.0), h.clone(), 1).unwrap(),
            SymTerm::new(Complex::new(0.0, -0.2), h, 2).unwrap(),
            SymTerm::new(Complex::new(0.0, 3.0), f, 0).unwrap(),
        ];
        let all: SymOpSum<f64> = terms.iter().cloned().collect();
        let grouped = apply_symop(&all, &u).unwrap();
        let mut sum = Wavefunction::zeros(&g);
        for t in terms {
            let one: SymOpSum<f64> = t.into();
            sum = &sum + &apply_symop(&one, &u).unwrap();
        }
        assert!(l2_error(&grouped, &sum).unwrap() < 1e-12 * l2_norm(&sum));
    }
}
