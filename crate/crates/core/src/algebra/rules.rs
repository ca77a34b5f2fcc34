use num_complex::Complex;

use super::{SymOpSum, SymTerm};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::GridFunction;

/// `d^a f * d^b g`.
fn prod<T: Real>(f: &GridFunction<T>, a: usize, g: &GridFunction<T>, b: usize) -> Result<GridFunction<T>> {
    f.deriv(a)?.mul(&g.deriv(b)?)
}

fn comb<T: Real>(parts: Vec<(f64, GridFunction<T>)>) -> Result<GridFunction<T>> {
    let mut it = parts.into_iter();
    let (c0, first) = it.next().expect("at least one part");
    let mut acc = first.scale(T::lit(c0));
    for (c, p) in it {
        acc = acc.add_scaled(T::lit(c), &p)?;
    }
    Ok(acc)
}

/// `[<f>_a, <g>_b] = sum c * <h>_k`, for the pairs with a closed form.
fn rule<T: Real>(a: usize, b: usize, f: &GridFunction<T>, g: &GridFunction<T>) -> Result<Option<Vec<(f64, GridFunction<T>, usize)>>> {
    let fg1 = || prod(f, 0, g, 1);
    let wronskian = || comb(vec![(1.0, prod(f, 0, g, 1)?), (-1.0, prod(f, 1, g, 0)?)]);
    let terms = match (a, b) {
        (0, 0) => vec![],
        (1, 0) => vec![(1.0, fg1()?, 0)],
        (1, 1) => vec![(1.0, wronskian()?, 1)],
        (2, 0) => vec![(2.0, fg1()?, 1)],
        (2, 1) => vec![
            (1.0, comb(vec![(2.0, prod(f, 0, g, 1)?), (-1.0, prod(f, 1, g, 0)?)])?, 2),
            (-0.5, comb(vec![(2.0, prod(f, 1, g, 2)?), (1.0, prod(f, 0, g, 3)?)])?, 0),
        ],
        (2, 2) => vec![
            (2.0, wronskian()?, 3),
            (
                1.0,
                comb(vec![
                    (2.0, prod(f, 2, g, 1)?),
                    (-2.0, prod(f, 1, g, 2)?),
                    (1.0, prod(f, 3, g, 0)?),
                    (-1.0, prod(f, 0, g, 3)?),
                ])?,
                1,
            ),
        ],
        (3, 0) => vec![
            (3.0, fg1()?, 2),
            (-0.5, comb(vec![(3.0, prod(f, 1, g, 2)?), (1.0, prod(f, 0, g, 3)?)])?, 0),
        ],
        (4, 0) => vec![
            (4.0, fg1()?, 3),
            (-2.0, comb(vec![(3.0, prod(f, 1, g, 2)?), (1.0, prod(f, 0, g, 3)?)])?, 1),
        ],
        _ => return Ok(None),
    };
    Ok(Some(terms))
}

/// Closed-form commutator `[A, B]` of two symmetrised terms.
///
/// Only the order pairs (1,0), (1,1), (2,0), (2,1), (2,2), (3,0), (4,0), their
/// transposes and (0,0) are supported; anything else is an error rather than
/// an approximation.
pub fn bracket<T: Real>(a: &SymTerm<T>, b: &SymTerm<T>) -> Result<SymOpSum<T>> {
    a.f.grid().check_same(b.f.grid(), "bracket")?;
    let coeff = a.coeff * b.coeff;
    let (terms, sign) = if let Some(t) = rule(a.k, b.k, &a.f, &b.f)? {
        (t, T::one())
    } else if let Some(t) = rule(b.k, a.k, &b.f, &a.f)? {
        (t, -T::one())
    } else {
        return Err(Error::RuleNotInTable(a.k, b.k));
    };
    let mut out = SymOpSum::new();
    for (c, f, k) in terms {
        out.push(SymTerm::new(coeff * Complex::new(sign * T::lit(c), T::zero()), f, k)?);
    }
    Ok(out.collect())
}

/// Bilinear extension of [`bracket`] to sums.
pub fn commutator<T: Real>(a: &SymOpSum<T>, b: &SymOpSum<T>) -> Result<SymOpSum<T>> {
    let mut out = SymOpSum::new();
    for x in a.terms() {
        for y in b.terms() {
            out.extend(bracket(x, y)?);
        }
    }
    Ok(out.collect())
}

/// Left-nested `[[[s0, s1], s2], ...]`.
pub fn nested_bracket<T: Real>(seq: &[SymTerm<T>]) -> Result<SymOpSum<T>> {
    let Some((first, rest)) = seq.split_first() else {
        return Ok(SymOpSum::new());
    };
    let mut acc: SymOpSum<T> = first.clone().into();
    for b in rest {
        acc = commutator(&acc, &b.clone().into())?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn grid() -> Arc<Grid<f64>> {
        Grid::new(0.0, TAU, 64).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn first_order_with_multiplication() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| x.cos());
        let h = GridFunction::from_fn(&g, |x| (2.0 * x).sin());
        let s = bracket(&SymTerm::real(1.0, f, 1).unwrap(), &SymTerm::real(1.0, h, 0).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        let t = &s.terms()[0];
        assert_eq!(t.k, 0);
        let expect: Vec<f64> = g.nodes().iter().map(|x| x.cos() * 2.0 * (2.0 * x).cos()).collect();
        assert!(close(t.f.values(), &expect, 1e-12));
    }

    #[test]
    fn potential_against_laplacian() {
        let g = grid();
        let v = GridFunction::from_fn(&g, |x| x.sin().exp());
        let one = GridFunction::constant(&g, 1.0);
        let s = bracket(&SymTerm::real(1.0, v.clone(), 0).unwrap(), &SymTerm::real(1.0, one, 2).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        let t = &s.terms()[0];
        assert_eq!((t.k, t.coeff), (1, Complex::new(-2.0, 0.0)));
        assert!(close(t.f.values(), &v.d(1).unwrap(), 1e-12));
    }

    #[test]
    fn double_nesting_gives_squared_gradient() {
        let g = grid();
        let v = GridFunction::from_fn(&g, |x| x.sin() + 0.5 * (3.0 * x).cos());
        let one = GridFunction::constant(&g, 1.0);
        let a = SymTerm::real(1.0, v.clone(), 0).unwrap();
        let lap = SymTerm::real(1.0, one, 2).unwrap();
        let s = nested_bracket(&[a.clone(), lap, a]).unwrap();
        assert_eq!(s.len(), 1);
        let t = &s.terms()[0];
        assert_eq!(t.k, 0);
        let dv = v.d(1).unwrap();
        let expect: Vec<f64> = dv.iter().map(|d| -2.0 * d * d).collect();
        let got: Vec<f64> = t.f.values().iter().map(|x| x * t.coeff.re).collect();
        assert!(close(&got, &expect, 1e-11));
    }

    #[test]
    fn self_commutator_vanishes() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| x.sin());
        for k in [0, 1, 2] {
            let t = SymTerm::real(1.0, f.clone(), k).unwrap();
            assert!(bracket(&t, &t).unwrap().is_empty(), "k = {k}");
        }
    }

    #[test]
    fn antisymmetry() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| x.sin());
        let h = GridFunction::from_fn(&g, |x| (2.0 * x).cos());
        for (a, b) in [(1, 0), (2, 1), (2, 2), (3, 0), (4, 0), (1, 1)] {
            let x = SymTerm::real(1.0, f.clone(), a).unwrap();
            let y = SymTerm::real(1.0, h.clone(), b).unwrap();
            let s = commutator(&bracket(&x, &y).unwrap(), &SymOpSum::new()).unwrap();
            assert!(s.is_empty());
            let xy = bracket(&x, &y).unwrap();
            let yx = bracket(&y, &x).unwrap();
            assert_eq!(xy.len(), yx.len());
            for (p, q) in xy.terms().iter().zip(yx.terms()) {
                assert_eq!(p.k, q.k);
                let pv: Vec<f64> = p.f.values().iter().map(|v| v * p.coeff.re).collect();
                let qv: Vec<f64> = q.f.values().iter().map(|v| -v * q.coeff.re).collect();
                assert!(close(&pv, &qv, 1e-12), "({a},{b})");
            }
        }
    }

    #[test]
    fn missing_rule_is_reported() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| x.sin());
        let x = SymTerm::real(1.0, f.clone(), 3).unwrap();
        let y = SymTerm::real(1.0, f, 1).unwrap();
        let err = bracket(&x, &y).unwrap_err();
        assert!(matches!(err, Error::RuleNotInTable(3, 1)));
        assert!(err.to_string().contains("rule not in table"));
    }

    #[test]
    fn single_element_nesting_is_identity() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| x.sin());
        let x = SymTerm::real(2.0, f, 1).unwrap();
        let s = nested_bracket(&[x]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coeff, Complex::new(2.0, 0.0));
    }
}
