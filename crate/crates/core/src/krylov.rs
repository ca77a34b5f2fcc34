//! Lanczos approximation of `exp(W) v` for skew-Hermitian `W`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::Wavefunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LanczosMode {
    /// Always run `max_iters` steps (unless the space is exhausted).
    Fixed,
    /// Stop once the a-posteriori estimate drops below `adaptive_tol`.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosConfig {
    pub max_iters: usize,
    pub breakdown_tol: f64,
    pub mode: LanczosMode,
    pub adaptive_tol: f64,
    pub reorthogonalize: bool,
}

impl LanczosConfig {
    pub fn fixed(iters: usize) -> Self {
        Self { max_iters: iters, ..Self::default() }
    }

    pub fn adaptive(max_iters: usize, tol: f64) -> Self {
        Self { max_iters, mode: LanczosMode::Adaptive, adaptive_tol: tol, ..Self::default() }
    }

    pub fn with_reorthogonalization(mut self) -> Self {
        self.reorthogonalize = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("Lanczos needs at least one iteration".into()));
        }
        if !(self.breakdown_tol > 0.0) || !(self.adaptive_tol > 0.0) {
            return Err(Error::Config("Lanczos tolerances must be positive".into()));
        }
        Ok(())
    }
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self { max_iters: 5, breakdown_tol: 1e-14, mode: LanczosMode::Fixed, adaptive_tol: 1e-12, reorthogonalize: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LanczosReport {
    pub iters_used: usize,
    /// `beta_m |e_m^T exp(i T_m) e_1|`, relative to `||v||`.
    pub est_residual: f64,
    pub happy_breakdown: bool,
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `exp(i T) e_1` for the real symmetric tridiagonal `T`.
fn expi_tridiag_e1(alpha: &[f64], beta: &[f64]) -> Vec<Complex64> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let s = &eig.eigenvectors;
    (0..m)
        .map(|r| (0..m).map(|k| Complex64::cis(eig.eigenvalues[k]) * (s[(r, k)] * s[(0, k)])).sum())
        .collect()
}

/// Approximates `exp(W) v`, where `matvec` applies a skew-Hermitian `W`.
///
/// Runs Hermitian Lanczos on `H = -i W` and returns
/// `||v|| Q_m exp(i T_m) e_1`.
pub fn lanczos_expv<T, F>(mut matvec: F, v: &Wavefunction<T>, cfg: &LanczosConfig) -> Result<(Wavefunction<T>, LanczosReport)>
where
    T: Real,
    F: FnMut(&Wavefunction<T>) -> Result<Wavefunction<T>>,
{
    cfg.validate()?;
    let n = v.len();
    let beta0 = norm(v.values());
    if beta0 == T::zero() {
        return Ok((v.clone(), LanczosReport { iters_used: 0, est_residual: 0.0, happy_breakdown: true }));
    }
    let m_max = cfg.max_iters.min(n);
    let minus_i = Complex::new(T::zero(), -T::one());
    let inv = T::one() / beta0;
    let mut basis: Vec<Vec<Complex<T>>> = vec![v.values().iter().map(|z| z * inv).collect()];
    let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut happy = false;
    let mut scale = 0.0_f64;
    let mut coeffs;

    loop {
        let j = alpha.len();
        let q = Wavefunction::new(v.grid(), basis[j].clone())?;
        let wq = matvec(&q)?;
        if wq.values().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical(format!("non-finite value in Lanczos matvec at iteration {}", j + 1)));
        }
        if cfg!(debug_assertions) && j == 0 {
            check_skew(q.values(), wq.values())?;
        }
        let mut w: Vec<Complex<T>> = wq.into_values().into_iter().map(|z| z * minus_i).collect();
        let a = dot(&basis[j], &w).re;
        for (x, &qj) in w.iter_mut().zip(&basis[j]) {
            *x = *x - qj * a;
        }
        if j > 0 {
            let b = T::lit(beta[j - 1]);
            for (x, &qp) in w.iter_mut().zip(&basis[j - 1]) {
                *x = *x - qp * b;
            }
        }
        if cfg.reorthogonalize {
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (x, &qi) in w.iter_mut().zip(q) {
                        *x = *x - qi * c;
                    }
                }
            }
        }
        alpha.push(a.as_f64());
        let b = norm(&w).as_f64();
        scale = scale.max(a.as_f64().abs()).max(b);
        coeffs = expi_tridiag_e1(&alpha, &beta);
        let est = b * coeffs[alpha.len() - 1].norm();
        if b <= cfg.breakdown_tol * scale.max(1.0) {
            happy = true;
            break;
        }
        if alpha.len() == m_max || (cfg.mode == LanczosMode::Adaptive && est < cfg.adaptive_tol) {
            beta.push(b);
            break;
        }
        beta.push(b);
        let binv = T::lit(1.0 / b);
        basis.push(w.into_iter().map(|z| z * binv).collect());
    }

    let m = alpha.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    for (q, c) in basis.iter().zip(&coeffs) {
        let c = Complex::new(T::lit(c.re), T::lit(c.im)) * beta0;
        for (o, &qi) in out.iter_mut().zip(q) {
            *o = *o + qi * c;
        }
    }
    let est_residual = if happy { 0.0 } else { beta[m - 1] * coeffs[m - 1].norm() };
    let report = LanczosReport { iters_used: m, est_residual, happy_breakdown: happy };
    Ok((Wavefunction::new(v.grid(), out)?, report))
}

fn check_skew<T: Real>(q: &[Complex<T>], wq: &[Complex<T>]) -> Result<()> {
    let re = num_traits::Float::abs(dot(q, wq).re).as_f64();
    let scale = (norm(q) * norm(wq)).as_f64();
    let tol = 100.0 * crate::scalar::machine_eps::<T>().sqrt();
    if re > tol * scale {
        return Err(Error::Contract(format!("Lanczos operator is not skew-Hermitian: Re<q, Wq> = {re:.3e}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_expm, DenseOperator};
    use crate::algebra::Structure;
    use crate::spectral::{l2_error, l2_norm, Grid};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_state(grid: &Arc<Grid<f64>>, seed: u64) -> Wavefunction<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len()).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Wavefunction::new(grid, v).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn matvec(m: &DMatrix<Complex64>) -> impl FnMut(&Wavefunction<f64>) -> Result<Wavefunction<f64>> + '_ {
        move |u| {
            let v = m * DVector::from_column_slice(u.values());
            Wavefunction::new(u.grid(), v.as_slice().to_vec())
        }
    }

    #[test]
    fn zero_operator() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let v = random_state(&g, 1);
        let (out, rep) = lanczos_expv(|u| Ok(Wavefunction::zeros(u.grid())), &v, &LanczosConfig::fixed(4)).unwrap();
        assert_eq!(rep.iters_used, 1);
        assert!(rep.happy_breakdown);
        assert!(l2_error(&out, &v).unwrap() < 1e-15);
    }

    #[test]
    fn full_dimension_matches_dense() {
        let n = 32;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let w = random_hermitian(n, 5) * Complex64::new(0.0, 1.0);
        let dense = dense_expm(&DenseOperator::new(w.clone(), Structure::SkewHermitian).unwrap()).unwrap();
        let v = random_state(&g, 2);
        let cfg = LanczosConfig::fixed(n).with_reorthogonalization();
        let (out, _) = lanczos_expv(matvec(&w), &v, &cfg).unwrap();
        let exact = dense.apply(&v).unwrap();
        assert!(l2_error(&out, &exact).unwrap() < 1e-12 * l2_norm(&exact));
    }

    #[test]
    fn norm_preserved_with_few_iterations() {
        let n = 64;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let w = random_hermitian(n, 9) * Complex64::new(0.0, 3.0);
        let v = random_state(&g, 4);
        let (out, rep) = lanczos_expv(matvec(&w), &v, &LanczosConfig::fixed(4)).unwrap();
        assert_eq!(rep.iters_used, 4);
        assert!((l2_norm(&out) - l2_norm(&v)).abs() < 1e-12 * l2_norm(&v));
    }

    #[test]
    fn error_decreases_with_iterations() {
        let n = 64;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let w = random_hermitian(n, 17) * Complex64::new(0.0, 0.4);
        let dense = dense_expm(&DenseOperator::new(w.clone(), Structure::SkewHermitian).unwrap()).unwrap();
        let v = random_state(&g, 8);
        let exact = dense.apply(&v).unwrap();
        let errs: Vec<f64> = [2, 4, 6, 8]
            .iter()
            .map(|&m| l2_error(&lanczos_expv(matvec(&w), &v, &LanczosConfig::fixed(m)).unwrap().0, &exact).unwrap())
            .collect();
        assert!(errs.windows(2).all(|p| p[1] < p[0]), "{errs:?}");
    }

    #[test]
    fn adaptive_mode_stops_early() {
        let n = 64;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let w = random_hermitian(n, 21) * Complex64::new(0.0, 0.05);
        let v = random_state(&g, 3);
        let (_, rep) = lanczos_expv(matvec(&w), &v, &LanczosConfig::adaptive(30, 1e-10)).unwrap();
        assert!(rep.iters_used < 30);
        assert!(rep.est_residual < 1e-10);
    }

    #[test]
    fn homogeneous_in_the_start_vector() {
        let n = 32;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let w = random_hermitian(n, 2) * Complex64::new(0.0, 1.0);
        let v = random_state(&g, 6);
        let a = Complex64::new(-0.7, 2.3);
        let cfg = LanczosConfig::fixed(6);
        let (x, _) = lanczos_expv(matvec(&w), &v.scaled(a), &cfg).unwrap();
        let (y, _) = lanczos_expv(matvec(&w), &v, &cfg).unwrap();
        assert!(l2_error(&x, &y.scaled(a)).unwrap() < 1e-13 * l2_norm(&x));
    }

    #[test]
    fn nan_is_an_error() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let v = random_state(&g, 1);
        let r = lanczos_expv(|u| Ok(u.scaled(Complex::new(f64::NAN, 0.0))), &v, &LanczosConfig::fixed(3));
        assert!(matches!(r, Err(Error::Numerical(_))));
    }

    #[test]
    fn hermitian_operator_is_caught_in_debug() {
        if !cfg!(debug_assertions) {
            return;
        }
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let v = random_state(&g, 1);
        let r = lanczos_expv(|u| Ok(u.clone()), &v, &LanczosConfig::fixed(3));
        assert!(matches!(r, Err(Error::Contract(_))));
    }
}
