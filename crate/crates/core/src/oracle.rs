//! Dense-matrix reference implementations for small grids.
//!
//! Everything here is `O(n^3)` and `f64` only; it exists to check the fast
//! paths, not to be fast.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{PreparedOp, Structure, SymOpSum};
use crate::error::{Error, Result};
use crate::spectral::{Grid, Wavefunction};

/// Largest dimension the dense paths accept.
pub const MAX_DENSE: usize = 256;

const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DenseOperator {
    entries: DMatrix<Complex64>,
    structure: Structure,
}

fn defect(m: &DMatrix<Complex64>, sign: f64) -> f64 {
    let adj = m.adjoint();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    (m - adj * Complex64::new(sign, 0.0)).norm() / scale
}

impl DenseOperator {
    /// Wraps a matrix after checking the claimed structure.
    pub fn new(entries: DMatrix<Complex64>, structure: Structure) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Oracle(format!("{}x{} matrix is not square", entries.nrows(), entries.ncols())));
        }
        let d = match structure {
            Structure::Hermitian => defect(&entries, 1.0),
            Structure::SkewHermitian => defect(&entries, -1.0),
            Structure::General => 0.0,
        };
        if d > STRUCTURE_TOL {
            return Err(Error::Oracle(format!("matrix tagged {structure:?} has relative defect {d:.3e}")));
        }
        Ok(Self { entries, structure })
    }

    /// Tags the matrix with whatever structure it has to within tolerance.
    pub fn infer(entries: DMatrix<Complex64>) -> Result<Self> {
        let structure = if defect(&entries, -1.0) <= STRUCTURE_TOL {
            Structure::SkewHermitian
        } else if defect(&entries, 1.0) <= STRUCTURE_TOL {
            Structure::Hermitian
        } else {
            Structure::General
        };
        Self::new(entries, structure)
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n), structure: Structure::Hermitian }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: DMatrix::zeros(n, n), structure: Structure::SkewHermitian }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.norm()
    }

    /// `||self - other||_F / ||other||_F`.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).norm() / other.entries.norm().max(f64::MIN_POSITIVE)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::infer(&self.entries * &other.entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::infer(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::infer(&self.entries - &other.entries)
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::infer(&self.entries * c)
    }

    pub fn apply(&self, u: &Wavefunction<f64>) -> Result<Wavefunction<f64>> {
        if u.len() != self.dim() {
            return Err(Error::Oracle(format!("vector of length {} for a {}-dimensional operator", u.len(), self.dim())));
        }
        let v = &self.entries * DVector::from_column_slice(u.values());
        Wavefunction::new(u.grid(), v.as_slice().to_vec())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Oracle(format!("dimension mismatch: {} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

fn size_guard(n: usize) -> Result<()> {
    if n > MAX_DENSE {
        return Err(Error::Oracle(format!("{n} points exceeds the dense limit of {MAX_DENSE}")));
    }
    Ok(())
}

/// Matrix of a symmetrised-operator sum, column by column from unit vectors.
pub fn dense_of_symop(op: &SymOpSum<f64>, grid: &Arc<Grid<f64>>) -> Result<DenseOperator> {
    let n = grid.len();
    size_guard(n)?;
    let prepared = PreparedOp::new(op, grid)?;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = prepared.apply(&Wavefunction::unit(grid, j))?;
        m.set_column(j, &DVector::from_column_slice(col.values()));
    }
    DenseOperator::new(m, op.structure())
}

/// Matrix of `d^k` on the grid.
pub fn dense_derivative(grid: &Arc<Grid<f64>>, k: usize) -> Result<DenseOperator> {
    let n = grid.len();
    size_guard(n)?;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = Wavefunction::unit(grid, j).deriv(k)?;
        m.set_column(j, &DVector::from_column_slice(col.values()));
    }
    DenseOperator::infer(m)
}

/// `exp(A)` for Hermitian or skew-Hermitian `A` by eigendecomposition of the
/// Hermitian representative.
pub fn dense_expm(a: &DenseOperator) -> Result<DenseOperator> {
    size_guard(a.dim())?;
    let i = Complex64::new(0.0, 1.0);
    let (herm, skew) = match a.structure {
        Structure::Hermitian => (a.entries.clone(), false),
        Structure::SkewHermitian => (&a.entries * -i, true),
        Structure::General => return Err(Error::Oracle("exponential of a general matrix is not supported".into())),
    };
    // symmetrise away roundoff before the Hermitian solver sees it
    let herm = (&herm + herm.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let phases = eig.eigenvalues.map(|l| if skew { (i * l).exp() } else { Complex64::new(l.exp(), 0.0) });
    let u = &eig.eigenvectors;
    let m = u * DMatrix::from_diagonal(&phases) * u.adjoint();
    let structure = if skew { Structure::General } else { Structure::Hermitian };
    Ok(DenseOperator { entries: m, structure })
}

/// `AB - BA`.
pub fn brute_commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.check_dim(b)?;
    let m = &a.entries * &b.entries - &b.entries * &a.entries;
    let structure = match (a.structure, b.structure) {
        (Structure::General, _) | (_, Structure::General) => Structure::General,
        (x, y) if x == y => Structure::SkewHermitian,
        _ => Structure::Hermitian,
    };
    DenseOperator::new(m, structure)
}

/// Symmetric BCH truncated after the cubic terms:
/// `h(X + Y) - h^3 ([[Y, X], X]/24 + [[Y, X], Y]/12)`.
pub fn sbch3(x: &DenseOperator, y: &DenseOperator, h: f64) -> Result<DenseOperator> {
    if x.structure != Structure::SkewHermitian || y.structure != Structure::SkewHermitian {
        return Err(Error::Oracle("sbch3 expects skew-Hermitian arguments".into()));
    }
    let yx = brute_commutator(y, x)?;
    let yxx = brute_commutator(&yx, x)?;
    let yxy = brute_commutator(&yx, y)?;
    let m = (&x.entries + &y.entries) * Complex64::new(h, 0.0)
        - (yxx.entries * Complex64::new(1.0 / 24.0, 0.0) + yxy.entries * Complex64::new(1.0 / 12.0, 0.0))
            * Complex64::new(h * h * h, 0.0);
    DenseOperator::new(m, Structure::SkewHermitian)
}

/// `exp(Theta) u` with the exponential computed densely.
pub fn reference_step(theta: &SymOpSum<f64>, u: &Wavefunction<f64>) -> Result<Wavefunction<f64>> {
    let m = dense_of_symop(theta, u.grid())?;
    dense_expm(&m)?.apply(u)
}

/// Largest difference between the coefficient functions of `a` and `b`,
/// order by order, relative to the largest coefficient of either.
///
/// An order present in only one operator compares against zero.
pub fn grouped_difference(a: &SymOpSum<f64>, b: &SymOpSum<f64>, grid: &Arc<Grid<f64>>) -> Result<f64> {
    let (pa, pb) = (PreparedOp::new(a, grid)?, PreparedOp::new(b, grid)?);
    let (ga, gb) = (pa.grouped(), pb.grouped());
    let peak = |g: &[(usize, &[Complex64])]| g.iter().flat_map(|(_, v)| v.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let scale = peak(&ga).max(peak(&gb));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let find = |g: &[(usize, &'_ [Complex64])], k: usize| g.iter().find(|(kk, _)| *kk == k).map(|(_, v)| v.to_vec());
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut worst = 0.0f64;
    for k in 0..=crate::spectral::MAX_ORDER {
        let (x, y) = (find(&ga, k), find(&gb, k));
        if x.is_none() && y.is_none() {
            continue;
        }
        let (x, y) = (x.unwrap_or_else(|| zero.clone()), y.unwrap_or_else(|| zero.clone()));
        let d = x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        worst = worst.max(d / scale);
    }
    Ok(worst)
}

/// Seeded random skew-Hermitian matrix with entries of size about one.
pub fn random_skew(n: usize, seed: u64) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    DenseOperator { entries: (&a - a.adjoint()) * Complex64::new(0.5, 0.0), structure: Structure::SkewHermitian }
}
