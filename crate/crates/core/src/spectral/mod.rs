//! Periodic grid, spectral differentiation and the cheap exponentials.

mod dump;
mod function;
mod grid;

use num_complex::Complex;

pub use dump::{read_dump, write_dump, DumpHeader};
pub use function::{GridFunction, Wavefunction};
pub use grid::{Grid, MAX_ORDER};

use crate::error::Result;
use crate::scalar::{cexp, Real};

/// `F^{-1} diag(exp(a c_k)) F u`.
pub fn exp_circulant<T: Real>(a: Complex<T>, k: usize, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
    let grid = u.grid();
    let symbol = grid.symbol(k)?;
    if a == Complex::new(T::zero(), T::zero()) {
        return Ok(u.clone());
    }
    let mut buf = u.values().to_vec();
    grid.forward(&mut buf);
    for (z, &c) in buf.iter_mut().zip(symbol) {
        *z = *z * cexp(a * c);
    }
    grid.inverse(&mut buf);
    Wavefunction::new(grid, buf)
}

/// Pointwise `exp(scale * g(x_j)) u(x_j)`.
pub fn exp_diag<T: Real>(g: &GridFunction<T>, scale: Complex<T>, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
    u.grid().check_same(g.grid(), "exp_diag")?;
    let values = g
        .values()
        .iter()
        .zip(u.values())
        .map(|(&gv, &z)| z * cexp(scale * gv))
        .collect();
    Wavefunction::new(u.grid(), values)
}

/// `sqrt(dx * sum |u_j|^2)`.
pub fn l2_norm<T: Real>(u: &Wavefunction<T>) -> T {
    let s: T = u.values().iter().map(|z| z.norm_sqr()).sum();
    (s * u.grid().dx()).sqrt()
}

pub fn l2_error<T: Real>(u: &Wavefunction<T>, v: &Wavefunction<T>) -> Result<T> {
    u.grid().check_same(v.grid(), "l2_error")?;
    let s: T = u.values().iter().zip(v.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((s * u.grid().dx()).sqrt())
}

/// `<u, (-eps d^2 + V/eps) u>` with the kinetic part written as `eps |du|^2`.
pub fn energy<T: Real>(u: &Wavefunction<T>, potential: &GridFunction<T>, eps: T) -> Result<T> {
    let grid = u.grid();
    grid.check_same(potential.grid(), "energy")?;
    let du = grid.deriv_complex(u.values(), 1)?;
    let kinetic: T = du.iter().map(|z| z.norm_sqr()).sum();
    let pot: T = potential.values().iter().zip(u.values()).map(|(&v, z)| v * z.norm_sqr()).sum();
    Ok(grid.dx() * (eps * kinetic + pot / eps))
}
