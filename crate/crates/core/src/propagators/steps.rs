use std::time::Instant;

use num_complex::Complex;

use super::exponents::{assemble_mz4_exponents, assemble_mz6_exponents, DiagExponent, KineticExponent};
use super::{StepContext, StepReport};
use crate::algebra::{PreparedOp, SymOpSum};
use crate::error::Result;
use crate::integrals::{Parity, TableKey};
use crate::krylov::{lanczos_expv, LanczosConfig, LanczosReport};
use crate::scalar::Real;
use crate::spectral::{exp_circulant, exp_diag, l2_norm, Wavefunction};

fn half<T: Real>() -> T {
    T::lit(0.5)
}

fn kinetic<T: Real>(w: &KineticExponent<T>, frac: T, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
    exp_circulant(w.coeff * frac, 2, u)
}

fn diag<T: Real>(w: &DiagExponent<T>, frac: T, u: &Wavefunction<T>) -> Result<Wavefunction<T>> {
    exp_diag(&w.f, w.scale * frac, u)
}

/// `exp(frac * W) u` by Lanczos; an empty `W` is skipped.
fn central<T: Real>(
    w: &SymOpSum<T>,
    frac: T,
    u: &Wavefunction<T>,
    cfg: &LanczosConfig,
    reports: &mut Vec<LanczosReport>,
) -> Result<Wavefunction<T>> {
    if w.is_empty() {
        return Ok(u.clone());
    }
    let op = PreparedOp::new(&w.scaled(Complex::new(frac, T::zero())), u.grid())?;
    let (v, report) = lanczos_expv(|x| op.apply(x), u, cfg)?;
    reports.push(report);
    Ok(v)
}

fn report<T: Real>(before: &Wavefunction<T>, after: &Wavefunction<T>, lanczos: Vec<LanczosReport>, start: Instant) -> StepReport {
    StepReport {
        norm_before: l2_norm(before).as_f64(),
        norm_after: l2_norm(after).as_f64(),
        lanczos,
        wall_time: start.elapsed(),
    }
}

/// Exponential midpoint rule with the kinetic part split symmetrically.
/// With `midpoint` the quadrature of `V` is replaced by `h V(t + h/2)`.
pub fn step_mz2<T: Real>(u: &Wavefunction<T>, ctx: &StepContext<T>, midpoint: bool) -> Result<(Wavefunction<T>, StepReport)> {
    let start = Instant::now();
    let mu00 = if midpoint { ctx.tables.get(TableKey::Midpoint)? } else { ctx.tables.mu(0, 0, Parity::None)? };
    let w0 = KineticExponent { coeff: Complex::new(T::zero(), ctx.h * ctx.eps) };
    let w1 = DiagExponent { f: mu00.clone(), scale: Complex::new(T::zero(), -T::one() / ctx.eps) };
    let v = kinetic(&w0, half(), u)?;
    let v = diag(&w1, T::one(), &v)?;
    let v = kinetic(&w0, half(), &v)?;
    let r = report(u, &v, Vec::new(), start);
    Ok((v, r))
}

/// `e^{W0/2} e^{W1/2} e^{W2} e^{W1/2} e^{W0/2}`.
pub fn step_mz4<T: Real>(u: &Wavefunction<T>, ctx: &StepContext<T>) -> Result<(Wavefunction<T>, StepReport)> {
    let start = Instant::now();
    let w = assemble_mz4_exponents(ctx)?;
    let mut lanczos = Vec::new();
    let v = kinetic(&w.w0, half(), u)?;
    let v = diag(&w.w1, half(), &v)?;
    let v = central(&w.w2, T::one(), &v, &ctx.lanczos_w2, &mut lanczos)?;
    let v = diag(&w.w1, half(), &v)?;
    let v = kinetic(&w.w0, half(), &v)?;
    let r = report(u, &v, lanczos, start);
    Ok((v, r))
}

/// `e^{W0/2} e^{W1/2} e^{W2/2} e^{W3} e^{W2/2} e^{W1/2} e^{W0/2}`.
pub fn step_mz6<T: Real>(u: &Wavefunction<T>, ctx: &StepContext<T>) -> Result<(Wavefunction<T>, StepReport)> {
    let start = Instant::now();
    let w = assemble_mz6_exponents(ctx)?;
    let mut lanczos = Vec::new();
    let v = kinetic(&w.w0, half(), u)?;
    let v = diag(&w.w1, half(), &v)?;
    let v = central(&w.w2, half(), &v, &ctx.lanczos_w2, &mut lanczos)?;
    let v = central(&w.w3, T::one(), &v, &ctx.lanczos_w3, &mut lanczos)?;
    let v = central(&w.w2, half(), &v, &ctx.lanczos_w2, &mut lanczos)?;
    let v = diag(&w.w1, half(), &v)?;
    let v = kinetic(&w.w0, half(), &v)?;
    let r = report(u, &v, lanczos, start);
    Ok((v, r))
}
