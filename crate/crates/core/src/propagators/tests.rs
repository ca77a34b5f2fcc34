use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::algebra::{SymOpSum, SymTerm};
use crate::oracle::reference_step;
use crate::spectral::{l2_error, GridFunction};

fn grid(n: usize) -> Arc<Grid<f64>> {
    Grid::new(0.0, 2.0 * PI, n).unwrap()
}

fn packet(g: &Arc<Grid<f64>>) -> Wavefunction<f64> {
    Wavefunction::from_fn(g, |x| Complex64::from_polar((4.0 * ((x - PI).cos() - 1.0)).exp(), x.sin())).normalized()
}

/// `sin(x) (1 + t)`.
fn smooth() -> PotentialModel<f64> {
    PotentialModel::new(|x: f64, t| x.sin() * (1.0 + t)).with_derivatives(8, |a, x, t| {
        let d = match a % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        };
        d * (1.0 + t)
    })
}

/// `cos(x) + 0.5 sin(2x)`, constant in time.
fn frozen() -> PotentialModel<f64> {
    PotentialModel::new(|x: f64, _| x.cos() + 0.5 * (2.0 * x).sin()).with_derivatives(8, |a, x, _| {
        let s = 2f64.powi(a as i32) * 0.5;
        let (c, s2) = match a % 4 {
            0 => (x.cos(), s * (2.0 * x).sin()),
            1 => (-x.sin(), s * (2.0 * x).cos()),
            2 => (-x.cos(), -s * (2.0 * x).sin()),
            _ => (x.sin(), -s * (2.0 * x).cos()),
        };
        c + s2
    })
}

fn prop(scheme: SchemeId, eps: f64, pot: PotentialModel<f64>, g: &Arc<Grid<f64>>) -> Propagator<f64> {
    Propagator::new(PropagatorConfig::new(scheme, eps), pot, g).unwrap()
}

#[test]
fn scheme_names_round_trip() {
    for s in SchemeId::ALL {
        assert_eq!(s.to_string().parse::<SchemeId>().unwrap(), s);
    }
    assert!("mz8".parse::<SchemeId>().is_err());
    assert_eq!("7".parse::<LanczosChoice>().unwrap(), LanczosChoice::Fixed(7));
    assert_eq!("auto".parse::<LanczosChoice>().unwrap(), LanczosChoice::Auto);
    assert!(matches!("adaptive:40".parse::<LanczosChoice>().unwrap(), LanczosChoice::Adaptive { max_iters: 40, .. }));
    assert!("0".parse::<LanczosChoice>().is_err());
}

#[test]
fn auto_lanczos_counts() {
    let cfg = PropagatorConfig::new(SchemeId::Mz6, 0.01);
    assert_eq!(cfg.lanczos_for(0.05).0.max_iters, 3);
    assert_eq!(cfg.lanczos_for(0.2).0.max_iters, 5);
    assert_eq!(cfg.lanczos_for(0.2).1.max_iters, 2);
    assert_eq!(PropagatorConfig::new(SchemeId::Mz4, 0.01).lanczos_for(0.2).0.max_iters, 4);
}

#[test]
fn config_rejects_bad_eps() {
    let g = grid(16);
    assert!(Propagator::new(PropagatorConfig::new(SchemeId::Mz2, 0.0), PotentialModel::zero(), &g).is_err());
    assert!(Propagator::new(PropagatorConfig::new(SchemeId::Mz2, 1.5), PotentialModel::zero(), &g).is_err());
}

#[test]
fn free_flight_is_exact() {
    let g = grid(64);
    let eps = 0.1;
    let u = packet(&g);
    let t_final = 0.7;
    let exact = crate::spectral::exp_circulant(Complex64::new(0.0, t_final * eps), 2, &u).unwrap();
    for s in SchemeId::ALL {
        let out = prop(s, eps, PotentialModel::zero(), &g).evolve(&u, 0.0, t_final, 7).unwrap();
        assert!(l2_error(&out.state, &exact).unwrap() < 1e-12, "{s}");
    }
}

#[test]
fn free_flight_exponents_are_empty() {
    let g = grid(32);
    let p = prop(SchemeId::Mz6, 0.1, PotentialModel::zero(), &g);
    let ctx = p.context(0.0, 0.1).unwrap();
    let w = assemble_mz6_exponents(&ctx).unwrap();
    assert!(w.w1.f.is_zero() && w.w2.is_empty() && w.w3.is_empty());
    let p = prop(SchemeId::Mz4, 0.1, PotentialModel::zero(), &g);
    let w = assemble_mz4_exponents(&p.context(0.0, 0.1).unwrap()).unwrap();
    assert!(w.w1.f.is_zero() && w.w2.is_empty());
}

#[test]
fn zero_step_is_identity() {
    let g = grid(32);
    let u = packet(&g);
    for s in SchemeId::ALL {
        let (v, r) = prop(s, 0.1, smooth(), &g).step(&u, 0.3, 0.0).unwrap();
        assert_eq!(v.values(), u.values());
        assert_eq!(r.norm_drift(), 0.0);
    }
}

#[test]
fn steps_are_unitary() {
    let g = grid(128);
    let u = packet(&g);
    for s in SchemeId::ALL {
        let out = prop(s, 0.05, smooth(), &g).evolve(&u, 0.0, 1.0, 20).unwrap();
        assert!(out.max_norm_drift() < 1e-12, "{s}: {}", out.max_norm_drift());
    }
}

#[test]
fn time_symmetric_for_frozen_potential() {
    let g = grid(64);
    let u = packet(&g);
    for s in [SchemeId::Mz4, SchemeId::Mz6] {
        let p = prop(s, 0.1, frozen(), &g);
        let (v, _) = p.step(&u, 0.0, 0.05).unwrap();
        let (w, _) = p.step(&v, 0.05, -0.05).unwrap();
        assert!(l2_error(&w, &u).unwrap() < 1e-10, "{s}: {}", l2_error(&w, &u).unwrap());
    }
}

#[test]
fn single_step_evolve_matches_step() {
    let g = grid(64);
    let u = packet(&g);
    let p = prop(SchemeId::Mz6, 0.1, smooth(), &g);
    let (v, _) = p.step(&u, 0.25, 0.125).unwrap();
    let e = p.evolve(&u, 0.25, 0.375, 1).unwrap();
    assert!(l2_error(&v, &e.state).unwrap() < 1e-15);
}

#[test]
fn evolve_composes() {
    let g = grid(64);
    let u = packet(&g);
    let p = prop(SchemeId::Mz4, 0.1, smooth(), &g);
    let whole = p.evolve(&u, 0.0, 1.0, 8).unwrap();
    let first = p.evolve(&u, 0.0, 0.5, 4).unwrap();
    let second = p.evolve(&first.state, 0.5, 1.0, 4).unwrap();
    assert!(l2_error(&whole.state, &second.state).unwrap() < 1e-13);
}

#[test]
fn snapshots_follow_cadence() {
    let g = grid(32);
    let mut cfg = PropagatorConfig::new(SchemeId::Mz2, 0.1);
    cfg.snapshot_every = 3;
    let p = Propagator::new(cfg, smooth(), &g).unwrap();
    let out = p.evolve(&packet(&g), 0.0, 1.0, 9).unwrap();
    let times: Vec<f64> = out.snapshots.iter().map(|s| s.0).collect();
    assert_eq!(times.len(), 4);
    assert!((times[3] - 1.0).abs() < 1e-15);
}

#[test]
fn midpoint_variant_differs_only_at_second_order() {
    let g = grid(64);
    let u = packet(&g);
    let quad = prop(SchemeId::Mz2, 0.1, smooth(), &g);
    let mut cfg = PropagatorConfig::new(SchemeId::Mz2, 0.1);
    cfg.midpoint = true;
    let mid = Propagator::new(cfg, smooth(), &g).unwrap();
    // V linear in t: the midpoint rule is exact
    let a = quad.step(&u, 0.0, 0.1).unwrap().0;
    let b = mid.step(&u, 0.0, 0.1).unwrap().0;
    assert!(l2_error(&a, &b).unwrap() < 1e-13);
}

fn slope(hs: &[f64], errs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let (x, y): (Vec<f64>, Vec<f64>) = hs.iter().zip(errs).map(|(h, e)| (h.ln(), e.ln())).unzip();
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn frozen_v(g: &Arc<Grid<f64>>) -> GridFunction<f64> {
    let p = frozen();
    p.sample(g, 0.0, 8)
}

fn exact_step(g: &Arc<Grid<f64>>, eps: f64, h: f64, u: &Wavefunction<f64>) -> Wavefunction<f64> {
    let i = Complex64::i();
    let theta: SymOpSum<f64> = [
        SymTerm::new(i * h * eps, GridFunction::constant(g, 1.0), 2).unwrap(),
        SymTerm::new(-i * h / eps, frozen_v(g), 0).unwrap(),
    ]
    .into_iter()
    .collect();
    reference_step(&theta, u).unwrap()
}

fn local_errors(scheme: SchemeId, eps: f64, hs: &[f64]) -> Vec<f64> {
    let g = grid(64);
    let u = packet(&g);
    hs.iter()
        .map(|&h| {
            let (v, _) = prop(scheme, eps, frozen(), &g).step(&u, 0.0, h).unwrap();
            l2_error(&v, &exact_step(&g, eps, h, &u)).unwrap()
        })
        .collect()
}

#[test]
fn frozen_mz4_local_error_is_fifth_order() {
    let hs = [0.005, 0.01, 0.02, 0.04];
    let s = slope(&hs, &local_errors(SchemeId::Mz4, 0.1, &hs));
    assert!((s - 5.0).abs() < 0.3, "slope {s}");
}

// With eps fixed the order-6 splitting keeps an O(h^5 eps) remainder: the
// splitting only drops terms that are small once h and the wavelength are
// tied to eps.
#[test]
fn frozen_mz6_remainder_scales_with_eps() {
    let hs = [0.005, 0.01, 0.02];
    let coarse = local_errors(SchemeId::Mz6, 0.1, &hs);
    let fine = local_errors(SchemeId::Mz6, 0.025, &hs);
    let mz4 = local_errors(SchemeId::Mz4, 0.1, &hs);
    for k in 0..hs.len() {
        let ratio = coarse[k] / fine[k];
        assert!((3.0..5.5).contains(&ratio), "eps ratio {ratio}");
        assert!(coarse[k] < 0.1 * mz4[k]);
    }
    assert!((slope(&hs, &coarse) - 5.0).abs() < 0.3);
}

#[test]
fn lanczos_defaults_match_dense_palindrome() {
    use crate::oracle::{dense_expm, dense_of_symop};
    let g = grid(64);
    let u = packet(&g);
    let h = 0.05;
    let p = prop(SchemeId::Mz6, 0.1, frozen(), &g);
    let w = assemble_mz6_exponents(&p.context(0.0, h).unwrap()).unwrap();
    let one = GridFunction::constant(&g, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let ex = |op: SymOpSum<f64>| dense_expm(&dense_of_symop(&op, &g).unwrap()).unwrap();
    let e0 = ex(w.w0.to_symop(&one).unwrap().scaled(half));
    let e1 = ex(w.w1.to_symop().unwrap().scaled(half));
    let e2 = ex(w.w2.scaled(half));
    let e3 = ex(w.w3.clone());
    let mut v = u.clone();
    for e in [&e0, &e1, &e2, &e3, &e2, &e1, &e0] {
        v = e.apply(&v).unwrap();
    }
    let (s, _) = p.step(&u, 0.0, h).unwrap();
    let e = l2_error(&s, &v).unwrap();
    assert!(e < 1e-10, "{e:e}");
}

/// Time-independent symmetric Zassenhaus exponents.
fn frozen_reference(g: &Arc<Grid<f64>>, eps: f64, h: f64) -> (SymOpSum<f64>, SymOpSum<f64>) {
    let v = frozen_v(g);
    let d = |k| v.deriv(k).unwrap();
    let i = Complex64::i();
    let h3 = h.powi(3);
    let h5 = h.powi(5);
    let w2: SymOpSum<f64> = [
        SymTerm::new(i * h3 / (6.0 * eps), d(1).mul(&d(1)).unwrap(), 0).unwrap(),
        SymTerm::new(i * h3 * eps / 6.0, d(2), 2).unwrap(),
    ]
    .into_iter()
    .collect();
    let curv = d(2).mul(&d(2)).unwrap().add_scaled(-2.0, &d(1).mul(&d(3)).unwrap()).unwrap();
    let w3: SymOpSum<f64> = [
        SymTerm::new(-i * h3 * eps / 24.0, d(4), 0).unwrap(),
        SymTerm::new(-i * 7.0 * h5 / (120.0 * eps), d(1).mul(&d(1)).unwrap().mul(&d(2)).unwrap(), 0).unwrap(),
        SymTerm::new(i * h5 * eps / 30.0, curv, 2).unwrap(),
        SymTerm::new(-i * h5 * eps.powi(3) / 120.0, d(4), 4).unwrap(),
    ]
    .into_iter()
    .collect();
    (w2, w3)
}

#[test]
fn frozen_exponents_reduce_to_time_independent_forms() {
    use crate::oracle::grouped_difference;
    let g = grid(64);
    let (eps, h) = (0.1, 0.05);
    let (w2_ref, w3_ref) = frozen_reference(&g, eps, h);
    let w4 = assemble_mz4_exponents(&prop(SchemeId::Mz4, eps, frozen(), &g).context(0.0, h).unwrap()).unwrap();
    let quartic: SymOpSum<f64> = SymTerm::new(-Complex64::i() * h.powi(3) * eps / 24.0, frozen_v(&g).deriv(4).unwrap(), 0).unwrap().into();
    assert!(grouped_difference(&w4.w2, &w2_ref.clone().plus(&quartic), &g).unwrap() < 1e-13);
    let w6 = assemble_mz6_exponents(&prop(SchemeId::Mz6, eps, frozen(), &g).context(0.0, h).unwrap()).unwrap();
    assert!(grouped_difference(&w6.w2, &w2_ref, &g).unwrap() < 1e-13);
    assert!(grouped_difference(&w6.w3, &w3_ref, &g).unwrap() < 1e-13, "{}", w6.w3);
}

#[test]
fn sigma_pruning_drops_the_fourth_derivative_term() {
    let g = grid(32);
    let mut cfg = PropagatorConfig::new(SchemeId::Mz4, 0.1);
    cfg.sigma_policy = SigmaPolicy::PruneBySigma(num_rational::Ratio::new(1, 2));
    let p = Propagator::new(cfg, frozen(), &g).unwrap();
    let w = assemble_mz4_exponents(&p.context(0.0, 0.05).unwrap()).unwrap();
    assert_eq!(w.w2.len(), 3);
    let full = assemble_mz4_exponents(&prop(SchemeId::Mz4, 0.1, frozen(), &g).context(0.0, 0.05).unwrap()).unwrap();
    assert_eq!(full.w2.len(), 4);
}
