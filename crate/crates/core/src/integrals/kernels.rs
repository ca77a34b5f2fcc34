use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use num_traits::Num;

use super::quadrature::gauss_legendre_unit;

/// `h^r * int_0^h int_0^zeta zeta^p xi^q dxi dzeta = h^(p+q+r+2) / ((q+1)(p+q+2))`.
pub fn triangle_monomial<N: Num + Clone>(p: u32, q: u32, r: u32, h: N) -> N {
    let int = |k: u32| (0..k).fold(N::zero(), |a, _| a + N::one());
    num_traits::pow(h, (p + q + r + 2) as usize) / (int(q + 1) * int(p + q + 2))
}

/// One monomial `coeff * h^ph zeta^pz xi^px` of a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Ratio<i64>,
    pub ph: u32,
    pub pz: u32,
    pub px: u32,
}

const fn mono(num: i64, den: i64, ph: u32, pz: u32, px: u32) -> (i64, i64, u32, u32, u32) {
    (num, den, ph, pz, px)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelName {
    Psi,
    Phi1,
    Phi2,
    Varphi1,
    Varphi2,
    Phi1PlusVarphi1,
    Phi2PlusVarphi2,
}

/// Homogeneous polynomial kernel `f(h, zeta, xi)` on the triangle
/// `0 <= xi <= zeta <= h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleKernel {
    pub name: KernelName,
    pub monomials: Vec<Monomial>,
}

impl TriangleKernel {
    pub fn new(name: KernelName) -> Self {
        use KernelName::*;
        let table: &[(i64, i64, u32, u32, u32)] = match name {
            // zeta - xi - h/3
            Psi => &[mono(1, 1, 0, 1, 0), mono(-1, 1, 0, 0, 1), mono(-1, 3, 1, 0, 0)],
            // h^2 - 4 h xi + 2 zeta xi
            Phi1 => &[mono(1, 1, 2, 0, 0), mono(-4, 1, 1, 0, 1), mono(2, 1, 0, 1, 1)],
            // (h - 2 zeta)^2 - 2 zeta xi
            Phi2 => &[mono(1, 1, 2, 0, 0), mono(-4, 1, 1, 1, 0), mono(4, 1, 0, 2, 0), mono(-2, 1, 0, 1, 1)],
            // h^2 - 6 h zeta + 6 h xi + 6 zeta xi + 3 zeta^2 - 12 xi^2
            Varphi1 => &[
                mono(1, 1, 2, 0, 0),
                mono(-6, 1, 1, 1, 0),
                mono(6, 1, 1, 0, 1),
                mono(6, 1, 0, 1, 1),
                mono(3, 1, 0, 2, 0),
                mono(-12, 1, 0, 0, 2),
            ],
            // h^2 - 6 h zeta + 6 h xi - 6 zeta xi + 5 zeta^2
            Varphi2 => &[
                mono(1, 1, 2, 0, 0),
                mono(-6, 1, 1, 1, 0),
                mono(6, 1, 1, 0, 1),
                mono(-6, 1, 0, 1, 1),
                mono(5, 1, 0, 2, 0),
            ],
            Phi1PlusVarphi1 => return Self::new(Phi1).plus(&Self::new(Varphi1), name),
            Phi2PlusVarphi2 => return Self::new(Phi2).plus(&Self::new(Varphi2), name),
        };
        let monomials =
            table.iter().map(|&(n, d, ph, pz, px)| Monomial { coeff: Ratio::new(n, d), ph, pz, px }).collect();
        Self { name, monomials }
    }

    fn plus(&self, other: &Self, name: KernelName) -> Self {
        let mut monomials = self.monomials.clone();
        for m in &other.monomials {
            match monomials.iter_mut().find(|o| (o.ph, o.pz, o.px) == (m.ph, m.pz, m.px)) {
                Some(o) => o.coeff += m.coeff,
                None => monomials.push(*m),
            }
        }
        monomials.retain(|m| m.coeff != Ratio::from(0));
        Self { name, monomials }
    }

    /// Homogeneous degree in `(h, zeta, xi)`.
    pub fn degree(&self) -> u32 {
        let m = &self.monomials[0];
        m.ph + m.pz + m.px
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.monomials.iter().all(|m| m.ph + m.pz + m.px == d)
    }

    /// Kernels of odd degree are odd under `(h, zeta, xi) -> -(h, zeta, xi)`.
    pub fn is_odd(&self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn eval(&self, h: f64, zeta: f64, xi: f64) -> f64 {
        self.monomials
            .iter()
            .map(|m| {
                (*m.coeff.numer() as f64 / *m.coeff.denom() as f64)
                    * h.powi(m.ph as i32)
                    * zeta.powi(m.pz as i32)
                    * xi.powi(m.px as i32)
            })
            .sum()
    }

    /// Exact integral over the triangle for a rational `h`.
    pub fn triangle_integral(&self, h: Ratio<i64>) -> Ratio<i64> {
        self.monomials.iter().map(|m| m.coeff * triangle_monomial(m.pz, m.px, m.ph, h)).sum()
    }
}

/// Barycentric weights for interpolation through `x`.
fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| 1.0 / (0..x.len()).filter(|&j| j != i).map(|j| x[i] - x[j]).product::<f64>())
        .collect()
}

/// All Lagrange basis values `l_i(t)` for nodes `x`.
fn lagrange_all(x: &[f64], bw: &[f64], t: f64) -> Vec<f64> {
    if let Some(k) = x.iter().position(|&xi| xi == t) {
        let mut out = vec![0.0; x.len()];
        out[k] = 1.0;
        return out;
    }
    let terms: Vec<f64> = x.iter().zip(bw).map(|(&xi, &w)| w / (t - xi)).collect();
    let denom: f64 = terms.iter().sum();
    terms.iter().map(|v| v / denom).collect()
}

/// `C_ij = int_triangle f(1, zeta, xi) l_i(zeta) l_j(xi)` for the `n`-point
/// Gauss–Legendre nodes on `[0, 1]`, row-major.
///
/// Expanding the Lagrange basis into monomials is hopelessly ill-conditioned
/// beyond a handful of nodes, so the polynomial integrand is instead
/// integrated exactly with a collapsed (Duffy) Gauss rule:
/// `zeta = s`, `xi = s r`, `dxi dzeta = s dr ds`.
fn unit_weights(kernel: &TriangleKernel, n: usize) -> Vec<f64> {
    let (x, _) = gauss_legendre_unit(n);
    let nodes: Vec<f64> = x.iter().map(|z| 0.5 * (1.0 + z)).collect();
    let bw = barycentric_weights(&nodes);
    let d = kernel.degree() as usize;
    // degree in s: d + 2(n-1) + 1, in r: d + (n-1)
    let ms = (d + 2 * n).div_ceil(2) + 1;
    let mr = (d + n).div_ceil(2) + 1;
    let (gs, ws) = gauss_legendre_unit(ms);
    let (gr, wr) = gauss_legendre_unit(mr);
    let mut c = vec![0.0; n * n];
    for (&s0, &w_s) in gs.iter().zip(&ws) {
        let s = 0.5 * (1.0 + s0);
        let ls = lagrange_all(&nodes, &bw, s);
        for (&r0, &w_r) in gr.iter().zip(&wr) {
            let r = 0.5 * (1.0 + r0);
            let xi = s * r;
            let lx = lagrange_all(&nodes, &bw, xi);
            let w = 0.25 * w_s * w_r * s * kernel.eval(1.0, s, xi);
            for i in 0..n {
                let wi = w * ls[i];
                for j in 0..n {
                    c[i * n + j] += wi * lx[j];
                }
            }
        }
    }
    c
}

type Cache = Mutex<HashMap<(KernelName, usize), Arc<Vec<f64>>>>;

/// Cached [`unit_weights`]; scale by `h^(degree + 2)` for a step of size `h`.
pub(crate) fn interpolation_weights(kernel: &TriangleKernel, n: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("weight cache poisoned").get(&(kernel.name, n)) {
        return Arc::clone(c);
    }
    let c = Arc::new(unit_weights(kernel, n));
    cache.lock().expect("weight cache poisoned").insert((kernel.name, n), Arc::clone(&c));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use KernelName::*;

    #[test]
    fn monomial_integrals() {
        assert_eq!(triangle_monomial(0, 0, 0, Ratio::from(1)), Ratio::new(1, 2));
        assert_eq!(triangle_monomial(1, 0, 0, Ratio::from(1)), Ratio::new(1, 3));
        assert_eq!(triangle_monomial(0, 1, 0, Ratio::from(1)), Ratio::new(1, 6));
        assert_eq!(triangle_monomial(2, 3, 1, 2.0_f64), 2f64.powi(8) / (4.0 * 7.0));
    }

    #[test]
    fn zero_mean_kernels() {
        for name in [Psi, Varphi1, Varphi2] {
            let k = TriangleKernel::new(name);
            assert_eq!(k.triangle_integral(Ratio::from(1)), Ratio::from(0), "{name:?}");
            assert_eq!(k.triangle_integral(Ratio::new(3, 7)), Ratio::from(0), "{name:?}");
        }
        assert_ne!(TriangleKernel::new(Phi1).triangle_integral(Ratio::from(1)), Ratio::from(0));
    }

    #[test]
    fn degrees_and_parity() {
        let psi = TriangleKernel::new(Psi);
        assert_eq!(psi.degree(), 1);
        assert!(psi.is_odd());
        for name in [Phi1, Phi2, Varphi1, Varphi2, Phi1PlusVarphi1, Phi2PlusVarphi2] {
            let k = TriangleKernel::new(name);
            assert!(k.is_homogeneous());
            assert_eq!(k.degree(), 2, "{name:?}");
            assert!(!k.is_odd());
        }
    }

    #[test]
    fn combined_kernels_add_up() {
        let s = TriangleKernel::new(Phi2PlusVarphi2);
        for (z, x) in [(0.3, 0.1), (0.9, 0.6)] {
            let a = TriangleKernel::new(Phi2).eval(1.0, z, x) + TriangleKernel::new(Varphi2).eval(1.0, z, x);
            assert!((s.eval(1.0, z, x) - a).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_reproduce_exact_polynomial_integrals() {
        // sum_ij C_ij p(z_i) q(z_j) must equal the exact triangle integral of
        // f p q whenever p, q have degree < n
        let k = TriangleKernel::new(Phi1PlusVarphi1);
        for n in [3, 11, 21] {
            let c = interpolation_weights(&k, n);
            let (x, _) = gauss_legendre_unit(n);
            let z: Vec<f64> = x.iter().map(|v| 0.5 * (1.0 + v)).collect();
            // p = zeta^2, q = xi: integrand monomials shift by (2, 1)
            let mut got = 0.0;
            for i in 0..n {
                for j in 0..n {
                    got += c[i * n + j] * z[i] * z[i] * z[j];
                }
            }
            let exact: f64 = k
                .monomials
                .iter()
                .map(|m| {
                    let v = m.coeff * triangle_monomial(m.pz + 2, m.px + 1, m.ph, Ratio::from(1));
                    *v.numer() as f64 / *v.denom() as f64
                })
                .sum();
            assert!((got - exact).abs() < 1e-14, "n = {n}: {got} vs {exact}");
        }
    }
}
