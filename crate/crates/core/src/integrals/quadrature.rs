use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_GL_NODES: usize = 64;

/// Classical Bernoulli polynomial `B_j(x)`, `j <= 4`.
pub fn bernoulli<T: Real>(j: usize, x: T) -> Result<T> {
    let l = T::lit;
    Ok(match j {
        0 => T::one(),
        1 => x - l(0.5),
        2 => x * x - x + l(1.0 / 6.0),
        3 => x * x * x - l(1.5) * x * x + l(0.5) * x,
        4 => x * x * x * x - l(2.0) * x * x * x + x * x - l(1.0 / 30.0),
        _ => return Err(Error::contract(format!("Bernoulli polynomial of degree {j} is not provided"))),
    })
}

/// `h^j B_j(zeta / h)`.
pub fn scaled_bernoulli<T: Real>(j: usize, h: T, zeta: T) -> Result<T> {
    Ok(h.powi(j as i32) * bernoulli(j, zeta / h)?)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton's
/// method on the three-term recurrence. Node `i` and node `n-1-i` are exact
/// mirrors.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            let p = p1;
            dp = nf * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        // descending z so that mirrored pairs are (i, n-1-i), ascending on output
        x[n - 1 - i] = z;
        x[i] = -z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Quadrature nodes and weights on `[0, h]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<T: Real> {
    pub h: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes pair up as `tau_i + tau_{n-1-i} = h`, with matching weights.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        let tol = T::lit(64.0) * T::epsilon() * num_traits::Float::abs(self.h).max(T::min_positive_value());
        (0..n).all(|i| {
            let j = n - 1 - i;
            num_traits::Float::abs(self.nodes[i] + self.nodes[j] - self.h) <= tol
                && num_traits::Float::abs(self.weights[i] - self.weights[j]) <= tol
        })
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// `n`-point Gauss–Legendre rule mapped to `[0, h]`. Negative `h` gives the
/// rule for the reversed interval.
pub fn gl_rule<T: Real>(n: usize, h: T) -> Result<QuadratureRule<T>> {
    if n == 0 || n > MAX_GL_NODES {
        return Err(Error::Quadrature(format!("{n} Gauss–Legendre nodes unsupported (1..={MAX_GL_NODES})")));
    }
    if !h.is_finite() {
        return Err(Error::Quadrature("step size must be finite".into()));
    }
    let (x, w) = gauss_legendre_unit(n);
    let half = h * T::lit(0.5);
    let nodes = x.iter().map(|&z| half + half * T::lit(z)).collect();
    let weights = w.iter().map(|&wi| half * T::lit(wi)).collect();
    Ok(QuadratureRule { h, nodes, weights })
}
