//! Potentials and the time integrals `mu` and `Lambda` of one step.

mod kernels;
mod moments;
mod potential;
mod quadrature;
mod tables;

pub use kernels::{triangle_monomial, KernelName, Monomial, TriangleKernel};
pub use moments::{eval_lambda, eval_mu, NodeSamples, Parity, SAMPLE_ORDER};
pub use potential::{PotentialModel, Separable};
pub use quadrature::{bernoulli, gl_rule, scaled_bernoulli, QuadratureRule, MAX_GL_NODES};
pub use tables::{MuLambdaTables, TableKey, MZ2_KEYS, MZ4_KEYS, MZ6_KEYS};
