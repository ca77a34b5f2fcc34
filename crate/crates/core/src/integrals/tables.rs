use std::sync::Arc;

use super::kernels::{KernelName, TriangleKernel};
use super::moments::{NodeSamples, Parity};
use super::potential::PotentialModel;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKey {
    Mu { j: usize, k: usize, parity: Parity },
    Lambda { kernel: KernelName, a: usize, b: usize, parity: Parity },
    /// `h V(., t + h/2)`, the midpoint-rule stand-in for `mu_00`.
    Midpoint,
}

impl TableKey {
    pub const fn mu(j: usize, k: usize, parity: Parity) -> Self {
        TableKey::Mu { j, k, parity }
    }

    pub const fn lambda(kernel: KernelName, a: usize, b: usize, parity: Parity) -> Self {
        TableKey::Lambda { kernel, a, b, parity }
    }
}

pub const MZ2_KEYS: &[TableKey] = &[TableKey::mu(0, 0, Parity::None)];

pub const MZ4_KEYS: &[TableKey] = &[TableKey::mu(0, 0, Parity::None), TableKey::mu(1, 1, Parity::None)];

/// `mu_12^e` is not used by the order-6 exponents but is cheap, so it is
/// tabulated with the rest.
pub const MZ6_KEYS: &[TableKey] = &[
    TableKey::mu(0, 0, Parity::Even),
    TableKey::mu(1, 1, Parity::Odd),
    TableKey::mu(1, 2, Parity::Even),
    TableKey::mu(2, 1, Parity::Even),
    TableKey::mu(3, 1, Parity::Odd),
    TableKey::lambda(KernelName::Psi, 1, 1, Parity::Even),
    TableKey::lambda(KernelName::Phi1PlusVarphi1, 1, 2, Parity::Odd),
    TableKey::lambda(KernelName::Phi2PlusVarphi2, 2, 1, Parity::Odd),
];

/// Time integrals of one step `[t, t + h]`, built once and then read-only.
#[derive(Clone, Debug)]
pub struct MuLambdaTables<T: Real> {
    t: T,
    h: T,
    entries: Vec<(TableKey, GridFunction<T>)>,
}

impl<T: Real> MuLambdaTables<T> {
    pub fn empty(t: T, h: T) -> Self {
        Self { t, h, entries: Vec::new() }
    }

    pub fn build(samples: &NodeSamples<T>, keys: &[TableKey]) -> Result<Self> {
        let mut out = Self::empty(samples.t(), samples.h());
        for &key in keys {
            let f = match key {
                TableKey::Mu { j, k, parity } => samples.mu(j, k, parity)?,
                TableKey::Lambda { kernel, a, b, parity } => {
                    samples.lambda(&TriangleKernel::new(kernel), a, b, parity)?
                }
                TableKey::Midpoint => {
                    return Err(Error::contract("the midpoint entry needs the potential; use insert_midpoint"))
                }
            };
            out.insert(key, f);
        }
        Ok(out)
    }

    /// Adds `h V(., t + h/2)`.
    pub fn insert_midpoint(&mut self, pot: &PotentialModel<T>, grid: &Arc<Grid<T>>) {
        let half = self.h * T::lit(0.5);
        let v = pot.sample(grid, self.t + half, super::moments::SAMPLE_ORDER).scale(self.h).with_label("hV_mid");
        self.insert(TableKey::Midpoint, v);
    }

    pub fn insert(&mut self, key: TableKey, f: GridFunction<T>) {
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = f,
            None => self.entries.push((key, f)),
        }
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn get(&self, key: TableKey) -> Result<&GridFunction<T>> {
        self.entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::MissingTable(format!("{key:?}")))
    }

    pub fn mu(&self, j: usize, k: usize, parity: Parity) -> Result<&GridFunction<T>> {
        self.get(TableKey::mu(j, k, parity))
    }

    pub fn lambda(&self, kernel: KernelName, a: usize, b: usize, parity: Parity) -> Result<&GridFunction<T>> {
        self.get(TableKey::lambda(kernel, a, b, parity))
    }

    pub fn keys(&self) -> impl Iterator<Item = TableKey> + '_ {
        self.entries.iter().map(|(k, _)| *k)
    }
}
