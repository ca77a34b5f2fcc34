use std::fmt;
use std::sync::Arc;

use crate::scalar::Real;
use crate::spectral::{Grid, GridFunction};

type Eval<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
type Deriv<T> = Arc<dyn Fn(usize, T, T) -> T + Send + Sync>;

/// Static part and time profile of a potential `V_D(x) + f(t) x`.
#[derive(Clone)]
pub struct Separable<T: Real> {
    /// `(a, x) -> d^a V_D / dx^a (x)`, valid for every order `a`.
    pub static_part: Arc<dyn Fn(usize, T) -> T + Send + Sync>,
    pub profile: Arc<dyn Fn(T) -> T + Send + Sync>,
}

/// `V(x, t)`, optionally with analytic spatial derivatives and separable
/// structure.
#[derive(Clone)]
pub struct PotentialModel<T: Real> {
    eval: Eval<T>,
    /// Highest order the derivative provider handles, and the provider.
    derivatives: Option<(usize, Deriv<T>)>,
    separable: Option<Separable<T>>,
    time_scale: Option<T>,
    label: Arc<str>,
}

impl<T: Real> PotentialModel<T> {
    pub fn new(eval: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), derivatives: None, separable: None, time_scale: None, label: Arc::from("V") }
    }

    /// Attaches `(a, x, t) -> d^a V / dx^a` for `a <= max_order`.
    pub fn with_derivatives(mut self, max_order: usize, d: impl Fn(usize, T, T) -> T + Send + Sync + 'static) -> Self {
        self.derivatives = Some((max_order, Arc::new(d)));
        self
    }

    pub fn with_time_scale(mut self, scale: T) -> Self {
        self.time_scale = Some(scale);
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Arc::from(label);
        self
    }

    /// `V_D(x) + f(t) x`; `static_part(a, x)` must give every derivative order
    /// of `V_D` (polynomials return zero beyond their degree).
    pub fn separable(
        static_part: impl Fn(usize, T) -> T + Send + Sync + 'static,
        profile: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        let sep = Separable { static_part: Arc::new(static_part), profile: Arc::new(profile) };
        let (s, p) = (Arc::clone(&sep.static_part), Arc::clone(&sep.profile));
        let (s2, p2) = (Arc::clone(&sep.static_part), Arc::clone(&sep.profile));
        Self {
            eval: Arc::new(move |x, t| s(0, x) + p(t) * x),
            derivatives: Some((
                usize::MAX,
                Arc::new(move |a, x, t| match a {
                    0 => s2(0, x) + p2(t) * x,
                    1 => s2(1, x) + p2(t),
                    _ => s2(a, x),
                }),
            )),
            separable: Some(sep),
            time_scale: None,
            label: Arc::from("V"),
        }
    }

    /// `V = 0`.
    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn constant(c: T) -> Self {
        Self::new(move |_, _| c).with_derivatives(usize::MAX, move |a, _, _| if a == 0 { c } else { T::zero() })
    }

    pub fn eval(&self, x: T, t: T) -> T {
        (self.eval)(x, t)
    }

    /// Analytic `d^a V / dx^a`, if provided for this order.
    pub fn dx(&self, a: usize, x: T, t: T) -> Option<T> {
        match &self.derivatives {
            Some((max, d)) if a <= *max => Some(d(a, x, t)),
            _ if a == 0 => Some(self.eval(x, t)),
            _ => None,
        }
    }

    pub fn analytic_order(&self) -> usize {
        self.derivatives.as_ref().map_or(0, |(m, _)| *m)
    }

    pub fn separable_parts(&self) -> Option<&Separable<T>> {
        self.separable.as_ref()
    }

    pub fn time_scale(&self) -> Option<T> {
        self.time_scale
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `V(., t)` on the grid, carrying analytic derivatives up to `order`
    /// where available.
    pub fn sample(&self, grid: &Arc<Grid<T>>, t: T, order: usize) -> GridFunction<T> {
        let top = order.min(self.analytic_order());
        let f = GridFunction::analytic(grid, top, |a, x| self.dx(a, x, t).expect("order within provider range"));
        f.with_label(&*self.label)
    }
}

impl<T: Real> fmt::Debug for PotentialModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialModel")
            .field("label", &self.label)
            .field("analytic_order", &self.analytic_order())
            .field("separable", &self.separable.is_some())
            .finish()
    }
}
