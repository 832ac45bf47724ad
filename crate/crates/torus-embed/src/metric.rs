//! Periodic, group-invariant Riemannian metrics on ℝⁿ and the decomposition
//! g̃ = Q1 + c·Σdxᵢ².
//!
//! A metric field evaluates to an exactly symmetric matrix at every point
//! (only the upper triangle is ever stored). The split keeps Q1 lazy as
//! g̃ − c·I so the sum identity holds to rounding, never to tabulation error.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::group::{BieberbachElement, SymmetryGroup};
use crate::linalg::SymMat;
use crate::sample::Sampler;
use crate::scalar::{real, to_f64, Real};

/// Residual threshold for the declared-invariance precondition of a split.
pub const INVARIANCE_TOL: f64 = 1e-9;

const INVARIANCE_BUDGET: u64 = 256;
const INVARIANCE_SEED: u64 = 0x1a7e;

#[derive(Debug, Clone)]
enum MetricKind<T: Real> {
    Constant(SymMat<T>),
    /// e^{2 f(x)} · I with a scalar expression f.
    ConformalFlat { factor: Expr },
    /// (2πρ)² dx₁² + (2π)² (R + ρ cos 2πx₁)² dx₂², the torus of revolution.
    Revolution { major: T, minor: T },
    /// Upper-triangle entries as expressions, row-major.
    Expressions(Vec<Expr>),
    /// base + shift·I, evaluated lazily (shift may be negative: this is Q1).
    Shifted { base: Arc<MetricField<T>>, shift: T },
}

/// A point-dependent symmetric positive-definite bilinear form on ℝⁿ,
/// invariant under a declared symmetry group.
#[derive(Debug, Clone)]
pub struct MetricField<T: Real> {
    n: usize,
    kind: MetricKind<T>,
    group: SymmetryGroup,
}

impl<T: Real> MetricField<T> {
    pub fn identity(n: usize, group: SymmetryGroup) -> Result<Self> {
        Self::constant(SymMat::identity(n), group)
    }

    pub fn constant(matrix: SymMat<T>, group: SymmetryGroup) -> Result<Self> {
        let n = matrix.n();
        check_group_dim(n, &group)?;
        Ok(MetricField { n, kind: MetricKind::Constant(matrix), group })
    }

    pub fn conformal_flat(n: usize, factor: Expr, group: SymmetryGroup) -> Result<Self> {
        check_group_dim(n, &group)?;
        Ok(MetricField { n, kind: MetricKind::ConformalFlat { factor }, group })
    }

    pub fn revolution(major: T, minor: T, group: SymmetryGroup) -> Result<Self> {
        check_group_dim(2, &group)?;
        if !(minor > T::zero() && major > minor) {
            return Err(Error::Config(format!(
                "revolution metric needs R > rho > 0, got R={major}, rho={minor}"
            )));
        }
        Ok(MetricField { n: 2, kind: MetricKind::Revolution { major, minor }, group })
    }

    pub fn from_expressions(n: usize, upper_entries: Vec<Expr>, group: SymmetryGroup) -> Result<Self> {
        check_group_dim(n, &group)?;
        if upper_entries.len() != n * (n + 1) / 2 {
            return Err(Error::Config(format!(
                "expected {} upper-triangle entries for n={n}, got {}",
                n * (n + 1) / 2,
                upper_entries.len()
            )));
        }
        Ok(MetricField { n, kind: MetricKind::Expressions(upper_entries), group })
    }

    /// The lazily shifted field base + shift·I.
    pub fn shifted(base: &MetricField<T>, shift: T) -> Self {
        MetricField {
            n: base.n,
            kind: MetricKind::Shifted { base: Arc::new(base.clone()), shift },
            group: base.group.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn family(&self) -> &'static str {
        match &self.kind {
            MetricKind::Constant(_) => "constant",
            MetricKind::ConformalFlat { .. } => "conformal-flat",
            MetricKind::Revolution { .. } => "revolution",
            MetricKind::Expressions(_) => "expression",
            MetricKind::Shifted { .. } => "derived",
        }
    }

    /// True when the field is constant in x (so decompositions over integer
    /// wave vectors apply).
    pub fn constant_value(&self) -> Option<SymMat<T>> {
        match &self.kind {
            MetricKind::Constant(m) => Some(m.clone()),
            MetricKind::Shifted { base, shift } => {
                base.constant_value().map(|m| m.add_scaled_identity(*shift))
            }
            _ => None,
        }
    }

    /// Evaluates the metric at `x`; the result is symmetric by construction.
    pub fn eval(&self, x: &[T]) -> Result<SymMat<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "metric of dimension {} evaluated at a point of dimension {}",
                self.n,
                x.len()
            )));
        }
        match &self.kind {
            MetricKind::Constant(m) => Ok(m.clone()),
            MetricKind::ConformalFlat { factor } => {
                let f = factor.eval(x)?;
                let scale = (real::<T>(2.0) * f).exp();
                let mut m = SymMat::zeros(self.n);
                for i in 0..self.n {
                    m.set(i, i, scale);
                }
                Ok(m)
            }
            MetricKind::Revolution { major, minor } => {
                let two_pi = real::<T>(2.0) * T::PI();
                let mut m = SymMat::zeros(2);
                let ring = *major + *minor * (two_pi * x[0]).cos();
                m.set(0, 0, (two_pi * *minor) * (two_pi * *minor));
                m.set(1, 1, two_pi * ring * two_pi * ring);
                Ok(m)
            }
            MetricKind::Expressions(entries) => {
                let mut m = SymMat::zeros(self.n);
                let mut it = entries.iter();
                for i in 0..self.n {
                    for j in i..self.n {
                        m.set(i, j, it.next().expect("validated length").eval(x)?);
                    }
                }
                Ok(m)
            }
            MetricKind::Shifted { base, shift } => {
                Ok(base.eval(x)?.add_scaled_identity(*shift))
            }
        }
    }

    /// Minimum over the uniform `resolution`ⁿ grid on [0,1)ⁿ of the smallest
    /// eigenvalue. Returns non-positive values rather than erroring; the
    /// caller decides.
    pub fn min_eigenvalue_over_domain(&self, resolution: usize) -> Result<T> {
        if resolution < 2 {
            return Err(Error::Config("grid resolution must be at least 2".into()));
        }
        let cells = (resolution as u64)
            .checked_pow(self.n as u32)
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| Error::Config("grid too large; lower the resolution".into()))?;
        let res_t = real::<T>(resolution as f64);
        let mut x = vec![T::zero(); self.n];
        let mut min = T::infinity();
        for flat in 0..cells {
            let mut rem = flat;
            for axis in 0..self.n {
                let i = rem % resolution as u64;
                rem /= resolution as u64;
                x[axis] = real::<T>(i as f64) / res_t;
            }
            let m = self.eval(&x)?;
            min = min.min(m.min_eigenvalue());
        }
        Ok(min)
    }

    /// Max over sampled points of ‖Aᵀ·g(Ax+v)·A − g(x)‖_F for one element.
    pub fn check_invariance(
        &self,
        element: &BieberbachElement,
        sampler: &Sampler,
        budget: u64,
    ) -> Result<T> {
        if element.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "group element of dimension {} against metric of dimension {}",
                element.dim(),
                self.n
            )));
        }
        let mut worst = T::zero();
        for i in 0..budget {
            let x: Vec<T> = sampler.point(i, budget);
            let moved = element.act(&x);
            let pulled = self.eval(&moved)?.congruence_int(element.holonomy());
            let here = self.eval(&x)?;
            worst = worst.max(pulled.sub(&here).frob_norm());
        }
        Ok(worst)
    }

    fn require_invariance(&self) -> Result<()> {
        let sampler = Sampler::unit(INVARIANCE_SEED, self.n);
        for g in self.group.generators() {
            let residual = self.check_invariance(g, &sampler, INVARIANCE_BUDGET)?;
            if to_f64(residual) >= INVARIANCE_TOL {
                return Err(Error::NotInvariant {
                    residual: to_f64(residual),
                    generator: g.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Decomposes g̃ = Q1 + c·I with c = fraction × (grid minimum eigenvalue).
    pub fn split(&self, fraction: T, resolution: usize) -> Result<MetricSplit<T>> {
        check_fraction(fraction)?;
        self.require_invariance()?;
        let min_eig = self.min_eigenvalue_over_domain(resolution)?;
        if min_eig <= T::zero() {
            return Err(Error::NotPositiveDefinite { min_eig: to_f64(min_eig) });
        }
        let c = fraction * min_eig;
        let margin = (T::one() - fraction) * min_eig;
        Ok(MetricSplit {
            total: self.clone(),
            q1: MetricField::shifted(self, -c),
            c,
            margin,
            grid_resolution: resolution,
        })
    }
}

fn check_group_dim(n: usize, group: &SymmetryGroup) -> Result<()> {
    if group.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "group `{}` has dimension {}, metric has dimension {n}",
            group.name(),
            group.dim()
        )));
    }
    Ok(())
}

fn check_fraction<T: Real>(fraction: T) -> Result<()> {
    if !(fraction > T::zero() && fraction < T::one()) {
        return Err(Error::Config(format!("split fraction must lie in (0,1), got {fraction}")));
    }
    Ok(())
}

/// The decomposition g̃ = Q1 + c·I together with its certificate data.
#[derive(Debug, Clone)]
pub struct MetricSplit<T: Real> {
    total: MetricField<T>,
    q1: MetricField<T>,
    c: T,
    margin: T,
    grid_resolution: usize,
}

impl<T: Real> MetricSplit<T> {
    /// Treats `q1` itself as the given field and assembles the total metric
    /// g̃ = q1 + c·I around it, with c = fraction/(1−fraction) × (grid
    /// minimum eigenvalue of q1). This keeps c = fraction × min-eig(g̃), the
    /// same policy as [`MetricField::split`], while letting an explicit
    /// oracle for q1 drive the construction.
    pub fn with_metric_as_q1(q1: &MetricField<T>, fraction: T, resolution: usize) -> Result<Self> {
        check_fraction(fraction)?;
        q1.require_invariance()?;
        let min_eig = q1.min_eigenvalue_over_domain(resolution)?;
        if min_eig <= T::zero() {
            return Err(Error::NotPositiveDefinite { min_eig: to_f64(min_eig) });
        }
        let c = fraction / (T::one() - fraction) * min_eig;
        Ok(MetricSplit {
            total: MetricField::shifted(q1, c),
            q1: q1.clone(),
            c,
            margin: min_eig,
            grid_resolution: resolution,
        })
    }

    pub fn total(&self) -> &MetricField<T> {
        &self.total
    }

    pub fn q1(&self) -> &MetricField<T> {
        &self.q1
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn margin(&self) -> T {
        self.margin
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }
}
