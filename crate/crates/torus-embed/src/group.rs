//! Deck transformations and Bieberbach-group elements acting on ℝⁿ.
//!
//! An element is a rigid motion x ↦ Ax + v whose holonomy part A is an
//! integer orthogonal matrix (hence a signed permutation, the point
//! symmetries compatible with the cubic lattice ℤⁿ). Group algebra is exact:
//! integer matrices and rational translation vectors. Floating point enters
//! only when an element acts on a point.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

pub type Rational = Ratio<i64>;

/// Rigid motion x ↦ Ax + v with integer orthogonal A and rational v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BieberbachElement {
    n: usize,
    /// Row-major n×n holonomy matrix.
    a: Vec<i64>,
    v: Vec<Rational>,
}

impl fmt::Display for BieberbachElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(A={:?}, v={:?})", self.a, self.v)
    }
}

fn int_mat_mul(n: usize, a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                acc += a[i * n + k] as i128 * b[k * n + j] as i128;
            }
            out[i * n + j] = i64::try_from(acc)
                .map_err(|_| Error::NotLatticeCompatible("integer overflow in product".into()))?;
        }
    }
    Ok(out)
}

fn int_mat_vec_rat(n: usize, a: &[i64], v: &[Rational]) -> Vec<Rational> {
    (0..n)
        .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + Rational::from(a[i * n + j]) * v[j]))
        .collect()
}

fn transpose(n: usize, a: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

impl BieberbachElement {
    /// Validates that `a` is integer orthogonal (AᵀA = I exactly).
    pub fn new(a: Vec<Vec<i64>>, v: Vec<Rational>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(Error::NotLatticeCompatible("holonomy matrix must be square".into()));
        }
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "translation has length {}, holonomy is {n}x{n}",
                v.len()
            )));
        }
        let flat: Vec<i64> = a.into_iter().flatten().collect();
        let at = transpose(n, &flat);
        let product = int_mat_mul(n, &at, &flat)?;
        for i in 0..n {
            for j in 0..n {
                let expected = i64::from(i == j);
                if product[i * n + j] != expected {
                    return Err(Error::NotLatticeCompatible(
                        "holonomy matrix is not orthogonal".into(),
                    ));
                }
            }
        }
        Ok(BieberbachElement { n, a: flat, v })
    }

    pub fn identity(n: usize) -> Self {
        let mut a = vec![0i64; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        BieberbachElement { n, a, v: vec![Rational::zero(); n] }
    }

    /// Lattice translation by the integer vector `k`.
    pub fn translation(k: &[i64]) -> Self {
        let n = k.len();
        let mut e = Self::identity(n);
        e.v = k.iter().map(|&x| Rational::from(x)).collect();
        e
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn holonomy(&self) -> &[i64] {
        &self.a
    }

    pub fn translation_part(&self) -> &[Rational] {
        &self.v
    }

    pub fn holonomy_is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.a[i * self.n + j] == i64::from(i == j)))
    }

    /// True for elements of the translation lattice Γ: A = I and v ∈ ℤⁿ.
    pub fn is_lattice_translation(&self) -> bool {
        self.holonomy_is_identity() && self.v.iter().all(|r| r.is_integer())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "composing elements of dimension {} and {}",
                self.n, other.n
            )));
        }
        let a = int_mat_mul(self.n, &self.a, &other.a)?;
        let mut v = int_mat_vec_rat(self.n, &self.a, &other.v);
        for i in 0..self.n {
            v[i] += self.v[i];
        }
        Ok(BieberbachElement { n: self.n, a, v })
    }

    pub fn inverse(&self) -> Self {
        let at = transpose(self.n, &self.a);
        let mut v = int_mat_vec_rat(self.n, &at, &self.v);
        for r in &mut v {
            *r = -*r;
        }
        BieberbachElement { n: self.n, a: at, v }
    }

    /// Applies the motion to a point: Ax + v.
    pub fn act<T: Real>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n, "point dimension");
        (0..self.n)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.n {
                    let a = self.a[i * self.n + j];
                    if a != 0 {
                        acc += real::<T>(a as f64) * x[j];
                    }
                }
                acc + real::<T>(self.v[i].to_f64().expect("rational fits f64"))
            })
            .collect()
    }
}

/// Converts a float into a small-denominator rational, rejecting values that
/// are not close to one (generator translations are lattice fractions).
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Config(format!("translation entry {x} is not finite")));
    }
    let r = Rational::approximate_float(x)
        .ok_or_else(|| Error::Config(format!("translation entry {x} is not rational-like")))?;
    let back = r.to_f64().unwrap_or(f64::NAN);
    if (back - x).abs() > 1e-9 * (1.0 + x.abs()) {
        return Err(Error::Config(format!(
            "translation entry {x} has no small rational representation"
        )));
    }
    Ok(r)
}

/// A declared symmetry group: a name plus generating rigid motions.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    name: String,
    n: usize,
    generators: Vec<BieberbachElement>,
}

impl SymmetryGroup {
    pub fn from_generators(name: impl Into<String>, n: usize, generators: Vec<BieberbachElement>) -> Result<Self> {
        for g in &generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "group generator has dimension {}, expected {n}",
                    g.dim()
                )));
            }
        }
        Ok(SymmetryGroup { name: name.into(), n, generators })
    }

    /// Translations along the coordinate axes: the deck group ℤⁿ.
    pub fn torus(n: usize) -> Self {
        let generators = (0..n)
            .map(|i| {
                let mut k = vec![0i64; n];
                k[i] = 1;
                BieberbachElement::translation(&k)
            })
            .collect();
        SymmetryGroup { name: format!("torus-{n}"), n, generators }
    }

    /// Wallpaper group pg: a glide reflection (x+1/2, -y) plus the lattice.
    pub fn pg() -> Self {
        let glide = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![Rational::new(1, 2), Rational::zero()],
        )
        .expect("pg glide is orthogonal");
        let mut generators = SymmetryGroup::torus(2).generators;
        generators.push(glide);
        SymmetryGroup { name: "pg".into(), n: 2, generators }
    }

    /// Wallpaper group pgg: a two-fold rotation plus a diagonal glide.
    pub fn pgg() -> Self {
        let rot = BieberbachElement::new(
            vec![vec![-1, 0], vec![0, -1]],
            vec![Rational::zero(), Rational::zero()],
        )
        .expect("rotation is orthogonal");
        let glide = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![Rational::new(1, 2), Rational::new(1, 2)],
        )
        .expect("pgg glide is orthogonal");
        let mut generators = SymmetryGroup::torus(2).generators;
        generators.push(rot);
        generators.push(glide);
        SymmetryGroup { name: "pgg".into(), n: 2, generators }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[BieberbachElement] {
        &self.generators
    }
}

/// Affine action on the Euclidean factor: y ↦ Ay + √c·v, kept in exact form
/// (A, v rational, c) so compositions compare exactly on coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedAction<T> {
    element: BieberbachElement,
    sqrt_c: T,
}

/// The induced action d_e of a deck element on e-coordinates, where
/// e(x) = √c·x: it satisfies d_e(e(x)) = e(d(x)).
pub fn induced_action<T: Real>(d: &BieberbachElement, c: T) -> Result<InducedAction<T>> {
    if c <= T::zero() {
        return Err(Error::Config("induced action needs c > 0".into()));
    }
    Ok(InducedAction { element: d.clone(), sqrt_c: c.sqrt() })
}

impl<T: Real> InducedAction<T> {
    pub fn element(&self) -> &BieberbachElement {
        &self.element
    }

    pub fn sqrt_c(&self) -> T {
        self.sqrt_c
    }

    pub fn dim(&self) -> usize {
        self.element.dim()
    }

    pub fn apply(&self, y: &[T]) -> Vec<T> {
        let n = self.element.dim();
        assert_eq!(y.len(), n, "induced action dimension");
        (0..n)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..n {
                    let a = self.element.a[i * n + j];
                    if a != 0 {
                        acc += real::<T>(a as f64) * y[j];
                    }
                }
                acc + self.sqrt_c * real::<T>(self.element.v[i].to_f64().expect("rational"))
            })
            .collect()
    }

    /// Exact composition: (A₁, v₁)∘(A₂, v₂) = (A₁A₂, A₁v₂ + v₁).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.sqrt_c != other.sqrt_c {
            return Err(Error::Config("composing induced actions with different scales".into()));
        }
        Ok(InducedAction { element: self.element.compose(&other.element)?, sqrt_c: self.sqrt_c })
    }
}

/// Block isometry of ℝ^{N+n}: identity on the first N coordinates, an
/// induced affine action on the trailing n.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientIsometry<T> {
    passive: usize,
    action: InducedAction<T>,
}

impl<T: Real> AmbientIsometry<T> {
    pub fn new(passive: usize, action: InducedAction<T>) -> Self {
        AmbientIsometry { passive, action }
    }

    pub fn passive_dim(&self) -> usize {
        self.passive
    }

    pub fn ambient_dim(&self) -> usize {
        self.passive + self.action.dim()
    }

    pub fn action(&self) -> &InducedAction<T> {
        &self.action
    }

    pub fn apply(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.ambient_dim(), "ambient point dimension");
        let mut out = y[..self.passive].to_vec();
        out.extend(self.action.apply(&y[self.passive..]));
        out
    }

    /// Exact block-affine composition; fails on mismatched block sizes.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.passive != other.passive {
            return Err(Error::DimensionMismatch("ambient isometry block sizes differ".into()));
        }
        Ok(AmbientIsometry { passive: self.passive, action: self.action.compose(&other.action)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn translation_is_valid_and_recognized() {
        let t = BieberbachElement::new(
            vec![vec![1, 0], vec![0, 1]],
            vec![rat(1, 1), rat(0, 1)],
        )
        .unwrap();
        assert!(t.is_lattice_translation());
    }

    #[test]
    fn pg_glide_is_valid_but_not_a_lattice_translation() {
        let g = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![rat(1, 2), rat(0, 1)],
        )
        .unwrap();
        assert!(!g.is_lattice_translation());
        assert!(!g.holonomy_is_identity());
    }

    #[test]
    fn shear_rejected() {
        let err = BieberbachElement::new(
            vec![vec![1, 1], vec![0, 1]],
            vec![rat(0, 1), rat(0, 1)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not a lattice-compatible isometry"));
    }

    #[test]
    fn glide_squared_is_a_lattice_translation() {
        // pg glide squared: A² = I, Av + v = (1, 0).
        let g = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![rat(1, 2), rat(0, 1)],
        )
        .unwrap();
        let g2 = g.compose(&g).unwrap();
        assert!(g2.is_lattice_translation());
        assert_eq!(g2.translation_part(), &[rat(1, 1), rat(0, 1)]);
        assert!(g2.holonomy_is_identity());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = BieberbachElement::new(
            vec![vec![0, -1], vec![1, 0]],
            vec![rat(1, 4), rat(-3, 2)],
        )
        .unwrap();
        let id = g.compose(&g.inverse()).unwrap();
        assert_eq!(id, BieberbachElement::identity(2));
        let id2 = g.inverse().compose(&g).unwrap();
        assert_eq!(id2, BieberbachElement::identity(2));
    }

    #[test]
    fn act_translates_points() {
        let t = BieberbachElement::translation(&[1, 0]);
        let y = t.act(&[0.3f64, 0.7]);
        assert_eq!(y, vec![1.3, 0.7]);
    }

    #[test]
    fn translation_lattice_is_normal_in_builtins() {
        // d t d⁻¹ must be a translation for every generator d and lattice
        // translation t, exactly.
        for group in [SymmetryGroup::pg(), SymmetryGroup::pgg(), SymmetryGroup::torus(3)] {
            let n = group.dim();
            for d in group.generators() {
                for axis in 0..n {
                    let mut k = vec![0i64; n];
                    k[axis] = 1;
                    let t = BieberbachElement::translation(&k);
                    let conj = d.compose(&t).unwrap().compose(&d.inverse()).unwrap();
                    assert!(
                        conj.is_lattice_translation(),
                        "conjugate of a translation must stay in the lattice"
                    );
                }
            }
        }
    }

    #[test]
    fn induced_action_scales_translation() {
        // d = translation (1,0), c = 0.25: y ↦ y + (0.5, 0).
        let d = BieberbachElement::translation(&[1, 0]);
        let act = induced_action(&d, 0.25f64).unwrap();
        let y = act.apply(&[0.0, 0.0]);
        assert!((y[0] - 0.5).abs() < 1e-15);
        assert_eq!(y[1], 0.0);
    }

    #[test]
    fn induced_action_of_identity_is_identity() {
        let d = BieberbachElement::identity(2);
        let act = induced_action(&d, 0.7f64).unwrap();
        let y = act.apply(&[1.25, -2.5]);
        assert_eq!(y, vec![1.25, -2.5]);
    }

    #[test]
    fn induced_action_intertwines_e() {
        // pg glide, c = 0.25: d_e(e(x)) = e(d(x)) to machine precision.
        let d = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![rat(1, 2), rat(0, 1)],
        )
        .unwrap();
        let c = 0.25f64;
        let act = induced_action(&d, c).unwrap();
        let x = [0.3f64, 0.7];
        let e = |p: &[f64]| -> Vec<f64> { p.iter().map(|&t| c.sqrt() * t).collect() };
        let lhs = act.apply(&e(&x));
        let rhs = e(&d.act(&x));
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ambient_isometry_composes_exactly() {
        let g = BieberbachElement::new(
            vec![vec![1, 0], vec![0, -1]],
            vec![rat(1, 2), rat(0, 1)],
        )
        .unwrap();
        let t = BieberbachElement::translation(&[0, 1]);
        let c = 0.5f64;
        let dg = AmbientIsometry::new(4, induced_action(&g, c).unwrap());
        let dt = AmbientIsometry::new(4, induced_action(&t, c).unwrap());
        let composed = dg.compose(&dt).unwrap();
        let direct = AmbientIsometry::new(
            4,
            induced_action(&g.compose(&t).unwrap(), c).unwrap(),
        );
        assert_eq!(composed, direct);
    }
}
