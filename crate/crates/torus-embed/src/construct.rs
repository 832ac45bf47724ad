//! Assembly of the embedding maps: covering map φ, periodic immersion
//! Φ = u∘φ, the bounded embedding E = (Φ, Ψ) and the equivariant embedding
//! F = (Φ, e), plus the block extension of deck transformations to the
//! ambient space.
//!
//! Periodic components are evaluated directly on ℝⁿ rather than through a
//! literal fractional-part map, so chain-rule Jacobians are smooth
//! everywhere; φ exists only as a reporting convenience.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{induced_action, AmbientIsometry, BieberbachElement};
use crate::linalg::Mat;
use crate::metric::{MetricField, MetricSplit};
use crate::oracle::{verify_oracle, EmbeddingOracle};
use crate::sample::Sampler;
use crate::scalar::{real, to_f64, Real};
use crate::spiral::{ProductSpiralMap, SpiralCurve};

/// Residual threshold an oracle must beat against Q1 before constructions
/// accept it.
pub const ORACLE_ACCEPT_TOL: f64 = 1e-8;

/// Residual threshold for extending a holonomy element to the ambient space.
const EXTENSION_TOL: f64 = 1e-8;

const BUILD_CHECK_SEED: u64 = 0xb111d;
const BUILD_CHECK_BUDGET: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapTag {
    /// The covering map φ (fractional parts; reporting only).
    Cover,
    /// Φ = u∘φ, the periodic immersion realizing Q1.
    Phi,
    /// Ψ, the product-spiral embedding realizing Q2 = c·Σdxᵢ².
    Psi,
    /// e(x) = √c·x, the linear isometry of (ℝⁿ, Q2).
    Euclidean,
    /// E = (Φ, Ψ): bounded isometric embedding.
    Bounded,
    /// F = (Φ, e): equivariant isometric embedding.
    Equivariant,
}

impl fmt::Display for MapTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapTag::Cover => "phi",
            MapTag::Phi => "Phi",
            MapTag::Psi => "Psi",
            MapTag::Euclidean => "e",
            MapTag::Bounded => "E",
            MapTag::Equivariant => "F",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
enum MapKind<T: Real> {
    Cover,
    Oracle(Arc<EmbeddingOracle<T>>),
    Spiral(ProductSpiralMap<T>),
    Linear { scale: T },
    Pair(Box<AmbientMap<T>>, Box<AmbientMap<T>>),
}

/// A smooth map ℝⁿ → ℝᴰ with analytic Jacobian and a declared pullback
/// contract (the metric its Gram matrix must reproduce).
#[derive(Debug, Clone)]
pub struct AmbientMap<T: Real> {
    n: usize,
    ambient: usize,
    tag: MapTag,
    kind: MapKind<T>,
    contract: MetricField<T>,
    radius_bound: Option<T>,
}

impl<T: Real> AmbientMap<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn tag(&self) -> MapTag {
        self.tag
    }

    /// The metric this map's pullback must equal.
    pub fn contract(&self) -> &MetricField<T> {
        &self.contract
    }

    /// Norm bound on the image, when the map is bounded.
    pub fn radius_bound(&self) -> Option<T> {
        self.radius_bound
    }

    /// For paired maps (E, F): the two halves.
    pub fn parts(&self) -> Option<(&AmbientMap<T>, &AmbientMap<T>)> {
        match &self.kind {
            MapKind::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// The product-spiral payload, when this map is Ψ.
    pub fn spiral_product(&self) -> Option<&ProductSpiralMap<T>> {
        match &self.kind {
            MapKind::Spiral(m) => Some(m),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "map {} takes points of dimension {}, got {}",
                self.tag,
                self.n,
                x.len()
            )));
        }
        match &self.kind {
            MapKind::Cover => Ok(x.iter().map(|&v| v - v.floor()).collect()),
            MapKind::Oracle(o) => o.eval(x),
            MapKind::Spiral(m) => Ok(m.eval(x)),
            MapKind::Linear { scale } => Ok(x.iter().map(|&v| *scale * v).collect()),
            MapKind::Pair(a, b) => {
                let mut out = a.eval(x)?;
                out.extend(b.eval(x)?);
                Ok(out)
            }
        }
    }

    /// Analytic D×n Jacobian (chain-rule composition for paired maps; the
    /// covering map reports the identity, valid away from the seam).
    pub fn jacobian(&self, x: &[T]) -> Result<Mat<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("jacobian point dimension".into()));
        }
        match &self.kind {
            MapKind::Cover => Ok(Mat::identity(self.n)),
            MapKind::Oracle(o) => o.jacobian(x),
            MapKind::Spiral(m) => Ok(m.jacobian(x)),
            MapKind::Linear { scale } => {
                let mut j = Mat::zeros(self.n, self.n);
                for i in 0..self.n {
                    j.set(i, i, *scale);
                }
                Ok(j)
            }
            MapKind::Pair(a, b) => Ok(a.jacobian(x)?.vstack(&b.jacobian(x)?)),
        }
    }
}

/// The covering map x ↦ ({x₁}, …, {xₙ}) onto the fundamental domain.
pub fn covering_phi<T: Real>(n: usize) -> AmbientMap<T> {
    let contract = MetricField::identity(n, crate::group::SymmetryGroup::torus(n))
        .expect("identity metric");
    AmbientMap {
        n,
        ambient: n,
        tag: MapTag::Cover,
        kind: MapKind::Cover,
        contract,
        radius_bound: Some(real::<T>(n as f64).sqrt()),
    }
}

fn constant_scaled_identity<T: Real>(n: usize, c: T) -> MetricField<T> {
    let mut m = crate::linalg::SymMat::zeros(n);
    for i in 0..n {
        m.set(i, i, c);
    }
    MetricField::constant(m, crate::group::SymmetryGroup::torus(n)).expect("constant metric")
}

/// Φ = u∘φ for a verified oracle: periodic, image inside the R_Φ ball,
/// pullback contract Q1. Rejects oracles whose pullback misses Q1.
pub fn build_phi<T: Real>(
    split: &MetricSplit<T>,
    oracle: Arc<EmbeddingOracle<T>>,
) -> Result<AmbientMap<T>> {
    let n = split.dim();
    if oracle.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "oracle dimension {} against split dimension {n}",
            oracle.dim()
        )));
    }
    let sampler = Sampler::symmetric(BUILD_CHECK_SEED, n, 2.0);
    let residual = verify_oracle(&oracle, split.q1(), &sampler, BUILD_CHECK_BUDGET)?;
    if to_f64(residual) >= ORACLE_ACCEPT_TOL {
        return Err(Error::OracleRejected(format!(
            "pullback residual {residual} against Q1 exceeds {ORACLE_ACCEPT_TOL:e}"
        )));
    }
    let radius = oracle.radius_bound();
    Ok(AmbientMap {
        n,
        ambient: oracle.ambient_dim(),
        tag: MapTag::Phi,
        kind: MapKind::Oracle(oracle),
        contract: split.q1().clone(),
        radius_bound: Some(radius),
    })
}

/// Ψ as an ambient map with contract c·Σdxᵢ².
pub fn build_psi<T: Real>(
    curve: Arc<SpiralCurve<T>>,
    c: T,
    n: usize,
) -> Result<AmbientMap<T>> {
    let map = ProductSpiralMap::new(curve, c, n)?;
    let radius = map.radius_bound();
    Ok(AmbientMap {
        n,
        ambient: 2 * n,
        tag: MapTag::Psi,
        kind: MapKind::Spiral(map),
        contract: constant_scaled_identity(n, c),
        radius_bound: Some(radius),
    })
}

/// e(x) = √c·x with contract c·Σdxᵢ²; unbounded.
pub fn euclidean_factor<T: Real>(c: T, n: usize) -> Result<AmbientMap<T>> {
    if c <= T::zero() {
        return Err(Error::Config("euclidean factor needs c > 0".into()));
    }
    Ok(AmbientMap {
        n,
        ambient: n,
        tag: MapTag::Euclidean,
        kind: MapKind::Linear { scale: c.sqrt() },
        contract: constant_scaled_identity(n, c),
        radius_bound: None,
    })
}

/// E = (Φ, Ψ): D = N + 2n, pullback contract g̃ = Q1 + c·I, image inside the
/// ball of radius √(R_Φ² + n·r_out²).
pub fn build_e<T: Real>(
    split: &MetricSplit<T>,
    oracle: Arc<EmbeddingOracle<T>>,
    curve: Arc<SpiralCurve<T>>,
) -> Result<AmbientMap<T>> {
    let n = split.dim();
    let phi = build_phi(split, oracle)?;
    let psi = build_psi(curve, split.c(), n)?;
    let r_phi = phi.radius_bound.expect("phi is bounded");
    let r_psi = psi.radius_bound.expect("psi is bounded");
    let bound = (r_phi * r_phi + r_psi * r_psi).sqrt();
    let ambient = phi.ambient + psi.ambient;
    Ok(AmbientMap {
        n,
        ambient,
        tag: MapTag::Bounded,
        kind: MapKind::Pair(Box::new(phi), Box::new(psi)),
        contract: split.total().clone(),
        radius_bound: Some(bound),
    })
}

/// F = (Φ, e): D = N + n, pullback contract g̃; unbounded but equivariant.
pub fn build_f<T: Real>(
    split: &MetricSplit<T>,
    oracle: Arc<EmbeddingOracle<T>>,
) -> Result<AmbientMap<T>> {
    let n = split.dim();
    let phi = build_phi(split, oracle)?;
    let e = euclidean_factor(split.c(), n)?;
    let ambient = phi.ambient + e.ambient;
    Ok(AmbientMap {
        n,
        ambient,
        tag: MapTag::Equivariant,
        kind: MapKind::Pair(Box::new(phi), Box::new(e)),
        contract: split.total().clone(),
        radius_bound: None,
    })
}

/// Extends a deck element to the ambient isometry d̃ of ℝ^{N+n}: identity on
/// the first N coordinates, the induced affine action on the rest.
///
/// Lattice translations always extend (Φ is ℤⁿ-periodic). Other elements
/// extend only when both Q1 and the oracle components are invariant under
/// them, which is checked numerically rather than assumed.
pub fn extend_action<T: Real>(
    d: &BieberbachElement,
    split: &MetricSplit<T>,
    oracle: &EmbeddingOracle<T>,
) -> Result<AmbientIsometry<T>> {
    let n = split.dim();
    if d.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "group element dimension {} against split dimension {n}",
            d.dim()
        )));
    }
    if !d.is_lattice_translation() {
        let sampler = Sampler::symmetric(BUILD_CHECK_SEED ^ 0x99, n, 2.0);
        let metric_residual = split.q1().check_invariance(d, &sampler, 256)?;
        if to_f64(metric_residual) >= EXTENSION_TOL {
            return Err(Error::ExtensionUnavailable(format!(
                "Q1 is not invariant under {d} (residual {metric_residual})"
            )));
        }
        let mut oracle_residual = T::zero();
        for i in 0..256u64 {
            let x: Vec<T> = sampler.point(i, 256);
            let a = oracle.eval(&x)?;
            let b = oracle.eval(&d.act(&x))?;
            let dist = a
                .iter()
                .zip(&b)
                .fold(T::zero(), |acc, (&p, &q)| acc + (p - q) * (p - q))
                .sqrt();
            oracle_residual = oracle_residual.max(dist);
        }
        if to_f64(oracle_residual) >= EXTENSION_TOL {
            return Err(Error::ExtensionUnavailable(format!(
                "oracle components are not invariant under {d} (residual {oracle_residual})"
            )));
        }
    }
    Ok(extend_action_unchecked(d, split, oracle))
}

/// Diagnostic-mode extension: builds d̃ without the invariance checks, so
/// equivariance failures can be measured instead of prevented.
pub fn extend_action_unchecked<T: Real>(
    d: &BieberbachElement,
    split: &MetricSplit<T>,
    oracle: &EmbeddingOracle<T>,
) -> AmbientIsometry<T> {
    let action = induced_action(d, split.c()).expect("split c is positive");
    AmbientIsometry::new(oracle.ambient_dim(), action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SymmetryGroup;
    use crate::linalg::SymMat;

    fn identity_setup(
        n: usize,
    ) -> (MetricSplit<f64>, Arc<EmbeddingOracle<f64>>, Arc<SpiralCurve<f64>>) {
        let g = MetricField::identity(n, SymmetryGroup::torus(n)).unwrap();
        let split = g.split(0.5, 16).unwrap();
        let oracle =
            Arc::new(EmbeddingOracle::clifford_diagonal(&vec![0.5; n]).unwrap());
        let curve = SpiralCurve::with_defaults();
        (split, oracle, curve)
    }

    #[test]
    fn covering_map_takes_fractional_parts() {
        let phi = covering_phi::<f64>(2);
        assert_eq!(phi.eval(&[1.3, -0.25]).unwrap(), vec![0.30000000000000004, 0.75]);
        assert_eq!(phi.eval(&[2.0, 5.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn oracle_composed_with_cover_is_plain_evaluation() {
        // u(φ(x)) = u(x) for periodic u.
        let (split, oracle, _) = identity_setup(2);
        let phi_map = build_phi(&split, oracle.clone()).unwrap();
        let x = [7.3, -2.2];
        let cover = covering_phi::<f64>(2);
        let through_cover = oracle.eval(&cover.eval(&x).unwrap()).unwrap();
        let direct = phi_map.eval(&x).unwrap();
        for (a, b) in through_cover.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_is_periodic_and_matches_closed_form_at_origin() {
        let (split, oracle, _) = identity_setup(2);
        let phi = build_phi(&split, oracle).unwrap();
        let x = [0.37, -1.91];
        let a = phi.eval(&x).unwrap();
        let b = phi.eval(&[x[0] + 1.0, x[1]]).unwrap();
        let dist: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 1e-12, "periodicity residual {dist}");

        // Φ(0,0) = (1/2π)(√0.5, 0, √0.5, 0).
        let v = phi.eval(&[0.0, 0.0]).unwrap();
        let amp = 0.5f64.sqrt() / std::f64::consts::TAU;
        assert!((v[0] - amp).abs() < 1e-15);
        assert!(v[1].abs() < 1e-15);
        assert!((v[2] - amp).abs() < 1e-15);
        assert!(v[3].abs() < 1e-15);
    }

    #[test]
    fn phi_rejects_mismatched_oracle() {
        let (split, _, _) = identity_setup(2);
        // An oracle for diag(2,7) cannot stand in for Q1 = 0.5 I.
        let wrong = Arc::new(EmbeddingOracle::clifford_diagonal(&[2.0, 7.0]).unwrap());
        let err = build_phi(&split, wrong).unwrap_err();
        assert!(err.to_string().contains("oracle rejected"));
    }

    #[test]
    fn e_dimensions_and_value_at_origin() {
        let (split, oracle, curve) = identity_setup(2);
        let e = build_e(&split, oracle, curve).unwrap();
        // D = N + 2n = 4 + 4.
        assert_eq!(e.ambient_dim(), 8);
        let v = e.eval(&[0.0, 0.0]).unwrap();
        // (Φ(0,0), ψ(0), ψ(0)) with ψ(0) = (1.5, 0).
        assert_eq!(&v[4..], &[1.5, 0.0, 1.5, 0.0]);
    }

    #[test]
    fn e_norm_bound_over_wide_window() {
        let (split, oracle, curve) = identity_setup(2);
        let e = build_e(&split, oracle, curve).unwrap();
        let bound = e.radius_bound().unwrap();
        // R_Φ = √(0.5+0.5)/(2π), r_out = 2, n = 2.
        let expected = (1.0 / std::f64::consts::TAU.powi(2) + 2.0 * 4.0).sqrt();
        assert!((bound - expected).abs() < 1e-12);
        let sampler = Sampler::symmetric(5, 2, 1e3);
        for x in sampler.points::<f64>(1000) {
            let v = e.eval(&x).unwrap();
            let norm: f64 = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            assert!(norm <= bound + 1e-9, "norm {norm} above bound {bound}");
        }
    }

    #[test]
    fn f_dimensions_and_trailing_block() {
        let (split, oracle, _) = identity_setup(2);
        let f = build_f(&split, oracle).unwrap();
        // D = N + n = 4 + 2.
        assert_eq!(f.ambient_dim(), 6);
        let v0 = f.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(&v0[4..], &[0.0, 0.0]);
        // F(2,0) − F(0,0) = (0, …, 0, √0.5·2, 0) by periodicity of Φ.
        let v2 = f.eval(&[2.0, 0.0]).unwrap();
        let diff: Vec<f64> = v2.iter().zip(&v0).map(|(a, b)| a - b).collect();
        for d in &diff[..4] {
            assert!(d.abs() < 1e-12);
        }
        assert!((diff[4] - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(diff[5].abs() < 1e-15);
    }

    #[test]
    fn f_jacobian_trailing_block_is_scaled_identity() {
        let (split, oracle, _) = identity_setup(2);
        let f = build_f(&split, oracle).unwrap();
        let j = f.jacobian(&[0.3, 0.8]).unwrap();
        let s = split.c().sqrt();
        assert_eq!(j.get(4, 0), s);
        assert_eq!(j.get(5, 1), s);
        assert_eq!(j.get(4, 1), 0.0);
        assert_eq!(j.get(5, 0), 0.0);
    }

    #[test]
    fn translation_extension_is_equivariant() {
        let (split, oracle, _) = identity_setup(2);
        let f = build_f(&split, oracle.clone()).unwrap();
        let d = BieberbachElement::translation(&[1, 0]);
        let d_tilde = extend_action(&d, &split, &oracle).unwrap();
        assert_eq!(d_tilde.ambient_dim(), f.ambient_dim());
        let sampler = Sampler::symmetric(31, 2, 5.0);
        let mut worst = 0.0f64;
        for x in sampler.points::<f64>(1000) {
            let lhs = d_tilde.apply(&f.eval(&x).unwrap());
            let rhs = f.eval(&d.act(&x)).unwrap();
            let dist: f64 =
                lhs.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(dist);
        }
        assert!(worst < 1e-12, "equivariance residual {worst}");
    }

    #[test]
    fn identity_extension_is_ambient_identity() {
        let (split, oracle, _) = identity_setup(2);
        let d = BieberbachElement::identity(2);
        let d_tilde = extend_action(&d, &split, &oracle).unwrap();
        let y = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        assert_eq!(d_tilde.apply(&y), y);
    }

    #[test]
    fn extension_homomorphism_exact() {
        let (split, oracle, _) = identity_setup(2);
        let d1 = BieberbachElement::translation(&[3, -2]);
        let d2 = BieberbachElement::translation(&[-1, 5]);
        let composed = extend_action(&d1.compose(&d2).unwrap(), &split, &oracle).unwrap();
        let chained = extend_action(&d1, &split, &oracle)
            .unwrap()
            .compose(&extend_action(&d2, &split, &oracle).unwrap())
            .unwrap();
        assert_eq!(composed, chained);
    }

    #[test]
    fn glide_extension_refused_for_non_invariant_oracle() {
        // The identity metric is pg-invariant but the Clifford components
        // are not invariant under the glide, so the extension must refuse.
        let g = MetricField::identity(2, SymmetryGroup::pg()).unwrap();
        let split = g.split(0.5, 16).unwrap();
        let oracle = Arc::new(EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap());
        let glide = SymmetryGroup::pg().generators()[2].clone();
        assert!(!glide.is_lattice_translation());
        let err = extend_action(&glide, &split, &oracle).unwrap_err();
        assert!(err.to_string().contains("extension unavailable"));
    }

    #[test]
    fn q1_invariance_failure_also_refuses() {
        // diag(4,9) is invariant under the torus lattice but not under a
        // coordinate swap... a swap holonomy is orthogonal and lattice
        // compatible; Q1 = diag(2,7) is not swap-invariant.
        let g = MetricField::constant(SymMat::diag(&[4.0, 9.0]), SymmetryGroup::torus(2)).unwrap();
        let split = g.split(0.5, 16).unwrap();
        let oracle = Arc::new(EmbeddingOracle::clifford_diagonal(&[2.0, 7.0]).unwrap());
        let swap = BieberbachElement::new(
            vec![vec![0, 1], vec![1, 0]],
            vec![num_rational::Ratio::from(0), num_rational::Ratio::from(0)],
        )
        .unwrap();
        let err = extend_action(&swap, &split, &oracle).unwrap_err();
        assert!(err.to_string().contains("extension unavailable"));
    }
}
