//! Explicit isometric embeddings of quotient tori into ℝᴺ with analytic
//! Jacobians. These stand in for the abstract existence of some isometric
//! embedding: every oracle is checked numerically against the metric it
//! claims to realize before any construction accepts it.
//!
//! Built-in families:
//!  * Clifford-type: pairs (√c/2π)(cos 2π a·x, sin 2π a·x) over integer wave
//!    vectors a, pulling back the constant metric Σ c_k a_k a_kᵀ exactly;
//!  * the torus of revolution in ℝ³;
//!  * user expressions with symbolic gradients.


use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::linalg::{Mat, SymMat};
use crate::metric::MetricField;
use crate::sample::Sampler;
use crate::scalar::{real, to_f64, Real};

/// Reconstruction tolerance for integer decompositions.
const DECOMPOSITION_TOL: f64 = 1e-10;

/// One rank-one constituent c·(a aᵀ) of a constant metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordTerm<T> {
    pub coeff: T,
    pub wave: Vec<i64>,
}

#[derive(Debug, Clone)]
struct ExprComponent {
    expr: Expr,
    grad: Vec<Expr>,
}

#[derive(Debug, Clone)]
enum OracleKind<T: Real> {
    Clifford { terms: Vec<CliffordTerm<T>> },
    Revolution { major: T, minor: T },
    Expressions { components: Vec<ExprComponent> },
}

/// An explicit ℤⁿ-periodic map u : ℝⁿ → ℝᴺ with evaluable Jacobian.
#[derive(Debug, Clone)]
pub struct EmbeddingOracle<T: Real> {
    n: usize,
    big_n: usize,
    kind: OracleKind<T>,
    radius_bound: T,
}

impl<T: Real> EmbeddingOracle<T> {
    /// Product of circles realizing a constant diagonal metric: component
    /// pair j is (√g_jj/2π)(cos 2πx_j, sin 2πx_j), N = 2n.
    pub fn clifford_diagonal(diag: &[T]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Config("clifford oracle needs at least one entry".into()));
        }
        let terms = diag
            .iter()
            .enumerate()
            .map(|(j, &g)| {
                if g <= T::zero() {
                    return Err(Error::Config(format!("diagonal entry {g} must be positive")));
                }
                let mut wave = vec![0i64; diag.len()];
                wave[j] = 1;
                Ok(CliffordTerm { coeff: g, wave })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::clifford_general(diag.len(), terms)
    }

    /// Circles along integer wave vectors, N = 2m for m terms; pulls back
    /// Σ c_k a_k a_kᵀ analytically.
    pub fn clifford_general(n: usize, terms: Vec<CliffordTerm<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("clifford oracle needs at least one term".into()));
        }
        let mut total = T::zero();
        for t in &terms {
            if t.wave.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "wave vector {:?} has length {}, expected {n}",
                    t.wave,
                    t.wave.len()
                )));
            }
            if t.coeff <= T::zero() {
                return Err(Error::Config("clifford coefficients must be positive".into()));
            }
            total += t.coeff;
        }
        // Image lies on the sphere of radius √(Σ c_k)/(2π).
        let radius = total.sqrt() / (real::<T>(2.0) * T::PI());
        Ok(EmbeddingOracle { n, big_n: 2 * terms.len(), kind: OracleKind::Clifford { terms }, radius_bound: radius })
    }

    /// Torus of revolution: u(x₁,x₂) = ((R+ρcos2πx₁)cos2πx₂,
    /// (R+ρcos2πx₁)sin2πx₂, ρsin2πx₁); N = 3, pullback
    /// (2πρ)²dx₁² + (2π)²(R+ρcos2πx₁)²dx₂².
    pub fn revolution(major: T, minor: T) -> Result<Self> {
        if !(minor > T::zero() && major > minor) {
            return Err(Error::Config(format!(
                "revolution oracle needs R > rho > 0, got R={major}, rho={minor} (self-intersection)"
            )));
        }
        Ok(EmbeddingOracle {
            n: 2,
            big_n: 3,
            kind: OracleKind::Revolution { major, minor },
            radius_bound: major + minor,
        })
    }

    /// User-supplied components with symbolic Jacobian. Each component must
    /// be ℤⁿ-periodic; checked numerically at ~10³ sample pairs (x, x+e_i).
    pub fn from_expressions(n: usize, components: Vec<Expr>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("expression oracle needs at least one component".into()));
        }
        let sampler = Sampler::symmetric(0x0eac1e, n, 2.0);
        let budget = (1000 / n.max(1)) as u64;
        for comp in &components {
            for axis in 0..n {
                for i in 0..budget {
                    let x: Vec<T> = sampler.point(i, budget);
                    let mut shifted = x.clone();
                    shifted[axis] += T::one();
                    let a = comp.eval(&x)?;
                    let b = comp.eval(&shifted)?;
                    if (a - b).abs() > real::<T>(1e-9) * (T::one() + a.abs()) {
                        return Err(Error::OracleRejected(format!(
                            "component `{comp}` is not periodic along axis {} (residual {})",
                            axis + 1,
                            (a - b).abs()
                        )));
                    }
                }
            }
        }
        let components: Vec<ExprComponent> = components
            .into_iter()
            .map(|expr| {
                let grad = (0..n).map(|i| expr.differentiate(i)).collect();
                ExprComponent { expr, grad }
            })
            .collect();

        // Sampled sup of the image norm over the fundamental domain, with
        // headroom; an estimate, unlike the exact closed-form bounds above.
        let grid = if n <= 2 { 64usize } else { 16 };
        let mut sup = T::zero();
        let cells = (grid as u64).pow(n as u32);
        let mut x = vec![T::zero(); n];
        for flat in 0..cells {
            let mut rem = flat;
            for axis in 0..n {
                x[axis] = real::<T>((rem % grid as u64) as f64) / real(grid as f64);
                rem /= grid as u64;
            }
            let mut norm2 = T::zero();
            for c in &components {
                let v = c.expr.eval(&x)?;
                norm2 += v * v;
            }
            sup = sup.max(norm2.sqrt());
        }
        let radius = sup * real(1.001) + real(1e-6);
        let big_n = components.len();
        Ok(EmbeddingOracle { n, big_n, kind: OracleKind::Expressions { components }, radius_bound: radius })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The ambient dimension N.
    pub fn ambient_dim(&self) -> usize {
        self.big_n
    }

    /// Radius R_Φ of a ball containing the image.
    pub fn radius_bound(&self) -> T {
        self.radius_bound
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            OracleKind::Clifford { .. } => "clifford",
            OracleKind::Revolution { .. } => "revolution",
            OracleKind::Expressions { .. } => "expression",
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "oracle of dimension {} evaluated at a point of dimension {}",
                self.n,
                x.len()
            )));
        }
        let two_pi = real::<T>(2.0) * T::PI();
        match &self.kind {
            OracleKind::Clifford { terms } => {
                let mut out = Vec::with_capacity(self.big_n);
                for t in terms {
                    let amp = t.coeff.sqrt() / two_pi;
                    let phase = two_pi * dot_wave(&t.wave, x);
                    out.push(amp * phase.cos());
                    out.push(amp * phase.sin());
                }
                Ok(out)
            }
            OracleKind::Revolution { major, minor } => {
                let a1 = two_pi * x[0];
                let a2 = two_pi * x[1];
                let ring = *major + *minor * a1.cos();
                Ok(vec![ring * a2.cos(), ring * a2.sin(), *minor * a1.sin()])
            }
            OracleKind::Expressions { components } => {
                components.iter().map(|c| c.expr.eval(x)).collect()
            }
        }
    }

    /// Analytic N×n Jacobian.
    pub fn jacobian(&self, x: &[T]) -> Result<Mat<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("jacobian point dimension".into()));
        }
        let two_pi = real::<T>(2.0) * T::PI();
        match &self.kind {
            OracleKind::Clifford { terms } => {
                let mut j = Mat::zeros(self.big_n, self.n);
                for (row_pair, t) in terms.iter().enumerate() {
                    let root = t.coeff.sqrt();
                    let phase = two_pi * dot_wave(&t.wave, x);
                    let (sin, cos) = (phase.sin(), phase.cos());
                    for (col, &a) in t.wave.iter().enumerate() {
                        if a != 0 {
                            let a_t = real::<T>(a as f64);
                            j.set(2 * row_pair, col, -root * a_t * sin);
                            j.set(2 * row_pair + 1, col, root * a_t * cos);
                        }
                    }
                }
                Ok(j)
            }
            OracleKind::Revolution { major, minor } => {
                let a1 = two_pi * x[0];
                let a2 = two_pi * x[1];
                let ring = *major + *minor * a1.cos();
                let mut j = Mat::zeros(3, 2);
                j.set(0, 0, -two_pi * *minor * a1.sin() * a2.cos());
                j.set(0, 1, -two_pi * ring * a2.sin());
                j.set(1, 0, -two_pi * *minor * a1.sin() * a2.sin());
                j.set(1, 1, two_pi * ring * a2.cos());
                j.set(2, 0, two_pi * *minor * a1.cos());
                Ok(j)
            }
            OracleKind::Expressions { components } => {
                let mut j = Mat::zeros(self.big_n, self.n);
                for (row, c) in components.iter().enumerate() {
                    for (col, d) in c.grad.iter().enumerate() {
                        j.set(row, col, d.eval(x)?);
                    }
                }
                Ok(j)
            }
        }
    }

    /// JᵀJ at x.
    pub fn pullback(&self, x: &[T]) -> Result<SymMat<T>> {
        Ok(self.jacobian(x)?.gram())
    }
}

fn dot_wave<T: Real>(wave: &[i64], x: &[T]) -> T {
    wave.iter().zip(x).fold(T::zero(), |acc, (&a, &xi)| {
        if a == 0 {
            acc
        } else {
            acc + real::<T>(a as f64) * xi
        }
    })
}

/// Max over samples of ‖J_u(x)ᵀJ_u(x) − q1(x)‖_F.
pub fn verify_oracle<T: Real>(
    oracle: &EmbeddingOracle<T>,
    q1: &MetricField<T>,
    sampler: &Sampler,
    budget: u64,
) -> Result<T> {
    if oracle.dim() != q1.dim() {
        return Err(Error::DimensionMismatch(format!(
            "oracle dimension {} against metric dimension {}",
            oracle.dim(),
            q1.dim()
        )));
    }
    let mut worst = T::zero();
    for i in 0..budget {
        let x: Vec<T> = sampler.point(i, budget);
        let residual = oracle.pullback(&x)?.sub(&q1.eval(&x)?).frob_norm();
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// The candidate wave vectors {e_i} ∪ {e_i ± e_j : i < j}.
pub fn default_candidate_set(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; n];
                v[i] = 1;
                v[j] = sign;
                out.push(v);
            }
        }
    }
    out
}

/// All sign-normalized nonzero integer vectors with entries in [-2, 2].
pub fn extended_candidate_set(n: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let total = 5u64.pow(n as u32);
    for flat in 0..total {
        let mut rem = flat;
        let mut v = vec![0i64; n];
        for slot in &mut v {
            *slot = (rem % 5) as i64 - 2;
            rem /= 5;
        }
        if v.iter().all(|&e| e == 0) {
            continue;
        }
        // Normalize overall sign: first nonzero entry positive.
        if v.iter().find(|&&e| e != 0).is_some_and(|&e| e < 0) {
            for e in &mut v {
                *e = -*e;
            }
        }
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Writes a constant SPD matrix as Σ c_k a_k a_kᵀ with c_k ≥ 0 over the given
/// integer candidate vectors. The default candidate set admits an exact
/// closed-form solve (diagonal dominance); anything else goes through
/// projected-gradient nonnegative least squares.
pub fn integer_decomposition<T: Real>(
    g: &SymMat<T>,
    candidates: &[Vec<i64>],
) -> Result<Vec<CliffordTerm<T>>> {
    let n = g.n();
    if candidates.is_empty() {
        return Err(Error::NotRepresentable { residual: to_f64(g.frob_norm()) });
    }
    for a in candidates {
        if a.len() != n {
            return Err(Error::DimensionMismatch("candidate vector length".into()));
        }
    }

    if candidates == default_candidate_set(n) {
        if let Some(terms) = closed_form_default(g) {
            return Ok(terms);
        }
    }

    let coeffs = nnls_projected_gradient(g, candidates);
    let mut terms: Vec<CliffordTerm<T>> = candidates
        .iter()
        .zip(&coeffs)
        .filter(|(_, &c)| c > real(1e-12))
        .map(|(a, &c)| CliffordTerm { coeff: c, wave: a.clone() })
        .collect();
    let residual = reconstruction_residual(g, &terms);
    if to_f64(residual) >= DECOMPOSITION_TOL {
        return Err(Error::NotRepresentable { residual: to_f64(residual) });
    }
    terms.retain(|t| t.coeff > T::zero());
    Ok(terms)
}

/// Decomposes with the default candidate set, retrying with entries in
/// [-2, 2] when the small set cannot represent `g`.
pub fn decompose_constant_metric<T: Real>(g: &SymMat<T>) -> Result<Vec<CliffordTerm<T>>> {
    match integer_decomposition(g, &default_candidate_set(g.n())) {
        Ok(terms) => Ok(terms),
        Err(Error::NotRepresentable { .. }) => {
            integer_decomposition(g, &extended_candidate_set(g.n()))
        }
        Err(other) => Err(other),
    }
}

/// For the default candidate set the system is triangular: the off-diagonal
/// entry G_ij fixes the (e_i ± e_j) coefficients, the diagonal absorbs the
/// remainder. Succeeds exactly when the remainder is nonnegative
/// (diagonal dominance).
fn closed_form_default<T: Real>(g: &SymMat<T>) -> Option<Vec<CliffordTerm<T>>> {
    let n = g.n();
    let mut axis = vec![T::zero(); n];
    let mut pair_terms = Vec::new();
    for i in 0..n {
        axis[i] = g.get(i, i);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let off = g.get(i, j);
            axis[i] -= off.abs();
            axis[j] -= off.abs();
            if off != T::zero() {
                let mut wave = vec![0i64; n];
                wave[i] = 1;
                wave[j] = if off > T::zero() { 1 } else { -1 };
                pair_terms.push(CliffordTerm { coeff: off.abs(), wave });
            }
        }
    }
    let tiny = real::<T>(1e-12);
    if axis.iter().any(|&c| c < -tiny) {
        return None;
    }
    let mut terms = Vec::new();
    for (i, &c) in axis.iter().enumerate() {
        if c > tiny {
            let mut wave = vec![0i64; n];
            wave[i] = 1;
            terms.push(CliffordTerm { coeff: c, wave });
        }
    }
    terms.extend(pair_terms);
    Some(terms)
}

fn reconstruction_residual<T: Real>(g: &SymMat<T>, terms: &[CliffordTerm<T>]) -> T {
    let n = g.n();
    let mut rebuilt = SymMat::zeros(n);
    for t in terms {
        for i in 0..n {
            for j in i..n {
                let add = t.coeff * real::<T>((t.wave[i] * t.wave[j]) as f64);
                rebuilt.set(i, j, rebuilt.get(i, j) + add);
            }
        }
    }
    rebuilt.sub(g).frob_norm()
}

/// Projected gradient on ½‖Σ c_k a_k a_kᵀ − G‖_F² with step 1/L,
/// L = largest eigenvalue of the Gram matrix M_kl = (a_k·a_l)²; stops at
/// reconstruction residual 1e-12 or 10⁵ iterations.
fn nnls_projected_gradient<T: Real>(g: &SymMat<T>, candidates: &[Vec<i64>]) -> Vec<T> {
    let m = candidates.len();
    let n = g.n();
    let dot = |a: &[i64], b: &[i64]| -> f64 {
        a.iter().zip(b).map(|(&x, &y)| (x * y) as f64).sum::<f64>()
    };
    // Gram matrix in f64: entries are exact small integers squared.
    let gram: Vec<f64> = (0..m * m)
        .map(|idx| {
            let (k, l) = (idx / m, idx % m);
            let d = dot(&candidates[k], &candidates[l]);
            d * d
        })
        .collect();
    // b_k = ⟨a_k a_kᵀ, G⟩_F = a_kᵀ G a_k.
    let b: Vec<T> = candidates
        .iter()
        .map(|a| {
            let mut acc = T::zero();
            for i in 0..n {
                for j in 0..n {
                    acc += real::<T>((a[i] * a[j]) as f64) * g.get(i, j);
                }
            }
            acc
        })
        .collect();

    // Largest Gram eigenvalue by deterministic power iteration.
    let mut v = vec![1.0f64; m];
    let mut lambda = 1.0f64;
    for _ in 0..200 {
        let mut w = vec![0.0f64; m];
        for k in 0..m {
            for l in 0..m {
                w[k] += gram[k * m + l] * v[l];
            }
        }
        lambda = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if lambda == 0.0 {
            break;
        }
        for (wk, vk) in w.iter().zip(v.iter_mut()) {
            *vk = wk / lambda;
        }
    }
    let step = real::<T>(1.0 / lambda.max(1.0));

    let mut x = vec![T::zero(); m];
    for iter in 0..100_000 {
        // gradient = M x − b
        let mut grad = vec![T::zero(); m];
        for k in 0..m {
            let mut acc = T::zero();
            for l in 0..m {
                acc += real::<T>(gram[k * m + l]) * x[l];
            }
            grad[k] = acc - b[k];
        }
        for k in 0..m {
            x[k] = (x[k] - step * grad[k]).max(T::zero());
        }
        if iter % 128 == 0 {
            let terms: Vec<CliffordTerm<T>> = candidates
                .iter()
                .zip(&x)
                .filter(|(_, &c)| c > T::zero())
                .map(|(a, &c)| CliffordTerm { coeff: c, wave: a.clone() })
                .collect();
            if to_f64(reconstruction_residual(g, &terms)) < 1e-12 {
                break;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SymmetryGroup;

    fn two_pi() -> f64 {
        std::f64::consts::TAU
    }

    #[test]
    fn clifford_single_circle() {
        // n=1, g = 4π²: circle of radius 1, pullback 4π² dx².
        let o = EmbeddingOracle::clifford_diagonal(&[4.0 * std::f64::consts::PI.powi(2)]).unwrap();
        assert_eq!(o.ambient_dim(), 2);
        assert!((o.radius_bound() - 1.0).abs() < 1e-14);
        let p = o.pullback(&[0.3]).unwrap();
        assert!((p.get(0, 0) - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10);
    }

    #[test]
    fn clifford_half_identity_pullback_and_radius() {
        // Q1 of the identity-metric split: diag(0.5, 0.5), N = 4,
        // R_Φ = √(0.5+0.5)/(2π) = 1/(2π).
        let o = EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap();
        assert_eq!(o.ambient_dim(), 4);
        assert!((o.radius_bound() - 1.0 / two_pi()).abs() < 1e-15);
        let p = o.pullback(&[0.3, 0.7]).unwrap();
        assert!((p.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((p.get(1, 1) - 0.5).abs() < 1e-12);
        assert!(p.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn decomposition_of_coupled_matrix() {
        // [[5,2],[2,5]] = 3 e₁e₁ᵀ + 3 e₂e₂ᵀ + 2 (1,1)(1,1)ᵀ, residual 0.
        let g = SymMat::from_upper(2, vec![5.0, 2.0, 5.0]);
        let terms = integer_decomposition(&g, &default_candidate_set(2)).unwrap();
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[0], CliffordTerm { coeff: 3.0, wave: vec![1, 0] });
        assert_eq!(terms[1], CliffordTerm { coeff: 3.0, wave: vec![0, 1] });
        assert_eq!(terms[2], CliffordTerm { coeff: 2.0, wave: vec![1, 1] });
        assert_eq!(reconstruction_residual(&g, &terms), 0.0);
    }

    #[test]
    fn decomposition_diagonal_case() {
        let g = SymMat::diag(&[2.0, 7.0]);
        let terms = integer_decomposition(&g, &default_candidate_set(2)).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], CliffordTerm { coeff: 2.0, wave: vec![1, 0] });
        assert_eq!(terms[1], CliffordTerm { coeff: 7.0, wave: vec![0, 1] });
    }

    #[test]
    fn decomposition_empty_candidates_errors() {
        let g = SymMat::identity(2);
        let err = integer_decomposition::<f64>(&g, &[]).unwrap_err();
        assert!(err.to_string().contains("enlarge set"));
    }

    #[test]
    fn decomposition_retry_covers_non_dominant_matrix() {
        // [[1, 1.5],[1.5, 3]] is SPD but not diagonally dominant; the
        // extended candidate set (entries to ±2) represents it.
        let g = SymMat::from_upper(2, vec![1.0, 1.5, 3.0]);
        let terms = decompose_constant_metric(&g).unwrap();
        let residual = reconstruction_residual(&g, &terms);
        assert!(residual < 1e-10, "residual {residual}");
        assert!(terms.iter().all(|t| t.coeff > 0.0));
    }

    #[test]
    fn general_clifford_pullback_matches_matrix() {
        let g = SymMat::from_upper(2, vec![5.0, 2.0, 5.0]);
        let terms = decompose_constant_metric(&g).unwrap();
        let o = EmbeddingOracle::clifford_general(2, terms).unwrap();
        assert_eq!(o.ambient_dim(), 6);
        for x in Sampler::symmetric(3, 2, 4.0).points::<f64>(50) {
            let p = o.pullback(&x).unwrap();
            let residual = p.sub(&g).frob_norm();
            assert!(residual < 1e-12, "residual {residual} at {x:?}");
        }
    }

    #[test]
    fn general_clifford_separates_torus_points() {
        // Sampled pairs at torus distance ≥ 0.01 stay ≥ 0.005 apart in the
        // image: the axis terms alone already separate.
        let g = SymMat::from_upper(2, vec![5.0, 2.0, 5.0]);
        let o = EmbeddingOracle::clifford_general(2, decompose_constant_metric(&g).unwrap()).unwrap();
        let sampler = Sampler::unit(9, 2);
        let pts: Vec<Vec<f64>> = sampler.points(80);
        for (i, x) in pts.iter().enumerate() {
            for y in &pts[i + 1..] {
                let torus_dist: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| {
                        let d = (a - b).rem_euclid(1.0);
                        d.min(1.0 - d).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                if torus_dist < 0.01 {
                    continue;
                }
                let u = o.eval(x).unwrap();
                let v = o.eval(y).unwrap();
                let dist: f64 =
                    u.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(dist >= 0.005, "images too close: {dist} at torus distance {torus_dist}");
            }
        }
    }

    #[test]
    fn revolution_point_and_pullback() {
        let o = EmbeddingOracle::revolution(2.0, 1.0).unwrap();
        let p = o.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![3.0, 0.0, 0.0]);
        // Hand differentiation at x₁ = 0: diag(4π², 36π²).
        let g = o.pullback(&[0.0, 0.0]).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((g.get(0, 0) - 4.0 * pi2).abs() < 1e-10);
        assert!((g.get(1, 1) - 36.0 * pi2).abs() < 1e-9);
        assert!(g.get(0, 1).abs() < 1e-10);
    }

    #[test]
    fn revolution_rejects_self_intersection() {
        assert!(EmbeddingOracle::<f64>::revolution(1.0, 1.0).is_err());
    }

    #[test]
    fn verify_oracle_against_matching_and_mismatched_targets() {
        let o = EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap();
        let q1 = MetricField::constant(SymMat::diag(&[0.5, 0.5]), SymmetryGroup::torus(2)).unwrap();
        let sampler = Sampler::symmetric(1, 2, 2.0);
        let good = verify_oracle(&o, &q1, &sampler, 200).unwrap();
        assert!(good < 1e-12, "matching target residual {good}");

        // Revolution oracle against the identity metric: the residual at any
        // point is at least the value at x = 0 is not required, but the max
        // over samples approaches ‖diag(4π²−1, 36π²−1)‖_F ≈ 356.39.
        let rev = EmbeddingOracle::revolution(2.0, 1.0).unwrap();
        let id = MetricField::identity(2, SymmetryGroup::torus(2)).unwrap();
        let bad = verify_oracle(&rev, &id, &sampler, 400).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        let sup = ((4.0 * pi2 - 1.0).powi(2) + (36.0 * pi2 - 1.0).powi(2)).sqrt();
        assert!(bad > 300.0, "mismatch must be glaring, got {bad}");
        assert!(bad <= sup + 1e-9, "cannot exceed the worst-point value {sup}");
    }

    #[test]
    fn expression_oracle_reproduces_clifford() {
        let amp = (0.5f64).sqrt() / two_pi();
        let texts = [
            format!("{amp:?}*cos(2*pi*x1)"),
            format!("{amp:?}*sin(2*pi*x1)"),
            format!("{amp:?}*cos(2*pi*x2)"),
            format!("{amp:?}*sin(2*pi*x2)"),
        ];
        let comps: Vec<Expr> =
            texts.iter().map(|t| crate::exprlang::parse(t, 2).unwrap()).collect();
        let o = EmbeddingOracle::from_expressions(2, comps).unwrap();
        let q1 = MetricField::constant(SymMat::diag(&[0.5, 0.5]), SymmetryGroup::torus(2)).unwrap();
        let sampler = Sampler::symmetric(1, 2, 2.0);
        let residual = verify_oracle(&o, &q1, &sampler, 200).unwrap();
        assert!(residual < 1e-9, "expression clifford residual {residual}");
    }

    #[test]
    fn expression_oracle_rejects_non_periodic_component() {
        let comps = vec![crate::exprlang::parse("x1", 2).unwrap()];
        let err = EmbeddingOracle::<f64>::from_expressions(2, comps).unwrap_err();
        assert!(err.to_string().contains("not periodic"));
    }

    #[test]
    fn expression_revolution_matches_builtin() {
        let texts = [
            "(2 + cos(2*pi*x1))*cos(2*pi*x2)",
            "(2 + cos(2*pi*x1))*sin(2*pi*x2)",
            "sin(2*pi*x1)",
        ];
        let comps: Vec<Expr> =
            texts.iter().map(|t| crate::exprlang::parse(t, 2).unwrap()).collect();
        let via_expr = EmbeddingOracle::from_expressions(2, comps).unwrap();
        let builtin = EmbeddingOracle::revolution(2.0, 1.0).unwrap();
        let sampler = Sampler::symmetric(17, 2, 3.0);
        for x in sampler.points::<f64>(100) {
            let a = via_expr.pullback(&x).unwrap();
            let b = builtin.pullback(&x).unwrap();
            assert!(a.sub(&b).frob_norm() < 1e-9, "pullback mismatch at {x:?}");
        }
    }

    #[test]
    fn periodicity_of_builtin_oracles() {
        let oracles: Vec<EmbeddingOracle<f64>> = vec![
            EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap(),
            EmbeddingOracle::revolution(2.0, 1.0).unwrap(),
        ];
        let sampler = Sampler::symmetric(2, 2, 5.0);
        for o in &oracles {
            for x in sampler.points::<f64>(100) {
                let shifted: Vec<f64> = vec![x[0] + 1.0, x[1] - 2.0];
                let a = o.eval(&x).unwrap();
                let b = o.eval(&shifted).unwrap();
                let d: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                assert!(d < 1e-12, "periodicity residual {d}");
            }
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let oracles: Vec<EmbeddingOracle<f64>> = vec![
            EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap(),
            EmbeddingOracle::clifford_general(
                2,
                decompose_constant_metric(&SymMat::from_upper(2, vec![5.0, 2.0, 5.0])).unwrap(),
            )
            .unwrap(),
            EmbeddingOracle::revolution(2.0, 1.0).unwrap(),
        ];
        let h = 1e-6;
        let sampler = Sampler::symmetric(4, 2, 3.0);
        for o in &oracles {
            for x in sampler.points::<f64>(100) {
                let j = o.jacobian(&x).unwrap();
                let mut fd = Mat::zeros(o.ambient_dim(), o.dim());
                for col in 0..o.dim() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[col] += h;
                    xm[col] -= h;
                    let up = o.eval(&xp).unwrap();
                    let um = o.eval(&xm).unwrap();
                    for row in 0..o.ambient_dim() {
                        fd.set(row, col, (up[row] - um[row]) / (2.0 * h));
                    }
                }
                let rel = j.sub(&fd).frob_norm() / j.frob_norm().max(1e-30);
                assert!(rel < 1e-6, "relative Jacobian error {rel}");
            }
        }
    }

    #[test]
    fn image_norms_respect_radius_bound() {
        let oracles: Vec<EmbeddingOracle<f64>> = vec![
            EmbeddingOracle::clifford_diagonal(&[0.5, 0.5]).unwrap(),
            EmbeddingOracle::revolution(2.0, 1.0).unwrap(),
        ];
        let sampler = Sampler::symmetric(8, 2, 50.0);
        for o in &oracles {
            for x in sampler.points::<f64>(500) {
                let u = o.eval(&x).unwrap();
                let norm: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(norm <= o.radius_bound() + 1e-12, "norm {norm} above bound");
            }
        }
    }
}
