//! The invariant bilinear pairing `<f1, f2> = (i / 2π³) ∫_{U(1,1)} f1 f2 dV`.
//!
//! Exact route: expand `f1` in the basis and `f2` in the dual family
//! `τ^l_{m,n}(Z^{-1}) N^{-k-2}` and apply the orthogonality table.
//!
//! Numeric route: `U(1,1) = e^{iθ} u(φ) a(t) u(ψ)` with `θ, φ, ψ ∈ [0, 2π)`
//! and `t ≥ 0`. The θ-integral is done analytically by keeping only the
//! degree −4 slice of `f1 f2`. The rest is a tensor rule: equispaced in
//! φ and ψ, and Gauss–Legendre in `u = tanh(t/2)` on `[0, tanh(T/2)]`. Each
//! weight-homogeneous part of a function has a single angular phase, so
//! the sum factorizes into per-function radial vectors and shared angular
//! moments of the Jacobian.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{basis_element, tau, CoeffIndex, Series};
use crate::error::PairingError;
use crate::laurent::LaurentElement;
use crate::lie_action::expand_auto;
use crate::matrix::PointHC;
use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::scalar::{GaussianRational, Ring};

/// Overall factor, fitted once at the reference pair `(z11^{-2}, its dual)`
/// by [`calibrate`] and frozen here. With the computed orientation the
/// literal constant already reproduces the orthogonality table.
pub const CALIBRATION: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U11Point {
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    pub psi: f64,
}

impl U11Point {
    pub fn new(theta: f64, phi: f64, t: f64, psi: f64) -> Self {
        Self { theta, phi, t, psi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Truncation of the hyperbolic parameter.
    pub t_max: f64,
    pub n_t: usize,
    /// Points per angle; even.
    pub n_ang: usize,
    /// Cycle radius `R`.
    pub radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { t_max: 40.0, n_t: 200, n_ang: 64, radius: 1.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), PairingError> {
        let bad = |m: &str| Err(PairingError::BadSpec(m.to_string()));
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("T must be positive");
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad("R must be positive");
        }
        if self.n_t == 0 {
            return bad("n_t must be positive");
        }
        if self.n_ang == 0 || !self.n_ang.is_multiple_of(2) {
            return bad("n_ang must be positive and even");
        }
        Ok(())
    }

    pub fn with_t_max(self, t_max: f64) -> Self {
        Self { t_max, ..self }
    }
}

/// `R e^{iθ} u(φ) a(t) u(ψ)`.
pub fn u11_parametrize(p: &U11Point, r: f64) -> PointHC {
    let (c, s) = ((p.t / 2.0).cosh(), (p.t / 2.0).sinh());
    let g = Complex64::from_polar(r, p.theta);
    let ea = Complex64::from_polar(1.0, (p.phi + p.psi) / 2.0);
    let eb = Complex64::from_polar(1.0, (p.phi - p.psi) / 2.0);
    PointHC::new(g * ea * c, g * eb * s, g * eb.conj() * s, g * ea.conj() * c)
}

/// Coordinate tangent vectors `(∂θ, ∂φ, ∂t, ∂ψ)` in closed form.
pub fn u11_tangents(p: &U11Point, r: f64) -> [PointHC; 4] {
    let z = u11_parametrize(p, r);
    let i = Complex64::new(0.0, 1.0);
    let h = i / 2.0;
    let mul = |f: [Complex64; 4]| PointHC::new(z.z11 * f[0], z.z12 * f[1], z.z21 * f[2], z.z22 * f[3]);
    let (c, s) = ((p.t / 2.0).cosh(), (p.t / 2.0).sinh());
    let g = Complex64::from_polar(r, p.theta);
    let ea = Complex64::from_polar(1.0, (p.phi + p.psi) / 2.0);
    let eb = Complex64::from_polar(1.0, (p.phi - p.psi) / 2.0);
    let dt = PointHC::new(g * ea * (s / 2.0), g * eb * (c / 2.0), g * eb.conj() * (c / 2.0), g * ea.conj() * (s / 2.0));
    [mul([i, i, i, i]), mul([h, h, -h, -h]), dt, mul([h, -h, h, -h])]
}

#[allow(clippy::needless_range_loop)]
fn det4(mut m: [[Complex64; 4]; 4]) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..4 {
        let piv = (col..4).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap();
        if m[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}

/// `dV(∂θ, ∂φ, ∂t, ∂ψ) = ¼ det[∂_i z_jk]`.
pub fn volume_jacobian(p: &U11Point, r: f64) -> Complex64 {
    let tv = u11_tangents(p, r);
    let rows = tv.map(|v| [v.z11, v.z12, v.z21, v.z22]);
    det4(rows) * 0.25
}

/// Coordinates of `X ∈ u(1,1)` in the basis `(ẽ0, ẽ1, ẽ2, e3)`.
fn u11_coords(x: &PointHC) -> [f64; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        (i * (x.z11 + x.z22) / 2.0).re,
        ((x.z12 + x.z21) / 2.0).re,
        ((x.z12 - x.z21) / (2.0 * i)).re,
        (i * (x.z11 - x.z22) / 2.0).re,
    ]
}

/// `+1` if the coordinate frame `(∂θ, ∂φ, ∂t, ∂ψ)` is positively oriented
/// against the left-translated basis `(ẽ0, ẽ1, ẽ2, e3)`, `-1` otherwise.
/// Evaluated at a generic point.
pub fn orientation_sign() -> f64 {
    let p = U11Point::new(0.3, 0.7, 0.9, 1.9);
    let z = u11_parametrize(&p, 1.0);
    let zi = z.invert().expect("U(1,1) is invertible");
    let rows = u11_tangents(&p, 1.0).map(|v| u11_coords(&(&zi * &v)).map(|x| Complex64::new(x, 0.0)));
    det4(rows).re.signum()
}

/// `(i / 2π³) · orientation · calibration`.
pub fn pairing_constant() -> Complex64 {
    Complex64::new(0.0, 1.0) / (2.0 * PI.powi(3)) * orientation_sign() * CALIBRATION
}

/// The degree −4 homogeneous slice, the only part that survives the θ
/// integral against `dV`.
pub fn theta_degree_filter(f: &LaurentElement) -> LaurentElement {
    f.homogeneous_parts().remove(&-4).unwrap_or_default()
}

/// Dual partner `τ^l_{m,n}(Z^{-1}) N^{-k-2}` of `τ^l_{n,m} N^k`.
pub fn dual_element(idx: &CoeffIndex) -> Result<LaurentElement, PairingError> {
    let t = tau(idx.series, idx.twol, idx.twom, idx.twon).map_err(|_| PairingError::OutsideDualFamilies)?;
    // f(Z^{-1}) = N · Inv f
    Ok(t.inv_transform().mul_n_pow(-idx.k - 1))
}

/// Coefficients of `f` on the dual family, keyed by the index whose dual
/// they multiply.
pub fn expand_dual(f: &LaurentElement) -> Result<Vec<(CoeffIndex, GaussianRational)>, PairingError> {
    // Σ d τ_{m,n}(Z^{-1}) N^{-k-2} = N · Inv(Σ d τ_{m,n} N^k)
    let g = f.inv_transform().mul_n_pow(-1);
    let terms = expand_auto(&g).map_err(|_| PairingError::OutsideDualFamilies)?;
    Ok(terms.into_iter().map(|(i, c)| (CoeffIndex { twon: i.twom, twom: i.twon, ..i }, c)).collect())
}

/// Bilinear extension of the orthogonality table.
pub fn pair_exact(f1: &LaurentElement, f2: &LaurentElement) -> Result<GaussianRational, PairingError> {
    let a: BTreeMap<CoeffIndex, GaussianRational> =
        expand_auto(f1).map_err(|_| PairingError::OutsideDualFamilies)?.into_iter().collect();
    let mut acc = GaussianRational::zero();
    for (idx, d) in expand_dual(f2)? {
        if let Some(c) = a.get(&idx) {
            acc = acc + &(c * &d) * &idx.orthogonality_value();
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// numeric engine

/// A function sampled on the radial nodes, one vector per weight part.
#[derive(Clone, Debug)]
pub struct PreparedFn {
    parts: Vec<PreparedPart>,
}

#[derive(Clone, Debug)]
struct PreparedPart {
    degree: i32,
    phase: (i32, i32),
    radial: Vec<Complex64>,
}

impl PreparedFn {
    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    fn phases_against(&self, o: &PreparedFn) -> Vec<(i32, i32)> {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &o.parts {
                if a.degree + b.degree == -4 {
                    out.push((a.phase.0 + b.phase.0, a.phase.1 + b.phase.1));
                }
            }
        }
        out
    }

    /// Whether some pair of parts survives the θ selection rule.
    pub fn meets(&self, o: &PreparedFn) -> bool {
        self.parts.iter().any(|a| o.parts.iter().any(|b| a.degree + b.degree == -4))
    }
}

/// Shared quadrature state for many pairings on one spec.
pub struct PairingEngine {
    spec: QuadratureSpec,
    /// `(cosh(t/2), sinh(t/2))` per radial node.
    radial: Vec<(f64, f64)>,
    /// Per radial node: angular nodes `(α, β)` and weighted Jacobians.
    alpha_beta: Vec<(f64, f64)>,
    jac: Vec<Vec<Complex64>>,
    moments: BTreeMap<(i32, i32), Vec<Complex64>>,
}

impl PairingEngine {
    pub fn new(spec: QuadratureSpec) -> Result<Self, PairingError> {
        spec.validate()?;
        let (x, w) = gauss_legendre(spec.n_t);
        let ut = (spec.t_max / 2.0).tanh();
        let n = spec.n_ang;
        let h = 2.0 * PI / n as f64;
        let mut alpha_beta = Vec::with_capacity(n * n);
        let mut angles = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (phi, psi) = (h * i as f64, h * j as f64);
                alpha_beta.push(((phi + psi) / 2.0, (phi - psi) / 2.0));
                angles.push((phi, psi));
            }
        }
        let nodes: Vec<(f64, f64, f64)> = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let u = ut * (xi + 1.0) / 2.0;
                let t = 2.0 * u.atanh();
                // du-weight times dt/du
                (t, u, wi * ut / 2.0 * 2.0 / (1.0 - u * u))
            })
            .collect();
        let radial = nodes.iter().map(|&(t, _, _)| ((t / 2.0).cosh(), (t / 2.0).sinh())).collect();
        let r = spec.radius;
        let jac = nodes
            .par_iter()
            .map(|&(t, _, wt)| {
                angles
                    .iter()
                    .map(|&(phi, psi)| volume_jacobian(&U11Point::new(0.0, phi, t, psi), r) * (wt * h * h))
                    .collect()
            })
            .collect();
        Ok(Self { spec, radial, alpha_beta, jac, moments: BTreeMap::new() })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// Samples `f` on the radial nodes at `θ = 0`, `φ = ψ = 0`; the angular
    /// dependence of a weight part is the pure phase `e^{i(Pα + Qβ)}`.
    pub fn prepare(&self, f: &LaurentElement) -> PreparedFn {
        let r = self.spec.radius;
        let parts = f
            .weight_parts()
            .into_iter()
            .map(|((rw, cw, deg), part)| {
                let layers: Vec<Vec<([i32; 4], Complex64)>> = part
                    .n_adic_layers()
                    .iter()
                    .map(|l| l.iter().map(|(e, c)| (*e, c.to_complex())).collect())
                    .collect();
                let radial = self
                    .radial
                    .iter()
                    .map(|&(c, s)| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for layer in &layers {
                            for (e, coef) in layer {
                                acc += coef * c.powi(e[0] + e[3]) * s.powi(e[1] + e[2]);
                            }
                        }
                        // every z carries R and N = R² on the cycle
                        acc * r.powi(deg)
                    })
                    .collect();
                PreparedPart { degree: deg, phase: ((rw + cw) / 2, (rw - cw) / 2), radial }
            })
            .collect();
        PreparedFn { parts }
    }

    /// Computes the angular moments needed by the given pairs.
    pub fn ensure_moments<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a PreparedFn, &'a PreparedFn)>) {
        let mut need = BTreeSet::new();
        for (a, b) in pairs {
            need.extend(a.phases_against(b).into_iter().filter(|k| !self.moments.contains_key(k)));
        }
        let need: Vec<(i32, i32)> = need.into_iter().collect();
        let computed: Vec<Vec<Complex64>> = need
            .par_iter()
            .map(|&(p, q)| {
                let phases: Vec<Complex64> = self
                    .alpha_beta
                    .iter()
                    .map(|&(a, b)| Complex64::from_polar(1.0, p as f64 * a + q as f64 * b))
                    .collect();
                self.jac
                    .iter()
                    .map(|row| {
                        let terms: Vec<Complex64> = row.iter().zip(&phases).map(|(j, e)| j * e).collect();
                        pairwise_sum(&terms)
                    })
                    .collect()
            })
            .collect();
        self.moments.extend(need.into_iter().zip(computed));
    }

    /// The pairing from prepared functions; moments must be ensured first.
    pub fn pair(&self, a: &PreparedFn, b: &PreparedFn) -> Complex64 {
        let mut acc = Vec::new();
        for pa in &a.parts {
            for pb in &b.parts {
                if pa.degree + pb.degree != -4 {
                    continue;
                }
                let key = (pa.phase.0 + pb.phase.0, pa.phase.1 + pb.phase.1);
                let m = self.moments.get(&key).expect("moments ensured before pairing");
                let terms: Vec<Complex64> = (0..m.len()).map(|k| pa.radial[k] * pb.radial[k] * m[k]).collect();
                acc.push(pairwise_sum(&terms));
            }
        }
        // the θ integral contributes 2π
        pairwise_sum(&acc) * 2.0 * PI * pairing_constant()
    }

    pub fn pair_functions(&mut self, f1: &LaurentElement, f2: &LaurentElement) -> Complex64 {
        let (a, b) = (self.prepare(f1), self.prepare(f2));
        self.ensure_moments([(&a, &b)]);
        self.pair(&a, &b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingOutcome {
    pub re: f64,
    pub im: f64,
    /// False when the θ selection rule already gives zero.
    pub quadrature_run: bool,
    /// `|value(2T) - value(T)|`.
    pub t_doubling_change: f64,
    pub warnings: Vec<String>,
}

impl PairingOutcome {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn converged(&self, tol: f64) -> bool {
        self.t_doubling_change <= tol
    }
}

/// Numeric pairing on `spec`, with the `2T` rerun for the convergence flag.
pub fn pair_numeric(
    f1: &LaurentElement,
    f2: &LaurentElement,
    spec: &QuadratureSpec,
) -> Result<PairingOutcome, PairingError> {
    spec.validate()?;
    let mut warnings = Vec::new();
    if expand_auto(f1).is_err() || expand_dual(f2).is_err() {
        warnings.push("outside dual families: convergence is not claimed".to_string());
    }
    let d1 = f1.homogeneous_parts();
    let d2 = f2.homogeneous_parts();
    if !d1.keys().any(|a| d2.contains_key(&(-4 - a))) {
        return Ok(PairingOutcome { re: 0.0, im: 0.0, quadrature_run: false, t_doubling_change: 0.0, warnings });
    }
    let v = PairingEngine::new(*spec)?.pair_functions(f1, f2);
    let v2 = PairingEngine::new(spec.with_t_max(2.0 * spec.t_max))?.pair_functions(f1, f2);
    Ok(PairingOutcome { re: v.re, im: v.im, quadrature_run: true, t_doubling_change: (v2 - v).norm(), warnings })
}

/// Reference implementation: direct node loop over all four coordinates,
/// evaluating the functions and the Jacobian at every node.
pub fn pair_numeric_bruteforce(
    f1: &LaurentElement,
    f2: &LaurentElement,
    spec: &QuadratureSpec,
) -> Result<Complex64, PairingError> {
    spec.validate()?;
    let (e1, e2) = (f1.evaluator(), f2.evaluator());
    let (x, w) = gauss_legendre(spec.n_t);
    let ut = (spec.t_max / 2.0).tanh();
    let n = spec.n_ang;
    let h = 2.0 * PI / n as f64;
    let mut slices = Vec::with_capacity(spec.n_t);
    for (&xi, &wi) in x.iter().zip(&w) {
        let u = ut * (xi + 1.0) / 2.0;
        let t = 2.0 * u.atanh();
        let wt = wi * ut / 2.0 * 2.0 / (1.0 - u * u) * h * h * h;
        let mut vals = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let p = U11Point::new(h * a as f64, h * b as f64, t, h * c as f64);
                    let z = u11_parametrize(&p, spec.radius);
                    vals.push(e1.eval(&z)? * e2.eval(&z)? * volume_jacobian(&p, spec.radius) * wt);
                }
            }
        }
        slices.push(pairwise_sum(&vals));
    }
    Ok(pairwise_sum(&slices) * pairing_constant())
}

/// Result of fitting the overall constant at the reference pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    /// Factor that maps the raw quadrature (orientation included) to the
    /// orthogonality value 1 at `(z11^{-2}, dual)`.
    pub factor_re: f64,
    pub factor_im: f64,
    pub orientation_sign: f64,
    pub frozen: f64,
}

pub fn reference_pair() -> (LaurentElement, LaurentElement) {
    let idx = CoeffIndex { series: Series::Holomorphic, twol: -2, twon: 2, twom: 2, k: 0 };
    (basis_element(&idx).expect("valid"), dual_element(&idx).expect("valid"))
}

pub fn calibrate(spec: &QuadratureSpec) -> Result<Calibration, PairingError> {
    let (f1, f2) = reference_pair();
    let raw = PairingEngine::new(*spec)?.pair_functions(&f1, &f2) / CALIBRATION;
    let factor = Complex64::new(1.0, 0.0) / raw;
    Ok(Calibration {
        factor_re: factor.re,
        factor_im: factor.im,
        orientation_sign: orientation_sign(),
        frozen: CALIBRATION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_action::{elementary_generators, rho1_algebra};

    fn small() -> QuadratureSpec {
        QuadratureSpec { t_max: 40.0, n_t: 40, n_ang: 16, radius: 1.0 }
    }

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn parametrization_examples() {
        let id = u11_parametrize(&U11Point::new(0.0, 0.0, 0.0, 0.0), 1.0);
        assert!(id.dist(&PointHC::identity()) < 1e-15);
        let th = 0.7;
        let z = u11_parametrize(&U11Point::new(th, 0.0, 0.0, 0.0), 1.0);
        assert!((z.norm() - Complex64::from_polar(1.0, 2.0 * th)).norm() < 1e-15);
        let z = u11_parametrize(&U11Point::new(0.0, 0.0, 1.3, 0.0), 1.0);
        assert!((z.norm() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((z.z12 - z.z21).norm() < 1e-15 && z.z12.im == 0.0);
        let p = U11Point::new(0.4, 1.1, 2.0, -0.3);
        let z = u11_parametrize(&p, 1.7);
        assert!((z.norm() - Complex64::from_polar(1.7 * 1.7, 0.8)).norm() < 1e-12);
    }

    #[test]
    fn tangents_match_finite_differences() {
        let p = U11Point::new(0.4, 1.1, 0.8, -0.3);
        let tv = u11_tangents(&p, 1.3);
        let h = 1e-6;
        let shifts = [
            U11Point::new(h, 0.0, 0.0, 0.0),
            U11Point::new(0.0, h, 0.0, 0.0),
            U11Point::new(0.0, 0.0, h, 0.0),
            U11Point::new(0.0, 0.0, 0.0, h),
        ];
        for (v, d) in tv.iter().zip(shifts) {
            let plus = U11Point::new(p.theta + d.theta, p.phi + d.phi, p.t + d.t, p.psi + d.psi);
            let minus = U11Point::new(p.theta - d.theta, p.phi - d.phi, p.t - d.t, p.psi - d.psi);
            let fd = (&u11_parametrize(&plus, 1.3) - &u11_parametrize(&minus, 1.3)).map(|e| e / (2.0 * h));
            assert!(fd.dist(v) < 1e-8);
        }
    }

    #[test]
    fn jacobian_properties() {
        let p = U11Point::new(0.4, 1.1, 0.8, -0.3);
        let j1 = volume_jacobian(&p, 1.0);
        assert!(j1.norm() > 1e-3);
        let j2 = volume_jacobian(&p, 2.0);
        assert!((j2 - j1 * 16.0).norm() < 1e-12 * j2.norm());
        let z = u11_parametrize(&p, 1.0);
        let want = c(0.0, 1.0) * z.norm() * z.norm() * p.t.sinh() / 8.0;
        assert!((j1 - want).norm() < 1e-12, "{j1} vs {want}");
        // coordinate singularity at t = 0
        assert!(volume_jacobian(&U11Point::new(0.4, 1.1, 0.0, -0.3), 1.0).norm() < 1e-15);
        // θ enters as e^{4iθ}
        let q = U11Point::new(0.0, 1.1, 0.8, -0.3);
        let jq = volume_jacobian(&q, 1.0);
        assert!((j1 - jq * Complex64::from_polar(1.0, 1.6)).norm() < 1e-12);
        // at the identity the θ, t, ψ vectors are independent
        let tv = u11_tangents(&U11Point::new(0.0, 0.0, 0.0, 0.0), 1.0);
        assert!(tv[0].max_abs() > 0.0 && tv[2].max_abs() > 0.0);
    }

    #[test]
    fn orientation_is_computed() {
        let s = orientation_sign();
        assert!(s == 1.0 || s == -1.0);
        // other generic points agree
        for p in [U11Point::new(1.0, 2.0, 0.3, 0.1), U11Point::new(5.0, 0.2, 3.0, 4.0)] {
            let z = u11_parametrize(&p, 1.0);
            let zi = z.invert().unwrap();
            let rows = u11_tangents(&p, 1.0).map(|v| u11_coords(&(&zi * &v)).map(|x| c(x, 0.0)));
            assert_eq!(det4(rows).re.signum(), s);
        }
    }

    #[test]
    fn theta_filter_examples() {
        let f = dual_element(&CoeffIndex::hol(-2, 2, 2, 0).unwrap()).unwrap();
        let g = &f * &basis_element(&CoeffIndex::hol(-2, 2, 2, 0).unwrap()).unwrap();
        assert_eq!(theta_degree_filter(&g), g);
        assert!(theta_degree_filter(&LaurentElement::one()).is_zero());
        let mixed = &g + &LaurentElement::one();
        assert_eq!(theta_degree_filter(&mixed), g);
    }

    #[test]
    fn exact_pairing_examples() {
        let i3 = CoeffIndex::hol(-3, 3, 5, 1).unwrap();
        let b3 = basis_element(&i3).unwrap();
        let d3 = dual_element(&i3).unwrap();
        assert_eq!(pair_exact(&b3, &d3).unwrap(), GaussianRational::from_frac(1, 2));
        let i2 = CoeffIndex::antihol(-2, -2, -4, -1).unwrap();
        let sum = &b3.scale(&GaussianRational::from_int(3)) + &basis_element(&i2).unwrap();
        assert_eq!(pair_exact(&sum, &d3).unwrap(), GaussianRational::from_frac(3, 2));
        assert_eq!(pair_exact(&sum, &dual_element(&i2).unwrap()).unwrap(), GaussianRational::from_int(1));
        let ha = CoeffIndex::antihol(-3, -3, -5, 1).unwrap();
        assert!(pair_exact(&b3, &dual_element(&ha).unwrap()).unwrap().is_zero());
        assert_eq!(
            pair_exact(&LaurentElement::var(crate::laurent::Var::Z11), &d3),
            Err(PairingError::OutsideDualFamilies)
        );
    }

    #[test]
    fn calibration_reproduces_frozen_constant() {
        let cal = calibrate(&small()).unwrap();
        assert!((cal.factor_re - 1.0).abs() < 1e-9 && cal.factor_im.abs() < 1e-9, "{cal:?}");
        let (f1, f2) = reference_pair();
        let v = PairingEngine::new(small()).unwrap().pair_functions(&f1, &f2) / CALIBRATION;
        assert!((v - c(1.0, 0.0)).norm() < 1e-9, "raw {v}");
    }

    #[test]
    fn numeric_examples() {
        let (f1, f2) = reference_pair();
        let out = pair_numeric(&f1, &f2, &small()).unwrap();
        assert!((out.value() - c(1.0, 0.0)).norm() < 1e-6);
        assert!(out.quadrature_run && out.converged(1e-9) && out.warnings.is_empty());
        let off = dual_element(&CoeffIndex::hol(-2, 4, 2, 0).unwrap()).unwrap();
        let out = pair_numeric(&f1, &off, &small()).unwrap();
        assert!(out.quadrature_run && out.value().norm() < 1e-8);
        let deg = dual_element(&CoeffIndex::hol(-2, 2, 2, 1).unwrap()).unwrap();
        let out = pair_numeric(&f1, &deg, &small()).unwrap();
        assert!(!out.quadrature_run && out.value() == c(0.0, 0.0));
        let bad = pair_numeric(&f1, &f2, &QuadratureSpec { n_ang: 7, ..small() });
        assert!(matches!(bad, Err(PairingError::BadSpec(_))));
    }

    #[test]
    fn radius_does_not_matter_for_dual_pairs() {
        let i = CoeffIndex::antihol(-3, -3, -5, -1).unwrap();
        let (f1, f2) = (basis_element(&i).unwrap(), dual_element(&i).unwrap());
        for r in [0.5, 1.0, 2.0] {
            let v = PairingEngine::new(QuadratureSpec { radius: r, ..small() }).unwrap().pair_functions(&f1, &f2);
            assert!((v - c(0.5, 0.0)).norm() < 1e-8, "R={r}: {v}");
        }
    }

    #[test]
    fn factorized_agrees_with_bruteforce() {
        let spec = QuadratureSpec { t_max: 30.0, n_t: 24, n_ang: 8, radius: 1.0 };
        let i = CoeffIndex::hol(-3, 3, 5, 1).unwrap();
        let j = CoeffIndex::hol(-3, 5, 3, 1).unwrap();
        for (f1, f2) in [
            (basis_element(&i).unwrap(), dual_element(&i).unwrap()),
            (basis_element(&i).unwrap(), dual_element(&j).unwrap()),
        ] {
            let fast = PairingEngine::new(spec).unwrap().pair_functions(&f1, &f2);
            let slow = pair_numeric_bruteforce(&f1, &f2, &spec).unwrap();
            assert!((fast - slow).norm() < 1e-10, "{fast} vs {slow}");
        }
    }

    #[test]
    fn pairing_is_invariant() {
        let gens = elementary_generators();
        let sources = [
            (CoeffIndex::hol(-3, 3, 3, 1).unwrap(), 0usize),
            (CoeffIndex::hol(-3, 3, 5, 0).unwrap(), 5),
            (CoeffIndex::antihol(-4, -4, -4, 1).unwrap(), 9),
            (CoeffIndex::hol(-3, 3, 3, -1).unwrap(), 13),
            (CoeffIndex::antihol(-4, -4, -6, 2).unwrap(), 7),
        ];
        let mut engine = PairingEngine::new(QuadratureSpec { n_t: 60, n_ang: 16, ..small() }).unwrap();
        for (i1, g) in sources {
            let x = &gens[g].element;
            let f1 = basis_element(&i1).unwrap();
            let xf1 = rho1_algebra(x, &f1);
            // pair against an index the image actually touches
            let i2 = expand_auto(&xf1).unwrap()[0].0;
            let f2 = dual_element(&i2).unwrap();
            let xf2 = rho1_algebra(x, &f2);
            let lhs = pair_exact(&xf1, &f2).unwrap();
            assert!(!lhs.is_zero(), "{i1} {}", gens[g].label);
            assert!((lhs + pair_exact(&f1, &xf2).unwrap()).is_zero(), "{i1} {} {i2}", gens[g].label);
            let num = engine.pair_functions(&xf1, &f2) + engine.pair_functions(&f1, &xf2);
            assert!(num.norm() < 1e-5, "{num}");
        }
    }
}
