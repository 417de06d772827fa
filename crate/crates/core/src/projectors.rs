//! Equivariant projectors onto the six components.
//!
//! Symbolic route: filter the basis expansion by component. Numeric route:
//! `f ↦ (i/2π³) ∫_{Z ∈ R·U(1,1)} k(Z, W) f(Z) dV` on a full 4D grid, with the
//! eigenvalues of `WZ^{-1}` recomputed at every node.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{classify_component, CoeffIndex, ComponentLabel};
use crate::error::{KernelError, ProjectorError};
use crate::kernels::{
    check_regime, closed_form_generic, eigen_split, printed_form_generic, sample_semigroup, su11_element, EigenPair,
    KernelCase,
};
use crate::laurent::{Evaluator, LaurentElement};
use crate::lie_action::{expand_auto, from_expansion};
use crate::matrix::PointHC;
use crate::pairing::{pairing_constant, u11_parametrize, volume_jacobian, QuadratureSpec, U11Point};
use crate::quadrature::{gauss_legendre, pairwise_sum};

/// The part of `f`'s basis expansion that lies in `label`.
pub fn project_symbolic(f: &LaurentElement, label: ComponentLabel) -> Result<LaurentElement, ProjectorError> {
    let terms = expand_auto(f).map_err(|_| ProjectorError::NotInSpace)?;
    let kept: Vec<_> = terms.into_iter().filter(|(i, _)| classify_component(i).ok() == Some(label)).collect();
    Ok(from_expansion(&kept))
}

/// Which closed form the numeric operator integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelForm {
    /// The form the series sums to.
    Corrected,
    /// The form as printed in the source statement.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectorConfig {
    pub case: KernelCase,
    /// Cycle radius; also available as `spec.radius`.
    pub radius: f64,
    pub spec: QuadratureSpec,
    pub kernel: KernelForm,
}

impl ProjectorConfig {
    pub fn new(case: KernelCase, radius: f64) -> Self {
        Self {
            case,
            radius,
            spec: QuadratureSpec { t_max: 40.0, n_t: 32, n_ang: 40, radius },
            kernel: KernelForm::Corrected,
        }
    }

    /// Probe regime: `W/R` in the case's semigroup, and `|N(W)|` compared
    /// with `R²` for the four infinite components.
    pub fn check_probe(&self, w: &PointHC) -> Result<EigenPair, ProjectorError> {
        let bad = |m: String| ProjectorError::ProbeRegime(format!("{}: {m}", self.case));
        let split = eigen_split(&w.map(|x| x / self.radius));
        let eig = split.eig.ok_or_else(|| bad(split.note.clone().unwrap_or_default()))?;
        check_regime(self.case, &eig).map_err(|e| bad(e.to_string()))?;
        Ok(eig)
    }
}

/// The kernel at one node.
fn kernel_value(case: KernelCase, form: KernelForm, z: &PointHC, w: &PointHC) -> Result<Complex64, KernelError> {
    let zi = z.invert()?;
    let split = eigen_split(&(w * &zi));
    let eig = split.eig.ok_or_else(|| KernelError::RegimeMismatch(split.note.clone().unwrap_or_default()))?;
    check_regime(case, &eig)?;
    let nz = z.norm();
    Ok(match (case, form) {
        (KernelCase::Dmm | KernelCase::Dpp, _) => (z - w).norm().powi(-2),
        (_, KernelForm::Corrected) => closed_form_generic(case, &eig.lambda1, &eig.lambda2, &nz),
        (_, KernelForm::Printed) => printed_form_generic(case, &eig.lambda1, &eig.lambda2, &nz),
    })
}

/// Outputs of the operator for many functions at one probe.
fn apply_at_probe(
    cfg: &ProjectorConfig,
    evals: &[Evaluator],
    w: &PointHC,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>, ProjectorError> {
    let (x, wts) = gauss_legendre(spec.n_t);
    let ut = (spec.t_max / 2.0).tanh();
    let n = spec.n_ang;
    let h = 2.0 * PI / n as f64;
    let slices: Vec<Result<Vec<Complex64>, ProjectorError>> = x
        .par_iter()
        .zip(&wts)
        .map(|(&xi, &wi)| {
            let u = ut * (xi + 1.0) / 2.0;
            let t = 2.0 * u.atanh();
            let wt = wi * ut / 2.0 * 2.0 / (1.0 - u * u) * h * h * h;
            let mut acc: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n * n * n); evals.len()];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let p = U11Point::new(h * a as f64, h * b as f64, t, h * c as f64);
                        let z = u11_parametrize(&p, spec.radius);
                        let kj = kernel_value(cfg.case, cfg.kernel, &z, w)? * volume_jacobian(&p, spec.radius) * wt;
                        for (e, out) in evals.iter().zip(acc.iter_mut()) {
                            out.push(kj * e.eval(&z)?);
                        }
                    }
                }
            }
            Ok(acc.iter().map(|v| pairwise_sum(v)).collect())
        })
        .collect();
    let mut per_fn = vec![Vec::with_capacity(spec.n_t); evals.len()];
    for s in slices {
        for (dst, v) in per_fn.iter_mut().zip(s?) {
            dst.push(v);
        }
    }
    let k = pairing_constant();
    Ok(per_fn.iter().map(|v| pairwise_sum(v) * k).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericProjection {
    /// `values[i][j]`: function `i` at probe `j`.
    pub values: Vec<Vec<Complex64>>,
    /// Largest change when `T` is doubled, if requested.
    pub t_doubling_change: Option<f64>,
}

/// Numeric operator outputs for several functions at several probes. The
/// kernel is computed once per node and shared by all functions.
pub fn project_numeric_many(
    fs: &[LaurentElement],
    cfg: &ProjectorConfig,
    probes: &[PointHC],
    check_t_doubling: bool,
) -> Result<NumericProjection, ProjectorError> {
    cfg.spec.validate()?;
    let spec = QuadratureSpec { radius: cfg.radius, ..cfg.spec };
    for f in fs {
        expand_auto(f).map_err(|_| ProjectorError::NotInSpace)?;
    }
    let evals: Vec<Evaluator> = fs.iter().map(|f| f.evaluator()).collect();
    let mut values = vec![Vec::with_capacity(probes.len()); fs.len()];
    let mut change: Option<f64> = None;
    for w in probes {
        cfg.check_probe(w)?;
        let v = apply_at_probe(cfg, &evals, w, &spec)?;
        if check_t_doubling {
            let v2 = apply_at_probe(cfg, &evals, w, &spec.with_t_max(2.0 * spec.t_max))?;
            let d = v.iter().zip(&v2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            change = Some(change.map_or(d, |c| c.max(d)));
        }
        for (dst, x) in values.iter_mut().zip(v) {
            dst.push(x);
        }
    }
    Ok(NumericProjection { values, t_doubling_change: change })
}

pub fn project_numeric(
    f: &LaurentElement,
    cfg: &ProjectorConfig,
    probes: &[PointHC],
) -> Result<Vec<Complex64>, ProjectorError> {
    Ok(project_numeric_many(std::slice::from_ref(f), cfg, probes, false)?.values.remove(0))
}

/// `R g diag(λ1, λ2) g^{-1}` with moduli in the case's regime. `|λ1 λ2|`
/// stays at least 0.3 from 1.
pub fn construct_probe<R: Rng>(case: KernelCase, radius: f64, rng: &mut R) -> PointHC {
    let (lead, other) = match case.norm_above_one() {
        None => (rng.gen_range(2.0..3.0), rng.gen_range(0.2..0.4)),
        Some(true) => (rng.gen_range(2.6..3.2), rng.gen_range(0.55..0.7)),
        Some(false) => (rng.gen_range(1.8..2.2), rng.gen_range(0.2..0.3)),
    };
    let lead = Complex64::from_polar(lead, rng.gen_range(-PI..PI));
    let other = Complex64::from_polar(other, rng.gen_range(-PI..PI));
    let (l1, l2) = match case.semigroup() {
        crate::kernels::SemigroupLabel::GammaMinus => (lead, other),
        _ => (other, lead),
    };
    let g = su11_element(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
    sample_semigroup(case.semigroup(), l1, l2, &g).expect("moduli chosen in regime").map(|x| x * radius)
}

/// One basis element per component at `2l = -2`, used as the standard
/// representatives.
pub fn representative(label: ComponentLabel) -> CoeffIndex {
    let k = match label {
        ComponentLabel::DhLess | ComponentLabel::DaLess => -1,
        ComponentLabel::Dminusminus | ComponentLabel::Dplusplus => 0,
        ComponentLabel::DhGreater | ComponentLabel::DaGreater => 1,
    };
    match label.series() {
        crate::coefficients::Series::Holomorphic => CoeffIndex::hol(-2, 2, 2, k),
        _ => CoeffIndex::antihol(-2, -2, -2, k),
    }
    .expect("valid representative")
}
