//! Reproducing kernels of the six components.
//!
//! For `WZ^{-1} = g diag(λ1, λ2) g^{-1}` with `g ∈ SU(1,1)`, each kernel is
//! `Σ -(2l+1) τ^l_{n,m}(W) N(W)^k τ^l_{m,n}(Z^{-1}) N(Z)^{-k-2}` over the
//! component's indices. The `m`-sum collapses to `τ^l_{n,n}(WZ^{-1})`, the
//! `n`-sum to a character, and the `k`- and `l`-sums are geometric.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{ComponentLabel, Series};
use crate::error::KernelError;
use crate::matrix::PointHC;
use crate::quadrature::pairwise_sum;
use crate::scalar::{generalized_binomial_f64, Field};

/// Margin by which eigenvalue moduli must clear the semigroup inequalities.
pub const MEMBERSHIP_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    /// Eigenvalue with the `J`-positive eigenvector, `J = diag(1, -1)`.
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl EigenPair {
    pub fn new(lambda1: Complex64, lambda2: Complex64) -> Self {
        Self { lambda1, lambda2 }
    }

    pub fn real(l1: f64, l2: f64) -> Self {
        Self::new(Complex64::new(l1, 0.0), Complex64::new(l2, 0.0))
    }

    /// `λ1 λ2 = N(WZ^{-1})`.
    pub fn product(&self) -> Complex64 {
        self.lambda1 * self.lambda2
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.lambda2, self.lambda1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SemigroupLabel {
    GammaMinus,
    GammaPlus,
    Neither,
}

impl fmt::Display for SemigroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemigroupLabel::GammaMinus => "gamma-",
            SemigroupLabel::GammaPlus => "gamma+",
            SemigroupLabel::Neither => "neither",
        })
    }
}

/// Membership from the ordered moduli alone.
pub fn classify_moduli(eig: &EigenPair) -> SemigroupLabel {
    let (a, b) = (eig.lambda1.norm(), eig.lambda2.norm());
    let e = MEMBERSHIP_EPS;
    if a > 1.0 + e && b < 1.0 - e && b > e {
        SemigroupLabel::GammaMinus
    } else if b > 1.0 + e && a < 1.0 - e && a > e {
        SemigroupLabel::GammaPlus
    } else {
        SemigroupLabel::Neither
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSplit {
    /// `None` when no `J`-ordering exists.
    pub eig: Option<EigenPair>,
    pub label: SemigroupLabel,
    pub note: Option<String>,
}

impl EigenSplit {
    fn neither(eig: Option<EigenPair>, note: &str) -> Self {
        Self { eig, label: SemigroupLabel::Neither, note: Some(note.to_string()) }
    }
}

fn j_norm(v: [Complex64; 2]) -> f64 {
    v[0].norm_sqr() - v[1].norm_sqr()
}

fn eigenvector(m: &PointHC, lambda: Complex64) -> [Complex64; 2] {
    let u = [m.z12, lambda - m.z11];
    let v = [lambda - m.z22, m.z21];
    let n = |w: &[Complex64; 2]| w[0].norm_sqr() + w[1].norm_sqr();
    if n(&u) >= n(&v) {
        u
    } else {
        v
    }
}

/// Eigenvalues of `M` ordered by the `J`-sign of their eigenvectors, and the
/// semigroup label.
pub fn eigen_split(m: &PointHC) -> EigenSplit {
    let tr = m.z11 + m.z22;
    let disc = (tr * tr - m.norm() * 4.0).sqrt();
    let (a, b) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let scale = 1.0f64.max(a.norm()).max(b.norm());
    if (a - b).norm() <= MEMBERSHIP_EPS * scale {
        return EigenSplit::neither(None, "coincident eigenvalues");
    }
    let (va, vb) = (eigenvector(m, a), eigenvector(m, b));
    let (ja, jb) = (j_norm(va), j_norm(vb));
    let size = |v: [Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    if ja.abs() <= MEMBERSHIP_EPS * size(va) || jb.abs() <= MEMBERSHIP_EPS * size(vb) {
        return EigenSplit::neither(None, "J-null eigenvector");
    }
    let eig = match (ja > 0.0, jb > 0.0) {
        (true, false) => EigenPair::new(a, b),
        (false, true) => EigenPair::new(b, a),
        _ => return EigenSplit::neither(None, "eigenvectors have the same J-sign"),
    };
    let label = classify_moduli(&eig);
    let note = (label == SemigroupLabel::Neither).then(|| "moduli fail the strict inequalities".to_string());
    EigenSplit { eig: Some(eig), label, note }
}

/// `u(φ) a(t) u(ψ) ∈ SU(1,1)`.
pub fn su11_element(phi: f64, t: f64, psi: f64) -> PointHC {
    let (c, s) = ((t / 2.0).cosh(), (t / 2.0).sinh());
    let ea = Complex64::from_polar(1.0, (phi + psi) / 2.0);
    let eb = Complex64::from_polar(1.0, (phi - psi) / 2.0);
    PointHC::new(ea * c, eb * s, eb.conj() * s, ea.conj() * c)
}

/// `g diag(λ1, λ2) g^{-1}`, refusing moduli outside the label's regime.
pub fn sample_semigroup(
    label: SemigroupLabel,
    lambda1: Complex64,
    lambda2: Complex64,
    g: &PointHC,
) -> Result<PointHC, KernelError> {
    let eig = EigenPair::new(lambda1, lambda2);
    if label == SemigroupLabel::Neither || classify_moduli(&eig) != label {
        return Err(KernelError::Inequality);
    }
    let gi = g.invert()?;
    Ok(&(g * &PointHC::diag(lambda1, lambda2)) * &gi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelCase {
    Dmm,
    Dpp,
    DhLess,
    DhGreater,
    DaLess,
    DaGreater,
}

impl KernelCase {
    pub const ALL: [KernelCase; 6] = [
        KernelCase::Dmm,
        KernelCase::Dpp,
        KernelCase::DhLess,
        KernelCase::DhGreater,
        KernelCase::DaLess,
        KernelCase::DaGreater,
    ];

    pub fn component(self) -> ComponentLabel {
        match self {
            KernelCase::Dmm => ComponentLabel::Dminusminus,
            KernelCase::Dpp => ComponentLabel::Dplusplus,
            KernelCase::DhLess => ComponentLabel::DhLess,
            KernelCase::DhGreater => ComponentLabel::DhGreater,
            KernelCase::DaLess => ComponentLabel::DaLess,
            KernelCase::DaGreater => ComponentLabel::DaGreater,
        }
    }

    pub fn from_component(c: ComponentLabel) -> Self {
        *Self::ALL.iter().find(|k| k.component() == c).expect("one case per component")
    }

    pub fn as_str(self) -> &'static str {
        self.component().as_str()
    }

    pub fn parse(s: &str) -> Option<Self> {
        ComponentLabel::parse(s).map(Self::from_component)
    }

    pub fn series(self) -> Series {
        self.component().series()
    }

    pub fn semigroup(self) -> SemigroupLabel {
        match self.series() {
            Series::Holomorphic => SemigroupLabel::GammaMinus,
            _ => SemigroupLabel::GammaPlus,
        }
    }

    /// `Some(true)` needs `|N(WZ^{-1})| > 1`, `Some(false)` needs `< 1`.
    pub fn norm_above_one(self) -> Option<bool> {
        match self {
            KernelCase::Dmm | KernelCase::Dpp => None,
            KernelCase::DhLess | KernelCase::DaLess => Some(true),
            KernelCase::DhGreater | KernelCase::DaGreater => Some(false),
        }
    }

    /// The `k` indices for `2l = twol`, clipped to `count` terms from the
    /// component's edge.
    fn k_values(self, twol: i32, count: i32) -> Vec<i32> {
        match self.component().k_range(twol) {
            (Some(lo), Some(hi)) => (lo..=hi).collect(),
            (None, Some(hi)) => (hi - count + 1..=hi).rev().collect(),
            (Some(lo), None) => (lo..lo + count).collect(),
            (None, None) => unreachable!("every component bounds k on one side"),
        }
    }
}

impl fmt::Display for KernelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn check_regime(case: KernelCase, eig: &EigenPair) -> Result<(), KernelError> {
    if (eig.lambda1 - eig.lambda2).norm() == 0.0 {
        return Err(KernelError::CoincidentEigenvalues);
    }
    let label = classify_moduli(eig);
    let nu = eig.product().norm();
    let norm_ok = match case.norm_above_one() {
        None => true,
        Some(true) => nu > 1.0 + MEMBERSHIP_EPS,
        Some(false) => nu < 1.0 - MEMBERSHIP_EPS,
    };
    if label != case.semigroup() || !norm_ok {
        return Err(KernelError::RegimeMismatch(format!("{case}: {label}, |l1 l2| = {nu}")));
    }
    Ok(())
}

/// Closed form of the kernel as a rational function of `(λ1, λ2, N(Z))`.
/// The `>` components carry the sign the series actually sums to.
pub fn closed_form_generic<F: Field>(case: KernelCase, l1: &F, l2: &F, nz: &F) -> F {
    let one = F::one();
    let n2 = nz.powi(-2);
    let nu = l1.clone() * l2.clone();
    let sq = |x: F| x.clone() * x;
    let lead = |x: &F| {
        n2.clone() * x.clone() / ((l1.clone() - l2.clone()) * (one.clone() - nu.clone()) * sq(one.clone() - x.clone()))
    };
    match case {
        KernelCase::Dmm | KernelCase::Dpp => n2.clone() / (sq(one.clone() - l1.clone()) * sq(one.clone() - l2.clone())),
        KernelCase::DhLess | KernelCase::DaGreater => F::zero() - lead(l1),
        KernelCase::DhGreater | KernelCase::DaLess => lead(l2),
    }
}

/// The closed forms exactly as printed in the source statement; they
/// differ from [`closed_form_generic`] by a sign for the `>` components.
pub fn printed_form_generic<F: Field>(case: KernelCase, l1: &F, l2: &F, nz: &F) -> F {
    let v = closed_form_generic(case, l1, l2, nz);
    match case {
        KernelCase::DhGreater | KernelCase::DaGreater => F::zero() - v,
        _ => v,
    }
}

/// Staged resummation: character, then the `k` geometric series, then
/// `Σ_{j≥1} j x^j = x/(1-x)²` for the `l`-sum. `None` on a zero denominator.
pub fn resummation_staged<F: Field>(case: KernelCase, l1: &F, l2: &F, nz: &F) -> Option<F> {
    let one = F::one();
    let nonzero = |x: &F| if x.is_zero() { None } else { Some(x.clone()) };
    // holomorphic characters λ1^{2l+1}/(λ1-λ2); antiholomorphic λ2^{2l+1}/(λ2-λ1)
    let (lead, other) = match case.series() {
        Series::Holomorphic => (l1.clone(), l2.clone()),
        _ => (l2.clone(), l1.clone()),
    };
    let char_den = nonzero(&(lead.clone() - other.clone()))?;
    let nu = l1.clone() * l2.clone();
    let l_sum = |x: F| -> Option<F> {
        let d = nonzero(&(one.clone() - x.clone()))?;
        Some(x / (d.clone() * d))
    };
    let one_minus_nu = nonzero(&(one.clone() - nu.clone()))?;
    // Σ_l -(2l+1) lead^{2l+1} = Σ_{j≥1} j (1/lead)^j
    let inv_lead = one.clone() / nonzero(&lead)?;
    let body = match case.norm_above_one() {
        // Σ_{k≤-1} ν^k = 1/(ν-1)
        Some(true) => l_sum(inv_lead)? / (F::zero() - one_minus_nu),
        // Σ_{k≥-(2l+1)} ν^k = ν^{-(2l+1)}/(1-ν), and lead^{2l+1} ν^{-(2l+1)} = other^{-(2l+1)}
        Some(false) => l_sum(other)? / one_minus_nu,
        // Σ_{k=0}^{-2l-2} ν^k = (1 - ν^{-(2l+1)})/(1-ν)
        None => (l_sum(inv_lead)? - l_sum(other)?) / one_minus_nu,
    };
    Some(nz.powi(-2) * body / char_den)
}

pub fn kernel_closed_form(case: KernelCase, eig: &EigenPair, nz: Complex64) -> Result<Complex64, KernelError> {
    check_regime(case, eig)?;
    Ok(closed_form_generic(case, &eig.lambda1, &eig.lambda2, &nz))
}

pub fn printed_closed_form(case: KernelCase, eig: &EigenPair, nz: Complex64) -> Result<Complex64, KernelError> {
    check_regime(case, eig)?;
    Ok(printed_form_generic(case, &eig.lambda1, &eig.lambda2, &nz))
}

pub fn resummation_value(case: KernelCase, eig: &EigenPair, nz: Complex64) -> Result<Complex64, KernelError> {
    if (eig.product().norm() - 1.0).abs() <= MEMBERSHIP_EPS {
        return Err(KernelError::Boundary);
    }
    check_regime(case, eig)?;
    resummation_staged(case, &eig.lambda1, &eig.lambda2, &nz).ok_or(KernelError::CoincidentEigenvalues)
}

/// The kernel at `(Z, W)`. `1/N(Z-W)²` for the finite components,
/// otherwise the closed form at the eigenvalues of `WZ^{-1}`.
pub fn kernel_at(case: KernelCase, z: &PointHC, w: &PointHC) -> Result<Complex64, KernelError> {
    let split = eigen_split(&(w * &z.invert()?));
    let eig = split.eig.ok_or_else(|| KernelError::RegimeMismatch(split.note.clone().unwrap_or_default()))?;
    check_regime(case, &eig)?;
    match case {
        KernelCase::Dmm | KernelCase::Dpp => Ok((z - w).norm().powi(-2)),
        _ => Ok(closed_form_generic(case, &eig.lambda1, &eig.lambda2, &z.norm())),
    }
}

/// `τ^l_{n,m}(Z)` from the coefficient formula, in floating point.
pub fn tau_numeric(series: Series, twol: i32, twon: i32, twom: i32, z: &PointHC) -> Complex64 {
    tau_with(series, twol, twon, twom, &|i, e| [z.z11, z.z12, z.z21, z.z22][i].powi(e))
}

fn tau_with(series: Series, twol: i32, twon: i32, twom: i32, pow: &dyn Fn(usize, i32) -> Complex64) -> Complex64 {
    let a = (twol + twom) / 2;
    let b = (twol - twom) / 2;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut term = |c: f64, e: [i32; 4]| {
        acc += pow(0, e[0]) * pow(1, e[1]) * pow(2, e[2]) * pow(3, e[3]) * c;
    };
    match series {
        Series::Holomorphic => {
            let shift = (twon - twom) / 2;
            let p0 = (-shift).max(0);
            if p0 > a {
                return Complex64::new(0.0, 0.0);
            }
            let mut ca = generalized_binomial_f64(a as i64, p0 as u32);
            let mut cb = generalized_binomial_f64(b as i64, (p0 + shift) as u32);
            for p in p0..=a {
                let j = p + shift;
                term(ca * cb, [(twol - twon) / 2 - p, p, j, a - p]);
                ca *= (a - p) as f64 / (p + 1) as f64;
                cb *= (b - j) as f64 / (j + 1) as f64;
            }
        }
        Series::Antiholomorphic | Series::Su2 => {
            let lmn = (twol - twon) / 2;
            let top = b.min(lmn);
            if top < 0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut cb = 1.0;
            for j in 0..=top {
                term(generalized_binomial_f64(a as i64, (lmn - j) as u32) * cb, [j, lmn - j, b - j, a - lmn + j]);
                cb *= (b - j) as f64 / (j + 1) as f64;
            }
        }
    }
    acc
}

/// Integer powers `z^e`, `|e| <= max`, tabulated once per point.
struct PowerTable {
    max: i32,
    rows: [Vec<Complex64>; 4],
}

impl PowerTable {
    fn new(z: &PointHC, max: i32) -> Self {
        let row = |x: Complex64| {
            let inv = if x.norm() == 0.0 { Complex64::new(f64::NAN, 0.0) } else { x.inv() };
            let mut r = vec![Complex64::new(1.0, 0.0); (2 * max + 1) as usize];
            for e in 1..=max {
                let m = max as usize;
                r[m + e as usize] = r[m + e as usize - 1] * x;
                r[m - e as usize] = r[m - e as usize + 1] * inv;
            }
            r
        };
        Self { max, rows: [row(z.z11), row(z.z12), row(z.z21), row(z.z22)] }
    }

    fn get(&self, i: usize, e: i32) -> Complex64 {
        if e == 0 {
            return Complex64::new(1.0, 0.0);
        }
        assert!(e.abs() <= self.max, "power table too small");
        self.rows[i][(self.max + e) as usize]
    }
}

/// Band of `2n` (or `2m`) values within `offset` of the series edge.
fn band(series: Series, twol: i32, offset: i32) -> Vec<i32> {
    match series {
        Series::Holomorphic => (0..=offset).map(|o| -twol + 2 * o).collect(),
        _ => (0..=offset).map(|o| twol - 2 * o).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    /// `2l >= -2L`.
    pub l: i32,
    /// `m, n` within this offset of the band edge.
    pub m: i32,
    /// Number of `k` terms on the infinite side.
    pub k: i32,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { l: 30, m: 40, k: 60 }
    }
}

impl Truncation {
    pub fn doubled(self) -> Self {
        Self { l: 2 * self.l, m: 2 * self.m, k: 2 * self.k }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesOutcome {
    pub re: f64,
    pub im: f64,
    pub truncation: Truncation,
    /// Change produced by the last doubling.
    pub change: f64,
    pub stagnated: bool,
}

impl SeriesOutcome {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// The truncated series at a fixed truncation, no convergence control.
pub fn kernel_series_sum(
    case: KernelCase,
    z: &PointHC,
    w: &PointHC,
    trunc: Truncation,
) -> Result<Complex64, KernelError> {
    let zi = z.invert()?;
    let split = eigen_split(&(w * &zi));
    let eig = split.eig.ok_or_else(|| KernelError::RegimeMismatch(split.note.clone().unwrap_or_default()))?;
    check_regime(case, &eig)?;
    let series = case.series();
    let max_pow = 2 * (trunc.l + trunc.m) + 4;
    let (pw, pz) = (PowerTable::new(w, max_pow), PowerTable::new(&zi, max_pow));
    let (nw, nz) = (w.norm(), z.norm());
    let per_l: Vec<Complex64> = (2..=2 * trunc.l)
        .into_par_iter()
        .map(|neg| {
            let twol = -neg;
            let b = band(series, twol, trunc.m);
            let tw: Vec<Vec<Complex64>> = b
                .iter()
                .map(|&n| b.iter().map(|&m| tau_with(series, twol, n, m, &|i, e| pw.get(i, e))).collect())
                .collect();
            let tz: Vec<Vec<Complex64>> = b
                .iter()
                .map(|&m| b.iter().map(|&n| tau_with(series, twol, m, n, &|i, e| pz.get(i, e))).collect())
                .collect();
            let mut mn = Vec::with_capacity(b.len() * b.len());
            for (ni, row) in tw.iter().enumerate() {
                for (mi, v) in row.iter().enumerate() {
                    mn.push(v * tz[mi][ni]);
                }
            }
            let s = pairwise_sum(&mn);
            let ks: Vec<Complex64> =
                case.k_values(twol, trunc.k).into_iter().map(|k| nw.powi(k) * nz.powi(-k - 2)).collect();
            s * pairwise_sum(&ks) * (-(twol + 1) as f64)
        })
        .collect();
    Ok(pairwise_sum(&per_l))
}

/// The series with adaptive doubling: stops once a doubling moves the value
/// by at most `0.1 tol` relative, or after `max_doublings`.
pub fn kernel_series_direct(
    case: KernelCase,
    z: &PointHC,
    w: &PointHC,
    trunc: Truncation,
    tol: f64,
    max_doublings: u32,
) -> Result<SeriesOutcome, KernelError> {
    let mut t = trunc;
    let mut v = kernel_series_sum(case, z, w, t)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        let t2 = t.doubled();
        let v2 = kernel_series_sum(case, z, w, t2)?;
        change = (v2 - v).norm() / v2.norm().max(f64::MIN_POSITIVE);
        t = t2;
        v = v2;
        if change <= 0.1 * tol {
            break;
        }
    }
    Ok(SeriesOutcome { re: v.re, im: v.im, truncation: t, change, stagnated: change > tol })
}

/// `(Σ_{|m| band <= M} τ_{n,m}(W) τ_{m,n}(Z^{-1}), τ_{n,n}(WZ^{-1}))`.
pub fn addition_formula_check(
    series: Series,
    twol: i32,
    twon: i32,
    w: &PointHC,
    z: &PointHC,
    m_offset: i32,
) -> Result<(Complex64, Complex64), KernelError> {
    let zi = z.invert()?;
    let terms: Vec<Complex64> = band(series, twol, m_offset)
        .into_iter()
        .map(|m| tau_numeric(series, twol, twon, m, w) * tau_numeric(series, twol, m, twon, &zi))
        .collect();
    Ok((pairwise_sum(&terms), tau_numeric(series, twol, twon, twon, &(w * &zi))))
}

/// `λ1^{2l+1}/(λ1-λ2)` on `Γ^-`, `λ2^{2l+1}/(λ2-λ1)` on `Γ^+`.
pub fn character_value(twol: i32, eig: &EigenPair, label: SemigroupLabel) -> Result<Complex64, KernelError> {
    if eig.lambda1 == eig.lambda2 {
        return Err(KernelError::CoincidentEigenvalues);
    }
    if classify_moduli(eig) != label || label == SemigroupLabel::Neither {
        return Err(KernelError::RegimeMismatch(format!("{label}")));
    }
    let (a, b) = match label {
        SemigroupLabel::GammaMinus => (eig.lambda1, eig.lambda2),
        _ => (eig.lambda2, eig.lambda1),
    };
    Ok(a.powi(twol + 1) / (a - b))
}

/// `Σ_n τ^l_{n,n}(diag(λ1, λ2))` over the first `terms` values of `n`.
pub fn character_series(twol: i32, eig: &EigenPair, label: SemigroupLabel, terms: usize) -> Complex64 {
    let series = match label {
        SemigroupLabel::GammaPlus => Series::Antiholomorphic,
        _ => Series::Holomorphic,
    };
    let d = PointHC::diag(eig.lambda1, eig.lambda2);
    let vals: Vec<Complex64> =
        band(series, twol, terms as i32 - 1).into_iter().map(|n| tau_numeric(series, twol, n, n, &d)).collect();
    pairwise_sum(&vals)
}

/// A constructed `(Z, W)` pair in the regime of a case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSample {
    pub case: KernelCase,
    #[serde(serialize_with = "crate::kernels::ser_point")]
    pub z: PointHC,
    #[serde(serialize_with = "crate::kernels::ser_point")]
    pub w: PointHC,
    pub eig: EigenPair,
}

/// Eight floats: re/im of `z11, z12, z21, z22`.
pub fn point_to_floats(p: &PointHC) -> [f64; 8] {
    [p.z11.re, p.z11.im, p.z12.re, p.z12.im, p.z21.re, p.z21.im, p.z22.re, p.z22.im]
}

pub(crate) fn ser_point<S: serde::Serializer>(p: &PointHC, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&point_to_floats(p), s)
}

/// Moduli `(|λ_lead|, |λ_other|)` ranges used for constructed samples. They
/// keep `|λ|` and `|λ1 λ2|` at least 0.2 away from 1 and the series tails
/// small at the default truncation.
fn moduli_ranges(case: KernelCase) -> ((f64, f64), (f64, f64)) {
    match case {
        KernelCase::Dmm | KernelCase::Dpp => ((1.5, 3.0), (0.2, 0.6)),
        KernelCase::DhLess | KernelCase::DaLess => ((2.5, 4.0), (0.6, 0.8)),
        KernelCase::DhGreater | KernelCase::DaGreater => ((1.25, 1.8), (0.15, 0.35)),
    }
}

pub fn construct_sample<R: Rng>(case: KernelCase, rng: &mut R) -> KernelSample {
    let ((a0, a1), (b0, b1)) = moduli_ranges(case);
    let lead = Complex64::from_polar(rng.gen_range(a0..a1), rng.gen_range(-PI..PI));
    let other = Complex64::from_polar(rng.gen_range(b0..b1), rng.gen_range(-PI..PI));
    let eig = match case.semigroup() {
        SemigroupLabel::GammaMinus => EigenPair::new(lead, other),
        _ => EigenPair::new(other, lead),
    };
    let g = su11_element(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..0.6), rng.gen_range(0.0..2.0 * PI));
    let x = sample_semigroup(case.semigroup(), eig.lambda1, eig.lambda2, &g).expect("moduli chosen in regime");
    let h = su11_element(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
    let z = h.scale(&Complex64::from_polar(rng.gen_range(0.8..1.25), rng.gen_range(-PI..PI)));
    KernelSample { case, w: &x * &z, z, eig }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::tau;
    use crate::scalar::GaussianRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn eigen_split_examples() {
        let s = eigen_split(&PointHC::diag(c(2.0), c(0.5)));
        assert_eq!(s.label, SemigroupLabel::GammaMinus);
        assert_eq!(s.eig.unwrap(), EigenPair::real(2.0, 0.5));
        let s = eigen_split(&PointHC::diag(c(1.0 / 3.0), c(3.0)));
        assert_eq!(s.label, SemigroupLabel::GammaPlus);
        assert!(close(s.eig.unwrap().lambda1, c(1.0 / 3.0), 1e-15));
        let s = eigen_split(&PointHC::new(c(1.0), c(1.0), c(0.0), c(1.0)));
        assert_eq!(s.label, SemigroupLabel::Neither);
        assert!(s.note.is_some());
        // same J-sign: a rotation mixing e1 and e2
        let s = eigen_split(&PointHC::new(c(0.0), c(1.0), c(1.0), c(0.0)));
        assert_eq!(s.label, SemigroupLabel::Neither);
        // boundary modulus
        assert_eq!(eigen_split(&PointHC::diag(c(1.0), c(0.5))).label, SemigroupLabel::Neither);
    }

    #[test]
    fn sample_semigroup_round_trips() {
        let x = sample_semigroup(SemigroupLabel::GammaMinus, c(2.0), c(1.0 / 3.0), &PointHC::identity()).unwrap();
        assert!(x.dist(&PointHC::diag(c(2.0), c(1.0 / 3.0))) < 1e-15);
        let g = su11_element(0.0, 1.0, 0.0);
        let x = sample_semigroup(SemigroupLabel::GammaMinus, c(2.0), c(1.0 / 3.0), &g).unwrap();
        assert!(x.z12.norm() > 0.1);
        let s = eigen_split(&x);
        let e = s.eig.unwrap();
        assert_eq!(s.label, SemigroupLabel::GammaMinus);
        assert!(close(e.lambda1, c(2.0), 1e-10) && close(e.lambda2, c(1.0 / 3.0), 1e-10));
        assert_eq!(sample_semigroup(SemigroupLabel::GammaPlus, c(2.0), c(0.5), &g), Err(KernelError::Inequality));
        let e = EigenPair::real(3.0, 0.5);
        assert!(e.product().norm() > 1.0);
        assert!(check_regime(KernelCase::DhLess, &e).is_ok());
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in KernelCase::ALL {
            for _ in 0..20 {
                let s = construct_sample(case, &mut rng);
                let split = eigen_split(&(&s.w * &s.z.invert().unwrap()));
                let e = split.eig.unwrap();
                assert_eq!(split.label, case.semigroup());
                assert!(close(e.lambda1, s.eig.lambda1, 1e-10) && close(e.lambda2, s.eig.lambda2, 1e-10));
                assert!(check_regime(case, &e).is_ok());
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let v = kernel_closed_form(KernelCase::DhLess, &EigenPair::real(3.0, 0.5), c(1.0)).unwrap();
        assert!(close(v, c(0.6), 1e-14));
        let e = EigenPair::real(2.0, 1.0 / 3.0);
        let printed = printed_closed_form(KernelCase::DhGreater, &e, c(1.0)).unwrap();
        assert!(close(printed, c(-1.35), 1e-14));
        assert!(close(kernel_closed_form(KernelCase::DhGreater, &e, c(1.0)).unwrap(), c(1.35), 1e-14));
        let v = kernel_closed_form(KernelCase::Dmm, &e, c(1.0)).unwrap();
        assert!(close(v, c(1.0 / (1.0 * (2.0f64 / 3.0).powi(2))), 1e-14));
        let dmm = kernel_at(KernelCase::Dmm, &PointHC::identity(), &PointHC::diag(c(2.0), c(1.0 / 3.0))).unwrap();
        assert!(close(dmm, v, 1e-14));
        assert!(matches!(kernel_closed_form(KernelCase::DhLess, &e, c(1.0)), Err(KernelError::RegimeMismatch(_))));
    }

    #[test]
    fn resummation_matches_closed_forms_exactly() {
        let q = |n: i64, d: i64| GaussianRational::from_frac(n, d);
        let samples = [
            (KernelCase::DhLess, q(3, 1), q(1, 2)),
            (KernelCase::DhGreater, q(2, 1), q(1, 3)),
            (KernelCase::DaLess, q(1, 2), q(3, 1)),
            (KernelCase::DaGreater, q(1, 3), q(2, 1)),
            (KernelCase::Dmm, q(5, 2), GaussianRational::from_parts((1, 3), (1, 7))),
            (KernelCase::Dpp, GaussianRational::from_parts((1, 5), (-1, 4)), q(-7, 3)),
        ];
        let nz = GaussianRational::from_parts((3, 2), (1, 5));
        for (case, l1, l2) in samples {
            let staged = resummation_staged(case, &l1, &l2, &nz).unwrap();
            assert_eq!(staged, closed_form_generic(case, &l1, &l2, &nz), "{case}");
        }
        // swap symmetry between the two series
        let (a, b) = (q(3, 1), q(1, 2));
        assert_eq!(
            closed_form_generic(KernelCase::DaLess, &b, &a, &nz),
            closed_form_generic(KernelCase::DhLess, &a, &b, &nz)
        );
        let v = resummation_value(KernelCase::DaLess, &EigenPair::real(0.5, 3.0), c(1.0)).unwrap();
        assert!(v.re > 0.0);
        assert_eq!(
            resummation_value(KernelCase::DhLess, &EigenPair::real(2.0, 0.5), c(1.0)),
            Err(KernelError::Boundary)
        );
    }

    #[test]
    fn tau_numeric_matches_exact_evaluation() {
        let z = PointHC::new(
            Complex64::new(1.3, 0.2),
            Complex64::new(0.4, -0.3),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.9, -0.1),
        );
        for (series, twol, twon, twom) in [
            (Series::Holomorphic, -2, 2, 2),
            (Series::Holomorphic, -3, 5, 3),
            (Series::Holomorphic, -4, 4, 8),
            (Series::Antiholomorphic, -3, -5, -3),
            (Series::Antiholomorphic, -4, -4, -8),
            (Series::Su2, 2, 0, 2),
        ] {
            let exact = tau(series, twol, twon, twom).unwrap().evaluate(&z).unwrap();
            let num = tau_numeric(series, twol, twon, twom, &z);
            assert!(close(num, exact, 1e-12), "{series:?} {twol} {twon} {twom}: {num} vs {exact}");
        }
    }

    #[test]
    fn character_examples() {
        let e = EigenPair::real(2.0, 1.0 / 3.0);
        let v = character_value(-2, &e, SemigroupLabel::GammaMinus).unwrap();
        assert!(close(v, c(0.3), 1e-15));
        for twol in [-2, -3, -4] {
            let want = character_value(twol, &e, SemigroupLabel::GammaMinus).unwrap();
            assert!(close(character_series(twol, &e, SemigroupLabel::GammaMinus, 60), want, 1e-10));
            let m = e.swapped();
            let plus = character_value(twol, &m, SemigroupLabel::GammaPlus).unwrap();
            assert!(close(plus, want, 1e-15));
            assert!(close(character_series(twol, &m, SemigroupLabel::GammaPlus, 60), want, 1e-10));
        }
    }

    #[test]
    fn addition_formula_examples() {
        let g = su11_element(0.0, 1.0, 0.0);
        let w = &PointHC::diag(c(2.0), c(1.0 / 3.0)) * &g;
        for twol in [-2, -3, -4] {
            let twon = -twol;
            let (lhs, rhs) =
                addition_formula_check(Series::Holomorphic, twol, twon, &w, &PointHC::identity(), 40).unwrap();
            assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
        }
        let d = PointHC::diag(c(2.0), c(0.25));
        let (lhs, rhs) = addition_formula_check(Series::Holomorphic, -3, 3, &d, &PointHC::identity(), 0).unwrap();
        assert_eq!(lhs, rhs);
        let h = su11_element(0.4, 0.5, 1.0);
        let x = sample_semigroup(SemigroupLabel::GammaMinus, c(2.0), c(0.4), &su11_element(1.0, 0.7, 0.2)).unwrap();
        let (lhs, rhs) = addition_formula_check(Series::Holomorphic, -3, 5, &(&x * &h), &h, 40).unwrap();
        assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
        let (lhs, rhs) = addition_formula_check(Series::Antiholomorphic, -3, -5, &(&x * &h), &h, 40).unwrap();
        assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
    }

    #[test]
    fn direct_series_examples() {
        let v = kernel_series_sum(
            KernelCase::DhLess,
            &PointHC::identity(),
            &PointHC::diag(c(3.0), c(0.5)),
            Truncation::default(),
        )
        .unwrap();
        assert!(close(v, c(0.6), 1e-6), "{v}");
        let z = PointHC::scalar(c(2.0));
        let w = PointHC::diag(c(0.5), c(1.0 / 3.0));
        let out = kernel_series_direct(
            KernelCase::Dmm,
            &z,
            &PointHC::diag(c(4.0), c(1.0 / 3.0)),
            Truncation::default(),
            1e-8,
            1,
        );
        assert!(out.is_ok());
        assert!(matches!(
            kernel_series_sum(KernelCase::Dmm, &z, &w, Truncation::default()),
            Err(KernelError::RegimeMismatch(_))
        ));
    }

    #[test]
    fn direct_series_matches_corrected_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in KernelCase::ALL {
            let s = construct_sample(case, &mut rng);
            let series = kernel_series_sum(case, &s.z, &s.w, Truncation { l: 20, m: 25, k: 40 }).unwrap();
            let closed = kernel_at(case, &s.z, &s.w).unwrap();
            let printed = printed_closed_form(case, &s.eig, s.z.norm()).unwrap();
            assert!((series - closed).norm() <= 1e-6 * closed.norm(), "{case}: {series} vs {closed}");
            // the printed forms of the two `>` components carry the opposite sign
            let flipped = matches!(case, KernelCase::DhGreater | KernelCase::DaGreater);
            assert_eq!((series + printed).norm() <= 1e-6 * closed.norm(), flipped, "{case}");
        }
    }

    #[test]
    fn kernel_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = construct_sample(KernelCase::DhLess, &mut rng);
        let g = su11_element(0.3, 0.4, 1.2);
        let t = Truncation { l: 20, m: 25, k: 40 };
        let a = kernel_series_sum(KernelCase::DhLess, &s.z, &s.w, t).unwrap();
        let b = kernel_series_sum(KernelCase::DhLess, &(&s.z * &g), &(&s.w * &g), t).unwrap();
        assert!((a - b).norm() <= 1e-8 * a.norm());
    }
}
