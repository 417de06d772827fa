//! The conformal action `ρ₁` of `gl(2, H_C)`: exact infinitesimal action on
//! [`LaurentElement`]s, numeric group action at points, exact expansion of
//! images in the `τ N^k` basis and the invariance / ladder checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{
    basis_element, block_candidates, classify_component, enumerate_basis, Bounds, CoeffIndex, ComponentLabel,
};
use crate::error::{ExpandError, GroupError};
use crate::laurent::{pmul_npow, z_matrix, Exp, LaurentElement, Poly};
use crate::matrix::{units, Mat2, MatrixHC, PointHC};
use crate::scalar::{GaussianRational, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    A,
    B,
    C,
    D,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::A, Block::B, Block::C, Block::D];
}

/// `[[A, B], [C, D]]` with 2x2 blocks over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieAlgElement {
    pub a: MatrixHC,
    pub b: MatrixHC,
    pub c: MatrixHC,
    pub d: MatrixHC,
}

pub type Gl4<T> = [[T; 4]; 4];

impl LieAlgElement {
    pub fn zero() -> Self {
        Self { a: MatrixHC::zero(), b: MatrixHC::zero(), c: MatrixHC::zero(), d: MatrixHC::zero() }
    }

    pub fn block(block: Block, m: MatrixHC) -> Self {
        let mut x = Self::zero();
        *x.block_mut(block) = m;
        x
    }

    pub fn get(&self, block: Block) -> &MatrixHC {
        match block {
            Block::A => &self.a,
            Block::B => &self.b,
            Block::C => &self.c,
            Block::D => &self.d,
        }
    }

    fn block_mut(&mut self, block: Block) -> &mut MatrixHC {
        match block {
            Block::A => &mut self.a,
            Block::B => &mut self.b,
            Block::C => &mut self.c,
            Block::D => &mut self.d,
        }
    }

    pub fn is_zero(&self) -> bool {
        Block::ALL.iter().all(|&b| self.get(b).is_zero())
    }

    pub fn to_gl4(&self) -> Gl4<GaussianRational> {
        let mut m: Gl4<GaussianRational> = Default::default();
        for (bi, bj, blk) in [(0, 0, &self.a), (0, 1, &self.b), (1, 0, &self.c), (1, 1, &self.d)] {
            for i in 0..2 {
                for j in 0..2 {
                    m[2 * bi + i][2 * bj + j] = blk.get(i, j).clone();
                }
            }
        }
        m
    }

    pub fn from_gl4(m: &Gl4<GaussianRational>) -> Self {
        let blk = |bi: usize, bj: usize| MatrixHC::from_fn(|i, j| m[2 * bi + i][2 * bj + j].clone());
        Self { a: blk(0, 0), b: blk(0, 1), c: blk(1, 0), d: blk(1, 1) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c, d: &self.d + &o.d }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        Self { a: self.a.scale(s), b: self.b.scale(s), c: self.c.scale(s), d: self.d.scale(s) }
    }

    /// `[X, Y] = XY - YX` in `gl(4, C)`.
    pub fn bracket(&self, o: &Self) -> Self {
        let (x, y) = (self.to_gl4(), o.to_gl4());
        let mut m: Gl4<GaussianRational> = Default::default();
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let mut s = GaussianRational::zero();
                for k in 0..4 {
                    s = s + &x[i][k] * &y[k][j] - &y[i][k] * &x[k][j];
                }
                *e = s;
            }
        }
        Self::from_gl4(&m)
    }

    pub fn to_complex_gl4(&self) -> Gl4<Complex64> {
        self.to_gl4().map(|row| row.map(|e| e.to_complex()))
    }
}

/// One of the 16 elementary generators: a quaternionic unit in one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub block: Block,
    pub element: LieAlgElement,
}

pub fn elementary_generators() -> Vec<Generator> {
    let mut out = Vec::with_capacity(16);
    for block in Block::ALL {
        for (name, m) in units::spanning_set() {
            out.push(Generator { label: format!("{block:?}:{name}"), block, element: LieAlgElement::block(block, m) });
        }
    }
    out
}

/// `Tr(A M)` for a scalar matrix `A` and a function matrix `M`.
fn trace_with(a: &MatrixHC, m: &Mat2<LaurentElement>) -> LaurentElement {
    let mut out = LaurentElement::zero();
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.get(i, j);
            if !aij.is_zero() {
                out = out + m.get(j, i).scale(aij);
            }
        }
    }
    out
}

/// Exact infinitesimal action:
/// `Tr(A(-Z∂f - f)) + Tr(B(-∂f)) + Tr(C(Z(∂f)Z + 2Zf)) + Tr(D((∂f)Z + f))`.
pub fn rho1_algebra(x: &LieAlgElement, f: &LaurentElement) -> LaurentElement {
    if f.is_zero() || x.is_zero() {
        return LaurentElement::zero();
    }
    rho1_with_del(x, f, &f.matrix_del())
}

/// Same formulas with a caller-supplied `∂f`.
fn rho1_with_del(x: &LieAlgElement, f: &LaurentElement, d: &Mat2<LaurentElement>) -> LaurentElement {
    let z = z_matrix();
    let fi = Mat2::scalar(f.clone());
    let mut out = LaurentElement::zero();
    if !x.a.is_zero() {
        out = out + trace_with(&x.a, &(&(-&z.matmul(d)) - &fi));
    }
    if !x.b.is_zero() {
        out = out + trace_with(&x.b, &(-d));
    }
    if !x.c.is_zero() {
        let m = &z.matmul(d).matmul(&z) + &z.scale(&f.scale(&GaussianRational::from_int(2)));
        out = out + trace_with(&x.c, &m);
    }
    if !x.d.is_zero() {
        out = out + trace_with(&x.d, &(&d.matmul(&z) + &fi));
    }
    out
}

// ---------------------------------------------------------------------------
// group level, numeric

type C4 = Gl4<Complex64>;

fn c4_identity() -> C4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn c4_mul(x: &C4, y: &C4) -> C4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                m[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    m
}

fn c4_norm(x: &C4) -> f64 {
    x.iter().flatten().map(|e| e.norm()).fold(0.0, f64::max) * 4.0
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm4(x: &C4) -> C4 {
    let mut s = 0;
    let mut scaled = *x;
    let mut nrm = c4_norm(x);
    while nrm > 0.25 {
        s += 1;
        nrm /= 2.0;
    }
    let f = 0.5f64.powi(s);
    for row in scaled.iter_mut() {
        for e in row.iter_mut() {
            *e *= f;
        }
    }
    let mut acc = c4_identity();
    let mut term = c4_identity();
    for n in 1..=18 {
        term = c4_mul(&term, &scaled);
        let inv = 1.0 / n as f64;
        for row in term.iter_mut() {
            for e in row.iter_mut() {
                *e *= inv;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        acc = c4_mul(&acc, &acc);
    }
    acc
}

fn c4_block(m: &C4, bi: usize, bj: usize) -> PointHC {
    PointHC::from_fn(|i, j| m[2 * bi + i][2 * bj + j])
}

/// `h = [[a', b'], [c', d']]` together with `h^{-1} = [[a, b], [c, d]]`.
#[derive(Clone, Debug)]
pub struct GroupElement {
    h: C4,
    h_inv: C4,
}

impl GroupElement {
    pub fn new(h: C4, h_inv: C4) -> Result<Self, GroupError> {
        let p = c4_mul(&h, &h_inv);
        let id = c4_identity();
        let defect = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (p[i][j] - id[i][j]).norm())
            .fold(0.0, f64::max);
        if defect > 1e-10 {
            return Err(GroupError::NotInverse(defect));
        }
        Ok(Self { h, h_inv })
    }

    /// Exact pair, checked exactly.
    #[allow(clippy::needless_range_loop)]
    pub fn from_exact(h: &LieAlgElement, h_inv: &LieAlgElement) -> Result<Self, GroupError> {
        let (x, y) = (h.to_gl4(), h_inv.to_gl4());
        for i in 0..4 {
            for j in 0..4 {
                let mut s = GaussianRational::zero();
                for k in 0..4 {
                    s = s + &x[i][k] * &y[k][j];
                }
                let want = if i == j { GaussianRational::one() } else { GaussianRational::zero() };
                if s != want {
                    return Err(GroupError::NotInverse(f64::NAN));
                }
            }
        }
        Self::new(h.to_complex_gl4(), h_inv.to_complex_gl4())
    }

    pub fn identity() -> Self {
        Self { h: c4_identity(), h_inv: c4_identity() }
    }

    /// `exp(εX)`.
    pub fn exp(x: &LieAlgElement, eps: f64) -> Self {
        let mut m = x.to_complex_gl4();
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= eps;
            }
        }
        let mut neg = m;
        for row in neg.iter_mut() {
            for e in row.iter_mut() {
                *e = -*e;
            }
        }
        Self { h: expm4(&m), h_inv: expm4(&neg) }
    }
}

/// `(ρ₁(h) f)(P) = f((aP+b)(cP+d)^{-1}) / (N(cP+d) N(a' - P c'))`.
pub fn rho1_group(g: &GroupElement, f: &LaurentElement, p: &PointHC) -> Result<Complex64, GroupError> {
    let (a, b, c, d) =
        (c4_block(&g.h_inv, 0, 0), c4_block(&g.h_inv, 0, 1), c4_block(&g.h_inv, 1, 0), c4_block(&g.h_inv, 1, 1));
    let (a1, c1) = (c4_block(&g.h, 0, 0), c4_block(&g.h, 1, 0));
    let num = &(&a * p) + &b;
    let den = &(&c * p) + &d;
    let n_den = den.norm();
    let n_other = (&a1 - &(p * &c1)).norm();
    if n_den.norm() < 1e-300 || n_other.norm() < 1e-300 {
        return Err(GroupError::SingularFactor);
    }
    let q = &num * &den.invert().map_err(|_| GroupError::SingularFactor)?;
    Ok(f.evaluate(&q)? / (n_den * n_other))
}

/// Central difference `(ρ₁(e^{εX}) f - ρ₁(e^{-εX}) f)(P) / 2ε`.
pub fn rho1_finite_difference(
    x: &LieAlgElement,
    f: &LaurentElement,
    p: &PointHC,
    eps: f64,
) -> Result<Complex64, GroupError> {
    let plus = rho1_group(&GroupElement::exp(x, eps), f, p)?;
    let minus = rho1_group(&GroupElement::exp(x, -eps), f, p)?;
    Ok((plus - minus) / (2.0 * eps))
}

// ---------------------------------------------------------------------------
// exact expansion

/// Gaussian elimination on `cols * x = rhs`; `None` if inconsistent.
/// Columns are assumed linearly independent.
fn solve_exact(cols: &[Poly], rhs: &Poly) -> Option<Vec<GaussianRational>> {
    let mut rows: BTreeMap<Exp, usize> = BTreeMap::new();
    for p in cols.iter().chain(std::iter::once(rhs)) {
        for e in p.keys() {
            let n = rows.len();
            rows.entry(*e).or_insert(n);
        }
    }
    let nc = cols.len();
    let mut m = vec![vec![GaussianRational::zero(); nc + 1]; rows.len()];
    for (j, p) in cols.iter().enumerate() {
        for (e, c) in p {
            m[rows[e]][j] = c.clone();
        }
    }
    for (e, c) in rhs {
        m[rows[e]][nc] = c.clone();
    }
    let mut pivots = Vec::with_capacity(nc);
    let mut r = 0;
    for col in 0..nc {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = GaussianRational::one() / m[r][col].clone();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v = &*v - &(&f * pv);
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[nc].is_zero()) {
        return None;
    }
    let mut x = vec![GaussianRational::zero(); nc];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][nc].clone();
    }
    Some(x)
}

/// Exact coefficients of `f` on `candidates`; zero coefficients are dropped.
pub fn expand_in_basis(
    f: &LaurentElement,
    candidates: &[CoeffIndex],
) -> Result<Vec<(CoeffIndex, GaussianRational)>, ExpandError> {
    if f.is_zero() {
        return Ok(Vec::new());
    }
    let basis: Vec<LaurentElement> =
        candidates.iter().map(|i| basis_element(i).expect("candidate indices are valid")).collect();
    let k = basis.iter().map(|b| b.npower()).chain([f.npower()]).min().unwrap();
    let cols: Vec<Poly> = basis.iter().map(|b| b.numerator_at(k)).collect();
    let rhs = f.numerator_at(k);
    let x = solve_exact(&cols, &rhs).ok_or(ExpandError::NotInSpan)?;
    Ok(candidates.iter().copied().zip(x).filter(|(_, c)| !c.is_zero()).collect())
}

/// Expansion of `f` on the whole h/a basis, block by block in torus weight
/// and degree. Sorted by index.
pub fn expand_auto(f: &LaurentElement) -> Result<Vec<(CoeffIndex, GaussianRational)>, ExpandError> {
    let mut out = Vec::new();
    for ((rw, cw, deg), part) in f.weight_parts() {
        let cands = block_candidates(rw, cw, deg);
        out.extend(expand_in_basis(&part, &cands)?);
    }
    out.sort_by_key(|a| a.0);
    Ok(out)
}

/// Weight/degree block of a function that the h/a basis cannot reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub row_weight: i32,
    pub col_weight: i32,
    pub degree: i32,
    pub part: LaurentElement,
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[weights ({}, {}), degree {}] {}", self.row_weight, self.col_weight, self.degree, self.part)
    }
}

/// Like [`expand_auto`] but keeps going past blocks outside the span and
/// returns them as residuals.
pub fn expand_partial(f: &LaurentElement) -> (Vec<(CoeffIndex, GaussianRational)>, Vec<Residual>) {
    let mut terms = Vec::new();
    let mut residuals = Vec::new();
    for ((rw, cw, deg), part) in f.weight_parts() {
        match expand_in_basis(&part, &block_candidates(rw, cw, deg)) {
            Ok(t) => terms.extend(t),
            Err(_) => residuals.push(Residual { row_weight: rw, col_weight: cw, degree: deg, part }),
        }
    }
    terms.sort_by_key(|a| a.0);
    (terms, residuals)
}

/// `Σ c_i basis_i`.
pub fn from_expansion(terms: &[(CoeffIndex, GaussianRational)]) -> LaurentElement {
    // sum at a common N-power, canonicalized once
    if terms.is_empty() {
        return LaurentElement::zero();
    }
    let parts: Vec<LaurentElement> =
        terms.iter().map(|(i, c)| basis_element(i).expect("valid index").scale(c)).collect();
    let k = parts.iter().map(|p| p.npower()).min().unwrap();
    let mut poly = Poly::new();
    for p in &parts {
        for (e, c) in pmul_npow(p.terms(), (p.npower() - k) as u32) {
            crate::laurent::padd(&mut poly, e, c);
        }
    }
    LaurentElement::canonical(poly, k)
}

// ---------------------------------------------------------------------------
// ladders

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ArrowKind {
    Vertical,
    Diagonal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderArrow {
    pub source: CoeffIndex,
    pub block: Block,
    pub kind: ArrowKind,
    pub target_twol: i32,
    pub target_k: i32,
    pub coefficient: GaussianRational,
}

impl fmt::Display for LadderArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}/{:?}: {} -> (2l={}, k={}) x {}",
            self.block, self.kind, self.source, self.target_twol, self.target_k, self.coefficient
        )
    }
}

/// The two arrows leaving `idx` under the B or C block. Arrows whose
/// prefactor vanishes, or whose harmonic target vanishes (`l = -1`), are
/// omitted. A and D blocks have no arrows (they preserve `(2l, k)`).
pub fn ladder_coefficients(idx: &CoeffIndex, block: Block) -> Vec<LadderArrow> {
    let (twol, k) = (idx.twol as i64, idx.k as i64);
    let q = |num: i64| GaussianRational::from_frac(num, twol + 1);
    let raw: Vec<(ArrowKind, i32, i32, GaussianRational, bool)> = match block {
        Block::B => vec![
            (ArrowKind::Vertical, idx.twol - 1, idx.k, q(twol + k + 1), true),
            (ArrowKind::Diagonal, idx.twol + 1, idx.k - 1, q(k), twol != -2),
        ],
        Block::C => vec![
            (ArrowKind::Vertical, idx.twol + 1, idx.k, q(twol + k + 2), twol != -2),
            (ArrowKind::Diagonal, idx.twol - 1, idx.k + 1, q(k + 1), true),
        ],
        Block::A | Block::D => vec![],
    };
    raw.into_iter()
        .filter(|(_, _, _, c, alive)| *alive && !c.is_zero())
        .map(|(kind, target_twol, target_k, coefficient, _)| LadderArrow {
            source: *idx,
            block,
            kind,
            target_twol,
            target_k,
            coefficient,
        })
        .collect()
}

/// `∂(f N^k)` rebuilt from the B-ladder split
/// `α (∂f) N^k + β (Z^+ (∂^+ f) Z^+ + Z^+ f) N^{k-1}` with the given
/// diagonal prefactor numerator `β (2l+1)`. With `beta_num = k` this is an
/// identity; other values give a deliberately wrong action for harness
/// self-tests.
pub fn ladder_rebuilt_del(idx: &CoeffIndex, beta_num: i64) -> Mat2<LaurentElement> {
    let f = crate::coefficients::tau(idx.series, idx.twol, idx.twon, idx.twom).expect("valid");
    let twol = idx.twol as i64;
    let alpha = GaussianRational::from_frac(twol + idx.k as i64 + 1, twol + 1);
    let beta = GaussianRational::from_frac(beta_num, twol + 1);
    let zp = z_matrix().conjugate_plus();
    let vertical = f.matrix_del().map(|e| e.scale(&alpha).mul_n_pow(idx.k));
    let diag_core = &zp.matmul(&f.matrix_del_plus()).matmul(&zp) + &zp.scale(&f);
    let diagonal = diag_core.map(|e| e.scale(&beta).mul_n_pow(idx.k - 1));
    &vertical + &diagonal
}

// ---------------------------------------------------------------------------
// invariance

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub source: String,
    pub generator: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub component: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// How a generator acts on a basis element.
pub trait BasisAction: Sync {
    fn apply(&self, x: &LieAlgElement, idx: &CoeffIndex) -> LaurentElement;
}

/// The true action `ρ₁`.
pub struct ExactAction;

impl BasisAction for ExactAction {
    fn apply(&self, x: &LieAlgElement, idx: &CoeffIndex) -> LaurentElement {
        rho1_algebra(x, &basis_element(idx).expect("valid"))
    }
}

/// `ρ₁` with the B-block diagonal prefactor replaced by `(k+1)/(2l+1)`.
pub struct CorruptedLadderAction;

impl BasisAction for CorruptedLadderAction {
    fn apply(&self, x: &LieAlgElement, idx: &CoeffIndex) -> LaurentElement {
        let f = basis_element(idx).expect("valid");
        let mut rest = x.clone();
        rest.b = MatrixHC::zero();
        let good = rho1_algebra(&rest, &f);
        if x.b.is_zero() {
            return good;
        }
        let d = ladder_rebuilt_del(idx, idx.k as i64 + 1);
        good + rho1_with_del(&LieAlgElement::block(Block::B, x.b.clone()), &f, &d)
    }
}

pub fn check_invariance(label: ComponentLabel, bounds: &Bounds, generators: &[Generator]) -> InvarianceReport {
    check_invariance_with(label, bounds, generators, &ExactAction)
}

pub fn check_invariance_with(
    label: ComponentLabel,
    bounds: &Bounds,
    generators: &[Generator],
    action: &dyn BasisAction,
) -> InvarianceReport {
    let sources = enumerate_basis(label, bounds);
    let jobs: Vec<(CoeffIndex, &Generator)> =
        sources.iter().flat_map(|s| generators.iter().map(move |g| (*s, g))).collect();
    let violations: Vec<Violation> = jobs
        .par_iter()
        .filter_map(|(src, g)| {
            let image = action.apply(&g.element, src);
            let (terms, residuals) = expand_partial(&image);
            let mut foreign: Vec<String> = terms
                .iter()
                .filter(|(i, _)| classify_component(i).ok() != Some(label))
                .map(|(i, c)| format!("{c} * {i}"))
                .collect();
            foreign.extend(residuals.iter().map(|r| format!("outside D^h+D^a: {r}")));
            let detail = (!foreign.is_empty()).then(|| format!("leaks into {}", foreign.join("; ")));
            detail.map(|detail| Violation { source: src.to_string(), generator: g.label.clone(), detail })
        })
        .collect();
    InvarianceReport { component: label.to_string(), checked: jobs.len(), violations }
}

/// Observed vs predicted `(2l', k')` targets of one source under one block.
/// Targets outside the basis (`2l' > -2`) are located by degree and the
/// ladder's `k` shift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowCheck {
    pub source: String,
    pub block: Block,
    pub predicted: Vec<(i32, i32)>,
    pub observed: Vec<(i32, i32)>,
    pub outside_basis: Vec<(i32, i32)>,
    pub pass: bool,
}

/// Targets reached by the exact images of `idx` under the four units of
/// `block`, compared with [`ladder_coefficients`] (or `(2l, k)` itself for
/// the A and D blocks).
pub fn check_arrows(idx: &CoeffIndex, block: Block) -> ArrowCheck {
    let f = basis_element(idx).expect("valid");
    let mut observed = BTreeSet::new();
    let mut outside = BTreeSet::new();
    // k' of an off-basis target: the diagonal arrow for B, vertical for C
    let k_shift = match block {
        Block::B => -1,
        _ => 0,
    };
    for (_, u) in units::spanning_set() {
        let image = rho1_algebra(&LieAlgElement::block(block, u), &f);
        let (terms, residuals) = expand_partial(&image);
        observed.extend(terms.iter().map(|(i, _)| (i.twol, i.k)));
        for r in residuals {
            let k = idx.k + k_shift;
            let t = (r.degree - 2 * k, k);
            outside.insert(t);
            observed.insert(t);
        }
    }
    let ok = outside.is_empty();
    let predicted: BTreeSet<(i32, i32)> = match block {
        Block::A | Block::D => BTreeSet::from([(idx.twol, idx.k)]),
        _ => ladder_coefficients(idx, block).iter().map(|a| (a.target_twol, a.target_k)).collect(),
    };
    let pass = ok
        && match block {
            Block::A | Block::D => observed.is_subset(&predicted),
            _ => observed == predicted,
        };
    ArrowCheck {
        source: idx.to_string(),
        block,
        predicted: predicted.into_iter().collect(),
        observed: observed.into_iter().collect(),
        outside_basis: outside.into_iter().collect(),
        pass,
    }
}
