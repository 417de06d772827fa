//! Canonical rational functions `p(z11, z12, z21, z22) * N(Z)^k`.
//!
//! `p` is a Laurent polynomial that may carry negative powers of `z11` and
//! `z22` (needed for the discrete-series coefficients) but only nonnegative
//! powers of `z12`, `z21`. `N = z11 z22 - z12 z21` is prime in that ring, so
//! requiring `N ∤ p` makes `(p, k)` unique.
//!
//! Divisibility by `N` is decided by rewriting `z12 z21 = z11 z22 - N`:
//! every `p` has a unique expansion `Σ_j r_j N^j` with each `r_j` free of
//! monomials containing both `z12` and `z21`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, ParseError};
use crate::matrix::{Mat2, PointHC};
use crate::scalar::{GaussianRational, Ring};

/// Exponents of `(z11, z12, z21, z22)`.
pub type Exp = [i32; 4];
pub(crate) type Poly = BTreeMap<Exp, GaussianRational>;

/// One of the four matrix-entry variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Z11 = 0,
    Z12 = 1,
    Z21 = 2,
    Z22 = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Z11, Var::Z12, Var::Z21, Var::Z22];

    /// Variable `z_{ij}` for zero-based `(i, j)`.
    pub fn from_ij(i: usize, j: usize) -> Var {
        Self::ALL[2 * i + j]
    }

    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(i32),
    Mixed,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentElement {
    terms: Poly,
    k: i32,
}

// ---------------------------------------------------------------------------
// raw polynomial helpers

pub(crate) fn padd(p: &mut Poly, e: Exp, c: GaussianRational) {
    if c.is_zero() {
        return;
    }
    match p.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

fn exp_add(a: &Exp, b: &Exp) -> Exp {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub(crate) fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            padd(&mut out, exp_add(ea, eb), ca * cb);
        }
    }
    out
}

fn n_poly() -> Poly {
    let mut p = Poly::new();
    p.insert([1, 0, 0, 1], GaussianRational::one());
    p.insert([0, 1, 1, 0], GaussianRational::from_int(-1));
    p
}

/// `p * N^j`, `j >= 0`.
pub(crate) fn pmul_npow(p: &Poly, j: u32) -> Poly {
    let mut out = p.clone();
    if j == 0 {
        return out;
    }
    let n = n_poly();
    for _ in 0..j {
        out = pmul(&out, &n);
    }
    out
}

fn binom_u(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Layer 0 of the N-adic expansion, i.e. `p mod N` in reduced form.
fn n_remainder(p: &Poly) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        let mu = e[1].min(e[2]);
        padd(&mut out, [e[0] + mu, e[1] - mu, e[2] - mu, e[3] + mu], c.clone());
    }
    out
}

/// The unique `r_j` with `p = Σ_j r_j N^j`, each `r_j` reduced.
pub(crate) fn n_adic(p: &Poly) -> Vec<Poly> {
    let mut layers: Vec<Poly> = Vec::new();
    for (e, c) in p {
        let mu = e[1].min(e[2]);
        if layers.len() <= mu as usize {
            layers.resize_with(mu as usize + 1, Poly::new);
        }
        for i in 0..=mu {
            let mut b = GaussianRational::from_bigint(binom_u(mu as u32, i as u32));
            if i % 2 == 1 {
                b = -b;
            }
            let ex = [e[0] + mu - i, e[1] - mu, e[2] - mu, e[3] + mu - i];
            padd(&mut layers[i as usize], ex, c * &b);
        }
    }
    while layers.last().is_some_and(|l| l.is_empty()) {
        layers.pop();
    }
    layers
}

/// Partial derivative of a raw polynomial.
fn pderiv(p: &Poly, v: Var) -> Poly {
    let i = v.idx();
    let mut out = Poly::new();
    for (e, c) in p {
        if e[i] == 0 {
            continue;
        }
        let mut ne = *e;
        ne[i] -= 1;
        padd(&mut out, ne, c * &GaussianRational::from_int(e[i] as i64));
    }
    out
}

fn dn_poly(v: Var) -> Poly {
    let mut p = Poly::new();
    let (e, c) = match v {
        Var::Z11 => ([0, 0, 0, 1], 1),
        Var::Z22 => ([1, 0, 0, 0], 1),
        Var::Z12 => ([0, 0, 1, 0], -1),
        Var::Z21 => ([0, 1, 0, 0], -1),
    };
    p.insert(e, GaussianRational::from_int(c));
    p
}

fn scale_poly(p: &Poly, s: &GaussianRational) -> Poly {
    if s.is_zero() {
        return Poly::new();
    }
    p.iter().map(|(e, c)| (*e, c * s)).collect()
}

// ---------------------------------------------------------------------------

impl LaurentElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = Poly::new();
        padd(&mut terms, [0; 4], c);
        Self { terms, k: 0 }
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 4];
        e[v.idx()] = 1;
        Self::monomial(e, GaussianRational::one())
    }

    /// `N(Z)^k`.
    pub fn n_pow(k: i32) -> Self {
        Self { terms: Poly::from([([0; 4], GaussianRational::one())]), k }
    }

    /// `c * z11^a z12^b z21^c z22^d`. Panics if the `z12` or `z21` exponent is
    /// negative; use [`LaurentElement::from_parts`] for untrusted input.
    pub fn monomial(e: Exp, c: GaussianRational) -> Self {
        assert!(e[1] >= 0 && e[2] >= 0, "negative z12/z21 exponent in {e:?}");
        let mut terms = Poly::new();
        padd(&mut terms, e, c);
        Self::canonical(terms, 0)
    }

    /// Builds `(Σ terms) * N^k` and canonicalizes.
    pub fn from_parts(terms: impl IntoIterator<Item = (Exp, GaussianRational)>, k: i32) -> Result<Self, ParseError> {
        let mut p = Poly::new();
        for (e, c) in terms {
            if e[1] < 0 || e[2] < 0 {
                return Err(ParseError::NegativeExponent(e));
            }
            padd(&mut p, e, c);
        }
        Ok(Self::canonical(p, k))
    }

    pub(crate) fn canonical(terms: Poly, k: i32) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        if !n_remainder(&terms).is_empty() {
            return Self { terms, k };
        }
        let layers = n_adic(&terms);
        let j0 = layers.iter().position(|l| !l.is_empty()).expect("nonzero polynomial");
        let mut p = Poly::new();
        for (i, layer) in layers.iter().enumerate().skip(j0) {
            for (e, c) in pmul_npow(layer, (i - j0) as u32) {
                padd(&mut p, e, c);
            }
        }
        Self { terms: p, k: k + j0 as i32 }
    }

    pub fn terms(&self) -> &BTreeMap<Exp, GaussianRational> {
        &self.terms
    }

    pub fn npower(&self) -> i32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: scale_poly(&self.terms, s), k: self.k }
    }

    pub fn mul_n_pow(&self, j: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.clone(), k: self.k + j }
    }

    /// If `self = c * other` for a constant `c`, returns `c`.
    pub fn ratio_constant(&self, other: &Self) -> Option<GaussianRational> {
        if other.is_zero() || self.is_zero() || self.k != other.k {
            return None;
        }
        let (e0, c0) = other.terms.iter().next()?;
        let c = self.terms.get(e0)? / c0;
        (self.terms.len() == other.terms.len() && *self == other.scale(&c)).then_some(c)
    }

    pub fn partial(&self, v: Var) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if self.k == 0 {
            return Self::canonical(pderiv(&self.terms, v), 0);
        }
        // ∂(p N^k) = (N ∂p + k p ∂N) N^{k-1}
        let mut num = pmul(&n_poly(), &pderiv(&self.terms, v));
        let kp = scale_poly(&pmul(&self.terms, &dn_poly(v)), &GaussianRational::from_int(self.k as i64));
        for (e, c) in kp {
            padd(&mut num, e, c);
        }
        Self::canonical(num, self.k - 1)
    }

    /// `∂ = [[∂11, ∂21], [∂12, ∂22]]` applied to `self`.
    pub fn matrix_del(&self) -> Mat2<LaurentElement> {
        Mat2::new(self.partial(Var::Z11), self.partial(Var::Z21), self.partial(Var::Z12), self.partial(Var::Z22))
    }

    /// `∂^+ = [[∂22, -∂21], [-∂12, ∂11]]` applied to `self`.
    pub fn matrix_del_plus(&self) -> Mat2<LaurentElement> {
        self.matrix_del().conjugate_plus()
    }

    /// `□ = ∂11 ∂22 - ∂12 ∂21`.
    pub fn box_op(&self) -> Self {
        &self.partial(Var::Z11).partial(Var::Z22) - &self.partial(Var::Z12).partial(Var::Z21)
    }

    /// `f ↦ N(Z)^{-1} f(Z^{-1})`, an involution.
    pub fn inv_transform(&self) -> Self {
        let mut by_power: BTreeMap<i32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let j = -(e[0] + e[1] + e[2] + e[3]) - self.k - 1;
            let c = if (e[1] + e[2]) % 2 == 0 { c.clone() } else { -c };
            padd(by_power.entry(j).or_default(), [e[3], e[1], e[2], e[0]], c);
        }
        by_power.into_iter().map(|(j, p)| Self::canonical(p, j)).fold(Self::zero(), |acc, f| &acc + &f)
    }

    pub fn homogeneity_degree(&self) -> Homogeneity {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<i32>() + 2 * self.k);
        match degs.next() {
            None => Homogeneity::Zero,
            Some(d) => {
                if degs.all(|x| x == d) {
                    Homogeneity::Degree(d)
                } else {
                    Homogeneity::Mixed
                }
            }
        }
    }

    /// Homogeneous components keyed by total degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<i32, LaurentElement> {
        self.split_by(|e| e.iter().sum::<i32>() + 2 * self.k)
    }

    /// Components keyed by `(row weight, column weight, degree)` of the
    /// diagonal torus action `Z ↦ diag(x, 1/x) Z diag(y, 1/y)` and scaling.
    pub fn weight_parts(&self) -> BTreeMap<(i32, i32, i32), LaurentElement> {
        self.split_by(|e| (e[0] + e[1] - e[2] - e[3], e[0] + e[2] - e[1] - e[3], e.iter().sum::<i32>() + 2 * self.k))
    }

    fn split_by<K: Ord>(&self, key: impl Fn(&Exp) -> K) -> BTreeMap<K, LaurentElement> {
        let mut groups: BTreeMap<K, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            groups.entry(key(e)).or_default().insert(*e, c.clone());
        }
        groups.into_iter().map(|(key, p)| (key, Self::canonical(p, self.k))).collect()
    }

    /// Numerator rewritten over the common power `N^target`, `target <= k`.
    pub(crate) fn numerator_at(&self, target: i32) -> Poly {
        assert!(target <= self.k);
        pmul_npow(&self.terms, (self.k - target) as u32)
    }

    pub(crate) fn n_adic_layers(&self) -> Vec<Poly> {
        n_adic(&self.terms)
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }

    pub fn evaluate(&self, p: &PointHC) -> Result<Complex64, EvalError> {
        self.evaluator().eval(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, ParseError> {
        let wire: WireElement = serde_json::from_str(s).map_err(|e| ParseError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for t in wire.terms {
            let re = GaussianRational::parse_rational(&t.re)?;
            let im = GaussianRational::parse_rational(&t.im)?;
            terms.push((t.e, GaussianRational::new(re, im)));
        }
        Self::from_parts(terms, wire.k)
    }

    fn to_wire(&self) -> WireElement {
        WireElement {
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| WireTerm {
                    e: *e,
                    re: GaussianRational::format_rational(c.re()),
                    im: GaussianRational::format_rational(c.im()),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireElement {
    k: i32,
    terms: Vec<WireTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTerm {
    e: [i32; 4],
    re: String,
    im: String,
}

impl fmt::Debug for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        const NAMES: [&str; 4] = ["z11", "z12", "z21", "z22"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = c.to_string();
                for (name, &x) in NAMES.iter().zip(e) {
                    match x {
                        0 => {}
                        1 => s.push_str(&format!("*{name}")),
                        _ => s.push_str(&format!("*{name}^{x}")),
                    }
                }
                s
            })
            .collect();
        if self.k == 0 {
            write!(f, "{}", parts.join(" + "))
        } else {
            write!(f, "({}) * N^{}", parts.join(" + "), self.k)
        }
    }
}

/// Precomputed numeric form of a [`LaurentElement`]. Evaluates the N-adic
/// expansion `Σ_j r_j(P) N(P)^{k+j}`, which keeps cancellation between
/// `z11 z22` and `z12 z21` out of the floating-point sum.
#[derive(Clone, Debug)]
pub struct Evaluator {
    layers: Vec<Vec<(Exp, Complex64)>>,
    k: i32,
    neg11: bool,
    neg22: bool,
}

impl Evaluator {
    pub fn new(f: &LaurentElement) -> Self {
        let layers: Vec<Vec<(Exp, Complex64)>> =
            f.n_adic_layers().iter().map(|l| l.iter().map(|(e, c)| (*e, c.to_complex())).collect()).collect();
        let neg11 = f.terms.keys().any(|e| e[0] < 0);
        let neg22 = f.terms.keys().any(|e| e[3] < 0);
        Self { layers, k: f.k, neg11, neg22 }
    }

    pub fn eval(&self, p: &PointHC) -> Result<Complex64, EvalError> {
        if self.layers.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if (self.neg11 && p.z11 == Complex64::new(0.0, 0.0)) || (self.neg22 && p.z22 == Complex64::new(0.0, 0.0)) {
            return Err(EvalError::SingularEntry);
        }
        let n = p.norm();
        let z = [p.z11, p.z12, p.z21, p.z22];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                continue;
            }
            let pw = self.k + j as i32;
            if pw < 0 && n == Complex64::new(0.0, 0.0) {
                return Err(EvalError::SingularNorm);
            }
            let mut s = Complex64::new(0.0, 0.0);
            for (e, c) in layer {
                let mut m = *c;
                for (zi, &x) in z.iter().zip(e) {
                    if x != 0 {
                        m *= zi.powi(x);
                    }
                }
                s += m;
            }
            acc += s * n.powi(pw);
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// operators

impl Add<&LaurentElement> for &LaurentElement {
    type Output = LaurentElement;
    fn add(self, o: &LaurentElement) -> LaurentElement {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let k = self.k.min(o.k);
        let mut p = self.numerator_at(k);
        for (e, c) in o.numerator_at(k) {
            padd(&mut p, e, c);
        }
        LaurentElement::canonical(p, k)
    }
}

impl Neg for &LaurentElement {
    type Output = LaurentElement;
    fn neg(self) -> LaurentElement {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl Sub<&LaurentElement> for &LaurentElement {
    type Output = LaurentElement;
    fn sub(self, o: &LaurentElement) -> LaurentElement {
        self + &(-o)
    }
}

impl Mul<&LaurentElement> for &LaurentElement {
    type Output = LaurentElement;
    fn mul(self, o: &LaurentElement) -> LaurentElement {
        if self.is_zero() || o.is_zero() {
            return LaurentElement::zero();
        }
        // N is prime, so a product of N-free numerators stays N-free.
        LaurentElement { terms: pmul(&self.terms, &o.terms), k: self.k + o.k }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentElement> for LaurentElement {
            type Output = LaurentElement;
            fn $m(self, o: LaurentElement) -> LaurentElement {
                (&self).$m(&o)
            }
        }
        impl $tr<&LaurentElement> for LaurentElement {
            type Output = LaurentElement;
            fn $m(self, o: &LaurentElement) -> LaurentElement {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for LaurentElement {
    type Output = LaurentElement;
    fn neg(self) -> LaurentElement {
        -&self
    }
}

impl Ring for LaurentElement {
    fn zero() -> Self {
        LaurentElement::zero()
    }
    fn one() -> Self {
        LaurentElement::one()
    }
    fn from_i64(v: i64) -> Self {
        LaurentElement::constant(GaussianRational::from_int(v))
    }
    fn is_zero(&self) -> bool {
        LaurentElement::is_zero(self)
    }
}

/// The coordinate matrix `Z` as functions.
pub fn z_matrix() -> Mat2<LaurentElement> {
    Mat2::new(
        LaurentElement::var(Var::Z11),
        LaurentElement::var(Var::Z12),
        LaurentElement::var(Var::Z21),
        LaurentElement::var(Var::Z22),
    )
}

/// Applies the operator matrix `∂` on the left of a function matrix:
/// `(∂ M)_{ik} = Σ_j ∂_{ji} M_{jk}`, where `∂` has `∂_{ji}` at `(i, j)`.
pub fn del_times(m: &Mat2<LaurentElement>) -> Mat2<LaurentElement> {
    Mat2::from_fn(|i, k| {
        (0..2).map(|j| m.get(j, k).partial(Var::from_ij(j, i))).fold(LaurentElement::zero(), |a, b| a + b)
    })
}

/// Same with `∂^+ = [[∂22, -∂21], [-∂12, ∂11]]`.
pub fn del_plus_times(m: &Mat2<LaurentElement>) -> Mat2<LaurentElement> {
    let ops = [[(Var::Z22, 1), (Var::Z21, -1)], [(Var::Z12, -1), (Var::Z11, 1)]];
    Mat2::from_fn(|i, k| {
        (0..2)
            .map(|j| {
                let (v, s) = ops[i][j];
                m.get(j, k).partial(v).scale(&GaussianRational::from_int(s))
            })
            .fold(LaurentElement::zero(), |a, b| a + b)
    })
}
