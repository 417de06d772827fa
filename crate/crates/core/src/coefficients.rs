//! Matrix coefficients `τ^l_{n,m}` of the SU(1,1) discrete series (and the
//! SU(2) polynomials `t^l_{n,m}`), the basis `τ^l_{n,m} N^k` and its
//! component classification.
//!
//! All half-integers are stored doubled: `twol = 2l` and so on.

use std::fmt;

use num_bigint::BigInt;

use crate::error::IndexError;
use crate::laurent::LaurentElement;
use crate::scalar::{generalized_binomial, Field, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    Holomorphic,
    Antiholomorphic,
    Su2,
}

impl Series {
    pub fn as_str(self) -> &'static str {
        match self {
            Series::Holomorphic => "hol",
            Series::Antiholomorphic => "antihol",
            Series::Su2 => "su2",
        }
    }

    pub fn parse(s: &str) -> Option<Series> {
        match s {
            "hol" | "h" | "holomorphic" => Some(Series::Holomorphic),
            "antihol" | "a" | "antiholomorphic" => Some(Series::Antiholomorphic),
            "su2" => Some(Series::Su2),
            _ => None,
        }
    }
}

/// Identifies `τ^l_{n,m} N^k` (or `t^l_{n,m} N^k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffIndex {
    pub series: Series,
    pub twol: i32,
    pub twon: i32,
    pub twom: i32,
    pub k: i32,
}

impl fmt::Display for CoeffIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(2l={}, 2n={}, 2m={}, k={})", self.series.as_str(), self.twol, self.twon, self.twom, self.k)
    }
}

impl CoeffIndex {
    pub fn new(series: Series, twol: i32, twon: i32, twom: i32, k: i32) -> Result<Self, IndexError> {
        let idx = Self { series, twol, twon, twom, k };
        idx.validate()?;
        Ok(idx)
    }

    pub fn hol(twol: i32, twon: i32, twom: i32, k: i32) -> Result<Self, IndexError> {
        Self::new(Series::Holomorphic, twol, twon, twom, k)
    }

    pub fn antihol(twol: i32, twon: i32, twom: i32, k: i32) -> Result<Self, IndexError> {
        Self::new(Series::Antiholomorphic, twol, twon, twom, k)
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        let Self { series, twol, twon, twom, .. } = *self;
        let parity = (twon - twol).rem_euclid(2) == 0 && (twom - twol).rem_euclid(2) == 0;
        let ok = parity
            && match series {
                Series::Holomorphic => twol <= -2 && twon >= -twol && twom >= -twol,
                Series::Antiholomorphic => twol <= -2 && twon <= twol && twom <= twol,
                Series::Su2 => twol >= 0 && twon.abs() <= twol && twom.abs() <= twol,
            };
        if ok {
            Ok(())
        } else {
            Err(IndexError::Invalid(self.to_string()))
        }
    }

    pub fn with_k(self, k: i32) -> Self {
        Self { k, ..self }
    }

    /// `-1/(2l+1)`, the orthogonality constant of this index.
    pub fn orthogonality_value(&self) -> GaussianRational {
        GaussianRational::from_frac(-1, (self.twol + 1) as i64)
    }
}

/// The six irreducible components of `D^h ⊕ D^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentLabel {
    DhLess,
    Dminusminus,
    DhGreater,
    DaLess,
    Dplusplus,
    DaGreater,
}

impl ComponentLabel {
    pub const ALL: [ComponentLabel; 6] = [
        ComponentLabel::DhLess,
        ComponentLabel::Dminusminus,
        ComponentLabel::DhGreater,
        ComponentLabel::DaLess,
        ComponentLabel::Dplusplus,
        ComponentLabel::DaGreater,
    ];

    pub fn series(self) -> Series {
        match self {
            ComponentLabel::DhLess | ComponentLabel::Dminusminus | ComponentLabel::DhGreater => Series::Holomorphic,
            _ => Series::Antiholomorphic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentLabel::DhLess => "dh-less",
            ComponentLabel::Dminusminus => "dmm",
            ComponentLabel::DhGreater => "dh-greater",
            ComponentLabel::DaLess => "da-less",
            ComponentLabel::Dplusplus => "dpp",
            ComponentLabel::DaGreater => "da-greater",
        }
    }

    pub fn parse(s: &str) -> Option<ComponentLabel> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).or(match s {
            "dminusminus" => Some(ComponentLabel::Dminusminus),
            "dplusplus" => Some(ComponentLabel::Dplusplus),
            _ => None,
        })
    }

    /// Inclusive `k` range at the given `twol`; `None` means unbounded.
    pub fn k_range(self, twol: i32) -> (Option<i32>, Option<i32>) {
        match self {
            ComponentLabel::DhLess | ComponentLabel::DaLess => (None, Some(-1)),
            ComponentLabel::Dminusminus | ComponentLabel::Dplusplus => (Some(0), Some(-twol - 2)),
            ComponentLabel::DhGreater | ComponentLabel::DaGreater => (Some(-twol - 1), None),
        }
    }

    pub fn contains_k(self, twol: i32, k: i32) -> bool {
        let (lo, hi) = self.k_range(twol);
        lo.is_none_or(|lo| k >= lo) && hi.is_none_or(|hi| k <= hi)
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_component(idx: &CoeffIndex) -> Result<ComponentLabel, IndexError> {
    idx.validate()?;
    let candidates: &[ComponentLabel] = match idx.series {
        Series::Holomorphic => &ComponentLabel::ALL[..3],
        Series::Antiholomorphic => &ComponentLabel::ALL[3..],
        Series::Su2 => return Err(IndexError::Su2NotClassified),
    };
    Ok(*candidates.iter().find(|c| c.contains_k(idx.twol, idx.k)).expect("k ranges partition the integers"))
}

/// Sweep window for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Smallest (most negative) `2l` included.
    pub min_twol: i32,
    pub max_absk: i32,
    /// Largest distance of `m`, `n` from the band edge `∓l`.
    pub mn_offset: i32,
}

impl Bounds {
    pub fn new(min_twol: i32, max_absk: i32, mn_offset: i32) -> Self {
        Self { min_twol, max_absk, mn_offset }
    }

    /// Bounds that enumerate nothing.
    pub fn empty() -> Self {
        Self { min_twol: -1, max_absk: -1, mn_offset: -1 }
    }

    /// Allowed doubled `m`/`n` values for a series at `twol`, ascending.
    pub fn mn_values(&self, series: Series, twol: i32) -> Vec<i32> {
        if self.mn_offset < 0 {
            return Vec::new();
        }
        match series {
            Series::Holomorphic => (0..=self.mn_offset).map(|o| -twol + 2 * o).collect(),
            Series::Antiholomorphic => (0..=self.mn_offset).rev().map(|o| twol - 2 * o).collect(),
            Series::Su2 => (-twol..=twol).step_by(2).collect(),
        }
    }
}

/// All indices of `label` inside `bounds`, ordered by `2l` descending, then
/// `k`, `2n`, `2m` ascending.
pub fn enumerate_basis(label: ComponentLabel, bounds: &Bounds) -> Vec<CoeffIndex> {
    let series = label.series();
    let mut out = Vec::new();
    let mut twol = -2;
    while twol >= bounds.min_twol {
        for k in -bounds.max_absk..=bounds.max_absk {
            if !label.contains_k(twol, k) {
                continue;
            }
            let mn = bounds.mn_values(series, twol);
            for &twon in &mn {
                for &twom in &mn {
                    out.push(CoeffIndex { series, twol, twon, twom, k });
                }
            }
        }
        twol -= 1;
    }
    out
}

fn binom_term(acc: &mut Vec<([i32; 4], GaussianRational)>, c: BigInt, e: [i32; 4]) {
    if c != BigInt::from(0) {
        acc.push((e, GaussianRational::from_bigint(c)));
    }
}

/// `τ^l_{n,m}` (or `t^l_{n,m}`) as an exact rational function, from the
/// finite binomial sum of the coefficient extraction.
pub fn tau(series: Series, twol: i32, twon: i32, twom: i32) -> Result<LaurentElement, IndexError> {
    CoeffIndex { series, twol, twon, twom, k: 0 }.validate()?;
    let mut terms = Vec::new();
    match series {
        Series::Holomorphic => {
            // (s z11 + z21)^{l-m} (s z12 + z22)^{l+m} s^{n-l}: pole expanded
            // at infinity, l+m >= 0 and l-m < 0.
            let a = (twol + twom) / 2;
            let b = (twol - twom) / 2;
            let shift = (twon - twom) / 2;
            for p in 0..=a {
                let j = p + shift;
                if j < 0 {
                    continue;
                }
                let c = generalized_binomial(a as i64, p as u32) * generalized_binomial(b as i64, j as u32);
                binom_term(&mut terms, c, [(twol - twon) / 2 - p, p, j, a - p]);
            }
        }
        Series::Antiholomorphic | Series::Su2 => {
            let a = (twol + twom) / 2;
            let b = (twol - twom) / 2;
            let l_minus_n = (twol - twon) / 2;
            for j in 0..=b.min(l_minus_n) {
                let q = l_minus_n - j;
                let c = generalized_binomial(a as i64, q as u32) * generalized_binomial(b as i64, j as u32);
                binom_term(&mut terms, c, [j, q, b - j, a - q]);
            }
        }
    }
    Ok(LaurentElement::from_parts(terms, 0).expect("z12/z21 exponents are nonnegative"))
}

/// SU(2) coefficient `t^l_{n,m}`, `twol >= 0`.
pub fn t_su2(twol: i32, twon: i32, twom: i32) -> Result<LaurentElement, IndexError> {
    tau(Series::Su2, twol, twon, twom)
}

/// `τ^l_{n,m} N^k`.
pub fn basis_element(idx: &CoeffIndex) -> Result<LaurentElement, IndexError> {
    Ok(tau(idx.series, idx.twol, idx.twon, idx.twom)?.mul_n_pow(idx.k))
}

/// Constant `c` with `τ^l_{a,b}(Z^{-1}) = c · τ^l_{-b,-a}(Z) · N(Z)^{-2l}`.
pub fn conj_inverse_constant(series: Series, twol: i32, twoa: i32, twob: i32) -> Result<GaussianRational, IndexError> {
    let mirror = match series {
        Series::Holomorphic => Series::Antiholomorphic,
        Series::Antiholomorphic => Series::Holomorphic,
        Series::Su2 => Series::Su2,
    };
    let lhs = tau(series, twol, twoa, twob)?.inv_transform().mul_n_pow(1);
    let rhs = tau(mirror, twol, -twob, -twoa)?.mul_n_pow(-twol);
    lhs.ratio_constant(&rhs)
        .ok_or_else(|| IndexError::NotProportional(format!("{}(2l={twol}, {twoa}, {twob})", series.as_str())))
}

/// `τ^l_{n,m}(diag(λ1, λ2)) = δ_{nm} λ1^{l-n} λ2^{l+n}`.
pub fn tau_at_diagonal<F: Field>(twol: i32, twon: i32, twom: i32, l1: &F, l2: &F) -> F {
    if twon != twom {
        return F::zero();
    }
    l1.powi((twol - twon) / 2) * l2.powi((twol + twon) / 2)
}

/// Every h/a index `(2l, 2n, 2m, k)` whose basis element has torus weights
/// `(rw, cw)` and degree `deg`; these span the weight block exactly.
pub fn block_candidates(rw: i32, cw: i32, deg: i32) -> Vec<CoeffIndex> {
    let (twon, twom) = (-rw, -cw);
    let mut out = Vec::new();
    if (twon - twom).rem_euclid(2) != 0 {
        return out;
    }
    let push = |out: &mut Vec<CoeffIndex>, series, twol: i32| {
        if (deg - twol).rem_euclid(2) == 0 {
            out.push(CoeffIndex { series, twol, twon, twom, k: (deg - twol) / 2 });
        }
    };
    if twon >= 2 && twom >= 2 {
        let mut twol = -twon.min(twom);
        while twol <= -2 {
            push(&mut out, Series::Holomorphic, twol);
            twol += 2;
        }
    }
    if twon <= -2 && twom <= -2 {
        let mut twol = twon.max(twom);
        while twol <= -2 {
            push(&mut out, Series::Antiholomorphic, twol);
            twol += 2;
        }
    }
    out
}
