//! Verification suites. Each produces a [`Report`] whose rows cite the
//! check they instantiate; failures are rows, never panics.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::coefficients::{basis_element, enumerate_basis, t_su2, tau, Bounds, CoeffIndex, ComponentLabel, Series};
use crate::error::{KernelError, PairingError};
use crate::kernels::{
    addition_formula_check, character_series, character_value, check_regime, closed_form_generic, construct_sample,
    eigen_split, kernel_at, kernel_series_direct, kernel_series_sum, point_to_floats, printed_closed_form,
    printed_form_generic, resummation_staged, resummation_value, su11_element, EigenPair, KernelCase, SemigroupLabel,
    Truncation,
};
use crate::laurent::{del_plus_times, del_times, LaurentElement};
use crate::lie_action::{
    check_arrows, check_invariance_with, elementary_generators, expand_auto, from_expansion, ladder_rebuilt_del,
    rho1_algebra, rho1_finite_difference, Block, CorruptedLadderAction, ExactAction, InvarianceReport,
};
use crate::matrix::{Mat2, PointHC};
use crate::pairing::{
    calibrate, dual_element, pair_exact, reference_pair, theta_degree_filter, PairingEngine, PreparedFn,
    QuadratureSpec, CALIBRATION,
};
use crate::projectors::{
    construct_probe, project_numeric_many, project_symbolic, representative, KernelForm, ProjectorConfig,
};
use crate::report::{CalibrationInfo, Report, Row};
use crate::scalar::{GaussianRational, Ring};

fn cfmt(z: Complex64) -> String {
    format!("{:.12e}{:+.12e}i", z.re, z.im)
}

fn spec_json(s: &QuadratureSpec) -> serde_json::Value {
    json!({"T": s.t_max, "nt": s.n_t, "nang": s.n_ang, "R": s.radius})
}

fn bounds_json(b: &Bounds) -> serde_json::Value {
    json!({"min_twol": b.min_twol, "max_absk": b.max_absk, "mn_offset": b.mn_offset})
}

fn all_indices(bounds: &Bounds) -> Vec<CoeffIndex> {
    let mut v: Vec<CoeffIndex> = ComponentLabel::ALL.iter().flat_map(|l| enumerate_basis(*l, bounds)).collect();
    v.sort();
    v
}

fn basis(idx: &CoeffIndex) -> LaurentElement {
    basis_element(idx).expect("enumerated indices are valid")
}

/// Mixes the suite seed with a stream number so that filtering one part of a
/// suite does not change the samples of another.
fn stream(seed: u64, n: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    rng
}

/// A random element with small exponents and coefficients.
pub fn random_element<R: Rng>(rng: &mut R) -> LaurentElement {
    let n = rng.gen_range(1..5);
    let terms: Vec<_> = (0..n)
        .map(|_| {
            let e = [rng.gen_range(-2..3), rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(-2..3)];
            let c =
                GaussianRational::from_parts((rng.gen_range(-5..6), rng.gen_range(1..4)), (rng.gen_range(-3..4), 1));
            (e, c)
        })
        .collect();
    LaurentElement::from_parts(terms, rng.gen_range(-2..3)).expect("nonnegative off-diagonal exponents")
}

// ---------------------------------------------------------------------------
// orthogonality

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityConfig {
    pub bounds: BoundsCfg,
    pub tol: f64,
    pub spec: QuadratureSpec,
    pub seed: u64,
}

/// Serializable mirror of [`Bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsCfg {
    pub min_twol: i32,
    pub max_absk: i32,
    pub mn_offset: i32,
}

impl From<BoundsCfg> for Bounds {
    fn from(b: BoundsCfg) -> Self {
        Bounds::new(b.min_twol, b.max_absk, b.mn_offset)
    }
}

impl Default for OrthogonalityConfig {
    fn default() -> Self {
        Self {
            bounds: BoundsCfg { min_twol: -4, max_absk: 2, mn_offset: 2 },
            tol: 1e-6,
            spec: QuadratureSpec::default(),
            seed: 42,
        }
    }
}

/// Tolerance of the invariance rows.
pub const PAIRING_INVARIANCE_TOL: f64 = 1e-5;

/// Sources and generator positions for the invariance rows. Their images
/// stay inside the dual families (no `2l = -2` duals).
const INVARIANCE_SAMPLES: [(Series, i32, i32, i32, i32, usize); 5] = [
    (Series::Holomorphic, -3, 3, 3, 1, 0),
    (Series::Holomorphic, -3, 3, 5, 0, 5),
    (Series::Antiholomorphic, -4, -4, -4, 1, 9),
    (Series::Holomorphic, -3, 3, 3, -1, 13),
    (Series::Antiholomorphic, -4, -4, -6, 2, 7),
];

pub fn verify_orthogonality(cfg: &OrthogonalityConfig) -> Result<Report, PairingError> {
    let bounds: Bounds = cfg.bounds.into();
    let mut report = Report::new(
        "verify-orthogonality",
        cfg.seed,
        json!({"bounds": bounds_json(&bounds), "tol": cfg.tol, "spec": spec_json(&cfg.spec)}),
    );
    let cal = calibrate(&cfg.spec)?;
    let fitted = Complex64::new(cal.factor_re, cal.factor_im);
    report.calibration = Some(CalibrationInfo {
        orientation_sign: cal.orientation_sign,
        constant: CALIBRATION,
        fitted_re: cal.factor_re,
        fitted_im: cal.factor_im,
    });
    report.push(Row::within(
        "pairing.calibration",
        json!({"reference": "hol(2l=-2, 2n=2, 2m=2, k=0)"}),
        CALIBRATION,
        cfmt(fitted),
        (fitted - CALIBRATION).norm(),
        cfg.tol,
    ));

    let idxs = all_indices(&bounds);
    let fs: Vec<LaurentElement> = idxs.iter().map(basis).collect();
    let ds: Vec<LaurentElement> = idxs.iter().map(dual_element).collect::<Result<_, _>>()?;
    let mut engine = PairingEngine::new(cfg.spec)?;
    let pf: Vec<PreparedFn> = fs.par_iter().map(|f| engine.prepare(f)).collect();
    let pd: Vec<PreparedFn> = ds.par_iter().map(|f| engine.prepare(f)).collect();
    let n = idxs.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| pf[i].meets(&pd[j])).collect();
    engine.ensure_moments(pairs.iter().map(|&(i, j)| (&pf[i], &pd[j])));
    let values: Vec<Complex64> = pairs.par_iter().map(|&(i, j)| engine.pair(&pf[i], &pd[j])).collect();

    let mut engine2 = PairingEngine::new(cfg.spec.with_t_max(2.0 * cfg.spec.t_max))?;
    let diag2: Vec<Complex64> = (0..n).map(|i| engine2.pair_functions(&fs[i], &ds[i])).collect();
    let exact: Vec<GaussianRational> =
        (0..n).into_par_iter().map(|i| pair_exact(&fs[i], &ds[i])).collect::<Result<_, _>>()?;

    let mut worst = vec![(0.0f64, 0usize); n];
    let mut met = vec![0usize; n];
    for (&(i, j), v) in pairs.iter().zip(&values) {
        met[i] += 1;
        if i == j {
            let want = idxs[i].orthogonality_value();
            let err = (v - want.to_complex()).norm();
            let change = (diag2[i] - v).norm();
            report.push(Row::new(
                "pairing.orthogonality.dual",
                json!({"index": idxs[i].to_string(), "exact": exact[i].to_string(), "t_doubling_change": change}),
                &want,
                cfmt(*v),
                Some(err),
                err <= cfg.tol && exact[i] == want && change <= cfg.tol,
            ));
        } else if v.norm() >= worst[i].0 {
            worst[i] = (v.norm(), j);
        }
    }
    for i in 0..n {
        let quad = met[i] - 1;
        report.push(Row::within(
            "pairing.orthogonality.mismatch",
            json!({
                "index": idxs[i].to_string(),
                "quadrature_pairs": quad,
                "theta_zero_pairs": n - met[i],
                "worst_partner": if quad > 0 { idxs[worst[i].1].to_string() } else { String::new() },
            }),
            "0",
            format!("{:.3e}", worst[i].0),
            worst[i].0,
            cfg.tol,
        ));
    }

    // θ selection: a seeded sample of the skipped pairs must have no degree -4 slice
    let mut rng = stream(cfg.seed, 1);
    let mut checked = 0usize;
    let mut nonzero = 0usize;
    for _ in 0..60 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if pf[i].meets(&pd[j]) {
            continue;
        }
        checked += 1;
        if !theta_degree_filter(&(&fs[i] * &ds[j])).is_zero() {
            nonzero += 1;
        }
    }
    report.push(Row::exact("pairing.theta_selection", json!({"pairs_checked": checked}), 0, nonzero));

    report.push(t_tail_row(&cfg.spec, &idxs)?);

    for r in [0.5, 2.0] {
        let (f1, f2) = reference_pair();
        let v = PairingEngine::new(QuadratureSpec { radius: r, ..cfg.spec })?.pair_functions(&f1, &f2);
        report.push(Row::within(
            "pairing.radius_independence",
            json!({"R": r}),
            "1",
            cfmt(v),
            (v - 1.0).norm(),
            cfg.tol,
        ));
    }

    let gens = elementary_generators();
    for (series, twol, twon, twom, k, g) in INVARIANCE_SAMPLES {
        let i1 = CoeffIndex::new(series, twol, twon, twom, k).expect("valid sample");
        let x = &gens[g].element;
        let f1 = basis(&i1);
        let xf1 = rho1_algebra(x, &f1);
        let Some(i2) = expand_auto(&xf1).ok().and_then(|t| t.first().map(|p| p.0)) else {
            report.push(Row::new(
                "pairing.invariance",
                json!({"source": i1.to_string(), "generator": gens[g].label}),
                "image in the basis",
                "image leaves D^h+D^a",
                None,
                false,
            ));
            continue;
        };
        let f2 = dual_element(&i2)?;
        let xf2 = rho1_algebra(x, &f2);
        let ex = match (pair_exact(&xf1, &f2), pair_exact(&f1, &xf2)) {
            (Ok(a), Ok(b)) => Some(&a + &b),
            _ => None,
        };
        let num = engine.pair_functions(&xf1, &f2) + engine.pair_functions(&f1, &xf2);
        report.push(Row::new(
            "pairing.invariance",
            json!({
                "source": i1.to_string(),
                "generator": gens[g].label,
                "dual": i2.to_string(),
                "exact_sum": ex.as_ref().map(|e| e.to_string()),
            }),
            "0",
            cfmt(num),
            Some(num.norm()),
            num.norm() <= PAIRING_INVARIANCE_TOL && ex.is_some_and(|e| e.is_zero()),
        ));
    }
    Ok(report.finish())
}

/// Ratio test of the `t` tail: distance to a `4T` reference for a ladder of
/// smaller `T`, on the most slowly decaying dual pair of the window.
fn t_tail_row(spec: &QuadratureSpec, idxs: &[CoeffIndex]) -> Result<Row, PairingError> {
    let idx = idxs.iter().copied().max_by_key(|i| (i.twol, -i.k.abs())).expect("nonempty window");
    let (f1, f2) = (basis(&idx), dual_element(&idx)?);
    let at = |t: f64| -> Result<Complex64, PairingError> {
        Ok(PairingEngine::new(spec.with_t_max(t))?.pair_functions(&f1, &f2))
    };
    let reference = at(4.0 * spec.t_max)?;
    let ts = [2.0, 4.0, 8.0, 16.0];
    let tails: Vec<f64> = ts.iter().map(|&t| at(t).map(|v| (v - reference).norm())).collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = tails.windows(2).map(|w| w[1] / w[0]).collect();
    // a tail already at rounding level carries no information
    let decaying = tails.windows(2).all(|w| w[1] <= 0.5 * w[0] || w[1] < 1e-13);
    Ok(Row::new(
        "pairing.t_tail",
        json!({"index": idx.to_string(), "T": ts, "tails": tails, "ratios": ratios}),
        "exponential decay",
        if decaying { "exponential decay" } else { "no decay" },
        None,
        decaying,
    ))
}

// ---------------------------------------------------------------------------
// decomposition

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionConfig {
    pub bounds: BoundsCfg,
    /// Runs the invariance sweep with a deliberately wrong ladder prefactor.
    pub corrupt_fixture: bool,
    pub seed: u64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self { bounds: BoundsCfg { min_twol: -6, max_absk: 4, mn_offset: 1 }, corrupt_fixture: false, seed: 42 }
    }
}

/// The border statements: which block and arrow, the condition on the
/// source, and the target as a function of the source.
type Border = (&'static str, Block, fn(&CoeffIndex) -> bool, fn(&CoeffIndex) -> (i32, i32));
const BORDERS: [Border; 6] = [
    ("B.vertical:2l+k+1=0", Block::B, |i| i.twol + i.k + 1 == 0, |i| (i.twol - 1, i.k)),
    ("B.diagonal:k=0", Block::B, |i| i.k == 0, |i| (i.twol + 1, i.k - 1)),
    ("B.diagonal:l=-1", Block::B, |i| i.twol == -2, |i| (i.twol + 1, i.k - 1)),
    ("C.vertical:l=-1", Block::C, |i| i.twol == -2, |i| (i.twol + 1, i.k)),
    ("C.vertical:2l+k+2=0", Block::C, |i| i.twol + i.k + 2 == 0, |i| (i.twol + 1, i.k)),
    ("C.diagonal:k=-1", Block::C, |i| i.k == -1, |i| (i.twol - 1, i.k + 1)),
];

pub fn verify_decomposition(cfg: &DecompositionConfig) -> Report {
    let bounds: Bounds = cfg.bounds.into();
    let mut report = Report::new(
        "verify-decomposition",
        cfg.seed,
        json!({"bounds": bounds_json(&bounds), "corrupt_fixture": cfg.corrupt_fixture}),
    );
    let gens = elementary_generators();
    let reports: Vec<InvarianceReport> = ComponentLabel::ALL
        .iter()
        .map(|&label| {
            if cfg.corrupt_fixture {
                check_invariance_with(label, &bounds, &gens, &CorruptedLadderAction)
            } else {
                check_invariance_with(label, &bounds, &gens, &ExactAction)
            }
        })
        .collect();
    if cfg.corrupt_fixture {
        report.notes.push("corrupted fixture: B-block diagonal prefactor replaced by (k+1)/(2l+1)".to_string());
    }
    for r in &reports {
        report.push(Row::new(
            "decomposition.invariance",
            json!({"component": r.component, "checked": r.checked}),
            "0 violations",
            format!("{} violations", r.violations.len()),
            None,
            r.violations.is_empty(),
        ));
        for v in &r.violations {
            report.push(Row::new(
                "decomposition.invariance.violation",
                json!({"component": r.component, "source": v.source, "generator": v.generator}),
                "image stays in the component",
                &v.detail,
                None,
                false,
            ));
        }
    }
    report.details = serde_json::to_value(&reports).expect("serializable");

    let idxs = all_indices(&bounds);
    let arrows: Vec<_> =
        idxs.par_iter().flat_map_iter(|i| [Block::B, Block::C].map(|b| (*i, check_arrows(i, b)))).collect();
    for (_, a) in &arrows {
        report.push(Row::new(
            "decomposition.arrows",
            json!({"source": a.source, "block": format!("{:?}", a.block)}),
            format!("{:?}", a.predicted),
            format!("{:?}", a.observed),
            None,
            a.pass,
        ));
    }
    for (name, block, applies, target) in BORDERS {
        for (i, a) in arrows.iter().filter(|(i, a)| a.block == block && applies(i)) {
            let t = target(i);
            let present = a.observed.contains(&t);
            report.push(Row::exact(
                "decomposition.border",
                json!({"border": name, "source": i.to_string(), "target": [t.0, t.1]}),
                "absent",
                if present { "present" } else { "absent" },
            ));
        }
    }
    let ladder_ok: Vec<(CoeffIndex, bool)> =
        idxs.par_iter().map(|i| (*i, ladder_rebuilt_del(i, i.k as i64) == basis(i).matrix_del())).collect();
    let bad: Vec<String> = ladder_ok.iter().filter(|(_, ok)| !ok).map(|(i, _)| i.to_string()).collect();
    report.push(Row::new(
        "decomposition.ladder_identity",
        json!({"sources": ladder_ok.len(), "failing": bad}),
        "0 mismatches",
        format!("{} mismatches", bad.len()),
        None,
        bad.is_empty(),
    ));
    report.finish()
}

// ---------------------------------------------------------------------------
// kernels

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSuiteConfig {
    pub cases: Vec<KernelCase>,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub trunc: Truncation,
    pub max_doublings: u32,
    /// Rational samples per case for the exact resummation rows.
    pub exact_samples: usize,
}

impl Default for KernelSuiteConfig {
    fn default() -> Self {
        Self {
            cases: KernelCase::ALL.to_vec(),
            samples: 5,
            tol: 1e-6,
            seed: 42,
            trunc: Truncation::default(),
            max_doublings: 2,
            exact_samples: 3,
        }
    }
}

pub const ADDITION_TOL: f64 = 1e-8;
pub const ADDITION_M: i32 = 40;
pub const CHARACTER_TOL: f64 = 1e-10;
pub const CHARACTER_TERMS: usize = 60;
pub const EIGEN_ROUNDTRIP_TOL: f64 = 1e-10;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn eig_err(a: &EigenPair, b: &EigenPair) -> f64 {
    (a.lambda1 - b.lambda1).norm().max((a.lambda2 - b.lambda2).norm())
}

/// The two cases sharing a semigroup and differing in `|N|`.
fn dichotomy_pair(label: SemigroupLabel) -> [KernelCase; 2] {
    match label {
        SemigroupLabel::GammaPlus => [KernelCase::DaLess, KernelCase::DaGreater],
        _ => [KernelCase::DhLess, KernelCase::DhGreater],
    }
}

fn random_rational<R: Rng>(rng: &mut R, modulus: (f64, f64)) -> GaussianRational {
    loop {
        let (a, b) = (rng.gen_range(-32..33), rng.gen_range(-32..33));
        let m = ((a * a + b * b) as f64).sqrt() / 8.0;
        if m >= modulus.0 && m <= modulus.1 {
            return GaussianRational::from_parts((a, 8), (b, 8));
        }
    }
}

/// Rational eigenvalues in the case's regime, moduli and `|λ1 λ2|` at least
/// 0.2 from 1.
fn rational_eig<R: Rng>(case: KernelCase, rng: &mut R) -> (GaussianRational, GaussianRational) {
    loop {
        let lead = random_rational(rng, (1.25, 4.0));
        let other = random_rational(rng, (0.125, 0.8));
        let (l1, l2) = match case.semigroup() {
            SemigroupLabel::GammaPlus => (other, lead),
            _ => (lead, other),
        };
        let eig = EigenPair::new(l1.to_complex(), l2.to_complex());
        let nu = eig.product().norm();
        if (nu - 1.0).abs() >= 0.2 && check_regime(case, &eig).is_ok() {
            return (l1, l2);
        }
    }
}

fn floats(p: &PointHC) -> serde_json::Value {
    json!(point_to_floats(p))
}

pub fn verify_kernels(cfg: &KernelSuiteConfig) -> Report {
    let mut report = Report::new(
        "verify-kernels",
        cfg.seed,
        json!({
            "cases": cfg.cases.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
            "samples": cfg.samples,
            "tol": cfg.tol,
            "trunc": cfg.trunc,
            "max_doublings": cfg.max_doublings,
            "exact_samples": cfg.exact_samples,
        }),
    );
    let mut details = Vec::new();
    for &case in &cfg.cases {
        let mut rng = stream(cfg.seed, 100 + case as u64);
        for s in 0..cfg.samples {
            let sample = construct_sample(case, &mut rng);
            details.push(serde_json::to_value(&sample).expect("serializable"));
            report.extend(kernel_sample_rows(cfg, case, s, &sample.z, &sample.w, &sample.eig, &mut rng));
        }
        let mut rng = stream(cfg.seed, 200 + case as u64);
        for s in 0..cfg.exact_samples {
            report.extend(exact_rows(case, s, &mut rng));
        }
    }
    report.details = json!({ "samples": details });
    report.extend(kernel_example_rows(cfg));
    report.extend(collapse_rows(cfg.seed));
    report.finish()
}

fn kernel_sample_rows(
    cfg: &KernelSuiteConfig,
    case: KernelCase,
    s: usize,
    z: &PointHC,
    w: &PointHC,
    eig: &EigenPair,
    rng: &mut ChaCha8Rng,
) -> Vec<Row> {
    let mut rows = Vec::new();
    let inputs = json!({"case": case.as_str(), "sample": s, "z": floats(z), "w": floats(w)});
    let split = z.invert().map(|zi| eigen_split(&(w * &zi)));
    let got_eig = split.as_ref().ok().and_then(|x| x.eig.map(|e| (e, x.label)));
    let (err, label_ok) = match &got_eig {
        Some((e, l)) => (eig_err(e, eig), *l == case.semigroup()),
        None => (f64::INFINITY, false),
    };
    rows.push(Row::new(
        "kernels.eigen_roundtrip",
        inputs.clone(),
        format!("{} {} {}", cfmt(eig.lambda1), cfmt(eig.lambda2), case.semigroup()),
        got_eig.map(|(e, l)| format!("{} {} {l}", cfmt(e.lambda1), cfmt(e.lambda2))).unwrap_or("none".into()),
        Some(err),
        err <= EIGEN_ROUNDTRIP_TOL && label_ok,
    ));
    let applies: Vec<&str> = dichotomy_pair(case.semigroup())
        .into_iter()
        .filter(|c| check_regime(*c, eig).is_ok())
        .map(|c| c.as_str())
        .collect();
    rows.push(Row::new(
        "kernels.regime_dichotomy",
        inputs.clone(),
        "exactly one",
        format!("{applies:?}"),
        None,
        applies.len() == 1 && check_regime(case, eig).is_ok(),
    ));
    let series = kernel_series_direct(case, z, w, cfg.trunc, cfg.tol, cfg.max_doublings);
    let nz = z.norm();
    for (id, closed) in [
        ("kernels.series_vs_closed", kernel_at(case, z, w)),
        ("kernels.series_vs_printed", printed_closed_form(case, eig, nz)),
    ] {
        let row = match (&series, closed) {
            (Ok(out), Ok(c)) => {
                let mut inp = inputs.clone();
                inp["truncation"] = json!(out.truncation);
                inp["doubling_change"] = json!(out.change);
                let e = rel(out.value(), c);
                Row::new(id, inp, cfmt(c), cfmt(out.value()), Some(e), e <= cfg.tol && !out.stagnated)
            }
            (a, b) => Row::new(
                id,
                inputs.clone(),
                format!("{b:?}"),
                format!("{:?}", a.as_ref().map(|o| o.value())),
                None,
                false,
            ),
        };
        rows.push(row);
    }
    if s == 0 {
        // right translation by SU(1,1) leaves the eigenvalues of WZ^{-1} and N(Z) unchanged
        let g = su11_element(rng.gen_range(0.0..TAU), rng.gen_range(0.0..0.8), rng.gen_range(0.0..TAU));
        let (zg, wg) = (z * &g, w * &g);
        let (a, b) = (kernel_series_sum(case, z, w, cfg.trunc), kernel_series_sum(case, &zg, &wg, cfg.trunc));
        let row = match (a, b) {
            (Ok(a), Ok(b)) => {
                let e = rel(b, a);
                Row::within(
                    "kernels.biinvariance",
                    json!({"case": case.as_str(), "g": floats(&g)}),
                    cfmt(a),
                    cfmt(b),
                    e,
                    cfg.tol,
                )
            }
            (a, b) => Row::new(
                "kernels.biinvariance",
                json!({"case": case.as_str()}),
                format!("{a:?}"),
                format!("{b:?}"),
                None,
                false,
            ),
        };
        rows.push(row);
    }
    rows
}

fn exact_rows(case: KernelCase, s: usize, rng: &mut ChaCha8Rng) -> Vec<Row> {
    let (l1, l2) = rational_eig(case, rng);
    let nz = random_rational(rng, (0.5, 2.0));
    let inputs =
        json!({"case": case.as_str(), "sample": s, "l1": l1.to_string(), "l2": l2.to_string(), "nz": nz.to_string()});
    let staged = resummation_staged(case, &l1, &l2, &nz);
    let shown = |x: &Option<GaussianRational>| x.as_ref().map_or("undefined".to_string(), |v| v.to_string());
    let mut rows = vec![
        Row::exact(
            "kernels.resummation.closed",
            inputs.clone(),
            closed_form_generic(case, &l1, &l2, &nz),
            shown(&staged),
        ),
        Row::exact(
            "kernels.resummation.printed",
            inputs.clone(),
            printed_form_generic(case, &l1, &l2, &nz),
            shown(&staged),
        ),
    ];
    let mirror = match case {
        KernelCase::DaLess => Some(KernelCase::DhLess),
        KernelCase::DaGreater => Some(KernelCase::DhGreater),
        _ => None,
    };
    if let Some(m) = mirror {
        rows.push(Row::exact(
            "kernels.swap_symmetry.closed",
            inputs.clone(),
            closed_form_generic(m, &l2, &l1, &nz),
            closed_form_generic(case, &l1, &l2, &nz),
        ));
        rows.push(Row::exact(
            "kernels.swap_symmetry.printed",
            inputs,
            printed_form_generic(m, &l2, &l1, &nz),
            printed_form_generic(case, &l1, &l2, &nz),
        ));
    }
    rows
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn kernel_example_rows(cfg: &KernelSuiteConfig) -> Vec<Row> {
    let mut rows = Vec::new();
    let ex = |l1: f64, l2: f64| -> (PointHC, PointHC, EigenPair) {
        (PointHC::identity(), PointHC::diag(c(l1), c(l2)), EigenPair::real(l1, l2))
    };
    // (case, eigenvalues, value as printed)
    for (case, l1, l2, printed) in [(KernelCase::DhLess, 3.0, 0.5, 0.6), (KernelCase::DhGreater, 2.0, 1.0 / 3.0, -1.35)]
    {
        if !cfg.cases.contains(&case) {
            continue;
        }
        let (z, w, eig) = ex(l1, l2);
        let inputs = json!({"case": case.as_str(), "l1": l1, "l2": l2, "nz": 1});
        if let Ok(v) = printed_closed_form(case, &eig, c(1.0)) {
            let e = (v - printed).norm();
            rows.push(Row::within("kernels.example.printed_value", inputs.clone(), printed, cfmt(v), e, 1e-12));
        }
        if let Ok(out) = kernel_series_direct(case, &z, &w, cfg.trunc, cfg.tol, cfg.max_doublings) {
            let e = rel(out.value(), c(printed));
            rows.push(Row::within("kernels.example.series", inputs, printed, cfmt(out.value()), e, cfg.tol));
        }
    }
    if cfg.cases.contains(&KernelCase::Dmm) {
        let z = PointHC::scalar(c(2.0));
        let w = PointHC::diag(c(0.5), c(1.0 / 3.0));
        let want = c(1.0) / (&z - &w).norm().powi(2);
        if let Ok(out) = kernel_series_direct(KernelCase::Dmm, &z, &w, cfg.trunc, 1e-8, cfg.max_doublings) {
            let e = rel(out.value(), want);
            rows.push(Row::within(
                "kernels.example.series",
                json!({"case": "dmm", "z": floats(&z), "w": floats(&w)}),
                cfmt(want),
                cfmt(out.value()),
                e,
                1e-8,
            ));
        }
    }
    let boundary = resummation_value(KernelCase::DhLess, &EigenPair::real(2.0, 0.5), c(1.0));
    rows.push(Row::exact(
        "kernels.resummation.boundary",
        json!({"case": "dh-less", "l1": 2.0, "l2": 0.5}),
        format!("{:?}", Err::<Complex64, _>(KernelError::Boundary)),
        format!("{boundary:?}"),
    ));
    rows
}

/// Addition-formula and character rows for `2l = -2, -3, -4`.
fn collapse_rows(seed: u64) -> Vec<Row> {
    let mut rows = Vec::new();
    let mut rng = stream(seed, 300);
    for twol in [-2, -3, -4] {
        for (series, case) in [(Series::Holomorphic, KernelCase::DhLess), (Series::Antiholomorphic, KernelCase::DaLess)]
        {
            let mut points = Vec::new();
            if series == Series::Holomorphic {
                let a1 = su11_element(0.0, 1.0, 0.0);
                points.push((PointHC::identity(), &PointHC::diag(c(2.0), c(1.0 / 3.0)) * &a1));
            }
            let smp = construct_sample(case, &mut rng);
            points.push((smp.z, smp.w));
            let edge = match series {
                Series::Holomorphic => -twol,
                _ => twol,
            };
            let step = if series == Series::Holomorphic { 2 } else { -2 };
            for (z, w) in &points {
                for twon in [edge, edge + step, edge + 2 * step] {
                    let inputs = json!({
                        "series": series.as_str(), "twol": twol, "twon": twon, "M": ADDITION_M,
                        "z": floats(z), "w": floats(w),
                    });
                    let row = match addition_formula_check(series, twol, twon, w, z, ADDITION_M) {
                        Ok((lhs, rhs)) => {
                            let e = (lhs - rhs).norm() / rhs.norm().max(1.0);
                            Row::within("kernels.addition_formula", inputs, cfmt(rhs), cfmt(lhs), e, ADDITION_TOL)
                        }
                        Err(e) => Row::new("kernels.addition_formula", inputs, "value", e.to_string(), None, false),
                    };
                    rows.push(row);
                }
            }
        }
        let lead = Complex64::from_polar(rng.gen_range(2.0..3.0), rng.gen_range(-PI..PI));
        let other = Complex64::from_polar(rng.gen_range(0.2..0.4), rng.gen_range(-PI..PI));
        for (label, eig) in [
            (SemigroupLabel::GammaMinus, EigenPair::real(2.0, 1.0 / 3.0)),
            (SemigroupLabel::GammaPlus, EigenPair::real(1.0 / 3.0, 2.0)),
            (SemigroupLabel::GammaMinus, EigenPair::new(lead, other)),
            (SemigroupLabel::GammaPlus, EigenPair::new(other, lead)),
        ] {
            let inputs = json!({
                "twol": twol, "label": label.to_string(), "terms": CHARACTER_TERMS,
                "l1": [eig.lambda1.re, eig.lambda1.im], "l2": [eig.lambda2.re, eig.lambda2.im],
            });
            let got = character_series(twol, &eig, label, CHARACTER_TERMS);
            let row = match character_value(twol, &eig, label) {
                Ok(want) => {
                    let e = (got - want).norm() / want.norm().max(1.0);
                    Row::within("kernels.character", inputs, cfmt(want), cfmt(got), e, CHARACTER_TOL)
                }
                Err(e) => Row::new("kernels.character", inputs, e.to_string(), cfmt(got), None, false),
            };
            rows.push(row);
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// projectors

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectorSuiteConfig {
    pub radius: f64,
    pub tol: f64,
    pub seed: u64,
    pub spec: QuadratureSpec,
    /// Symbolic sweep window.
    pub bounds: BoundsCfg,
    pub probes: usize,
    /// Random linear combinations added to the symbolic sweep.
    pub combinations: usize,
    pub check_t_doubling: bool,
}

impl Default for ProjectorSuiteConfig {
    fn default() -> Self {
        let radius = 1.0;
        Self {
            radius,
            tol: 1e-4,
            seed: 42,
            spec: ProjectorConfig::new(KernelCase::Dmm, radius).spec,
            bounds: BoundsCfg { min_twol: -3, max_absk: 2, mn_offset: 1 },
            probes: 3,
            combinations: 3,
            check_t_doubling: true,
        }
    }
}

/// Generator positions for the equivariance rows: one per block plus a
/// second A-block unit.
pub const EQUIVARIANCE_GENERATORS: [usize; 5] = [0, 5, 11, 14, 3];

pub fn verify_projectors(cfg: &ProjectorSuiteConfig) -> Report {
    let bounds: Bounds = cfg.bounds.into();
    let spec = QuadratureSpec { radius: cfg.radius, ..cfg.spec };
    let mut report = Report::new(
        "verify-projectors",
        cfg.seed,
        json!({
            "R": cfg.radius, "tol": cfg.tol, "spec": spec_json(&spec), "bounds": bounds_json(&bounds),
            "probes": cfg.probes, "combinations": cfg.combinations, "check_t_doubling": cfg.check_t_doubling,
        }),
    );
    report.extend(symbolic_rows(cfg, &bounds));
    report.extend(numeric_rows(cfg, &spec));
    report.extend(r_scaling_rows(cfg, &spec));
    report.finish()
}

fn sweep_functions(cfg: &ProjectorSuiteConfig, bounds: &Bounds) -> Vec<(String, LaurentElement)> {
    let idxs = all_indices(bounds);
    let mut out: Vec<(String, LaurentElement)> = idxs.iter().map(|i| (i.to_string(), basis(i))).collect();
    let mut rng = stream(cfg.seed, 400);
    for c in 0..cfg.combinations {
        let terms: Vec<(CoeffIndex, GaussianRational)> = (0..8)
            .map(|_| {
                let i = idxs[rng.gen_range(0..idxs.len())];
                (
                    i,
                    GaussianRational::from_parts(
                        (rng.gen_range(-4..5), rng.gen_range(1..4)),
                        (rng.gen_range(-2..3), 1),
                    ),
                )
            })
            .collect();
        out.push((format!("combination#{c}"), from_expansion(&terms)));
    }
    out
}

fn symbolic_rows(cfg: &ProjectorSuiteConfig, bounds: &Bounds) -> Vec<Row> {
    let fs = sweep_functions(cfg, bounds);
    let gens = elementary_generators();
    let labels = ComponentLabel::ALL;
    fs.par_iter()
        .flat_map_iter(|(name, f)| {
            let mut rows = Vec::new();
            let inputs = json!({"f": name});
            let parts: Vec<LaurentElement> =
                labels.iter().map(|l| project_symbolic(f, *l).expect("sweep is in the space")).collect();
            let idem =
                labels.iter().zip(&parts).filter(|(l, p)| project_symbolic(p, **l).ok().as_ref() != Some(*p)).count();
            rows.push(Row::exact("projectors.symbolic.idempotence", inputs.clone(), 0, idem));
            let mut cross = 0;
            for (a, la) in labels.iter().enumerate() {
                for (b, p) in parts.iter().enumerate() {
                    if a != b && !project_symbolic(p, *la).map(|x| x.is_zero()).unwrap_or(false) {
                        cross += 1;
                    }
                }
            }
            rows.push(Row::exact("projectors.symbolic.orthogonality", inputs.clone(), 0, cross));
            let total = parts.iter().fold(LaurentElement::zero(), |a, p| &a + p);
            rows.push(Row::exact(
                "projectors.symbolic.completeness",
                inputs,
                "f",
                if &total == f { "f" } else { "differs" },
            ));
            for &g in &EQUIVARIANCE_GENERATORS {
                let x = &gens[g].element;
                let image = rho1_algebra(x, f);
                let bad: Vec<&str> = labels
                    .iter()
                    .zip(&parts)
                    .filter(|(l, p)| project_symbolic(&image, **l).ok() != Some(rho1_algebra(x, p)))
                    .map(|(l, _)| l.as_str())
                    .collect();
                rows.push(Row::new(
                    "projectors.symbolic.equivariance",
                    json!({"f": name, "generator": gens[g].label}),
                    "[]",
                    format!("{bad:?}"),
                    None,
                    bad.is_empty(),
                ));
            }
            rows
        })
        .collect()
}

/// Numeric sweep: band-edge elements for `2l ∈ {-2, -3}`, `|k| <= 2`. The
/// six representatives are among them.
fn numeric_sweep() -> Vec<CoeffIndex> {
    all_indices(&Bounds::new(-3, 2, 0))
}

fn numeric_rows(cfg: &ProjectorSuiteConfig, spec: &QuadratureSpec) -> Vec<Row> {
    let idxs = numeric_sweep();
    let fs: Vec<LaurentElement> = idxs.iter().map(basis).collect();
    let reps: Vec<(ComponentLabel, CoeffIndex)> =
        ComponentLabel::ALL.iter().map(|l| (*l, representative(*l))).collect();
    let mut rows = Vec::new();
    for case in KernelCase::ALL {
        let own = case.component();
        let mut rng = stream(cfg.seed, 500 + case as u64);
        let probes: Vec<PointHC> = (0..cfg.probes).map(|_| construct_probe(case, cfg.radius, &mut rng)).collect();
        let pcfg = ProjectorConfig { case, radius: cfg.radius, spec: *spec, kernel: KernelForm::Corrected };
        let check_t = cfg.check_t_doubling && case == KernelCase::Dmm;
        match project_numeric_many(&fs, &pcfg, &probes, check_t) {
            Ok(out) => {
                for (i, idx) in idxs.iter().enumerate() {
                    let rep = reps.iter().find(|(_, r)| r == idx).map(|(l, _)| *l);
                    let id = match rep {
                        Some(l) if l == own => "projectors.numeric.reproduce",
                        Some(_) => "projectors.numeric.annihilate",
                        None => "projectors.numeric.sweep",
                    };
                    let expect = project_symbolic(&fs[i], own).expect("basis element");
                    for (j, w) in probes.iter().enumerate() {
                        let want = expect.evaluate(w).unwrap_or(c(f64::NAN));
                        let got = out.values[i][j];
                        let e = (got - want).norm();
                        rows.push(Row::within(
                            id,
                            json!({"case": case.as_str(), "f": idx.to_string(), "probe": j, "w": floats(w)}),
                            cfmt(want),
                            cfmt(got),
                            e,
                            cfg.tol,
                        ));
                    }
                }
                if let Some(d) = out.t_doubling_change {
                    rows.push(Row::within(
                        "projectors.numeric.t_doubling",
                        json!({"case": case.as_str(), "T": spec.t_max}),
                        "0",
                        format!("{d:.3e}"),
                        d,
                        cfg.tol,
                    ));
                }
            }
            Err(e) => rows.push(Row::new(
                "projectors.numeric.run",
                json!({"case": case.as_str()}),
                "ok",
                e.to_string(),
                None,
                false,
            )),
        }
        // the printed kernels, on the component's own representative
        let printed = ProjectorConfig { kernel: KernelForm::Printed, ..pcfg };
        let idx = representative(own);
        let f = basis(&idx);
        match project_numeric_many(std::slice::from_ref(&f), &printed, &probes, false) {
            Ok(out) => {
                for (j, w) in probes.iter().enumerate() {
                    let want = f.evaluate(w).unwrap_or(c(f64::NAN));
                    let got = out.values[0][j];
                    rows.push(Row::within(
                        "projectors.numeric.printed_kernel",
                        json!({"case": case.as_str(), "f": idx.to_string(), "probe": j, "w": floats(w)}),
                        cfmt(want),
                        cfmt(got),
                        (got - want).norm(),
                        cfg.tol,
                    ));
                }
            }
            Err(e) => rows.push(Row::new(
                "projectors.numeric.printed_kernel",
                json!({"case": case.as_str()}),
                "ok",
                e.to_string(),
                None,
                false,
            )),
        }
    }
    rows
}

/// `D^{--}` at radius `R` and `2R` with probes `W` and `2W`: the outputs
/// differ by `2^deg`.
fn r_scaling_rows(cfg: &ProjectorSuiteConfig, spec: &QuadratureSpec) -> Vec<Row> {
    let idx = CoeffIndex::hol(-3, 3, 3, 0).expect("valid");
    let f = basis(&idx);
    let deg = idx.twol + 2 * idx.k;
    let mut rng = stream(cfg.seed, 600);
    let w = construct_probe(KernelCase::Dmm, cfg.radius, &mut rng);
    let w2 = w.map(|x| x * 2.0);
    let r2 = 2.0 * cfg.radius;
    let a = project_numeric_many(
        std::slice::from_ref(&f),
        &ProjectorConfig { case: KernelCase::Dmm, radius: cfg.radius, spec: *spec, kernel: KernelForm::Corrected },
        std::slice::from_ref(&w),
        false,
    );
    let b = project_numeric_many(
        std::slice::from_ref(&f),
        &ProjectorConfig {
            case: KernelCase::Dmm,
            radius: r2,
            spec: QuadratureSpec { radius: r2, ..*spec },
            kernel: KernelForm::Corrected,
        },
        &[w2],
        false,
    );
    let inputs = json!({"f": idx.to_string(), "degree": deg, "R": [cfg.radius, r2], "w": floats(&w)});
    vec![match (a, b) {
        (Ok(a), Ok(b)) => {
            let (va, vb) = (a.values[0][0], b.values[0][0]);
            let want = va * 2f64.powi(deg);
            Row::within("projectors.r_scaling", inputs, cfmt(want), cfmt(vb), (vb - want).norm(), cfg.tol)
        }
        (a, b) => Row::new("projectors.r_scaling", inputs, "ok", format!("{:?} {:?}", a.err(), b.err()), None, false),
    }]
}

// ---------------------------------------------------------------------------
// structural identities

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureConfig {
    pub seed: u64,
    /// Random elements for the operator identities.
    pub samples: usize,
    pub fd_eps: f64,
    pub fd_tol: f64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        Self { seed: 42, samples: 20, fd_eps: 1e-4, fd_tol: 1e-6 }
    }
}

pub fn verify_structure(cfg: &StructureConfig) -> Report {
    let mut report = Report::new("verify-structure", cfg.seed, serde_json::to_value(cfg).expect("serializable"));
    let window = Bounds::new(-6, 0, 2);
    for series in [Series::Holomorphic, Series::Antiholomorphic] {
        let mut count = 0;
        let mut bad = Vec::new();
        for twol in window.min_twol..=-2 {
            let mns = window.mn_values(series, twol);
            for &n in &mns {
                for &m in &mns {
                    count += 1;
                    if !tau(series, twol, n, m).expect("valid").box_op().is_zero() {
                        bad.push(format!("({twol},{n},{m})"));
                    }
                }
            }
        }
        report.push(Row::exact(
            "structure.box_tau",
            json!({"series": series.as_str(), "checked": count, "failing": bad}),
            0,
            bad.len(),
        ));
    }
    let mut su2 = Vec::new();
    let mut count = 0;
    for twol in 0..=4 {
        for n in (-twol..=twol).step_by(2) {
            for m in (-twol..=twol).step_by(2) {
                count += 1;
                if !t_su2(twol, n, m).expect("valid").box_op().is_zero() {
                    su2.push(format!("({twol},{n},{m})"));
                }
            }
        }
    }
    report.push(Row::exact(
        "structure.box_tau",
        json!({"series": "su2", "checked": count, "failing": su2}),
        0,
        su2.len(),
    ));

    let mut rng = stream(cfg.seed, 700);
    for s in 0..cfg.samples {
        let f = random_element(&mut rng);
        let inputs = json!({"sample": s, "f": f.to_json()});
        let b = Mat2::scalar(f.box_op());
        let ok = del_times(&f.matrix_del_plus()) == b && del_plus_times(&f.matrix_del()) == b;
        report.push(Row::exact(
            "structure.del_del_plus",
            inputs.clone(),
            "box*I",
            if ok { "box*I" } else { "differs" },
        ));
        let back = f.inv_transform().inv_transform();
        report.push(Row::exact(
            "structure.inv_involution",
            inputs,
            "f",
            if back == f { "f".to_string() } else { back.to_string() },
        ));
    }

    let p = PointHC::new(
        Complex64::new(1.3, 0.2),
        Complex64::new(0.4, -0.3),
        Complex64::new(-0.2, 0.5),
        Complex64::new(0.9, -0.1),
    );
    let fs = [
        CoeffIndex::hol(-3, 3, 5, 1).expect("valid"),
        CoeffIndex::antihol(-2, -2, -4, -1).expect("valid"),
        CoeffIndex::hol(-4, 6, 4, 0).expect("valid"),
    ];
    for idx in fs {
        let f = basis(&idx);
        for g in elementary_generators() {
            let inputs = json!({"f": idx.to_string(), "generator": g.label, "eps": cfg.fd_eps, "p": floats(&p)});
            let exact = rho1_algebra(&g.element, &f).evaluate(&p);
            let fd = rho1_finite_difference(&g.element, &f, &p, cfg.fd_eps);
            let row = match (exact, fd) {
                (Ok(a), Ok(b)) => {
                    let e = (a - b).norm() / a.norm().max(1.0);
                    Row::within("structure.finite_difference", inputs, cfmt(a), cfmt(b), e, cfg.fd_tol)
                }
                (a, b) => {
                    Row::new("structure.finite_difference", inputs, format!("{a:?}"), format!("{b:?}"), None, false)
                }
            };
            report.push(row);
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_suite_passes() {
        let r = verify_structure(&StructureConfig { samples: 5, ..Default::default() });
        assert!(r.pass, "{}", r.to_text());
        assert!(r.rows_with_prefix("structure.finite_difference").count() == 48);
    }

    #[test]
    fn small_orthogonality_window_passes() {
        let cfg = OrthogonalityConfig {
            bounds: BoundsCfg { min_twol: -3, max_absk: 1, mn_offset: 1 },
            spec: QuadratureSpec { t_max: 40.0, n_t: 60, n_ang: 16, radius: 1.0 },
            ..Default::default()
        };
        let r = verify_orthogonality(&cfg).unwrap();
        assert!(r.pass, "{}", r.to_text());
        assert!(r.calibration.is_some());
        assert_eq!(r.rows_with_prefix("pairing.orthogonality.dual").count(), 48);
    }

    #[test]
    fn decomposition_rows_separate_the_leak_from_the_fixture() {
        let b = BoundsCfg { min_twol: -3, max_absk: 1, mn_offset: 0 };
        let r = verify_decomposition(&DecompositionConfig { bounds: b, ..Default::default() });
        let leak = |row: &Row| row.inputs["source"].as_str().is_some_and(|s| s.contains("2l=-2,"));
        assert!(r.rows_with_prefix("decomposition.border").filter(|x| !leak(x)).all(|x| x.pass));
        assert!(r.rows_with_prefix("decomposition.border").any(|x| !x.pass));
        assert!(r.rows_with_prefix("decomposition.ladder_identity").all(|x| x.pass));
        let bad = verify_decomposition(&DecompositionConfig { bounds: b, corrupt_fixture: true, ..Default::default() });
        let count = |x: &Report| x.rows_with_prefix("decomposition.invariance.violation").count();
        assert!(count(&bad) > count(&r));
    }

    #[test]
    fn kernel_suite_is_deterministic() {
        let cfg =
            KernelSuiteConfig { cases: vec![KernelCase::Dmm, KernelCase::DaLess], samples: 1, ..Default::default() };
        let a = verify_kernels(&cfg);
        assert!(a.pass, "{}", a.to_text());
        assert_eq!(a.to_json(), verify_kernels(&cfg).to_json());
        let cfg = KernelSuiteConfig {
            cases: vec![KernelCase::DhGreater],
            samples: 1,
            exact_samples: 1,
            ..Default::default()
        };
        let g = verify_kernels(&cfg);
        assert!(g.rows_with_prefix("kernels.series_vs_closed").all(|r| r.pass));
        assert!(g.rows_with_prefix("kernels.series_vs_printed").all(|r| !r.pass));
    }
}
