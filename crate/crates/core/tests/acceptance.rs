//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use splitquat::report::{Report, Row};
use splitquat::suites::{
    verify_decomposition, verify_kernels, verify_orthogonality, verify_projectors, verify_structure,
    DecompositionConfig, KernelSuiteConfig, OrthogonalityConfig, ProjectorSuiteConfig, StructureConfig,
};

struct Verdict {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Pass iff every row under the prefixes passes and the run met its budget.
fn judge(report: &Report, prefixes: &[&str], elapsed: Duration, budget: Option<Duration>) -> (bool, String) {
    let rows: Vec<&Row> = report.rows.iter().filter(|r| prefixes.iter().any(|p| r.check_id.starts_with(p))).collect();
    let failed: Vec<&Row> = rows.iter().copied().filter(|r| !r.pass).collect();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let mut detail = format!("{}/{} rows pass, {:.1}s", rows.len() - failed.len(), rows.len(), elapsed.as_secs_f64());
    if let Some(b) = budget {
        detail.push_str(&format!(" (budget {}s)", b.as_secs()));
    }
    let mut ids: Vec<&str> = failed.iter().map(|r| r.check_id.as_str()).collect();
    ids.dedup();
    if !ids.is_empty() {
        detail.push_str(&format!("; failing checks: {}", ids.join(", ")));
    }
    if let Some(r) = failed.first() {
        detail.push_str(&format!("; first: {} expected={} got={}", r.inputs, r.expected, r.got));
    }
    (!rows.is_empty() && failed.is_empty() && in_time, detail)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn main() {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    let mut verdicts = Vec::new();

    let (orth, t) = timed(|| verify_orthogonality(&OrthogonalityConfig::default()).expect("suite runs"));
    let (pass, detail) = judge(&orth, &["pairing.calibration", "pairing.orthogonality"], t, mins(5));
    verdicts.push(Verdict { id: 1, title: "orthogonality relations", pass, detail });

    let (dec, t) = timed(|| verify_decomposition(&DecompositionConfig::default()));
    let (pass, detail) = judge(&dec, &["decomposition.invariance", "decomposition.border"], t, mins(2));
    verdicts.push(Verdict { id: 2, title: "decomposition invariance and borders", pass, detail });

    let (ker, t) = timed(|| verify_kernels(&KernelSuiteConfig::default()));
    let (pass, detail) = judge(
        &ker,
        &[
            "kernels.series_vs_printed",
            "kernels.resummation.printed",
            "kernels.eigen_roundtrip",
            "kernels.regime_dichotomy",
        ],
        t,
        mins(5),
    );
    let (_, corrected) = judge(&ker, &["kernels.series_vs_closed", "kernels.resummation.closed"], t, None);
    verdicts.push(Verdict {
        id: 3,
        title: "kernel closed forms as printed",
        pass,
        detail: format!("{detail}; against the series-derived forms: {corrected}"),
    });
    let (pass, detail) = judge(&ker, &["kernels.addition_formula", "kernels.character"], t, None);
    verdicts.push(Verdict { id: 4, title: "addition formula and character collapse", pass, detail });

    let (proj, t) = timed(|| verify_projectors(&ProjectorSuiteConfig::default()));
    let (pass, detail) = judge(
        &proj,
        &["projectors.symbolic", "projectors.numeric.printed_kernel", "projectors.numeric.annihilate"],
        t,
        mins(15),
    );
    let (_, corrected) = judge(&proj, &["projectors.numeric.reproduce", "projectors.numeric.annihilate"], t, None);
    verdicts.push(Verdict {
        id: 5,
        title: "equivariant projectors with printed kernels",
        pass,
        detail: format!("{detail}; with the series-derived kernels: {corrected}"),
    });

    let (st, t) = timed(|| verify_structure(&StructureConfig::default()));
    let (pass, detail) = judge(&st, &["structure."], t, None);
    verdicts.push(Verdict { id: 6, title: "structural identities", pass, detail });

    println!();
    for v in &verdicts {
        println!("criterion {}: {} - {} [{}]", v.id, if v.pass { "PASS" } else { "FAIL" }, v.title, v.detail);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!("acceptance: {} of {} criteria pass", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
