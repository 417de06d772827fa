//! Public-API checks against values computed by hand in each test.

use num_complex::Complex64;
use proptest::prelude::*;
use splitquat::coefficients::{basis_element, classify_component, CoeffIndex, ComponentLabel, Series};
use splitquat::kernels::{
    self, character_series, character_value, kernel_closed_form, kernel_series_direct, printed_closed_form, EigenPair,
    KernelCase, SemigroupLabel, Truncation,
};
use splitquat::laurent::LaurentElement;
use splitquat::matrix::PointHC;
use splitquat::pairing::{dual_element, pair_exact};
use splitquat::scalar::GaussianRational;

fn mono(e: [i32; 4], c: i64, k: i32) -> LaurentElement {
    LaurentElement::from_parts([(e, GaussianRational::from_int(c))], k).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn diag(a: f64, d: f64) -> PointHC {
    PointHC::new(c(a), c(0.0), c(0.0), c(d))
}

#[test]
fn residue_examples() {
    assert_eq!(basis_element(&CoeffIndex::hol(-2, 2, 2, 0).unwrap()).unwrap(), mono([-2, 0, 0, 0], 1, 0));
    assert_eq!(basis_element(&CoeffIndex::hol(-2, 2, 2, 1).unwrap()).unwrap(), mono([-2, 0, 0, 0], 1, 1));
    assert_eq!(basis_element(&CoeffIndex::antihol(-2, -2, -2, 0).unwrap()).unwrap(), mono([0, 0, 0, -2], 1, 0));
    assert_eq!(basis_element(&CoeffIndex::antihol(-2, -2, -2, -1).unwrap()).unwrap(), mono([0, 0, 0, -2], 1, -1));
    assert_eq!(basis_element(&CoeffIndex::hol(-2, 4, 2, 0).unwrap()).unwrap(), mono([-3, 0, 1, 0], -2, 0));
}

#[test]
fn diagonal_evaluation() {
    let f = basis_element(&CoeffIndex::hol(-2, 2, 2, 0).unwrap()).unwrap();
    assert!((f.evaluate(&diag(2.0, 0.5)).unwrap() - c(0.25)).norm() < 1e-15);
}

#[test]
fn component_labels() {
    let h = |twol, k| classify_component(&CoeffIndex::hol(twol, -twol, -twol, k).unwrap()).unwrap();
    assert_eq!(h(-2, 0), ComponentLabel::Dminusminus);
    assert_eq!(h(-2, -1), ComponentLabel::DhLess);
    assert_eq!(h(-2, 1), ComponentLabel::DhGreater);
    let a = classify_component(&CoeffIndex::antihol(-3, -3, -3, 2).unwrap()).unwrap();
    assert_eq!(a, ComponentLabel::DaGreater);
}

#[test]
fn orthogonality_values() {
    let pair = |idx: CoeffIndex| pair_exact(&basis_element(&idx).unwrap(), &dual_element(&idx).unwrap()).unwrap();
    assert_eq!(pair(CoeffIndex::hol(-2, 2, 2, 0).unwrap()), GaussianRational::from_int(1));
    assert_eq!(pair(CoeffIndex::hol(-3, 3, 3, 0).unwrap()), GaussianRational::from_frac(1, 2));
    let (a, b) = (CoeffIndex::hol(-2, 2, 2, 0).unwrap(), CoeffIndex::hol(-2, 4, 2, 0).unwrap());
    assert!(
        pair_exact(&basis_element(&a).unwrap(), &dual_element(&b).unwrap()).unwrap() == GaussianRational::from_int(0)
    );
}

#[test]
fn kernel_closed_form_arithmetic() {
    let v = kernel_closed_form(KernelCase::DhLess, &EigenPair::real(3.0, 0.5), c(1.0)).unwrap();
    assert!((v - c(-3.0 / (2.5 * -0.5 * 4.0))).norm() < 1e-12);
    let (l1, l2) = (2.0f64, 1.0 / 3.0);
    let printed = -l2 / ((l1 - l2) * (1.0 - l1 * l2) * (1.0 - l2).powi(2));
    let p = printed_closed_form(KernelCase::DhGreater, &EigenPair::real(l1, l2), c(1.0)).unwrap();
    assert!((p - c(printed)).norm() < 1e-12 && (printed + 1.35).abs() < 1e-12);
    let k = kernel_closed_form(KernelCase::DhGreater, &EigenPair::real(l1, l2), c(1.0)).unwrap();
    assert!((k + p).norm() < 1e-12);
}

#[test]
fn kernel_series_matches_hand_values() {
    let z = diag(1.0, 1.0);
    let s = kernel_series_direct(KernelCase::DhLess, &z, &diag(3.0, 0.5), Truncation::default(), 1e-6, 2).unwrap();
    assert!((s.value() - c(0.6)).norm() < 1e-6, "{}", s.value());
    let s = kernel_series_direct(KernelCase::DhGreater, &z, &diag(2.0, 1.0 / 3.0), Truncation::default(), 1e-6, 2);
    assert!((s.unwrap().value() - c(1.35)).norm() < 1e-6);
    let z2 = diag(2.0, 2.0);
    let s = kernel_series_direct(KernelCase::Dmm, &z2, &diag(4.0, 0.5), Truncation::default(), 1e-8, 2);
    let want = 1.0 / ((2.0 - 4.0) * (2.0 - 0.5f64)).powi(2);
    assert!((s.unwrap().value() - c(want)).norm() < 1e-8);
    // WZ^{-1} = diag(1/4, 1/6) has both moduli below 1, so it lies in neither semigroup.
    let s = kernel_series_direct(KernelCase::Dmm, &z2, &diag(0.5, 1.0 / 3.0), Truncation::default(), 1e-8, 2);
    assert!(matches!(s, Err(splitquat::KernelError::RegimeMismatch(_))));
}

#[test]
fn eigen_split_round_trip() {
    let g = kernels::su11_element(0.0, 1.0, 0.0);
    let gi = PointHC::new(g.z22, -g.z12, -g.z21, g.z11);
    let m = g.matmul(&diag(2.0, 1.0 / 3.0)).matmul(&gi);
    assert!(m.z12.norm() > 0.1);
    let s = kernels::eigen_split(&m);
    let e = s.eig.unwrap();
    assert!((e.lambda1 - c(2.0)).norm() < 1e-12 && (e.lambda2 - c(1.0 / 3.0)).norm() < 1e-12);
    assert_eq!(s.label, SemigroupLabel::GammaMinus);
}

#[test]
fn character_geometric_series() {
    let eig = EigenPair::real(2.0, 1.0 / 3.0);
    let v = character_value(-2, &eig, SemigroupLabel::GammaMinus).unwrap();
    assert!((v - c(0.5 / (5.0 / 3.0))).norm() < 1e-15);
    let geometric: f64 = (1..=60).map(|n| 2f64.powi(-1 - n) * (1.0 / 3.0f64).powi(n - 1)).sum();
    assert!((character_series(-2, &eig, SemigroupLabel::GammaMinus, 60) - c(geometric)).norm() < 1e-10);
    assert!((v - c(geometric)).norm() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_pairing_is_minus_inverse_of_2l_plus_1(
        hol in any::<bool>(), twol in -7i32..=-2, dn in 0i32..3, dm in 0i32..3, k in -3i32..=3,
    ) {
        let (twon, twom) = (-twol + 2 * dn, -twol + 2 * dm);
        let idx = if hol {
            CoeffIndex::new(Series::Holomorphic, twol, twon, twom, k)
        } else {
            CoeffIndex::new(Series::Antiholomorphic, twol, -twon, -twom, k)
        }
        .unwrap();
        let v = pair_exact(&basis_element(&idx).unwrap(), &dual_element(&idx).unwrap()).unwrap();
        prop_assert_eq!(v, GaussianRational::from_frac(-1, i64::from(twol + 1)));
    }
}
