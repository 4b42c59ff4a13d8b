mod common;

use common::*;
use floquet_core::linalg::sym_eigenvalues;
use floquet_core::pauli::bch::{effective_hamiltonian_terms, magnus_truncation};
use floquet_core::pauli::model::{build_h1, build_h2, convergence_ratio};
use floquet_core::{commutator, Error, ModelParams, Pauli, PauliOperator, PauliString};
use num_complex::Complex64;
use proptest::prelude::*;

fn params(n: usize) -> ModelParams {
    ModelParams::new(n, 0.5).unwrap()
}

#[test]
fn h1_coefficients_at_l8() {
    let h1 = build_h1(&params(8)).unwrap();
    assert_eq!(h1.len(), 16);
    for (s, c) in h1.terms() {
        let want = if s.z_mask().count_ones() == 1 { -0.5 } else { -0.25 };
        assert_eq!(c.re, want);
        assert_eq!(c.im, 0.0);
        assert!(s.is_diagonal());
    }
}

#[test]
fn h1_periodic_wrap_at_l2_doubles_bond() {
    let h1 = build_h1(&params(2)).unwrap();
    let zz = PauliString::from_letters("ZZ").unwrap();
    assert_eq!(h1.coefficient(&zz), Complex64::new(-0.5, 0.0));
}

#[test]
fn h2_terms() {
    let h2 = build_h2(&params(8)).unwrap();
    assert_eq!(h2.len(), 8);
    assert!(h2.terms().all(|(_, c)| *c == Complex64::new(-0.5, 0.0)));
    let p = params(8).with_couplings(1.0, 1.0, 0.0).unwrap();
    assert!(build_h2(&p).unwrap().is_empty());
}

#[test]
fn dense_h1_h2_match_kronecker_oracle() {
    let p = params(4).with_couplings(0.7, 1.3, 0.9).unwrap();
    let d1 = from_faer(&build_h1(&p).unwrap().to_dense().unwrap());
    let d2 = from_faer(&build_h2(&p).unwrap().to_dense().unwrap());
    assert!(max_diff(&d1, &h1(4, 0.7, 1.3)) < 1e-14);
    assert!(max_diff(&d2, &h2(4, 0.9)) < 1e-14);
    for i in 0..16 {
        for j in 0..16 {
            if i != j {
                assert_eq!(d1[(i, j)], Complex64::default());
            }
        }
    }
}

#[test]
fn commutator_matches_dense_oracle() {
    let p = params(4);
    let c = commutator(&build_h1(&p).unwrap(), &build_h2(&p).unwrap()).unwrap();
    let (a, b) = (h1(4, 1.0, 1.0), h2(4, 1.0));
    let want = &a * &b - &b * &a;
    assert!(max_diff(&from_faer(&c.to_dense().unwrap()), &want) < 1e-12);
}

#[test]
fn single_site_identities() {
    let z = PauliOperator::from_terms(1, [(PauliString::single(0, Pauli::Z), Complex64::new(1.0, 0.0))]).unwrap();
    let x = PauliOperator::from_terms(1, [(PauliString::single(0, Pauli::X), Complex64::new(1.0, 0.0))]).unwrap();
    let c = commutator(&z, &x).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(
        c.coefficient(&PauliString::single(0, Pauli::Y)),
        Complex64::new(0.0, 2.0)
    );
    let h1 = build_h1(&params(6)).unwrap();
    assert!(commutator(&h1, &h1).unwrap().is_empty());
}

#[test]
fn x1_dense_pattern_at_l2() {
    let x = PauliOperator::from_terms(2, [(PauliString::single(0, Pauli::X), Complex64::new(1.0, 0.0))]).unwrap();
    let d = x.to_dense().unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i ^ j == 1 { 1.0 } else { 0.0 };
            assert_eq!(d[(i, j)], Complex64::new(want, 0.0));
        }
    }
    let id = PauliOperator::identity(3).to_dense().unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(id[(i, j)].re, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn dense_guard() {
    let op = PauliOperator::identity(15);
    assert!(matches!(op.to_dense(), Err(Error::SizeGuard { .. })));
}

#[test]
fn norm_bounds_at_l8() {
    let p = params(8);
    let b1 = build_h1(&p).unwrap().spectral_norm_bound();
    let b2 = build_h2(&p).unwrap().spectral_norm_bound();
    assert_eq!(b2, 4.0);
    assert_eq!(b1, 6.0);
    let diag = build_h1(&p).unwrap().diagonal_values().unwrap();
    let exact = diag.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    assert!((exact - 6.0).abs() < 1e-14);
    assert!((diag[0] + 6.0).abs() < 1e-14);
    let r = convergence_ratio(&p).unwrap();
    assert!((r - 10.0 * 0.5 / std::f64::consts::PI).abs() < 1e-14);
}

#[test]
fn zeroth_order_is_h1_plus_h2() {
    let p = params(6);
    let h0 = magnus_truncation(&p, 0).unwrap();
    let want = build_h1(&p).unwrap().plus(&build_h2(&p).unwrap()).unwrap();
    assert_eq!(h0, want);
    assert!(matches!(magnus_truncation(&p, 2), Err(Error::UnsupportedOrder(2))));
}

#[test]
fn second_order_correction_vanishes_with_tau() {
    let p = params(6).with_tau(1e-9).unwrap();
    let d = magnus_truncation(&p, 1)
        .unwrap()
        .minus(&magnus_truncation(&p, 0).unwrap())
        .unwrap();
    assert!(d.terms().all(|(_, c)| c.norm() < 1e-16));
}

#[test]
fn second_order_term_against_nested_commutators() {
    // Symmetric splitting: h2 = [H1,[H1,H2]]/24 + [H2,[H1,H2]]/12 in units of tau^2.
    let p = params(5);
    let (a, b) = (h1(5, 1.0, 1.0), h2(5, 1.0));
    let ab = &a * &b - &b * &a;
    let want = (&a * &ab - &ab * &a) * Complex64::new(1.0 / 24.0, 0.0)
        + (&b * &ab - &ab * &b) * Complex64::new(1.0 / 12.0, 0.0);
    let terms = effective_hamiltonian_terms(&p, 1).unwrap();
    assert!(max_diff(&from_faer(&terms[1].to_dense().unwrap()), &want) < 1e-12);
}

#[test]
fn truncations_are_hermitian_and_gapped() {
    for n in 2..=6 {
        for k in 0..=1 {
            let op = magnus_truncation(&params(n).with_tau(0.7).unwrap(), k).unwrap();
            assert!(op.is_hermitian());
            let d = from_faer(&op.to_dense().unwrap());
            assert!(max_diff(&d, &d.adjoint()) < 1e-12);
            let ev = sym_eigenvalues(&op.to_dense_real().unwrap()).unwrap();
            assert!(ev[1] - ev[0] > 1e-6, "L={n} k={k} gap {}", ev[1] - ev[0]);
        }
    }
}

#[test]
fn trotter_error_order_scaling() {
    let n = 6;
    let psi = floquet_core::StateVector::random(n, 11).unwrap();
    for k in 0..=1usize {
        let taus: Vec<f64> = (0..8).map(|i| 0.02 * (10f64).powf(i as f64 / 7.0)).collect();
        let errs: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let p = params(n).with_tau(tau).unwrap();
                let hf = from_faer(&magnus_truncation(&p, k).unwrap().to_dense().unwrap());
                let u = expm_minus_i(&hf, tau);
                let t = trotter(n, tau);
                vec_diff(&apply(&u, psi.amplitudes()), &apply(&t, psi.amplitudes()))
            })
            .collect();
        let slope = loglog_slope(&taus, &errs);
        assert!((slope - (2 * k + 3) as f64).abs() < 0.15, "k={k} slope {slope}");
    }
}

#[test]
fn json_round_trip() {
    let op = magnus_truncation(&params(4), 1).unwrap();
    let back = PauliOperator::from_json(&op.to_json().unwrap()).unwrap();
    assert_eq!(back, op);
}

fn arb_operator(n: usize) -> impl Strategy<Value = PauliOperator> {
    let mask = (1u64 << n) - 1;
    prop::collection::vec((0..=mask, 0..=mask, -2.0f64..2.0, -2.0f64..2.0), 0..8).prop_map(move |terms| {
        PauliOperator::from_terms(
            n,
            terms
                .into_iter()
                .map(|(x, z, re, im)| (PauliString::from_masks(x, z), Complex64::new(re, im))),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn simplify_is_idempotent(op in arb_operator(4)) {
        let once = op.clone().simplified();
        prop_assert_eq!(once.clone().simplified(), once);
    }

    #[test]
    fn commutator_is_antisymmetric(a in arb_operator(4), b in arb_operator(4)) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.plus(&ba).unwrap().is_empty());
    }

    #[test]
    fn commutator_is_bilinear(a in arb_operator(3), b in arb_operator(3), c in arb_operator(3), s in -3.0f64..3.0) {
        let lhs = commutator(&a.plus(&b.scaled_real(s)).unwrap(), &c).unwrap();
        let rhs = commutator(&a, &c).unwrap().plus(&commutator(&b, &c).unwrap().scaled_real(s)).unwrap();
        let diff = lhs.minus(&rhs).unwrap();
        prop_assert!(diff.terms().all(|(_, z)| z.norm() < 1e-12));
    }

    #[test]
    fn product_matches_dense(a in arb_operator(3), b in arb_operator(3)) {
        let p = from_faer(&a.product(&b).unwrap().to_dense().unwrap());
        let want = from_faer(&a.to_dense().unwrap()) * from_faer(&b.to_dense().unwrap());
        prop_assert!(max_diff(&p, &want) < 1e-12);
    }

    #[test]
    fn string_product_phase(x1 in 0u64..32, z1 in 0u64..32, x2 in 0u64..32, z2 in 0u64..32) {
        let (a, b) = (PauliString::from_masks(x1, z1), PauliString::from_masks(x2, z2));
        let (phase, s) = a.mul(&b);
        let n = 5;
        let letters = |p: &PauliString| (0..n).map(|i| p.letter(i).letter()).collect::<Vec<char>>();
        let want = kron_string(&letters(&a)) * kron_string(&letters(&b));
        let got = kron_string(&letters(&s)) * Complex64::new(0.0, 1.0).powu(phase as u32);
        prop_assert!(max_diff(&got, &want) < 1e-14);
        prop_assert_eq!(a.commutes_with(&b), phase == b.mul(&a).0);
    }
}
