//! Operator words against dense matrices.

use num_complex::Complex64;
use proptest::prelude::*;

use selftest_core::linalg::CMatrix;
use selftest_core::qubit::{apply_on_site, bloch_operator};
use selftest_core::{OperatorWord, StateVector};

const PARTIES: usize = 3;

fn letters() -> impl Strategy<Value = Vec<(usize, u8)>> {
    prop::collection::vec((0..PARTIES, 1u8..=2), 0..10)
}

fn unit_vector() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    })
}

fn observables() -> impl Strategy<Value = Vec<[CMatrix; 2]>> {
    prop::collection::vec((unit_vector(), unit_vector()), PARTIES)
        .prop_map(|v| v.into_iter().map(|(a, b)| [bloch_operator(a), bloch_operator(b)]).collect())
}

fn state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << PARTIES).prop_filter_map("nonzero", |v| {
        let amps: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        StateVector::normalized(PARTIES, amps).ok()
    })
}

fn word(l: &[(usize, u8)]) -> OperatorWord {
    OperatorWord::canonical_form(PARTIES, l).unwrap()
}

/// Letters act right to left, like a matrix product.
fn dense_apply(l: &[(usize, u8)], psi: &[Complex64], obs: &[[CMatrix; 2]]) -> Vec<Complex64> {
    l.iter().rev().fold(psi.to_vec(), |v, &(p, s)| apply_on_site(&v, PARTIES, p, &obs[p][usize::from(s - 1)]))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn letters_of(w: &OperatorWord) -> Vec<(usize, u8)> {
    (0..PARTIES).flat_map(|p| w.party_letters(p).into_iter().map(move |s| (p, s))).collect()
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(l in letters()) {
        let w = word(&l);
        prop_assert_eq!(word(&letters_of(&w)), w);
    }

    #[test]
    fn reduction_preserves_the_operator(l in letters(), obs in observables(), psi in state()) {
        let w = word(&l);
        let reduced = w.apply(psi.amplitudes(), &obs);
        prop_assert!(max_diff(&reduced, &dense_apply(&l, psi.amplitudes(), &obs)) < 1e-12);
    }

    #[test]
    fn product_is_associative(a in letters(), b in letters(), c in letters()) {
        let (a, b, c) = (word(&a), word(&b), word(&c));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn adjoint_reverses_products(a in letters(), b in letters()) {
        let (a, b) = (word(&a), word(&b));
        prop_assert_eq!(a.mul(&b).unwrap().adjoint(), b.adjoint().mul(&a.adjoint()).unwrap());
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn real_representative_is_shared(l in letters()) {
        let w = word(&l);
        prop_assert_eq!(w.real_representative(), w.adjoint().real_representative());
        prop_assert!(w.real_representative().key() <= w.key());
    }

    #[test]
    fn adjoint_expectation_is_conjugate(l in letters(), obs in observables(), psi in state()) {
        let w = word(&l);
        let e = w.expectation(&psi, &obs).unwrap();
        let f = w.adjoint().expectation(&psi, &obs).unwrap();
        prop_assert!((e - f.conj()).norm() < 1e-12);
    }
}
