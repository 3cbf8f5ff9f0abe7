use proptest::prelude::*;

use selftest::sdpa::{export_sdpa, import_sdpa};
use selftest_core::sdp::{SdpConstraint, SdpEntry, SdpInstance};
use selftest_core::swap::{fidelity_instance, BellConstraintMode, SwapTarget};
use selftest_core::{MomentMatrixStructure, SequenceLevel};

/// Any finite double, including subnormals and signed zeros.
fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 4.0),
        -1.0f64..1.0,
    ]
}

/// Upper-triangle entries with distinct positions.
fn entries(n: usize) -> impl Strategy<Value = Vec<SdpEntry>> {
    prop::collection::btree_map((0..n, 0..n), finite(), 0..8).prop_map(|m| {
        let mut seen = std::collections::BTreeSet::new();
        m.into_iter()
            .filter_map(|((i, j), v)| {
                let e = SdpEntry::new(i, j, v);
                seen.insert((e.row, e.col)).then_some(e)
            })
            .collect()
    })
}

fn instance() -> impl Strategy<Value = SdpInstance> {
    (1usize..6).prop_flat_map(|n| {
        (entries(n), prop::collection::vec((entries(n), finite()), 0..6)).prop_map(move |(objective, rows)| {
            let mut p = SdpInstance::new(n);
            p.objective = objective;
            p.constraints = rows.into_iter().map(|(entries, rhs)| SdpConstraint { entries, rhs }).collect();
            p
        })
    })
}

fn same_bits(a: &SdpInstance, b: &SdpInstance) -> bool {
    let eq = |x: &[SdpEntry], y: &[SdpEntry]| {
        x.len() == y.len() && x.iter().zip(y).all(|(u, v)| u.row == v.row && u.col == v.col && u.value.to_bits() == v.value.to_bits())
    };
    a.order == b.order
        && eq(&a.objective, &b.objective)
        && a.constraints.len() == b.constraints.len()
        && a.constraints.iter().zip(&b.constraints).all(|(c, d)| c.rhs.to_bits() == d.rhs.to_bits() && eq(&c.entries, &d.entries))
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(p in instance()) {
        let text = export_sdpa(&p, &["proptest"]);
        let back = import_sdpa(&text).unwrap();
        prop_assert!(same_bits(&p, &back));
        prop_assert_eq!(export_sdpa(&back, &["proptest"]), text);
    }

    /// Damaged files either parse or fail with a position inside the file.
    #[test]
    fn damaged_files_fail_cleanly(p in instance(), cut in 0usize..400, junk in "[ -~]{0,4}") {
        let text = export_sdpa(&p, &[]);
        let cut = cut.min(text.len());
        let damaged = format!("{}{}{}", &text[..cut], junk, &text[cut..]);
        if let Err(e) = import_sdpa(&damaged) {
            prop_assert!(e.line >= 1 && e.line <= damaged.lines().count().max(1));
            prop_assert!(e.column >= 1);
        }
    }
}

#[test]
fn fidelity_instance_round_trips() {
    let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 3).unwrap();
    let p = fidelity_instance(&SwapTarget::ghz3_mermin(), &s, BellConstraintMode::Equality, 3.4).unwrap();
    let text = export_sdpa(&p, &["GHZ3 at 3.4"]);
    let back = import_sdpa(&text).unwrap();
    assert!(same_bits(&p, &back));
    assert_eq!(export_sdpa(&back, &["GHZ3 at 3.4"]), text);
}
