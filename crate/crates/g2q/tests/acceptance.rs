//! End-to-end acceptance gate: one test per acceptance criterion, each
//! asserting that the corresponding verification suite passes in full.

use g2q::algebra::{classical_limit_check, verify_presentation_sq, verify_prop_pre_am, verify_vartheta};
use g2q::diagrams::{reduction_suite, relation_suite};
use g2q::invariants::{fft_check_one, fft_span_check, verify_commutation_all, verify_constructions};
use g2q::rep::{gamma_p_suite, invariant_space, rep_suite};
use g2q::Check;

fn assert_all_pass(checks: &[Check]) {
    let fails: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    assert!(
        fails.is_empty(),
        "{} of {} checks failed: {}",
        fails.len(),
        checks.len(),
        fails
            .iter()
            .map(|c| format!("{} ({})", c.id, c.witness.as_deref().unwrap_or("")))
            .collect::<Vec<_>>()
            .join("; ")
    );
}

// 1. Representation suite: module matrices, equivariance, braid relation,
//    R-matrix normalization, quantum dimension.
#[test]
fn acceptance_1_representation() {
    assert_all_pass(&rep_suite());
}

// 2. Structure-map suite: cup/cap/vertex compatibilities and projector
//    decompositions.
#[test]
fn acceptance_2_structure_maps() {
    assert_all_pass(&gamma_p_suite());
}

// 3. Functor suite: the generating diagram relations all evaluate correctly.
#[test]
fn acceptance_3_functor() {
    assert_all_pass(&relation_suite());
}

// 4. Cycle reduction: ring coefficients plus 200 randomized diagrams with
//    evaluation-preserving, crossing-free reductions.
#[test]
fn acceptance_4_cycle_reduction() {
    assert_all_pass(&reduction_suite(200));
}

// 5. S_q(V): the 21 defining relations, graded dimensions 1, 7, 28, 77, 182,
//    nilpotency of the quadratic central element, quasi-commutation.
#[test]
fn acceptance_5_sqv_presentation() {
    assert_all_pass(&verify_presentation_sq());
    assert_all_pass(&verify_vartheta());
}

// 6. A_m presentation: all 49 braided products against the straightening
//    matrices.
#[test]
fn acceptance_6_pre_am_products() {
    assert_all_pass(&verify_prop_pre_am());
}

// 7. Invariant constructions: exchange rules, cubic index rules, quartic
//    identities, invariance of every constructed element.
#[test]
fn acceptance_7_invariant_constructions() {
    assert_all_pass(&verify_constructions());
}

// 8. Commutation suites: every displayed exchange relation over all
//    admissible index tuples at the configured sizes.
#[test]
fn acceptance_8_commutation() {
    assert_all_pass(&verify_commutation_all());
}

// 9. Spanning: products of the quadratic and cubic generators exhaust the
//    invariant subspace in every multidegree up to the bound, and the
//    invariant spaces of small tensor powers have the expected dimensions.
#[test]
fn acceptance_9_fft_span() {
    for (n, expected) in [(2usize, 1usize), (3, 1), (4, 4), (5, 10)] {
        assert_eq!(
            invariant_space(n).dim(),
            expected,
            "invariant space of the {n}-th tensor power"
        );
    }
    for m in 1..=3 {
        assert_all_pass(&fft_span_check(m, 4));
    }
    assert_all_pass(&[fft_check_one(4, &[1, 1, 1, 1])]);
}

// 10. Classical limit: the q → 1 specialization matches the symmetric
//     algebra data.
#[test]
fn acceptance_10_classical_limit() {
    assert_all_pass(&classical_limit_check(4));
}
