//! Oracle and property tests for permutation combinatorics and Koszul signs.

use lr_core::signs::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

#[test]
fn unshuffle_counts_match_binomials() {
    for i in 0..=4usize {
        for j in 0..=4usize {
            let count = unshuffles(i, j).count() as u128;
            assert_eq!(count, binomial(i + j, i), "({i},{j})-unshuffles");
        }
    }
}

#[test]
fn unshuffles_are_increasing_in_each_block() {
    for sigma in unshuffles(2, 3) {
        assert!(sigma[0] < sigma[1]);
        assert!(sigma[2] < sigma[3] && sigma[3] < sigma[4]);
    }
}

#[test]
fn unshuffles_one_one_contains_both() {
    let all: Vec<_> = unshuffles(1, 1).collect();
    assert_eq!(all, vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn strict_unshuffles_quotient_equal_blocks() {
    // (2,2)-strict unshuffles: C(4,2)/2 = 3 of them (unordered pairings)
    let got: Vec<_> = strict_unshuffles(vec![2, 2]).collect();
    assert_eq!(got.len(), 3);
    for sigma in &got {
        assert!(sigma[0] < sigma[2], "leading elements ordered: {sigma:?}");
    }
    // (1,1,1): only the identity survives
    let got: Vec<_> = strict_unshuffles(vec![1, 1, 1]).collect();
    assert_eq!(got, vec![vec![0, 1, 2]]);
    // unequal blocks are unconstrained: (1,2) gives C(3,1)=3
    assert_eq!(strict_unshuffles(vec![1, 2]).count(), 3);
}

#[test]
fn block_permutations_with_leading_block_exempt() {
    // sizes (1 | 1, 1) with strictness from block 1: the two trailing blocks
    // are interchangeable, so 3!/(1*2) = 3 permutations
    let got: Vec<_> = block_permutations(vec![1, 1, 1], 1).collect();
    assert_eq!(got.len(), 3);
}

#[test]
fn permutations_are_actual_permutations() {
    for sigma in block_permutations(vec![2, 1, 2], 0) {
        let set: BTreeSet<_> = sigma.iter().copied().collect();
        assert_eq!(set.len(), 5);
        assert_eq!(*set.iter().max().unwrap(), 4);
    }
}

#[test]
fn koszul_sign_oracles() {
    // swapping two odd elements: -1 symmetric, +1 antisymmetric
    assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -1);
    assert_eq!(antisymmetric_koszul_sign(&[1, 0], &[1, 1]), 1);
    // swapping odd past even: +1 symmetric, -1 antisymmetric
    assert_eq!(koszul_sign(&[1, 0], &[1, 0]), 1);
    assert_eq!(antisymmetric_koszul_sign(&[1, 0], &[1, 2]), -1);
    // identity is always +1
    assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]), 1);
    // 3-cycle on odd elements: two adjacent transpositions, sign (+1)*(-1)^2
    assert_eq!(koszul_sign(&[1, 2, 0], &[1, 1, 1]), 1);
    assert_eq!(koszul_sign(&[2, 0, 1], &[3, 1, 1]), 1);
    assert_eq!(koszul_sign(&[2, 1, 0], &[1, 1, 1]), -1);
}

#[test]
fn decalage_sign_oracles() {
    // k=2, degrees (a,b): sign = (-1)^a
    assert_eq!(decalage_sign(&[1, 5]), -1);
    assert_eq!(decalage_sign(&[2, 5]), 1);
    // k=3, degrees (a,b,c): sign = (-1)^{2a+b} = (-1)^b
    assert_eq!(decalage_sign(&[1, 1, 1]), -1);
    assert_eq!(decalage_sign(&[1, 2, 7]), 1);
    // k=1: always +1
    assert_eq!(decalage_sign(&[9]), 1);
}

#[test]
fn sorted_compositions_oracle() {
    assert_eq!(sorted_compositions(4, 2), vec![vec![1, 3], vec![2, 2]]);
    assert_eq!(sorted_compositions(3, 3), vec![vec![1, 1, 1]]);
    assert_eq!(sorted_compositions(3, 1), vec![vec![3]]);
    assert!(sorted_compositions(2, 3).is_empty());
}

#[test]
fn compositions_oracle() {
    assert_eq!(
        compositions(2, 2),
        vec![vec![0, 2], vec![1, 1], vec![2, 0]]
    );
    assert_eq!(compositions(0, 2), vec![vec![0, 0]]);
}

proptest! {
    #[test]
    fn koszul_sign_is_multiplicative(
        degs in prop::collection::vec(0i64..4, 4..=4),
        seed in 0usize..24,
    ) {
        // sign(sigma . tau) = sign-of-sigma-on-(tau-permuted-degrees) * sign(tau)
        let perms = all_permutations(4);
        let tau = &perms[seed % perms.len()];
        let sigma = &perms[(seed * 7 + 3) % perms.len()];
        let composed: Vec<usize> = (0..4).map(|i| tau[sigma[i]]).collect();
        let permuted_degs: Vec<i64> = (0..4).map(|i| degs[tau[i]]).collect();
        prop_assert_eq!(
            koszul_sign(&composed, &degs),
            koszul_sign(sigma, &permuted_degs) * koszul_sign(tau, &degs)
        );
    }

    #[test]
    fn antisymmetric_is_symmetric_times_sign(
        degs in prop::collection::vec(0i64..4, 3..=3),
        seed in 0usize..6,
    ) {
        let perms = all_permutations(3);
        let sigma = &perms[seed];
        prop_assert_eq!(
            antisymmetric_koszul_sign(sigma, &degs),
            permutation_sign(sigma) * koszul_sign(sigma, &degs)
        );
    }

    #[test]
    fn unshuffle_blocks_partition(i in 0usize..4, j in 0usize..4) {
        let mut seen = BTreeSet::new();
        for sigma in unshuffles(i, j) {
            prop_assert_eq!(sigma.len(), i + j);
            prop_assert!(seen.insert(sigma.clone()));
            let set: BTreeSet<_> = sigma.iter().copied().collect();
            prop_assert_eq!(set.len(), i + j);
        }
    }
}
