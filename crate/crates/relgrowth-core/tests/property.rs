//! Property tests for the exact-arithmetic kernels: lattice normal forms
//! and recurrence detection.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use relgrowth_core::lattice::IntegerLattice;
use relgrowth_core::series::{extend_recurrence, min_recurrence};

proptest! {
    #[test]
    fn hnf_idempotent(
        dim in 1usize..=4,
        rows in prop::collection::vec(prop::collection::vec(-50i128..=50, 4), 1..6),
    ) {
        let gens: Vec<Vec<i128>> = rows.iter().map(|r| r[..dim].to_vec()).collect();
        let lattice = IntegerLattice::from_generators(dim, gens.clone());
        let again = IntegerLattice::from_generators(dim, lattice.basis().to_vec());
        prop_assert_eq!(&lattice, &again);
        // Every generator is a member of the lattice it generates.
        for g in &gens {
            prop_assert!(lattice.contains(g));
        }
        // Basis shape: pivots positive, strictly right-moving, entries
        // above each pivot reduced into [0, pivot).
        let basis = lattice.basis();
        let mut last_col = None;
        for row in basis {
            let col = row.iter().position(|&x| x != 0).unwrap();
            prop_assert!(row[col] > 0);
            if let Some(prev) = last_col {
                prop_assert!(col > prev);
            }
            last_col = Some(col);
        }
        for (i, row) in basis.iter().enumerate() {
            let col = row.iter().position(|&x| x != 0).unwrap();
            for upper in basis.iter().take(i) {
                prop_assert!(upper[col] >= 0 && upper[col] < row[col]);
            }
        }
    }

    #[test]
    fn lattice_closed_under_addition(
        dim in 1usize..=3,
        rows in prop::collection::vec(prop::collection::vec(-20i128..=20, 3), 1..4),
        picks in prop::collection::vec((0usize..4, 0usize..4), 4),
    ) {
        let gens: Vec<Vec<i128>> = rows.iter().map(|r| r[..dim].to_vec()).collect();
        let lattice = IntegerLattice::from_generators(dim, gens.clone());
        for &(i, j) in &picks {
            let a = &gens[i % gens.len()];
            let b = &gens[j % gens.len()];
            let sum: Vec<i128> = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
            let diff: Vec<i128> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
            prop_assert!(lattice.contains(&sum));
            prop_assert!(lattice.contains(&diff));
        }
    }

    #[test]
    fn planted_recurrence_is_recovered(
        coeffs in prop::collection::vec(-4i64..=4, 1..5),
        seeds in prop::collection::vec(-9i64..=9, 5),
    ) {
        let order = coeffs.len();
        let coeffs_q: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let seed: Vec<BigInt> = seeds[..order].iter().map(|&s| BigInt::from(s)).collect();
        let len = 2 * order + 20;
        let seq_q = extend_recurrence(&coeffs_q, &seed, len);
        let seq: Vec<BigInt> = seq_q.iter().map(|q| q.to_integer()).collect();
        let rec = min_recurrence(&seq, order + 2).expect("long enough");
        prop_assert!(rec.found);
        // Minimality: never larger than the planted order.
        prop_assert!(rec.order <= order);
        // Whatever was found reproduces the sequence exactly.
        let replay = extend_recurrence(
            &rec.coefficients,
            &seq[..rec.order.max(1).min(seq.len())],
            seq.len(),
        );
        for (got, want) in replay.iter().zip(seq.iter()) {
            prop_assert_eq!(got, &BigRational::from_integer(want.clone()));
        }
    }
}
