use pmds_core::fields::{make_field, FieldElement, FieldParams};
use pmds_core::matrices::MatrixGF;
use pmds_core::pascal::{binom, pascal_additive, supplemented_pascal, truncated_pascal};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL: [(u64, u32); 10] = [
    (2, 1),
    (3, 1),
    (2, 2),
    (5, 1),
    (7, 1),
    (2, 3),
    (3, 2),
    (11, 1),
    (13, 1),
    (2, 4),
];

fn small_fields() -> Vec<FieldParams> {
    SMALL.iter().map(|&(p, h)| make_field(p, h).unwrap()).collect()
}

fn field_strategy() -> impl Strategy<Value = FieldParams> {
    prop::sample::select(vec![(2u64, 8u32), (3, 4), (5, 3), (7, 2), (251, 1), (2, 16), (17, 3)])
        .prop_map(|(p, h)| make_field(p, h).unwrap())
}

proptest! {
    #[test]
    fn field_axioms_sampled(f in field_strategy(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.order();
        let (a, b, c) = (
            f.sigma((a % q) as u64).unwrap(),
            f.sigma((b % q) as u64).unwrap(),
            f.sigma((c % q) as u64).unwrap(),
        );
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul_poly(a, b));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            prop_assert_eq!(f.pow(a, (q - 1) as u64), FieldElement::ONE);
        }
    }

    #[test]
    fn rank_of_transpose(seed in any::<u64>(), fi in 0usize..SMALL.len(), rows in 1usize..7, cols in 1usize..7) {
        let f = &small_fields()[fi];
        let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), f, rows, cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= rows.min(cols));
    }

    #[test]
    fn submatrix_rank_bound(seed in any::<u64>(), fi in 0usize..SMALL.len(), mask in 1u32..64) {
        let f = &small_fields()[fi];
        let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), f, 4, 6);
        let cols: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let sub = m.submatrix_columns(&cols).unwrap();
        prop_assert!(sub.rank() <= cols.len().min(4));
        prop_assert!(sub.rank() <= m.rank());
    }
}

fn random_matrix(rng: &mut impl Rng, f: &FieldParams, rows: usize, cols: usize) -> MatrixGF {
    MatrixGF::from_fn(f, rows, cols, |_, _| {
        f.sigma(rng.gen_range(0..f.order() as u64)).unwrap()
    })
}

#[test]
fn solve_reproduces_rhs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for f in small_fields() {
        for k in 1..=6 {
            let mut trials = 0;
            while trials < 100 {
                let a = random_matrix(&mut rng, &f, k, k);
                if a.rank() < k {
                    assert_eq!(
                        a.solve(&vec![FieldElement::ONE; k]),
                        Err(pmds_core::Error::Singular)
                    );
                    continue;
                }
                let b: Vec<FieldElement> = (0..k)
                    .map(|_| f.sigma(rng.gen_range(0..f.order() as u64)).unwrap())
                    .collect();
                let x = a.solve(&b).unwrap();
                assert_eq!(a.mat_vec_mul(&x).unwrap(), b);
                trials += 1;
            }
        }
    }
}

#[test]
fn rref_of_nonsingular_is_identity() {
    let f = make_field(3, 2).unwrap();
    let p = truncated_pascal(&f, 9).unwrap();
    let (r, pivots) = p.rref();
    assert_eq!(r, MatrixGF::identity(&f, 9));
    assert_eq!(pivots, (0..9).collect::<Vec<_>>());
}

#[test]
fn binom_roots_are_exactly_the_first_m_indices() {
    for f in small_fields() {
        let q = f.order() as u64;
        for m in 0..q {
            for n in 0..q {
                let v = binom(&f, m, n).unwrap();
                assert_eq!(v.is_zero(), n < m, "GF({q}) f_{m}({n})");
            }
        }
    }
}

#[test]
fn degree_one_row_is_sigma() {
    for f in small_fields() {
        for n in 0..f.order() as u64 {
            assert_eq!(binom(&f, 1, n).unwrap(), f.sigma(n).unwrap());
        }
    }
}

#[test]
fn additive_recurrence_matches_formula() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let f = make_field(p, 1).unwrap();
        for k in 1..=p as usize {
            assert_eq!(pascal_additive(p, k).unwrap(), truncated_pascal(&f, k).unwrap());
        }
    }
}

// Integer binomials by the additive rule in u128, reduced once at the end.
fn integer_binomial(n: u64, m: u64) -> u128 {
    if m > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[m as usize]
}

#[test]
fn prime_field_entries_are_integer_binomials_mod_p() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let f = make_field(p, 1).unwrap();
        let full = truncated_pascal(&f, p as usize).unwrap();
        for m in 0..p {
            for n in 0..p {
                let want = (integer_binomial(n, m) % p as u128) as u32;
                assert_eq!(full.get(m as usize, n as usize).index(), want);
            }
        }
    }
}

#[test]
fn zero_counts_follow_root_structure() {
    for f in small_fields() {
        for k in 1..=f.order() as usize {
            let tri = k * (k - 1) / 2;
            assert_eq!(truncated_pascal(&f, k).unwrap().count_zeros(), tri);
            assert_eq!(supplemented_pascal(&f, k).unwrap().count_zeros(), tri + k - 1);
        }
    }
}
