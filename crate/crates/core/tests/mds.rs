use pmds_core::codes::{
    decompose_supplemented, is_mds, next_combination, rs_generator, supplement,
    uniform_matroid_representation,
};
use pmds_core::fields::{field_of_order, FieldElement};
use pmds_core::matrices::MatrixGF;
use pmds_core::pascal::{supplemented_pascal, truncated_pascal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

#[test]
fn supplemented_pascal_is_mds_on_grid() {
    for q in GRID {
        let f = field_of_order(q).unwrap();
        for k in 1..=(q as usize).min(6) {
            let v = is_mds(&supplemented_pascal(&f, k).unwrap()).unwrap();
            assert!(v.is_mds, "H_{{{q},{k}}}: {v:?}");
        }
    }
}

#[test]
fn truncated_pascal_is_mds_on_grid() {
    for q in GRID {
        let f = field_of_order(q).unwrap();
        for k in 1..=(q as usize).min(6) {
            assert!(is_mds(&truncated_pascal(&f, k).unwrap()).unwrap().is_mds);
        }
    }
}

#[test]
fn reed_solomon_is_mds_on_grid() {
    for q in GRID {
        let f = field_of_order(q).unwrap();
        let n = q as usize - 1;
        for k in 1..=(q as usize).min(6).min(n) {
            let g = rs_generator(&f, k, n).unwrap();
            assert!(is_mds(&g).unwrap().is_mds);
            assert!(is_mds(&supplement(&g).unwrap()).unwrap().is_mds);
            assert_eq!(g.count_zeros(), 0);
        }
    }
}

#[test]
fn matroid_representations_are_uniform() {
    for q in [4u64, 5, 7, 8] {
        let f = field_of_order(q).unwrap();
        for k in 1..=4usize.min(q as usize) {
            for n in k..=q as usize + 1 {
                let m = uniform_matroid_representation(&f, k, n).unwrap();
                assert!(is_mds(&m).unwrap().is_mds);
            }
        }
    }
}

/// Appends every possible extra column to H_{q,k} and reports which keep
/// the MDS property. Exploratory: prints findings, asserts only that the
/// search ran. Known exceptions (q even, k = 3 or k = q-1) allow length q+2.
#[test]
fn extension_probe() {
    for q in [2u64, 3, 4, 5] {
        let f = field_of_order(q).unwrap();
        for k in 2..q as usize {
            let h = supplemented_pascal(&f, k).unwrap();
            let mut extensions = Vec::new();
            let total = (q as usize).pow(k as u32);
            for code in 0..total {
                let mut n = code;
                let col: Vec<FieldElement> = (0..k)
                    .map(|_| {
                        let d = n % q as usize;
                        n /= q as usize;
                        f.sigma(d as u64).unwrap()
                    })
                    .collect();
                let ext = h.append_column(&col).unwrap();
                if is_mds(&ext).unwrap().is_mds {
                    extensions.push(col.iter().map(|e| e.index()).collect::<Vec<_>>());
                }
            }
            let exceptional = q % 2 == 0 && (k == 3 || k == q as usize - 1);
            println!(
                "q={q} k={k}: {} of {total} extra columns keep MDS{} {:?}",
                extensions.len(),
                if exceptional { " (exceptional case)" } else { "" },
                extensions
            );
        }
    }
}

fn dependent(m: &MatrixGF, cols: &[usize]) -> bool {
    m.submatrix_columns(cols).unwrap().rank() < cols.len()
}

/// The decomposition subtracts multiples of `s_k` from other columns, so it
/// preserves the span of any column subset that contains `s_k`. Subsets
/// without it can change: for k = 2 every Pascal column becomes (1, 0).
#[test]
fn decomposition_preserves_dependencies_with_unit_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [4u64, 5, 7, 9] {
        let f = field_of_order(q).unwrap();
        for k in 2..=4usize.min(q as usize) {
            let h = supplemented_pascal(&f, k).unwrap();
            let d = decompose_supplemented(&h).unwrap();
            let unit = h.cols() - 1;
            for size in 0..=k {
                let mut comb: Vec<usize> = (0..size).collect();
                loop {
                    let mut cols = comb.clone();
                    cols.push(unit);
                    assert_eq!(dependent(&h, &cols), dependent(&d, &cols), "{cols:?}");
                    if size == 0 || !next_combination(&mut comb, unit) {
                        break;
                    }
                }
            }
            for _ in 0..200 {
                let mut cols: Vec<usize> = (0..unit).filter(|_| rng.gen_bool(0.4)).collect();
                cols.push(unit);
                assert_eq!(dependent(&h, &cols), dependent(&d, &cols));
            }
        }
    }
}

#[test]
fn decomposition_changes_subsets_without_unit_column() {
    let f = field_of_order(5).unwrap();
    let h = supplemented_pascal(&f, 2).unwrap();
    let d = decompose_supplemented(&h).unwrap();
    assert!(!dependent(&h, &[0, 1]));
    assert!(dependent(&d, &[0, 1]));
}

#[test]
fn parallel_grid_matches_serial() {
    use pmds_core::codes::{is_mds_with, MdsOptions};
    let f = field_of_order(16).unwrap();
    let h = supplemented_pascal(&f, 5).unwrap();
    let serial = is_mds(&h).unwrap();
    let par = is_mds_with(
        &h,
        &MdsOptions {
            threads: 4,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(serial, par);
    assert_eq!(serial.subsets_checked, 6188);
}
