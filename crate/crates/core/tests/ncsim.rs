use pmds_core::fields::make_field;
use pmds_core::ncsim::{overhead_bits, random_column, run_sim, Scheme, SimConfig};
use pmds_core::rng::XorShift64Star;

/// Probability that `k` uniform vectors in GF(q)^k are independent.
fn independence_probability(q: u64, k: u32) -> f64 {
    (0..k).map(|i| 1.0 - (q as f64).powi(i as i32 - k as i32)).product()
}

// Rank over GF(2) of vectors packed as bitmasks.
fn gf2_rank(vectors: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[test]
fn independence_formula_by_enumeration() {
    for k in 1..=3u32 {
        let per = 1u64 << k;
        let total = per.pow(k);
        let mut full = 0u64;
        for code in 0..total {
            let vs: Vec<u32> = (0..k).map(|i| ((code / per.pow(i)) % per) as u32).collect();
            if gf2_rank(&vs) == k as usize {
                full += 1;
            }
        }
        let exact = full as f64 / total as f64;
        assert!((exact - independence_probability(2, k)).abs() < 1e-12);
    }
    assert!((independence_probability(2, 4) - 0.307_617_187_5).abs() < 1e-12);
}

#[test]
fn pascal_receivers_never_see_dependence() {
    let f = make_field(17, 1).unwrap();
    for seed in 0..50 {
        let mut c = SimConfig::new(f.clone(), 16, Scheme::Pascal, seed);
        c.receivers = 10;
        c.erasure_prob = 0.2;
        let r = run_sim(&c).unwrap();
        for s in &r.receivers {
            assert_eq!(s.dependent_receptions, 0);
            if s.decoded {
                assert_eq!(s.receptions_at_decode, Some(16));
            } else {
                assert!(s.received_count < 16);
            }
        }
    }
}

#[test]
fn lossless_pascal_decodes_at_exactly_k() {
    for (p, h, k) in [(17u64, 1u32, 16usize), (2, 4, 5), (3, 2, 9)] {
        let f = make_field(p, h).unwrap();
        let mut c = SimConfig::new(f, k, Scheme::Pascal, 1);
        c.receivers = 4;
        let r = run_sim(&c).unwrap();
        assert!(r.receivers.iter().all(|s| s.transmissions_at_decode == Some(k as u64)));
    }
}

#[test]
fn random_small_field_shows_dependence() {
    let f = make_field(2, 1).unwrap();
    let mut with_dependence = 0;
    for seed in 0..100 {
        let c = SimConfig::new(f.clone(), 4, Scheme::Random, seed);
        let r = run_sim(&c).unwrap();
        let s = &r.receivers[0];
        if s.decoded {
            assert!(s.receptions_at_decode.unwrap() >= 4);
        }
        if r.dependent_reception_count.unwrap() > 0 {
            with_dependence += 1;
        }
    }
    // P(no dependence) ≈ 0.31
    assert!(with_dependence > 50, "{with_dependence}");
}

#[test]
fn identical_configs_give_identical_reports() {
    let f = make_field(2, 4).unwrap();
    for scheme in [Scheme::Pascal, Scheme::Random] {
        let mut c = SimConfig::new(f.clone(), 6, scheme, 0xdead_beef);
        c.receivers = 7;
        c.erasure_prob = 0.35;
        assert_eq!(run_sim(&c).unwrap(), run_sim(&c).unwrap());
    }
}

#[test]
fn receiver_outcome_independent_of_population() {
    let f = make_field(13, 1).unwrap();
    let mut small = SimConfig::new(f.clone(), 5, Scheme::Random, 4);
    small.erasure_prob = 0.4;
    small.receivers = 2;
    let mut big = small.clone();
    big.receivers = 9;
    let (a, b) = (run_sim(&small).unwrap(), run_sim(&big).unwrap());
    assert_eq!(a.receivers[..], b.receivers[..2]);
}

#[test]
fn random_columns_are_uniform() {
    let f = make_field(5, 1).unwrap();
    let mut rng = XorShift64Star::new(2024, 0);
    let mut counts = [0u64; 5];
    let draws = 100_000;
    for _ in 0..draws / 4 {
        for e in random_column(&mut rng, &f, 4) {
            counts[e.index() as usize] += 1;
        }
    }
    let p = 0.2;
    let mean = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - mean).abs() <= 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn random_column_golden_for_gf256() {
    let f = make_field(2, 8).unwrap();
    let mut rng = XorShift64Star::new(2024, 0);
    let a: Vec<u32> = random_column(&mut rng, &f, 4).iter().map(|e| e.index()).collect();
    let b: Vec<u32> = random_column(&mut rng, &f, 4).iter().map(|e| e.index()).collect();
    assert_eq!(a, vec![75, 240, 153, 100]);
    assert_eq!(b, vec![216, 161, 253, 68]);
}

#[test]
fn index_overhead_never_exceeds_coefficient_overhead() {
    for k in [4u64, 16] {
        for q in [16u64, 256] {
            for n in 1..=q + 1 {
                if k as f64 * (q as f64).log2() >= (n as f64).log2() {
                    assert!(
                        overhead_bits(Scheme::Random, k, q, n) >= overhead_bits(Scheme::Pascal, k, q, n)
                    );
                }
            }
        }
    }
}
