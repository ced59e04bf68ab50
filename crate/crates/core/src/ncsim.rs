//! Single-sender broadcast over independent erasure channels.
//!
//! Transmission `u` carries a coding coefficient column: column `u` of
//! `H_{q,K}` for the Pascal scheme, or a fresh uniform column for random
//! linear network coding. Each receiver loses each transmission
//! independently with the configured probability and decodes once its
//! received columns reach rank `K`.
//!
//! Random streams: the coefficient columns come from stream 0 of the seed,
//! receiver `r` draws its erasures from stream `r + 1`, and the optional
//! payload from stream `u64::MAX`. Receivers never share a stream, so the
//! outcome for one receiver does not depend on how many others exist.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{self, CodecConfig, GeneratorKind, Share};
use crate::error::{Error, Result};
use crate::fields::{FieldElement, FieldParams};
use crate::matrices::{dot, LuFactors, MatrixGF};
use crate::rng::XorShift64Star;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Pascal,
    Random,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Pascal => "pascal",
            Scheme::Random => "random",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pascal" => Ok(Scheme::Pascal),
            "random" => Ok(Scheme::Random),
            _ => Err(Error::SimConfig(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub field: FieldParams,
    pub k: usize,
    pub receivers: usize,
    pub erasure_prob: f64,
    pub scheme: Scheme,
    pub seed: u64,
    /// Defaults to `q + 1` for Pascal and `8K + 64` for random coding.
    pub max_transmissions: Option<usize>,
    /// When set, push this many payload symbols per packet through the
    /// coder and check every decoding receiver recovers them.
    pub payload_symbols: Option<usize>,
}

impl SimConfig {
    pub fn new(field: FieldParams, k: usize, scheme: Scheme, seed: u64) -> Self {
        Self {
            field,
            k,
            receivers: 1,
            erasure_prob: 0.0,
            scheme,
            seed,
            max_transmissions: None,
            payload_symbols: None,
        }
    }

    pub fn transmission_cap(&self) -> usize {
        self.max_transmissions.unwrap_or(match self.scheme {
            Scheme::Pascal => self.field.order() as usize + 1,
            Scheme::Random => 8 * self.k + 64,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.field.order() as usize;
        let bad = |msg: String| Err(Error::SimConfig(msg));
        if self.k == 0 {
            return bad("K must be at least 1".into());
        }
        if self.receivers == 0 {
            return bad("need at least one receiver".into());
        }
        if !(0.0..1.0).contains(&self.erasure_prob) {
            return bad(format!("erasure probability {} outside [0, 1)", self.erasure_prob));
        }
        let cap = self.transmission_cap();
        if cap == 0 {
            return bad("max transmissions must be at least 1".into());
        }
        if self.scheme == Scheme::Pascal {
            if self.k > q {
                return bad(format!("pascal scheme needs K <= q = {q}, got {}", self.k));
            }
            if cap > q + 1 {
                return bad(format!(
                    "pascal scheme has only q+1 = {} coefficient columns, asked for {cap}",
                    q + 1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReceiverStats {
    pub receiver: usize,
    /// Transmissions sent while the receiver was still listening.
    pub transmissions_observed: u64,
    pub received_count: u64,
    pub decoded: bool,
    pub receptions_at_decode: Option<u64>,
    pub transmissions_at_decode: Option<u64>,
    /// Receptions that did not raise the rank.
    pub dependent_receptions: u64,
    pub payload_verified: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Overhead {
    pub pascal: u64,
    pub random: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub field: String,
    pub k: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub erasure_prob: f64,
    pub max_transmissions: usize,
    pub transmissions_sent: u64,
    pub decoded_receivers: usize,
    pub all_decoded: bool,
    /// The transmission cap was hit with receivers still undecoded.
    pub exhausted: bool,
    pub mean_transmissions_to_decode: Option<f64>,
    pub max_transmissions_to_decode: Option<u64>,
    /// Total dependent receptions; reported for the random scheme only.
    pub dependent_reception_count: Option<u64>,
    pub overhead_bits_per_packet: Overhead,
    pub receivers: Vec<ReceiverStats>,
}

/// Header bits needed to describe the coefficients of one packet.
///
/// Random coding ships all `K` coefficients, `⌈K log₂ q⌉` bits; the Pascal
/// scheme ships the column index alone, `⌈log₂ n⌉` bits for `n` possible
/// transmissions.
pub fn overhead_bits(scheme: Scheme, k: u64, q: u64, n_transmissions: u64) -> u64 {
    match scheme {
        Scheme::Pascal => ceil_log2(n_transmissions),
        Scheme::Random => {
            if q.is_power_of_two() {
                k * q.trailing_zeros() as u64
            } else {
                // K log₂ q is irrational here, so floor + 1 is the ceiling.
                (k as f64 * (q as f64).log2()).floor() as u64 + 1
            }
        }
    }
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// `K` independent uniform field elements.
pub fn random_column(rng: &mut XorShift64Star, field: &FieldParams, k: usize) -> Vec<FieldElement> {
    (0..k)
        .map(|_| {
            field
                .sigma(rng.below(field.order() as u64))
                .expect("draw below q")
        })
        .collect()
}

/// Column `u` of `H_{q,K}` without building the matrix.
fn pascal_column(field: &FieldParams, k: usize, u: usize, inv_sigma: &[FieldElement]) -> Vec<FieldElement> {
    let q = field.order() as usize;
    let mut col = vec![FieldElement::ZERO; k];
    if u == q {
        col[k - 1] = FieldElement::ONE;
        return col;
    }
    let x = field.sigma(u as u64).expect("u < q");
    let mut v = FieldElement::ONE;
    for (m, slot) in col.iter_mut().enumerate() {
        if m > 0 {
            let root = field.sigma(m as u64 - 1).expect("m < q");
            v = field.mul(v, field.mul(field.sub(x, root), inv_sigma[m]));
        }
        *slot = v;
    }
    col
}

/// Incremental row echelon basis; rows are normalized at their pivot.
#[derive(Clone, Debug, Default)]
struct Basis {
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl Basis {
    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the basis; reports whether it was.
    fn insert(&mut self, field: &FieldParams, mut v: Vec<FieldElement>) -> bool {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c.is_zero() {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = field.sub(*x, field.mul(c, r));
            }
        }
        let Some(pivot) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = field.inv(v[pivot]).expect("pivot is nonzero");
        for x in v.iter_mut() {
            *x = field.mul(*x, inv);
        }
        self.rows.push((pivot, v));
        true
    }
}

struct Receiver {
    rng: XorShift64Star,
    basis: Basis,
    stats: ReceiverStats,
    // (u, coefficient column, payload) of the rank-raising receptions
    kept: Vec<(usize, Vec<FieldElement>, Vec<FieldElement>)>,
}

pub fn run_sim(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let field = &config.field;
    let (k, q) = (config.k, field.order() as usize);
    let cap = config.transmission_cap();

    let inv_sigma: Vec<FieldElement> = (0..k.min(q))
        .map(|m| {
            if m == 0 {
                FieldElement::ONE
            } else {
                field.inv(field.sigma(m as u64).expect("m < q")).expect("σ(m) != 0")
            }
        })
        .collect();
    let mut coeff_rng = XorShift64Star::new(config.seed, 0);

    // Source packets: payload word l is (x_0[l], .., x_{K-1}[l]).
    let payload = config.payload_symbols.map(|len| {
        let mut rng = XorShift64Star::new(config.seed, u64::MAX);
        (0..len)
            .map(|_| random_column(&mut rng, field, k))
            .collect::<Vec<_>>()
    });
    let pascal_codec = match (config.scheme, &payload) {
        (Scheme::Pascal, Some(_)) => Some(CodecConfig::new(
            field.clone(),
            k,
            GeneratorKind::SupplementedPascal,
            cap.max(k),
        )?),
        _ => None,
    };
    let pascal_shares = match (&pascal_codec, &payload) {
        (Some(c), Some(words)) => Some(codec::encode(c, words)?),
        _ => None,
    };

    let mut receivers: Vec<Receiver> = (0..config.receivers)
        .map(|r| Receiver {
            rng: XorShift64Star::new(config.seed, r as u64 + 1),
            basis: Basis::default(),
            stats: ReceiverStats {
                receiver: r,
                transmissions_observed: 0,
                received_count: 0,
                decoded: false,
                receptions_at_decode: None,
                transmissions_at_decode: None,
                dependent_receptions: 0,
                payload_verified: None,
            },
            kept: Vec::new(),
        })
        .collect();

    let mut sent = 0u64;
    for u in 0..cap {
        if receivers.iter().all(|r| r.stats.decoded) {
            break;
        }
        let column = match config.scheme {
            Scheme::Pascal => pascal_column(field, k, u, &inv_sigma),
            Scheme::Random => random_column(&mut coeff_rng, field, k),
        };
        let coded: Vec<FieldElement> = match (&pascal_shares, &payload) {
            (Some(shares), _) => shares[u].symbols.clone(),
            (None, Some(words)) => words.iter().map(|w| dot(field, &column, w)).collect(),
            (None, None) => Vec::new(),
        };
        sent += 1;
        for rx in receivers.iter_mut().filter(|r| !r.stats.decoded) {
            rx.stats.transmissions_observed += 1;
            if rx.rng.next_f64() < config.erasure_prob {
                continue;
            }
            rx.stats.received_count += 1;
            if rx.basis.insert(field, column.clone()) {
                if payload.is_some() {
                    rx.kept.push((u, column.clone(), coded.clone()));
                }
            } else {
                rx.stats.dependent_receptions += 1;
            }
            if rx.basis.rank() == k {
                rx.stats.decoded = true;
                rx.stats.receptions_at_decode = Some(rx.stats.received_count);
                rx.stats.transmissions_at_decode = Some(u as u64 + 1);
                if let Some(words) = &payload {
                    let ok = match &pascal_codec {
                        Some(c) => verify_pascal_payload(c, &rx.kept, words),
                        None => verify_random_payload(field, &rx.kept, words),
                    };
                    rx.stats.payload_verified = Some(ok);
                }
                rx.kept.clear();
            }
        }
    }

    let stats: Vec<ReceiverStats> = receivers.into_iter().map(|r| r.stats).collect();
    let to_decode: Vec<u64> = stats.iter().filter_map(|s| s.transmissions_at_decode).collect();
    let decoded_receivers = to_decode.len();
    let all_decoded = decoded_receivers == stats.len();
    Ok(SimReport {
        field: field.to_string(),
        k,
        scheme: config.scheme,
        seed: config.seed,
        erasure_prob: config.erasure_prob,
        max_transmissions: cap,
        transmissions_sent: sent,
        decoded_receivers,
        all_decoded,
        exhausted: !all_decoded,
        mean_transmissions_to_decode: (!to_decode.is_empty())
            .then(|| to_decode.iter().sum::<u64>() as f64 / to_decode.len() as f64),
        max_transmissions_to_decode: to_decode.iter().copied().max(),
        dependent_reception_count: (config.scheme == Scheme::Random)
            .then(|| stats.iter().map(|s| s.dependent_receptions).sum()),
        overhead_bits_per_packet: Overhead {
            // The index field must address every column the sender may emit.
            pascal: overhead_bits(Scheme::Pascal, k as u64, q as u64, (cap as u64).min(q as u64 + 1)),
            random: overhead_bits(Scheme::Random, k as u64, q as u64, cap as u64),
        },
        receivers: stats,
    })
}

type Kept = (usize, Vec<FieldElement>, Vec<FieldElement>);

fn verify_pascal_payload(c: &CodecConfig, kept: &[Kept], words: &[Vec<FieldElement>]) -> bool {
    let shares: Vec<Share> = kept
        .iter()
        .map(|(u, _, coded)| Share {
            u: *u,
            symbols: coded.clone(),
        })
        .collect();
    codec::decode(c, &shares).is_ok_and(|w| w == words)
}

fn verify_random_payload(field: &FieldParams, kept: &[Kept], words: &[Vec<FieldElement>]) -> bool {
    let k = kept.len();
    let system = MatrixGF::from_fn(field, k, k, |i, j| kept[i].1[j]);
    let Ok(lu) = LuFactors::new(&system) else {
        return false;
    };
    words.iter().enumerate().all(|(l, word)| {
        let rhs: Vec<FieldElement> = kept.iter().map(|(_, _, coded)| coded[l]).collect();
        lu.solve(&rhs).is_ok_and(|x| &x == word)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;
    use crate::pascal::supplemented_pascal;

    fn gf(p: u64, h: u32) -> FieldParams {
        make_field(p, h).unwrap()
    }

    #[test]
    fn overhead_examples() {
        assert_eq!(overhead_bits(Scheme::Random, 16, 256, 1), 128);
        assert_eq!(overhead_bits(Scheme::Pascal, 16, 256, 17), 5);
        assert_eq!(overhead_bits(Scheme::Random, 1, 2, 1), 1);
        assert_eq!(overhead_bits(Scheme::Random, 3, 5, 1), 7); // 125 <= 128
        assert_eq!(overhead_bits(Scheme::Random, 4, 5, 1), 10); // 625 <= 1024
        assert_eq!(overhead_bits(Scheme::Pascal, 1, 2, 1), 0);
        assert_eq!(overhead_bits(Scheme::Pascal, 1, 2, 16), 4);
    }

    #[test]
    fn pascal_columns_match_matrix() {
        for f in [gf(5, 1), gf(2, 3), gf(3, 2)] {
            let q = f.order() as usize;
            for k in 1..=q {
                let h = supplemented_pascal(&f, k).unwrap();
                let inv: Vec<_> = (0..k)
                    .map(|m| if m == 0 { FieldElement::ONE } else { f.inv(f.sigma(m as u64).unwrap()).unwrap() })
                    .collect();
                for u in 0..=q {
                    assert_eq!(pascal_column(&f, k, u, &inv), h.column(u));
                }
            }
        }
    }

    #[test]
    fn random_column_golden() {
        // Frozen from an independent implementation of the generator.
        let f5 = gf(5, 1);
        let mut rng = XorShift64Star::new(42, 0);
        let cols: Vec<Vec<u32>> = (0..3)
            .map(|_| random_column(&mut rng, &f5, 4).iter().map(|e| e.index()).collect())
            .collect();
        assert_eq!(cols, vec![vec![2, 2, 3, 1], vec![1, 2, 0, 4], vec![4, 2, 4, 0]]);
        let mut raw = XorShift64Star::new(42, 0);
        assert_eq!(
            [raw.next_u64(), raw.next_u64(), raw.next_u64()],
            [3580622183945639842, 10378725325292465923, 8967075514996744559]
        );
    }

    #[test]
    fn lossless_pascal_decodes_at_k() {
        let mut c = SimConfig::new(gf(7, 1), 4, Scheme::Pascal, 9);
        c.receivers = 5;
        let r = run_sim(&c).unwrap();
        assert!(r.all_decoded && !r.exhausted);
        assert_eq!(r.transmissions_sent, 4);
        for s in &r.receivers {
            assert_eq!(s.transmissions_at_decode, Some(4));
            assert_eq!(s.receptions_at_decode, Some(4));
        }
        assert_eq!(r.dependent_reception_count, None);
    }

    #[test]
    fn config_validation() {
        let f5 = gf(5, 1);
        let mut c = SimConfig::new(f5.clone(), 2, Scheme::Pascal, 1);
        c.max_transmissions = Some(7);
        assert!(run_sim(&c).is_err());
        c.max_transmissions = Some(6);
        assert!(run_sim(&c).is_ok());
        c.erasure_prob = 1.0;
        assert!(run_sim(&c).is_err());
        let c = SimConfig::new(f5.clone(), 6, Scheme::Pascal, 1);
        assert!(run_sim(&c).is_err());
        let c = SimConfig::new(f5, 6, Scheme::Random, 1);
        assert!(run_sim(&c).is_ok());
    }

    #[test]
    fn exhaustion_is_reported() {
        let mut c = SimConfig::new(gf(3, 1), 3, Scheme::Pascal, 5);
        c.receivers = 20;
        c.erasure_prob = 0.7;
        let r = run_sim(&c).unwrap();
        assert!(r.exhausted);
        assert!(!r.all_decoded);
        assert_eq!(r.transmissions_sent, 4);
        assert!(r.receivers.iter().any(|s| !s.decoded));
    }

    #[test]
    fn payload_round_trip() {
        for scheme in [Scheme::Pascal, Scheme::Random] {
            let mut c = SimConfig::new(gf(2, 4), 5, scheme, 77);
            c.receivers = 6;
            c.erasure_prob = 0.3;
            c.payload_symbols = Some(9);
            let r = run_sim(&c).unwrap();
            for s in &r.receivers {
                assert_eq!(s.payload_verified, s.decoded.then_some(true));
            }
            assert!(r.decoded_receivers > 0);
        }
    }

    #[test]
    fn basis_tracks_rank() {
        let f = gf(2, 1);
        let mut b = Basis::default();
        let e = |xs: &[u32]| xs.iter().map(|&x| f.sigma(x as u64).unwrap()).collect::<Vec<_>>();
        assert!(b.insert(&f, e(&[1, 1, 0])));
        assert!(b.insert(&f, e(&[0, 1, 1])));
        assert!(!b.insert(&f, e(&[1, 0, 1])));
        assert!(!b.insert(&f, e(&[0, 0, 0])));
        assert!(b.insert(&f, e(&[0, 0, 1])));
        assert_eq!(b.rank(), 3);
    }
}
