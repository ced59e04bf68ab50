//! Erasure coding with a `K x n` MDS generator.
//!
//! A message is a sequence of words of `K` symbols. Coordinate `u` of a
//! word `x` is the inner product of generator column `u` with `x`; a
//! [`Share`] collects coordinate `u` of every word. Any `K` shares with
//! distinct coordinates determine the message.
//!
//! Share files ([`Frame`]) are laid out as
//!
//! ```text
//! offset  size  field
//!      0     4  magic "PMDS"
//!      4     1  version (1)
//!      5     4  characteristic p, big-endian
//!      9     1  extension degree h
//!     10     4  K, big-endian
//!     14     1  generator kind (0 supplemented_pascal, 1 truncated_pascal, 2 rs, 3 supplemented_rs)
//!     15     4  coordinate u, big-endian
//!     19     8  original message length in bytes, big-endian
//!     27     -  symbols, 1 byte each for q <= 256, else 2 bytes big-endian
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codes::{rs_generator, supplement};
use crate::error::{Error, Result};
use crate::fields::{make_field, FieldElement, FieldParams};
use crate::matrices::{dot, LuFactors, MatrixGF};
use crate::pascal::{supplemented_pascal, truncated_pascal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    SupplementedPascal,
    TruncatedPascal,
    Rs,
    SupplementedRs,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::SupplementedPascal,
        GeneratorKind::TruncatedPascal,
        GeneratorKind::Rs,
        GeneratorKind::SupplementedRs,
    ];

    /// Number of columns available over GF(q).
    pub fn column_budget(self, q: u32) -> usize {
        let q = q as usize;
        match self {
            GeneratorKind::SupplementedPascal => q + 1,
            GeneratorKind::TruncatedPascal => q,
            GeneratorKind::Rs => q - 1,
            GeneratorKind::SupplementedRs => q,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            GeneratorKind::SupplementedPascal => 0,
            GeneratorKind::TruncatedPascal => 1,
            GeneratorKind::Rs => 2,
            GeneratorKind::SupplementedRs => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::SupplementedPascal => "supplemented_pascal",
            GeneratorKind::TruncatedPascal => "truncated_pascal",
            GeneratorKind::Rs => "rs",
            GeneratorKind::SupplementedRs => "supplemented_rs",
        }
    }

    /// The full-budget generator; codecs use its first `n` columns.
    fn full_generator(self, field: &FieldParams, k: usize) -> Result<MatrixGF> {
        let q = field.order() as usize;
        match self {
            GeneratorKind::SupplementedPascal => supplemented_pascal(field, k),
            GeneratorKind::TruncatedPascal => truncated_pascal(field, k),
            GeneratorKind::Rs => rs_generator(field, k, q - 1),
            GeneratorKind::SupplementedRs => supplement(&rs_generator(field, k, q - 1)?),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::OutOfRange(format!("unknown generator kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodecConfig {
    field: FieldParams,
    k: usize,
    kind: GeneratorKind,
    n: usize,
    generator: MatrixGF,
}

impl CodecConfig {
    pub fn new(field: FieldParams, k: usize, kind: GeneratorKind, n: usize) -> Result<Self> {
        let budget = kind.column_budget(field.order());
        if k == 0 || k > n {
            return Err(Error::OutOfRange(format!("K = {k} outside [1, n = {n}]")));
        }
        if n > budget {
            return Err(Error::OutOfRange(format!(
                "n = {n} exceeds the {budget} columns of {kind} over GF({})",
                field.order()
            )));
        }
        let generator = kind.full_generator(&field, k)?.first_columns(n)?;
        Ok(Self {
            field,
            k,
            kind,
            n,
            generator,
        })
    }

    /// Config using every column the generator kind offers.
    pub fn full(field: FieldParams, k: usize, kind: GeneratorKind) -> Result<Self> {
        let n = kind.column_budget(field.order());
        Self::new(field, k, kind, n)
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn generator(&self) -> &MatrixGF {
        &self.generator
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    pub u: usize,
    pub symbols: Vec<FieldElement>,
}

pub fn encode(config: &CodecConfig, words: &[Vec<FieldElement>]) -> Result<Vec<Share>> {
    let f = &config.field;
    for w in words {
        if w.len() != config.k {
            return Err(Error::WordLength {
                expected: config.k,
                got: w.len(),
            });
        }
        if let Some(bad) = w.iter().find(|&&e| !f.contains(e)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index() as u64,
                q: f.order(),
            });
        }
    }
    Ok((0..config.n)
        .map(|u| {
            let col = config.generator.column(u);
            Share {
                u,
                symbols: words.iter().map(|w| dot(f, &col, w)).collect(),
            }
        })
        .collect())
}

/// Recovers the message words from at least `K` shares with distinct
/// coordinates. The `K` lowest coordinates are used.
pub fn decode(config: &CodecConfig, shares: &[Share]) -> Result<Vec<Vec<FieldElement>>> {
    let (k, f) = (config.k, &config.field);
    let mut order: Vec<&Share> = shares.iter().collect();
    order.sort_by_key(|s| s.u);
    for w in order.windows(2) {
        if w[0].u == w[1].u {
            return Err(Error::DuplicateShare(w[0].u));
        }
    }
    if let Some(bad) = order.iter().find(|s| s.u >= config.n) {
        return Err(Error::ColumnOutOfRange {
            index: bad.u,
            cols: config.n,
        });
    }
    if order.len() < k {
        return Err(Error::NotEnoughShares {
            needed: k,
            got: order.len(),
        });
    }
    let len = order[0].symbols.len();
    if order.iter().any(|s| s.symbols.len() != len) {
        return Err(Error::InconsistentShares);
    }
    let chosen = &order[..k];
    for s in chosen {
        if let Some(bad) = s.symbols.iter().find(|&&e| !f.contains(e)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index() as u64,
                q: f.order(),
            });
        }
    }
    // Row i of the system is generator column u_i.
    let system = MatrixGF::from_fn(f, k, k, |i, j| config.generator.get(j, chosen[i].u));
    let lu = LuFactors::new(&system).map_err(|e| match e {
        Error::Singular => Error::CorruptShares,
        other => other,
    })?;
    let mut rhs = vec![FieldElement::ZERO; k];
    (0..len)
        .map(|w| {
            for (i, s) in chosen.iter().enumerate() {
                rhs[i] = s.symbols[w];
            }
            lu.solve(&rhs)
        })
        .collect()
}

/// Carries what is needed to strip the zero fill added by [`bytes_to_words`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Padding {
    pub byte_len: u64,
}

/// Digits per byte for the generic base-q recoding: smallest `d` with `q^d >= 256`.
fn digits_per_byte(q: u32) -> usize {
    let mut d = 1;
    let mut reach = q as u64;
    while reach < 256 {
        reach *= q as u64;
        d += 1;
    }
    d
}

/// Maps bytes to symbols. GF(16) splits bytes into nibbles, GF(256) is the
/// identity, GF(65536) packs byte pairs (odd tail zero-filled); any other
/// field recodes each byte as a fixed number of big-endian base-q digits.
pub fn bytes_to_symbols(field: &FieldParams, bytes: &[u8]) -> Vec<FieldElement> {
    let el = |n: u32| field.sigma(n as u64).expect("symbol below q");
    match field.order() {
        16 => bytes
            .iter()
            .flat_map(|&b| [el((b >> 4) as u32), el((b & 0xf) as u32)])
            .collect(),
        256 => bytes.iter().map(|&b| el(b as u32)).collect(),
        65536 => bytes
            .chunks(2)
            .map(|c| el(((c[0] as u32) << 8) | c.get(1).copied().unwrap_or(0) as u32))
            .collect(),
        q => {
            let d = digits_per_byte(q);
            let mut out = Vec::with_capacity(bytes.len() * d);
            for &b in bytes {
                let start = out.len();
                let mut v = b as u32;
                for _ in 0..d {
                    out.push(el(v % q));
                    v /= q;
                }
                out[start..].reverse();
            }
            out
        }
    }
}

/// Inverse of [`bytes_to_symbols`], truncated to `byte_len` bytes.
pub fn symbols_to_bytes(field: &FieldParams, symbols: &[FieldElement], byte_len: u64) -> Result<Vec<u8>> {
    let byte_len = byte_len as usize;
    let q = field.order();
    let needed = match q {
        16 => byte_len * 2,
        256 => byte_len,
        65536 => byte_len.div_ceil(2),
        q => byte_len * digits_per_byte(q),
    };
    if symbols.len() < needed {
        return Err(Error::BadPadding(format!(
            "{byte_len} bytes need {needed} symbols, only {} present",
            symbols.len()
        )));
    }
    let symbols = &symbols[..needed];
    let mut out = match q {
        16 => symbols
            .chunks(2)
            .map(|c| ((c[0].index() << 4) | c[1].index()) as u8)
            .collect(),
        256 => symbols.iter().map(|s| s.index() as u8).collect(),
        65536 => symbols
            .iter()
            .flat_map(|s| [(s.index() >> 8) as u8, s.index() as u8])
            .collect(),
        q => symbols
            .chunks(digits_per_byte(q))
            .map(|c| {
                let v = c.iter().fold(0u64, |acc, s| acc * q as u64 + s.index() as u64);
                u8::try_from(v).map_err(|_| {
                    Error::BadPadding(format!("digit group decodes to {v}, not a byte"))
                })
            })
            .collect::<Result<Vec<u8>>>()?,
    };
    out.truncate(byte_len);
    Ok(out)
}

/// Splits a byte string into `K`-symbol words, zero-filling the last one.
pub fn bytes_to_words(config: &CodecConfig, bytes: &[u8]) -> (Vec<Vec<FieldElement>>, Padding) {
    let symbols = bytes_to_symbols(&config.field, bytes);
    let words = symbols
        .chunks(config.k)
        .map(|c| {
            let mut w = c.to_vec();
            w.resize(config.k, FieldElement::ZERO);
            w
        })
        .collect();
    (
        words,
        Padding {
            byte_len: bytes.len() as u64,
        },
    )
}

pub fn words_to_bytes(config: &CodecConfig, words: &[Vec<FieldElement>], padding: &Padding) -> Result<Vec<u8>> {
    let symbols: Vec<FieldElement> = words.iter().flatten().copied().collect();
    symbols_to_bytes(&config.field, &symbols, padding.byte_len)
}

pub const FRAME_MAGIC: [u8; 4] = *b"PMDS";
pub const FRAME_VERSION: u8 = 1;
pub const FRAME_HEADER_LEN: usize = 27;

/// One share file: the header needed to rebuild the codec, plus the share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub field: FieldParams,
    pub k: usize,
    pub kind: GeneratorKind,
    pub payload_byte_length: u64,
    pub share: Share,
}

fn bytes_per_symbol(q: u32) -> usize {
    if q <= 256 {
        1
    } else {
        2
    }
}

impl Frame {
    pub fn to_bytes(&self) -> Vec<u8> {
        let bps = bytes_per_symbol(self.field.order());
        let mut out = Vec::with_capacity(FRAME_HEADER_LEN + bps * self.share.symbols.len());
        out.extend_from_slice(&FRAME_MAGIC);
        out.push(FRAME_VERSION);
        out.extend_from_slice(&self.field.characteristic().to_be_bytes());
        out.push(self.field.degree() as u8);
        out.extend_from_slice(&(self.k as u32).to_be_bytes());
        out.push(self.kind.code());
        out.extend_from_slice(&(self.share.u as u32).to_be_bytes());
        out.extend_from_slice(&self.payload_byte_length.to_be_bytes());
        for s in &self.share.symbols {
            let v = s.index();
            if bps == 1 {
                out.push(v as u8);
            } else {
                out.extend_from_slice(&(v as u16).to_be_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: String| Error::Frame(msg);
        if bytes.len() < FRAME_HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if bytes[..4] != FRAME_MAGIC {
            return Err(bad("bad magic".into()));
        }
        if bytes[4] != FRAME_VERSION {
            return Err(bad(format!("unsupported version {}", bytes[4])));
        }
        let be32 = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap());
        let p = be32(5);
        let h = bytes[9];
        let field = make_field(p as u64, h as u32)?;
        let k = be32(10) as usize;
        let kind = GeneratorKind::from_code(bytes[14])
            .ok_or_else(|| bad(format!("unknown generator kind code {}", bytes[14])))?;
        let u = be32(15) as usize;
        let payload_byte_length = u64::from_be_bytes(bytes[19..27].try_into().unwrap());
        let body = &bytes[FRAME_HEADER_LEN..];
        let bps = bytes_per_symbol(field.order());
        if !body.len().is_multiple_of(bps) {
            return Err(bad(format!("payload of {} bytes is not whole symbols", body.len())));
        }
        let symbols = body
            .chunks(bps)
            .map(|c| {
                let v = c.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64);
                field.sigma(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            field,
            k,
            kind,
            payload_byte_length,
            share: Share { u, symbols },
        })
    }
}

/// Encodes a byte string into one frame per coordinate.
pub fn encode_bytes(config: &CodecConfig, bytes: &[u8]) -> Result<Vec<Frame>> {
    let (words, padding) = bytes_to_words(config, bytes);
    Ok(encode(config, &words)?
        .into_iter()
        .map(|share| Frame {
            field: config.field.clone(),
            k: config.k,
            kind: config.kind,
            payload_byte_length: padding.byte_len,
            share,
        })
        .collect())
}

/// Rebuilds the byte string from frames of one encoding.
pub fn decode_frames(frames: &[Frame]) -> Result<Vec<u8>> {
    let first = frames.first().ok_or(Error::NotEnoughShares { needed: 1, got: 0 })?;
    if frames.iter().any(|f| {
        f.field != first.field
            || f.k != first.k
            || f.kind != first.kind
            || f.payload_byte_length != first.payload_byte_length
    }) {
        return Err(Error::Frame("frames come from different encodings".into()));
    }
    let config = CodecConfig::full(first.field.clone(), first.k, first.kind)?;
    let shares: Vec<Share> = frames.iter().map(|f| f.share.clone()).collect();
    let words = decode(&config, &shares)?;
    words_to_bytes(
        &config,
        &words,
        &Padding {
            byte_len: first.payload_byte_length,
        },
    )
}
