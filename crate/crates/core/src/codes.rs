//! MDS verification and generator constructions.
//!
//! [`is_mds`] checks a `k x n` matrix by ranking every `k`-subset of its
//! columns in lexicographic order. With several threads the subset sequence
//! is cut into contiguous chunks; the merged verdict keeps the smallest
//! failing rank, so the output matches a single-threaded run exactly.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{FieldElement, FieldParams};
use crate::matrices::{rank_in_place, MatrixGF};
use crate::pascal::supplemented_pascal;

pub const DEFAULT_SUBSET_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MdsVerdict {
    pub is_mds: bool,
    /// Lexicographically first dependent `k`-subset, when there is one.
    pub witness: Option<Vec<usize>>,
    /// Subsets ranked: all `C(n, k)` on success, up to and including the
    /// witness otherwise.
    pub subsets_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsOptions {
    pub subset_cap: u64,
    pub threads: usize,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self {
            subset_cap: DEFAULT_SUBSET_CAP,
            threads: 1,
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// The `k`-subset of `0..n` with lexicographic rank `rank`.
pub fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut c = 0;
    for i in 0..k {
        loop {
            let count = binomial((n - c - 1) as u64, (k - i - 1) as u64);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        c += 1;
    }
    out
}

/// Advances `comb` to the next `k`-subset of `0..n`; false when exhausted.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let Some(i) = (0..k).rev().find(|&i| comb[i] < n - k + i) else {
        return false;
    };
    comb[i] += 1;
    for j in i + 1..k {
        comb[j] = comb[j - 1] + 1;
    }
    true
}

pub fn is_mds(m: &MatrixGF) -> Result<MdsVerdict> {
    is_mds_with(m, &MdsOptions::default())
}

pub fn is_mds_with(m: &MatrixGF, opts: &MdsOptions) -> Result<MdsVerdict> {
    let (k, n) = (m.rows(), m.cols());
    if k == 0 || n < k {
        return Err(Error::DimensionMismatch(format!(
            "MDS check needs 1 <= rows <= cols, got {k}x{n}"
        )));
    }
    let total = binomial(n as u64, k as u64);
    if total > opts.subset_cap as u128 {
        return Err(Error::EnumerationCap {
            needed: total,
            cap: opts.subset_cap,
        });
    }
    let total = total as u64;
    let threads = opts.threads.clamp(1, total.max(1) as usize);
    let best = AtomicU64::new(u64::MAX);

    if threads == 1 {
        scan_chunk(m, 0, total, &best);
    } else {
        let chunk = total.div_ceil(threads as u64);
        std::thread::scope(|s| {
            for t in 0..threads as u64 {
                let (start, end) = (t * chunk, ((t + 1) * chunk).min(total));
                let best = &best;
                if start < end {
                    s.spawn(move || scan_chunk(m, start, end, best));
                }
            }
        });
    }

    let first_bad = best.load(Ordering::Relaxed);
    Ok(if first_bad == u64::MAX {
        MdsVerdict {
            is_mds: true,
            witness: None,
            subsets_checked: total,
        }
    } else {
        MdsVerdict {
            is_mds: false,
            witness: Some(unrank_combination(first_bad as u128, n, k)),
            subsets_checked: first_bad + 1,
        }
    })
}

// Ranks subsets start..end; records the smallest dependent rank in `best`.
fn scan_chunk(m: &MatrixGF, start: u64, end: u64, best: &AtomicU64) {
    let (k, n) = (m.rows(), m.cols());
    let field = m.field();
    let mut comb = unrank_combination(start as u128, n, k);
    let mut buf = vec![FieldElement::ZERO; k * k];
    for idx in start..end {
        if idx > best.load(Ordering::Relaxed) {
            return;
        }
        for r in 0..k {
            for (c, &col) in comb.iter().enumerate() {
                buf[r * k + c] = m.get(r, col);
            }
        }
        if rank_in_place(field, &mut buf, k, k) < k {
            best.fetch_min(idx, Ordering::Relaxed);
            return;
        }
        next_combination(&mut comb, n);
    }
}

/// Reed-Solomon generator with evaluation points `σ(1) .. σ(n)`:
/// entry `(m, j)` is `σ(j+1)^m`.
pub fn rs_generator(field: &FieldParams, k: usize, n: usize) -> Result<MatrixGF> {
    let q = field.order() as usize;
    if n > q - 1 {
        return Err(Error::OutOfRange(format!(
            "n = {n} exceeds the {} nonzero evaluation points",
            q - 1
        )));
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} outside [1, n = {n}]")));
    }
    let points: Vec<FieldElement> = (1..=n as u64)
        .map(|j| field.sigma(j))
        .collect::<Result<_>>()?;
    Ok(MatrixGF::from_fn(field, k, n, |m, j| {
        field.pow(points[j], m as u64)
    }))
}

/// Appends `s_k = (0, .., 0, 1)ᵀ`.
pub fn supplement(m: &MatrixGF) -> Result<MatrixGF> {
    let k = m.rows();
    if k == 0 {
        return Err(Error::DimensionMismatch("cannot supplement a 0-row matrix".into()));
    }
    let mut s = vec![FieldElement::ZERO; k];
    s[k - 1] = FieldElement::ONE;
    m.append_column(&s)
}

/// A `k x n` matrix over GF(q) whose columns realize the uniform matroid
/// `U_n^k`: the first `n` columns of `H_{q,k}`. Requires `k <= n <= q+1`.
pub fn uniform_matroid_representation(field: &FieldParams, k: usize, n: usize) -> Result<MatrixGF> {
    let budget = field.order() as usize + 1;
    if n > budget {
        return Err(Error::OutOfRange(format!(
            "n = {n} exceeds q+1 = {budget}"
        )));
    }
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
    }
    supplemented_pascal(field, k)?.first_columns(n)
}

/// Clears the last row of the first `q` columns of `H_{q,k}` by subtracting
/// multiples of the unit column. The result carries `P_{q,k-1}` in its
/// top-left block and `(0, .., 0, 1)` as its last row.
pub fn decompose_supplemented(m: &MatrixGF) -> Result<MatrixGF> {
    let (k, cols) = (m.rows(), m.cols());
    let q = m.field().order() as usize;
    if k < 2 {
        return Err(Error::NotSupplemented(format!("needs k >= 2, got {k}")));
    }
    if cols != q + 1 {
        return Err(Error::NotSupplemented(format!(
            "expected {} columns, got {cols}",
            q + 1
        )));
    }
    let last = m.column(q);
    if last[..k - 1].iter().any(|e| !e.is_zero()) || last[k - 1] != FieldElement::ONE {
        return Err(Error::NotSupplemented("last column is not s_k".into()));
    }
    let f = m.field();
    let mut out = m.clone();
    for c in 0..q {
        // column c -= M[k-1][c] * s_k; s_k only touches the last row
        let v = f.sub(out.get(k - 1, c), f.mul(m.get(k - 1, c), FieldElement::ONE));
        out.set(k - 1, c, v);
    }
    Ok(out)
}
