//! Pascal matrices over GF(q).
//!
//! Row `m` of `P_q` evaluates the degree-`m` binomial polynomial
//!
//! ```text
//! f_0(n) = 1
//! f_m(n) = Π_{i=1..m} (σ(n) - σ(i-1)) / σ(i)
//! ```
//!
//! at every field element. `f_m` vanishes exactly on `σ(0) .. σ(m-1)`, which
//! makes `P_q` upper triangular and gives row `m` exactly `m` zeros. Any `k`
//! columns of the first `k` rows are independent, and that survives adding
//! the unit column `s_k = (0, .., 0, 1)ᵀ`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{is_prime, make_field, FieldElement, FieldParams};
use crate::matrices::MatrixGF;

/// Which Pascal matrix to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PascalSpec {
    pub field: FieldParams,
    pub k: usize,
    pub supplemented: bool,
}

impl PascalSpec {
    pub fn new(field: FieldParams, k: usize, supplemented: bool) -> Result<Self> {
        check_k(&field, k)?;
        Ok(Self {
            field,
            k,
            supplemented,
        })
    }

    pub fn build(&self) -> Result<MatrixGF> {
        if self.supplemented {
            supplemented_pascal(&self.field, self.k)
        } else {
            truncated_pascal(&self.field, self.k)
        }
    }
}

fn check_k(field: &FieldParams, k: usize) -> Result<()> {
    if k == 0 || k > field.order() as usize {
        return Err(Error::OutOfRange(format!(
            "k = {k} outside [1, {}]",
            field.order()
        )));
    }
    Ok(())
}

/// `f_m(n)`, evaluated directly from the product formula.
pub fn binom(field: &FieldParams, m: u64, n: u64) -> Result<FieldElement> {
    let q = field.order() as u64;
    if m >= q {
        return Err(Error::OutOfRange(format!("m = {m} outside [0, {}]", q - 1)));
    }
    let x = field.sigma(n)?;
    let mut acc = FieldElement::ONE;
    for i in 1..=m {
        let num = field.sub(x, field.sigma(i - 1)?);
        acc = field.mul(acc, field.div(num, field.sigma(i)?)?);
    }
    Ok(acc)
}

/// The full `q x q` Pascal matrix. Quadratic in `q`; meant for small fields.
pub fn pascal_matrix(field: &FieldParams) -> MatrixGF {
    build_rows(field, field.order() as usize)
}

/// First `k` rows of the Pascal matrix, `k x q`.
pub fn truncated_pascal(field: &FieldParams, k: usize) -> Result<MatrixGF> {
    check_k(field, k)?;
    Ok(build_rows(field, k))
}

/// The truncated matrix with `s_k` appended, `k x (q+1)`.
pub fn supplemented_pascal(field: &FieldParams, k: usize) -> Result<MatrixGF> {
    let t = truncated_pascal(field, k)?;
    let mut s = vec![FieldElement::ZERO; k];
    s[k - 1] = FieldElement::ONE;
    t.append_column(&s)
}

// Row m is row m-1 times (σ(n) - σ(m-1)) / σ(m), one inversion per row.
fn build_rows(field: &FieldParams, k: usize) -> MatrixGF {
    let q = field.order() as usize;
    let mut out = MatrixGF::zeros(field, k, q);
    let mut row = vec![FieldElement::ONE; q];
    for m in 0..k {
        if m > 0 {
            let root = field.sigma(m as u64 - 1).expect("m < q");
            let scale = field
                .inv(field.sigma(m as u64).expect("m < q"))
                .expect("σ(m) is nonzero for m >= 1");
            for (n, v) in row.iter_mut().enumerate() {
                let x = field.sigma(n as u64).expect("n < q");
                *v = field.mul(*v, field.mul(field.sub(x, root), scale));
            }
        }
        for (n, &v) in row.iter().enumerate() {
            out.set(m, n, v);
        }
    }
    out
}

/// First `k` rows of the Pascal matrix over GF(p), built with additions only
/// via `entry(m, n) = entry(m-1, n-1) + entry(m, n-1)`.
pub fn pascal_additive(p: u64, k: usize) -> Result<MatrixGF> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let field = make_field(p, 1)?;
    check_k(&field, k)?;
    let cols = p as usize;
    let mut out = MatrixGF::zeros(&field, k, cols);
    for n in 0..cols {
        out.set(0, n, FieldElement::ONE);
    }
    for m in 1..k {
        for n in 1..cols {
            let v = field.add(out.get(m - 1, n - 1), out.get(m, n - 1));
            out.set(m, n, v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparsityReport {
    pub zeros: u64,
    /// Upper bound `k(k-1)` on the zeros of a `k`-row MDS generator.
    pub max_possible: u64,
    /// `zeros / max_possible`; absent when `k = 1` and the bound is 0.
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Option<Ratio<u64>>,
}

fn ser_ratio<S: serde::Serializer>(r: &Option<Ratio<u64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

/// Zero count of `m` against the per-row bound: each of the `k` rows of an
/// MDS generator has at most `k-1` zeros, otherwise `k` columns chosen among
/// its zero positions would contain an all-zero row.
///
/// The MDS property of `m` is assumed, not checked.
pub fn sparsity_report(m: &MatrixGF) -> SparsityReport {
    let k = m.rows() as u64;
    let zeros = m.count_zeros() as u64;
    let max_possible = k * k.saturating_sub(1);
    SparsityReport {
        zeros,
        max_possible,
        ratio: (max_possible > 0).then(|| Ratio::new(zeros, max_possible)),
    }
}
