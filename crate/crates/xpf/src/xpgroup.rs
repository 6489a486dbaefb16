//! Group structure of XP operators: the Zp homomorphism, canonical
//! generators and generator products.

use crate::error::{Result, XpError};
use crate::ringlinalg::{howell_basis, leading_indices, residue_howell, RingMatrix};
use crate::xpop::XpOperator;

/// Canonical generators `(S_X, S_Z)` of an XP group.
///
/// The X components of `S_X` form a binary RREF matrix, the Zp images of
/// `S_Z` form a Howell matrix over Z_2N, and each member of `S_X` has its
/// Zp part reduced against `S_Z`. The pair is unique for the group.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CanonicalGenerators {
    pub sx: Vec<XpOperator>,
    pub sz: Vec<XpOperator>,
}

impl CanonicalGenerators {
    /// All generators, non-diagonal first.
    pub fn all(&self) -> Vec<XpOperator> {
        self.sx.iter().chain(&self.sz).cloned().collect()
    }

    /// Binary matrix of the X components of `S_X`.
    pub fn sx_matrix(&self, n: usize) -> RingMatrix {
        x_matrix(&self.sx, n)
    }

    /// Leading indices of the X components of `S_X`.
    pub fn sx_leading_indices(&self, n: usize) -> Vec<usize> {
        leading_indices(&self.sx_matrix(n))
    }
}

/// Binary matrix whose rows are the X components of `ops`.
pub fn x_matrix(ops: &[XpOperator], n: usize) -> RingMatrix {
    RingMatrix::new(
        2,
        n,
        ops.iter()
            .map(|a| a.x().iter().map(|&b| b as i64).collect::<Vec<_>>()),
    )
}

/// Zp image `(2z|p)` over Z_2N of a diagonal operator.
pub fn zp_map(b: &XpOperator) -> Result<Vec<i64>> {
    if !b.is_diagonal() {
        return Err(XpError::InvalidArgument(format!(
            "zp_map needs a diagonal operator, got {b}"
        )));
    }
    Ok(zp_unchecked(b))
}

fn zp_unchecked(b: &XpOperator) -> Vec<i64> {
    let mut v: Vec<i64> = b.z().iter().map(|z| 2 * z).collect();
    v.push(b.p());
    v
}

/// Diagonal operator with Zp image `row`.
fn from_zp(precision: i64, row: &[i64]) -> XpOperator {
    let n = row.len() - 1;
    XpOperator::new(
        precision,
        row[n],
        vec![0; n],
        row[..n].iter().map(|v| v / 2).collect::<Vec<_>>(),
    )
}

/// Howell basis over Z_2N of the Zp images of diagonal operators.
pub fn zp_howell(precision: i64, n: usize, ops: &[XpOperator]) -> RingMatrix {
    let rows: Vec<Vec<i64>> = ops.iter().map(zp_unchecked).collect();
    howell_basis(&RingMatrix::new(2 * precision, n + 1, rows))
}

fn operators_from_howell(precision: i64, h: &RingMatrix) -> Vec<XpOperator> {
    h.rows().map(|row| from_zp(precision, row)).collect()
}

/// Canonical generators of `⟨G⟩`.
///
/// # Panics
///
/// Panics if the operators differ in precision or qubit count.
pub fn canonical(g: &[XpOperator]) -> CanonicalGenerators {
    let Some(first) = g.first() else {
        return CanonicalGenerators::default();
    };
    let (precision, n) = (first.precision(), first.n());
    let mut ops = g.to_vec();

    // Row-reduce the X components using group products.
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..ops.len()).find(|&i| ops[i].x()[c] == 1) else {
            continue;
        };
        ops.swap(r, p);
        for i in 0..ops.len() {
            if i != r && ops[i].x()[c] == 1 {
                ops[i] = ops[i].mul(&ops[r]);
            }
        }
        r += 1;
    }
    let sx: Vec<XpOperator> = ops[..r].to_vec();
    let mut diag: Vec<XpOperator> = ops[r..].to_vec();
    diag.extend(sx.iter().map(XpOperator::square));
    for i in 0..sx.len() {
        for j in i + 1..sx.len() {
            diag.push(sx[i].comm(&sx[j]));
        }
    }

    // Close the diagonal subgroup under commutators with S_X.
    let mut h = zp_howell(precision, n, &diag);
    loop {
        let current = operators_from_howell(precision, &h);
        let mut extended = current.clone();
        for a in &sx {
            for b in &current {
                extended.push(a.comm(b));
            }
        }
        let next = zp_howell(precision, n, &extended);
        if next == h {
            break;
        }
        h = next;
    }

    let sx = sx
        .iter()
        .map(|a| {
            let mut row: Vec<i64> = a.z().iter().map(|z| 2 * z).collect();
            row.push(a.p());
            let res = residue_howell(&h, &row);
            XpOperator::new(
                precision,
                res[n],
                a.x().to_vec(),
                res[..n].iter().map(|v| v / 2).collect::<Vec<_>>(),
            )
        })
        .collect();
    CanonicalGenerators {
        sx,
        sz: operators_from_howell(precision, &h),
    }
}

/// True iff the two generator sets generate the same group.
pub fn same_group(g1: &[XpOperator], g2: &[XpOperator]) -> bool {
    canonical(g1) == canonical(g2)
}

/// Ordered product `∏ S_i^{a_i}` in listed order.
///
/// # Panics
///
/// Panics if `a` and `s` differ in length.
pub fn generator_product(precision: i64, n: usize, s: &[XpOperator], a: &[i64]) -> XpOperator {
    assert_eq!(s.len(), a.len(), "generator_product length mismatch");
    s.iter()
        .zip(a)
        .fold(XpOperator::identity(precision, n), |acc, (op, &k)| {
            acc.mul(&op.pow(k))
        })
}

/// Nonzero `q` with `ω^q I ∈ ⟨S_Z⟩`, if one exists.
///
/// `sz` must be the canonical diagonal generators.
pub fn inconsistent_phase(sz: &[XpOperator]) -> Option<i64> {
    sz.iter()
        .find(|b| b.z().iter().all(|&v| v == 0) && b.p() != 0)
        .map(XpOperator::p)
}
