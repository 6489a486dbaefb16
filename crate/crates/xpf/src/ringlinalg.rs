//! Exact linear algebra over the residue ring Z_N.
//!
//! Matrices are dense and row-major with entries reduced into `[0, N)`.
//! The central tool is the Howell form, the canonical echelon form of a
//! row span over Z_N. Kernels, residues, linear solving and span
//! intersections are all built from it.

use std::fmt;

use num_integer::Integer;

/// Largest modulus accepted by [`RingMatrix`].
pub const MAX_MODULUS: i64 = 1 << 16;

/// Dense matrix over Z_N.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingMatrix {
    modulus: i64,
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl RingMatrix {
    /// Builds a matrix from rows of arbitrary integers, reducing every entry.
    ///
    /// # Panics
    ///
    /// Panics if the modulus is outside `[2, MAX_MODULUS]` or a row does not
    /// have `cols` entries.
    pub fn new<R: AsRef<[i64]>>(
        modulus: i64,
        cols: usize,
        rows: impl IntoIterator<Item = R>,
    ) -> Self {
        assert!(
            (2..=MAX_MODULUS).contains(&modulus),
            "modulus {modulus} outside [2, {MAX_MODULUS}]"
        );
        let mut data = Vec::new();
        let mut count = 0;
        for row in rows {
            let row = row.as_ref();
            assert_eq!(
                row.len(),
                cols,
                "row {count} has {} entries, expected {cols}",
                row.len()
            );
            data.extend(row.iter().map(|v| v.rem_euclid(modulus)));
            count += 1;
        }
        RingMatrix {
            modulus,
            rows: count,
            cols,
            data,
        }
    }

    /// Zero matrix of the given shape.
    pub fn zeros(modulus: i64, rows: usize, cols: usize) -> Self {
        Self::new(modulus, cols, (0..rows).map(|_| vec![0; cols]))
    }

    /// Identity matrix of size `n`.
    pub fn identity(modulus: i64, n: usize) -> Self {
        Self::new(modulus, n, (0..n).map(|i| unit_vector(n, i)))
    }

    /// Matrix with no rows.
    pub fn empty(modulus: i64, cols: usize) -> Self {
        Self::new(modulus, cols, std::iter::empty::<Vec<i64>>())
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// True when the matrix has no rows.
    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Owned copies of the rows.
    pub fn to_vecs(&self) -> Vec<Vec<i64>> {
        self.rows().map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::new(
            self.modulus,
            self.rows,
            (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).collect::<Vec<_>>()),
        )
    }

    /// Rows of `self` followed by rows of `other`.
    ///
    /// # Panics
    ///
    /// Panics if modulus or column count differ.
    pub fn vstack(&self, other: &RingMatrix) -> Self {
        assert_eq!(self.modulus, other.modulus, "vstack modulus mismatch");
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        Self::new(self.modulus, self.cols, self.rows().chain(other.rows()))
    }

    /// Columns of `self` followed by columns of `other`.
    ///
    /// # Panics
    ///
    /// Panics if modulus or row count differ.
    pub fn hstack(&self, other: &RingMatrix) -> Self {
        assert_eq!(self.modulus, other.modulus, "hstack modulus mismatch");
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::new(
            self.modulus,
            self.cols + other.cols,
            (0..self.rows).map(|i| [self.row(i), other.row(i)].concat()),
        )
    }

    /// Row vector times matrix: `v·M mod N`.
    pub fn left_mul(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.rows, "left_mul length mismatch");
        let mut out = vec![0; self.cols];
        for (i, &c) in v.iter().enumerate() {
            let c = c.rem_euclid(self.modulus);
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o = (*o + c * m) % self.modulus;
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &RingMatrix) -> Self {
        assert_eq!(self.modulus, other.modulus, "matmul modulus mismatch");
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Self::new(
            self.modulus,
            other.cols,
            self.rows().map(|r| other.left_mul(r)),
        )
    }

    /// Reinterprets the entries over a different modulus.
    pub fn with_modulus(&self, modulus: i64) -> Self {
        Self::new(modulus, self.cols, self.rows())
    }

    /// True if every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let parts: Vec<String> = row.iter().map(i64::to_string).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Howell form of a matrix together with its transformation record.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HowellForm {
    /// Howell basis of the row span, zero rows removed.
    pub h: RingMatrix,
    /// Transformation with `U·M = (H; 0)`.
    ///
    /// The first `h.nrows()` rows produce the rows of `H`. The remaining
    /// rows form a Howell basis of the left kernel `{u : u·M = 0}`.
    pub u: RingMatrix,
}

impl HowellForm {
    /// Rows of `U` that produce the rows of `H`.
    pub fn basis_transform(&self) -> RingMatrix {
        RingMatrix::new(
            self.u.modulus(),
            self.u.ncols(),
            self.u.rows().take(self.h.nrows()),
        )
    }

    /// Rows of `U` spanning the left kernel of the input.
    pub fn left_kernel(&self) -> RingMatrix {
        RingMatrix::new(
            self.u.modulus(),
            self.u.ncols(),
            self.u.rows().skip(self.h.nrows()),
        )
    }
}

/// Affine span `offset + Span(basis)` over Z_N.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSpan {
    /// Canonical offset: its residue against `basis` is itself.
    pub offset: Vec<i64>,
    /// Howell basis of the linear part.
    pub basis: RingMatrix,
}

impl AffineSpan {
    /// Builds an affine span, canonicalising the basis and the offset.
    pub fn new(offset: &[i64], basis: &RingMatrix) -> Self {
        assert_eq!(offset.len(), basis.ncols(), "affine span length mismatch");
        let basis = howell_basis(basis);
        let offset = residue_howell(&basis, offset);
        AffineSpan { offset, basis }
    }

    pub fn modulus(&self) -> i64 {
        self.basis.modulus()
    }

    /// Membership test.
    pub fn contains(&self, v: &[i64]) -> bool {
        let n = self.modulus();
        let diff: Vec<i64> = v
            .iter()
            .zip(&self.offset)
            .map(|(a, b)| (a - b).rem_euclid(n))
            .collect();
        residue_howell(&self.basis, &diff).iter().all(|&c| c == 0)
    }
}

fn unit_vector(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Minimal associate of `a` in Z_N, namely `GCD(N, a)` (and 0 for 0).
pub fn minimal_associate(a: i64, modulus: i64) -> i64 {
    let a = a.rem_euclid(modulus);
    if a == 0 {
        0
    } else {
        a.gcd(&modulus)
    }
}

/// Unit `u` of Z_N with `u·a ≡ GCD(N, a) (mod N)`.
fn unit_normaliser(a: i64, modulus: i64) -> i64 {
    let g = a.gcd(&modulus);
    if g == 0 {
        return 1;
    }
    let reduced = a / g;
    let m = modulus / g;
    let mut u = if m == 1 {
        1
    } else {
        mod_inverse(reduced.rem_euclid(m), m)
    };
    while u.gcd(&modulus) != 1 {
        u += m;
    }
    u % modulus
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Core Howell reduction on plain rows; returns the nonzero basis rows.
fn howell_rows(mut a: Vec<Vec<i64>>, cols: usize, n: i64) -> Vec<Vec<i64>> {
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v = v.rem_euclid(n);
        }
    }
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            let x = a[r][c];
            let y = a[i][c];
            let e = x.extended_gcd(&y);
            let (s, t, g) = (e.x, e.y, e.gcd);
            let (xg, yg) = (x / g, y / g);
            let (top, bottom): (Vec<i64>, Vec<i64>) = a[r]
                .iter()
                .zip(&a[i])
                .map(|(&u, &v)| {
                    (
                        (s * u + t * v).rem_euclid(n),
                        (yg * u - xg * v).rem_euclid(n),
                    )
                })
                .unzip();
            a[r] = top;
            a[i] = bottom;
        }
        if a[r][c] == 0 {
            continue;
        }
        let unit = unit_normaliser(a[r][c], n);
        for v in a[r].iter_mut() {
            *v = (*v * unit) % n;
        }
        let g = a[r][c];
        for i in 0..r {
            let k = a[i][c] / g;
            if k != 0 {
                let pivot_row = a[r].clone();
                for (v, &p) in a[i].iter_mut().zip(&pivot_row) {
                    *v = (*v - k * p).rem_euclid(n);
                }
            }
        }
        let annihilator: Vec<i64> = a[r].iter().map(|&v| (n / g) * v % n).collect();
        if annihilator.iter().any(|&v| v != 0) {
            a.push(annihilator);
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|&v| v != 0));
    a
}

/// Howell basis of the row span of `m`, without the transformation record.
pub fn howell_basis(m: &RingMatrix) -> RingMatrix {
    let rows = howell_rows(m.to_vecs(), m.ncols(), m.modulus());
    RingMatrix::new(m.modulus(), m.ncols(), rows)
}

/// Howell form of `m` with transformation `U`.
pub fn howell(m: &RingMatrix) -> HowellForm {
    let n = m.modulus();
    let (rows, cols) = (m.nrows(), m.ncols());
    let augmented = m.hstack(&RingMatrix::identity(n, rows));
    let reduced = howell_rows(augmented.to_vecs(), cols + rows, n);
    let mut h = Vec::new();
    let mut u = Vec::new();
    let mut kernel = Vec::new();
    for row in reduced {
        let (left, right) = row.split_at(cols);
        if left.iter().any(|&v| v != 0) {
            h.push(left.to_vec());
            u.push(right.to_vec());
        } else {
            kernel.push(right.to_vec());
        }
    }
    u.extend(kernel);
    HowellForm {
        h: RingMatrix::new(n, cols, h),
        u: RingMatrix::new(n, rows, u),
    }
}

/// Reduced row echelon form over Z_2 with its transformation record.
///
/// # Panics
///
/// Panics if the modulus is not 2.
pub fn rref2(m: &RingMatrix) -> HowellForm {
    assert_eq!(m.modulus(), 2, "rref2 needs a binary matrix");
    howell(m)
}

/// Index of the first nonzero entry of each row.
pub fn leading_indices(h: &RingMatrix) -> Vec<usize> {
    h.rows()
        .map(|row| {
            row.iter()
                .position(|&v| v != 0)
                .expect("zero row in echelon matrix")
        })
        .collect()
}

/// Residue of `a` against a matrix already in Howell form.
pub fn residue_howell(h: &RingMatrix, a: &[i64]) -> Vec<i64> {
    assert_eq!(a.len(), h.ncols(), "residue length mismatch");
    let n = h.modulus();
    let mut a: Vec<i64> = a.iter().map(|v| v.rem_euclid(n)).collect();
    for row in h.rows() {
        let c = row
            .iter()
            .position(|&v| v != 0)
            .expect("zero row in Howell matrix");
        let k = a[c] / row[c];
        if k != 0 {
            for (v, &b) in a.iter_mut().zip(row) {
                *v = (*v - k * b).rem_euclid(n);
            }
        }
    }
    a
}

/// Canonical representative of the coset `a + Span(B)`.
///
/// The result is zero exactly when `a` lies in the span of `B`, and two
/// vectors have equal residues exactly when they lie in the same coset.
pub fn residue(b: &RingMatrix, a: &[i64]) -> Vec<i64> {
    residue_howell(&howell_basis(b), a)
}

/// True if `a` lies in the row span of `b`.
pub fn in_span(b: &RingMatrix, a: &[i64]) -> bool {
    residue(b, a).iter().all(|&v| v == 0)
}

/// Howell basis `K` of `{v : v·Mᵀ = 0}`.
pub fn kernel(m: &RingMatrix) -> RingMatrix {
    let n = m.modulus();
    let (rows, cols) = (m.nrows(), m.ncols());
    let augmented = m.transpose().hstack(&RingMatrix::identity(n, cols));
    let reduced = howell_rows(augmented.to_vecs(), rows + cols, n);
    let right: Vec<Vec<i64>> = reduced
        .into_iter()
        .filter(|row| row[..rows].iter().all(|&v| v == 0))
        .map(|row| row[rows..].to_vec())
        .collect();
    RingMatrix::new(n, cols, howell_rows(right, cols, n))
}

/// Full solution set of `x·Aᵀ + c = 0 (mod N)`, or `None` if unsolvable.
pub fn solve_linear(a: &RingMatrix, c: &[i64]) -> Option<AffineSpan> {
    let n = a.modulus();
    let (rows, cols) = (a.nrows(), a.ncols());
    assert_eq!(c.len(), rows, "solve_linear length mismatch");
    let augmented = a.transpose().hstack(&RingMatrix::identity(n, cols));
    let h = RingMatrix::new(
        n,
        rows + cols,
        howell_rows(augmented.to_vecs(), rows + cols, n),
    );
    let mut target = c.to_vec();
    target.resize(rows + cols, 0);
    let reduced = residue_howell(&h, &target);
    if reduced[..rows].iter().any(|&v| v != 0) {
        return None;
    }
    Some(AffineSpan::new(&reduced[rows..], &kernel(a)))
}

/// Howell basis of `Span(A) ∩ Span(B)`.
pub fn span_intersection(a: &RingMatrix, b: &RingMatrix) -> RingMatrix {
    assert_eq!(a.modulus(), b.modulus(), "intersection modulus mismatch");
    assert_eq!(a.ncols(), b.ncols(), "intersection column mismatch");
    let n = a.modulus();
    let cols = a.ncols();
    let top = a.hstack(a);
    let bottom = b.hstack(&RingMatrix::zeros(n, b.nrows(), cols));
    let reduced = howell_rows(top.vstack(&bottom).to_vecs(), 2 * cols, n);
    let right: Vec<Vec<i64>> = reduced
        .into_iter()
        .filter(|row| row[..cols].iter().all(|&v| v == 0))
        .map(|row| row[cols..].to_vec())
        .collect();
    RingMatrix::new(n, cols, howell_rows(right, cols, n))
}

/// Intersection of two affine spans, or `None` if they are disjoint.
pub fn affine_intersection(s1: &AffineSpan, s2: &AffineSpan) -> Option<AffineSpan> {
    let n = s1.modulus();
    assert_eq!(n, s2.modulus(), "affine intersection modulus mismatch");
    assert_eq!(
        s1.offset.len(),
        s2.offset.len(),
        "affine intersection length mismatch"
    );
    // Find (u | w) with u·A + w·B = b − a, so that a + u·A lies in both sets.
    let stacked = s1.basis.vstack(&s2.basis);
    let c: Vec<i64> = s1
        .offset
        .iter()
        .zip(&s2.offset)
        .map(|(a, b)| a - b)
        .collect();
    let solution = solve_linear(&stacked.transpose(), &c)?;
    let u = &solution.offset[..s1.basis.nrows()];
    let step = s1.basis.left_mul(u);
    let point: Vec<i64> = s1.offset.iter().zip(&step).map(|(a, s)| a + s).collect();
    Some(AffineSpan::new(
        &point,
        &span_intersection(&s1.basis, &s2.basis),
    ))
}
