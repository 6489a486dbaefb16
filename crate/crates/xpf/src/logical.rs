//! Logical structure of XP codes: the logical identity group, diagonal and
//! non-diagonal logical operators, phase vectors, classification, the CSS
//! mapping of XP-regular codes and the Reed-Muller family.

use std::collections::HashMap;

use crate::codespace::{orbit_reps, CosetDecomposition, Limits, OrbitForm, XpCode};
use crate::error::{Result, XpError};
use crate::ringlinalg::{
    affine_intersection, howell, howell_basis, kernel, residue_howell, solve_linear,
    span_intersection, AffineSpan, RingMatrix,
};
use crate::states::embedding_matrix;
use crate::xpgroup::{generator_product, zp_howell, zp_map, CanonicalGenerators};
use crate::xpop::{dot, xor, XpOperator};

/// Canonical generators of the logical identity group.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LogicalIdentity {
    /// Non-diagonal generators `M_X`.
    pub mx: Vec<XpOperator>,
    /// Diagonal generators `M_Z`.
    pub mz: Vec<XpOperator>,
}

impl LogicalIdentity {
    /// All generators, non-diagonal first.
    pub fn all(&self) -> Vec<XpOperator> {
        self.mx.iter().chain(&self.mz).cloned().collect()
    }
}

/// A row of `L_X` for which no logical X operator was found.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogicalXFailure {
    pub x: Vec<u8>,
    pub reason: String,
}

/// Action `A|κ_i⟩ = ω^{f[i]}|κ_{π(i)}⟩` of a logical operator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhaseVector {
    /// Phase exponents over Z_2N.
    pub f: Vec<i64>,
    /// Codeword permutation; an involution.
    pub perm: Vec<usize>,
}

impl PhaseVector {
    /// True if the operator maps every codeword to a multiple of itself.
    pub fn is_diagonal_action(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Achievable diagonal logical actions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ActionBasis {
    /// Howell basis over Z_2N of the phase vectors of diagonal logical operators.
    pub fd: RingMatrix,
    /// `ld[i]` has phase vector `fd.row(i)`.
    pub ld: Vec<XpOperator>,
}

/// Complete logical structure of a code.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogicalGroupData {
    pub identity: LogicalIdentity,
    /// Non-trivial diagonal logical generators.
    pub lz: Vec<XpOperator>,
    /// One entry per row of `L_X`.
    pub lx: Vec<std::result::Result<XpOperator, LogicalXFailure>>,
    pub basis: ActionBasis,
}

impl LogicalGroupData {
    /// The logical X operators that were found.
    pub fn lx_ops(&self) -> Vec<XpOperator> {
        self.lx
            .iter()
            .filter_map(|r| r.as_ref().ok().cloned())
            .collect()
    }
}

/// Whether the core `E_q` has a single element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CodeClass {
    XpRegular,
    NonXpRegular,
}

/// How a diagonal logical operator's phases depend on the quantum numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OperatorClass {
    /// Phases depend only on the logical index.
    Regular,
    /// Phases depend only on the core index.
    Core,
    /// Phases are the same on every codeword.
    Both,
    Neither,
}

/// CSS code with the same codespace up to a diagonal change of basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CssMapping {
    /// Precision 2 non-diagonal generators.
    pub rx: Vec<XpOperator>,
    /// Precision 2 diagonal generators.
    pub rz: Vec<XpOperator>,
    /// Phase `p` of each `|e⟩, e ∈ E` in the original codewords, sorted by `e`.
    ///
    /// The diagonal unitary `|e⟩ ↦ ω^{-p}|e⟩` maps the original codewords
    /// onto those of the CSS code.
    pub transition: Vec<(Vec<u8>, i64)>,
}

type TermMap = HashMap<Vec<u8>, (usize, i64)>;

fn shape(codewords: &[OrbitForm]) -> Result<(i64, usize)> {
    let first = codewords
        .first()
        .and_then(|cw| cw.terms.first().map(|t| (cw.precision, t.1.len())))
        .ok_or_else(|| XpError::InvalidArgument("no codewords given".into()))?;
    if codewords
        .iter()
        .any(|cw| cw.precision != first.0 || cw.is_empty())
    {
        return Err(XpError::Mismatch(
            "codewords differ in precision or are empty".into(),
        ));
    }
    Ok(first)
}

fn term_map(codewords: &[OrbitForm]) -> TermMap {
    let mut map = HashMap::new();
    for (i, cw) in codewords.iter().enumerate() {
        for (p, e) in &cw.terms {
            map.insert(e.clone(), (i, *p));
        }
    }
    map
}

fn ints(bits: &[u8]) -> Vec<i64> {
    bits.iter().map(|&b| b as i64).collect()
}

fn bits(row: &[i64]) -> Vec<u8> {
    row.iter().map(|&v| v as u8).collect()
}

fn negate(v: &[i64]) -> Vec<i64> {
    v.iter().map(|a| -a).collect()
}

/// Matrix over Z_N with rows `(e|1)`.
fn support_matrix(precision: i64, n: usize, members: &[Vec<u8>]) -> RingMatrix {
    RingMatrix::new(
        precision,
        n + 1,
        members.iter().map(|e| {
            let mut row = ints(e);
            row.push(1);
            row
        }),
    )
}

fn mz_from_kernel(precision: i64, n: usize, km: &RingMatrix) -> Vec<XpOperator> {
    km.rows()
        .map(|row| XpOperator::new(precision, 2 * row[n], vec![0; n], row[..n].to_vec()))
        .collect()
}

/// Codeword index and phase of a support element.
type Lookup<'a> = dyn Fn(&[u8]) -> Option<(usize, i64)> + 'a;

/// Non-diagonal logical identity with X component `x`.
///
/// `members` lists the support elements used to build `em`, and `lookup`
/// returns the codeword index and phase of any element of `E`.
fn identity_with_x(
    precision: i64,
    x: &[u8],
    members: &[Vec<u8>],
    lookup: &Lookup,
    em: &RingMatrix,
    km: &RingMatrix,
) -> Result<XpOperator> {
    let n = x.len();
    let two_n = 2 * precision;
    let mut diffs = Vec::with_capacity(members.len());
    for e in members {
        let missing = || XpError::NotXpCodespace(format!("no phase recorded for {e:?}"));
        let (i, p) = lookup(e).ok_or_else(missing)?;
        let (j, q) = lookup(&xor(e, x)).ok_or_else(missing)?;
        if i != j {
            return Err(XpError::NotXpCodespace(
                "an X component of the stabilisers moves a term between codewords".into(),
            ));
        }
        diffs.push((q - p).rem_euclid(two_n));
    }
    let a = diffs.first().map_or(0, |d| d % 2);
    if diffs.iter().any(|d| d % 2 != a) {
        return Err(XpError::NotXpCodespace(
            "relative phases mix even and odd values".into(),
        ));
    }
    let target: Vec<i64> = diffs.iter().map(|d| -(d - a) / 2).collect();
    let solution = solve_linear(em, &target)
        .ok_or_else(|| XpError::NotXpCodespace("relative phases admit no XP operator".into()))?;
    let r = residue_howell(km, &solution.offset);
    Ok(XpOperator::new(
        precision,
        a + 2 * r[n],
        x.to_vec(),
        r[..n].to_vec(),
    ))
}

/// Logical identity group of the span of `codewords`.
///
/// Fails with [`XpError::NotXpCodespace`] when the span is not the
/// codespace of an XP code at the codewords' precision.
pub fn logical_identity(codewords: &[OrbitForm]) -> Result<LogicalIdentity> {
    let (precision, n) = shape(codewords)?;
    let map = term_map(codewords);

    // X components from the first codeword.
    let first = &codewords[0].terms;
    let t = RingMatrix::new(2, n, first.iter().map(|(_, e)| ints(&xor(&first[0].1, e))));
    let sx = howell_basis(&t);
    for cw in codewords {
        let e0 = &cw.terms[0].1;
        let closed = cw.terms.iter().all(|(_, e)| {
            residue_howell(&sx, &ints(&xor(e0, e)))
                .iter()
                .all(|&v| v == 0)
        });
        if cw.len() != 1 << sx.nrows() || !closed {
            return Err(XpError::NotXpCodespace(
                "a codeword support is not a coset of a common binary span".into(),
            ));
        }
    }

    let members: Vec<Vec<u8>> = codewords.iter().flat_map(OrbitForm::support).collect();
    let em = support_matrix(precision, n, &members);
    let km = kernel(&em);
    let mz = mz_from_kernel(precision, n, &km);
    let lookup = |e: &[u8]| map.get(e).copied();
    let mx = sx
        .rows()
        .map(|x| identity_with_x(precision, &bits(x), &members, &lookup, &em, &km))
        .collect::<Result<Vec<_>>>()?;

    let canon = CanonicalGenerators {
        sx: mx.clone(),
        sz: mz.clone(),
    };
    let reps = orbit_reps(precision, n, &canon, &Limits::default())?;
    if reps.len() != codewords.len() {
        return Err(XpError::NotXpCodespace(format!(
            "the logical identity group has {} orbit representatives for {} codewords",
            reps.len(),
            codewords.len()
        )));
    }
    Ok(LogicalIdentity { mx, mz })
}

/// Logical identity group computed from the elements of `E` within orbit
/// distance `t` of the core, where `N = 2^t`.
///
/// Falls back to [`logical_identity`] when the precision is not a power of two.
pub fn logical_identity_modified(code: &XpCode) -> Result<LogicalIdentity> {
    let precision = code.precision();
    if precision.count_ones() != 1 {
        return logical_identity(code.codewords());
    }
    let n = code.n();
    let t = precision.trailing_zeros() as usize;
    let d = code.decomposition();
    let members = d.truncated_support(t);
    let em = support_matrix(precision, n, &members);
    let km = kernel(&em);
    let mz = mz_from_kernel(precision, n, &km);
    let lookup = |e: &[u8]| {
        let q = d.quantum_numbers(e).ok()?;
        let phase = code.codeword_phase(e).ok()?;
        Some((d.codeword_index(q.core, &q.logical), phase))
    };
    let mx = d
        .sx_matrix
        .rows()
        .map(|x| identity_with_x(precision, &bits(x), &members, &lookup, &em, &km))
        .collect::<Result<Vec<_>>>()?;
    Ok(LogicalIdentity { mx, mz })
}

fn z_matrix(precision: i64, n: usize, ops: &[XpOperator]) -> RingMatrix {
    RingMatrix::new(precision, n, ops.iter().map(XpOperator::z))
}

/// Matrix over Z_N with rows `(e | onehot(i))` for each term of codeword `i`.
fn labelled_support(precision: i64, n: usize, codewords: &[OrbitForm]) -> RingMatrix {
    let d = codewords.len();
    let rows = codewords.iter().enumerate().flat_map(|(i, cw)| {
        cw.terms.iter().map(move |(_, e)| {
            let mut row = ints(e);
            row.extend((0..d).map(|j| i64::from(i == j)));
            row
        })
    });
    RingMatrix::new(precision, n + d, rows)
}

/// Non-trivial diagonal logical generators `L_Z`.
///
/// Together with `ωI` and `M_Z` they generate every diagonal logical operator.
pub fn diagonal_logicals(codewords: &[OrbitForm], mz: &[XpOperator]) -> Result<Vec<XpOperator>> {
    let (precision, n) = shape(codewords)?;
    let kl = kernel(&labelled_support(precision, n, codewords));
    let mzz = howell_basis(&z_matrix(precision, n, mz));
    let reduced: Vec<Vec<i64>> = kl
        .rows()
        .map(|row| residue_howell(&mzz, &row[..n]))
        .collect();
    let k = howell_basis(&RingMatrix::new(precision, n, reduced));
    Ok(k.rows()
        .map(|z| XpOperator::diagonal(precision, z.to_vec()))
        .collect())
}

/// A non-diagonal logical operator `XP_N(0|x|z)` for each row `x` of `L_X`.
///
/// The operators are not adjusted; see [`logical_x_adjust`].
pub fn nondiagonal_logicals(
    codewords: &[OrbitForm],
    lx_matrix: &RingMatrix,
) -> Result<Vec<std::result::Result<XpOperator, LogicalXFailure>>> {
    let (precision, n) = shape(codewords)?;
    let map = term_map(codewords);
    let el = labelled_support(precision, n, codewords);
    Ok(lx_matrix
        .rows()
        .map(|row| raw_logical_x(precision, codewords, &map, &el, &bits(row)))
        .collect())
}

fn raw_logical_x(
    precision: i64,
    codewords: &[OrbitForm],
    map: &TermMap,
    el: &RingMatrix,
    x: &[u8],
) -> std::result::Result<XpOperator, LogicalXFailure> {
    let fail = |reason: String| LogicalXFailure {
        x: x.to_vec(),
        reason,
    };
    let two_n = 2 * precision;
    let mut target = Vec::with_capacity(el.nrows());
    for (i, cw) in codewords.iter().enumerate() {
        let mut parity = None;
        for (p, e) in &cw.terms {
            let Some(&(_, q)) = map.get(&xor(e, x)) else {
                return Err(fail("the X component leaves the Z-support".into()));
            };
            let diff = (q - p).rem_euclid(two_n);
            let a = *parity.get_or_insert(diff % 2);
            if diff % 2 != a {
                return Err(fail(format!(
                    "relative phases in codeword {i} mix even and odd values"
                )));
            }
            target.push(-(diff - a) / 2);
        }
    }
    let solution = solve_linear(el, &target)
        .ok_or_else(|| fail("relative phases admit no XP operator".into()))?;
    let n = x.len();
    Ok(XpOperator::new(
        precision,
        0,
        x.to_vec(),
        solution.offset[..n].to_vec(),
    ))
}

/// Logical operator with the X component of `op` whose square lies in `⟨M_Z⟩`.
///
/// Returns `None` when no such XP operator exists.
pub fn logical_x_adjust(
    op: &XpOperator,
    mz: &[XpOperator],
    lz: &[XpOperator],
) -> Option<XpOperator> {
    let (precision, n) = (op.precision(), op.n());
    let x = op.x();
    let mzz = z_matrix(precision, n, mz);
    let lzz = z_matrix(precision, n, lz);
    let sp_b = AffineSpan::new(op.z(), &mzz.vstack(&lzz));

    let unit = |i: usize, v: i64| {
        let mut row = vec![0; n];
        row[i] = v;
        row
    };
    let free: Vec<usize> = (0..n).filter(|&i| x[i] == 0).collect();
    let doubled = RingMatrix::new(precision, n, free.iter().map(|&i| unit(i, 2)));
    let sp2 = span_intersection(&mzz, &doubled);
    let halve = |v: i64| {
        if precision % 2 == 0 {
            v / 2
        } else {
            v * (precision + 1) / 2
        }
    };
    let mut basis: Vec<Vec<i64>> = sp2
        .rows()
        .map(|row| row.iter().map(|&v| halve(v)).collect())
        .collect();
    if precision % 2 == 0 {
        basis.extend(free.iter().map(|&i| unit(i, precision / 2)));
    }
    basis.extend((0..n).filter(|&i| x[i] == 1).map(|i| unit(i, 1)));
    let sp_a = AffineSpan::new(&vec![0; n], &RingMatrix::new(precision, n, basis));

    let z = if sp_a.contains(op.z()) {
        op.z().to_vec()
    } else {
        affine_intersection(&sp_a, &sp_b)?.offset
    };
    let square = XpOperator::new(precision, 0, x.to_vec(), z.clone()).square();
    let p_u = if mz.is_empty() {
        if square.z().iter().any(|&v| v != 0) {
            return None;
        }
        0
    } else {
        let u = solve_linear(&mzz.transpose(), &negate(square.z()))?.offset;
        generator_product(precision, n, mz, &u).p()
    };
    let diff = (p_u - square.p()).rem_euclid(2 * precision);
    if diff % 2 != 0 {
        return None;
    }
    Some(XpOperator::new(precision, diff / 2, x.to_vec(), z))
}

/// True if `l` is a logical operator of the code with logical identity `m`.
pub fn is_logical(l: &XpOperator, m: &LogicalIdentity) -> bool {
    let all = m.all();
    if all
        .iter()
        .any(|a| a.precision() != l.precision() || a.n() != l.n())
    {
        return false;
    }
    let h = zp_howell(l.precision(), l.n(), &m.mz);
    all.iter().all(|a| {
        let c = a.comm(l);
        zp_map(&c).is_ok_and(|row| residue_howell(&h, &row).iter().all(|&v| v == 0))
    })
}

/// Phase vector of the logical operator `a`.
///
/// Fails with [`XpError::NotLogical`] when `a` does not map codewords to
/// multiples of codewords.
pub fn phase_vector(a: &XpOperator, codewords: &[OrbitForm]) -> Result<PhaseVector> {
    let (precision, n) = shape(codewords)?;
    if a.precision() != precision || a.n() != n {
        return Err(XpError::Mismatch(format!(
            "{a} does not match precision {precision} on {n} qubits"
        )));
    }
    let map = term_map(codewords);
    let two_n = 2 * precision;
    let mut f = Vec::with_capacity(codewords.len());
    let mut perm = Vec::with_capacity(codewords.len());
    for cw in codewords {
        let mut action = None;
        for (p, e) in &cw.terms {
            let (phase, image) = a.apply_basis(e);
            let &(j, c) = map
                .get(&image)
                .ok_or_else(|| XpError::NotLogical(a.to_string()))?;
            let term = (j, (p + phase - c).rem_euclid(two_n));
            if *action.get_or_insert(term) != term {
                return Err(XpError::NotLogical(a.to_string()));
            }
        }
        let (j, v) = action.expect("codewords are nonempty");
        perm.push(j);
        f.push(v);
    }
    Ok(PhaseVector { f, perm })
}

/// Howell basis of the phase vectors of diagonal logical operators, with an
/// operator realising each row.
pub fn action_basis(lz: &[XpOperator], codewords: &[OrbitForm]) -> Result<ActionBasis> {
    let (precision, n) = shape(codewords)?;
    let mut gens = vec![XpOperator::phase(precision, n, 1)];
    gens.extend(lz.iter().cloned());
    let rows = gens
        .iter()
        .map(|g| phase_vector(g, codewords).map(|pv| pv.f))
        .collect::<Result<Vec<_>>>()?;
    let form = howell(&RingMatrix::new(2 * precision, codewords.len(), rows));
    let ld = form
        .basis_transform()
        .rows()
        .map(|u| generator_product(precision, n, &gens, u))
        .collect();
    Ok(ActionBasis { fd: form.h, ld })
}

/// A diagonal logical operator with phase vector `f`, if one exists.
pub fn operator_for_action(f: &[i64], basis: &ActionBasis) -> Option<XpOperator> {
    let first = basis.ld.first()?;
    if f.len() != basis.fd.ncols() {
        return None;
    }
    let u = solve_linear(&basis.fd.transpose(), &negate(f))?.offset;
    Some(generator_product(
        first.precision(),
        first.n(),
        &basis.ld,
        &u,
    ))
}

/// XP-regularity of a code.
pub fn classify_code(decomposition: &CosetDecomposition) -> CodeClass {
    if decomposition.is_xp_regular() {
        CodeClass::XpRegular
    } else {
        CodeClass::NonXpRegular
    }
}

/// Classifies a diagonal logical operator by the dependence of its phases on
/// the core and logical quantum numbers.
pub fn classify_operator(a: &XpOperator, code: &XpCode) -> Result<OperatorClass> {
    if !a.is_diagonal() {
        return Err(XpError::InvalidArgument(format!("{a} is not diagonal")));
    }
    let pv = phase_vector(a, code.codewords())?;
    let q = code.decomposition().eq.len();
    let table: Vec<&[i64]> = pv.f.chunks(q).collect();
    let regular = table.iter().all(|row| row.iter().all(|&v| v == row[0]));
    let core = table.iter().all(|row| row == &table[0]);
    Ok(match (regular, core) {
        (true, true) => OperatorClass::Both,
        (true, false) => OperatorClass::Regular,
        (false, true) => OperatorClass::Core,
        (false, false) => OperatorClass::Neither,
    })
}

/// CSS code equivalent to an XP-regular code.
///
/// Fails with [`XpError::NotRegular`] for codes with `|E_q| > 1`.
pub fn map_to_css(code: &XpCode) -> Result<CssMapping> {
    let d = code.decomposition();
    if !d.is_xp_regular() {
        return Err(XpError::NotRegular(d.eq.len()));
    }
    let n = code.n();
    let q = ints(&d.eq[0]);
    let gx = d.sx_matrix.vstack(&d.lx_matrix);
    let rz = kernel(&gx)
        .rows()
        .map(|z| XpOperator::new(2, -2 * dot(&bits(&q), z), vec![0; n], z.to_vec()))
        .collect();
    let rx = d
        .sx_matrix
        .rows()
        .map(|x| XpOperator::new(2, 0, bits(x), vec![0; n]))
        .collect();
    let mut transition: Vec<(Vec<u8>, i64)> = code
        .zsupport()
        .into_iter()
        .map(|e| {
            let p = code.term(&e).map_or(0, |t| t.1);
            (e, p)
        })
        .collect();
    transition.sort();
    Ok(CssMapping { rx, rz, transition })
}

/// Generators of the Reed-Muller code on `2^r - 1` qubits at precision `2^(r-2)`.
///
/// The diagonal generators come first. Both halves use the rows of the
/// embedding matrix `M^r_r` as their Z and X components.
pub fn reed_muller(r: usize) -> Result<Vec<XpOperator>> {
    if !(3..=12).contains(&r) {
        return Err(XpError::InvalidArgument(format!(
            "Reed-Muller order must be in 3..=12, got {r}"
        )));
    }
    let precision = 1i64 << (r - 2);
    let m = embedding_matrix(r, r);
    let n = m.ncols();
    let diagonal = m
        .rows()
        .map(|row| XpOperator::diagonal(precision, row.to_vec()));
    let flips = m
        .rows()
        .map(|row| XpOperator::new(precision, 0, bits(row), vec![0; n]));
    Ok(diagonal.chain(flips).collect())
}

/// Logical identity group, diagonal and non-diagonal logical operators and
/// the achievable diagonal actions of a code.
pub fn analyse(code: &XpCode) -> Result<LogicalGroupData> {
    let identity = logical_identity_modified(code)?;
    let codewords = code.codewords();
    let lz = diagonal_logicals(codewords, &identity.mz)?;
    let lx = nondiagonal_logicals(codewords, &code.decomposition().lx_matrix)?
        .into_iter()
        .map(|raw| {
            let raw = raw?;
            logical_x_adjust(&raw, &identity.mz, &lz).ok_or_else(|| LogicalXFailure {
                x: raw.x().to_vec(),
                reason: "no operator with this X component squares into the logical identity group"
                    .into(),
            })
        })
        .collect();
    let basis = action_basis(&lz, codewords)?;
    Ok(LogicalGroupData {
        identity,
        lz,
        lx,
        basis,
    })
}
