//! Codespaces of XP codes: Z-support, orbit representatives, codewords,
//! coset decomposition and quantum numbers.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Result, XpError};
use crate::ringlinalg::{kernel, leading_indices, rref2, RingMatrix};
use crate::xpgroup::{canonical, inconsistent_phase, x_matrix, CanonicalGenerators};
use crate::xpop::{format_bits, xor, XpOperator};

/// Largest qubit count accepted by [`zsupport_exhaustive`].
pub const EXHAUSTIVE_MAX_QUBITS: usize = 20;

/// Size limits for the symbolic code paths.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Limits {
    /// Largest qubit count accepted when building a code.
    pub max_qubits: usize,
    /// Node budget for Z-support searches.
    pub search_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_qubits: 24,
            search_budget: 10_000_000,
        }
    }
}

impl Limits {
    /// Defaults overridden by `XPF_MAX_QUBITS` and `XPF_SEARCH_BUDGET`.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(v) = std::env::var("XPF_MAX_QUBITS")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            limits.max_qubits = v;
        }
        if let Some(v) = std::env::var("XPF_SEARCH_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            limits.search_budget = v;
        }
        limits
    }
}

/// A state `Σ_j ω^{p_j} |e_j⟩` with terms sorted by bit string.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitForm {
    pub precision: i64,
    pub terms: Vec<(i64, Vec<u8>)>,
}

impl OrbitForm {
    /// Builds an orbit form, sorting the terms by bit string.
    pub fn new(precision: i64, mut terms: Vec<(i64, Vec<u8>)>) -> Self {
        for t in terms.iter_mut() {
            t.0 = t.0.rem_euclid(2 * precision);
        }
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        OrbitForm { precision, terms }
    }

    /// Z-support of the state.
    pub fn support(&self) -> Vec<Vec<u8>> {
        self.terms.iter().map(|t| t.1.clone()).collect()
    }

    /// Phase of the term `|e⟩`, if present.
    pub fn phase_of(&self, e: &[u8]) -> Option<i64> {
        self.terms
            .binary_search_by(|t| t.1.as_slice().cmp(e))
            .ok()
            .map(|i| self.terms[i].0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for OrbitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, e)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *p != 0 {
                write!(f, "ω^{p}")?;
            }
            write!(f, "|{}⟩", format_bits(e))?;
        }
        Ok(())
    }
}

fn to_bits(row: &[i64]) -> Vec<u8> {
    row.iter().map(|&v| v as u8).collect()
}

fn to_ints(bits: &[u8]) -> Vec<i64> {
    bits.iter().map(|&b| b as i64).collect()
}

/// Depth-first enumeration of binary `e` with `(e|1)` in the kernel of the
/// Zp rows of `sz`, with the `pinned` coordinates forced to zero.
fn support_search(
    precision: i64,
    n: usize,
    sz: &[XpOperator],
    pinned: &[usize],
    budget: u64,
) -> Result<Vec<Vec<u8>>> {
    if sz.iter().any(|b| b.p() % 2 != 0) {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<i64>> = sz
        .iter()
        .map(|b| {
            let mut row = b.z().to_vec();
            row.push(b.p() / 2);
            row
        })
        .collect();
    let k = kernel(&RingMatrix::new(precision, n + 1, rows));
    let pivots = leading_indices(&k);
    let mut allowed = vec![vec![0i64, 1]; n + 1];
    allowed[n] = vec![1];
    for &j in pinned {
        allowed[j] = vec![0];
    }
    let mut search = Search {
        n,
        modulus: precision,
        k: &k,
        pivots: &pivots,
        allowed: &allowed,
        budget,
        nodes: 0,
        out: Vec::new(),
    };
    search.visit(0, 0, vec![0; n + 1])?;
    let mut out = search.out;
    out.sort();
    Ok(out)
}

struct Search<'a> {
    n: usize,
    modulus: i64,
    k: &'a RingMatrix,
    pivots: &'a [usize],
    allowed: &'a [Vec<i64>],
    budget: u64,
    nodes: u64,
    out: Vec<Vec<u8>>,
}

impl Search<'_> {
    fn visit(&mut self, r: usize, checked: usize, acc: Vec<i64>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(XpError::SearchBudget {
                budget: self.budget,
            });
        }
        let next = self.pivots.get(r).copied().unwrap_or(self.n + 1);
        // Columns before the next pivot are now fully determined.
        let settled = self.allowed[checked..next].iter().zip(&acc[checked..next]);
        if settled.into_iter().any(|(allowed, v)| !allowed.contains(v)) {
            return Ok(());
        }
        if r == self.pivots.len() {
            self.out.push(to_bits(&acc[..self.n]));
            return Ok(());
        }
        let row = self.k.row(r);
        let g = row[next];
        for &t in self.allowed[next].iter() {
            let d = (t - acc[next]).rem_euclid(self.modulus);
            if d % g != 0 {
                continue;
            }
            let a = d / g;
            let updated: Vec<i64> = acc
                .iter()
                .zip(row)
                .map(|(&s, &v)| (s + a * v) % self.modulus)
                .collect();
            self.visit(r + 1, next + 1, updated)?;
        }
        Ok(())
    }
}

/// All `e ∈ Z_2^n` with `B|e⟩ = |e⟩` for every diagonal `B` in `sz`.
///
/// Refuses `n > EXHAUSTIVE_MAX_QUBITS` and searches beyond the budget.
pub fn zsupport_exhaustive(
    precision: i64,
    n: usize,
    sz: &[XpOperator],
    limits: &Limits,
) -> Result<Vec<Vec<u8>>> {
    if n > EXHAUSTIVE_MAX_QUBITS {
        return Err(XpError::SizeLimit(format!(
            "exhaustive Z-support limited to {EXHAUSTIVE_MAX_QUBITS} qubits, got {n}"
        )));
    }
    if let Some(b) = sz.iter().find(|b| !b.is_diagonal()) {
        return Err(XpError::InvalidArgument(format!("{b} is not diagonal")));
    }
    support_search(precision, n, sz, &[], limits.search_budget)
}

/// Orbit representatives `E_m` of a code, sorted.
///
/// Each representative is zero at every leading index of `S_X`. An empty
/// result means the codespace is empty.
pub fn orbit_reps(
    precision: i64,
    n: usize,
    canon: &CanonicalGenerators,
    limits: &Limits,
) -> Result<Vec<Vec<u8>>> {
    let pinned = canon.sx_leading_indices(n);
    support_search(precision, n, &canon.sz, &pinned, limits.search_budget)
}

/// The orbit operator `Σ_v S_X^v` applied to `|m⟩`, unnormalised.
pub fn orbit_apply(precision: i64, sx: &[XpOperator], m: &[u8]) -> OrbitForm {
    let r = sx.len();
    let two_n = 2 * precision;
    let mut terms = Vec::with_capacity(1 << r);
    for v in 0..1u64 << r {
        let mut e = m.to_vec();
        let mut phase = 0;
        for i in (0..r).rev() {
            if v >> i & 1 == 1 {
                let (d, next) = sx[i].apply_basis(&e);
                phase = (phase + d) % two_n;
                e = next;
            }
        }
        terms.push((phase, e));
    }
    OrbitForm::new(precision, terms)
}

/// Quantum numbers `(l, u, v)` of a member of `E`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuantumNumbers {
    /// Core index `l`: position in `E_q`.
    pub core: usize,
    /// Stabiliser index `u`.
    pub stabiliser: Vec<u8>,
    /// Logical index `v`.
    pub logical: Vec<u8>,
}

/// Decomposition `E = E_q + ⟨S_X⟩ + ⟨L_X⟩`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetDecomposition {
    /// The core, sorted.
    pub eq: Vec<Vec<u8>>,
    /// RREF of the X components of `S_X`.
    pub sx_matrix: RingMatrix,
    /// RREF binary matrix `L_X`.
    pub lx_matrix: RingMatrix,
}

/// Splits `E_m` as `E_q + ⟨L_X⟩`.
///
/// `sx_matrix` is the RREF of the X components of `S_X`; it is stored for
/// later quantum-number queries.
///
/// # Panics
///
/// Panics if `em` is empty.
pub fn coset_decomposition(em: &[Vec<u8>], sx_matrix: &RingMatrix) -> CosetDecomposition {
    assert!(!em.is_empty(), "coset decomposition of an empty set");
    let n = em[0].len();
    let set: HashSet<&[u8]> = em.iter().map(Vec::as_slice).collect();
    let m0 = &em[0];
    let shifts: Vec<Vec<i64>> = em
        .iter()
        .map(|m| xor(m0, m))
        .filter(|t| em.iter().all(|m| set.contains(xor(t, m).as_slice())))
        .map(|t| to_ints(&t))
        .collect();
    let lx_matrix = rref2(&RingMatrix::new(2, n, shifts)).h;
    let eq: BTreeSet<Vec<u8>> = em.iter().map(|m| reduce_binary(&lx_matrix, m).0).collect();
    CosetDecomposition {
        eq: eq.into_iter().collect(),
        sx_matrix: sx_matrix.clone(),
        lx_matrix,
    }
}

/// Residue of `e` against a binary RREF matrix and the row coefficients used.
fn reduce_binary(rref: &RingMatrix, e: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut e = e.to_vec();
    let mut coeffs = Vec::with_capacity(rref.nrows());
    for (row, lead) in rref.rows().zip(leading_indices(rref)) {
        let c = e[lead];
        coeffs.push(c);
        if c == 1 {
            for (b, &v) in e.iter_mut().zip(row) {
                *b ^= v as u8;
            }
        }
    }
    (e, coeffs)
}

fn combine(rows: &RingMatrix, coeffs: &[u8], start: &[u8]) -> Vec<u8> {
    let mut e = start.to_vec();
    for (row, &c) in rows.rows().zip(coeffs) {
        if c == 1 {
            for (b, &v) in e.iter_mut().zip(row) {
                *b ^= v as u8;
            }
        }
    }
    e
}

/// Big-endian bits of `v` with `k` digits.
pub(crate) fn index_bits(v: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| (v >> (k - 1 - i) & 1) as u8).collect()
}

fn bits_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

impl CosetDecomposition {
    /// Number of logical X rows `k`.
    pub fn k(&self) -> usize {
        self.lx_matrix.nrows()
    }

    /// Codespace dimension `|E_q|·2^k`.
    pub fn dimension(&self) -> usize {
        self.eq.len() << self.k()
    }

    /// True if `|E_q| = 1`.
    pub fn is_xp_regular(&self) -> bool {
        self.eq.len() == 1
    }

    /// Orbit representatives in codeword order.
    ///
    /// The logical index `v` counts in binary with the first row of `L_X`
    /// most significant; within each `v` the core is taken in sorted order.
    pub fn ordered_reps(&self) -> Vec<Vec<u8>> {
        let k = self.k();
        let mut out = Vec::with_capacity(self.dimension());
        for v in 0..1usize << k {
            let bits = index_bits(v, k);
            for q in &self.eq {
                out.push(combine(&self.lx_matrix, &bits, q));
            }
        }
        out
    }

    /// Codeword position of quantum numbers `(l, v)` in [`Self::ordered_reps`].
    pub fn codeword_index(&self, core: usize, logical: &[u8]) -> usize {
        bits_index(logical) * self.eq.len() + core
    }

    /// Member `q_l + u·S_X + v·L_X` of `E`.
    pub fn element(&self, q: &QuantumNumbers) -> Vec<u8> {
        let e = combine(&self.sx_matrix, &q.stabiliser, &self.eq[q.core]);
        combine(&self.lx_matrix, &q.logical, &e)
    }

    /// Quantum numbers of `e`, rejecting vectors outside `E`.
    pub fn quantum_numbers(&self, e: &[u8]) -> Result<QuantumNumbers> {
        let (m, stabiliser) = reduce_binary(&self.sx_matrix, e);
        let (q, logical) = reduce_binary(&self.lx_matrix, &m);
        match self.eq.binary_search(&q) {
            Ok(core) => Ok(QuantumNumbers {
                core,
                stabiliser,
                logical,
            }),
            Err(_) => Err(XpError::InvalidArgument(format!(
                "{} is not in the Z-support of the code",
                format_bits(e)
            ))),
        }
    }

    /// Orbit distance `wt(u) + wt(v)`.
    pub fn orbit_distance(&self, e: &[u8]) -> Result<usize> {
        let q = self.quantum_numbers(e)?;
        Ok(q.stabiliser
            .iter()
            .chain(&q.logical)
            .filter(|&&b| b == 1)
            .count())
    }

    /// Members of `E` within orbit distance `t` of the core.
    pub fn truncated_support(&self, t: usize) -> Vec<Vec<u8>> {
        let r = self.sx_matrix.nrows();
        let k = self.k();
        let mut out = Vec::new();
        let mut choose = Vec::new();
        subsets_up_to(r + k, t, 0, &mut choose, &mut |subset| {
            let mut u = vec![0u8; r];
            let mut v = vec![0u8; k];
            for &i in subset {
                if i < r {
                    u[i] = 1;
                } else {
                    v[i - r] = 1;
                }
            }
            for core in 0..self.eq.len() {
                out.push(self.element(&QuantumNumbers {
                    core,
                    stabiliser: u.clone(),
                    logical: v.clone(),
                }));
            }
        });
        out.sort();
        out
    }
}

fn subsets_up_to(
    n: usize,
    t: usize,
    start: usize,
    current: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    f(current);
    if current.len() == t {
        return;
    }
    for i in start..n {
        current.push(i);
        subsets_up_to(n, t, i + 1, current, f);
        current.pop();
    }
}

/// Compact description `(E_q, S_X, L_X)` of a code.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoreForm {
    pub precision: i64,
    pub n: usize,
    pub eq: Vec<Vec<u8>>,
    pub sx: Vec<XpOperator>,
    pub lx: Vec<XpOperator>,
}

impl CoreForm {
    /// Orbit representatives `E_q + ⟨L_X⟩`, sorted.
    pub fn orbit_reps(&self) -> Vec<Vec<u8>> {
        let lx = x_matrix(&self.lx, self.n);
        let k = lx.nrows();
        let mut out: BTreeSet<Vec<u8>> = BTreeSet::new();
        for v in 0..1usize << k {
            let bits = index_bits(v, k);
            for q in &self.eq {
                out.insert(combine(&lx, &bits, q));
            }
        }
        out.into_iter().collect()
    }

    /// Codewords regenerated with the orbit operator.
    pub fn codewords(&self) -> Vec<OrbitForm> {
        self.orbit_reps()
            .iter()
            .map(|m| orbit_apply(self.precision, &self.sx, m))
            .collect()
    }

    /// Z-support of the codespace, sorted.
    pub fn zsupport(&self) -> Vec<Vec<u8>> {
        let mut all: Vec<Vec<u8>> = self
            .codewords()
            .iter()
            .flat_map(OrbitForm::support)
            .collect();
        all.sort();
        all
    }
}

/// An XP code with its codespace fully resolved.
#[derive(Clone, Debug)]
pub struct XpCode {
    precision: i64,
    n: usize,
    generators: Vec<XpOperator>,
    canonical: CanonicalGenerators,
    decomposition: CosetDecomposition,
    reps: Vec<Vec<u8>>,
    codewords: Vec<OrbitForm>,
    phases: HashMap<Vec<u8>, (usize, i64)>,
}

impl XpCode {
    /// Builds the code with default limits.
    pub fn new(generators: &[XpOperator]) -> Result<Self> {
        Self::with_limits(generators, &Limits::default())
    }

    /// Builds the code, refusing inputs beyond `limits`.
    ///
    /// Fails with [`XpError::EmptyCodespace`] or [`XpError::NoSupport`] when
    /// the stabiliser group has no common +1 eigenvector.
    pub fn with_limits(generators: &[XpOperator], limits: &Limits) -> Result<Self> {
        let first = generators.first().ok_or_else(|| {
            XpError::InvalidArgument("a code needs at least one generator".into())
        })?;
        let (precision, n) = (first.precision(), first.n());
        if let Some(g) = generators
            .iter()
            .find(|g| g.precision() != precision || g.n() != n)
        {
            return Err(XpError::Mismatch(format!(
                "{g} does not match precision {precision} on {n} qubits"
            )));
        }
        if n > limits.max_qubits {
            return Err(XpError::SizeLimit(format!(
                "{n} qubits exceeds the limit of {}",
                limits.max_qubits
            )));
        }
        let canon = canonical(generators);
        if let Some(q) = inconsistent_phase(&canon.sz) {
            return Err(XpError::EmptyCodespace { q });
        }
        let em = orbit_reps(precision, n, &canon, limits)?;
        if em.is_empty() {
            return Err(XpError::NoSupport);
        }
        let decomposition = coset_decomposition(&em, &rref2(&canon.sx_matrix(n)).h);
        let reps = decomposition.ordered_reps();
        let codewords: Vec<OrbitForm> = reps
            .iter()
            .map(|m| orbit_apply(precision, &canon.sx, m))
            .collect();
        let mut phases = HashMap::new();
        for (i, cw) in codewords.iter().enumerate() {
            for (p, e) in &cw.terms {
                phases.insert(e.clone(), (i, *p));
            }
        }
        Ok(XpCode {
            precision,
            n,
            generators: generators.to_vec(),
            canonical: canon,
            decomposition,
            reps,
            codewords,
            phases,
        })
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[XpOperator] {
        &self.generators
    }

    pub fn canonical(&self) -> &CanonicalGenerators {
        &self.canonical
    }

    pub fn decomposition(&self) -> &CosetDecomposition {
        &self.decomposition
    }

    /// Orbit representatives in codeword order.
    pub fn orbit_reps(&self) -> &[Vec<u8>] {
        &self.reps
    }

    pub fn codewords(&self) -> &[OrbitForm] {
        &self.codewords
    }

    pub fn dimension(&self) -> usize {
        self.codewords.len()
    }

    /// Z-support `E` of the codespace, sorted.
    pub fn zsupport(&self) -> Vec<Vec<u8>> {
        let mut all: Vec<Vec<u8>> = self.phases.keys().cloned().collect();
        all.sort();
        all
    }

    /// Codeword index and phase of the term `|e⟩`, if `e ∈ E`.
    pub fn term(&self, e: &[u8]) -> Option<(usize, i64)> {
        self.phases.get(e).copied()
    }

    /// Phase of `|e⟩` inside its codeword, computed from `S_X` alone.
    pub fn codeword_phase(&self, e: &[u8]) -> Result<i64> {
        let q = self.decomposition.quantum_numbers(e)?;
        let m = combine(
            &self.decomposition.lx_matrix,
            &q.logical,
            &self.decomposition.eq[q.core],
        );
        let two_n = 2 * self.precision;
        let mut state = m;
        let mut phase = 0;
        for i in (0..self.canonical.sx.len()).rev() {
            if q.stabiliser[i] == 1 {
                let (d, next) = self.canonical.sx[i].apply_basis(&state);
                phase = (phase + d) % two_n;
                state = next;
            }
        }
        Ok(phase)
    }

    /// Core form with the given non-diagonal logical operators.
    pub fn core_form(&self, lx: Vec<XpOperator>) -> CoreForm {
        CoreForm {
            precision: self.precision,
            n: self.n,
            eq: self.decomposition.eq.clone(),
            sx: self.canonical.sx.clone(),
            lx,
        }
    }
}
