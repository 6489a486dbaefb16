//! Dense reference semantics for XP operators and states on few qubits.
//!
//! Operators are built directly from the `(p|x|z)` components as monomial
//! matrices and never go through the closed-form algebra in
//! [`crate::xpop`], so they can serve as ground truth for it.
//!
//! Basis states are indexed with qubit 0 as the most significant bit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::codespace::OrbitForm;
use crate::error::{Result, XpError};
use crate::xpop::XpOperator;

/// Largest qubit count accepted by the oracle.
pub const MAX_QUBITS: usize = 10;

/// Comparison tolerance after normalisation.
pub const TOLERANCE: f64 = 1e-12;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(XpError::SizeLimit(format!(
            "dense oracle supports at most {MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Index of a bit string, qubit 0 most significant.
pub fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Bit string of an index on `n` qubits.
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

fn omega(precision: i64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, k as f64 * PI / precision as f64)
}

/// Monomial unitary `|e⟩ ↦ ω^{phase[e]} |perm[e]⟩` with `ω = exp(iπ/N)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenseOperator {
    pub precision: i64,
    pub n: usize,
    pub perm: Vec<usize>,
    pub phase: Vec<i64>,
}

impl DenseOperator {
    /// `ω^k I`.
    pub fn scalar(precision: i64, n: usize, k: i64) -> Result<Self> {
        check_size(n)?;
        let dim = 1 << n;
        Ok(DenseOperator {
            precision,
            n,
            perm: (0..dim).collect(),
            phase: vec![k.rem_euclid(2 * precision); dim],
        })
    }

    /// Pauli X on qubit `i`.
    pub fn pauli_x(precision: i64, n: usize, i: usize) -> Result<Self> {
        let mut op = Self::scalar(precision, n, 0)?;
        let mask = 1 << (n - 1 - i);
        op.perm = (0..1 << n).map(|e| e ^ mask).collect();
        Ok(op)
    }

    /// Pauli Z on qubit `i`; the phase `-1` is `ω^N`.
    pub fn pauli_z(precision: i64, n: usize, i: usize) -> Result<Self> {
        let mut op = Self::scalar(precision, n, 0)?;
        let mask = 1 << (n - 1 - i);
        op.phase = (0..1 << n)
            .map(|e| if e & mask != 0 { precision } else { 0 })
            .collect();
        Ok(op)
    }

    /// `P = diag(1, ω²)` on qubit `i`.
    pub fn phase_gate(precision: i64, n: usize, i: usize) -> Result<Self> {
        let mut op = Self::scalar(precision, n, 0)?;
        let mask = 1 << (n - 1 - i);
        op.phase = (0..1 << n)
            .map(|e| if e & mask != 0 { 2 } else { 0 })
            .collect();
        Ok(op)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        assert_eq!(self.precision, other.precision, "precision mismatch");
        let two_n = 2 * self.precision;
        let (perm, phase) = (0..self.perm.len())
            .map(|e| {
                let mid = other.perm[e];
                (
                    self.perm[mid],
                    (other.phase[e] + self.phase[mid]).rem_euclid(two_n),
                )
            })
            .unzip();
        DenseOperator {
            precision: self.precision,
            n: self.n,
            perm,
            phase,
        }
    }

    pub fn inverse(&self) -> DenseOperator {
        let two_n = 2 * self.precision;
        let mut perm = vec![0; self.perm.len()];
        let mut phase = vec![0; self.perm.len()];
        for (e, &f) in self.perm.iter().enumerate() {
            perm[f] = e;
            phase[f] = (-self.phase[e]).rem_euclid(two_n);
        }
        DenseOperator {
            precision: self.precision,
            n: self.n,
            perm,
            phase,
        }
    }

    /// `self^k` by repeated multiplication; negative `k` uses the inverse.
    pub fn power(&self, k: i64) -> DenseOperator {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc =
            DenseOperator::scalar(self.precision, self.n, 0).expect("size already checked");
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(e, &f)| e == f) && self.phase.iter().all(|&p| p == 0)
    }

    /// Smallest `K ≥ 1` with `self^K = I`.
    pub fn order(&self) -> i64 {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.compose(self);
            k += 1;
        }
        k
    }

    pub fn apply(&self, state: &DenseState) -> DenseState {
        assert_eq!(self.n, state.n, "qubit count mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
        for (e, amp) in state.amplitudes.iter().enumerate() {
            out[self.perm[e]] += amp * omega(self.precision, self.phase[e]);
        }
        DenseState {
            n: self.n,
            amplitudes: out,
        }
    }
}

/// Dense matrix of `a`: row `e` maps to `e⊕x` with phase `ω^{p+2e·z}`.
pub fn matrix_of(a: &XpOperator) -> Result<DenseOperator> {
    let n = a.n();
    check_size(n)?;
    let two_n = 2 * a.precision();
    let xmask = index_of(a.x());
    let (perm, phase) = (0..1usize << n)
        .map(|e| {
            let dot: i64 = (0..n)
                .filter(|&i| (e >> (n - 1 - i)) & 1 == 1)
                .map(|i| a.z()[i])
                .sum();
            (e ^ xmask, (a.p() + 2 * dot).rem_euclid(two_n))
        })
        .unzip();
    Ok(DenseOperator {
        precision: a.precision(),
        n,
        perm,
        phase,
    })
}

/// Dense state vector on `n` qubits.
#[derive(Clone, PartialEq, Debug)]
pub struct DenseState {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(DenseState {
            n,
            amplitudes: vec![Complex64::new(0.0, 0.0); 1 << n],
        })
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        let a = Complex64::new(1.0 / ((1 << n) as f64).sqrt(), 0.0);
        s.amplitudes.iter_mut().for_each(|v| *v = a);
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalised(&self) -> DenseState {
        let norm = self.norm_sqr().sqrt();
        DenseState {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &DenseState, c: Complex64) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += b * c;
        }
    }

    /// Equality within [`TOLERANCE`] after normalising both states.
    pub fn approx_eq(&self, other: &DenseState) -> bool {
        let (a, b) = (self.normalised(), other.normalised());
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .all(|(x, y)| (x - y).norm() < TOLERANCE)
    }

    /// Support as bit strings, in index order.
    pub fn support(&self) -> Vec<Vec<u8>> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > TOLERANCE)
            .map(|(e, _)| bits_of(e, self.n))
            .collect()
    }
}

/// `⟨s1|s2⟩`.
pub fn overlap(s1: &DenseState, s2: &DenseState) -> Complex64 {
    s1.amplitudes
        .iter()
        .zip(&s2.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// Dense vector of an orbit-form codeword, without normalisation.
pub fn state_of(codeword: &OrbitForm) -> Result<DenseState> {
    let n = codeword.terms.first().map_or(0, |(_, e)| e.len());
    let mut s = DenseState::zero(n)?;
    for (p, e) in &codeword.terms {
        s.amplitudes[index_of(e)] += omega(codeword.precision, *p);
    }
    Ok(s)
}

/// `A|κ⟩ = |κ⟩`, compared on phase exponents.
pub fn fixes(a: &XpOperator, codeword: &OrbitForm) -> Result<bool> {
    let m = matrix_of(a)?;
    let two_n = 2 * a.precision();
    let terms: BTreeMap<usize, i64> = codeword
        .terms
        .iter()
        .map(|(p, e)| (index_of(e), p.rem_euclid(two_n)))
        .collect();
    Ok(terms
        .iter()
        .all(|(&e, &p)| terms.get(&m.perm[e]) == Some(&(p + m.phase[e]).rem_euclid(two_n))))
}

/// Projection onto the `ω^m` eigenspace of `a`, without normalisation.
///
/// Uses `(1/K) Σ_k ω^{-mk} A^k` where `K` is the order of `A`.
pub fn project(a: &XpOperator, m: i64, state: &DenseState) -> Result<DenseState> {
    let op = matrix_of(a)?;
    let order = op.order();
    let mut out = DenseState::zero(state.n)?;
    if (m * order).rem_euclid(2 * a.precision()) != 0 {
        return Ok(out);
    }
    let mut current = state.clone();
    for k in 0..order {
        out.add_scaled(&current, omega(a.precision(), -m * k) / order as f64);
        current = op.apply(&current);
    }
    Ok(out)
}

/// `Tr(A_λ ρ A_λ)` for `ρ` maximally mixed over the given codewords.
pub fn outcome_probability(a: &XpOperator, m: i64, codewords: &[OrbitForm]) -> Result<f64> {
    let mut total = 0.0;
    for cw in codewords {
        let s = state_of(cw)?.normalised();
        total += project(a, m, &s)?.norm_sqr();
    }
    Ok(total / codewords.len() as f64)
}

/// True iff `a` maps the span of the codewords into itself.
///
/// Codewords must have disjoint supports, which holds for orbit forms of one
/// code.
pub fn preserves_codespace(a: &XpOperator, codewords: &[OrbitForm]) -> Result<bool> {
    let op = matrix_of(a)?;
    let basis: Vec<DenseState> = codewords
        .iter()
        .map(|cw| state_of(cw).map(|s| s.normalised()))
        .collect::<Result<_>>()?;
    // Disjoint supports make the basis orthonormal, so the squared distance
    // to the codespace is |image|² minus the squared overlaps, each taken
    // over the support of one codeword.
    let supports: Vec<Vec<usize>> = codewords
        .iter()
        .map(|cw| cw.terms.iter().map(|(_, e)| index_of(e)).collect())
        .collect();
    Ok(basis.iter().all(|s| {
        let image = op.apply(s);
        let captured: f64 = basis
            .iter()
            .zip(&supports)
            .map(|(b, support)| {
                support
                    .iter()
                    .map(|&i| b.amplitudes[i].conj() * image.amplitudes[i])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        (image.norm_sqr() - captured).abs() < TOLERANCE
    }))
}

/// Exact basis of the simultaneous `+1` eigenspace of the operators.
///
/// Each basis vector is returned as a map from basis index to phase
/// exponent. Every group orbit of basis states contributes at most one
/// vector, found by propagating phases along the generators and discarding
/// orbits where the propagation is inconsistent.
pub fn fixed_space(ops: &[XpOperator]) -> Result<Vec<BTreeMap<usize, i64>>> {
    let Some(first) = ops.first() else {
        return Err(XpError::InvalidArgument("no operators given".into()));
    };
    let (precision, n) = (first.precision(), first.n());
    let two_n = 2 * precision;
    let mats: Vec<DenseOperator> = ops.iter().map(matrix_of).collect::<Result<_>>()?;
    let mut seen = vec![false; 1 << n];
    let mut basis = Vec::new();
    for start in 0..1usize << n {
        if seen[start] {
            continue;
        }
        let mut phases: BTreeMap<usize, i64> = BTreeMap::from([(start, 0)]);
        let mut stack = vec![start];
        let mut consistent = true;
        seen[start] = true;
        while let Some(e) = stack.pop() {
            let pe = phases[&e];
            for m in &mats {
                // A|e⟩ = ω^φ|f⟩ and A fixes the state, so amp(f) = ω^φ amp(e).
                let f = m.perm[e];
                let pf = (pe + m.phase[e]).rem_euclid(two_n);
                match phases.get(&f) {
                    Some(&old) if old != pf => consistent = false,
                    Some(_) => {}
                    None => {
                        phases.insert(f, pf);
                        seen[f] = true;
                        stack.push(f);
                    }
                }
            }
        }
        if consistent {
            basis.push(phases);
        }
    }
    Ok(basis)
}

/// True iff the codewords agree with `fixed_space(ops)` up to global phases.
pub fn matches_fixed_space(ops: &[XpOperator], codewords: &[OrbitForm]) -> Result<bool> {
    let basis = fixed_space(ops)?;
    if basis.len() != codewords.len() {
        return Ok(false);
    }
    let two_n = 2 * ops[0].precision();
    let mut unmatched = basis;
    for cw in codewords {
        let terms: BTreeMap<usize, i64> = cw.terms.iter().map(|(p, e)| (index_of(e), *p)).collect();
        let Some(pos) = unmatched
            .iter()
            .position(|b| same_up_to_phase(b, &terms, two_n))
        else {
            return Ok(false);
        };
        unmatched.swap_remove(pos);
    }
    Ok(true)
}

fn same_up_to_phase(a: &BTreeMap<usize, i64>, b: &BTreeMap<usize, i64>, two_n: i64) -> bool {
    if a.len() != b.len() || !a.keys().eq(b.keys()) {
        return false;
    }
    let Some(((_, pa), (_, pb))) = a.iter().zip(b).next() else {
        return true;
    };
    let shift = pb - pa;
    a.values()
        .zip(b.values())
        .all(|(x, y)| (y - x - shift).rem_euclid(two_n) == 0)
}
