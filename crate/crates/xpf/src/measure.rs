//! Measurement of XP operators: the core-form update for diagonal Paulis
//! and outcome probabilities for arbitrary diagonal and non-diagonal
//! operators.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::codespace::{CoreForm, OrbitForm, XpCode};
use crate::error::{Result, XpError};
use crate::logical::logical_identity;
use crate::ringlinalg::{leading_indices, residue_howell};
use crate::xpgroup::{generator_product, x_matrix};
use crate::xpop::{xor, XpOperator};

/// Tolerance used when classifying numerically projected states.
pub const TOLERANCE: f64 = 1e-12;

/// `x·z mod 2`.
///
/// # Panics
///
/// Panics if the lengths differ.
pub fn parity(x: &[u8], z: &[u8]) -> u8 {
    assert_eq!(x.len(), z.len(), "parity length mismatch");
    x.iter().zip(z).fold(0, |acc, (&a, &b)| acc ^ (a & b))
}

/// A probability `c + Σ_k c_k cos(kπ/N)` kept in exact form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Probability {
    precision: i64,
    constant: Ratio<i64>,
    cosines: BTreeMap<i64, Ratio<i64>>,
}

impl Probability {
    pub fn rational(value: Ratio<i64>) -> Self {
        Probability {
            precision: 2,
            constant: value,
            cosines: BTreeMap::new(),
        }
    }

    /// `Σ_k counts[k]·(1 + cos(kπ/N)) / denominator`.
    fn from_cosines(precision: i64, counts: &BTreeMap<i64, i64>, denominator: i64) -> Self {
        let two_n = 2 * precision;
        let mut constant = Ratio::from_integer(0);
        let mut cosines = BTreeMap::new();
        for (&k, &count) in counts {
            let weight = Ratio::new(count, denominator);
            constant += weight;
            let k = k.rem_euclid(two_n);
            let k = k.min(two_n - k);
            if k == 0 {
                constant += weight;
            } else if k == precision {
                constant -= weight;
            } else if 2 * k != precision {
                *cosines.entry(k).or_insert_with(|| Ratio::from_integer(0)) += weight;
            }
        }
        cosines.retain(|_, c| *c != Ratio::from_integer(0));
        Probability {
            precision,
            constant,
            cosines,
        }
    }

    /// The exact value when no irrational cosine remains.
    pub fn as_rational(&self) -> Option<Ratio<i64>> {
        self.cosines.is_empty().then_some(self.constant)
    }

    pub fn value(&self) -> f64 {
        let c = *self.constant.numer() as f64 / *self.constant.denom() as f64;
        self.cosines.iter().fold(c, |acc, (&k, w)| {
            acc + (*w.numer() as f64 / *w.denom() as f64)
                * (k as f64 * PI / self.precision as f64).cos()
        })
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (k, w) in &self.cosines {
            write!(f, " + {w}·cos({k}π/{})", self.precision)?;
        }
        Ok(())
    }
}

/// One outcome of a diagonal Pauli measurement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PauliOutcome {
    /// Eigenvalue `i^k`, stored as `k` over Z_4.
    pub eigenvalue: i64,
    pub probability: Ratio<i64>,
    /// Post-measurement code; `None` when the outcome has probability zero.
    pub core: Option<CoreForm>,
}

/// Result of measuring a diagonal Pauli operator on a code in core form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PauliMeasurement {
    /// The member of `S_X ∪ L_X` removed in the update step, if any.
    pub removed: Option<XpOperator>,
    /// The core form after the update step and before the split.
    pub updated: CoreForm,
    /// Outcome for even parity, then odd parity.
    pub outcomes: [PauliOutcome; 2],
}

/// Core-form update for the measurement of a diagonal Pauli operator.
///
/// `pauli` must be a precision 2 diagonal operator `XP_2(p|0|z)`. Codes of
/// odd precision are rescaled to precision `2N` first.
pub fn measure_diagonal_pauli(core: &CoreForm, pauli: &XpOperator) -> Result<PauliMeasurement> {
    if pauli.precision() != 2 || !pauli.is_diagonal() {
        return Err(XpError::InvalidArgument(format!(
            "{pauli} is not a precision 2 diagonal operator"
        )));
    }
    if pauli.n() != core.n {
        return Err(XpError::Mismatch(format!(
            "{pauli} does not act on {} qubits",
            core.n
        )));
    }
    let core = if core.precision % 2 == 1 {
        CoreForm {
            precision: 2 * core.precision,
            n: core.n,
            eq: core.eq.clone(),
            sx: core.sx.iter().map(|a| a.upscale(2)).collect(),
            lx: core.lx.iter().map(|a| a.upscale(2)).collect(),
        }
    } else {
        core.clone()
    };
    let z: Vec<u8> = pauli.z().iter().map(|&v| v as u8).collect();
    let odd = |a: &XpOperator| parity(a.x(), &z) == 1;

    let mut sx = core.sx.clone();
    let mut lx = core.lx.clone();
    let mut eq = core.eq.clone();
    let removed = if let Some(i) = sx.iter().position(odd) {
        Some(sx.remove(i))
    } else {
        lx.iter().position(odd).map(|i| lx.remove(i))
    };
    if let Some(b) = &removed {
        for c in sx.iter_mut().chain(lx.iter_mut()) {
            if odd(c) {
                *c = b.mul(c);
            }
        }
        let mut all: BTreeSet<Vec<u8>> = eq.iter().cloned().collect();
        all.extend(eq.iter().map(|q| xor(q, b.x())));
        eq = all.into_iter().collect();
    }
    let updated = CoreForm {
        precision: core.precision,
        n: core.n,
        eq: eq.clone(),
        sx,
        lx,
    };
    let total = eq.len() as i64;
    let outcome = |bit: u8| {
        let part: Vec<Vec<u8>> = eq
            .iter()
            .filter(|q| parity(q, &z) == bit)
            .cloned()
            .collect();
        PauliOutcome {
            eigenvalue: (pauli.p() + 2 * bit as i64).rem_euclid(4),
            probability: Ratio::new(part.len() as i64, total),
            core: (!part.is_empty()).then(|| CoreForm {
                eq: part,
                ..updated.clone()
            }),
        }
    };
    let outcomes = [outcome(0), outcome(1)];
    Ok(PauliMeasurement {
        removed,
        updated,
        outcomes,
    })
}

fn support(codewords: &[OrbitForm]) -> Vec<Vec<u8>> {
    codewords.iter().flat_map(OrbitForm::support).collect()
}

/// Probability of the eigenvalue `ω^m` when measuring a diagonal operator.
pub fn prob_diagonal(codewords: &[OrbitForm], a: &XpOperator, m: i64) -> Result<Ratio<i64>> {
    if !a.is_diagonal() {
        return Err(XpError::InvalidArgument(format!("{a} is not diagonal")));
    }
    let e = support(codewords);
    if e.is_empty() {
        return Err(XpError::InvalidArgument("no codewords given".into()));
    }
    let m = m.rem_euclid(2 * a.precision());
    let hits = e.iter().filter(|e| a.diagonal_phase(e) == m).count();
    Ok(Ratio::new(hits as i64, e.len() as i64))
}

/// Probability of the eigenvalue `ω^m` when measuring a non-diagonal operator.
///
/// `sx` are the canonical non-diagonal generators of the code.
pub fn prob_nondiagonal(
    codewords: &[OrbitForm],
    sx: &[XpOperator],
    a: &XpOperator,
    m: i64,
) -> Result<Probability> {
    if a.is_diagonal() {
        return Err(XpError::InvalidArgument(format!("{a} is diagonal")));
    }
    let e = support(codewords);
    if e.is_empty() {
        return Err(XpError::InvalidArgument("no codewords given".into()));
    }
    let (precision, n) = (a.precision(), a.n());
    let two_n = 2 * precision;
    let shifted = a.with_phase(a.p() - m);
    let square = shifted.square();
    let kept: Vec<&Vec<u8>> = e.iter().filter(|e| square.diagonal_phase(e) == 0).collect();
    let total = 2 * e.len() as i64;

    let sxm = x_matrix(sx, n);
    let x: Vec<i64> = a.x().iter().map(|&b| b as i64).collect();
    if !residue_howell(&sxm, &x).iter().all(|&v| v == 0) {
        return Ok(Probability::rational(Ratio::new(kept.len() as i64, total)));
    }
    let u: Vec<i64> = leading_indices(&sxm).iter().map(|&l| x[l]).collect();
    let b = generator_product(precision, n, sx, &u);
    let diff: Vec<i64> = b
        .z()
        .iter()
        .zip(shifted.z())
        .map(|(zb, za)| zb - za)
        .collect();
    let c = XpOperator::new(precision, b.p() - shifted.p(), vec![0; n], diff);
    let mut counts = BTreeMap::new();
    for e in kept {
        *counts
            .entry(c.diagonal_phase(e).rem_euclid(two_n))
            .or_insert(0) += 1;
    }
    Ok(Probability::from_cosines(precision, &counts, total))
}

/// Sparse state with complex amplitudes, sorted by basis vector.
#[derive(Clone, PartialEq, Debug)]
pub struct ProjectedState {
    pub amplitudes: Vec<(Vec<u8>, Complex64)>,
}

impl ProjectedState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Orbit form, when every amplitude has the same modulus and a phase
    /// that is a power of `ω` relative to the first term.
    pub fn to_orbit_form(&self, precision: i64) -> Option<OrbitForm> {
        let (_, first) = self.amplitudes.first()?;
        let step = PI / precision as f64;
        let mut terms = Vec::with_capacity(self.amplitudes.len());
        for (e, amp) in &self.amplitudes {
            let rel = amp / first;
            if (rel.norm() - 1.0).abs() > 1e-9 {
                return None;
            }
            let k = rel.arg() / step;
            if (k - k.round()).abs() > 1e-9 {
                return None;
            }
            terms.push(((k.round() as i64).rem_euclid(2 * precision), e.clone()));
        }
        Some(OrbitForm::new(precision, terms))
    }
}

/// State after a general measurement.
#[derive(Clone, PartialEq, Debug)]
pub enum PostState {
    /// The projected codewords form the codespace of an XP code at the
    /// code's precision.
    Codewords(Vec<OrbitForm>),
    /// The projected space cannot be written as such a codespace.
    NotXpRepresentable(Vec<ProjectedState>),
}

/// One outcome of measuring an XP operator via the codewords.
#[derive(Clone, PartialEq, Debug)]
pub struct MeasurementOutcome {
    /// Eigenvalue `ω^m`, stored as `m` over Z_2N.
    pub eigenvalue: i64,
    pub probability: Probability,
    /// `None` when the outcome has probability zero.
    pub post: Option<PostState>,
}

fn omega_power(precision: i64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, k as f64 * PI / precision as f64)
}

/// `A_λ|κ⟩` for the projector onto the `ω^m` eigenspace of `a`.
pub fn project_codeword(a: &XpOperator, m: i64, codeword: &OrbitForm) -> ProjectedState {
    let precision = a.precision();
    let mut acc: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    for (p, e) in &codeword.terms {
        for term in a.projector_apply(m, e) {
            let scale = *term.scale.numer() as f64 / *term.scale.denom() as f64;
            *acc.entry(term.bits).or_default() += omega_power(precision, p + term.phase) * scale;
        }
    }
    ProjectedState {
        amplitudes: acc
            .into_iter()
            .filter(|(_, a)| a.norm() > TOLERANCE)
            .collect(),
    }
}

/// Measures `a` on the maximally mixed state of the codespace, for every
/// eigenvalue of `a`.
///
/// Post-measurement states use the codewords; see [`PostState`].
pub fn measure(code: &XpCode, a: &XpOperator) -> Result<Vec<MeasurementOutcome>> {
    if a.precision() != code.precision() || a.n() != code.n() {
        return Err(XpError::Mismatch(format!(
            "{a} does not match precision {} on {} qubits",
            code.precision(),
            code.n()
        )));
    }
    let codewords = code.codewords();
    a.eigenvalues()
        .exponents
        .into_iter()
        .map(|m| {
            let probability = if a.is_diagonal() {
                Probability::rational(prob_diagonal(codewords, a, m)?)
            } else {
                prob_nondiagonal(codewords, &code.canonical().sx, a, m)?
            };
            let states: Vec<ProjectedState> = codewords
                .iter()
                .map(|cw| project_codeword(a, m, cw))
                .filter(|s| !s.amplitudes.is_empty())
                .collect();
            let post = (!states.is_empty()).then(|| classify_post_state(code.precision(), states));
            Ok(MeasurementOutcome {
                eigenvalue: m,
                probability,
                post,
            })
        })
        .collect()
}

fn proportional(a: &ProjectedState, b: &ProjectedState) -> bool {
    if a.amplitudes.len() != b.amplitudes.len()
        || a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .any(|(x, y)| x.0 != y.0)
    {
        return false;
    }
    let inner: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.1.conj() * y.1)
        .sum();
    (inner.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() < 1e-9 * a.norm_sqr() * b.norm_sqr()
}

fn classify_post_state(precision: i64, projected: Vec<ProjectedState>) -> PostState {
    // Codewords swapped by a non-diagonal operator project onto the same ray.
    let mut states: Vec<ProjectedState> = Vec::new();
    for s in projected {
        if !states.iter().any(|t| proportional(t, &s)) {
            states.push(s);
        }
    }
    let forms: Option<Vec<OrbitForm>> = states.iter().map(|s| s.to_orbit_form(precision)).collect();
    match forms {
        Some(forms) if logical_identity(&forms).is_ok() => PostState::Codewords(forms),
        _ => PostState::NotXpRepresentable(states),
    }
}
