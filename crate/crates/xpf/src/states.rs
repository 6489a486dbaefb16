//! XP stabiliser states and weighted hypergraph states: phase functions,
//! controlled phase operators and the embedding construction.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Result, XpError};
use crate::ringlinalg::{leading_indices, RingMatrix};
use crate::xpgroup::{generator_product, x_matrix};
use crate::xpop::{format_bits, XpOperator};

/// Generalised controlled phase `CP(p/q, v)`.
///
/// Applies `exp(2πi·p/q)` to `|e⟩` when the support of `v` lies inside the
/// support of `e`. The fraction is kept reduced with `0 ≤ p/q < 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ControlledPhase {
    phase: Ratio<i64>,
    v: Vec<u8>,
}

impl ControlledPhase {
    /// # Panics
    ///
    /// Panics if `q` is not positive.
    pub fn new(p: i64, q: i64, v: impl Into<Vec<u8>>) -> Self {
        assert!(q > 0, "controlled phase denominator must be positive");
        let phase = Ratio::new(p.rem_euclid(q), q);
        ControlledPhase { phase, v: v.into() }
    }

    /// The phase as a fraction of a full turn.
    pub fn phase(&self) -> Ratio<i64> {
        self.phase
    }

    pub fn edge(&self) -> &[u8] {
        &self.v
    }

    pub fn weight(&self) -> usize {
        self.v.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for ControlledPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CP({}/{},{})",
            self.phase.numer(),
            self.phase.denom(),
            format_bits(&self.v)
        )
    }
}

impl FromStr for ControlledPhase {
    type Err = XpError;

    /// Parses `CP(p/q,v)` with `v` a bitstring; spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let err = |message: &str| XpError::Parse {
            line: 1,
            column: 1,
            message: format!("{message} in {s:?}"),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = compact
            .strip_prefix("CP(")
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| err("expected CP(p/q,v)"))?;
        let (frac, bits) = body.split_once(',').ok_or_else(|| err("missing ','"))?;
        let (p, q) = frac.split_once('/').ok_or_else(|| err("missing '/'"))?;
        let p: i64 = p.parse().map_err(|_| err("bad numerator"))?;
        let q: i64 = q.parse().map_err(|_| err("bad denominator"))?;
        if q <= 0 {
            return Err(err("denominator must be positive"));
        }
        let v = bits
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(err("edge must be a bitstring")),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(ControlledPhase::new(p, q, v))
    }
}

/// Phase applied by `cp` to `|e⟩`, as a fraction of a full turn.
///
/// # Panics
///
/// Panics if the lengths differ.
pub fn cp_apply(cp: &ControlledPhase, e: &[u8]) -> Ratio<i64> {
    assert_eq!(cp.v.len(), e.len(), "controlled phase length mismatch");
    if cp.v.iter().zip(e).all(|(&v, &b)| v <= b) {
        cp.phase
    } else {
        Ratio::from_integer(0)
    }
}

/// Subsets of `0..r` of each weight in `1..=m`, by weight then in
/// lexicographic order of their index lists.
pub fn weighted_subsets(r: usize, m: usize) -> Vec<Vec<usize>> {
    fn extend(
        r: usize,
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..r {
            current.push(i);
            extend(r, k, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=m.min(r) {
        extend(r, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Binary `r × |columns|` matrix `M^r_m` whose columns are the indicator
/// vectors of [`weighted_subsets`].
pub fn embedding_matrix(r: usize, m: usize) -> RingMatrix {
    columns_matrix(r, &weighted_subsets(r, m))
}

fn columns_matrix(r: usize, columns: &[Vec<usize>]) -> RingMatrix {
    let rows = (0..r).map(|i| {
        columns
            .iter()
            .map(|c| i64::from(c.contains(&i)))
            .collect::<Vec<_>>()
    });
    RingMatrix::new(2, columns.len(), rows)
}

/// Embedding `|e⟩ ↦ |e·M mod 2⟩` of `r` qubits into one qubit per column.
///
/// The columns always start with the `r` singletons, so that `M = (I | A)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Embedding {
    pub r: usize,
    /// Largest column weight.
    pub m: usize,
    /// Support of each column.
    pub columns: Vec<Vec<usize>>,
}

impl Embedding {
    /// The full embedding `E^r_m`.
    pub fn new(r: usize, m: usize) -> Self {
        Embedding {
            r,
            m: m.max(1),
            columns: weighted_subsets(r, m.max(1)),
        }
    }

    /// Number of target qubits.
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// True if every column is a singleton.
    pub fn is_trivial(&self) -> bool {
        self.columns.iter().all(|c| c.len() == 1)
    }

    pub fn matrix(&self) -> RingMatrix {
        columns_matrix(self.r, &self.columns)
    }

    /// Rows `(Aᵀ | I)` spanning the binary kernel of `M`, one per column of
    /// weight at least 2.
    pub fn kernel(&self) -> RingMatrix {
        let n = self.n();
        let rows = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .map(|(j, c)| {
                let mut row = vec![0i64; n];
                for &i in c {
                    row[i] = 1;
                }
                row[j] = 1;
                row
            });
        RingMatrix::new(2, n, rows)
    }

    /// Image of a basis vector.
    pub fn apply(&self, e: &[u8]) -> Vec<u8> {
        assert_eq!(e.len(), self.r, "embedding input length mismatch");
        self.columns
            .iter()
            .map(|c| c.iter().fold(0u8, |acc, &i| acc ^ e[i]))
            .collect()
    }
}

/// Phase function of `O_{S_X}|m⟩` as controlled phases on the support.
///
/// Applying the returned operators to the flat superposition over the
/// Z-support reproduces the phases of the state. Edges are listed by weight
/// then lexicographically. `sx` must be canonical and `m` an orbit
/// representative.
pub fn extract_phase_function(precision: i64, sx: &[XpOperator], m: &[u8]) -> Vec<ControlledPhase> {
    let n = m.len();
    let r = sx.len();
    let leads = leading_indices(&x_matrix(sx, n));
    let two_n = 2 * precision;
    let max_weight = if precision.count_ones() == 1 {
        (precision.trailing_zeros() as usize + 1).min(r)
    } else {
        r
    };
    let phase_of = |subset: &[usize]| -> i64 {
        let mut u = vec![0i64; r];
        for &i in subset {
            u[i] = 1;
        }
        generator_product(precision, n, sx, &u).apply_basis(m).0
    };
    let mut out = Vec::new();
    for s in weighted_subsets(r, max_weight) {
        // Möbius inversion over the subsets of s.
        let k = s.len();
        let mut coeff = 0;
        for mask in 0..1usize << k {
            let d: Vec<usize> = (0..k)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| s[j])
                .collect();
            let sign = if (k - d.len()).is_multiple_of(2) {
                1
            } else {
                -1
            };
            if !d.is_empty() {
                coeff += sign * phase_of(&d);
            }
        }
        let coeff = coeff.rem_euclid(two_n);
        if coeff != 0 {
            let mut v = vec![0u8; n];
            for &i in &s {
                v[leads[i]] = 1;
            }
            out.push(ControlledPhase::new(coeff, two_n, v));
        }
    }
    out
}

/// XP code whose codespace is spanned by an embedded weighted hypergraph state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WhgCode {
    pub precision: i64,
    pub embedding: Embedding,
    pub sx: Vec<XpOperator>,
    pub sz: Vec<XpOperator>,
}

impl WhgCode {
    /// Stabiliser generators, non-diagonal first.
    pub fn generators(&self) -> Vec<XpOperator> {
        self.sx.iter().chain(&self.sz).cloned().collect()
    }
}

fn lcm_all(values: impl IntoIterator<Item = i64>) -> i64 {
    values.into_iter().fold(2, |acc, v| acc.lcm(&v))
}

fn edge_set(cp: &ControlledPhase) -> Vec<usize> {
    cp.v.iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|i| b.contains(i))
}

fn check_edges(cps: &[ControlledPhase], r: usize) -> Result<Vec<ControlledPhase>> {
    if let Some(cp) = cps.iter().find(|cp| cp.v.len() != r) {
        return Err(XpError::Mismatch(format!(
            "{cp} does not act on {r} qubits"
        )));
    }
    Ok(cps
        .iter()
        .filter(|cp| cp.weight() > 0 && *cp.phase.numer() != 0)
        .cloned()
        .collect())
}

fn whg_precision(cps: &[ControlledPhase]) -> i64 {
    lcm_all(cps.iter().map(|cp| {
        let q = *cp.phase.denom();
        match cp.weight() {
            1 if q > 2 && q % 2 == 0 => q / 2,
            1 => q,
            w => q << (w - 2),
        }
    }))
}

fn build(cps: &[ControlledPhase], r: usize, optimise: bool) -> Result<WhgCode> {
    let cps = check_edges(cps, r)?;
    let m = cps
        .iter()
        .map(ControlledPhase::weight)
        .max()
        .unwrap_or(1)
        .max(1);
    let precision = whg_precision(&cps);
    let full = Embedding::new(r, m);
    let n = full.n();
    let mx = full.matrix();
    let alternating: Vec<i64> = full
        .columns
        .iter()
        .map(|c| if c.len() % 2 == 0 { 1 } else { -1 })
        .collect();
    let edges: Vec<Vec<usize>> = cps.iter().map(edge_set).collect();
    // The optimised rule needs each controlled Z edge to lie in no other edge.
    let optimisable = |i: usize| {
        optimise
            && cps[i].phase == Ratio::new(1, 2)
            && edges[i].len() >= 2
            && edges
                .iter()
                .enumerate()
                .all(|(j, other)| j == i || !is_subset(&edges[i], other))
    };
    let optimise_all = (0..cps.len())
        .all(|i| cps[i].phase != Ratio::new(1, 2) || edges[i].len() < 2 || optimisable(i));

    let mut sx = Vec::with_capacity(r);
    for j in 0..r {
        let xj: Vec<u8> = mx.row(j).iter().map(|&v| v as u8).collect();
        let mut op = XpOperator::new(precision, 0, xj.clone(), vec![0; n]);
        for (i, cp) in cps.iter().enumerate() {
            let inclusion: Vec<i64> = full
                .columns
                .iter()
                .map(|c| i64::from(is_subset(c, &edges[i])))
                .collect();
            let turns = cp.phase * Ratio::from_integer(2 * precision);
            if edges[i].len() == 1 {
                let scale = turns.to_integer();
                let z: Vec<i64> = (0..n)
                    .map(|c| scale * xj[c] as i64 * inclusion[c])
                    .collect();
                op = op.mul(&XpOperator::antisym(precision, &z));
                continue;
            }
            let scale = (turns / Ratio::from_integer(1 << (edges[i].len() - 1))).to_integer();
            let z: Vec<i64> = if optimise_all && optimisable(i) {
                let vj = i64::from(edges[i].contains(&j));
                (0..n)
                    .map(|c| scale * vj * alternating[c] * (xj[c] as i64 - 1) * inclusion[c])
                    .collect()
            } else {
                (0..n)
                    .map(|c| scale * alternating[c] * xj[c] as i64 * inclusion[c])
                    .collect()
            };
            op = op.mul(&XpOperator::diagonal(precision, z));
        }
        sx.push(op);
    }

    let keep: Vec<usize> = if optimise {
        (0..n)
            .filter(|&c| full.columns[c].len() == 1 || sx.iter().any(|a| a.z()[c] != 0))
            .collect()
    } else {
        (0..n).collect()
    };
    let restrict_bits = |v: &[u8]| keep.iter().map(|&c| v[c]).collect::<Vec<u8>>();
    let restrict = |v: &[i64]| keep.iter().map(|&c| v[c]).collect::<Vec<i64>>();
    let sx = sx
        .iter()
        .map(|a| XpOperator::new(precision, a.p(), restrict_bits(a.x()), restrict(a.z())))
        .collect();
    let embedding = Embedding {
        r,
        m,
        columns: keep.iter().map(|&c| full.columns[c].clone()).collect(),
    };
    let sz = embedding
        .kernel()
        .rows()
        .map(|row| {
            XpOperator::diagonal(
                precision,
                row.iter().map(|v| v * precision / 2).collect::<Vec<_>>(),
            )
        })
        .collect();
    Ok(WhgCode {
        precision,
        embedding,
        sx,
        sz,
    })
}

/// XP code stabilising the embedded state `E^r_m ∏ CP(p_i/q_i, v_i) |+⟩^r`.
///
/// Edges of weight zero only contribute a global phase and are dropped.
pub fn whg_to_xp(cps: &[ControlledPhase], r: usize) -> Result<WhgCode> {
    build(cps, r, false)
}

/// Variant of [`whg_to_xp`] that clears the Z components on controlled Z
/// edges and deletes the embedded qubits no generator acts on diagonally.
///
/// When a controlled Z edge lies inside another edge, controlled Z edges use
/// the unoptimised rule; unused qubits are still deleted.
pub fn whg_to_xp_optimised(cps: &[ControlledPhase], r: usize) -> Result<WhgCode> {
    build(cps, r, true)
}
