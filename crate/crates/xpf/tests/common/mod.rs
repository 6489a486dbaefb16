//! Fixtures and checks shared by the integration test targets.
//!
//! Every `check_*` function returns `Err` with a description of the first
//! mismatch, so the acceptance target can report it and the focused test
//! targets can unwrap it.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use xpf::codespace::XpCode;
use xpf::logical::{
    analyse, classify_code, classify_operator, is_logical, logical_identity,
    logical_identity_modified, operator_for_action, phase_vector, reed_muller, CodeClass,
    OperatorClass,
};
use xpf::measure::{measure_diagonal_pauli, prob_diagonal, prob_nondiagonal};
use xpf::oracle::{
    fixed_space, index_of, matches_fixed_space, matrix_of, outcome_probability, overlap,
    preserves_codespace, state_of, DenseOperator, DenseState, TOLERANCE,
};
use xpf::ringlinalg::{howell_basis, RingMatrix};
use xpf::states::{
    cp_apply, extract_phase_function, whg_to_xp, whg_to_xp_optimised, ControlledPhase,
};
use xpf::xpgroup::canonical;
use xpf::XpOperator;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

macro_rules! ensure_eq {
    ($left:expr, $right:expr) => {{
        let (l, r) = (&$left, &$right);
        if l != r {
            return Err(format!(
                "{}: expected {:?}, got {:?}",
                stringify!($left),
                r,
                l
            ));
        }
    }};
}

pub fn op(s: &str) -> XpOperator {
    s.parse()
        .unwrap_or_else(|e| panic!("bad operator {s}: {e}"))
}

pub fn ops(list: &[&str]) -> Vec<XpOperator> {
    list.iter().map(|s| op(s)).collect()
}

pub fn bits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

pub fn strings<T: ToString>(list: &[T]) -> Vec<String> {
    list.iter().map(ToString::to_string).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn code_one() -> XpCode {
    XpCode::new(&ops(&[
        "XP_8(8|0000000|6554444)",
        "XP_8(7|1111111|1241234)",
        "XP_8(1|1110000|3134444)",
    ]))
    .unwrap()
}

pub fn code_two() -> XpCode {
    XpCode::new(&ops(&[
        "XP_8(0|0000000|1322224)",
        "XP_8(12|1111111|1234567)",
    ]))
    .unwrap()
}

/// `|+⟩^{⊗3}` as a precision 4 stabiliser state.
pub fn plus_state() -> XpCode {
    XpCode::new(&ops(&[
        "XP_4(0|100|000)",
        "XP_4(0|010|000)",
        "XP_4(0|001|000)",
    ]))
    .unwrap()
}

/// Weighted graph state on 4 qubits with CZ and controlled-S edges.
pub fn weighted_graph() -> Vec<ControlledPhase> {
    [
        "CP(1/2,1100)",
        "CP(1/2,0011)",
        "CP(1/4,1001)",
        "CP(1/4,0110)",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

/// Precision 2 generators of the 15-qubit Reed-Muller code.
pub fn reed_muller_pauli() -> Vec<XpOperator> {
    let z = [
        "100011100011101",
        "010010011011011",
        "001001010110111",
        "000100101101111",
        "000010000011001",
        "000001000010101",
        "000000100001101",
        "000000010010011",
        "000000001001011",
        "000000000100111",
    ];
    let x = &z[..4];
    let zero = "000000000000000";
    z.iter()
        .map(|v| op(&format!("XP_2(0|{zero}|{v})")))
        .chain(x.iter().map(|v| op(&format!("XP_2(0|{v}|{zero})"))))
        .collect()
}

/// Steane code generators with qubit `j` carrying the parity check column
/// `j + 1` in binary.
pub fn steane() -> Vec<XpOperator> {
    let rows = ["0001111", "0110011", "1010101"];
    rows.iter()
        .map(|v| op(&format!("XP_2(0|0000000|{v})")))
        .chain(rows.iter().map(|v| op(&format!("XP_2(0|{v}|0000000)"))))
        .collect()
}

/// Moves qubit `i` of `a` to position `perm[i]`.
pub fn permute_qubits(a: &XpOperator, perm: &[usize]) -> XpOperator {
    let mut x = vec![0; a.n()];
    let mut z = vec![0; a.n()];
    for (i, &j) in perm.iter().enumerate() {
        x[j] = a.x()[i];
        z[j] = a.z()[i];
    }
    XpOperator::new(a.precision(), a.p(), x, z)
}

/// `(z, dimension)` pairs of 7-qubit precision 8 diagonal operators and
/// their `+1` eigenspace dimensions.
pub const EIGENSPACE_TABLE: [(&str, usize); 29] = [
    ("3333333", 1),
    ("2555555", 2),
    ("0133333", 4),
    ("2355555", 6),
    ("3333335", 7),
    ("2223555", 8),
    ("6133335", 10),
    ("6133355", 12),
    ("1733333", 13),
    ("6113555", 14),
    ("1333355", 15),
    ("6133555", 16),
    ("1173335", 17),
    ("6111735", 18),
    ("1173355", 19),
    ("6135555", 20),
    ("3333355", 21),
    ("6155555", 22),
    ("2661117", 24),
    ("6111117", 26),
    ("2222266", 28),
    ("6111177", 30),
    ("4222666", 32),
    ("3333555", 35),
    ("2222666", 36),
    ("0333555", 40),
    ("0003355", 48),
    ("4444444", 64),
    ("0000000", 128),
];

// ---------------------------------------------------------------------------
// Random generation

pub fn random_operator(rng: &mut StdRng, precision: i64, n: usize) -> XpOperator {
    let p = rng.gen_range(0..2 * precision);
    let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let z: Vec<i64> = (0..n).map(|_| rng.gen_range(0..precision)).collect();
    XpOperator::new(precision, p, x, z)
}

pub fn random_diagonal(rng: &mut StdRng, precision: i64, n: usize) -> XpOperator {
    let z: Vec<i64> = (0..n).map(|_| rng.gen_range(0..precision)).collect();
    XpOperator::new(precision, 0, vec![0; n], z)
}

/// Random code with a nonempty codespace.
///
/// Non-diagonal generators get phase zero, which makes an empty codespace
/// less likely; empty draws are retried.
pub fn random_code(rng: &mut StdRng, precision: i64, n: usize) -> XpCode {
    loop {
        let nx = rng.gen_range(0..=2.min(n));
        let nz = rng.gen_range(1..=3);
        let mut g: Vec<XpOperator> = (0..nx)
            .map(|_| {
                let a = random_operator(rng, precision, n);
                a.with_phase(0)
            })
            .collect();
        g.extend((0..nz).map(|_| random_diagonal(rng, precision, n)));
        if let Ok(code) = XpCode::new(&g) {
            if code.dimension() > 0 {
                return code;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: algebra

pub fn check_algebra_fixture() -> Check {
    let product = op("XP_4(2|111|330)").mul(&op("XP_4(6|010|020)"));
    ensure_eq!(product.to_string(), "XP_4(6|101|330)".to_string());
    Ok(())
}

/// Closed-form algebra versus dense matrices for one pair.
pub fn check_algebra_pair(a: &XpOperator, b: &XpOperator, k: i64) -> Check {
    let (ma, mb) = (matrix_of(a).map_err(err)?, matrix_of(b).map_err(err)?);
    let m = |x: &XpOperator| matrix_of(x).unwrap();
    ensure!(m(&a.mul(b)) == ma.compose(&mb), "mul differs for {a}, {b}");
    ensure!(m(&a.inv()) == ma.inverse(), "inv differs for {a}");
    ensure!(m(&a.square()) == ma.compose(&ma), "square differs for {a}");
    ensure!(m(&a.pow(k)) == ma.power(k), "pow {k} differs for {a}");
    ensure!(
        m(&a.conj(b)) == ma.compose(&mb).compose(&ma.inverse()),
        "conj differs for {a}, {b}"
    );
    ensure!(
        m(&a.comm(b))
            == ma
                .compose(&mb)
                .compose(&ma.inverse())
                .compose(&mb.inverse()),
        "comm differs for {a}, {b}"
    );
    Ok(())
}

pub fn check_random_algebra(seed: u64, pairs: usize) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..pairs {
        let precision = [2, 4, 6, 8][rng.gen_range(0..4)];
        let n = rng.gen_range(1..=5);
        let a = random_operator(&mut rng, precision, n);
        let b = random_operator(&mut rng, precision, n);
        let k = rng.gen_range(-4..=6);
        check_algebra_pair(&a, &b, k)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 2: Code 1

pub fn check_code_one() -> Check {
    let code = code_one();
    let c = code.canonical();
    ensure_eq!(
        strings(&c.sz),
        ["XP_8(8|0000000|2334444)", "XP_8(0|0000000|0440000)"]
    );
    ensure_eq!(
        strings(&c.sx),
        ["XP_8(9|1110000|1240000)", "XP_8(14|0001111|0001234)"]
    );
    let reps: Vec<Vec<u8>> = ["0000001", "0000010", "0000100", "0000111"]
        .map(bits)
        .to_vec();
    ensure_eq!(code.orbit_reps().to_vec(), reps);
    let expected = [
        "|0000001⟩ + ω^6|0001110⟩ + ω^9|1110001⟩ + ω^15|1111110⟩",
        "|0000010⟩ + ω^4|0001101⟩ + ω^9|1110010⟩ + ω^13|1111101⟩",
        "|0000100⟩ + ω^2|0001011⟩ + ω^9|1110100⟩ + ω^11|1111011⟩",
        "|0000111⟩ + |0001000⟩ + ω^9|1110111⟩ + ω^9|1111000⟩",
    ];
    ensure_eq!(strings(code.codewords()), expected);

    let m = logical_identity(code.codewords()).map_err(err)?;
    ensure_eq!(
        strings(&m.mx),
        ["XP_8(9|1110000|0070000)", "XP_8(14|0001111|0001234)"]
    );
    ensure_eq!(
        strings(&m.mz),
        [
            "XP_8(0|0000000|1070000)",
            "XP_8(0|0000000|0170000)",
            "XP_8(8|0000000|0004444)"
        ]
    );
    let data = analyse(&code).map_err(err)?;
    ensure_eq!(data.identity, m);
    ensure_eq!(
        strings(&data.lz),
        [
            "XP_8(0|0000000|0002226)",
            "XP_8(0|0000000|0000404)",
            "XP_8(0|0000000|0000044)"
        ]
    );
    ensure_eq!(
        strings(&data.lx_ops()),
        ["XP_8(2|0000101|0000204)", "XP_8(1|0000011|0000034)"]
    );
    ensure_eq!(
        data.basis.fd.to_vecs(),
        [
            vec![1, 1, 1, 1],
            vec![0, 8, 0, 0],
            vec![0, 0, 8, 0],
            vec![0, 0, 0, 8]
        ]
    );
    // The logical CZ phase (0,0,8,8) in this codeword order.
    let cz = operator_for_action(&[0, 0, 8, 8], &data.basis).ok_or("logical CZ not achievable")?;
    ensure_eq!(
        phase_vector(&cz, code.codewords()).map_err(err)?.f,
        vec![0, 0, 8, 8]
    );
    ensure!(is_logical(&cz, &data.identity), "{cz} is not logical");
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 3: Code 2

pub fn check_code_two() -> Check {
    let code = code_two();
    let expected = [
        "|0000000⟩ + ω^12|1111111⟩",
        "|0000111⟩ + |1111000⟩",
        "|0001011⟩ + ω^14|1110100⟩",
        "|0001101⟩ + ω^12|1110010⟩",
        "|0011110⟩ + |1100001⟩",
        "|0011001⟩ + ω^8|1100110⟩",
        "|0010101⟩ + ω^10|1101010⟩",
        "|0010011⟩ + ω^12|1101100⟩",
    ];
    ensure_eq!(strings(code.codewords()), expected);
    let d = code.decomposition();
    ensure_eq!(d.eq.len(), 4);
    ensure_eq!(classify_code(d), CodeClass::NonXpRegular);
    ensure_eq!(d.lx_matrix.to_vecs(), [vec![0, 0, 1, 1, 1, 1, 0]]);

    let data = analyse(&code).map_err(err)?;
    ensure_eq!(
        strings(&data.lz),
        [
            "XP_8(0|0000000|0211112)",
            "XP_8(0|0000000|0022220)",
            "XP_8(0|0000000|0004004)",
            "XP_8(0|0000000|0000404)",
            "XP_8(0|0000000|0000044)"
        ]
    );
    ensure_eq!(strings(&data.lx_ops()), ["XP_8(2|0011110|0012304)"]);
    let zbar = op("XP_8(0|0000000|0062224)");
    ensure_eq!(
        phase_vector(&zbar, code.codewords()).map_err(err)?.f,
        vec![0, 0, 0, 0, 8, 8, 8, 8]
    );
    let fd_expected = howell_basis(&RingMatrix::new(
        16,
        8,
        [
            [1, 1, 1, 1, 1, 1, 1, 1],
            [0, 8, 0, 0, 0, 0, 8, 8],
            [0, 0, 8, 0, 0, 0, 8, 0],
            [0, 0, 0, 8, 0, 0, 0, 8],
            [0, 0, 0, 0, 8, 0, 0, 0],
            [0, 0, 0, 0, 0, 8, 8, 8],
        ],
    ));
    ensure_eq!(data.basis.fd, fd_expected);

    let class = |s: &str| classify_operator(&op(s), &code).map_err(err);
    ensure_eq!(class("XP_8(0|0|0062224)")?, OperatorClass::Regular);
    ensure_eq!(class("XP_8(0|0|0026620)")?, OperatorClass::Core);
    ensure_eq!(class("XP_8(0|0|0277772)")?, OperatorClass::Neither);
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 4: eigenspace dimensions

pub fn check_eigenspace_table() -> Check {
    for (z, dim) in EIGENSPACE_TABLE {
        let a = op(&format!("XP_8(0|0000000|{z})"));
        let code = XpCode::new(std::slice::from_ref(&a)).map_err(err)?;
        ensure!(
            code.zsupport().len() == dim,
            "{a}: zsupport size {} != {dim}",
            code.zsupport().len()
        );
        let dense = fixed_space(std::slice::from_ref(&a)).map_err(err)?.len();
        ensure!(dense == dim, "{a}: oracle dimension {dense} != {dim}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 5: measurement

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn check_pauli_measurements() -> Check {
    let code = code_two();
    let core = code.core_form(vec![op("XP_8(14|0011110|0012340)")]);

    let z = op("XP_2(0|0000000|0111111)");
    let m = measure_diagonal_pauli(&core, &z).map_err(err)?;
    ensure!(m.removed.is_none(), "unexpected update step");
    ensure_eq!(m.outcomes[0].probability, Ratio::new(1, 4));
    ensure_eq!(m.outcomes[1].probability, Ratio::new(3, 4));
    ensure_eq!(
        m.outcomes[0].core.as_ref().map(|c| c.eq.clone()),
        Some(vec![bits("0000000")])
    );

    let z = op("XP_2(0|0000000|0000100)");
    let m = measure_diagonal_pauli(&core, &z).map_err(err)?;
    let removed = m.removed.clone().ok_or("no generator removed")?;
    // Same operator as the printed one, up to the diagonal logical identities.
    let printed = op("XP_8(12|1111111|0334567)");
    let identity = logical_identity(code.codewords()).map_err(err)?;
    let quotient = removed.mul(&printed.inv());
    ensure!(
        quotient.is_diagonal() && is_logical(&quotient, &identity),
        "{removed} differs from {printed}"
    );
    ensure!(
        canonical(&[identity.all(), vec![removed.clone()]].concat())
            == canonical(&[identity.all(), vec![printed]].concat()),
        "removed generator {removed} differs from the printed one"
    );
    ensure_eq!(strings(&m.updated.lx), ["XP_8(14|1100001|0700003)"]);
    ensure_eq!(m.outcomes[0].probability, Ratio::new(1, 2));
    ensure_eq!(m.outcomes[1].probability, Ratio::new(1, 2));

    // Oracle agreement for every diagonal Pauli on Code 2.
    for mask in 0..1u32 << 7 {
        let zs: String = (0..7)
            .map(|i| if mask >> (6 - i) & 1 == 1 { '1' } else { '0' })
            .collect();
        let pauli = op(&format!("XP_2(0|0000000|{zs})"));
        let m = measure_diagonal_pauli(&core, &pauli).map_err(err)?;
        let up = pauli.upscale(4);
        let dense = outcome_probability(&up, 0, code.codewords()).map_err(err)?;
        ensure!(
            (dense - ratio_f64(m.outcomes[0].probability)).abs() < TOLERANCE,
            "{pauli}: oracle {dense} vs {}",
            m.outcomes[0].probability
        );
        ensure!(
            m.updated
                .sx
                .iter()
                .chain(&m.updated.lx)
                .all(|a| xpf::measure::parity(a.x(), &bits(&zs)) == 0),
            "{pauli}: odd-parity member left after update"
        );
        let sum = m.outcomes[0].probability + m.outcomes[1].probability;
        ensure_eq!(sum, Ratio::from_integer(1));
    }
    Ok(())
}

pub fn check_precision_four_measurements() -> Check {
    let code = plus_state();
    let a = op("XP_4(0|000|133)");
    let expected = [
        Ratio::new(3, 8),
        Ratio::new(1, 8),
        Ratio::new(1, 8),
        Ratio::new(3, 8),
    ];
    for (m, want) in [0, 2, 4, 6].into_iter().zip(expected) {
        let got = prob_diagonal(code.codewords(), &a, m).map_err(err)?;
        ensure_eq!(got, want);
        let dense = outcome_probability(&a, m, code.codewords()).map_err(err)?;
        ensure!(
            (dense - ratio_f64(want)).abs() < TOLERANCE,
            "oracle {dense} for eigenvalue ω^{m}"
        );
    }
    let b = op("XP_4(2|111|123)");
    for m in [0, 4] {
        let got = prob_nondiagonal(code.codewords(), &code.canonical().sx, &b, m).map_err(err)?;
        ensure_eq!(got.as_rational(), Some(Ratio::new(1, 2)));
        let dense = outcome_probability(&b, m, code.codewords()).map_err(err)?;
        ensure!(
            (dense - 0.5).abs() < TOLERANCE,
            "oracle {dense} for eigenvalue ω^{m}"
        );
    }
    Ok(())
}

/// Exact probabilities versus dense projection for random measurements.
pub fn check_random_measurements(seed: u64, trials: usize) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let precision = [2, 4, 8][rng.gen_range(0..3)];
        let n = rng.gen_range(2..=6);
        let code = random_code(&mut rng, precision, n);
        let a = random_operator(&mut rng, precision, n);
        let mut total = 0.0;
        for m in a.eigenvalues().exponents {
            let exact = if a.is_diagonal() {
                ratio_f64(prob_diagonal(code.codewords(), &a, m).map_err(err)?)
            } else {
                prob_nondiagonal(code.codewords(), &code.canonical().sx, &a, m)
                    .map_err(err)?
                    .value()
            };
            let dense = outcome_probability(&a, m, code.codewords()).map_err(err)?;
            ensure!(
                (exact - dense).abs() < 1e-9,
                "{a} eigenvalue ω^{m} on {:?}: exact {exact}, oracle {dense}",
                strings(code.generators())
            );
            total += exact;
        }
        ensure!(
            (total - 1.0).abs() < 1e-9,
            "{a}: probabilities sum to {total}"
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 6: states

pub fn check_union_jack() -> Check {
    let sx = ops(&[
        "XP_4(0|1000111000|0112000033)",
        "XP_4(0|0100100110|1001003000)",
        "XP_4(0|0010010101|1001003000)",
        "XP_4(0|0001001011|2110330000)",
    ]);
    let found: BTreeSet<String> = extract_phase_function(4, &sx, &[0; 10])
        .iter()
        .map(ToString::to_string)
        .collect();
    let expected: BTreeSet<String> = ["CP(1/2,1011000000)", "CP(1/2,1101000000)"]
        .map(String::from)
        .into();
    ensure_eq!(found, expected);
    Ok(())
}

/// Embedded weighted hypergraph state `E|ψ⟩` on the columns of `embedding`.
fn embedded_state(
    cps: &[ControlledPhase],
    r: usize,
    code: &xpf::states::WhgCode,
) -> Result<DenseState, String> {
    let n = code.embedding.n();
    let mut s = DenseState::zero(n).map_err(err)?;
    for idx in 0..1usize << r {
        let e: Vec<u8> = (0..r).map(|i| ((idx >> (r - 1 - i)) & 1) as u8).collect();
        let phase: Ratio<i64> = cps.iter().map(|cp| cp_apply(cp, &e)).sum();
        let angle = 2.0 * std::f64::consts::PI * ratio_f64(phase);
        s.amplitudes[index_of(&code.embedding.apply(&e))] += Complex64::from_polar(1.0, angle);
    }
    Ok(s)
}

fn check_embedding(cps: &[ControlledPhase], r: usize, code: &xpf::states::WhgCode) -> Check {
    let xp = XpCode::new(&code.generators()).map_err(err)?;
    ensure_eq!(xp.dimension(), 1);
    let cw = state_of(&xp.codewords()[0]).map_err(err)?.normalised();
    let target = embedded_state(cps, r, code)?.normalised();
    let fidelity = overlap(&cw, &target).norm_sqr();
    ensure!(
        (fidelity - 1.0).abs() < TOLERANCE,
        "embedded state fidelity {fidelity}"
    );
    Ok(())
}

pub fn check_weighted_graph_codes() -> Check {
    let cps = weighted_graph();
    let code = whg_to_xp(&cps, 4).map_err(err)?;
    ensure_eq!(code.precision, 4);
    ensure_eq!(
        strings(&code.sx),
        [
            "XP_4(0|1000111000|1000201000)",
            "XP_4(0|0100100110|0100200100)",
            "XP_4(0|0010010101|0010000102)",
            "XP_4(0|0001001011|0001001002)"
        ]
    );
    ensure_eq!(code.sz.len(), 6);
    ensure_eq!(
        code.sz[0].to_string(),
        "XP_4(0|0000000000|2200200000)".to_string()
    );
    check_embedding(&cps, 4, &code)?;

    let small = whg_to_xp_optimised(&cps, 4).map_err(err)?;
    ensure_eq!(
        strings(&small.sx),
        [
            "XP_4(0|100010|320010)",
            "XP_4(0|010001|230001)",
            "XP_4(0|001001|003201)",
            "XP_4(0|000110|002310)"
        ]
    );
    ensure_eq!(
        strings(&small.sz),
        ["XP_4(0|000000|200220)", "XP_4(0|000000|022002)"]
    );
    check_embedding(&cps, 4, &small)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 7: Reed-Muller

fn upscaled(g: &[XpOperator], k: i64) -> Vec<XpOperator> {
    g.iter().map(|a| a.upscale(k)).collect()
}

pub fn check_reed_muller() -> Check {
    // r = 3 is the Steane code.
    // Qubit j of the Reed-Muller code carries column j of the embedding
    // matrix; the Steane layout puts the column with binary value b at b - 1.
    let columns = xpf::states::embedding_matrix(3, 3).transpose();
    let perm: Vec<usize> = columns
        .rows()
        .map(|c| c.iter().fold(0, |acc, &v| 2 * acc + v as usize) - 1)
        .collect();
    let rm3_ops: Vec<XpOperator> = reed_muller(3)
        .map_err(err)?
        .iter()
        .map(|a| permute_qubits(a, &perm))
        .collect();
    let rm3 = XpCode::new(&rm3_ops).map_err(err)?;
    let st = XpCode::new(&steane()).map_err(err)?;
    let m_rm = logical_identity(rm3.codewords()).map_err(err)?;
    let m_st = logical_identity(st.codewords()).map_err(err)?;
    ensure!(
        canonical(&m_rm.all()) == canonical(&m_st.all()),
        "r = 3 code differs from the Steane code"
    );
    ensure!(
        matches_fixed_space(&steane(), rm3.codewords()).map_err(err)?,
        "oracle codespace differs"
    );

    // r = 4: the Pauli generators and the compact precision 4 set.
    let pauli8 = upscaled(&reed_muller_pauli(), 4);
    let compact8 = upscaled(&reed_muller(4).map_err(err)?, 2);
    let code8 = XpCode::new(&pauli8).map_err(err)?;
    let compact = XpCode::new(&compact8).map_err(err)?;
    let m8 = logical_identity_modified(&code8).map_err(err)?;
    let mc = logical_identity_modified(&compact).map_err(err)?;
    ensure!(
        canonical(&m8.all()) == canonical(&mc.all()),
        "generator sets give different codespaces"
    );
    ensure!(
        canonical(&pauli8) != canonical(&compact8),
        "generator sets give the same group"
    );

    let sdag = op("XP_8(0|000000000000000|000022222200002)");
    let tdag = op("XP_8(0|000000000000000|111111111111111)");
    for (a, f) in [(&tdag, vec![0, 14]), (&sdag, vec![0, 12])] {
        ensure!(is_logical(a, &m8), "{a} is not logical");
        ensure_eq!(phase_vector(a, code8.codewords()).map_err(err)?.f, f);
    }
    let data8 = analyse(&code8).map_err(err)?;
    ensure!(
        operator_for_action(&[0, 14], &data8.basis).is_some(),
        "T̄† action not achievable"
    );

    // N = 16 only adds the finer global phase.
    let code16 = XpCode::new(&upscaled(&pauli8, 2)).map_err(err)?;
    let data16 = analyse(&code16).map_err(err)?;
    let mut rows = vec![vec![1, 1]];
    rows.extend(
        data8
            .basis
            .fd
            .rows()
            .map(|r| r.iter().map(|v| 2 * v).collect::<Vec<_>>()),
    );
    let expected = howell_basis(&RingMatrix::new(32, 2, rows));
    ensure_eq!(data16.basis.fd, expected);
    Ok(())
}

// ---------------------------------------------------------------------------
// Criterion 8: property suites

fn span(m: &RingMatrix) -> BTreeSet<Vec<i64>> {
    let modulus = m.modulus();
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::from([vec![0; m.ncols()]]);
    for row in m.rows() {
        let current: Vec<Vec<i64>> = out.iter().cloned().collect();
        for v in current {
            for k in 1..modulus {
                out.insert(
                    v.iter()
                        .zip(row)
                        .map(|(a, b)| (a + k * b).rem_euclid(modulus))
                        .collect(),
                );
            }
        }
    }
    out
}

/// Howell basis of `m` is idempotent, spans the same set and does not depend
/// on the generating set chosen for the span.
pub fn check_howell_instance(m: &RingMatrix, extra: &[i64]) -> Check {
    let h = howell_basis(m);
    ensure_eq!(howell_basis(&h), h);
    ensure!(span(&h) == span(m), "span changed for {:?}", m.to_vecs());
    // Append a combination of the rows; the span and Howell basis stay put.
    let modulus = m.modulus();
    let mut combo = vec![0; m.ncols()];
    for (row, k) in m.rows().zip(extra) {
        for (c, v) in combo.iter_mut().zip(row) {
            *c = (*c + k * v).rem_euclid(modulus);
        }
    }
    let mut rows = m.to_vecs();
    rows.reverse();
    rows.push(combo);
    ensure_eq!(howell_basis(&RingMatrix::new(modulus, m.ncols(), rows)), h);
    Ok(())
}

pub fn check_random_howell(seed: u64, trials: usize) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let modulus = rng.gen_range(2..=8);
        let cols = rng.gen_range(1..=4);
        let nrows = rng.gen_range(0..=4);
        let rows: Vec<Vec<i64>> = (0..nrows)
            .map(|_| (0..cols).map(|_| rng.gen_range(0..modulus)).collect())
            .collect();
        let extra: Vec<i64> = (0..nrows).map(|_| rng.gen_range(0..modulus)).collect();
        check_howell_instance(&RingMatrix::new(modulus, cols, rows), &extra)?;
    }
    Ok(())
}

fn dense_group(g: &[XpOperator], precision: i64, n: usize) -> HashSet<DenseOperator> {
    let gens: Vec<DenseOperator> = g.iter().map(|a| matrix_of(a).unwrap()).collect();
    let identity = DenseOperator::scalar(precision, n, 0).unwrap();
    let mut seen = HashSet::from([identity.clone()]);
    let mut stack = vec![identity];
    while let Some(a) = stack.pop() {
        for b in &gens {
            let c = a.compose(b);
            if seen.insert(c.clone()) {
                stack.push(c);
            }
        }
    }
    seen
}

pub fn check_canonical_instance(g: &[XpOperator]) -> Check {
    let (precision, n) = (g[0].precision(), g[0].n());
    let c = canonical(g);
    ensure!(
        dense_group(&c.all(), precision, n) == dense_group(g, precision, n),
        "canonical generators of {:?} generate a different group",
        strings(g)
    );
    let mut shuffled: Vec<XpOperator> = g.iter().rev().cloned().collect();
    shuffled.push(g[0].mul(&g[g.len() - 1]));
    ensure!(
        canonical(&shuffled) == c,
        "canonical form depends on the generating set for {:?}",
        strings(g)
    );
    Ok(())
}

pub fn check_random_canonical(seed: u64, trials: usize) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let precision = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let g: Vec<XpOperator> = (0..k)
            .map(|_| random_operator(&mut rng, precision, n))
            .collect();
        check_canonical_instance(&g)?;
    }
    Ok(())
}

pub fn check_identity_instance(code: &XpCode) -> Check {
    let full = logical_identity(code.codewords()).map_err(err)?;
    let modified = logical_identity_modified(code).map_err(err)?;
    ensure!(
        canonical(&full.all()) == canonical(&modified.all()),
        "identity groups differ for {:?}",
        strings(code.generators())
    );
    Ok(())
}

/// Every emitted logical operator is logical and preserves the codespace.
pub fn check_logicals_instance(code: &XpCode) -> Check {
    let data = analyse(code).map_err(err)?;
    let emitted: Vec<XpOperator> = data
        .lz
        .iter()
        .chain(&data.lx_ops())
        .chain(&data.identity.all())
        .chain(&data.basis.ld)
        .cloned()
        .collect();
    for l in &emitted {
        ensure!(
            is_logical(l, &data.identity),
            "{l} fails is_logical for {:?}",
            strings(code.generators())
        );
        if code.n() <= 10 {
            ensure!(
                preserves_codespace(l, code.codewords()).map_err(err)?,
                "{l} leaves the codespace of {:?}",
                strings(code.generators())
            );
        }
    }
    for a in &data.identity.all() {
        for cw in code.codewords() {
            ensure!(
                xpf::oracle::fixes(a, cw).map_err(err)?,
                "{a} does not fix {cw}"
            );
        }
    }
    ensure!(
        matches_fixed_space(code.generators(), code.codewords()).map_err(err)?,
        "codewords differ from the oracle fixed space of {:?}",
        strings(code.generators())
    );
    Ok(())
}

pub fn check_random_codes(seed: u64, trials: usize) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let precision = [2, 4, 8][rng.gen_range(0..3)];
        let n = rng.gen_range(1..=10);
        let code = random_code(&mut rng, precision, n);
        check_identity_instance(&code)?;
        check_logicals_instance(&code)?;
    }
    Ok(())
}
