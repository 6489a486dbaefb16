//! XP operators and their closed-form algebra.
//!
//! An operator of precision `N` on `n` qubits is stored in its unique
//! vector form `XP_N(p|x|z)` with `p ∈ Z_2N`, `x ∈ Z_2^n` and `z ∈ Z_N^n`.
//! It acts on computational basis states as `A|e⟩ = ω^(p + 2e·z)|e ⊕ x⟩`
//! where `ω = exp(iπ/N)`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Result, XpError};

/// XP operator in unique vector form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct XpOperator {
    precision: i64,
    p: i64,
    x: Vec<u8>,
    z: Vec<i64>,
}

/// Possible eigenvalues `ω^m` of an operator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EigenvalueSet {
    /// Smallest `d` with `A^d` a multiple of the identity.
    pub degree: i64,
    /// Phase `q` with `A^d = ω^q I`.
    pub fundamental_phase: i64,
    /// Exponents `m` satisfying `d·m ≡ q (mod 2N)`, ascending.
    pub exponents: Vec<i64>,
}

/// One term `scale · ω^phase |bits⟩` of a formal ket.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KetTerm {
    pub scale: Ratio<i64>,
    pub phase: i64,
    pub bits: Vec<u8>,
}

pub(crate) fn dot(x: &[u8], z: &[i64]) -> i64 {
    x.iter().zip(z).map(|(&a, &b)| a as i64 * b).sum()
}

pub(crate) fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(u, v)| u ^ v).collect()
}

impl XpOperator {
    /// Builds `XP_N(p|x|z)`, reducing `p` mod `2N`, `x` mod 2 and `z` mod `N`.
    ///
    /// # Panics
    ///
    /// Panics if `N < 2` or `x` and `z` have different lengths.
    pub fn new(precision: i64, p: i64, x: impl Into<Vec<u8>>, z: impl Into<Vec<i64>>) -> Self {
        assert!(precision >= 2, "precision must be at least 2");
        let x: Vec<u8> = x.into().into_iter().map(|v| v & 1).collect();
        let z: Vec<i64> = z
            .into()
            .into_iter()
            .map(|v| v.rem_euclid(precision))
            .collect();
        assert_eq!(x.len(), z.len(), "x and z components differ in length");
        XpOperator {
            precision,
            p: p.rem_euclid(2 * precision),
            x,
            z,
        }
    }

    /// Identity on `n` qubits.
    pub fn identity(precision: i64, n: usize) -> Self {
        Self::new(precision, 0, vec![0; n], vec![0; n])
    }

    /// The scalar operator `ω^p I`.
    pub fn phase(precision: i64, n: usize, p: i64) -> Self {
        Self::new(precision, p, vec![0; n], vec![0; n])
    }

    /// Diagonal operator `XP_N(0|0|z)`.
    pub fn diagonal(precision: i64, z: impl Into<Vec<i64>>) -> Self {
        let z = z.into();
        Self::new(precision, 0, vec![0; z.len()], z)
    }

    /// Antisymmetric operator `D_N(z) = XP_N(Σz|0|−z)`.
    pub fn antisym(precision: i64, z: &[i64]) -> Self {
        Self::new(
            precision,
            z.iter().sum(),
            vec![0; z.len()],
            z.iter().map(|v| -v).collect::<Vec<_>>(),
        )
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn x(&self) -> &[u8] {
        &self.x
    }

    pub fn z(&self) -> &[i64] {
        &self.z
    }

    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.p == 0 && self.is_diagonal() && self.z.iter().all(|&v| v == 0)
    }

    /// Copy with the phase component replaced.
    pub fn with_phase(&self, p: i64) -> Self {
        Self::new(self.precision, p, self.x.clone(), self.z.clone())
    }

    fn check_compatible(&self, other: &XpOperator) {
        assert_eq!(
            self.precision, other.precision,
            "operators differ in precision"
        );
        assert_eq!(self.n(), other.n(), "operators differ in qubit count");
    }

    /// Product `self · other`.
    ///
    /// # Panics
    ///
    /// Panics if precision or qubit count differ.
    pub fn mul(&self, other: &XpOperator) -> XpOperator {
        self.check_compatible(other);
        let p = self.p + other.p + 2 * dot(&other.x, &self.z);
        let x = xor(&self.x, &other.x);
        let z: Vec<i64> = self
            .z
            .iter()
            .zip(&other.z)
            .zip(&other.x)
            .map(|((&z1, &z2), &x2)| z1 + z2 - 2 * x2 as i64 * z1)
            .collect();
        XpOperator::new(self.precision, p, x, z)
    }

    /// Square; always diagonal.
    pub fn square(&self) -> XpOperator {
        let xz = dot(&self.x, &self.z);
        let z: Vec<i64> = self
            .z
            .iter()
            .zip(&self.x)
            .map(|(&z, &x)| 2 * z - 2 * x as i64 * z)
            .collect();
        XpOperator::new(self.precision, 2 * self.p + 2 * xz, vec![0; self.n()], z)
    }

    /// Inverse.
    pub fn inv(&self) -> XpOperator {
        let xz = dot(&self.x, &self.z);
        let z: Vec<i64> = self
            .z
            .iter()
            .zip(&self.x)
            .map(|(&z, &x)| -z + 2 * x as i64 * z)
            .collect();
        XpOperator::new(self.precision, -self.p - 2 * xz, self.x.clone(), z)
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, m: i64) -> XpOperator {
        if m < 0 {
            return self.inv().pow(-m);
        }
        let a = m % 2;
        let xz = dot(&self.x, &self.z);
        let x: Vec<u8> = self.x.iter().map(|&v| v * a as u8).collect();
        let z: Vec<i64> = self
            .z
            .iter()
            .zip(&self.x)
            .map(|(&z, &xi)| m * z - (m - a) * xi as i64 * z)
            .collect();
        XpOperator::new(self.precision, m * self.p + (m - a) * xz, x, z)
    }

    /// Conjugation `self · other · self⁻¹`.
    pub fn conj(&self, other: &XpOperator) -> XpOperator {
        self.check_compatible(other);
        let d: Vec<i64> = (0..self.n())
            .map(|i| {
                let (x1, x2) = (self.x[i] as i64, other.x[i] as i64);
                2 * x1 * other.z[i] + 2 * x2 * self.z[i] - 4 * x1 * x2 * self.z[i]
            })
            .collect();
        other.mul(&XpOperator::antisym(self.precision, &d))
    }

    /// Group commutator `self · other · self⁻¹ · other⁻¹`; always diagonal.
    pub fn comm(&self, other: &XpOperator) -> XpOperator {
        self.check_compatible(other);
        let d: Vec<i64> = (0..self.n())
            .map(|i| {
                let (x1, x2) = (self.x[i] as i64, other.x[i] as i64);
                let (z1, z2) = (self.z[i], other.z[i]);
                2 * x1 * z2 - 2 * x2 * z1 + 4 * x1 * x2 * z1 - 4 * x1 * x2 * z2
            })
            .collect();
        XpOperator::antisym(self.precision, &d)
    }

    /// Action on a basis state: `A|e⟩ = ω^phase |e'⟩`.
    pub fn apply_basis(&self, e: &[u8]) -> (i64, Vec<u8>) {
        assert_eq!(e.len(), self.n(), "basis vector length mismatch");
        let phase = (self.p + 2 * dot(e, &self.z)).rem_euclid(2 * self.precision);
        (phase, xor(e, &self.x))
    }

    /// Phase applied to `|e⟩` by a diagonal operator.
    ///
    /// # Panics
    ///
    /// Panics if the operator is not diagonal.
    pub fn diagonal_phase(&self, e: &[u8]) -> i64 {
        assert!(
            self.is_diagonal(),
            "diagonal_phase on non-diagonal operator"
        );
        self.apply_basis(e).0
    }

    /// Smallest `d ≥ 1` with `A^d` a multiple of the identity.
    pub fn degree(&self) -> i64 {
        if self.is_diagonal() {
            self.z
                .iter()
                .map(|&z| self.precision / self.precision.gcd(&z))
                .fold(1, |acc, d| acc.lcm(&d))
        } else {
            2 * self.square().degree()
        }
    }

    /// Phase `q` with `A^deg(A) = ω^q I`.
    pub fn fundamental_phase(&self) -> i64 {
        self.pow(self.degree()).p
    }

    /// The only possible eigenvalues of the operator.
    pub fn eigenvalues(&self) -> EigenvalueSet {
        let d = self.degree();
        let q = self.fundamental_phase();
        let two_n = 2 * self.precision;
        let mut exponents: Vec<i64> = (0..d)
            .filter_map(|j| {
                let num = q + two_n * j;
                (num % d == 0).then(|| (num / d).rem_euclid(two_n))
            })
            .collect();
        exponents.sort_unstable();
        exponents.dedup();
        EigenvalueSet {
            degree: d,
            fundamental_phase: q,
            exponents,
        }
    }

    /// Projector onto the `ω^m` eigenspace applied to `|e⟩`.
    ///
    /// An empty result is the zero vector.
    pub fn projector_apply(&self, m: i64, e: &[u8]) -> Vec<KetTerm> {
        let two_n = 2 * self.precision;
        let m = m.rem_euclid(two_n);
        if self.is_diagonal() {
            if self.diagonal_phase(e) == m {
                return vec![KetTerm {
                    scale: Ratio::from_integer(1),
                    phase: 0,
                    bits: e.to_vec(),
                }];
            }
            return Vec::new();
        }
        if self.square().diagonal_phase(e) != (2 * m).rem_euclid(two_n) {
            return Vec::new();
        }
        let (phase, bits) = self.apply_basis(e);
        vec![
            KetTerm {
                scale: Ratio::new(1, 2),
                phase: 0,
                bits: e.to_vec(),
            },
            KetTerm {
                scale: Ratio::new(1, 2),
                phase: (phase - m).rem_euclid(two_n),
                bits,
            },
        ]
    }

    /// Same operator at precision `k·N`.
    pub fn upscale(&self, k: i64) -> XpOperator {
        assert!(k >= 1, "scale factor must be positive");
        XpOperator::new(
            self.precision * k,
            self.p * k,
            self.x.clone(),
            self.z.iter().map(|v| v * k).collect::<Vec<_>>(),
        )
    }

    /// Same operator at precision `N/k`, when every component is divisible by `k`.
    pub fn downscale(&self, k: i64) -> Result<XpOperator> {
        let divisible = k >= 1
            && self.precision % k == 0
            && self.precision / k >= 2
            && self.p % k == 0
            && self.z.iter().all(|v| v % k == 0);
        if !divisible {
            return Err(XpError::InvalidArgument(format!(
                "{self} cannot be written at precision {}/{}",
                self.precision, k
            )));
        }
        Ok(XpOperator::new(
            self.precision / k,
            self.p / k,
            self.x.clone(),
            self.z.iter().map(|v| v / k).collect::<Vec<_>>(),
        ))
    }

    /// Rewrites the operator at another precision.
    pub fn rescale(&self, precision: i64) -> Result<XpOperator> {
        if precision % self.precision == 0 {
            Ok(self.upscale(precision / self.precision))
        } else if self.precision % precision == 0 {
            self.downscale(self.precision / precision)
        } else {
            Err(XpError::InvalidArgument(format!(
                "precision {precision} is not a multiple or divisor of {}",
                self.precision
            )))
        }
    }

    /// Text form of the z component: digits for `N ≤ 10`, else comma separated.
    pub fn z_string(&self) -> String {
        format_z(self.precision, &self.z)
    }
}

pub(crate) fn format_bits(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

pub(crate) fn format_z(precision: i64, z: &[i64]) -> String {
    if precision <= 10 {
        z.iter().map(|v| v.to_string()).collect()
    } else {
        z.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for XpOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "XP_{}({}|{}|{})",
            self.precision,
            self.p,
            format_bits(&self.x),
            self.z_string()
        )
    }
}

impl Mul for &XpOperator {
    type Output = XpOperator;

    fn mul(self, rhs: &XpOperator) -> XpOperator {
        XpOperator::mul(self, rhs)
    }
}

fn parse_error(column: usize, message: impl Into<String>) -> XpError {
    XpError::Parse {
        line: 1,
        column,
        message: message.into(),
    }
}

/// Parses `XP_N(p|x|z)`.
///
/// A lone `0` for `x` or `z` stands for the all-zero vector. When both
/// components are abbreviated, `qubits` supplies the length.
pub fn parse_operator(text: &str, qubits: Option<usize>) -> Result<XpOperator> {
    let s = text.trim();
    let lead = text.len() - text.trim_start().len();
    let col = |i: usize| lead + i + 1;
    let rest = s
        .strip_prefix("XP_")
        .ok_or_else(|| parse_error(col(0), "expected `XP_`"))?;
    let open = rest
        .find('(')
        .ok_or_else(|| parse_error(col(3), "expected `(` after precision"))?;
    let precision: i64 = rest[..open]
        .trim()
        .parse()
        .map_err(|_| parse_error(col(3), format!("bad precision `{}`", &rest[..open])))?;
    if precision < 2 {
        return Err(parse_error(col(3), "precision must be at least 2"));
    }
    if !rest.ends_with(')') {
        return Err(parse_error(col(s.len()), "expected closing `)`"));
    }
    let body_start = 3 + open + 1;
    let body = &rest[open + 1..rest.len() - 1];
    let parts: Vec<&str> = body.split('|').collect();
    if parts.len() != 3 {
        return Err(parse_error(
            col(body_start),
            "expected three `|`-separated components",
        ));
    }
    let p_col = body_start;
    let x_col = p_col + parts[0].len() + 1;
    let z_col = x_col + parts[1].len() + 1;
    let p: i64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| parse_error(col(p_col), format!("bad phase `{}`", parts[0])))?;
    let x_text = parts[1].trim();
    let mut x = Vec::with_capacity(x_text.len());
    for (i, c) in x_text.chars().enumerate() {
        match c {
            '0' => x.push(0u8),
            '1' => x.push(1u8),
            _ => {
                return Err(parse_error(
                    col(x_col + i),
                    format!("bad bit `{c}` in x component"),
                ))
            }
        }
    }
    let z_text = parts[2].trim();
    let z: Vec<i64> = if z_text.contains(',') {
        let mut out = Vec::new();
        let mut offset = 0;
        for item in z_text.split(',') {
            let v = item
                .trim()
                .parse()
                .map_err(|_| parse_error(col(z_col + offset), format!("bad z entry `{item}`")))?;
            out.push(v);
            offset += item.len() + 1;
        }
        out
    } else {
        let mut out = Vec::new();
        for (i, c) in z_text.chars().enumerate() {
            let v = c.to_digit(10).ok_or_else(|| {
                parse_error(col(z_col + i), format!("bad digit `{c}` in z component"))
            })?;
            out.push(v as i64);
        }
        out
    };
    let is_zero_shorthand = |len: usize, all_zero: bool| len == 1 && all_zero;
    let x_short = is_zero_shorthand(x.len(), x.iter().all(|&v| v == 0));
    let z_short = is_zero_shorthand(z.len(), z.iter().all(|&v| v == 0));
    let n = match (x_short, z_short) {
        (true, true) => qubits.unwrap_or(1),
        (true, false) => z.len(),
        (false, true) => x.len(),
        (false, false) => {
            if x.len() != z.len() {
                return Err(parse_error(
                    col(z_col),
                    format!("x has {} entries but z has {}", x.len(), z.len()),
                ));
            }
            x.len()
        }
    };
    if let Some(q) = qubits {
        if q != n {
            return Err(parse_error(
                col(x_col),
                format!("operator has {n} qubits, expected {q}"),
            ));
        }
    }
    let x = if x.len() == n { x } else { vec![0; n] };
    let z = if z.len() == n { z } else { vec![0; n] };
    Ok(XpOperator::new(precision, p, x, z))
}

impl FromStr for XpOperator {
    type Err = XpError;

    fn from_str(s: &str) -> Result<Self> {
        parse_operator(s, None)
    }
}
