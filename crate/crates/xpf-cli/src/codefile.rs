//! Code files: a `N=<int> n=<int>` header followed by one operator per line,
//! or the equivalent JSON object.

use serde::{Deserialize, Serialize};
use xpf::xpop::parse_operator;
use xpf::{Result, XpError, XpOperator};

/// Stabiliser generators of an XP code with optional labels.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(rename = "N")]
    pub precision: i64,
    pub n: usize,
    pub generators: Vec<String>,
    /// One label per generator; empty strings mark unlabelled lines.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> XpError {
    XpError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits `key=value` header fields of one line.
fn header_fields(text: &str, line: usize) -> Result<Vec<(String, i64, usize)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let column = text[offset..].find(token).map_or(offset, |i| offset + i) + 1;
        offset = column - 1 + token.len();
        let (key, value) = token.split_once('=').ok_or_else(|| {
            parse_error(line, column, format!("expected key=value, found `{token}`"))
        })?;
        let value = value.parse().map_err(|_| {
            parse_error(
                line,
                column + key.len() + 1,
                format!("`{value}` is not an integer"),
            )
        })?;
        out.push((key.to_string(), value, column));
    }
    Ok(out)
}

impl CodeFile {
    pub fn from_operators(ops: &[XpOperator]) -> Result<Self> {
        let first = ops.first().ok_or_else(|| {
            XpError::InvalidArgument("a code needs at least one generator".into())
        })?;
        Ok(CodeFile {
            precision: first.precision(),
            n: first.n(),
            generators: ops.iter().map(ToString::to_string).collect(),
            labels: Vec::new(),
        })
    }

    /// Parses either format; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let file = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)
                .map_err(|e| parse_error(e.line(), e.column(), e.to_string()))?
        } else {
            Self::parse_text(text)?
        };
        file.operators()?;
        Ok(file)
    }

    fn parse_text(text: &str) -> Result<Self> {
        let mut header: Option<(i64, usize)> = None;
        let mut generators = Vec::new();
        let mut labels = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some((precision, n)) = header else {
                let mut precision = None;
                let mut n = None;
                for (key, value, column) in header_fields(content, line)? {
                    match key.as_str() {
                        "N" => precision = Some(value),
                        "n" => n = Some(value),
                        _ => {
                            return Err(parse_error(
                                line,
                                column,
                                format!("unknown header field `{key}`"),
                            ))
                        }
                    }
                }
                let precision =
                    precision.ok_or_else(|| parse_error(line, 1, "header is missing N=<int>"))?;
                let n = n.ok_or_else(|| parse_error(line, 1, "header is missing n=<int>"))?;
                if precision < 1 || n < 1 {
                    return Err(parse_error(line, 1, "N and n must be positive"));
                }
                header = Some((precision, n as usize));
                continue;
            };
            let (label, body, start) = match content.split_once(':') {
                Some((l, b)) => (l.trim().to_string(), b, l.len() + 1),
                None => (String::new(), content, 0),
            };
            let lead = body.len() - body.trim_start().len();
            let a = parse_operator(body.trim(), Some(n)).map_err(|e| match e {
                XpError::Parse {
                    column, message, ..
                } => parse_error(line, start + lead + column, message),
                other => other,
            })?;
            if a.precision() != precision || a.n() != n {
                return Err(parse_error(
                    line,
                    start + lead + 1,
                    format!("{a} does not match the header N={precision} n={n}"),
                ));
            }
            generators.push(a.to_string());
            labels.push(label);
        }
        let (precision, n) =
            header.ok_or_else(|| parse_error(1, 1, "missing header line N=<int> n=<int>"))?;
        if labels.iter().all(String::is_empty) {
            labels.clear();
        }
        Ok(CodeFile {
            precision,
            n,
            generators,
            labels,
        })
    }

    /// Parsed generators, checked against the header.
    pub fn operators(&self) -> Result<Vec<XpOperator>> {
        if !self.labels.is_empty() && self.labels.len() != self.generators.len() {
            return Err(XpError::InvalidArgument(format!(
                "{} labels for {} generators",
                self.labels.len(),
                self.generators.len()
            )));
        }
        self.generators
            .iter()
            .map(|g| {
                let a = parse_operator(g, Some(self.n))?;
                if a.precision() != self.precision || a.n() != self.n {
                    return Err(XpError::Mismatch(format!(
                        "{a} does not match N={} n={}",
                        self.precision, self.n
                    )));
                }
                Ok(a)
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("N={} n={}\n", self.precision, self.n);
        for (i, g) in self.generators.iter().enumerate() {
            match self.labels.get(i).filter(|l| !l.is_empty()) {
                Some(label) => out.push_str(&format!("{label}: {g}\n")),
                None => out.push_str(&format!("{g}\n")),
            }
        }
        out
    }
}
