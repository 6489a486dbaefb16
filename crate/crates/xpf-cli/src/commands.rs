//! One function per subcommand. Each returns a [`Report`] holding both the
//! text rendering and the JSON value.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use xpf::codespace::{Limits, OrbitForm, XpCode};
use xpf::logical::{
    analyse, classify_code, classify_operator, is_logical, logical_identity,
    logical_identity_modified, phase_vector, reed_muller, CodeClass, LogicalGroupData,
    OperatorClass,
};
use xpf::measure::{measure, measure_diagonal_pauli, PostState};
use xpf::oracle::{self, fixes, matches_fixed_space, preserves_codespace};
use xpf::states::{extract_phase_function, whg_to_xp, whg_to_xp_optimised, ControlledPhase};
use xpf::xpgroup::canonical;
use xpf::xpop::parse_operator;
use xpf::{XpError, XpOperator};

use crate::codefile::CodeFile;
use crate::CliError;

pub type CmdResult = Result<Report, CliError>;

/// Output of a command in both formats.
pub struct Report {
    pub text: String,
    pub json: Value,
    /// False when a `check` invariant failed.
    pub success: bool,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            success: true,
        }
    }
}

fn strings(list: &[XpOperator]) -> Vec<String> {
    list.iter().map(ToString::to_string).collect()
}

fn bit_string(e: &[u8]) -> String {
    e.iter().map(|b| char::from(b'0' + b)).collect()
}

fn push_list(out: &mut String, title: &str, items: &[String]) {
    let _ = writeln!(out, "{title}:");
    if items.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for item in items {
        let _ = writeln!(out, "  {item}");
    }
}

pub fn load_code(file: &CodeFile) -> Result<XpCode, CliError> {
    Ok(XpCode::with_limits(
        &file.operators()?,
        &Limits::from_env(),
    )?)
}

fn parse_for(code: &XpCode, text: &str) -> Result<XpOperator, CliError> {
    let a = parse_operator(text, Some(code.n()))?;
    if a.n() != code.n() {
        return Err(XpError::Mismatch(format!("{a} does not act on {} qubits", code.n())).into());
    }
    Ok(a)
}

pub fn canon(file: &CodeFile) -> CmdResult {
    let c = canonical(&file.operators()?);
    if let Some(q) = xpf::xpgroup::inconsistent_phase(&c.sz) {
        return Err(XpError::EmptyCodespace { q }.into());
    }
    let mut text = String::new();
    push_list(&mut text, "S_X", &strings(&c.sx));
    push_list(&mut text, "S_Z", &strings(&c.sz));
    Ok(Report::new(
        text,
        json!({"sx": strings(&c.sx), "sz": strings(&c.sz)}),
    ))
}

pub fn codewords(file: &CodeFile) -> CmdResult {
    let code = load_code(file)?;
    let reps: Vec<String> = code.orbit_reps().iter().map(|e| bit_string(e)).collect();
    let words: Vec<String> = code.codewords().iter().map(ToString::to_string).collect();
    let mut text = String::new();
    push_list(&mut text, "E_m", &reps);
    let _ = writeln!(text, "codewords:");
    for (i, w) in words.iter().enumerate() {
        let _ = writeln!(text, "  |κ_{i}⟩ = {w}");
    }
    let _ = writeln!(text, "dimension: {}", code.dimension());
    Ok(Report::new(
        text,
        json!({"orbit_representatives": reps, "codewords": words, "dimension": code.dimension()}),
    ))
}

fn class_name(c: CodeClass) -> &'static str {
    match c {
        CodeClass::XpRegular => "XP-regular",
        CodeClass::NonXpRegular => "non-XP-regular",
    }
}

fn operator_class_name(c: OperatorClass) -> &'static str {
    match c {
        OperatorClass::Regular => "regular",
        OperatorClass::Core => "core",
        OperatorClass::Both => "regular and core",
        OperatorClass::Neither => "neither regular nor core",
    }
}

#[derive(Serialize)]
struct ActionRow {
    operator: String,
    phase_vector: Vec<i64>,
}

pub fn logical(file: &CodeFile) -> CmdResult {
    let code = load_code(file)?;
    let data: LogicalGroupData = analyse(&code)?;
    let d = code.decomposition();
    let lx: Vec<String> = data
        .lx
        .iter()
        .map(|r| match r {
            Ok(a) => a.to_string(),
            Err(f) => format!("x = {}: {}", bit_string(&f.x), f.reason),
        })
        .collect();
    let actions: Vec<ActionRow> = data
        .basis
        .ld
        .iter()
        .zip(data.basis.fd.rows())
        .map(|(a, f)| ActionRow {
            operator: a.to_string(),
            phase_vector: f.to_vec(),
        })
        .collect();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "code: N={} n={} dimension={} |E_q|={} ({})",
        code.precision(),
        code.n(),
        code.dimension(),
        d.eq.len(),
        class_name(classify_code(d))
    );
    push_list(&mut text, "M_X", &strings(&data.identity.mx));
    push_list(&mut text, "M_Z", &strings(&data.identity.mz));
    push_list(&mut text, "L_X", &lx);
    push_list(&mut text, "L_Z", &strings(&data.lz));
    let rows: Vec<String> = actions
        .iter()
        .map(|r| format!("{}  f: {:?}", r.operator, r.phase_vector))
        .collect();
    push_list(&mut text, "L_D", &rows);
    Ok(Report::new(
        text,
        json!({
            "precision": code.precision(),
            "n": code.n(),
            "dimension": code.dimension(),
            "core_size": d.eq.len(),
            "class": class_name(classify_code(d)),
            "mx": strings(&data.identity.mx),
            "mz": strings(&data.identity.mz),
            "lx": lx,
            "lz": strings(&data.lz),
            "ld": actions,
        }),
    ))
}

pub fn action(file: &CodeFile, operator: &str) -> CmdResult {
    let code = load_code(file)?;
    let a = parse_for(&code, operator)?;
    let identity = logical_identity_modified(&code)?;
    if !is_logical(&a, &identity) {
        return Err(XpError::NotLogical(a.to_string()).into());
    }
    let pv = phase_vector(&a, code.codewords())?;
    let class = if pv.is_diagonal_action() {
        Some(operator_class_name(classify_operator(&a, &code)?))
    } else {
        None
    };
    let mut text = format!(
        "operator: {a}\nphase vector f: {:?}\npermutation: {:?}\n",
        pv.f, pv.perm
    );
    if let Some(c) = class {
        let _ = writeln!(text, "classification: {c}");
    }
    Ok(Report::new(
        text,
        json!({"operator": a.to_string(), "phase_vector": pv.f, "permutation": pv.perm, "classification": class}),
    ))
}

fn orbit_strings(words: &[OrbitForm]) -> Vec<String> {
    words.iter().map(ToString::to_string).collect()
}

pub fn measure_cmd(file: &CodeFile, operator: &str, diag_pauli: bool) -> CmdResult {
    let code = load_code(file)?;
    if diag_pauli {
        let z = parse_operator(operator, Some(code.n()))?;
        let data = analyse(&code)?;
        let core = code.core_form(data.lx_ops());
        let m = measure_diagonal_pauli(&core, &z)?;
        let mut text = format!("measured: {z}\n");
        match &m.removed {
            Some(b) => {
                let _ = writeln!(text, "removed: {b}");
            }
            None => text.push_str("removed: (none)\n"),
        }
        push_list(&mut text, "updated S_X", &strings(&m.updated.sx));
        push_list(&mut text, "updated L_X", &strings(&m.updated.lx));
        let mut outcomes = Vec::new();
        for o in &m.outcomes {
            let label = if o.eigenvalue % 4 == 0 { "+1" } else { "-1" };
            let eq: Vec<String> = o
                .core
                .iter()
                .flat_map(|c| c.eq.iter().map(|e| bit_string(e)))
                .collect();
            let _ = writeln!(text, "Pr({label}) = {}", o.probability);
            push_list(&mut text, &format!("  E_q for {label}"), &eq);
            outcomes.push(json!({
                "eigenvalue": label,
                "probability": o.probability.to_string(),
                "core": eq,
            }));
        }
        return Ok(Report::new(
            text,
            json!({
                "measured": z.to_string(),
                "removed": m.removed.as_ref().map(ToString::to_string),
                "updated_sx": strings(&m.updated.sx),
                "updated_lx": strings(&m.updated.lx),
                "outcomes": outcomes,
            }),
        ));
    }
    let a = parse_for(&code, operator)?;
    let outcomes = measure(&code, &a)?;
    let mut text = format!("measured: {a}\n");
    let mut rows = Vec::new();
    for o in &outcomes {
        let exact = o.probability.as_rational().map(|r| r.to_string());
        let shown = exact
            .clone()
            .unwrap_or_else(|| format!("{} ≈ {:.12}", o.probability, o.probability.value()));
        let _ = writeln!(text, "Pr(ω^{}) = {shown}", o.eigenvalue);
        let post = match &o.post {
            None => json!(null),
            Some(PostState::Codewords(c)) => {
                push_list(&mut text, "  post-measurement codewords", &orbit_strings(c));
                json!({"codewords": orbit_strings(c)})
            }
            Some(PostState::NotXpRepresentable(states)) => {
                let _ = writeln!(text, "  post-measurement state is not an XP codespace");
                let rendered: Vec<Vec<(String, [f64; 2])>> = states
                    .iter()
                    .map(|s| {
                        s.amplitudes
                            .iter()
                            .map(|(e, c)| (bit_string(e), [c.re, c.im]))
                            .collect()
                    })
                    .collect();
                json!({"not_xp_representable": rendered})
            }
        };
        rows.push(json!({
            "eigenvalue": o.eigenvalue,
            "probability": o.probability.to_string(),
            "value": o.probability.value(),
            "exact": exact,
            "post": post,
        }));
    }
    Ok(Report::new(
        text,
        json!({"measured": a.to_string(), "outcomes": rows}),
    ))
}

/// Input for the hypergraph conversion: `r=<int>` then one `CP(p/q,v)` per line.
pub fn parse_whg(text: &str) -> Result<(usize, Vec<ControlledPhase>), CliError> {
    let mut r = None;
    let mut cps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| XpError::Parse {
            line: i + 1,
            column: 1,
            message,
        };
        match r {
            None => {
                let value = content
                    .strip_prefix("r=")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| err("expected header r=<int>".into()))?;
                r = Some(value);
            }
            Some(r) => {
                let cp: ControlledPhase =
                    content.parse().map_err(|e: XpError| err(e.to_string()))?;
                if cp.edge().len() != r {
                    return Err(err(format!("{cp} does not have {r} vertices")).into());
                }
                cps.push(cp);
            }
        }
    }
    let r = r.ok_or_else(|| XpError::Parse {
        line: 1,
        column: 1,
        message: "missing header r=<int>".into(),
    })?;
    Ok((r, cps))
}

pub fn whg_to_xp_cmd(input: &str, optimised: bool) -> CmdResult {
    let (r, cps) = parse_whg(input)?;
    let code = if optimised {
        whg_to_xp_optimised(&cps, r)?
    } else {
        whg_to_xp(&cps, r)?
    };
    let file = CodeFile::from_operators(&code.generators())?;
    let columns: Vec<String> = code
        .embedding
        .columns
        .iter()
        .map(|c| {
            let mut v = vec![0u8; r];
            c.iter().for_each(|&i| v[i] = 1);
            bit_string(&v)
        })
        .collect();
    let mut text = file.to_text();
    let _ = writeln!(text, "# embedding columns: {}", columns.join(" "));
    Ok(Report::new(
        text,
        json!({"N": file.precision, "n": file.n, "generators": file.generators, "embedding_columns": columns}),
    ))
}

pub fn xp_to_whg_cmd(file: &CodeFile) -> CmdResult {
    let code = load_code(file)?;
    if code.dimension() != 1 {
        return Err(XpError::InvalidArgument(format!(
            "conversion needs a stabiliser state, the codespace has dimension {}",
            code.dimension()
        ))
        .into());
    }
    let m = &code.orbit_reps()[0];
    let cps = extract_phase_function(code.precision(), &code.canonical().sx, m);
    let list: Vec<String> = cps.iter().map(ToString::to_string).collect();
    let mut text = format!("orbit representative: {}\n", bit_string(m));
    push_list(&mut text, "controlled phases", &list);
    Ok(Report::new(
        text,
        json!({"orbit_representative": bit_string(m), "controlled_phases": list}),
    ))
}

pub fn rm(r: usize, precision: Option<i64>) -> CmdResult {
    let g = reed_muller(r)?;
    let natural = g[0].precision();
    let g = match precision {
        None => g,
        Some(p) => g
            .iter()
            .map(|a| a.rescale(p))
            .collect::<xpf::Result<Vec<_>>>()?,
    };
    let file = CodeFile::from_operators(&g)?;
    Ok(Report::new(
        format!(
            "# Reed-Muller code r={r}, constructed at precision {natural}\n{}",
            file.to_text()
        ),
        serde_json::to_value(&file).expect("code files serialise"),
    ))
}

pub fn check(file: &CodeFile) -> CmdResult {
    let code = load_code(file)?;
    if code.n() > oracle::MAX_QUBITS {
        return Err(XpError::SizeLimit(format!(
            "oracle checks support at most {} qubits, the code has {}",
            oracle::MAX_QUBITS,
            code.n()
        ))
        .into());
    }
    let data = analyse(&code)?;
    let words = code.codewords();
    let mut results: Vec<(&str, bool)> = Vec::new();

    let all_fixed = code
        .generators()
        .iter()
        .map(|g| {
            words
                .iter()
                .map(|w| fixes(g, w))
                .collect::<xpf::Result<Vec<_>>>()
        })
        .collect::<xpf::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .all(|b| b);
    results.push(("generators fix every codeword", all_fixed));
    results.push((
        "codewords span the dense fixed space",
        matches_fixed_space(code.generators(), words)?,
    ));
    let full = logical_identity(words)?;
    results.push((
        "modified and full logical identity agree",
        canonical(&full.all()) == canonical(&data.identity.all()),
    ));
    let emitted: Vec<XpOperator> = data
        .lz
        .iter()
        .chain(&data.lx_ops())
        .chain(&data.basis.ld)
        .cloned()
        .collect();
    results.push((
        "emitted logical operators pass is_logical",
        emitted.iter().all(|l| is_logical(l, &data.identity)),
    ));
    let preserved = emitted
        .iter()
        .map(|l| preserves_codespace(l, words))
        .collect::<xpf::Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    results.push((
        "emitted logical operators preserve the codespace",
        preserved,
    ));
    let identity_fixes = data
        .identity
        .all()
        .iter()
        .map(|a| {
            words
                .iter()
                .map(|w| fixes(a, w))
                .collect::<xpf::Result<Vec<_>>>()
        })
        .collect::<xpf::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .all(|b| b);
    results.push(("logical identity fixes every codeword", identity_fixes));

    let mut text = String::new();
    for (name, ok) in &results {
        let _ = writeln!(text, "{}: {name}", if *ok { "PASS" } else { "FAIL" });
    }
    let json_rows: Vec<Value> = results
        .iter()
        .map(|(name, ok)| json!({"check": name, "pass": ok}))
        .collect();
    let success = results.iter().all(|(_, ok)| *ok);
    Ok(Report {
        text,
        json: json!({"checks": json_rows, "pass": success}),
        success,
    })
}
