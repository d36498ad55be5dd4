//! LP text format (Minimize / Subject To / Bounds / Binary / End).
//!
//! Every variable is listed in the Bounds section in index order, which lets
//! the parser restore the original variable order and makes
//! `export(parse(export(p)))` byte-identical to `export(p)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{valid_name, ConstraintSense, LinearProgram, LpError, VariableKind};

const KEYWORDS: &[&str] = &[
    "minimize", "minimise", "minimum", "min", "maximize", "maximise", "maximum", "max", "subject", "to", "such",
    "that", "st", "bounds", "bound", "binary", "binaries", "bin", "general", "generals", "gen", "semi",
    "semis", "semi-continuous", "end", "free", "inf", "infinity", "obj",
];

/// Terms per output line before wrapping onto a continuation line.
const TERMS_PER_LINE: usize = 10;

/// True when `name` could be misread by LP readers: a keyword, or a name that
/// starts like an exponent (`e12`, `E3x`).
fn ambiguous(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    if KEYWORDS.contains(&lower.as_str()) {
        return true;
    }
    let b = name.as_bytes();
    b.len() >= 2 && (b[0] == b'e' || b[0] == b'E') && b[1].is_ascii_digit()
}

fn check_name(name: &str) -> Result<(), LpError> {
    if !valid_name(name) || ambiguous(name) {
        return Err(LpError::InvalidName(name.to_string()));
    }
    Ok(())
}

/// Plain decimal in the usual range, scientific notation outside it.
pub(crate) fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_terms<'a>(out: &mut String, terms: impl Iterator<Item = (&'a str, f64)>) {
    for (k, (name, coef)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef.is_sign_negative() { "-" } else { "+" };
        let mag = coef.abs();
        if k == 0 && sign == "+" {
            // Leading plus is implicit.
        } else if k == 0 {
            out.push_str(" -");
        } else {
            let _ = write!(out, " {sign}");
        }
        if mag == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {} {name}", format_number(mag));
        }
    }
}

/// Render `program` as LP text.
pub fn export_lp_text(program: &LinearProgram) -> Result<String, LpError> {
    for v in program.variables() {
        check_name(&v.name)?;
    }
    for c in program.constraints() {
        check_name(&c.name)?;
    }
    let vars = program.variables();
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    let obj = program.objective().iter().enumerate().filter(|(_, c)| **c != 0.0);
    write_terms(&mut out, obj.map(|(j, &c)| (vars[j].name.as_str(), c)));
    out.push_str("\nSubject To\n");
    for c in program.constraints() {
        let _ = write!(out, " {}:", c.name);
        if c.terms.is_empty() {
            // Keep the row visible with an explicit zero coefficient.
            if let Some(first) = vars.first() {
                let _ = write!(out, " 0 {}", first.name);
            } else {
                return Err(LpError::InvalidName(c.name.clone()));
            }
        } else {
            write_terms(&mut out, c.terms.iter().map(|&(v, a)| (vars[v.0].name.as_str(), a)));
        }
        let _ = writeln!(out, " {} {}", c.sense, format_number(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in vars {
        if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, format_number(v.lower));
        } else if v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} >= {}", v.name, format_number(v.lower));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", format_number(v.lower), v.name, format_number(v.upper));
        }
    }
    let binaries: Vec<&str> = vars.iter().filter(|v| v.kind == VariableKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.split_whitespace().collect::<Vec<_>>().join(" ");
    match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> LpError {
    LpError::Parse { line, message: message.into() }
}

fn parse_number(tok: &str, line: usize) -> Result<f64, LpError> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("expected a number, found {tok:?}")))
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

fn parse_sense(tok: &str) -> Option<ConstraintSense> {
    match tok {
        "<=" | "<" | "=<" => Some(ConstraintSense::LessEqual),
        ">=" | ">" | "=>" => Some(ConstraintSense::GreaterEqual),
        "=" => Some(ConstraintSense::Equal),
        _ => None,
    }
}

/// Split a line into tokens, separating operators glued to names or numbers.
fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            flush(&mut cur, &mut out);
        } else if c == '<' || c == '>' || c == '=' {
            flush(&mut cur, &mut out);
            let mut op = c.to_string();
            if i + 1 < chars.len() && matches!(chars[i + 1], '=' | '<' | '>') {
                op.push(chars[i + 1]);
                i += 1;
            }
            out.push(op);
        } else if c == ':' {
            cur.push(':');
            flush(&mut cur, &mut out);
        } else if (c == '+' || c == '-') && !((cur.ends_with('e') || cur.ends_with('E')) && is_number_prefix(&cur)) {
            flush(&mut cur, &mut out);
            out.push(c.to_string());
        } else {
            cur.push(c);
        }
        i += 1;
    }
    flush(&mut cur, &mut out);
    out
}

/// True when `s` looks like the mantissa of a number in scientific notation.
fn is_number_prefix(s: &str) -> bool {
    let body = &s[..s.len().saturating_sub(1)];
    !body.is_empty() && body.parse::<f64>().is_ok()
}

struct RawConstraint {
    name: String,
    terms: Vec<(String, f64)>,
    sense: ConstraintSense,
    rhs: f64,
    line: usize,
}

/// Parse a linear expression `[+-] [coef] name ...` from `toks`.
fn parse_terms(toks: &[(String, usize)]) -> Result<Vec<(String, f64)>, LpError> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let mut sign = 1.0;
        while i < toks.len() && (toks[i].0 == "+" || toks[i].0 == "-") {
            if toks[i].0 == "-" {
                sign = -sign;
            }
            i += 1;
        }
        let line = toks.get(i).map_or(toks.last().map_or(0, |t| t.1), |t| t.1);
        let mut coef = 1.0;
        if i < toks.len() && is_number(&toks[i].0) {
            coef = parse_number(&toks[i].0, line)?;
            i += 1;
        }
        match toks.get(i) {
            Some((name, _)) if valid_name(name) => {
                terms.push((name.clone(), sign * coef));
                i += 1;
            }
            Some((tok, l)) => return Err(parse_err(*l, format!("expected a variable name, found {tok:?}"))),
            None => {
                if coef == 1.0 && sign == 1.0 && terms.is_empty() {
                    break;
                }
                return Err(parse_err(line, "dangling coefficient"));
            }
        }
    }
    Ok(terms)
}

/// Parse LP text produced by [`export_lp_text`] or a compatible writer.
pub fn parse_lp_text(text: &str) -> Result<LinearProgram, LpError> {
    let mut section = Section::Preamble;
    let mut objective_toks: Vec<(String, usize)> = Vec::new();
    let mut constraint_toks: Vec<(String, usize)> = Vec::new();
    let mut bounds: Vec<(usize, Vec<String>)> = Vec::new();
    let mut binary_names: Vec<(String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        let lower = line.trim().to_ascii_lowercase();
        if lower.starts_with("maximize") || lower.starts_with("maximise") || lower == "max" {
            return Err(parse_err(line_no, "only minimisation is supported"));
        }
        let toks = tokenize(line);
        match section {
            Section::Preamble => return Err(parse_err(line_no, "content before the objective section")),
            Section::Objective => objective_toks.extend(toks.into_iter().map(|t| (t, line_no))),
            Section::Constraints => constraint_toks.extend(toks.into_iter().map(|t| (t, line_no))),
            Section::Bounds => bounds.push((line_no, toks)),
            Section::Binary => binary_names.extend(toks.into_iter().map(|t| (t, line_no))),
            Section::End => return Err(parse_err(line_no, "content after End")),
        }
    }
    if section != Section::End {
        return Err(parse_err(text.lines().count(), "missing End"));
    }

    // Objective: optional label, then terms.
    if objective_toks.first().is_some_and(|t| t.0.ends_with(':')) {
        objective_toks.remove(0);
    }
    let objective = parse_terms(&objective_toks)?;

    // Constraints: label, terms, sense, rhs.
    let mut constraints = Vec::new();
    let mut i = 0;
    let mut unnamed = 0usize;
    while i < constraint_toks.len() {
        let line = constraint_toks[i].1;
        let name = if constraint_toks[i].0.ends_with(':') {
            let n = constraint_toks[i].0.trim_end_matches(':').to_string();
            i += 1;
            n
        } else {
            unnamed += 1;
            format!("R{unnamed}")
        };
        let start = i;
        while i < constraint_toks.len() && parse_sense(&constraint_toks[i].0).is_none() {
            i += 1;
        }
        if i + 1 >= constraint_toks.len() {
            return Err(parse_err(line, format!("constraint {name}: missing sense or right-hand side")));
        }
        let terms = parse_terms(&constraint_toks[start..i])?;
        let sense = parse_sense(&constraint_toks[i].0).expect("checked");
        let mut sign = 1.0;
        i += 1;
        if constraint_toks[i].0 == "-" || constraint_toks[i].0 == "+" {
            if constraint_toks[i].0 == "-" {
                sign = -1.0;
            }
            i += 1;
        }
        let rhs_tok = constraint_toks.get(i).ok_or_else(|| parse_err(line, "missing right-hand side"))?;
        let rhs = sign * parse_number(&rhs_tok.0, rhs_tok.1)?;
        i += 1;
        constraints.push(RawConstraint { name, terms, sense, rhs, line });
    }

    // Variable order: Bounds section first, then first appearance elsewhere.
    let mut order: Vec<String> = Vec::new();
    let mut info: HashMap<String, (f64, f64, bool, bool)> = HashMap::new(); // lower, upper, binary, explicit bounds
    let declare = |name: &str, order: &mut Vec<String>, info: &mut HashMap<String, (f64, f64, bool, bool)>| {
        if !info.contains_key(name) {
            order.push(name.to_string());
            info.insert(name.to_string(), (0.0, f64::INFINITY, false, false));
        }
    };
    for (line, toks) in &bounds {
        let line = *line;
        let merged = merge_signed_numbers(toks);
        let t: Vec<&str> = merged.iter().map(String::as_str).collect();
        let (name, lo, hi) = match t.as_slice() {
            [l, op1, n, op2, u] if parse_sense(op1) == Some(ConstraintSense::LessEqual) && parse_sense(op2) == Some(ConstraintSense::LessEqual) => {
                (*n, Some(parse_number(l, line)?), Some(parse_number(u, line)?))
            }
            [n, op, v] if !is_number(n) => {
                let v = parse_number(v, line)?;
                match parse_sense(op) {
                    Some(ConstraintSense::GreaterEqual) => (*n, Some(v), None),
                    Some(ConstraintSense::LessEqual) => (*n, None, Some(v)),
                    Some(ConstraintSense::Equal) => (*n, Some(v), Some(v)),
                    None => return Err(parse_err(line, "malformed bound")),
                }
            }
            [v, op, n] => {
                let v = parse_number(v, line)?;
                match parse_sense(op) {
                    Some(ConstraintSense::LessEqual) => (*n, Some(v), None),
                    Some(ConstraintSense::GreaterEqual) => (*n, None, Some(v)),
                    Some(ConstraintSense::Equal) => (*n, Some(v), Some(v)),
                    None => return Err(parse_err(line, "malformed bound")),
                }
            }
            [_, kw] if kw.eq_ignore_ascii_case("free") => {
                return Err(parse_err(line, "free variables are not supported"));
            }
            _ => return Err(parse_err(line, "malformed bound")),
        };
        if !valid_name(name) {
            return Err(parse_err(line, format!("invalid variable name {name:?}")));
        }
        declare(name, &mut order, &mut info);
        let entry = info.get_mut(name).expect("declared");
        if let Some(lo) = lo {
            entry.0 = lo;
        }
        if let Some(hi) = hi {
            entry.1 = hi;
        }
        entry.3 = true;
    }
    for (name, _) in &objective {
        declare(name, &mut order, &mut info);
    }
    for c in &constraints {
        for (name, _) in &c.terms {
            declare(name, &mut order, &mut info);
        }
    }
    for (name, line) in &binary_names {
        if !valid_name(name) {
            return Err(parse_err(*line, format!("invalid variable name {name:?}")));
        }
        declare(name, &mut order, &mut info);
        let entry = info.get_mut(name).expect("declared");
        entry.2 = true;
        if !entry.3 {
            entry.1 = 1.0;
        }
    }

    let mut program = LinearProgram::new();
    let mut ids = HashMap::new();
    for name in &order {
        let (lo, hi, binary, _) = info[name];
        let kind = if binary { VariableKind::Binary } else { VariableKind::Continuous };
        let id = program.add_variable(name.clone(), lo, hi, kind)?;
        ids.insert(name.clone(), id);
    }
    let mut seen_obj: HashMap<&str, ()> = HashMap::new();
    for (name, coef) in &objective {
        if seen_obj.insert(name.as_str(), ()).is_some() {
            program.add_objective(ids[name], *coef)?;
        } else {
            program.set_objective(ids[name], *coef)?;
        }
    }
    for c in constraints {
        let terms = c.terms.iter().map(|(n, a)| (ids[n], *a)).collect();
        program
            .add_constraint(c.name, terms, c.sense, c.rhs)
            .map_err(|e| parse_err(c.line, e.to_string()))?;
    }
    Ok(program)
}

/// Join a sign token with the number that follows it (`-`, `3` -> `-3`).
fn merge_signed_numbers(toks: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut negate = false;
    for t in toks {
        if t == "-" || t == "+" {
            negate = t == "-";
            continue;
        }
        out.push(if negate { format!("-{t}") } else { t.clone() });
        negate = false;
    }
    out
}
