//! Line-oriented system files.
//!
//! ```text
//! # comments run to the end of the line
//! [system]
//! name = dissipative-n2
//! dof = 2
//!
//! [poisson]
//! W(q1,p1) = -p1
//! W(q2,p2) = -p2
//!
//! [hamiltonian]
//! h = p1 + q1 + p2 + q2
//!
//! [symmetry]
//! E(q1) = (p1 + q1)^2
//! E(q2) = (p2 + q2)^2
//! ```
//!
//! `W(a,b)` is the stored component on the pair `a < b` in canonical order
//! `q1..qn, p1..pn`. Sections may appear in any order, each at most once.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use binoether_core::expr::{parse, ExprError, PhaseSpace, Printer, ScalarExpr};
use binoether_core::geometry::MultiVectorField;
use binoether_core::system::SystemSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("missing [{0}] section")]
    MissingSection(&'static str),
    #[error("missing `{key}` in [{section}]")]
    MissingKey { section: &'static str, key: &'static str },
    #[error("generator E required: [symmetry] has no components")]
    GeneratorRequired,
}

fn at(line: usize, column: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse { line, column, message: message.into() }
}

const SECTIONS: [&str; 4] = ["system", "poisson", "hamiltonian", "symmetry"];

/// A `key = value` line with 1-based line number and columns.
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    key_column: usize,
    value: String,
    value_column: usize,
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Vec<Entry>>, LoadError> {
    let mut sections: BTreeMap<&'static str, Vec<Entry>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.chars().take_while(|c| c.is_whitespace()).count();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| at(line, indent + 1, "unterminated section header"))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| at(line, indent + 2, format!("unknown section [{name}]")))?;
            if sections.contains_key(known) {
                return Err(at(line, indent + 1, format!("duplicate section [{name}]")));
            }
            sections.insert(known, Vec::new());
            current = Some(known);
            continue;
        }
        let section = current.ok_or_else(|| at(line, indent + 1, "entry outside of any section"))?;
        let eq = content.find('=').ok_or_else(|| at(line, indent + 1, "expected `key = value`"))?;
        let key = content[..eq].trim().to_string();
        if key.is_empty() {
            return Err(at(line, indent + 1, "empty key"));
        }
        let value_raw = &content[eq + 1..];
        let lead = value_raw.chars().take_while(|c| c.is_whitespace()).count();
        let value = value_raw.trim().to_string();
        let value_column = content[..eq].chars().count() + 2 + lead;
        if value.is_empty() {
            return Err(at(line, value_column, format!("empty value for `{key}`")));
        }
        sections.get_mut(section).expect("section registered").push(Entry {
            line,
            key,
            key_column: indent + 1,
            value,
            value_column,
        });
    }
    Ok(sections)
}

fn expression(entry: &Entry, space: &PhaseSpace) -> Result<ScalarExpr, LoadError> {
    parse(&entry.value, space).map_err(|e| {
        let column = entry.value_column + e.position().unwrap_or(0);
        at(entry.line, column, strip_position(&e))
    })
}

fn strip_position(e: &ExprError) -> String {
    match e {
        ExprError::Syntax { message, .. } => message.clone(),
        ExprError::UnknownIdentifier { name, .. } => format!("unknown coordinate `{name}`"),
        ExprError::NonIntegerExponent { .. } => "non-integer exponent".into(),
        other => other.to_string(),
    }
}

/// Arguments of `W(a,b)` or `E(a)` as coordinate indices.
fn call_args(entry: &Entry, head: &str, arity: usize, space: &PhaseSpace) -> Result<Vec<usize>, LoadError> {
    let key = &entry.key;
    let inner = key
        .strip_prefix(head)
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| {
            let shape = if arity == 1 { "E(coord)" } else { "W(coord,coord)" };
            at(entry.line, entry.key_column, format!("expected `{shape}`, found `{key}`"))
        })?;
    let open = key.find('(').expect("checked above");
    let mut out = Vec::new();
    let mut offset = open + 1;
    for name in inner.split(',') {
        let column = entry.key_column + offset + (name.len() - name.trim_start().len());
        let name = name.trim();
        let idx = space
            .index_of(name)
            .ok_or_else(|| at(entry.line, column, format!("unknown coordinate `{name}`")))?;
        out.push(idx);
        offset += name.len() + 1;
    }
    if out.len() != arity {
        return Err(at(entry.line, entry.key_column, format!("`{head}` takes {arity} coordinate(s)")));
    }
    Ok(out)
}

fn single<'a>(
    entries: &'a [Entry],
    section: &'static str,
    key: &'static str,
) -> Result<&'a Entry, LoadError> {
    let mut found = entries.iter().filter(|e| e.key == key);
    let first = found.next().ok_or(LoadError::MissingKey { section, key })?;
    if let Some(dup) = found.next() {
        return Err(at(dup.line, dup.key_column, format!("duplicate key `{key}`")));
    }
    Ok(first)
}

/// Parse a system file's contents.
pub fn parse_system(text: &str) -> Result<SystemSpec, LoadError> {
    let sections = split_sections(text)?;
    let get = |name: &'static str| sections.get(name).ok_or(LoadError::MissingSection(name));

    let system = get("system")?;
    for e in system {
        if e.key != "name" && e.key != "dof" {
            return Err(at(e.line, e.key_column, format!("unknown key `{}` in [system]", e.key)));
        }
    }
    let name = single(system, "system", "name")?.value.clone();
    let dof_entry = single(system, "system", "dof")?;
    let dof: usize = dof_entry
        .value
        .parse()
        .map_err(|_| at(dof_entry.line, dof_entry.value_column, "dof must be a positive integer"))?;
    let space = PhaseSpace::canonical(dof)
        .map_err(|e| at(dof_entry.line, dof_entry.value_column, e.to_string()))?;

    let mut w = MultiVectorField::zero(&space, 2);
    let mut seen = BTreeMap::new();
    for e in get("poisson")? {
        let idx = call_args(e, "W", 2, &space)?;
        let (a, b) = (idx[0], idx[1]);
        if a == b {
            return Err(at(e.line, e.key_column, "diagonal component of an antisymmetric bivector"));
        }
        if a > b {
            return Err(at(
                e.line,
                e.key_column,
                format!(
                    "pair ({}, {}) is not in increasing order; write W({},{}) = -({})",
                    space.name(a),
                    space.name(b),
                    space.name(b),
                    space.name(a),
                    e.value
                ),
            ));
        }
        if let Some(prev) = seen.insert((a, b), e.line) {
            return Err(at(e.line, e.key_column, format!("duplicate key `{}` (first on line {prev})", e.key)));
        }
        let expr = expression(e, &space)?;
        w.add_to(&[a, b], expr).map_err(|err| at(e.line, e.key_column, err.to_string()))?;
    }

    let hamiltonian = get("hamiltonian")?;
    for e in hamiltonian {
        if e.key != "h" {
            return Err(at(e.line, e.key_column, format!("unknown key `{}` in [hamiltonian]", e.key)));
        }
    }
    let h = expression(single(hamiltonian, "hamiltonian", "h")?, &space)?;

    let symmetry = sections.get("symmetry").ok_or(LoadError::GeneratorRequired)?;
    if symmetry.is_empty() {
        return Err(LoadError::GeneratorRequired);
    }
    let mut e_field = MultiVectorField::zero(&space, 1);
    let mut seen = BTreeMap::new();
    for e in symmetry {
        let idx = call_args(e, "E", 1, &space)?;
        if let Some(prev) = seen.insert(idx[0], e.line) {
            return Err(at(e.line, e.key_column, format!("duplicate key `{}` (first on line {prev})", e.key)));
        }
        let expr = expression(e, &space)?;
        e_field.add_to(&idx, expr).map_err(|err| at(e.line, e.key_column, err.to_string()))?;
    }

    SystemSpec::new(name, w, h, e_field).map_err(|e| at(1, 1, e.to_string()))
}

/// Read and parse a system file.
pub fn load_system(path: impl AsRef<Path>) -> Result<SystemSpec, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_system(&text)
}

/// Serialize a system in the file format. Zero generators cannot be
/// represented and are written with a single explicit zero component.
pub fn write_system(spec: &SystemSpec) -> String {
    let s = &spec.space;
    let mut out = String::new();
    let _ = writeln!(out, "[system]\nname = {}\ndof = {}\n\n[poisson]", spec.name, spec.dof());
    for (idx, e) in spec.w.components() {
        let _ = writeln!(out, "W({},{}) = {}", s.name(idx[0]), s.name(idx[1]), Printer::new(e, s));
    }
    let _ = writeln!(out, "\n[hamiltonian]\nh = {}\n\n[symmetry]", Printer::new(&spec.h, s));
    if spec.e.is_zero() {
        let _ = writeln!(out, "E({}) = 0", s.name(0));
    }
    for (idx, e) in spec.e.components() {
        let _ = writeln!(out, "E({}) = {}", s.name(idx[0]), Printer::new(e, s));
    }
    out
}
