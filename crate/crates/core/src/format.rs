//! File formats: the Greechie DSL, explicit-table JSON, state and map JSON,
//! and box CSV. Rationals always cross the boundary as `"p/q"` strings.
//!
//! The Greechie DSL is line-oriented UTF-8 with `#` comments:
//!
//! ```text
//! algebra firefly
//! atoms: a b c d e
//! test: a b e
//! test: c d e
//! ```

use crate::algebra::{EffectAlgebra, ElementId, GreechieDiagram, Morphism};
use crate::bell::NoSignalingBox;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::states::{complete_additively, StateError, StateVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Parses the Greechie DSL. Duplicate atoms within a test and unknown atom
/// names are rejected with positions; the hypergraph invariants are checked
/// by [`GreechieDiagram::validate`].
pub fn parse_greechie_dsl(text: &str) -> Result<GreechieDiagram, ParseError> {
    let mut name = String::from("unnamed");
    let mut atoms: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut lines: Vec<Vec<usize>> = Vec::new();
    let mut saw_atoms = false;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("algebra") {
            let n = rest.trim();
            if n.is_empty() {
                return Err(err(line_no, 1, "missing algebra name"));
            }
            name = n.to_string();
        } else if let Some(rest) = trimmed.strip_prefix("atoms:") {
            if saw_atoms {
                return Err(err(line_no, 1, "duplicate atoms line"));
            }
            saw_atoms = true;
            for tok in rest.split_whitespace() {
                if index.contains_key(tok) {
                    let col = content.find(tok).unwrap_or(0) + 1;
                    return Err(err(line_no, col, format!("duplicate atom {tok}")));
                }
                index.insert(tok.to_string(), atoms.len());
                atoms.push(tok.to_string());
            }
            if atoms.is_empty() {
                return Err(err(line_no, 1, "empty atoms line"));
            }
        } else if let Some(rest) = trimmed.strip_prefix("test:") {
            if !saw_atoms {
                return Err(err(line_no, 1, "test before atoms line"));
            }
            let mut line = Vec::new();
            for tok in rest.split_whitespace() {
                let col = content.find(tok).unwrap_or(0) + 1;
                let Some(&i) = index.get(tok) else {
                    return Err(err(line_no, col, format!("unknown atom {tok}")));
                };
                if line.contains(&i) {
                    return Err(err(line_no, col, format!("duplicate atom {tok} in test")));
                }
                line.push(i);
            }
            if line.is_empty() {
                return Err(err(line_no, 1, "empty test"));
            }
            lines.push(line);
        } else {
            return Err(err(line_no, 1, format!("unrecognized directive: {trimmed}")));
        }
    }
    if !saw_atoms {
        return Err(err(1, 1, "missing atoms line"));
    }
    let d = GreechieDiagram { name, atoms, lines };
    d.validate().map_err(|e| err(1, 1, e.to_string()))?;
    Ok(d)
}

/// Renders a diagram back into the DSL; parse ∘ render is the identity.
pub fn render_greechie_dsl(d: &GreechieDiagram) -> String {
    let mut out = String::new();
    out.push_str(&format!("algebra {}\n", d.name));
    out.push_str(&format!("atoms: {}\n", d.atoms.join(" ")));
    for line in &d.lines {
        let names: Vec<&str> = line.iter().map(|&i| d.atoms[i].as_str()).collect();
        out.push_str(&format!("test: {}\n", names.join(" ")));
    }
    out
}

/// Explicit-table JSON: elements, zero and one indices, defined sums as
/// index triples, complement as an index table.
#[derive(Serialize, Deserialize)]
pub struct AlgebraTableFile {
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub zero: u32,
    pub one: u32,
    pub sums: Vec<[u32; 3]>,
    pub complement: Vec<u32>,
}

pub fn algebra_from_json(text: &str) -> Result<EffectAlgebra, String> {
    let file: AlgebraTableFile =
        serde_json::from_str(text).map_err(|e| format!("bad algebra JSON: {e}"))?;
    let sums: Vec<(ElementId, ElementId, ElementId)> = file
        .sums
        .iter()
        .map(|[a, b, c]| (ElementId(*a), ElementId(*b), ElementId(*c)))
        .collect();
    EffectAlgebra::from_tables(
        file.name.unwrap_or_else(|| "unnamed".into()),
        file.elements,
        ElementId(file.zero),
        ElementId(file.one),
        &sums,
        file.complement.into_iter().map(ElementId).collect(),
    )
    .map_err(|e| e.to_string())
}

pub fn algebra_to_json(alg: &EffectAlgebra) -> String {
    let mut sums = Vec::new();
    for a in alg.elements() {
        for &b in alg.partners(a) {
            let s = alg.sum(a, b).unwrap();
            sums.push([a.0, b.0, s.0]);
        }
    }
    let file = AlgebraTableFile {
        name: Some(alg.name().to_string()),
        elements: alg.labels().to_vec(),
        zero: alg.zero().0,
        one: alg.one().0,
        sums,
        complement: alg.elements().map(|e| alg.complement(e).0).collect(),
    };
    serde_json::to_string_pretty(&file).expect("algebra serializes")
}

/// Loads an algebra from DSL or JSON, deciding by content (JSON starts with
/// a brace).
pub fn load_algebra(text: &str) -> Result<EffectAlgebra, String> {
    if text.trim_start().starts_with('{') {
        algebra_from_json(text)
    } else {
        let d = parse_greechie_dsl(text).map_err(|e| e.to_string())?;
        crate::algebra::from_greechie(&d).map_err(|e| e.to_string())
    }
}

/// State JSON: values keyed by element label, rationals as strings. Values
/// may cover a generating set only; the rest is filled in additively.
#[derive(Serialize, Deserialize)]
pub struct StateFile {
    pub algebra: String,
    pub values: BTreeMap<String, String>,
}

pub fn state_from_json(alg: &EffectAlgebra, text: &str) -> Result<StateVector, String> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| format!("bad state JSON: {e}"))?;
    let mut partial: Vec<(ElementId, Rational)> = Vec::new();
    for (label, value) in &file.values {
        let Some(e) = alg.element_by_label(label) else {
            return Err(format!("unknown element label {label}"));
        };
        partial.push((e, parse_rational(value)?));
    }
    let values = complete_additively(alg, &partial).map_err(|e| e.to_string())?;
    let sv = StateVector { values };
    sv.validate(alg).map_err(|e: StateError| e.to_string())?;
    Ok(sv)
}

pub fn state_to_json(alg: &EffectAlgebra, sv: &StateVector) -> String {
    let values: BTreeMap<String, String> = alg
        .elements()
        .map(|e| (alg.label(e).to_string(), format_rational(sv.get(e))))
        .collect();
    let file = StateFile { algebra: alg.name().to_string(), values };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

/// Map JSON: source labels to target labels. A partial map on a generating
/// set is extended through 0, 1, complements and sums.
#[derive(Serialize, Deserialize)]
pub struct MapFile {
    pub map: BTreeMap<String, String>,
}

pub fn morphism_from_json(
    src: &EffectAlgebra,
    dst: &EffectAlgebra,
    text: &str,
) -> Result<Morphism, String> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| format!("bad map JSON: {e}"))?;
    let mut assigned: Vec<Option<ElementId>> = vec![None; src.element_count()];
    for (sl, dl) in &file.map {
        let Some(s) = src.element_by_label(sl) else {
            return Err(format!("unknown source label {sl}"));
        };
        let Some(d) = dst.element_by_label(dl) else {
            return Err(format!("unknown target label {dl}"));
        };
        assigned[s.idx()] = Some(d);
    }
    assigned[src.zero().idx()].get_or_insert(dst.zero());
    assigned[src.one().idx()].get_or_insert(dst.one());
    // close under complements and sums
    loop {
        let mut progressed = false;
        for a in src.elements() {
            if let Some(fa) = assigned[a.idx()] {
                let c = src.complement(a);
                let target = dst.complement(fa);
                match assigned[c.idx()] {
                    None => {
                        assigned[c.idx()] = Some(target);
                        progressed = true;
                    }
                    Some(t) if t != target => {
                        return Err(format!(
                            "map clashes at the complement of {}",
                            src.label(a)
                        ))
                    }
                    _ => {}
                }
            }
            for &b in src.partners(a) {
                let (Some(fa), Some(fb)) = (assigned[a.idx()], assigned[b.idx()]) else {
                    continue;
                };
                let s = src.sum(a, b).unwrap();
                let Some(fs) = dst.sum(fa, fb) else {
                    return Err(format!(
                        "map sends the defined sum {} ⊞ {} to an undefined sum",
                        src.label(a),
                        src.label(b)
                    ));
                };
                match assigned[s.idx()] {
                    None => {
                        assigned[s.idx()] = Some(fs);
                        progressed = true;
                    }
                    Some(t) if t != fs => {
                        return Err(format!(
                            "map clashes at {} ⊞ {}",
                            src.label(a),
                            src.label(b)
                        ))
                    }
                    _ => {}
                }
            }
        }
        if !progressed {
            break;
        }
    }
    let map: Option<Vec<ElementId>> = assigned.into_iter().collect();
    let Some(map) = map else {
        return Err("map leaves some source elements unassigned".into());
    };
    let m = Morphism { map };
    m.verify(src, dst).map_err(|e| e.to_string())?;
    Ok(m)
}

/// Box CSV: four rows of four `p/q` entries, contexts and outcomes in the
/// fixed order.
pub fn box_from_csv(text: &str) -> Result<NoSignalingBox, String> {
    let mut rows: Vec<[Rational; 4]> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').map(|c| c.trim()).collect();
        if cells.len() != 4 {
            return Err(format!("line {}: expected 4 cells, found {}", ln + 1, cells.len()));
        }
        let mut row: [Rational; 4] = Default::default();
        for (i, c) in cells.iter().enumerate() {
            row[i] = parse_rational(c)?;
        }
        rows.push(row);
    }
    if rows.len() != 4 {
        return Err(format!("expected 4 probability rows, found {}", rows.len()));
    }
    let rows: [[Rational; 4]; 4] = rows.try_into().unwrap();
    Ok(NoSignalingBox::from_rows(rows))
}

pub fn box_to_csv(b: &NoSignalingBox) -> String {
    let mut out = String::new();
    for c in 0..4 {
        let cells: Vec<String> = b.row(c).iter().map(format_rational).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
