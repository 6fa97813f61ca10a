//! Free-format MPS reader and writer.
//!
//! Supported sections, in order: `NAME`, `OBJSENSE`, `ROWS`, `COLUMNS`,
//! `RHS`, `RANGES`, `BOUNDS`, `ENDATA`. `NAME`, `OBJSENSE`, `RHS`, `RANGES`
//! and `BOUNDS` are optional. Lines whose first character is `*` are
//! comments. A section header is an unindented line whose first token is a
//! section keyword; every other non-blank line is data.
//!
//! Conventions:
//! * variables default to `[0, +inf)`;
//! * `UP` with a negative value on a column without an explicit lower bound
//!   makes the lower bound `-inf` (the behavior of common solvers);
//! * the RHS entry of the objective row stores the negated objective constant;
//! * a `RANGES` value `R` on row `r` adds a second row `r_rng` so that `r`
//!   keeps its original side and the pair describes `[rhs - |R|, rhs]` for `L`
//!   rows, `[rhs, rhs + |R|]` for `G` rows and, for `E` rows, `[rhs, rhs + R]`
//!   when `R > 0` or `[rhs + R, rhs]` when `R < 0`.
//!
//! The writer prints numbers with 17 significant digits, so
//! `parse_mps(write_mps(lp))` reproduces every value bit for bit.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::lp::{ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct MpsError {
    pub line: usize,
    pub kind: MpsErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsErrorKind {
    #[error("section {found} out of order")]
    SectionOrder { found: String },
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("data line outside of any section")]
    DataOutsideSection,
    #[error("unknown row `{0}`")]
    UnknownRow(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("duplicate row `{0}`")]
    DuplicateRow(String),
    #[error("duplicate entry for column `{col}` in row `{row}`")]
    DuplicateEntry { col: String, row: String },
    #[error("duplicate {code} bound on column `{col}`")]
    DuplicateBound { code: String, col: String },
    #[error("expected a number, found `{0}`")]
    NotANumber(String),
    #[error("wrong number of fields ({0})")]
    FieldCount(usize),
    #[error("unknown row type `{0}`")]
    RowType(String),
    #[error("unsupported or unknown bound type `{0}`")]
    BoundType(String),
    #[error("unknown objective sense `{0}`")]
    ObjSense(String),
    #[error("exactly one objective (N) row is required")]
    ObjectiveRow,
    #[error("integer markers are not supported")]
    IntegerMarker,
    #[error("range on objective row `{0}`")]
    RangeOnObjective(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpsWriteError {
    #[error("name `{0}` cannot be written to free MPS (empty or contains whitespace)")]
    BadName(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowType {
    N,
    L,
    G,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundCode {
    Lo,
    Up,
    Fx,
    Fr,
    Mi,
    Pl,
}

impl BoundCode {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "LO" => BoundCode::Lo,
            "UP" => BoundCode::Up,
            "FX" => BoundCode::Fx,
            "FR" => BoundCode::Fr,
            "MI" => BoundCode::Mi,
            "PL" => BoundCode::Pl,
            _ => return None,
        })
    }

    fn takes_value(self) -> bool {
        matches!(self, BoundCode::Lo | BoundCode::Up | BoundCode::Fx)
    }

    fn as_str(self) -> &'static str {
        match self {
            BoundCode::Lo => "LO",
            BoundCode::Up => "UP",
            BoundCode::Fx => "FX",
            BoundCode::Fr => "FR",
            BoundCode::Mi => "MI",
            BoundCode::Pl => "PL",
        }
    }
}

/// Token tables of a parsed MPS file, before interpretation. Entries carry
/// their source line for error reporting.
#[derive(Debug, Clone, Default)]
pub struct MpsDocument {
    pub name: String,
    pub objsense: Option<ObjectiveSense>,
    pub rows: Vec<(usize, RowType, String)>,
    pub columns: Vec<(usize, String, String, f64)>,
    pub rhs: Vec<(usize, String, f64)>,
    pub ranges: Vec<(usize, String, f64)>,
    pub bounds: Vec<(usize, BoundCode, String, Option<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Endata,
}

impl Section {
    fn keyword(s: &str) -> Option<Self> {
        Some(match s {
            "NAME" => Section::Name,
            "OBJSENSE" => Section::ObjSense,
            "ROWS" => Section::Rows,
            "COLUMNS" => Section::Columns,
            "RHS" => Section::Rhs,
            "RANGES" => Section::Ranges,
            "BOUNDS" => Section::Bounds,
            "ENDATA" => Section::Endata,
            _ => return None,
        })
    }
}

fn err(line: usize, kind: MpsErrorKind) -> MpsError {
    MpsError { line, kind }
}

fn number(line: usize, tok: &str) -> Result<f64, MpsError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, MpsErrorKind::NotANumber(tok.to_string()))),
    }
}

/// Bound values may be infinite; magnitudes of 1e30 and above count as infinity.
fn bound_number(line: usize, tok: &str) -> Result<f64, MpsError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_nan() => Err(err(line, MpsErrorKind::NotANumber(tok.to_string()))),
        Ok(v) if v >= 1e30 => Ok(f64::INFINITY),
        Ok(v) if v <= -1e30 => Ok(f64::NEG_INFINITY),
        Ok(v) => Ok(v),
        Err(_) => Err(err(line, MpsErrorKind::NotANumber(tok.to_string()))),
    }
}

fn objsense(line: usize, tok: &str) -> Result<ObjectiveSense, MpsError> {
    match tok {
        "MIN" | "MINIMIZE" => Ok(ObjectiveSense::Minimize),
        "MAX" | "MAXIMIZE" => Ok(ObjectiveSense::Maximize),
        _ => Err(err(line, MpsErrorKind::ObjSense(tok.to_string()))),
    }
}

/// `[set] (row value)+` where the optional set name makes the count odd.
fn pairs<'a>(line: usize, toks: &[&'a str]) -> Result<Vec<(&'a str, f64)>, MpsError> {
    let body = match toks.len() {
        2 | 4 => toks,
        3 | 5 => &toks[1..],
        n => return Err(err(line, MpsErrorKind::FieldCount(n))),
    };
    body.chunks(2)
        .map(|p| Ok((p[0], number(line, p[1])?)))
        .collect()
}

impl MpsDocument {
    pub fn parse(text: &str) -> Result<MpsDocument, MpsError> {
        let mut doc = MpsDocument::default();
        let mut section: Option<Section> = None;
        let mut seen_rows = false;
        let mut seen_columns = false;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            if raw.starts_with('*') {
                continue;
            }
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let indented = raw.starts_with(|c: char| c.is_whitespace());
            if !indented {
                if let Some(next) = Section::keyword(toks[0]) {
                    if section.is_some_and(|s| next <= s)
                        || (next == Section::Name && section.is_some())
                    {
                        return Err(err(
                            line,
                            MpsErrorKind::SectionOrder {
                                found: toks[0].to_string(),
                            },
                        ));
                    }
                    if next > Section::Rows && !seen_rows {
                        return Err(err(line, MpsErrorKind::MissingSection("ROWS")));
                    }
                    if next > Section::Columns && !seen_columns {
                        return Err(err(line, MpsErrorKind::MissingSection("COLUMNS")));
                    }
                    section = Some(next);
                    match next {
                        Section::Name => doc.name = toks[1..].join(" "),
                        Section::ObjSense => {
                            if toks.len() == 2 {
                                doc.objsense = Some(objsense(line, toks[1])?);
                            } else if toks.len() > 2 {
                                return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                            }
                        }
                        Section::Rows => seen_rows = true,
                        Section::Columns => seen_columns = true,
                        Section::Endata => {
                            if toks.len() != 1 {
                                return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                            }
                            return Ok(doc);
                        }
                        _ => {
                            if toks.len() != 1 {
                                return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                            }
                        }
                    }
                    continue;
                }
            }
            match section {
                None | Some(Section::Name) | Some(Section::Endata) => {
                    return Err(err(line, MpsErrorKind::DataOutsideSection));
                }
                Some(Section::ObjSense) => {
                    if toks.len() != 1 || doc.objsense.is_some() {
                        return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                    }
                    doc.objsense = Some(objsense(line, toks[0])?);
                }
                Some(Section::Rows) => {
                    if toks.len() != 2 {
                        return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                    }
                    let kind = match toks[0] {
                        "N" => RowType::N,
                        "L" => RowType::L,
                        "G" => RowType::G,
                        "E" => RowType::E,
                        t => return Err(err(line, MpsErrorKind::RowType(t.to_string()))),
                    };
                    doc.rows.push((line, kind, toks[1].to_string()));
                }
                Some(Section::Columns) => {
                    if toks.contains(&"'MARKER'") {
                        return Err(err(line, MpsErrorKind::IntegerMarker));
                    }
                    if toks.len() != 3 && toks.len() != 5 {
                        return Err(err(line, MpsErrorKind::FieldCount(toks.len())));
                    }
                    for p in toks[1..].chunks(2) {
                        doc.columns.push((
                            line,
                            toks[0].to_string(),
                            p[0].to_string(),
                            number(line, p[1])?,
                        ));
                    }
                }
                Some(Section::Rhs) => {
                    for (row, v) in pairs(line, &toks)? {
                        doc.rhs.push((line, row.to_string(), v));
                    }
                }
                Some(Section::Ranges) => {
                    for (row, v) in pairs(line, &toks)? {
                        doc.ranges.push((line, row.to_string(), v));
                    }
                }
                Some(Section::Bounds) => {
                    let code = BoundCode::parse(toks[0])
                        .ok_or_else(|| err(line, MpsErrorKind::BoundType(toks[0].to_string())))?;
                    let with_set = if code.takes_value() { 4 } else { 3 };
                    let rest = match toks.len() {
                        n if n == with_set => &toks[2..],
                        n if n == with_set - 1 => &toks[1..],
                        n => return Err(err(line, MpsErrorKind::FieldCount(n))),
                    };
                    let value = if code.takes_value() {
                        Some(bound_number(line, rest[1])?)
                    } else {
                        None
                    };
                    doc.bounds.push((line, code, rest[0].to_string(), value));
                }
            }
        }
        Err(err(last_line, MpsErrorKind::MissingSection("ENDATA")))
    }

    /// Interprets the token tables as a linear program.
    pub fn to_lp(&self) -> Result<LinearProgram, MpsError> {
        let mut objective_row: Option<&str> = None;
        let mut row_index: HashMap<&str, usize> = HashMap::new();
        let mut constraints: Vec<LinearConstraint> = Vec::new();
        for (line, kind, name) in &self.rows {
            if row_index.contains_key(name.as_str()) || objective_row == Some(name.as_str()) {
                return Err(err(*line, MpsErrorKind::DuplicateRow(name.clone())));
            }
            let sense = match kind {
                RowType::N => {
                    if objective_row.is_some() {
                        return Err(err(*line, MpsErrorKind::ObjectiveRow));
                    }
                    objective_row = Some(name);
                    continue;
                }
                RowType::L => ConstraintSense::Leq,
                RowType::G => ConstraintSense::Geq,
                RowType::E => ConstraintSense::Eq,
            };
            row_index.insert(name, constraints.len());
            constraints.push(LinearConstraint {
                name: name.clone(),
                coefficients: BTreeMap::new(),
                sense,
                rhs: 0.0,
            });
        }
        let objective_row = objective_row.ok_or_else(|| {
            err(
                self.rows.first().map_or(0, |r| r.0),
                MpsErrorKind::ObjectiveRow,
            )
        })?;

        let mut lp = LinearProgram::new(self.objsense.unwrap_or(ObjectiveSense::Minimize));
        let mut columns: HashMap<&str, usize> = HashMap::new();
        let mut entries: HashSet<(&str, &str)> = HashSet::new();
        for (line, col, row, value) in &self.columns {
            if !entries.insert((col, row)) {
                return Err(err(
                    *line,
                    MpsErrorKind::DuplicateEntry {
                        col: col.clone(),
                        row: row.clone(),
                    },
                ));
            }
            if !columns.contains_key(col.as_str()) {
                columns.insert(col, lp.variables.len());
                lp.variables.push(Variable::non_negative(col.clone()));
            }
            let target = if row == objective_row {
                &mut lp.objective
            } else {
                let &i = row_index
                    .get(row.as_str())
                    .ok_or_else(|| err(*line, MpsErrorKind::UnknownRow(row.clone())))?;
                &mut constraints[i].coefficients
            };
            if *value != 0.0 {
                target.insert(col.clone(), *value);
            }
        }

        let mut rhs_seen: HashSet<&str> = HashSet::new();
        for (line, row, value) in &self.rhs {
            if !rhs_seen.insert(row) {
                return Err(err(
                    *line,
                    MpsErrorKind::DuplicateEntry {
                        col: "RHS".into(),
                        row: row.clone(),
                    },
                ));
            }
            if row == objective_row {
                lp.objective_constant = -*value;
            } else {
                let &i = row_index
                    .get(row.as_str())
                    .ok_or_else(|| err(*line, MpsErrorKind::UnknownRow(row.clone())))?;
                constraints[i].rhs = *value;
            }
        }

        let mut extra: Vec<(usize, LinearConstraint)> = Vec::new();
        let mut range_seen: HashSet<&str> = HashSet::new();
        for (line, row, r) in &self.ranges {
            if row == objective_row {
                return Err(err(*line, MpsErrorKind::RangeOnObjective(row.clone())));
            }
            if !range_seen.insert(row) {
                return Err(err(
                    *line,
                    MpsErrorKind::DuplicateEntry {
                        col: "RANGES".into(),
                        row: row.clone(),
                    },
                ));
            }
            let &i = row_index
                .get(row.as_str())
                .ok_or_else(|| err(*line, MpsErrorKind::UnknownRow(row.clone())))?;
            let con = &mut constraints[i];
            let (own_sense, other_sense, other_rhs) = match con.sense {
                ConstraintSense::Leq => (
                    ConstraintSense::Leq,
                    ConstraintSense::Geq,
                    con.rhs - r.abs(),
                ),
                ConstraintSense::Geq => (
                    ConstraintSense::Geq,
                    ConstraintSense::Leq,
                    con.rhs + r.abs(),
                ),
                ConstraintSense::Eq if *r >= 0.0 => {
                    (ConstraintSense::Geq, ConstraintSense::Leq, con.rhs + r)
                }
                ConstraintSense::Eq => (ConstraintSense::Leq, ConstraintSense::Geq, con.rhs + r),
            };
            con.sense = own_sense;
            let other = LinearConstraint {
                name: String::new(),
                coefficients: con.coefficients.clone(),
                sense: other_sense,
                rhs: other_rhs,
            };
            extra.push((i, other));
        }

        let mut seen_codes: HashSet<(&str, BoundCode)> = HashSet::new();
        let mut explicit_lower: HashSet<usize> = HashSet::new();
        let mut negative_up: Vec<usize> = Vec::new();
        for (line, code, col, value) in &self.bounds {
            let &j = columns
                .get(col.as_str())
                .ok_or_else(|| err(*line, MpsErrorKind::UnknownColumn(col.clone())))?;
            if !seen_codes.insert((col, *code)) {
                return Err(err(
                    *line,
                    MpsErrorKind::DuplicateBound {
                        code: code.as_str().into(),
                        col: col.clone(),
                    },
                ));
            }
            let v = &mut lp.variables[j];
            match (code, value) {
                (BoundCode::Lo, Some(x)) => {
                    v.lower = *x;
                    explicit_lower.insert(j);
                }
                (BoundCode::Up, Some(x)) => {
                    v.upper = *x;
                    if *x < 0.0 {
                        negative_up.push(j);
                    }
                }
                (BoundCode::Fx, Some(x)) => {
                    v.lower = *x;
                    v.upper = *x;
                    explicit_lower.insert(j);
                }
                (BoundCode::Fr, _) => {
                    v.lower = f64::NEG_INFINITY;
                    v.upper = f64::INFINITY;
                    explicit_lower.insert(j);
                }
                (BoundCode::Mi, _) => {
                    v.lower = f64::NEG_INFINITY;
                    explicit_lower.insert(j);
                }
                (BoundCode::Pl, _) => v.upper = f64::INFINITY,
                _ => unreachable!("value presence checked while tokenizing"),
            }
        }
        for j in negative_up {
            if !explicit_lower.contains(&j) {
                lp.variables[j].lower = f64::NEG_INFINITY;
            }
        }

        // range rows go right after the row they split
        let mut taken: HashSet<String> = constraints.iter().map(|c| c.name.clone()).collect();
        taken.extend(lp.variables.iter().map(|v| v.name.clone()));
        let mut extra_by_row: HashMap<usize, LinearConstraint> = HashMap::new();
        for (i, mut c) in extra {
            let base = format!("{}_rng", constraints[i].name);
            let mut name = base.clone();
            let mut k = 1;
            while taken.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            taken.insert(name.clone());
            c.name = name;
            extra_by_row.insert(i, c);
        }
        for (i, c) in constraints.into_iter().enumerate() {
            lp.constraints.push(c);
            if let Some(r) = extra_by_row.remove(&i) {
                lp.constraints.push(r);
            }
        }
        if let Some(d) = lp.validate().first() {
            let line = self
                .bounds
                .last()
                .or(None)
                .map_or_else(|| self.rows.last().map_or(0, |r| r.0), |b| b.0);
            return Err(err(line, MpsErrorKind::Invalid(d.to_string())));
        }
        Ok(lp)
    }
}

pub fn parse_mps(text: &str) -> Result<LinearProgram, MpsError> {
    MpsDocument::parse(text)?.to_lp()
}

pub fn parse_mps_bytes(bytes: &[u8]) -> Result<LinearProgram, MpsError> {
    let text = std::str::from_utf8(bytes).map_err(|_| err(0, MpsErrorKind::Encoding))?;
    parse_mps(text)
}

/// Formats like C's `%.17g`: shortest of fixed or scientific notation with 17
/// significant digits and trailing zeros removed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{frac}e{esign}{:02}", exp.abs());
    }
    let (int, frac) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-exp - 1) as usize), digits),
        )
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn check_name(name: &str) -> Result<(), MpsWriteError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        Err(MpsWriteError::BadName(name.to_string()))
    } else {
        Ok(())
    }
}

/// Writes `lp` as free-format MPS under the model name `DUALKIT`.
pub fn write_mps(lp: &LinearProgram) -> Result<String, MpsWriteError> {
    write_mps_named(lp, "DUALKIT")
}

pub fn write_mps_named(lp: &LinearProgram, name: &str) -> Result<String, MpsWriteError> {
    if let Some(d) = lp.validate().first() {
        return Err(MpsWriteError::Invalid(d.to_string()));
    }
    check_name(name)?;
    for v in &lp.variables {
        check_name(&v.name)?;
    }
    for c in &lp.constraints {
        check_name(&c.name)?;
    }
    let obj = lp.fresh_name("obj");
    let mut out = String::new();
    out.push_str(&format!("NAME {name}\n"));
    if lp.objective_sense == ObjectiveSense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    out.push_str(&format!(" N {obj}\n"));
    for c in &lp.constraints {
        let t = match c.sense {
            ConstraintSense::Leq => 'L',
            ConstraintSense::Geq => 'G',
            ConstraintSense::Eq => 'E',
        };
        out.push_str(&format!(" {t} {}\n", c.name));
    }
    out.push_str("COLUMNS\n");
    for v in &lp.variables {
        let mut wrote = false;
        if let Some(&c) = lp.objective.get(&v.name) {
            out.push_str(&format!(" {} {obj} {}\n", v.name, format_g17(c)));
            wrote = true;
        }
        for con in &lp.constraints {
            if let Some(&a) = con.coefficients.get(&v.name) {
                out.push_str(&format!(" {} {} {}\n", v.name, con.name, format_g17(a)));
                wrote = true;
            }
        }
        if !wrote {
            out.push_str(&format!(" {} {obj} 0\n", v.name));
        }
    }
    out.push_str("RHS\n");
    if lp.objective_constant != 0.0 {
        out.push_str(&format!(
            " RHS {obj} {}\n",
            format_g17(-lp.objective_constant)
        ));
    }
    for c in &lp.constraints {
        if c.rhs != 0.0 {
            out.push_str(&format!(" RHS {} {}\n", c.name, format_g17(c.rhs)));
        }
    }
    let mut bounds = String::new();
    for v in &lp.variables {
        let n = &v.name;
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => bounds.push_str(&format!(" FR BND {n}\n")),
            (false, true) => {
                bounds.push_str(&format!(" MI BND {n}\n"));
                bounds.push_str(&format!(" UP BND {n} {}\n", format_g17(v.upper)));
            }
            (true, false) => {
                if v.lower != 0.0 {
                    bounds.push_str(&format!(" LO BND {n} {}\n", format_g17(v.lower)));
                }
            }
            (true, true) if v.lower == v.upper => {
                bounds.push_str(&format!(" FX BND {n} {}\n", format_g17(v.lower)));
            }
            (true, true) => {
                if v.lower != 0.0 {
                    bounds.push_str(&format!(" LO BND {n} {}\n", format_g17(v.lower)));
                }
                bounds.push_str(&format!(" UP BND {n} {}\n", format_g17(v.upper)));
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-3.0), "-3");
        assert_eq!(format_g17(2.5), "2.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(0.00012), "0.00012");
        assert_eq!(format_g17(-0.0), "-0");
        for v in [
            1.0 / 3.0,
            1e-300,
            5e-324,
            f64::MAX,
            -2.0 / 7.0,
            1e16,
            12345678901234567.0,
        ] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap(), v, "{v}");
        }
    }

    /// min x1 + x2 s.t. x1 + x2 >= 1, x >= 0
    const SLACK_FREE: &str = "\
NAME eq7
ROWS
 N obj
 G c1
COLUMNS
 x1 obj 1 c1 1
 x2 obj 1 c1 1
RHS
 RHS c1 1
ENDATA
";

    #[test]
    fn parses_single_geq_row() {
        let lp = parse_mps(SLACK_FREE).unwrap();
        assert_eq!(lp.constraints.len(), 1);
        assert_eq!(lp.constraints[0].sense, ConstraintSense::Geq);
        assert_eq!(lp.constraints[0].rhs, 1.0);
        assert_eq!(lp.objective_sense, ObjectiveSense::Minimize);
        assert!(lp
            .variables
            .iter()
            .all(|v| v.lower == 0.0 && v.upper == f64::INFINITY));
    }

    #[test]
    fn free_column_and_empty_rhs() {
        let text = "NAME t\nROWS\n N obj\n E r\nCOLUMNS\n x r 1\nBOUNDS\n FR BND x\nENDATA\n";
        let lp = parse_mps(text).unwrap();
        assert_eq!(lp.variables[0].lower, f64::NEG_INFINITY);
        assert_eq!(lp.variables[0].upper, f64::INFINITY);
        assert_eq!(lp.constraints[0].rhs, 0.0);
    }

    #[test]
    fn up_without_lo() {
        let text = "NAME t\nROWS\n N obj\nCOLUMNS\n x obj 1\n y obj 1\nBOUNDS\n UP BND x 2.0\n UP BND y -2\nENDATA\n";
        let lp = parse_mps(text).unwrap();
        assert_eq!((lp.variables[0].lower, lp.variables[0].upper), (0.0, 2.0));
        assert_eq!(
            (lp.variables[1].lower, lp.variables[1].upper),
            (f64::NEG_INFINITY, -2.0)
        );
    }

    #[test]
    fn objsense_forms() {
        for head in [
            "OBJSENSE\n    MAX\n",
            "OBJSENSE MAX\n",
            "OBJSENSE\n MAXIMIZE\n",
        ] {
            let text = format!("NAME t\n{head}ROWS\n N obj\nCOLUMNS\n x obj 1\nENDATA\n");
            assert_eq!(
                parse_mps(&text).unwrap().objective_sense,
                ObjectiveSense::Maximize
            );
        }
    }

    #[test]
    fn ranges_expand() {
        let text =
            "NAME t\nROWS\n N obj\n L l\n G g\n E e1\n E e2\nCOLUMNS\n x l 1 g 1\n x e1 1 e2 1\n\
RHS\n RHS l 4 g 1\n RHS e1 2 e2 2\nRANGES\n RNG l 3 g -2\n RNG e1 1.5 e2 -1.5\nENDATA\n";
        let lp = parse_mps(text).unwrap();
        let row = |n: &str| {
            let c = lp.constraint(n).unwrap();
            (c.sense, c.rhs)
        };
        use ConstraintSense::*;
        assert_eq!(row("l"), (Leq, 4.0));
        assert_eq!(row("l_rng"), (Geq, 1.0));
        assert_eq!(row("g"), (Geq, 1.0));
        assert_eq!(row("g_rng"), (Leq, 3.0));
        assert_eq!(row("e1"), (Geq, 2.0));
        assert_eq!(row("e1_rng"), (Leq, 3.5));
        assert_eq!(row("e2"), (Leq, 2.0));
        assert_eq!(row("e2_rng"), (Geq, 0.5));
        let names: Vec<_> = lp.constraints.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            ["l", "l_rng", "g", "g_rng", "e1", "e1_rng", "e2", "e2_rng"]
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases: [(&str, usize); 6] = [
            ("NAME t\nCOLUMNS\n x obj 1\nROWS\n N obj\nENDATA\n", 2),
            ("NAME t\nROWS\n N obj\nCOLUMNS\n x zz 1\nENDATA\n", 5),
            ("NAME t\nROWS\n N obj\nCOLUMNS\n x obj abc\nENDATA\n", 5),
            (
                "NAME t\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n UP B x 1\n UP B x 2\nENDATA\n",
                8,
            ),
            (
                "NAME t\nROWS\n N obj\nCOLUMNS\n x obj 1\nRHS\n RHS r 1\nENDATA\n",
                7,
            ),
            ("NAME t\nROWS\n N obj\nCOLUMNS\n x obj 1\n", 5),
        ];
        for (text, line) in cases {
            let e = parse_mps(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?} -> {e}");
        }
        let e = parse_mps(
            "NAME t\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n UP B x 1\n UP B x 2\nENDATA\n",
        )
        .unwrap_err();
        assert!(matches!(e.kind, MpsErrorKind::DuplicateBound { .. }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("* header comment\n\n{SLACK_FREE}");
        assert!(parse_mps(&text).is_ok());
    }

    #[test]
    fn writer_emits_bounds_and_objsense() {
        let lp = LinearProgram::new(ObjectiveSense::Maximize)
            .with_variable(Variable::new("x", 1.0, 2.0))
            .with_objective([("x", 1.0)]);
        let text = write_mps(&lp).unwrap();
        assert!(text.contains("OBJSENSE\n    MAX\n"));
        assert!(text.contains(" LO BND x 1\n"));
        assert!(text.contains(" UP BND x 2\n"));
        assert_eq!(parse_mps(&text).unwrap(), lp);
    }

    #[test]
    fn writer_rejects_whitespace_names() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("a b"));
        assert!(matches!(write_mps(&lp), Err(MpsWriteError::BadName(_))));
    }

    #[test]
    fn objective_row_name_avoids_clash() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("obj"))
            .with_objective([("obj", 2.0)]);
        let mut lp = lp;
        lp.objective_constant = 3.5;
        let back = parse_mps(&write_mps(&lp).unwrap()).unwrap();
        assert_eq!(back, lp);
    }
}
