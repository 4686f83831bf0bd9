//! Line-oriented problem-file format.
//!
//! ```text
//! strad-problem v1
//! kind stability              # controllability | stabilizability | stability
//! norm frobenius              # frobenius | spectral
//! dims 4 0 2                  # n m p  (m = 0 for stability problems)
//! A0                          # base state matrix, n rows follow
//! 79 20 -30 -20
//! ...
//! A1                          # per-parameter blocks; omitted blocks are zero
//! ...
//! B0                          # base input matrix (m > 0 only)
//! ...
//! structure diagonal          # full T1 T2 | diagonal | vector | general T1 T2
//! G0                          # general only: optional constant block
//! G1                          # general only: basis blocks
//! option eps 1e-4             # optional solver overrides
//! ```
//!
//! `#` starts a comment; blank lines are ignored.  Serialization emits a
//! canonical form (no comments, zero blocks omitted, options sorted), and
//! parsing a canonical document reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use strad::{AffineFamily, NormKind, PencilKind, RadiusProblem, StructureMap};

/// Parse failure with its source position (1-based line, 1-based column
/// when known).
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column {
            Some(col) => write!(f, "line {}, column {}: {}", self.line, col, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

/// Structure-map section of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureSpec {
    Full { t1: usize, t2: usize },
    Diagonal,
    Vector,
    General {
        constant: Option<DMatrix<f64>>,
        basis: Vec<DMatrix<f64>>,
    },
}

/// In-memory form of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub kind: PencilKind,
    pub norm: NormKind,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub a0: DMatrix<f64>,
    /// Length `p`; omitted blocks are zero matrices.
    pub a_basis: Vec<DMatrix<f64>>,
    pub b0: Option<DMatrix<f64>>,
    pub b_basis: Vec<DMatrix<f64>>,
    pub structure: StructureSpec,
    /// Solver option overrides, keyed by option name.
    pub options: BTreeMap<String, f64>,
}

struct Lines<'a> {
    /// (1-based line number, trimmed content, column offset of the content).
    lines: Vec<(usize, &'a str, usize)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let content = match l.find('#') {
                    Some(idx) => &l[..idx],
                    None => l,
                };
                let trimmed = content.trim();
                let offset = if trimmed.is_empty() {
                    0
                } else {
                    content.find(trimmed).unwrap_or(0)
                };
                (i + 1, trimmed, offset)
            })
            .filter(|(_, l, _)| !l.is_empty())
            .collect();
        Self { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).map(|&(n, l, _)| (n, l))
    }

    fn next(&mut self) -> Option<(usize, &'a str, usize)> {
        let item = self.lines.get(self.pos).copied();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.next().map(|(n, l, _)| (n, l))
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str, usize), ParseError> {
        self.next().ok_or_else(|| ParseError {
            line: self.lines.last().map_or(1, |(n, _, _)| *n + 1),
            column: None,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column: None,
        message: message.into(),
    }
}

fn err_at(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column: Some(column),
        message: message.into(),
    }
}

fn tokens_with_positions(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

fn parse_matrix(
    lines: &mut Lines,
    rows: usize,
    cols: usize,
    name: &str,
) -> Result<DMatrix<f64>, ParseError> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line_no, line, offset) = lines.expect(&format!("a row of {name}"))?;
        let entries = tokens_with_positions(line);
        if entries.len() != cols {
            return Err(err(
                line_no,
                format!("{name}: expected {cols} entries per row, found {}", entries.len()),
            ));
        }
        for (pos, e) in entries {
            let v: f64 = e.parse().map_err(|_| {
                err_at(line_no, offset + pos + 1, format!("{name}: bad number `{e}`"))
            })?;
            data.push(v);
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = Lines::new(text);

        let (line_no, header, _) = lines.expect("header")?;
        if header != "strad-problem v1" {
            return Err(err(line_no, format!("expected `strad-problem v1`, found `{header}`")));
        }

        let (line_no, kind_line, _) = lines.expect("kind")?;
        let kind = match kind_line.strip_prefix("kind ").map(str::trim) {
            Some("controllability") => PencilKind::Controllability,
            Some("stabilizability") => PencilKind::Stabilizability,
            Some("stability") => PencilKind::Stability,
            _ => return Err(err(line_no, format!("expected `kind <controllability|stabilizability|stability>`, found `{kind_line}`"))),
        };

        let (line_no, norm_line, _) = lines.expect("norm")?;
        let norm = match norm_line.strip_prefix("norm ").map(str::trim) {
            Some("frobenius") => NormKind::Frobenius,
            Some("spectral") => NormKind::Spectral,
            _ => return Err(err(line_no, format!("expected `norm <frobenius|spectral>`, found `{norm_line}`"))),
        };

        let (line_no, dims_line, _) = lines.expect("dims")?;
        let dims: Vec<usize> = dims_line
            .strip_prefix("dims ")
            .map(|rest| rest.split_whitespace().map(|t| t.parse().unwrap_or(usize::MAX)).collect())
            .unwrap_or_default();
        if dims.len() != 3 || dims.contains(&usize::MAX) {
            return Err(err(line_no, format!("expected `dims <n> <m> <p>`, found `{dims_line}`")));
        }
        let (n, m, p) = (dims[0], dims[1], dims[2]);
        if n == 0 || p == 0 {
            return Err(err(line_no, "n and p must be positive"));
        }
        if (kind == PencilKind::Stability) != (m == 0) {
            return Err(err(line_no, "stability problems take m = 0, others m > 0"));
        }

        let mut a0 = None;
        let mut a_basis: Vec<Option<DMatrix<f64>>> = vec![None; p];
        let mut b0 = None;
        let mut b_basis: Vec<Option<DMatrix<f64>>> = vec![None; p];

        while let Some((line_no, line)) = lines.peek() {
            let (prefix, rows, cols, slot): (&str, usize, usize, usize) = if let Some(idx) = line.strip_prefix('A') {
                match idx.parse::<usize>() {
                    Ok(i) if i <= p => ("A", n, n, i),
                    _ => break,
                }
            } else if let Some(idx) = line.strip_prefix('B') {
                match idx.parse::<usize>() {
                    Ok(i) if i <= p && m > 0 => ("B", n, m, i),
                    _ => break,
                }
            } else {
                break;
            };
            lines.next_line();
            let name = format!("{prefix}{slot}");
            let matrix = parse_matrix(&mut lines, rows, cols, &name)?;
            let target = match (prefix, slot) {
                ("A", 0) => &mut a0,
                ("B", 0) => &mut b0,
                ("A", i) => &mut a_basis[i - 1],
                ("B", i) => &mut b_basis[i - 1],
                _ => unreachable!(),
            };
            if target.is_some() {
                return Err(err(line_no, format!("duplicate block {name}")));
            }
            *target = Some(matrix);
        }

        let here = lines.peek().map_or(1, |(n, _)| n);
        if a0.is_none() {
            return Err(err(here, "missing block A0"));
        }
        if m > 0 && b0.is_none() {
            return Err(err(here, "missing block B0"));
        }

        let (line_no, structure_line, _) = lines.expect("structure")?;
        let tokens: Vec<&str> = structure_line.split_whitespace().collect();
        if tokens.first() != Some(&"structure") {
            return Err(err(line_no, format!("expected `structure <form>`, found `{structure_line}`")));
        }
        let structure = match tokens.get(1) {
            Some(&"diagonal") => StructureSpec::Diagonal,
            Some(&"vector") => StructureSpec::Vector,
            Some(&"full") | Some(&"general") => {
                let is_full = tokens[1] == "full";
                let (t1, t2) = match (tokens.get(2), tokens.get(3)) {
                    (Some(a), Some(b)) => (
                        a.parse::<usize>().map_err(|_| err(line_no, "bad t1"))?,
                        b.parse::<usize>().map_err(|_| err(line_no, "bad t2"))?,
                    ),
                    _ => return Err(err(line_no, "expected `structure full|general <t1> <t2>`")),
                };
                if is_full {
                    if t1 * t2 != p {
                        return Err(err(line_no, format!("full structure needs t1*t2 = p, got {t1}x{t2} vs p = {p}")));
                    }
                    StructureSpec::Full { t1, t2 }
                } else {
                    let mut constant = None;
                    if let Some((_, l)) = lines.peek() {
                        if l == "G0" {
                            lines.next_line();
                            constant = Some(parse_matrix(&mut lines, t1, t2, "G0")?);
                        }
                    }
                    let mut basis = Vec::with_capacity(p);
                    for k in 1..=p {
                        let name = format!("G{k}");
                        let (gl, l, _) = lines.expect(&name)?;
                        if l != name {
                            return Err(err(gl, format!("expected block {name}, found `{l}`")));
                        }
                        basis.push(parse_matrix(&mut lines, t1, t2, &name)?);
                    }
                    StructureSpec::General { constant, basis }
                }
            }
            _ => return Err(err(line_no, format!("unknown structure form in `{structure_line}`"))),
        };

        let mut options = BTreeMap::new();
        while let Some((line_no, line)) = lines.next_line() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 || tokens[0] != "option" {
                return Err(err(line_no, format!("expected `option <name> <value>`, found `{line}`")));
            }
            let value: f64 = tokens[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad option value `{}`", tokens[2])))?;
            options.insert(tokens[1].to_string(), value);
        }

        let zero_a = DMatrix::zeros(n, n);
        let zero_b = DMatrix::zeros(n, m.max(1));
        Ok(Self {
            kind,
            norm,
            n,
            m,
            p,
            a0: a0.unwrap(),
            a_basis: a_basis.into_iter().map(|b| b.unwrap_or_else(|| zero_a.clone())).collect(),
            b0,
            b_basis: if m > 0 {
                b_basis.into_iter().map(|b| b.unwrap_or_else(|| zero_b.clone())).collect()
            } else {
                Vec::new()
            },
            structure,
            options,
        })
    }

    fn write_matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
        out.push_str(name);
        out.push('\n');
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }

    /// Canonical serialization: zero parameter blocks are omitted and
    /// options appear sorted by name.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("strad-problem v1\n");
        out.push_str(&format!(
            "kind {}\n",
            match self.kind {
                PencilKind::Controllability => "controllability",
                PencilKind::Stabilizability => "stabilizability",
                PencilKind::Stability => "stability",
            }
        ));
        out.push_str(&format!(
            "norm {}\n",
            match self.norm {
                NormKind::Frobenius => "frobenius",
                NormKind::Spectral => "spectral",
            }
        ));
        out.push_str(&format!("dims {} {} {}\n", self.n, self.m, self.p));
        Self::write_matrix(&mut out, "A0", &self.a0);
        for (k, basis) in self.a_basis.iter().enumerate() {
            if basis.iter().any(|&v| v != 0.0) {
                Self::write_matrix(&mut out, &format!("A{}", k + 1), basis);
            }
        }
        if let Some(b0) = &self.b0 {
            Self::write_matrix(&mut out, "B0", b0);
            for (k, basis) in self.b_basis.iter().enumerate() {
                if basis.iter().any(|&v| v != 0.0) {
                    Self::write_matrix(&mut out, &format!("B{}", k + 1), basis);
                }
            }
        }
        match &self.structure {
            StructureSpec::Full { t1, t2 } => out.push_str(&format!("structure full {t1} {t2}\n")),
            StructureSpec::Diagonal => out.push_str("structure diagonal\n"),
            StructureSpec::Vector => out.push_str("structure vector\n"),
            StructureSpec::General { constant, basis } => {
                let (t1, t2) = basis
                    .first()
                    .map(|g| (g.nrows(), g.ncols()))
                    .unwrap_or((0, 0));
                out.push_str(&format!("structure general {t1} {t2}\n"));
                if let Some(c) = constant {
                    if c.iter().any(|&v| v != 0.0) {
                        Self::write_matrix(&mut out, "G0", c);
                    }
                }
                for (k, g) in basis.iter().enumerate() {
                    Self::write_matrix(&mut out, &format!("G{}", k + 1), g);
                }
            }
        }
        for (name, value) in &self.options {
            out.push_str(&format!("option {name} {value}\n"));
        }
        out
    }

    /// Builds the solver-facing problem.
    pub fn to_problem(&self) -> anyhow::Result<RadiusProblem> {
        let fam_a = AffineFamily::new(self.a0.clone(), self.a_basis.clone())?;
        let fam_b = match &self.b0 {
            Some(b0) => Some(AffineFamily::new(b0.clone(), self.b_basis.clone())?),
            None => None,
        };
        let map = match &self.structure {
            StructureSpec::Full { t1, t2 } => StructureMap::full(*t1, *t2)?,
            StructureSpec::Diagonal => StructureMap::diagonal(self.p)?,
            StructureSpec::Vector => StructureMap::vector(self.p)?,
            StructureSpec::General { constant, basis } => {
                let (t1, t2) = basis
                    .first()
                    .map(|g| (g.nrows(), g.ncols()))
                    .ok_or_else(|| anyhow::anyhow!("general structure needs basis blocks"))?;
                let c = constant
                    .clone()
                    .unwrap_or_else(|| DMatrix::zeros(t1, t2));
                StructureMap::general(c, basis.clone())?
            }
        };
        Ok(RadiusProblem::new(self.kind, fam_a, fam_b, map, self.norm)?)
    }
}
