//! The module file format.
//!
//! ```text
//! file    := (blank | '#' comment | field)*          one field per line
//! field   := 'p' '=' UINT
//!          | 'r' '=' UINT
//!          | 'dims' '=' (INT ':' UINT)*
//!          | 'x' UINT '@' INT '=' row (';' row)*
//! row     := UINT+
//! ```
//!
//! `p`, `r` and `dims` appear exactly once. A record `x<i> @ <d>` is the
//! matrix of `x_i: M_d → M_{d+1}`, row-major with `dim M_{d+1}` rows of
//! `dim M_d` entries in `[0, p)`. Omitted records are zero maps.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmod::{Algebra, GradedModule};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionRecord {
    pub var: usize,
    pub degree: i32,
    pub rows: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleFile {
    pub p: u32,
    pub r: usize,
    pub components: Vec<(i32, usize)>,
    pub actions: Vec<ActionRecord>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("{what}: cannot read {tok:?}")))
}

impl ModuleFile {
    pub fn parse(text: &str) -> Result<Self> {
        let (mut p, mut r, mut comps) = (None, None, None);
        let mut actions: Vec<(usize, ActionRecord)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (key, value) = s.split_once('=').ok_or_else(|| perr(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p" | "r" | "dims" => {
                    let dup = match key {
                        "p" => p.is_some(),
                        "r" => r.is_some(),
                        _ => comps.is_some(),
                    };
                    if dup {
                        return Err(perr(line, format!("field {key} given twice")));
                    }
                    match key {
                        "p" => p = Some(parse_num::<u32>(value, line, "p")?),
                        "r" => r = Some(parse_num::<usize>(value, line, "r")?),
                        _ => {
                            let mut v = Vec::new();
                            for tok in value.split_whitespace() {
                                let (d, n) = tok
                                    .split_once(':')
                                    .ok_or_else(|| perr(line, format!("dims: expected degree:dim, got {tok:?}")))?;
                                v.push((parse_num(d, line, "degree")?, parse_num(n, line, "dim")?));
                            }
                            comps = Some((line, v));
                        }
                    }
                }
                _ => {
                    let rest = key
                        .strip_prefix('x')
                        .ok_or_else(|| perr(line, format!("unknown field {key:?}")))?;
                    let (i, d) = rest
                        .split_once('@')
                        .ok_or_else(|| perr(line, "action record needs `x<i> @ <degree>`"))?;
                    let rows = value
                        .split(';')
                        .map(|row| {
                            row.split_whitespace()
                                .map(|t| parse_num::<u32>(t, line, "entry"))
                                .collect::<Result<Vec<u32>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    actions.push((
                        line,
                        ActionRecord {
                            var: parse_num(i.trim(), line, "variable index")?,
                            degree: parse_num(d.trim(), line, "degree")?,
                            rows,
                        },
                    ));
                }
            }
        }
        let end = text.lines().count().max(1);
        let p = p.ok_or_else(|| perr(end, "missing field p"))?;
        let r = r.ok_or_else(|| perr(end, "missing field r"))?;
        let (dims_line, components) = comps.ok_or_else(|| perr(end, "missing field dims"))?;
        if components.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(perr(dims_line, "dims: degrees must be strictly increasing"));
        }
        let dim: BTreeMap<i32, usize> = components.iter().copied().collect();
        let dim_at = |d: i32| dim.get(&d).copied().unwrap_or(0);
        let mut seen = Vec::new();
        for (line, a) in &actions {
            if a.var > r {
                return Err(perr(*line, format!("variable x{} out of range for r = {r}", a.var)));
            }
            if seen.contains(&(a.var, a.degree)) {
                return Err(perr(*line, format!("x{} @ {} given twice", a.var, a.degree)));
            }
            seen.push((a.var, a.degree));
            let (rows, cols) = (dim_at(a.degree + 1), dim_at(a.degree));
            if rows == 0 || cols == 0 {
                return Err(perr(*line, format!("x{} @ {} acts between a zero space", a.var, a.degree)));
            }
            if a.rows.len() != rows || a.rows.iter().any(|row| row.len() != cols) {
                return Err(perr(
                    *line,
                    format!("x{} @ {}: expected {rows} rows of {cols} entries", a.var, a.degree),
                ));
            }
            if let Some(&e) = a.rows.iter().flatten().find(|&&e| e >= p) {
                return Err(perr(*line, format!("entry {e} is not in [0, {p})")));
            }
        }
        Ok(ModuleFile {
            p,
            r,
            components,
            actions: actions.into_iter().map(|(_, a)| a).collect(),
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p = {}", self.p);
        let _ = writeln!(out, "r = {}", self.r);
        let dims: Vec<String> = self.components.iter().map(|(d, n)| format!("{d}:{n}")).collect();
        if dims.is_empty() {
            out.push_str("dims =\n");
        } else {
            let _ = writeln!(out, "dims = {}", dims.join(" "));
        }
        for a in &self.actions {
            let rows: Vec<String> = a
                .rows
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            let _ = writeln!(out, "x{} @ {} = {}", a.var, a.degree, rows.join("; "));
        }
        out
    }

    /// The canonical file: every degree of the window, nonzero blocks only,
    /// ordered by variable then degree.
    pub fn from_module(m: &GradedModule) -> Self {
        let alg = m.algebra();
        let components = m.dims_by_degree();
        let mut actions = Vec::new();
        for i in 0..alg.nvars() {
            for d in m.degrees() {
                let a = m.action(i, d);
                if a.rows() == 0 || a.cols() == 0 || a.is_zero() {
                    continue;
                }
                actions.push(ActionRecord {
                    var: i,
                    degree: d,
                    rows: (0..a.rows()).map(|k| a.row(k).to_vec()).collect(),
                });
            }
        }
        ModuleFile {
            p: alg.p(),
            r: alg.r(),
            components,
            actions,
        }
    }

    /// Build and validate the module.
    pub fn to_module(&self) -> Result<GradedModule> {
        let alg = Algebra::new(self.r, self.p).map_err(|e| Error::InvalidModule(e.to_string()))?;
        let Some(&(lo, _)) = self.components.first() else {
            return Ok(GradedModule::zero(alg));
        };
        let hi = self.components.last().unwrap().0;
        let dim: BTreeMap<i32, usize> = self.components.iter().copied().collect();
        let dims: Vec<usize> = (lo..=hi).map(|d| dim.get(&d).copied().unwrap_or(0)).collect();
        let actions: HashMap<(usize, i32), Matrix> = self
            .actions
            .iter()
            .map(|a| {
                let rows: Vec<Vec<i64>> = a.rows.iter().map(|r| r.iter().map(|&e| e as i64).collect()).collect();
                ((a.var, a.degree), Matrix::from_rows(self.p, &rows))
            })
            .collect();
        let m = GradedModule::from_parts(alg, lo, dims, actions)?;
        let v = m.validate();
        if !v.is_valid() {
            let mut msgs = v.shape_errors.clone();
            for w in &v.violations {
                msgs.push(if w.i == w.j {
                    format!("x{}² ≠ 0 on degree {}", w.i, w.d)
                } else {
                    format!("x{0}x{1} + x{1}x{0} ≠ 0 on degree {2}", w.i, w.j, w.d)
                });
            }
            return Err(Error::InvalidModule(msgs.join("; ")));
        }
        Ok(m)
    }
}
