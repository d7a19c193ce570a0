//! Text format for Clifford+T circuits.
//!
//! ```text
//! # two inputs, one CNOT
//! WIRES 2
//! CNOT 1 2
//! OUT 1 1
//! OUT 2 2
//! ```
//!
//! `WIRES k` declares input wires `1..=k` (wire `i` is supplied by node `i`), `ANC w`
//! declares wire `w` as a fresh `|0⟩` ancilla, gate lines are `H|P|PDG|X|Z|T w` or
//! `CNOT c t`, and `OUT w node` delivers wire `w` to `node`. Wires and nodes are
//! 1-based in the text and 0-based in the API.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: unknown gate {name:?}")]
    UnknownGate { line: usize, col: usize, name: String },
    #[error("line {line}, column {col}: wire {wire} is not declared")]
    WireOutOfRange { line: usize, col: usize, wire: usize },
    #[error("line {line}, column {col}: wire {wire} is used before its ANC declaration")]
    UseBeforeDeclare { line: usize, col: usize, wire: usize },
    #[error("line {line}: wire {wire} already has an output")]
    DuplicateOutput { line: usize, wire: usize },
    #[error("circuit needs {needed} input nodes but the network has {n}")]
    TooManyInputs { needed: usize, n: usize },
    #[error("wire {wire} is delivered to node {node}, outside 1..={n}")]
    NodeOutOfRange { wire: usize, node: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CircuitGate {
    H(usize),
    P(usize),
    Pdg(usize),
    X(usize),
    Z(usize),
    T(usize),
    Cnot(usize, usize),
}

impl CircuitGate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            CircuitGate::H(w)
            | CircuitGate::P(w)
            | CircuitGate::Pdg(w)
            | CircuitGate::X(w)
            | CircuitGate::Z(w)
            | CircuitGate::T(w) => vec![w],
            CircuitGate::Cnot(a, b) => vec![a, b],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CircuitGate::H(_) => "H",
            CircuitGate::P(_) => "P",
            CircuitGate::Pdg(_) => "PDG",
            CircuitGate::X(_) => "X",
            CircuitGate::Z(_) => "Z",
            CircuitGate::T(_) => "T",
            CircuitGate::Cnot(_, _) => "CNOT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stmt {
    Anc(usize),
    Gate(CircuitGate),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Circuit {
    /// Number of input wires (`0..inputs`).
    pub inputs: usize,
    /// Statements in program order.
    pub stmts: Vec<Stmt>,
    /// Wire → receiving node.
    pub outputs: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub t_count: usize,
    pub ancillas: usize,
    pub depth: usize,
    /// `n + #T + #ancillas`.
    pub kappa: usize,
}

impl CircuitStats {
    /// Leading-order communication expression `(n + #anc + #T)·n·s²`; multiply by a measured
    /// constant to predict qubits sent.
    pub fn communication_formula(&self, n: usize, s: usize) -> f64 {
        ((n + self.ancillas + self.t_count) * n * s * s) as f64
    }
}

fn parse_num(tok: &str, line: usize, col: usize) -> Result<usize, CircuitError> {
    tok.parse::<usize>().map_err(|_| CircuitError::SyntaxError {
        line,
        col,
        msg: format!("expected a positive integer, found {tok:?}"),
    })
}

impl Circuit {
    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        // tokens with 1-based columns
        let lines: Vec<(usize, Vec<(usize, &str)>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let mut toks = Vec::new();
                let mut start = None;
                for (c, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                    match (ch.is_whitespace(), start) {
                        (false, None) => start = Some(c),
                        (true, Some(s)) => {
                            toks.push((s + 1, &body[s..c]));
                            start = None;
                        }
                        _ => {}
                    }
                }
                (i + 1, toks)
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();

        let Some((first_line, header)) = lines.first() else {
            return Err(CircuitError::SyntaxError { line: 1, col: 1, msg: "empty circuit".into() });
        };
        if header[0].1.to_ascii_uppercase() != "WIRES" || header.len() != 2 {
            return Err(CircuitError::SyntaxError {
                line: *first_line,
                col: header[0].0,
                msg: "first statement must be `WIRES k`".into(),
            });
        }
        let inputs = parse_num(header[1].1, *first_line, header[1].0)?;

        // ancilla declarations by line, to tell "declared later" from "never declared"
        let mut anc_line: BTreeMap<usize, usize> = BTreeMap::new();
        for (line, toks) in &lines[1..] {
            if toks[0].1.eq_ignore_ascii_case("ANC") && toks.len() == 2 {
                let w = parse_num(toks[1].1, *line, toks[1].0)?;
                anc_line.entry(w).or_insert(*line);
            }
        }

        let mut declared: BTreeSet<usize> = (1..=inputs).collect();
        let mut stmts = Vec::new();
        let mut outputs = BTreeMap::new();
        for (line, toks) in &lines[1..] {
            let line = *line;
            let (col0, kw) = toks[0];
            let upper = kw.to_ascii_uppercase();
            let arity = match upper.as_str() {
                "ANC" | "H" | "P" | "PDG" | "X" | "Z" | "T" => 1,
                "CNOT" | "OUT" => 2,
                "WIRES" => {
                    return Err(CircuitError::SyntaxError { line, col: col0, msg: "duplicate WIRES".into() })
                }
                _ => return Err(CircuitError::UnknownGate { line, col: col0, name: kw.to_string() }),
            };
            if toks.len() != arity + 1 {
                return Err(CircuitError::SyntaxError {
                    line,
                    col: col0,
                    msg: format!("{upper} takes {arity} argument(s), found {}", toks.len() - 1),
                });
            }
            let args: Vec<(usize, usize)> = toks[1..]
                .iter()
                .map(|&(c, t)| parse_num(t, line, c).map(|v| (c, v)))
                .collect::<Result<_, _>>()?;
            let check_wire = |(col, w): (usize, usize), declared: &BTreeSet<usize>| {
                if declared.contains(&w) {
                    Ok(w - 1)
                } else if anc_line.get(&w).is_some_and(|&l| l > line) {
                    Err(CircuitError::UseBeforeDeclare { line, col, wire: w })
                } else {
                    Err(CircuitError::WireOutOfRange { line, col, wire: w })
                }
            };
            match upper.as_str() {
                "ANC" => {
                    let (col, w) = args[0];
                    if w == 0 || declared.contains(&w) {
                        return Err(CircuitError::SyntaxError {
                            line,
                            col,
                            msg: format!("wire {w} is already declared"),
                        });
                    }
                    declared.insert(w);
                    stmts.push(Stmt::Anc(w - 1));
                }
                "OUT" => {
                    let w = check_wire(args[0], &declared)?;
                    let (ncol, node) = args[1];
                    if node == 0 {
                        return Err(CircuitError::SyntaxError { line, col: ncol, msg: "nodes are 1-based".into() });
                    }
                    if outputs.insert(w, node - 1).is_some() {
                        return Err(CircuitError::DuplicateOutput { line, wire: w + 1 });
                    }
                }
                "CNOT" => {
                    let a = check_wire(args[0], &declared)?;
                    let b = check_wire(args[1], &declared)?;
                    if a == b {
                        return Err(CircuitError::SyntaxError {
                            line,
                            col: args[1].0,
                            msg: "CNOT control and target must differ".into(),
                        });
                    }
                    stmts.push(Stmt::Gate(CircuitGate::Cnot(a, b)));
                }
                _ => {
                    let w = check_wire(args[0], &declared)?;
                    let g = match upper.as_str() {
                        "H" => CircuitGate::H(w),
                        "P" => CircuitGate::P(w),
                        "PDG" => CircuitGate::Pdg(w),
                        "X" => CircuitGate::X(w),
                        "Z" => CircuitGate::Z(w),
                        _ => CircuitGate::T(w),
                    };
                    stmts.push(Stmt::Gate(g));
                }
            }
        }
        Ok(Circuit { inputs, stmts, outputs })
    }

    pub fn gates(&self) -> impl Iterator<Item = &CircuitGate> {
        self.stmts.iter().filter_map(|s| match s {
            Stmt::Gate(g) => Some(g),
            Stmt::Anc(_) => None,
        })
    }

    pub fn ancillas(&self) -> Vec<usize> {
        self.stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Anc(w) => Some(*w),
                Stmt::Gate(_) => None,
            })
            .collect()
    }

    /// All wires: inputs then ancillas in declaration order.
    pub fn wires(&self) -> Vec<usize> {
        let mut w: Vec<usize> = (0..self.inputs).collect();
        w.extend(self.ancillas());
        w
    }

    pub fn stats(&self, n: usize) -> CircuitStats {
        let t_count = self.gates().filter(|g| matches!(g, CircuitGate::T(_))).count();
        let ancillas = self.ancillas().len();
        let mut level: BTreeMap<usize, usize> = BTreeMap::new();
        let mut depth = 0;
        for g in self.gates() {
            let ws = g.wires();
            let d = ws.iter().map(|w| level.get(w).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
            for w in ws {
                level.insert(w, d);
            }
            depth = depth.max(d);
        }
        CircuitStats { t_count, ancillas, depth, kappa: n + t_count + ancillas }
    }

    pub fn validate_and_stats(&self, n: usize) -> Result<CircuitStats, CircuitError> {
        if self.inputs > n {
            return Err(CircuitError::TooManyInputs { needed: self.inputs, n });
        }
        for (&w, &node) in &self.outputs {
            if node >= n {
                return Err(CircuitError::NodeOutOfRange { wire: w + 1, node: node + 1, n });
            }
        }
        Ok(self.stats(n))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WIRES {}", self.inputs)?;
        for s in &self.stmts {
            match s {
                Stmt::Anc(w) => writeln!(f, "ANC {}", w + 1)?,
                Stmt::Gate(g) => {
                    let ws: Vec<String> = g.wires().iter().map(|w| (w + 1).to_string()).collect();
                    writeln!(f, "{} {}", g.name(), ws.join(" "))?
                }
            }
        }
        for (w, node) in &self.outputs {
            writeln!(f, "OUT {} {}", w + 1, node + 1)?;
        }
        Ok(())
    }
}
