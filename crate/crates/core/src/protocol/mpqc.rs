//! The full multiparty computation: sharing and verification of every input, transversal
//! Cliffords, verified ancillas, T gates through magic states, the abort check and
//! reconstruction.

use std::collections::{BTreeMap, BTreeSet};

use super::gates::{gate_teleport, vmagic};
use super::reconstruct::{reconstruct, Reconstruction};
use super::vqss::{vqss_share, vqss_share_many, vqss_verify, vqss_zero_verify};
use super::{CheaterSets, ProtocolError, Session, ShareGrid, Transcript};
use crate::adversary::{Adversary, GridRole, Injection};
use crate::backend::physical::{PairOp, SingleOp};
use crate::backend::register::Prep;
use crate::backend::{Mat2, Pauli};
use crate::circuit::{Circuit, CircuitGate, CircuitStats, Stmt};
use crate::netsim::{NetworkConfig, NodeId, Phase, ResourceLedger};

#[derive(Debug, Clone, PartialEq)]
pub enum NodeOutput {
    Value(Mat2),
    /// `⊥`: the run aborted or the owner rejected the reconstruction.
    Bottom,
}

impl NodeOutput {
    pub fn value(&self) -> Option<&Mat2> {
        match self {
            NodeOutput::Value(m) => Some(m),
            NodeOutput::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, NodeOutput::Bottom)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Output wire → (owner, output).
    pub outputs: BTreeMap<usize, (NodeId, NodeOutput)>,
    pub abort: bool,
    pub sets: CheaterSets,
    pub transcript: Transcript,
    pub ledger: ResourceLedger,
    pub digest: String,
    pub events: usize,
    pub corrupt: BTreeSet<NodeId>,
    pub injections: Vec<Injection>,
    pub reconstructions: Vec<Reconstruction>,
    pub stats: CircuitStats,
}

impl RunResult {
    /// Outputs owned by nodes outside the corrupted set.
    pub fn honest_outputs(&self) -> impl Iterator<Item = (usize, &NodeOutput)> {
        self.outputs
            .iter()
            .filter(|(_, (owner, _))| !self.corrupt.contains(owner))
            .map(|(&w, (_, o))| (w, o))
    }

    pub fn all_honest_bottom(&self) -> bool {
        self.honest_outputs().all(|(_, o)| o.is_bottom())
    }
}

fn pick_dealer(sess: &mut Session) -> NodeId {
    let mut pool = sess.trusted();
    if pool.is_empty() {
        pool = (0..sess.n).collect();
    }
    sess.net.beacon_choose(&pool)
}

fn apply_clifford(sess: &mut Session, g: &CircuitGate, wires: &BTreeMap<usize, ShareGrid>) -> Result<(), ProtocolError> {
    let grid = |w: &usize| wires[w].grid;
    let level = sess.level;
    match g {
        CircuitGate::H(w) => sess.reg.transversal(grid(w), SingleOp::H)?,
        CircuitGate::P(w) => {
            let op = sess.reg.phase_op(level, false);
            sess.reg.transversal(grid(w), op)?
        }
        CircuitGate::Pdg(w) => {
            let op = sess.reg.phase_op(level, true);
            sess.reg.transversal(grid(w), op)?
        }
        CircuitGate::X(w) => sess.reg.logical_pauli(grid(w), Pauli::X)?,
        CircuitGate::Z(w) => sess.reg.logical_pauli(grid(w), Pauli::Z)?,
        CircuitGate::Cnot(c, t) => sess.reg.transversal_pair(PairOp::Cnot, grid(c), grid(t))?,
        CircuitGate::T(_) => unreachable!("T gates are teleported"),
    }
    Ok(())
}

/// Runs the whole protocol. Input wire `w` is supplied by node `w` in state `inputs[w]`.
pub fn mpqc_run(
    config: &NetworkConfig,
    circuit: &Circuit,
    inputs: &[Prep],
    adversary: Adversary,
) -> Result<RunResult, ProtocolError> {
    let stats = circuit.validate_and_stats(config.n)?;
    if inputs.len() != circuit.inputs {
        return Err(ProtocolError::Config(format!(
            "circuit has {} inputs but {} states were given",
            circuit.inputs,
            inputs.len()
        )));
    }
    let corrupt = adversary.corrupt().clone();
    let mut sess = Session::new(config, adversary)?;

    // sharing and verification of every input
    let jobs: Vec<_> = inputs.iter().enumerate().map(|(w, p)| (w, p.clone(), GridRole::Data)).collect();
    let shared = vqss_share_many(&mut sess, &jobs)?;
    let mut wires: BTreeMap<usize, ShareGrid> = shared.into_iter().enumerate().collect();
    for w in 0..circuit.inputs {
        let g = wires[&w];
        vqss_verify(&mut sess, &g)?;
    }
    sess.sync_b();
    if sess.sets.aborts() {
        // honest nodes swap their shares for |0⟩ and keep going through the motions
        sess.transcript.replaced_shares = true;
        for g in wires.values_mut() {
            sess.replace_with_zero(g)?;
        }
    }

    sess.net.set_phase(Phase::Computation);
    for stmt in &circuit.stmts {
        match stmt {
            Stmt::Anc(w) => {
                let dealer = pick_dealer(&mut sess);
                let g = vqss_share(&mut sess, dealer, &Prep::Zero, GridRole::Zero)?;
                vqss_zero_verify(&mut sess, &g)?;
                wires.insert(*w, ShareGrid { role: GridRole::Data, ..g });
            }
            Stmt::Gate(CircuitGate::T(w)) => {
                let dealer = pick_dealer(&mut sess);
                let pair = vmagic(&mut sess, dealer)?;
                let (g, _) = gate_teleport(&mut sess, &wires[w], &pair)?;
                wires.insert(*w, g);
            }
            Stmt::Gate(g) => apply_clifford(&mut sess, g, &wires)?,
        }
    }

    let abort = sess.sets.aborts();
    sess.transcript.abort = abort;
    let mut outputs = BTreeMap::new();
    let mut reconstructions = Vec::new();
    if abort {
        sess.net.note("abort: |B| > t");
        for (&w, &owner) in &circuit.outputs {
            outputs.insert(w, (owner, NodeOutput::Bottom));
        }
    } else {
        sess.net.set_phase(Phase::Reconstruction);
        for (&w, &owner) in &circuit.outputs {
            let rec = reconstruct(&mut sess, &wires[&w], owner)?;
            let out = rec.density.map_or(NodeOutput::Bottom, NodeOutput::Value);
            outputs.insert(w, (owner, out));
            reconstructions.push(rec);
        }
    }

    Ok(RunResult {
        outputs,
        abort,
        digest: sess.net.digest(),
        events: sess.net.events.len(),
        ledger: sess.net.ledger.clone(),
        sets: sess.sets,
        transcript: sess.transcript,
        corrupt,
        injections: sess.adv.log,
        reconstructions,
        stats,
    })
}
