//! Protocol state machines: verifiable sharing, gate teleportation, magic-state
//! verification, the full multiparty computation and reconstruction.
//!
//! Everything runs inside a [`Session`], which owns the quantum register, the network
//! (ownership, messages, broadcast, beacon, accounting), the adversary and the public
//! apparent-cheater sets.

mod gates;
mod mpqc;
mod reconstruct;
mod vqss;

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::{Adversary, EncodeAct, GridRole, HookCtx};
use crate::backend::physical::{logical_support, GridId, SingleOp};
use crate::backend::register::{Prep, QuantumRegister, DEFAULT_TABLEAU_CAPACITY};
use crate::backend::{BackendError, MeasRng, Pauli};
use crate::circuit::CircuitError;
use crate::css::{CssCode, CssError};
use crate::gf2::{Bits, DoubleDecode, DoubleStatus};
use crate::netsim::{NetError, Network, NetworkConfig, NodeId, SlotRef};

pub use gates::{gate_teleport, vmagic, MagicPair};
pub use mpqc::{mpqc_run, NodeOutput, RunResult};
pub use reconstruct::{reconstruct, Reconstruction};
pub use vqss::{vqss_share, vqss_share_many, vqss_verify, vqss_zero_verify, VerifyReport};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("configuration error: {0}")]
    Config(String),
}

/// One encoded grid and the dealer that created it. Slot `ℓ·n + j` (level 2) or `j`
/// (level 1) is held by node `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShareGrid {
    pub dealer: NodeId,
    pub grid: GridId,
    pub role: GridRole,
    pub level: u32,
}

/// Readout basis of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Z,
    X,
}

/// Public apparent-cheater bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheaterSets {
    pub n: usize,
    pub t: usize,
    /// `B_{i,ℓ}`: dealer → block → positions with second-level errors.
    pub blocks: BTreeMap<NodeId, BTreeMap<usize, BTreeSet<usize>>>,
    /// `B_i`: dealer → apparent cheaters found on the dealer's grids.
    pub dealers: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// `B = ∪ B_i`.
    pub global: BTreeSet<NodeId>,
    /// `B̃_{i,j}` built during reconstruction.
    pub recon: BTreeMap<NodeId, BTreeMap<usize, BTreeSet<usize>>>,
}

impl CheaterSets {
    pub fn new(n: usize, t: usize) -> Self {
        Self {
            n,
            t,
            blocks: BTreeMap::new(),
            dealers: BTreeMap::new(),
            global: BTreeSet::new(),
            recon: BTreeMap::new(),
        }
    }

    pub fn dealer_set(&self, dealer: NodeId) -> BTreeSet<NodeId> {
        self.dealers.get(&dealer).cloned().unwrap_or_default()
    }

    pub fn block_set(&self, dealer: NodeId, block: usize) -> BTreeSet<usize> {
        self.blocks.get(&dealer).and_then(|b| b.get(&block)).cloned().unwrap_or_default()
    }

    pub fn add_apparent(&mut self, dealer: NodeId, node: NodeId) {
        self.dealers.entry(dealer).or_default().insert(node);
        self.global.insert(node);
    }

    /// `B = [n]`, attributed to `dealer`.
    pub fn set_all(&mut self, dealer: NodeId) {
        for j in 0..self.n {
            self.add_apparent(dealer, j);
        }
    }

    /// Merges a decoded readout of one of `dealer`'s grids.
    pub fn record_decode(&mut self, dealer: NodeId, d: &DoubleDecode) {
        for (&block, pos) in &d.second_level {
            let set = self.blocks.entry(dealer).or_default().entry(block).or_default();
            set.extend(pos.iter().copied());
            if set.len() > self.t {
                self.add_apparent(dealer, block);
            }
        }
        for &p in &d.first_level {
            self.add_apparent(dealer, p);
        }
        match &d.status {
            DoubleStatus::Ok => {}
            DoubleStatus::UncorrectableLevel2(blocks) => {
                for &b in blocks {
                    self.add_apparent(dealer, b);
                }
            }
            DoubleStatus::UncorrectableLevel1 => self.set_all(dealer),
        }
    }

    pub fn dealer_failed(&self, dealer: NodeId) -> bool {
        self.dealers.get(&dealer).is_some_and(|s| s.len() > self.t)
    }

    pub fn aborts(&self) -> bool {
        self.global.len() > self.t
    }

    /// `B = ∪ B_i`.
    pub fn is_consistent(&self) -> bool {
        let union: BTreeSet<NodeId> = self.dealers.values().flatten().copied().collect();
        union == self.global
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodedValue {
    pub label: String,
    pub dealer: NodeId,
    pub value: u8,
}

/// Protocol-level record of a run; message-level events live in the network log.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub abort: bool,
    pub verdicts: Vec<VerifyReport>,
    pub decoded: Vec<DecodedValue>,
    /// Snapshot of `B` after every change.
    pub b_history: Vec<BTreeSet<NodeId>>,
    /// Shares were replaced by `|0⟩` after a failed sharing phase.
    pub replaced_shares: bool,
    /// Output owners whose reconstruction was rejected.
    pub rejections: Vec<NodeId>,
}

pub struct Session {
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub level: u32,
    pub code: CssCode,
    pub reg: QuantumRegister,
    pub net: Network,
    pub adv: Adversary,
    pub rng: MeasRng,
    pub sets: CheaterSets,
    pub transcript: Transcript,
}

/// Resolves a code name from a configuration.
pub fn code_by_name(name: &str) -> Result<CssCode, ProtocolError> {
    match name {
        "steane" => Ok(CssCode::steane()),
        // otherwise a code description file for V, used with W = V
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ProtocolError::Config(format!("unknown code {path:?}: {e}")))?;
            let v = crate::gf2::BinaryCode::parse(&text).map_err(|e| ProtocolError::Config(e.to_string()))?;
            Ok(CssCode::new(v.clone(), v)?)
        }
    }
}

impl Session {
    pub fn new(config: &NetworkConfig, adv: Adversary) -> Result<Self, ProtocolError> {
        config.validate()?;
        let code = code_by_name(&config.code)?;
        if code.n() != config.n {
            return Err(ProtocolError::Config(format!(
                "code {} has length {} but n = {}",
                config.code,
                code.n(),
                config.n
            )));
        }
        let slots = config.n.pow(config.level);
        // enough for n data grids, four live grids and a syndrome ancilla
        let capacity = DEFAULT_TABLEAU_CAPACITY.max((config.n + 5) * slots + 8);
        let reg = QuantumRegister::with_tableau_capacity(config.backend, code.clone(), capacity);
        let beacon_seed = config.seed ^ 0x9e37_79b9_7f4a_7c15;
        Ok(Self {
            n: config.n,
            t: code.t(),
            s: config.s,
            level: config.level,
            reg,
            net: Network::new(config.n, beacon_seed, config.workspace_bound),
            adv,
            rng: MeasRng::seed_from_u64(config.seed),
            sets: CheaterSets::new(config.n, code.t()),
            transcript: Transcript::default(),
            code,
        })
    }

    /// Physical slots per grid.
    pub fn slots(&self) -> usize {
        self.n.pow(self.level)
    }

    pub fn holder(&self, slot: usize) -> NodeId {
        slot % self.n
    }

    pub(crate) fn ctx(&self, node: NodeId, g: &ShareGrid) -> HookCtx {
        HookCtx { phase: self.net.phase(), n: self.n, node, dealer: g.dealer, grid: g.grid, role: g.role }
    }

    /// Applies `p` to first-level position `pos`: a logical Pauli on block `pos` at level 2,
    /// a physical one on slot `pos` at level 1.
    pub(crate) fn apply_first_level(&mut self, g: &ShareGrid, pos: usize, p: Pauli) -> Result<(), ProtocolError> {
        if g.level == 1 {
            self.reg.inject(g.grid, pos, p)?;
            return Ok(());
        }
        for part in [Pauli::X, Pauli::Z] {
            if (part == Pauli::X && p.x()) || (part == Pauli::Z && p.z()) {
                for s in logical_support(&self.code, part, g.level - 1) {
                    self.reg.inject(g.grid, pos * self.n.pow(g.level - 1) + s, part)?;
                }
            }
        }
        Ok(())
    }

    /// Applies the hook result of an encoding act.
    pub(crate) fn encode_hook(&mut self, node: NodeId, g: &ShareGrid, act: EncodeAct) -> Result<(), ProtocolError> {
        let ctx = self.ctx(node, g);
        for (pos, p) in self.adv.on_dealer_encode(&ctx, act) {
            self.apply_first_level(g, pos, p)?;
        }
        Ok(())
    }

    /// Applies an adversarial Pauli to a slot; slots past the grid are the first-level
    /// qubits in transit during sharing.
    fn hook_pauli(&mut self, g: &ShareGrid, slot: usize, p: Pauli) -> Result<(), ProtocolError> {
        if slot >= self.slots() {
            self.apply_first_level(g, slot - self.slots(), p)
        } else {
            self.reg.inject(g.grid, slot, p).map_err(Into::into)
        }
    }

    /// Sends a slot between nodes, running the adversary's send hook.
    pub(crate) fn send_slot(&mut self, g: &ShareGrid, slot: usize, from: NodeId, to: NodeId) -> Result<(), ProtocolError> {
        let ctx = self.ctx(from, g);
        if let Some(p) = self.adv.on_send_qubit(&ctx, slot) {
            self.hook_pauli(g, slot, p)?;
        }
        self.net.send(from, to, SlotRef { grid: g.grid, slot })?;
        Ok(())
    }

    /// Delivers the pending round; receive hooks run for slots of `grids` when `hooks`.
    pub(crate) fn deliver(&mut self, grids: &[ShareGrid], hooks: bool) -> Result<(), ProtocolError> {
        let batch = self.net.deliver_round()?;
        if !hooks {
            return Ok(());
        }
        for (slot, _, to) in batch {
            let Some(g) = grids.iter().find(|g| g.grid == slot.grid).copied() else {
                continue;
            };
            let ctx = self.ctx(to, &g);
            if let Some(p) = self.adv.on_receive_qubit(&ctx, slot.slot) {
                self.hook_pauli(&g, slot.slot, p)?;
            }
        }
        Ok(())
    }

    /// Measures a grid, has every node broadcast the bits of the slots it holds (the
    /// adversary may lie) and returns the publicly agreed readout in slot order.
    pub fn measure_and_broadcast(&mut self, g: &ShareGrid, basis: Basis) -> Result<Vec<u8>, ProtocolError> {
        if basis == Basis::X {
            self.reg.transversal(g.grid, SingleOp::H)?;
        }
        let bits = self.reg.measure_z(g.grid, &mut self.rng)?;
        let mut public = bits.clone();
        for j in 0..self.n {
            let idx: Vec<usize> = (0..bits.len()).filter(|&s| self.holder(s) == j).collect();
            let mut mine: Vec<u8> = idx.iter().map(|&s| bits[s]).collect();
            let ctx = self.ctx(j, g);
            self.adv.on_broadcast(&ctx, &mut mine);
            for (&s, &b) in idx.iter().zip(&mine) {
                public[s] = b;
            }
            self.net.broadcast(j, mine);
        }
        for slot in 0..bits.len() {
            self.net.destroy(SlotRef { grid: g.grid, slot })?;
        }
        Ok(public)
    }

    /// Decodes a public readout against `V` (Z basis) or `W` (X basis).
    pub fn decode(&self, bits: &[u8], basis: Basis, level: u32) -> DoubleDecode {
        let coset = match basis {
            Basis::Z => self.code.z_values(),
            Basis::X => self.code.x_values(),
        };
        let n = self.n;
        match level {
            1 => coset.single_decode(&Bits::from_fn(n, |i| bits[i] == 1)),
            _ => {
                let blocks: Vec<Bits> =
                    (0..n).map(|l| Bits::from_fn(n, |j| bits[l * n + j] == 1)).collect();
                coset.double_decode(&blocks)
            }
        }
    }

    /// Records the current `B` in the transcript when it changed.
    pub(crate) fn sync_b(&mut self) {
        if self.transcript.b_history.last() != Some(&self.sets.global) {
            self.transcript.b_history.push(self.sets.global.clone());
            let b: Vec<String> = self.sets.global.iter().map(|j| j.to_string()).collect();
            self.net.note(format!("B = {{{}}}", b.join(",")));
        }
    }

    /// Nodes outside `B`.
    pub fn trusted(&self) -> BTreeSet<NodeId> {
        (0..self.n).filter(|j| !self.sets.global.contains(j)).collect()
    }

    /// Replaces a grid by a fresh `|0⟩` grid held by the same nodes, keeping its id in the
    /// caller's bookkeeping up to date.
    pub(crate) fn replace_with_zero(&mut self, g: &mut ShareGrid) -> Result<(), ProtocolError> {
        self.reg.measure_z(g.grid, &mut self.rng)?;
        let fresh = self.reg.prepare(&Prep::Zero, g.level)?;
        for slot in 0..self.slots() {
            self.net.destroy(SlotRef { grid: g.grid, slot })?;
            self.net.create(self.holder(slot), SlotRef { grid: fresh, slot })?;
        }
        g.grid = fresh;
        Ok(())
    }
}
