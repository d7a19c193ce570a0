//! Synchronous n-node network: slot ownership, two-phase message rounds, authenticated
//! broadcast, a public beacon, and resource accounting.
//!
//! Sends leave the sender immediately but only arrive at the next [`Network::deliver_round`],
//! so a node's workspace counts what it holds between rounds, never a message in flight.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::physical::GridId;
use crate::backend::BackendKind;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("node {node} would hold {live} qubits, above the workspace bound {bound}")]
    WorkspaceExceeded { node: NodeId, live: usize, bound: usize },
    #[error("slot {0:?} is not allocated")]
    UnknownSlot(SlotRef),
    #[error("node {node} does not own slot {slot:?}")]
    NotOwner { node: NodeId, slot: SlotRef },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n: usize,
    pub s: usize,
    /// Name of the CSS code (e.g. `steane`).
    pub code: String,
    pub seed: u64,
    pub backend: BackendKind,
    /// Encoding depth: 2 for the full protocol, 1 for the single-level variant.
    pub level: u32,
    /// Fail the run when a node's live slots would exceed this bound.
    pub workspace_bound: Option<usize>,
}

impl NetworkConfig {
    pub fn new(n: usize, s: usize, seed: u64, backend: BackendKind) -> Self {
        Self { n, s, code: "steane".into(), seed, backend, level: 2, workspace_bound: None }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.n < 4 {
            return Err(NetError::InvalidConfig(format!("n = {} < 4", self.n)));
        }
        if self.s < 1 {
            return Err(NetError::InvalidConfig("s must be at least 1".into()));
        }
        if !(1..=2).contains(&self.level) {
            return Err(NetError::InvalidConfig(format!("level {} not in 1..=2", self.level)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Sharing,
    Computation,
    Reconstruction,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Sharing, Phase::Computation, Phase::Reconstruction];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Sharing => "sharing",
            Phase::Computation => "computation",
            Phase::Reconstruction => "reconstruction",
        }
    }
}

/// A physical qubit: slot `slot` of grid `grid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub grid: GridId,
    pub slot: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub sent: Vec<u64>,
    pub workspace_hwm: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub sent: Vec<u64>,
    pub received: Vec<u64>,
    pub workspace_hwm: Vec<usize>,
    pub per_phase: BTreeMap<Phase, PhaseStats>,
    pub broadcast_bits: u64,
}

impl ResourceLedger {
    fn new(n: usize) -> Self {
        let per_phase = Phase::ALL
            .iter()
            .map(|&p| (p, PhaseStats { sent: vec![0; n], workspace_hwm: vec![0; n] }))
            .collect();
        Self {
            sent: vec![0; n],
            received: vec![0; n],
            workspace_hwm: vec![0; n],
            per_phase,
            broadcast_bits: 0,
        }
    }

    pub fn max_hwm(&self) -> usize {
        self.workspace_hwm.iter().copied().max().unwrap_or(0)
    }

    pub fn max_sent(&self) -> u64 {
        self.sent.iter().copied().max().unwrap_or(0)
    }

    pub fn phase(&self, p: Phase) -> &PhaseStats {
        &self.per_phase[&p]
    }
}

/// Public random stream; every draw is logged.
#[derive(Debug, Clone)]
pub struct Beacon {
    rng: ChaCha8Rng,
    pub log: Vec<u64>,
}

impl Beacon {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), log: Vec::new() }
    }

    /// Uniform value in `0..range`.
    pub fn draw(&mut self, range: u64) -> u64 {
        let v = self.rng.gen_range(0..range);
        self.log.push(v);
        v
    }

    pub fn bit(&mut self) -> bool {
        self.draw(2) == 1
    }

    /// Uniform element of a non-empty set.
    pub fn choose(&mut self, from: &BTreeSet<NodeId>) -> NodeId {
        let v: Vec<NodeId> = from.iter().copied().collect();
        v[self.draw(v.len() as u64) as usize]
    }

    /// Uniform `k`-subset (partial Fisher–Yates).
    pub fn subset(&mut self, from: &BTreeSet<NodeId>, k: usize) -> BTreeSet<NodeId> {
        let mut v: Vec<NodeId> = from.iter().copied().collect();
        let k = k.min(v.len());
        for i in 0..k {
            let j = i + self.draw((v.len() - i) as u64) as usize;
            v.swap(i, j);
        }
        v.into_iter().take(k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Phase { phase: Phase },
    Send { from: NodeId, to: NodeId, grid: GridId, slot: usize },
    Round { delivered: usize },
    Broadcast { from: NodeId, bits: Vec<u8> },
    Beacon { value: u64 },
    Note { text: String },
}

#[derive(Debug, Clone)]
pub struct Network {
    pub n: usize,
    owner: HashMap<SlotRef, NodeId>,
    in_flight: Vec<(SlotRef, NodeId, NodeId)>,
    live: Vec<usize>,
    bound: Option<usize>,
    phase: Phase,
    pub ledger: ResourceLedger,
    pub beacon: Beacon,
    pub events: Vec<Event>,
    /// Every node's view of the broadcast channel (identical by construction).
    pub broadcasts: Vec<(NodeId, Vec<u8>)>,
}

impl Network {
    pub fn new(n: usize, beacon_seed: u64, workspace_bound: Option<usize>) -> Self {
        Self {
            n,
            owner: HashMap::new(),
            in_flight: Vec::new(),
            live: vec![0; n],
            bound: workspace_bound,
            phase: Phase::Sharing,
            ledger: ResourceLedger::new(n),
            beacon: Beacon::new(beacon_seed),
            events: vec![Event::Phase { phase: Phase::Sharing }],
            broadcasts: Vec::new(),
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, p: Phase) {
        self.phase = p;
        self.events.push(Event::Phase { phase: p });
    }

    pub fn live(&self, node: NodeId) -> usize {
        self.live[node]
    }

    pub fn owner(&self, slot: SlotRef) -> Option<NodeId> {
        self.owner.get(&slot).copied()
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.len()
    }

    fn bump(&mut self, node: NodeId) -> Result<(), NetError> {
        let live = self.live[node] + 1;
        if let Some(bound) = self.bound {
            if live > bound {
                return Err(NetError::WorkspaceExceeded { node, live, bound });
            }
        }
        self.live[node] = live;
        let hwm = &mut self.ledger.workspace_hwm[node];
        *hwm = (*hwm).max(live);
        let ph = self.ledger.per_phase.get_mut(&self.phase).unwrap();
        ph.workspace_hwm[node] = ph.workspace_hwm[node].max(live);
        Ok(())
    }

    /// A fresh qubit appears in `node`'s workspace.
    pub fn create(&mut self, node: NodeId, slot: SlotRef) -> Result<(), NetError> {
        self.bump(node)?;
        self.owner.insert(slot, node);
        Ok(())
    }

    /// A qubit leaves the workspace (measured or discarded).
    pub fn destroy(&mut self, slot: SlotRef) -> Result<(), NetError> {
        let node = self.owner.remove(&slot).ok_or(NetError::UnknownSlot(slot))?;
        self.live[node] -= 1;
        Ok(())
    }

    pub fn send(&mut self, from: NodeId, to: NodeId, slot: SlotRef) -> Result<(), NetError> {
        match self.owner.get(&slot) {
            None => return Err(NetError::UnknownSlot(slot)),
            Some(&o) if o != from => return Err(NetError::NotOwner { node: from, slot }),
            _ => {}
        }
        self.owner.remove(&slot);
        self.live[from] -= 1;
        self.ledger.sent[from] += 1;
        self.ledger.per_phase.get_mut(&self.phase).unwrap().sent[from] += 1;
        self.in_flight.push((slot, from, to));
        self.events.push(Event::Send { from, to, grid: slot.grid, slot: slot.slot });
        Ok(())
    }

    /// Delivers every in-flight qubit; returns `(slot, from, to)` in send order.
    pub fn deliver_round(&mut self) -> Result<Vec<(SlotRef, NodeId, NodeId)>, NetError> {
        let batch = std::mem::take(&mut self.in_flight);
        for &(slot, _, to) in &batch {
            self.bump(to)?;
            self.owner.insert(slot, to);
            self.ledger.received[to] += 1;
        }
        self.events.push(Event::Round { delivered: batch.len() });
        Ok(batch)
    }

    /// Appends the same bits to every node's view.
    pub fn broadcast(&mut self, from: NodeId, bits: Vec<u8>) {
        self.ledger.broadcast_bits += bits.len() as u64;
        self.events.push(Event::Broadcast { from, bits: bits.clone() });
        self.broadcasts.push((from, bits));
    }

    pub fn beacon_draw(&mut self, range: u64) -> u64 {
        let v = self.beacon.draw(range);
        self.events.push(Event::Beacon { value: v });
        v
    }

    pub fn beacon_bit(&mut self) -> bool {
        self.beacon_draw(2) == 1
    }

    pub fn beacon_choose(&mut self, from: &BTreeSet<NodeId>) -> NodeId {
        let before = self.beacon.log.len();
        let v = self.beacon.choose(from);
        self.log_beacon_since(before);
        v
    }

    pub fn beacon_subset(&mut self, from: &BTreeSet<NodeId>, k: usize) -> BTreeSet<NodeId> {
        let before = self.beacon.log.len();
        let v = self.beacon.subset(from, k);
        self.log_beacon_since(before);
        v
    }

    fn log_beacon_since(&mut self, before: usize) {
        for &value in &self.beacon.log[before..] {
            self.events.push(Event::Beacon { value });
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.events.push(Event::Note { text: text.into() });
    }

    /// SHA-256 over the JSON encoding of the event log.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.events {
            h.update(serde_json::to_vec(e).expect("event serialises"));
        }
        hex(&h.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Measured value next to the closed-form bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaRow {
    pub quantity: String,
    pub measured: f64,
    pub formula: String,
    pub formula_value: f64,
    pub within: bool,
}

/// Side-by-side comparison of a run's ledger with the closed-form resource bounds.
pub fn ledger_report(ledger: &ResourceLedger, n: usize, s: usize) -> Vec<FormulaRow> {
    let (nf, sf) = (n as f64, s as f64);
    let sharing = ledger.phase(Phase::Sharing);
    let sharing_sent = sharing.sent.iter().copied().max().unwrap_or(0) as f64;
    let sharing_hwm = sharing.workspace_hwm.iter().copied().max().unwrap_or(0) as f64;
    let row = |q: &str, m: f64, f: &str, v: f64| FormulaRow {
        quantity: q.into(),
        measured: m,
        formula: f.into(),
        formula_value: v,
        within: m <= v,
    };
    vec![
        row("workspace per node", ledger.max_hwm() as f64, "n^2 + 4n", nf * nf + 4.0 * nf),
        row("sharing-phase workspace per node", sharing_hwm, "n^2 + 2n", nf * nf + 2.0 * nf),
        row("sharing-phase qubits sent per node", sharing_sent, "(n+1)ns^2", (nf + 1.0) * nf * sf * sf),
    ]
}

/// CSV with columns `n,s,phase,qubits_sent,workspace_hwm,formula_value`.
pub fn ledger_csv(rows: &[(usize, usize, &ResourceLedger)]) -> String {
    let mut out = String::from("n,s,phase,qubits_sent,workspace_hwm,formula_value\n");
    for &(n, s, ledger) in rows {
        let (nf, sf) = (n as f64, s as f64);
        for p in Phase::ALL {
            let st = ledger.phase(p);
            let sent = st.sent.iter().copied().max().unwrap_or(0);
            let hwm = st.workspace_hwm.iter().copied().max().unwrap_or(0);
            let formula = match p {
                Phase::Sharing => (nf + 1.0) * nf * sf * sf,
                _ => nf * nf + 4.0 * nf,
            };
            out.push_str(&format!("{n},{s},{},{sent},{hwm},{formula}\n", p.name()));
        }
        out.push_str(&format!(
            "{n},{s},total,{},{},{}\n",
            ledger.max_sent(),
            ledger.max_hwm(),
            nf * nf + 4.0 * nf
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slot(g: usize, s: usize) -> SlotRef {
        SlotRef { grid: g, slot: s }
    }

    #[test]
    fn transfer_counts_sender_and_moves_slot() {
        let mut net = Network::new(4, 0, None);
        net.create(1, slot(0, 0)).unwrap();
        net.send(1, 2, slot(0, 0)).unwrap();
        assert_eq!(net.ledger.sent[1], 1);
        assert_eq!(net.live(1), 0);
        assert_eq!(net.live(2), 0);
        let d = net.deliver_round().unwrap();
        assert_eq!(d, vec![(slot(0, 0), 1, 2)]);
        assert_eq!(net.owner(slot(0, 0)), Some(2));
        assert_eq!(net.ledger.workspace_hwm[2], 1);
        assert_eq!(net.ledger.sent.iter().sum::<u64>(), net.ledger.received.iter().sum::<u64>());
    }

    #[test]
    fn workspace_enforcement() {
        let mut net = Network::new(4, 0, Some(1));
        net.create(0, slot(0, 0)).unwrap();
        assert!(matches!(net.create(0, slot(0, 1)), Err(NetError::WorkspaceExceeded { .. })));
        assert!(matches!(net.send(1, 0, slot(0, 0)), Err(NetError::NotOwner { .. })));
    }

    #[test]
    fn broadcast_is_consistent() {
        let mut net = Network::new(4, 0, None);
        net.broadcast(3, vec![1, 0, 1]);
        assert_eq!(net.broadcasts, vec![(3, vec![1, 0, 1])]);
        assert_eq!(net.ledger.broadcast_bits, 3);
    }

    #[test]
    fn beacon_replays() {
        let mut a = Beacon::new(7);
        let mut b = Beacon::new(7);
        let xs: Vec<u64> = (0..50).map(|_| a.draw(10)).collect();
        let ys: Vec<u64> = (0..50).map(|_| b.draw(10)).collect();
        assert_eq!(xs, ys);
        let from: BTreeSet<usize> = (0..7).collect();
        let sub = a.subset(&from, 5);
        assert_eq!(sub.len(), 5);
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(3, 1, 0, BackendKind::Frame).validate().is_err());
        let mut c = NetworkConfig::new(7, 1, 0, BackendKind::Frame);
        assert!(c.validate().is_ok());
        c.s = 0;
        assert!(c.validate().is_err());
    }
}
