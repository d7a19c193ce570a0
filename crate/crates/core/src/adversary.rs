//! Non-adaptive active adversaries.
//!
//! The corrupted set is fixed before a run. The protocol calls the hooks below at every
//! touchpoint a corrupted node has; a hook sees only its [`HookCtx`] and the adversary's own
//! RNG stream, never the protocol state. Every injection is written to a ground-truth log that
//! the protocol never reads and the test oracle audits afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::backend::physical::GridId;
use crate::backend::Pauli;
use crate::netsim::{NodeId, Phase};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("unknown adversary strategy {0:?}")]
    UnknownStrategy(String),
    #[error("strategy {name} needs {needed} corrupted node(s), got {got}")]
    CorruptCount { name: String, needed: usize, got: usize },
    #[error("corrupted node {node} is outside 0..{n}")]
    NodeOutOfRange { node: NodeId, n: usize },
}

/// What a grid is for; hooks may discriminate on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridRole {
    /// Shared input of a dealer.
    Data,
    /// Verification ancilla checked in the standard basis.
    ZCheck,
    /// Verification ancilla checked in the X basis.
    XCheck,
    /// A state shared through VQSS(0): circuit ancillas and the control of a magic check.
    Zero,
    /// Magic-state grid.
    Magic,
    /// Output grid being returned to its owner.
    Output,
}

/// Where a hook fires. `node` is the corrupted node acting; `dealer` owns the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HookCtx {
    pub phase: Phase,
    pub n: usize,
    pub node: NodeId,
    pub dealer: NodeId,
    pub grid: GridId,
    pub role: GridRole,
}

/// An encoding act: the dealer's first-level encoding, or node `block`'s re-encoding of the
/// first-level qubit it received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodeAct {
    Dealer,
    Reencode { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// A physical slot of the grid.
    Slot(usize),
    /// Logical Pauli on first-level position (second-level block) `usize`.
    Block(usize),
    /// Bit `usize` of a broadcast.
    Bit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Injection {
    pub hook: &'static str,
    pub ctx: HookCtx,
    pub target: Target,
    /// `None` for flipped broadcast bits.
    pub pauli: Option<char>,
}

/// Outcome class a catalog strategy is expected to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Errors are localized to the cheaters and corrected; honest outputs are exact.
    PassCorrected,
    /// The cheating dealer fails its own verification.
    DealerCaught,
    /// More than `t` apparent cheaters; every honest output is ⊥.
    Abort,
}

/// Hook table. Defaults are no-ops; hooks only fire for corrupted nodes.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn expected(&self) -> Verdict;
    /// Number of corrupted nodes the strategy is written for.
    fn cheaters(&self) -> usize {
        1
    }

    fn on_receive_qubit(&self, _ctx: &HookCtx, _slot: usize, _c: &Cheaters, _rng: &mut dyn RngCore) -> Option<Pauli> {
        None
    }

    fn on_send_qubit(&self, _ctx: &HookCtx, _slot: usize, _c: &Cheaters, _rng: &mut dyn RngCore) -> Option<Pauli> {
        None
    }

    /// Returns indices of bits to flip in the node's broadcast.
    fn on_broadcast(&self, _ctx: &HookCtx, _bits: &[u8], _c: &Cheaters, _rng: &mut dyn RngCore) -> Vec<usize> {
        Vec::new()
    }

    /// Logical Paulis on first-level positions produced by this encoding act.
    fn on_dealer_encode(
        &self,
        _ctx: &HookCtx,
        _act: EncodeAct,
        _c: &Cheaters,
        _rng: &mut dyn RngCore,
    ) -> Vec<(usize, Pauli)> {
        Vec::new()
    }

    fn on_reconstruct_return(&self, _ctx: &HookCtx, _slot: usize, _c: &Cheaters, _rng: &mut dyn RngCore) -> Option<Pauli> {
        None
    }
}

/// The fixed corrupted set, as seen by strategies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cheaters(pub BTreeSet<NodeId>);

impl Cheaters {
    pub fn contains(&self, node: NodeId) -> bool {
        self.0.contains(&node)
    }

    /// Rank of `node` within the corrupted set.
    pub fn rank(&self, node: NodeId) -> Option<usize> {
        self.0.iter().position(|&c| c == node)
    }
}

pub struct Honest;

impl Strategy for Honest {
    fn name(&self) -> &'static str {
        "honest"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn cheaters(&self) -> usize {
        0
    }
}

/// X on every qubit received during sharing and verification.
pub struct SingleXOnShare;

impl Strategy for SingleXOnShare {
    fn name(&self) -> &'static str {
        "single-x-on-share"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn on_receive_qubit(&self, ctx: &HookCtx, _: usize, _: &Cheaters, _: &mut dyn RngCore) -> Option<Pauli> {
        (ctx.phase == Phase::Sharing).then_some(Pauli::X)
    }
}

/// Z on every qubit received in any phase and on every output share returned.
pub struct ZSpray;

impl Strategy for ZSpray {
    fn name(&self) -> &'static str {
        "z-spray"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn on_receive_qubit(&self, _: &HookCtx, _: usize, _: &Cheaters, _: &mut dyn RngCore) -> Option<Pauli> {
        Some(Pauli::Z)
    }
    fn on_reconstruct_return(&self, _: &HookCtx, _: usize, _: &Cheaters, _: &mut dyn RngCore) -> Option<Pauli> {
        Some(Pauli::Z)
    }
}

/// Flips one uniformly chosen bit of each of its broadcasts.
pub struct LieOnBroadcast;

impl Strategy for LieOnBroadcast {
    fn name(&self) -> &'static str {
        "lie-on-broadcast"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn on_broadcast(&self, _: &HookCtx, bits: &[u8], _: &Cheaters, rng: &mut dyn RngCore) -> Vec<usize> {
        if bits.is_empty() {
            return Vec::new();
        }
        vec![rng.gen_range(0..bits.len())]
    }
}

/// Uniformly random non-identity Pauli on every share returned for reconstruction.
pub struct CorruptBeforeReconstruct;

impl Strategy for CorruptBeforeReconstruct {
    fn name(&self) -> &'static str {
        "corrupt-before-reconstruct"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn on_reconstruct_return(&self, _: &HookCtx, _: usize, _: &Cheaters, rng: &mut dyn RngCore) -> Option<Pauli> {
        Some([Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)])
    }
}

/// Logical X on every block the cheater re-encodes.
pub struct BadOwnEncode;

impl Strategy for BadOwnEncode {
    fn name(&self) -> &'static str {
        "bad-own-encode"
    }
    fn expected(&self) -> Verdict {
        Verdict::PassCorrected
    }
    fn on_dealer_encode(&self, _: &HookCtx, act: EncodeAct, _: &Cheaters, _: &mut dyn RngCore) -> Vec<(usize, Pauli)> {
        match act {
            EncodeAct::Reencode { block } => vec![(block, Pauli::X)],
            EncodeAct::Dealer => Vec::new(),
        }
    }
}

/// A dealer whose data encoding carries X on one first-level position and Z on another,
/// both held by honest nodes.
pub struct BadDealerWeight2;

impl Strategy for BadDealerWeight2 {
    fn name(&self) -> &'static str {
        "bad-dealer-weight-2"
    }
    fn expected(&self) -> Verdict {
        Verdict::Abort
    }
    fn on_dealer_encode(&self, ctx: &HookCtx, act: EncodeAct, c: &Cheaters, rng: &mut dyn RngCore) -> Vec<(usize, Pauli)> {
        if act != EncodeAct::Dealer || ctx.role != GridRole::Data {
            return Vec::new();
        }
        let honest: Vec<usize> = (0..ctx.n).filter(|&j| !c.contains(j)).collect();
        let p = honest[rng.gen_range(0..honest.len())];
        let rest: Vec<usize> = honest.into_iter().filter(|&j| j != p).collect();
        let q = rest[rng.gen_range(0..rest.len())];
        vec![(p, Pauli::X), (q, Pauli::Z)]
    }
}

/// Two cheaters: the first puts logical X on every block it re-encodes, the second logical Z.
pub struct TwoCheaterCollusion;

impl Strategy for TwoCheaterCollusion {
    fn name(&self) -> &'static str {
        "two-cheater-collusion"
    }
    fn expected(&self) -> Verdict {
        Verdict::Abort
    }
    fn cheaters(&self) -> usize {
        2
    }
    fn on_dealer_encode(&self, ctx: &HookCtx, act: EncodeAct, c: &Cheaters, _: &mut dyn RngCore) -> Vec<(usize, Pauli)> {
        let EncodeAct::Reencode { block } = act else {
            return Vec::new();
        };
        let p = if c.rank(ctx.node) == Some(0) { Pauli::X } else { Pauli::Z };
        vec![(block, p)]
    }
}

/// Every shipped strategy, in catalog order.
pub fn corpus() -> Vec<Box<dyn Strategy>> {
    vec![
        Box::new(Honest),
        Box::new(SingleXOnShare),
        Box::new(ZSpray),
        Box::new(LieOnBroadcast),
        Box::new(CorruptBeforeReconstruct),
        Box::new(BadOwnEncode),
        Box::new(BadDealerWeight2),
        Box::new(TwoCheaterCollusion),
    ]
}

pub fn strategy_by_name(name: &str) -> Result<Box<dyn Strategy>, AdversaryError> {
    corpus()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| AdversaryError::UnknownStrategy(name.to_string()))
}

/// Corrupted set used when none is given: the last nodes, except that a cheating dealer is
/// node 0 so that it deals an input.
pub fn default_corrupt(strategy: &dyn Strategy, n: usize) -> BTreeSet<NodeId> {
    match strategy.name() {
        "bad-dealer-weight-2" => BTreeSet::from([0]),
        _ => (n - strategy.cheaters()..n).collect(),
    }
}

fn pauli_char(p: Pauli) -> char {
    match p {
        Pauli::I => 'I',
        Pauli::X => 'X',
        Pauli::Y => 'Y',
        Pauli::Z => 'Z',
    }
}

/// A strategy bound to a corrupted set, an RNG stream of its own and a ground-truth log.
pub struct Adversary {
    strategy: Box<dyn Strategy>,
    cheaters: Cheaters,
    rng: ChaCha8Rng,
    pub log: Vec<Injection>,
}

impl fmt::Debug for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Adversary")
            .field("strategy", &self.strategy.name())
            .field("corrupt", &self.cheaters.0)
            .field("injections", &self.log.len())
            .finish()
    }
}

impl Adversary {
    pub fn new(strategy: Box<dyn Strategy>, corrupt: BTreeSet<NodeId>, seed: u64) -> Self {
        Self { strategy, cheaters: Cheaters(corrupt), rng: ChaCha8Rng::seed_from_u64(seed), log: Vec::new() }
    }

    pub fn honest() -> Self {
        Self::new(Box::new(Honest), BTreeSet::new(), 0)
    }

    /// Looks up `name`; `corrupt = None` picks [`default_corrupt`].
    pub fn by_name(name: &str, n: usize, corrupt: Option<BTreeSet<NodeId>>, seed: u64) -> Result<Self, AdversaryError> {
        let strategy = strategy_by_name(name)?;
        let corrupt = corrupt.unwrap_or_else(|| default_corrupt(strategy.as_ref(), n));
        if let Some(&node) = corrupt.iter().find(|&&c| c >= n) {
            return Err(AdversaryError::NodeOutOfRange { node, n });
        }
        if corrupt.len() < strategy.cheaters() {
            return Err(AdversaryError::CorruptCount {
                name: name.to_string(),
                needed: strategy.cheaters(),
                got: corrupt.len(),
            });
        }
        Ok(Self::new(strategy, corrupt, seed))
    }

    pub fn name(&self) -> &'static str {
        self.strategy.name()
    }

    pub fn expected(&self) -> Verdict {
        self.strategy.expected()
    }

    pub fn corrupt(&self) -> &BTreeSet<NodeId> {
        &self.cheaters.0
    }

    pub fn is_corrupt(&self, node: NodeId) -> bool {
        self.cheaters.contains(node)
    }

    fn record(&mut self, hook: &'static str, ctx: &HookCtx, target: Target, pauli: Option<Pauli>) {
        self.log.push(Injection { hook, ctx: *ctx, target, pauli: pauli.map(pauli_char) });
    }

    fn slot_hook(
        &mut self,
        hook: &'static str,
        ctx: &HookCtx,
        slot: usize,
        f: fn(&dyn Strategy, &HookCtx, usize, &Cheaters, &mut dyn RngCore) -> Option<Pauli>,
    ) -> Option<Pauli> {
        if !self.is_corrupt(ctx.node) {
            return None;
        }
        let p = f(self.strategy.as_ref(), ctx, slot, &self.cheaters, &mut self.rng).filter(|&p| p != Pauli::I);
        if p.is_some() {
            self.record(hook, ctx, Target::Slot(slot), p);
        }
        p
    }

    pub fn on_receive_qubit(&mut self, ctx: &HookCtx, slot: usize) -> Option<Pauli> {
        self.slot_hook("on_receive_qubit", ctx, slot, |s, c, sl, ch, r| s.on_receive_qubit(c, sl, ch, r))
    }

    pub fn on_send_qubit(&mut self, ctx: &HookCtx, slot: usize) -> Option<Pauli> {
        self.slot_hook("on_send_qubit", ctx, slot, |s, c, sl, ch, r| s.on_send_qubit(c, sl, ch, r))
    }

    pub fn on_reconstruct_return(&mut self, ctx: &HookCtx, slot: usize) -> Option<Pauli> {
        self.slot_hook("on_reconstruct_return", ctx, slot, |s, c, sl, ch, r| s.on_reconstruct_return(c, sl, ch, r))
    }

    /// Flips bits of a corrupted node's broadcast in place.
    pub fn on_broadcast(&mut self, ctx: &HookCtx, bits: &mut [u8]) {
        if !self.is_corrupt(ctx.node) {
            return;
        }
        let flips = self.strategy.on_broadcast(ctx, bits, &self.cheaters, &mut self.rng);
        for i in flips {
            bits[i] ^= 1;
            self.record("on_broadcast", ctx, Target::Bit(i), None);
        }
    }

    pub fn on_dealer_encode(&mut self, ctx: &HookCtx, act: EncodeAct) -> Vec<(usize, Pauli)> {
        if !self.is_corrupt(ctx.node) {
            return Vec::new();
        }
        let out: Vec<(usize, Pauli)> = self
            .strategy
            .on_dealer_encode(ctx, act, &self.cheaters, &mut self.rng)
            .into_iter()
            .filter(|&(_, p)| p != Pauli::I)
            .collect();
        for &(pos, p) in &out {
            self.record("on_dealer_encode", ctx, Target::Block(pos), Some(p));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub injections: usize,
    /// Honest nodes that ended up in `B`.
    pub honest_in_b: BTreeSet<NodeId>,
    /// Honest nodes in `B` that no injection explains.
    pub unexplained_in_b: BTreeSet<NodeId>,
    /// `(dealer, block, position)` triples in the per-block sets explained by no cheater.
    pub unexplained_block_errors: Vec<(NodeId, usize, usize)>,
    /// Number of first-level positions hit by dealer-encoding injections, per data dealer.
    pub first_level_hits: BTreeMap<NodeId, usize>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.honest_in_b.is_empty() && self.unexplained_block_errors.is_empty()
    }
}

/// Compares protocol-identified sets with the ground-truth log. `block_errors[i][ℓ]` are the
/// positions attributed to block `ℓ` of dealer `i`'s grids.
pub fn ground_truth_audit(
    log: &[Injection],
    corrupt: &BTreeSet<NodeId>,
    b: &BTreeSet<NodeId>,
    block_errors: &BTreeMap<NodeId, BTreeMap<usize, BTreeSet<usize>>>,
) -> AuditReport {
    let targeted: BTreeSet<usize> = log
        .iter()
        .filter_map(|inj| match (inj.hook, inj.target) {
            ("on_dealer_encode", Target::Block(p)) => Some(p),
            _ => None,
        })
        .collect();
    let mut first_level_hits: BTreeMap<NodeId, BTreeSet<usize>> = BTreeMap::new();
    for inj in log {
        if let (EncodeTag::Dealer, Target::Block(p)) = (EncodeTag::of(inj), inj.target) {
            first_level_hits.entry(inj.ctx.dealer).or_default().insert(p);
        }
    }
    let honest_in_b: BTreeSet<NodeId> = b.difference(corrupt).copied().collect();
    let unexplained_in_b = honest_in_b.iter().copied().filter(|p| !targeted.contains(p)).collect();
    let mut unexplained_block_errors = Vec::new();
    for (&dealer, blocks) in block_errors {
        for (&block, positions) in blocks {
            for &j in positions {
                let explained = corrupt.contains(&j) || corrupt.contains(&block) || targeted.contains(&block);
                if !explained {
                    unexplained_block_errors.push((dealer, block, j));
                }
            }
        }
    }
    AuditReport {
        injections: log.len(),
        honest_in_b,
        unexplained_in_b,
        unexplained_block_errors,
        first_level_hits: first_level_hits.into_iter().map(|(d, s)| (d, s.len())).collect(),
    }
}

#[derive(PartialEq, Eq)]
enum EncodeTag {
    Dealer,
    Other,
}

impl EncodeTag {
    fn of(inj: &Injection) -> Self {
        if inj.hook == "on_dealer_encode" && inj.ctx.node == inj.ctx.dealer && inj.ctx.role == GridRole::Data {
            EncodeTag::Dealer
        } else {
            EncodeTag::Other
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(node: NodeId, role: GridRole) -> HookCtx {
        HookCtx { phase: Phase::Sharing, n: 7, node, dealer: 0, grid: 0, role }
    }

    #[test]
    fn honest_is_noop() {
        let mut a = Adversary::by_name("honest", 7, None, 1).unwrap();
        assert!(a.corrupt().is_empty());
        assert_eq!(a.on_receive_qubit(&ctx(3, GridRole::Data), 0), None);
        let mut bits = vec![0, 1, 0];
        a.on_broadcast(&ctx(3, GridRole::Data), &mut bits);
        assert_eq!(bits, vec![0, 1, 0]);
        assert!(a.log.is_empty());
    }

    #[test]
    fn hooks_fire_only_for_corrupt_nodes() {
        let mut a = Adversary::by_name("single-x-on-share", 7, None, 1).unwrap();
        assert_eq!(a.corrupt(), &BTreeSet::from([6]));
        assert_eq!(a.on_receive_qubit(&ctx(2, GridRole::Data), 0), None);
        assert_eq!(a.on_receive_qubit(&ctx(6, GridRole::Data), 0), Some(Pauli::X));
        assert_eq!(a.log.len(), 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let run = |seed| {
            let mut a = Adversary::by_name("bad-dealer-weight-2", 7, None, seed).unwrap();
            a.on_dealer_encode(&ctx(0, GridRole::Data), EncodeAct::Dealer)
        };
        assert_eq!(run(9), run(9));
        let inj = run(9);
        assert_eq!(inj.len(), 2);
        assert_ne!(inj[0].0, inj[1].0);
        assert!(inj.iter().all(|&(p, _)| p != 0));
    }

    #[test]
    fn collusion_needs_two() {
        let e = Adversary::by_name("two-cheater-collusion", 7, Some(BTreeSet::from([3])), 0).unwrap_err();
        assert!(matches!(e, AdversaryError::CorruptCount { needed: 2, got: 1, .. }));
        let mut a = Adversary::by_name("two-cheater-collusion", 7, None, 0).unwrap();
        let c = ctx(5, GridRole::ZCheck);
        assert_eq!(a.on_dealer_encode(&c, EncodeAct::Reencode { block: 5 }), vec![(5, Pauli::X)]);
        let c = ctx(6, GridRole::ZCheck);
        assert_eq!(a.on_dealer_encode(&c, EncodeAct::Reencode { block: 6 }), vec![(6, Pauli::Z)]);
    }

    #[test]
    fn audit_flags_honest_members() {
        let corrupt = BTreeSet::from([6]);
        let clean = ground_truth_audit(&[], &corrupt, &BTreeSet::from([6]), &BTreeMap::new());
        assert!(clean.is_clean());
        let dirty = ground_truth_audit(&[], &corrupt, &BTreeSet::from([2, 6]), &BTreeMap::new());
        assert_eq!(dirty.unexplained_in_b, BTreeSet::from([2]));
    }
}
