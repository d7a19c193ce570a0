//! Magic-state verification and distributed gate teleportation.

use std::collections::BTreeSet;

use serde::Serialize;

use super::vqss::{vqss_share_many, vqss_verify, vqss_zero_verify, VerifyReport};
use super::{Basis, DecodedValue, ProtocolError, Session, ShareGrid};
use crate::adversary::GridRole;
use crate::backend::physical::{PairOp, SingleOp};
use crate::backend::register::Prep;
use crate::backend::Pauli;
use crate::gf2::DoubleStatus;
use crate::netsim::NodeId;

/// A verified magic grid together with the verification of its companion `|0̄̄⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MagicPair {
    pub dealer: NodeId,
    pub zero_report: VerifyReport,
    pub magic_report: VerifyReport,
    pub magic: ShareGrid,
    /// `B_0 ∪ B_g`.
    pub apparent: BTreeSet<NodeId>,
    /// Decoded control readout of the stabilizer check; 1 sets `B = [n]`.
    pub check: u8,
}

/// Shares `|0⟩` (checked as VQSS(0)) and `|m⟩` from `dealer`, then checks that the magic
/// grid is stabilized by `G`: `H` on the zero grid, logical C-G from it into the magic
/// grid, `H` again and a Z readout. A nonzero readout sets `B = [n]`.
pub fn vmagic(sess: &mut Session, dealer: NodeId) -> Result<MagicPair, ProtocolError> {
    let grids = vqss_share_many(sess, &[(dealer, Prep::Zero, GridRole::Zero), (dealer, Prep::Magic, GridRole::Magic)])?;
    let (zero, magic) = (grids[0], grids[1]);
    let zero_report = vqss_zero_verify(sess, &zero)?;
    let magic_report = vqss_verify(sess, &magic)?;

    sess.reg.transversal(zero.grid, SingleOp::H)?;
    sess.reg.logical_cg(zero.grid, magic.grid)?;
    sess.reg.transversal(zero.grid, SingleOp::H)?;
    let bits = sess.measure_and_broadcast(&zero, Basis::Z)?;
    let d = sess.decode(&bits, Basis::Z, zero.level);
    sess.sets.record_decode(dealer, &d);
    if d.value != 0 {
        sess.sets.set_all(dealer);
    }
    sess.transcript.decoded.push(DecodedValue { label: "vmagic".into(), dealer, value: d.value });
    sess.sync_b();

    let apparent = zero_report.apparent.union(&magic_report.apparent).copied().collect();
    Ok(MagicPair { dealer, zero_report, magic_report, magic, apparent, check: d.value })
}

/// Teleports `T` onto the data: transversal CNOT from the magic grid into the data grid,
/// Z readout of the data, and `X·P†` on the magic grid when the decoded value is 1. The
/// magic grid becomes the new data grid. An undecodable readout sets `B = [n]`.
pub fn gate_teleport(sess: &mut Session, data: &ShareGrid, magic: &MagicPair) -> Result<(ShareGrid, u8), ProtocolError> {
    let m = magic.magic;
    sess.reg.transversal_pair(PairOp::Cnot, m.grid, data.grid)?;
    let bits = sess.measure_and_broadcast(data, Basis::Z)?;
    let d = sess.decode(&bits, Basis::Z, data.level);
    sess.sets.record_decode(data.dealer, &d);
    if d.status == DoubleStatus::UncorrectableLevel1 {
        sess.sets.set_all(data.dealer);
    }
    if d.value == 1 {
        let pdg = sess.reg.phase_op(m.level, true);
        sess.reg.transversal(m.grid, pdg)?;
        sess.reg.logical_pauli(m.grid, Pauli::X)?;
    }
    sess.transcript.decoded.push(DecodedValue { label: "gate-teleport".into(), dealer: data.dealer, value: d.value });
    sess.sync_b();
    Ok((ShareGrid { role: GridRole::Data, ..m }, d.value))
}
