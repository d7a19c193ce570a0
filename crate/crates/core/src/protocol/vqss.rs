//! Verifiable sharing of a single qubit and its statistical verification.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Basis, ProtocolError, Session, ShareGrid};
use crate::adversary::{EncodeAct, GridRole};
use crate::backend::physical::PairOp;
use crate::backend::register::Prep;
use crate::netsim::{NodeId, SlotRef};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub dealer: NodeId,
    pub role: GridRole,
    /// Checked as VQSS(0): every Z readout must decode to 0.
    pub zero_check: bool,
    pub iterations: usize,
    pub ancilla_grids: usize,
    /// Z-check and X-check rounds whose coupling bit was set.
    pub coupled: [usize; 2],
    pub nonzero: bool,
    /// `B_i` after the verification.
    pub apparent: BTreeSet<NodeId>,
    pub passed: bool,
}

/// Shares several states at once: each dealer encodes and sends first-level qubits in
/// one round, then every node re-encodes what it got and distributes the blocks in a
/// second round. Each node ends holding `n` slots of every grid.
pub fn vqss_share_many(sess: &mut Session, jobs: &[(NodeId, Prep, GridRole)]) -> Result<Vec<ShareGrid>, ProtocolError> {
    let (n, level, slots) = (sess.n, sess.level, sess.slots());
    let mut grids = Vec::with_capacity(jobs.len());
    for (dealer, prep, role) in jobs {
        let grid = sess.reg.prepare(prep, level)?;
        grids.push(ShareGrid { dealer: *dealer, grid, role: *role, level });
    }
    // at level 2 the first-level qubits in transit are the pseudo-slots past the grid
    let first = |l: usize| if level == 2 { slots + l } else { l };
    for g in &grids {
        for l in 0..n {
            sess.net.create(g.dealer, SlotRef { grid: g.grid, slot: first(l) })?;
        }
        sess.encode_hook(g.dealer, g, EncodeAct::Dealer)?;
    }
    for g in &grids {
        for l in (0..n).filter(|&l| l != g.dealer) {
            sess.send_slot(g, first(l), g.dealer, l)?;
        }
    }
    sess.deliver(&grids, true)?;
    for g in &grids {
        for l in 0..n {
            if level == 2 {
                sess.net.destroy(SlotRef { grid: g.grid, slot: first(l) })?;
                for j in 0..n {
                    sess.net.create(l, SlotRef { grid: g.grid, slot: l * n + j })?;
                }
            }
            sess.encode_hook(l, g, EncodeAct::Reencode { block: l })?;
        }
    }
    if level == 2 {
        for g in &grids {
            for l in 0..n {
                for j in (0..n).filter(|&j| j != l) {
                    sess.send_slot(g, l * n + j, l, j)?;
                }
            }
        }
        sess.deliver(&grids, true)?;
    }
    Ok(grids)
}

pub fn vqss_share(sess: &mut Session, dealer: NodeId, input: &Prep, role: GridRole) -> Result<ShareGrid, ProtocolError> {
    Ok(vqss_share_many(sess, &[(dealer, input.clone(), role)])?.remove(0))
}

/// `s² + 2s` sequential iterations. Each iteration the dealer shares a Z-check ancilla
/// `|+̄̄⟩` and an X-check ancilla `|0̄̄⟩`; a beacon bit decides whether the data is coupled
/// into the Z-check ancilla (transversal CNOT data → ancilla), which is read out in Z and
/// decoded against `V`; a second bit decides whether the X-check ancilla is coupled into
/// the data (ancilla → data), which is read out in X and decoded against `W`.
pub fn vqss_verify(sess: &mut Session, data: &ShareGrid) -> Result<VerifyReport, ProtocolError> {
    verify(sess, data, false)
}

/// As [`vqss_verify`], with a `|0̄̄⟩` Z-check ancilla; every Z readout must decode to 0.
/// A nonzero value fails the dealer and sets `B = [n]`.
pub fn vqss_zero_verify(sess: &mut Session, data: &ShareGrid) -> Result<VerifyReport, ProtocolError> {
    verify(sess, data, true)
}

fn verify(sess: &mut Session, data: &ShareGrid, zero: bool) -> Result<VerifyReport, ProtocolError> {
    let dealer = data.dealer;
    let iterations = sess.s * sess.s + 2 * sess.s;
    let z_prep = if zero { Prep::Zero } else { Prep::Plus };
    let mut coupled = [0usize; 2];
    let mut nonzero = false;
    for _ in 0..iterations {
        let anc = vqss_share_many(sess, &[(dealer, z_prep.clone(), GridRole::ZCheck), (dealer, Prep::Zero, GridRole::XCheck)])?;
        let (za, xa) = (anc[0], anc[1]);

        if sess.net.beacon_bit() {
            sess.reg.transversal_pair(PairOp::Cnot, data.grid, za.grid)?;
            coupled[0] += 1;
        }
        let bits = sess.measure_and_broadcast(&za, Basis::Z)?;
        let d = sess.decode(&bits, Basis::Z, za.level);
        sess.sets.record_decode(dealer, &d);
        if zero && d.value != 0 {
            nonzero = true;
            sess.sets.set_all(dealer);
        }

        if sess.net.beacon_bit() {
            sess.reg.transversal_pair(PairOp::Cnot, xa.grid, data.grid)?;
            coupled[1] += 1;
        }
        let bits = sess.measure_and_broadcast(&xa, Basis::X)?;
        let d = sess.decode(&bits, Basis::X, xa.level);
        sess.sets.record_decode(dealer, &d);
        sess.sync_b();
    }
    let report = VerifyReport {
        dealer,
        role: data.role,
        zero_check: zero,
        iterations,
        ancilla_grids: 2 * iterations,
        coupled,
        nonzero,
        apparent: sess.sets.dealer_set(dealer),
        passed: !nonzero && !sess.sets.dealer_failed(dealer),
    };
    sess.transcript.verdicts.push(report.clone());
    Ok(report)
}
