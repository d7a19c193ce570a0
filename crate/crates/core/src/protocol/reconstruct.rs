//! Output reconstruction: every share of an output grid goes to its owner, who corrects
//! block by block, extends the apparent-cheater sets and recovers the qubit from `n − 2t`
//! beacon-chosen first-level positions.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{ProtocolError, Session, ShareGrid};
use crate::adversary::GridRole;
use crate::backend::physical::{PhysicalRegister, QubitBackend};
use crate::backend::register::QuantumRegister;
use crate::backend::{MeasRng, Mat2, Pauli};
use crate::css::CssError;
use crate::gf2::{BinaryCode, Bits, CosetCode};
use crate::netsim::{NodeId, SlotRef};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub owner: NodeId,
    /// First-level positions the recovery used.
    pub kept: BTreeSet<usize>,
    /// Positions this reconstruction added to `B`.
    pub added_to_b: BTreeSet<usize>,
    /// Logical Pauli left on the frame wire (frame backend only).
    pub residual: Option<Pauli>,
    /// Recovered single-qubit state; `None` when rejected.
    #[serde(skip)]
    pub density: Option<Mat2>,
    pub rejected: Option<String>,
}

/// Gathers the shares of `grid` at `owner` and recovers the encoded qubit. At level 2 the
/// shares travel one block per round and the owner decodes each block before the next
/// arrives. The grid is consumed on physical backends; on the frame backend its wire stays
/// live so other outputs entangled with it can still be read.
pub fn reconstruct(sess: &mut Session, grid: &ShareGrid, owner: NodeId) -> Result<Reconstruction, ProtocolError> {
    let g = ShareGrid { role: GridRole::Output, ..*grid };
    let (n, slots) = (sess.n, sess.slots());
    let before = sess.sets.global.clone();
    let mut first = FirstLevel::new(n);
    let mut rejection = None;
    if g.level == 1 {
        gather(sess, &g, owner, 0..slots)?;
        if let Err(why) = decode_level1(sess, &g, &mut first)? {
            rejection = Some(why);
        }
        for slot in 0..slots {
            sess.net.destroy(SlotRef { grid: g.grid, slot })?;
        }
    } else {
        for j in 0..n {
            gather(sess, &g, owner, j * n..(j + 1) * n)?;
            decode_block(sess, &g, j, &mut first)?;
            for slot in j * n..(j + 1) * n {
                sess.net.destroy(SlotRef { grid: g.grid, slot })?;
            }
            sess.net.create(owner, SlotRef { grid: g.grid, slot: slots + j })?;
        }
    }
    let mut out = match rejection {
        Some(why) => rejected(owner, why),
        None => match choose_kept(sess) {
            Ok(kept) => recover(sess, &g, owner, &first, kept)?,
            Err(why) => rejected(owner, why),
        },
    };
    if g.level == 2 {
        for j in 0..n {
            sess.net.destroy(SlotRef { grid: g.grid, slot: slots + j })?;
        }
    }
    if let QuantumRegister::Statevector(r) = &mut sess.reg {
        r.take_grid(g.grid)?;
    } else if let QuantumRegister::Tableau(r) = &mut sess.reg {
        r.take_grid(g.grid)?;
    }
    if out.rejected.is_some() {
        sess.transcript.rejections.push(owner);
    }
    sess.sync_b();
    out.added_to_b = sess.sets.global.difference(&before).copied().collect();
    Ok(out)
}

/// What the owner knows about each first-level position after block decoding.
struct FirstLevel {
    /// Frame backend: logical X and Z flips of each block.
    fx: Bits,
    fz: Bits,
    /// Qubit-level backends: the qubit holding each first-level position.
    qubits: Vec<usize>,
}

impl FirstLevel {
    fn new(n: usize) -> Self {
        Self { fx: Bits::zeros(n), fz: Bits::zeros(n), qubits: Vec::with_capacity(n) }
    }
}

/// Holders of `range` send those slots to `owner` in one round.
fn gather(sess: &mut Session, g: &ShareGrid, owner: NodeId, range: std::ops::Range<usize>) -> Result<(), ProtocolError> {
    for slot in range {
        let h = sess.holder(slot);
        if h == owner {
            continue;
        }
        let ctx = sess.ctx(h, g);
        if let Some(p) = sess.adv.on_reconstruct_return(&ctx, slot) {
            sess.reg.inject(g.grid, slot, p)?;
        }
        sess.net.send(h, owner, SlotRef { grid: g.grid, slot })?;
    }
    sess.deliver(&[*g], false)
}

fn rejected(owner: NodeId, why: String) -> Reconstruction {
    Reconstruction {
        owner,
        kept: BTreeSet::new(),
        added_to_b: BTreeSet::new(),
        residual: None,
        density: None,
        rejected: Some(why),
    }
}

/// Extends `B̃_{i,j}` with the positions corrected in block `j`; more than `t` sends `j`
/// to `B`.
fn extend_recon(sess: &mut Session, dealer: NodeId, block: usize, new: &BTreeSet<usize>) {
    let mut set = sess.sets.block_set(dealer, block);
    set.extend(new.iter().copied());
    let too_many = set.len() > sess.t;
    sess.sets.recon.entry(dealer).or_default().insert(block, set);
    if too_many {
        sess.sets.add_apparent(dealer, block);
    }
}

/// Beacon choice of `n − 2t` trusted positions, or the reason none exists.
fn choose_kept(sess: &mut Session) -> Result<BTreeSet<usize>, String> {
    let trusted = sess.trusted();
    let need = sess.n - 2 * sess.t;
    if trusted.len() < need {
        return Err(format!("only {} positions outside B, need {need}", trusted.len()));
    }
    let kept = sess.net.beacon_subset(&trusted, need);
    let erased: BTreeSet<usize> = (0..sess.n).filter(|j| !kept.contains(j)).collect();
    if !sess.code.erasure_recoverable(&erased) {
        return Err(format!("erasure of {erased:?} is not recoverable"));
    }
    Ok(kept)
}

/// Decodes one classical frame word: corrected positions and the logical flip of the
/// residual codeword, or `None` when the syndrome is not correctable.
fn decode_frame_word(code: &BinaryCode, values: &CosetCode, word: &Bits) -> Option<(BTreeSet<usize>, bool)> {
    let e = code.error_for_syndrome(code.syndrome(word))?;
    let residual = word.xor(&e);
    Some((e.ones_iter().collect(), values.value(&residual) == 1))
}

/// Logical flip left after erasure recovery from first-level flips known on `kept`.
fn erasure_flip(code: &BinaryCode, values: &CosetCode, flips: &Bits, kept: &BTreeSet<usize>) -> Result<bool, CssError> {
    let n = flips.len();
    let known = Bits::from_fn(n, |j| kept.contains(&j) && flips.get(j));
    let erased: Vec<usize> = (0..n).filter(|j| !kept.contains(j)).collect();
    let (e, _) = code.solve_on_support(code.syndrome(&known), &erased)?;
    Ok(values.value(&known.xor(&e)) == 1)
}

fn frame_words(sess: &Session, g: &ShareGrid, range: std::ops::Range<usize>) -> Result<(Bits, Bits), ProtocolError> {
    let QuantumRegister::Frame(frame) = &sess.reg else { unreachable!() };
    let fg = frame.grid(g.grid)?;
    let len = range.len();
    let x = Bits::from_fn(len, |p| fg.x.get(range.start + p));
    let z = Bits::from_fn(len, |p| fg.z.get(range.start + p));
    Ok((x, z))
}

/// Level 1: correct the whole grid; corrected positions join `B`.
fn decode_level1(sess: &mut Session, g: &ShareGrid, first: &mut FirstLevel) -> Result<Result<(), String>, ProtocolError> {
    let n = sess.n;
    let code = sess.code.clone();
    let positions = if let QuantumRegister::Frame(_) = sess.reg {
        let (x, z) = frame_words(sess, g, 0..n)?;
        match (decode_frame_word(code.v(), code.z_values(), &x), decode_frame_word(code.w(), code.x_values(), &z)) {
            (Some((ex, bx)), Some((ez, bz))) => {
                // a corrected codeword carries its logical flip on every position
                first.fx = if bx { code.x_logical().clone() } else { Bits::zeros(n) };
                first.fz = if bz { code.z_logical().clone() } else { Bits::zeros(n) };
                ex.union(&ez).copied().collect::<BTreeSet<usize>>()
            }
            _ => return Ok(Err("first-level frame not correctable".into())),
        }
    } else {
        let qs = grid_qubits(sess, g)?;
        match with_backend(sess, |b, rng| code.correct(b, &qs, rng))? {
            Ok(rep) => {
                first.qubits = qs;
                rep.positions()
            }
            Err(CssError::TooManyErrors { .. }) => return Ok(Err("first-level shares not correctable".into())),
            Err(e) => return Err(e.into()),
        }
    };
    for j in positions {
        sess.sets.add_apparent(g.dealer, j);
    }
    Ok(Ok(()))
}

/// Level 2: correct and decode block `j` unless `j ∈ B`, extending `B̃_{i,j}`.
fn decode_block(sess: &mut Session, g: &ShareGrid, j: usize, first: &mut FirstLevel) -> Result<(), ProtocolError> {
    let n = sess.n;
    let code = sess.code.clone();
    let skip = sess.sets.global.contains(&j);
    if let QuantumRegister::Frame(_) = sess.reg {
        if skip {
            return Ok(());
        }
        let (x, z) = frame_words(sess, g, j * n..(j + 1) * n)?;
        match (decode_frame_word(code.v(), code.z_values(), &x), decode_frame_word(code.w(), code.x_values(), &z)) {
            (Some((ex, bx)), Some((ez, bz))) => {
                first.fx.set(j, bx);
                first.fz.set(j, bz);
                extend_recon(sess, g.dealer, j, &ex.union(&ez).copied().collect());
            }
            _ => sess.sets.add_apparent(g.dealer, j),
        }
        return Ok(());
    }
    let qs = grid_qubits(sess, g)?;
    let block = &qs[j * n..(j + 1) * n];
    let input = code.encoding_circuit().input;
    if skip {
        first.qubits.push(block[input]);
        return Ok(());
    }
    match with_backend(sess, |b, rng| code.correct_and_decode(b, block, rng))? {
        Ok((q, rep)) => {
            first.qubits.push(q);
            extend_recon(sess, g.dealer, j, &rep.positions());
        }
        Err(CssError::TooManyErrors { .. }) => {
            sess.sets.add_apparent(g.dealer, j);
            first.qubits.push(block[input]);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

/// Erasure recovery from the kept first-level positions.
fn recover(
    sess: &mut Session,
    g: &ShareGrid,
    owner: NodeId,
    first: &FirstLevel,
    kept: BTreeSet<usize>,
) -> Result<Reconstruction, ProtocolError> {
    let code = sess.code.clone();
    let (residual, density) = if let QuantumRegister::Frame(frame) = &sess.reg {
        let flip_x = erasure_flip(code.v(), code.z_values(), &first.fx, &kept)?;
        let flip_z = erasure_flip(code.w(), code.x_values(), &first.fz, &kept)?;
        let residual = Pauli::from_bits(flip_x, flip_z);
        (Some(residual), frame.logical_density(g.grid, residual)?)
    } else {
        let density = with_backend(sess, |b, rng| -> Result<Mat2, ProtocolError> {
            let (q, _) = code.erasure_recover(b, &first.qubits, &kept, rng)?;
            Ok(b.single_density(q)?)
        })??;
        (None, density)
    };
    Ok(Reconstruction {
        owner,
        kept,
        added_to_b: BTreeSet::new(),
        residual,
        density: Some(density),
        rejected: None,
    })
}

fn grid_qubits(sess: &Session, g: &ShareGrid) -> Result<Vec<usize>, ProtocolError> {
    Ok(match &sess.reg {
        QuantumRegister::Statevector(r) => r.grid_qubits(g.grid)?.to_vec(),
        QuantumRegister::Tableau(r) => r.grid_qubits(g.grid)?.to_vec(),
        QuantumRegister::Frame(_) => unreachable!(),
    })
}

/// Runs `f` on the qubit-level backend behind the session's register.
fn with_backend<T>(
    sess: &mut Session,
    f: impl FnOnce(&mut dyn QubitBackend, &mut MeasRng) -> T,
) -> Result<T, ProtocolError> {
    let rng = &mut sess.rng;
    match &mut sess.reg {
        QuantumRegister::Statevector(r) => Ok(f(backend_of(r), rng)),
        QuantumRegister::Tableau(r) => Ok(f(backend_of(r), rng)),
        QuantumRegister::Frame(_) => Err(ProtocolError::Config("frame register has no qubit backend".into())),
    }
}

fn backend_of<B: QubitBackend + 'static>(r: &mut PhysicalRegister<B>) -> &mut dyn QubitBackend {
    &mut r.backend
}
