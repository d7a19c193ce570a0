//! Backend-independent grid register used by the protocols.

use rand::RngCore;

use super::frame::FrameRegister;
use super::physical::{GridId, PairOp, PhysicalRegister, SingleOp};
use super::statevector::StateVector;
use super::tableau::Tableau;
use super::{BackendError, BackendKind, Pauli, C64};
use crate::css::CssCode;

/// Single-qubit state preparations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Prep {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    Magic,
    Amplitudes([(f64, f64); 2]),
}

impl Prep {
    pub fn amplitudes(&self) -> [C64; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |a: f64, b: f64| C64::new(a, b);
        match *self {
            Prep::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            Prep::One => [c(0.0, 0.0), c(1.0, 0.0)],
            Prep::Plus => [c(r, 0.0), c(r, 0.0)],
            Prep::Minus => [c(r, 0.0), c(-r, 0.0)],
            Prep::PlusI => [c(r, 0.0), c(0.0, r)],
            Prep::Magic => super::magic_state(),
            Prep::Amplitudes([(a, b), (x, y)]) => [c(a, b), c(x, y)],
        }
    }

    pub fn from_amplitudes(a: [C64; 2]) -> Self {
        Prep::Amplitudes([(a[0].re, a[0].im), (a[1].re, a[1].im)])
    }

    pub fn is_stabilizer(&self) -> bool {
        !matches!(self, Prep::Magic | Prep::Amplitudes(_))
    }
}

/// One simulated quantum state holding every encoded grid of a run.
#[derive(Debug, Clone)]
pub enum QuantumRegister {
    Statevector(PhysicalRegister<StateVector>),
    Tableau(PhysicalRegister<Tableau>),
    Frame(FrameRegister),
}

/// Default qubit pool for tableau runs.
pub const DEFAULT_TABLEAU_CAPACITY: usize = 320;

macro_rules! dispatch {
    ($self:ident, $r:ident => $body:expr) => {
        match $self {
            QuantumRegister::Statevector($r) => $body,
            QuantumRegister::Tableau($r) => $body,
            QuantumRegister::Frame($r) => $body,
        }
    };
}

impl QuantumRegister {
    pub fn new(kind: BackendKind, code: CssCode) -> Self {
        Self::with_tableau_capacity(kind, code, DEFAULT_TABLEAU_CAPACITY)
    }

    /// Like [`QuantumRegister::new`] with an explicit tableau qubit pool.
    pub fn with_tableau_capacity(kind: BackendKind, code: CssCode, capacity: usize) -> Self {
        match kind {
            BackendKind::Statevector => {
                QuantumRegister::Statevector(PhysicalRegister::new(StateVector::default(), code))
            }
            BackendKind::Tableau => QuantumRegister::Tableau(PhysicalRegister::new(
                Tableau::new(capacity),
                code,
            )),
            BackendKind::Frame => QuantumRegister::Frame(FrameRegister::new(code)),
        }
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            QuantumRegister::Statevector(_) => BackendKind::Statevector,
            QuantumRegister::Tableau(_) => BackendKind::Tableau,
            QuantumRegister::Frame(_) => BackendKind::Frame,
        }
    }

    pub fn code(&self) -> &CssCode {
        dispatch!(self, r => r.code())
    }

    pub fn prepare(&mut self, prep: &Prep, level: u32) -> Result<GridId, BackendError> {
        dispatch!(self, r => r.prepare(prep, level))
    }

    pub fn inject(&mut self, g: GridId, slot: usize, p: Pauli) -> Result<(), BackendError> {
        dispatch!(self, r => r.inject(g, slot, p))
    }

    pub fn transversal(&mut self, g: GridId, op: SingleOp) -> Result<(), BackendError> {
        dispatch!(self, r => r.transversal(g, op))
    }

    pub fn transversal_pair(&mut self, op: PairOp, c: GridId, t: GridId) -> Result<(), BackendError> {
        dispatch!(self, r => r.transversal_pair(op, c, t))
    }

    pub fn logical_pauli(&mut self, g: GridId, p: Pauli) -> Result<(), BackendError> {
        dispatch!(self, r => r.logical_pauli(g, p))
    }

    pub fn measure_z(&mut self, g: GridId, rng: &mut dyn RngCore) -> Result<Vec<u8>, BackendError> {
        dispatch!(self, r => r.measure_z(g, rng))
    }

    /// Transversal H followed by a Z readout.
    pub fn measure_x(&mut self, g: GridId, rng: &mut dyn RngCore) -> Result<Vec<u8>, BackendError> {
        self.transversal(g, SingleOp::H)?;
        self.measure_z(g, rng)
    }

    pub fn live_grids(&self) -> usize {
        dispatch!(self, r => r.live_grids())
    }

    /// Physical gate to apply on every slot so that the grid undergoes logical `P`
    /// (or `P†` when `dagger`).
    pub fn phase_op(&self, level: u32, dagger: bool) -> SingleOp {
        let same = self.code().transversal_p_is_logical_p_at(level);
        if same ^ dagger {
            SingleOp::P
        } else {
            SingleOp::Pdg
        }
    }

    /// Logical controlled-G between two grids. The frame backend applies it ideally; the
    /// statevector backend decodes both level-1 blocks, applies C-G to the decoded
    /// qubits and re-encodes; the tableau backend cannot represent it.
    pub fn logical_cg(&mut self, c: GridId, t: GridId) -> Result<(), BackendError> {
        match self {
            QuantumRegister::Frame(f) => f.transversal_pair(PairOp::Cg, c, t),
            QuantumRegister::Tableau(_) => Err(BackendError::UnsupportedGate(super::Gate::Cg(0, 0))),
            QuantumRegister::Statevector(r) => {
                if r.level(c)? != 1 || r.level(t)? != 1 {
                    return Err(BackendError::Unsupported("ideal logical C-G needs level-1 grids".into()));
                }
                let enc = r.code().encoding_circuit();
                let qc = r.grid_qubits(c)?.to_vec();
                let qt = r.grid_qubits(t)?.to_vec();
                for qs in [&qc, &qt] {
                    for g in enc.gates.iter().rev() {
                        r.backend.apply(&g.inverse().remap(|i| qs[i]))?;
                    }
                }
                r.backend.apply(&super::Gate::Cg(qc[enc.input], qt[enc.input]))?;
                enc.apply(&mut r.backend, &qc)?;
                enc.apply(&mut r.backend, &qt)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Runs the same grid script on two registers and returns both readout transcripts.
    fn script(kind: BackendKind, seed: u64) -> Vec<Vec<u8>> {
        let code = CssCode::steane();
        let mut reg = QuantumRegister::new(kind, code);
        let mut script_rng = ChaCha8Rng::seed_from_u64(seed);
        let mut meas = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let preps = [Prep::Zero, Prep::Plus, Prep::One, Prep::Magic];
        let data = reg.prepare(&preps[script_rng.gen_range(0..4)], 1).unwrap();
        let mut out = Vec::new();
        for _ in 0..4 {
            let anc = reg.prepare(&preps[script_rng.gen_range(0..3)], 1).unwrap();
            let slot = script_rng.gen_range(0..7);
            let p = [Pauli::X, Pauli::Y, Pauli::Z][script_rng.gen_range(0..3)];
            reg.inject(data, slot, p).unwrap();
            if script_rng.gen_bool(0.5) {
                reg.transversal_pair(PairOp::Cnot, data, anc).unwrap();
                out.push(reg.measure_z(anc, &mut meas).unwrap());
            } else {
                reg.transversal_pair(PairOp::Cnot, anc, data).unwrap();
                out.push(reg.measure_x(anc, &mut meas).unwrap());
            }
            let op = [SingleOp::H, SingleOp::P, SingleOp::Pdg][script_rng.gen_range(0..3)];
            reg.transversal(data, op).unwrap();
        }
        out.push(reg.measure_z(data, &mut meas).unwrap());
        out
    }

    #[test]
    fn frame_matches_statevector_draw_for_draw() {
        for seed in 0..40 {
            assert_eq!(script(BackendKind::Frame, seed), script(BackendKind::Statevector, seed), "seed {seed}");
        }
    }

    #[test]
    fn ideal_logical_cg_keeps_plus_magic() {
        for kind in [BackendKind::Statevector, BackendKind::Frame] {
            let mut reg = QuantumRegister::new(kind, CssCode::steane());
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..5 {
                let c = reg.prepare(&Prep::Plus, 1).unwrap();
                let t = reg.prepare(&Prep::Magic, 1).unwrap();
                reg.logical_cg(c, t).unwrap();
                let bits = reg.measure_x(c, &mut rng).unwrap();
                let word = crate::gf2::Bits::from_fn(7, |i| bits[i] == 1);
                assert_eq!(reg.code().x_values().single_decode(&word).value, 0);
                reg.measure_z(t, &mut rng).unwrap();
            }
        }
    }
}
