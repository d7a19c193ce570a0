//! Qubit-level backend interface shared by the statevector and tableau simulators.

use std::collections::HashMap;

use rand::RngCore;

use crate::css::CssCode;

use super::statevector::StateVector;
use super::tableau::Tableau;
use super::{BackendError, Gate, Mat2, Pauli, Prep};

pub trait QubitBackend {
    /// Allocates a fresh qubit prepared in `prep`.
    fn alloc_prep(&mut self, prep: &Prep) -> Result<usize, BackendError>;
    fn apply(&mut self, g: &Gate) -> Result<(), BackendError>;
    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<u8, BackendError>;
    fn release(&mut self, q: usize) -> Result<(), BackendError>;
    fn single_density(&mut self, q: usize) -> Result<Mat2, BackendError>;

    fn alloc(&mut self) -> Result<usize, BackendError> {
        self.alloc_prep(&Prep::Zero)
    }

    fn apply_all(&mut self, gates: &[Gate]) -> Result<(), BackendError> {
        gates.iter().try_for_each(|g| self.apply(g))
    }

    fn reset(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<(), BackendError> {
        if self.measure_z(q, rng)? == 1 {
            self.apply(&Gate::X(q))?;
        }
        Ok(())
    }
}

impl QubitBackend for StateVector {
    fn alloc_prep(&mut self, prep: &Prep) -> Result<usize, BackendError> {
        Ok(self.alloc_state(prep.amplitudes()))
    }

    fn apply(&mut self, g: &Gate) -> Result<(), BackendError> {
        StateVector::apply(self, g)
    }

    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<u8, BackendError> {
        StateVector::measure_z(self, q, rng)
    }

    fn release(&mut self, q: usize) -> Result<(), BackendError> {
        StateVector::release(self, q)
    }

    fn single_density(&mut self, q: usize) -> Result<Mat2, BackendError> {
        StateVector::single_density(self, q)
    }
}

impl QubitBackend for Tableau {
    fn alloc_prep(&mut self, prep: &Prep) -> Result<usize, BackendError> {
        let gates: &[fn(usize) -> Gate] = match prep {
            Prep::Zero => &[],
            Prep::One => &[Gate::X],
            Prep::Plus => &[Gate::H],
            Prep::Minus => &[Gate::X, Gate::H],
            Prep::PlusI => &[Gate::H, Gate::P],
            Prep::Magic | Prep::Amplitudes(_) => {
                return Err(BackendError::UnsupportedPrep(format!("{prep:?}")))
            }
        };
        let q = Tableau::alloc(self)?;
        for g in gates {
            Tableau::apply(self, &g(q))?;
        }
        Ok(q)
    }

    fn apply(&mut self, g: &Gate) -> Result<(), BackendError> {
        Tableau::apply(self, g)
    }

    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<u8, BackendError> {
        Tableau::measure_z(self, q, rng)
    }

    fn release(&mut self, q: usize) -> Result<(), BackendError> {
        Tableau::release(self, q)
    }

    fn single_density(&mut self, q: usize) -> Result<Mat2, BackendError> {
        Tableau::single_density(self, q)
    }
}

/// Encoded grids on a qubit-level backend. A level-`L` grid has `n^L` slots; at level 2
/// slot `ℓ·n + j` is qubit `j` of the re-encoding of first-level qubit `ℓ`.
#[derive(Debug, Clone)]
pub struct PhysicalRegister<B> {
    pub backend: B,
    code: CssCode,
    grids: HashMap<GridId, PhysGrid>,
    next: GridId,
}

#[derive(Debug, Clone)]
struct PhysGrid {
    level: u32,
    qubits: Vec<usize>,
}

impl<B: QubitBackend> PhysicalRegister<B> {
    pub fn new(backend: B, code: CssCode) -> Self {
        Self { backend, code, grids: HashMap::new(), next: 0 }
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    fn grid(&self, g: GridId) -> Result<&PhysGrid, BackendError> {
        self.grids.get(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))
    }

    pub fn grid_qubits(&self, g: GridId) -> Result<&[usize], BackendError> {
        Ok(&self.grid(g)?.qubits)
    }

    pub fn level(&self, g: GridId) -> Result<u32, BackendError> {
        Ok(self.grid(g)?.level)
    }

    pub fn live_grids(&self) -> usize {
        self.grids.len()
    }

    /// Encodes `prep` `level` times.
    pub fn prepare(&mut self, prep: &Prep, level: u32) -> Result<GridId, BackendError> {
        let enc = self.code.encoding_circuit();
        let input = self.backend.alloc_prep(prep)?;
        let mut qubits = vec![input];
        for _ in 0..level {
            let mut next = Vec::with_capacity(qubits.len() * self.code.n());
            for &q in &qubits {
                next.extend(enc.encode(&mut self.backend, q)?);
            }
            qubits = next;
        }
        let id = self.next;
        self.next += 1;
        self.grids.insert(id, PhysGrid { level, qubits });
        Ok(id)
    }

    pub fn inject(&mut self, g: GridId, slot: usize, p: Pauli) -> Result<(), BackendError> {
        let q = self.grid(g)?.qubits[slot];
        if let Some(gate) = p.gate(q) {
            self.backend.apply(&gate)?;
        }
        Ok(())
    }

    pub fn transversal(&mut self, g: GridId, op: SingleOp) -> Result<(), BackendError> {
        let qs = self.grid(g)?.qubits.clone();
        for q in qs {
            self.backend.apply(&op.gate(q))?;
        }
        Ok(())
    }

    pub fn transversal_pair(&mut self, op: PairOp, c: GridId, t: GridId) -> Result<(), BackendError> {
        let qc = self.grid(c)?.qubits.clone();
        let qt = self.grid(t)?.qubits.clone();
        if qc.len() != qt.len() {
            return Err(BackendError::Unsupported("grids of different levels".into()));
        }
        for (a, b) in qc.into_iter().zip(qt) {
            self.backend.apply(&op.gate(a, b))?;
        }
        Ok(())
    }

    pub fn logical_pauli(&mut self, g: GridId, p: Pauli) -> Result<(), BackendError> {
        let grid = self.grid(g)?;
        let support = logical_support(&self.code, p, grid.level);
        let qs: Vec<usize> = support.iter().map(|&s| grid.qubits[s]).collect();
        for q in qs {
            if let Some(gate) = p.gate(q) {
                self.backend.apply(&gate)?;
            }
        }
        Ok(())
    }

    /// Measures every slot in Z (slot order), releasing the grid.
    pub fn measure_z(&mut self, g: GridId, rng: &mut dyn RngCore) -> Result<Vec<u8>, BackendError> {
        let grid = self.grids.remove(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))?;
        let mut bits = Vec::with_capacity(grid.qubits.len());
        for q in grid.qubits {
            bits.push(self.backend.measure_z(q, rng)?);
            self.backend.release(q)?;
        }
        Ok(bits)
    }

    /// Removes a grid from the bookkeeping without touching its qubits; the caller owns them.
    pub fn take_grid(&mut self, g: GridId) -> Result<Vec<usize>, BackendError> {
        self.grids
            .remove(&g)
            .map(|pg| pg.qubits)
            .ok_or(BackendError::Unsupported(format!("unknown grid {g}")))
    }
}

/// Slots carrying the logical `X̄` (or `Z̄`) representative of a level-`level` grid.
pub fn logical_support(code: &CssCode, p: Pauli, level: u32) -> Vec<usize> {
    let rep = match p {
        Pauli::X => code.x_logical(),
        Pauli::Z => code.z_logical(),
        Pauli::Y | Pauli::I => panic!("logical support is defined for X and Z"),
    };
    let n = code.n();
    let mut slots = vec![0usize];
    for _ in 0..level {
        slots = slots.iter().flat_map(|&s| rep.ones_iter().map(move |j| s * n + j)).collect();
    }
    slots
}

/// Physical single-qubit gate applied to every slot of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SingleOp {
    H,
    P,
    Pdg,
}

impl SingleOp {
    pub fn gate(self, q: usize) -> Gate {
        match self {
            SingleOp::H => Gate::H(q),
            SingleOp::P => Gate::P(q),
            SingleOp::Pdg => Gate::Pdg(q),
        }
    }
}

/// Physical two-qubit gate applied slot-by-slot between two grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PairOp {
    Cnot,
    Cg,
}

impl PairOp {
    pub fn gate(self, c: usize, t: usize) -> Gate {
        match self {
            PairOp::Cnot => Gate::Cnot(c, t),
            PairOp::Cg => Gate::Cg(c, t),
        }
    }
}

/// Grid handle.
pub type GridId = usize;
