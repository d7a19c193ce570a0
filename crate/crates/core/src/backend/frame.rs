//! Logical-frame backend.
//!
//! Each encoded grid is one wire of a logical statevector plus a Pauli frame over its
//! physical slots. Transversal gates act on the wire as the corresponding logical gate
//! and conjugate the frame slot-by-slot. A Z readout samples the physical bits one at a
//! time from the exact conditional distribution of the encoded state, so it consumes
//! the measurement stream exactly as a qubit-level simulation of the same grid would.

use std::collections::HashMap;

use rand::RngCore;

use super::physical::{GridId, PairOp, SingleOp};
use super::statevector::StateVector;
use super::{draw_unit, mat2_mul, BackendError, Gate, Mat2, Pauli, Prep};
use crate::css::CssCode;
use crate::gf2::Bits;

#[derive(Debug, Clone)]
pub struct FrameGrid {
    pub wire: usize,
    pub level: u32,
    pub x: Bits,
    pub z: Bits,
}

impl FrameGrid {
    pub fn pauli(&self, slot: usize) -> Pauli {
        Pauli::from_bits(self.x.get(slot), self.z.get(slot))
    }
}

/// Record of one frame change made by an injection.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Provenance {
    pub grid: GridId,
    pub slot: usize,
    pub pauli: Pauli,
    pub tag: String,
}

#[derive(Debug, Clone)]
pub struct FrameRegister {
    code: CssCode,
    logical: StateVector,
    grids: HashMap<GridId, FrameGrid>,
    next: GridId,
    /// Codewords of each Z-readout coset (value 0, value 1).
    cosets: [Vec<Bits>; 2],
    pub provenance: Vec<Provenance>,
}

impl FrameRegister {
    pub fn new(code: CssCode) -> Self {
        let cc = code.z_values();
        let cosets = [cc.coset(0), cc.coset(1)];
        Self {
            code,
            logical: StateVector::default(),
            grids: HashMap::new(),
            next: 0,
            cosets,
            provenance: Vec::new(),
        }
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn grid(&self, g: GridId) -> Result<&FrameGrid, BackendError> {
        self.grids.get(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))
    }

    fn grid_mut(&mut self, g: GridId) -> Result<&mut FrameGrid, BackendError> {
        self.grids.get_mut(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))
    }

    pub fn logical(&self) -> &StateVector {
        &self.logical
    }

    pub fn live_grids(&self) -> usize {
        self.grids.len()
    }

    pub fn prepare(&mut self, prep: &Prep, level: u32) -> Result<GridId, BackendError> {
        let slots = self.code.n().pow(level);
        let wire = self.logical.alloc_state(prep.amplitudes());
        let id = self.next;
        self.next += 1;
        self.grids.insert(id, FrameGrid { wire, level, x: Bits::zeros(slots), z: Bits::zeros(slots) });
        Ok(id)
    }

    pub fn inject(&mut self, g: GridId, slot: usize, p: Pauli) -> Result<(), BackendError> {
        self.inject_tagged(g, slot, p, "")
    }

    pub fn inject_tagged(&mut self, g: GridId, slot: usize, p: Pauli, tag: &str) -> Result<(), BackendError> {
        let grid = self.grid_mut(g)?;
        if p.x() {
            grid.x.flip(slot);
        }
        if p.z() {
            grid.z.flip(slot);
        }
        if p != Pauli::I {
            self.provenance.push(Provenance { grid: g, slot, pauli: p, tag: tag.to_string() });
        }
        Ok(())
    }

    pub fn transversal(&mut self, g: GridId, op: SingleOp) -> Result<(), BackendError> {
        let p_is_p = |level| self.code.transversal_p_is_logical_p_at(level);
        let level = self.grid(g)?.level;
        let wire = self.grid(g)?.wire;
        let logical_gate = match op {
            SingleOp::H => Gate::H(wire),
            SingleOp::P if p_is_p(level) => Gate::P(wire),
            SingleOp::P => Gate::Pdg(wire),
            SingleOp::Pdg if p_is_p(level) => Gate::Pdg(wire),
            SingleOp::Pdg => Gate::P(wire),
        };
        self.logical.apply(&logical_gate)?;
        let grid = self.grid_mut(g)?;
        match op {
            SingleOp::H => std::mem::swap(&mut grid.x, &mut grid.z),
            SingleOp::P | SingleOp::Pdg => {
                let x = grid.x.clone();
                grid.z.xor_assign(&x);
            }
        }
        Ok(())
    }

    pub fn transversal_pair(&mut self, op: PairOp, c: GridId, t: GridId) -> Result<(), BackendError> {
        let (gc, gt) = (self.grid(c)?.clone(), self.grid(t)?.clone());
        if gc.level != gt.level {
            return Err(BackendError::Unsupported("grids of different levels".into()));
        }
        match op {
            PairOp::Cnot => {
                self.logical.apply(&Gate::Cnot(gc.wire, gt.wire))?;
                self.grid_mut(t)?.x.xor_assign(&gc.x);
                self.grid_mut(c)?.z.xor_assign(&gt.z);
            }
            PairOp::Cg => {
                // ideal logical gate: acts on the logical wires and leaves physical frames alone
                self.logical.apply(&Gate::Cg(gc.wire, gt.wire))?;
            }
        }
        Ok(())
    }

    pub fn logical_pauli(&mut self, g: GridId, p: Pauli) -> Result<(), BackendError> {
        let wire = self.grid(g)?.wire;
        if let Some(gate) = p.gate(wire) {
            self.logical.apply(&gate)?;
        }
        Ok(())
    }

    /// Samples the Z readout of every slot (slot order, one draw each), collapses the
    /// logical wire onto the decoded value and releases the grid.
    pub fn measure_z(&mut self, g: GridId, rng: &mut dyn RngCore) -> Result<Vec<u8>, BackendError> {
        let grid = self.grids.remove(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))?;
        let p0 = self.logical.prob_zero(grid.wire)?;
        let prior = [p0, 1.0 - p0];
        let (bits, value) = match grid.level {
            1 => self.sample_level1(&grid, prior, rng),
            2 => self.sample_level2(&grid, prior, rng),
            l => return Err(BackendError::Unsupported(format!("frame readout at level {l}"))),
        };
        self.logical.project(grid.wire, value)?;
        self.logical.release(grid.wire)?;
        Ok(bits)
    }

    fn sample_level1(&self, grid: &FrameGrid, prior: [f64; 2], rng: &mut dyn RngCore) -> (Vec<u8>, u8) {
        let n = self.code.n();
        let mut alive: [Vec<&Bits>; 2] = [self.cosets[0].iter().collect(), self.cosets[1].iter().collect()];
        let size = [self.cosets[0].len() as f64, self.cosets[1].len() as f64];
        let mut bits = Vec::with_capacity(n);
        for i in 0..n {
            let flip = grid.x.get(i);
            let mut w = [0.0f64; 2];
            for b in 0..2 {
                if prior[b] == 0.0 {
                    continue;
                }
                for c in &alive[b] {
                    w[(c.get(i) ^ flip) as usize] += prior[b] / size[b];
                }
            }
            let bit = u8::from(draw_unit(rng) >= w[0] / (w[0] + w[1]));
            bits.push(bit);
            for a in &mut alive {
                a.retain(|c| (c.get(i) ^ flip) as u8 == bit);
            }
        }
        let value = if alive[1].is_empty() { 0 } else { 1 };
        (bits, value)
    }

    fn sample_level2(&self, grid: &FrameGrid, prior: [f64; 2], rng: &mut dyn RngCore) -> (Vec<u8>, u8) {
        let n = self.code.n();
        let size = [self.cosets[0].len() as f64, self.cosets[1].len() as f64];
        // alive[block][v]: surviving second-level codewords of value v in that block
        let mut alive: Vec<[Vec<&Bits>; 2]> = (0..n)
            .map(|_| [self.cosets[0].iter().collect(), self.cosets[1].iter().collect()])
            .collect();
        let mut frac: Vec<[f64; 2]> = vec![[1.0, 1.0]; n];
        let weight = |frac: &[[f64; 2]]| -> f64 {
            let mut total = 0.0;
            for b in 0..2 {
                if prior[b] == 0.0 {
                    continue;
                }
                let s: f64 = self.cosets[b]
                    .iter()
                    .map(|w| (0..n).map(|j| frac[j][w.get(j) as usize]).product::<f64>())
                    .sum();
                total += prior[b] * s / size[b];
            }
            total
        };
        let mut bits = Vec::with_capacity(n * n);
        for block in 0..n {
            for pos in 0..n {
                let flip = grid.x.get(block * n + pos);
                let mut w = [0.0f64; 2];
                for (cand, wv) in w.iter_mut().enumerate() {
                    let mut f = frac.clone();
                    for v in 0..2 {
                        let cnt = alive[block][v].iter().filter(|c| (c.get(pos) ^ flip) as usize == cand).count();
                        f[block][v] = cnt as f64 / size[v];
                    }
                    *wv = weight(&f);
                }
                let bit = u8::from(draw_unit(rng) >= w[0] / (w[0] + w[1]));
                bits.push(bit);
                for v in 0..2 {
                    alive[block][v].retain(|c| (c.get(pos) ^ flip) as u8 == bit);
                    frac[block][v] = alive[block][v].len() as f64 / size[v];
                }
            }
        }
        let word = Bits::from_fn(n, |j| !alive[j][1].is_empty());
        (bits, self.code.z_values().value(&word))
    }

    /// Reduced state of a grid's logical wire after applying the residual logical Pauli.
    pub fn logical_density(&self, g: GridId, residual: Pauli) -> Result<Mat2, BackendError> {
        let rho = self.logical.single_density(self.grid(g)?.wire)?;
        Ok(match residual.gate(0).and_then(super::gate_matrix) {
            Some(p) => mat2_mul(&mat2_mul(&p, &rho), &p),
            None => rho,
        })
    }

    /// Releases a grid whose wire is no longer needed (it is measured out in Z first).
    pub fn discard(&mut self, g: GridId, rng: &mut dyn RngCore) -> Result<(), BackendError> {
        let grid = self.grids.remove(&g).ok_or(BackendError::Unsupported(format!("unknown grid {g}")))?;
        self.logical.measure_z(grid.wire, rng)?;
        self.logical.release(grid.wire)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::double_decode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_grid_with_x_frame_reads_flipped_codeword() {
        let code = CssCode::steane();
        let mut f = FrameRegister::new(code.clone());
        let g = f.prepare(&Prep::Zero, 1).unwrap();
        f.inject(g, 2, Pauli::X).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bits = f.measure_z(g, &mut rng).unwrap();
        let mut word = Bits::from_fn(7, |i| bits[i] == 1);
        word.flip(2);
        assert!(code.v().contains(&word));
        assert_eq!(code.z_values().value(&word), 0);
        let r = code.z_values().single_decode(&Bits::from_fn(7, |i| bits[i] == 1));
        assert_eq!(r.first_level, [2].into());
        assert_eq!(r.value, 0);
    }

    #[test]
    fn two_level_readout_decodes_to_logical_value() {
        let code = CssCode::steane();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for prep in [Prep::Zero, Prep::One] {
            let mut f = FrameRegister::new(code.clone());
            let g = f.prepare(&prep, 2).unwrap();
            f.inject(g, 3 * 7 + 5, Pauli::X).unwrap();
            let bits = f.measure_z(g, &mut rng).unwrap();
            let blocks: Vec<Bits> = (0..7).map(|l| Bits::from_fn(7, |j| bits[l * 7 + j] == 1)).collect();
            let r = double_decode(code.v(), &blocks);
            assert_eq!(r.value, u8::from(prep == Prep::One));
            assert_eq!(r.second_level.get(&3), Some(&[5].into()));
        }
    }

    #[test]
    fn transversal_x_with_z_frame() {
        let code = CssCode::steane();
        let mut f = FrameRegister::new(code);
        let g = f.prepare(&Prep::Zero, 1).unwrap();
        f.inject(g, 3, Pauli::Z).unwrap();
        f.logical_pauli(g, Pauli::X).unwrap();
        assert_eq!(f.grid(g).unwrap().pauli(3), Pauli::Z);
        assert!(f.logical().prob_zero(f.grid(g).unwrap().wire).unwrap() < 1e-12);
    }

    #[test]
    fn cg_leaves_frames_in_place() {
        let code = CssCode::steane();
        let mut f = FrameRegister::new(code);
        let a = f.prepare(&Prep::Plus, 1).unwrap();
        let b = f.prepare(&Prep::Magic, 1).unwrap();
        f.inject(a, 1, Pauli::X).unwrap();
        f.inject(b, 0, Pauli::Z).unwrap();
        f.transversal_pair(PairOp::Cg, a, b).unwrap();
        assert_eq!(f.grid(a).unwrap().pauli(1), Pauli::X);
        assert_eq!(f.grid(a).unwrap().pauli(0), Pauli::I);
        assert_eq!(f.grid(b).unwrap().pauli(0), Pauli::Z);
    }
}
