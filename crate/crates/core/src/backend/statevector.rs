//! Dense statevector simulator.
//!
//! The state is kept as a product of independent components, each a dense vector over
//! the qubits it contains. A two-qubit gate across components merges them; a measured
//! qubit is split back out. The capacity limit applies per component, so many
//! unentangled blocks can coexist cheaply.

use std::collections::HashMap;

use rand::RngCore;

use super::{draw_unit, gate_matrix, BackendError, Gate, Mat2, C64};

pub const DEFAULT_CAPACITY: usize = 22;

#[derive(Debug, Clone)]
struct Component {
    /// Bit `i` of an amplitude index is the value of `qubits[i]`.
    qubits: Vec<usize>,
    amps: Vec<C64>,
}

impl Component {
    fn pos(&self, q: usize) -> usize {
        self.qubits.iter().position(|&x| x == q).expect("qubit in component")
    }

    fn prob_one(&self, pos: usize) -> (f64, f64) {
        let mask = 1usize << pos;
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        (p0, p1)
    }

    /// Keeps the branch where `qubits[pos] = bit`, renormalises and removes that qubit.
    fn collapse_remove(&mut self, pos: usize, bit: u8) {
        let mask = 1usize << pos;
        let low = mask - 1;
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        for j in 0..self.amps.len() / 2 {
            let i = (j & low) | ((j & !low) << 1) | if bit == 1 { mask } else { 0 };
            out.push(self.amps[i]);
        }
        let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for a in &mut out {
                *a /= norm;
            }
        }
        self.amps = out;
        self.qubits.remove(pos);
    }

    fn apply_1q(&mut self, pos: usize, m: &Mat2) {
        let mask = 1usize << pos;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, cpos: usize, tpos: usize, m: &Mat2) {
        let cm = 1usize << cpos;
        let tm = 1usize << tpos;
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | tm];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | tm] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    capacity: usize,
    comps: Vec<Option<Component>>,
    owner: HashMap<usize, usize>,
    next_id: usize,
}

impl Default for StateVector {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY)
    }
}

impl StateVector {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, comps: Vec::new(), owner: HashMap::new(), next_id: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn live_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn largest_component(&self) -> usize {
        self.comps.iter().flatten().map(|c| c.qubits.len()).max().unwrap_or(0)
    }

    fn push_comp(&mut self, c: Component) -> usize {
        let idx = match self.comps.iter().position(Option::is_none) {
            Some(i) => i,
            None => {
                self.comps.push(None);
                self.comps.len() - 1
            }
        };
        for &q in &c.qubits {
            self.owner.insert(q, idx);
        }
        self.comps[idx] = Some(c);
        idx
    }

    /// New qubit in `|0⟩`.
    pub fn alloc(&mut self) -> usize {
        self.alloc_state([C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    /// New qubit in the normalised state `a|0⟩ + b|1⟩`.
    pub fn alloc_state(&mut self, amps: [C64; 2]) -> usize {
        let q = self.next_id;
        self.next_id += 1;
        self.push_comp(Component { qubits: vec![q], amps: amps.to_vec() });
        q
    }

    fn comp_of(&self, q: usize) -> Result<usize, BackendError> {
        self.owner.get(&q).copied().ok_or(BackendError::UnknownQubit(q))
    }

    fn comp(&self, idx: usize) -> &Component {
        self.comps[idx].as_ref().expect("live component")
    }

    fn comp_mut(&mut self, idx: usize) -> &mut Component {
        self.comps[idx].as_mut().expect("live component")
    }

    /// Merges the components of `a` and `b`, returning the merged index.
    fn join(&mut self, a: usize, b: usize) -> Result<usize, BackendError> {
        let ca = self.comp_of(a)?;
        let cb = self.comp_of(b)?;
        if ca == cb {
            return Ok(ca);
        }
        let needed = self.comp(ca).qubits.len() + self.comp(cb).qubits.len();
        if needed > self.capacity {
            return Err(BackendError::Capacity { needed, cap: self.capacity });
        }
        let x = self.comps[ca].take().unwrap();
        let y = self.comps[cb].take().unwrap();
        let lx = x.qubits.len();
        let mut amps = vec![C64::new(0.0, 0.0); 1 << needed];
        for (j, bj) in y.amps.iter().enumerate() {
            if bj.norm_sqr() == 0.0 {
                continue;
            }
            for (i, ai) in x.amps.iter().enumerate() {
                amps[i | (j << lx)] = ai * bj;
            }
        }
        let mut qubits = x.qubits;
        qubits.extend(y.qubits);
        Ok(self.push_comp(Component { qubits, amps }))
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), BackendError> {
        match *g {
            Gate::Cnot(c, t) | Gate::Cg(c, t) => {
                if c == t {
                    return Err(BackendError::UnsupportedGate(*g));
                }
                let idx = self.join(c, t)?;
                let m = if matches!(g, Gate::Cnot(..)) {
                    gate_matrix(Gate::X(0)).unwrap()
                } else {
                    super::cxp_dagger_phase_convention()
                };
                let comp = self.comp_mut(idx);
                let (cp, tp) = (comp.pos(c), comp.pos(t));
                comp.apply_controlled(cp, tp, &m);
            }
            _ => {
                let q = g.qubits()[0];
                let idx = self.comp_of(q)?;
                let m = gate_matrix(*g).expect("single-qubit gate");
                let comp = self.comp_mut(idx);
                let p = comp.pos(q);
                comp.apply_1q(p, &m);
            }
        }
        Ok(())
    }

    /// Applies an arbitrary single-qubit unitary.
    pub fn apply_unitary(&mut self, q: usize, m: &Mat2) -> Result<(), BackendError> {
        let idx = self.comp_of(q)?;
        let comp = self.comp_mut(idx);
        let p = comp.pos(q);
        comp.apply_1q(p, m);
        Ok(())
    }

    /// Applies a controlled single-qubit unitary.
    pub fn apply_controlled_unitary(&mut self, c: usize, t: usize, m: &Mat2) -> Result<(), BackendError> {
        let idx = self.join(c, t)?;
        let comp = self.comp_mut(idx);
        let (cp, tp) = (comp.pos(c), comp.pos(t));
        comp.apply_controlled(cp, tp, m);
        Ok(())
    }

    /// Probability of reading 0 in a Z measurement.
    pub fn prob_zero(&self, q: usize) -> Result<f64, BackendError> {
        let comp = self.comp(self.comp_of(q)?);
        let (p0, p1) = comp.prob_one(comp.pos(q));
        Ok(p0 / (p0 + p1))
    }

    /// Born-rule Z measurement consuming one draw; the qubit stays allocated in `|outcome⟩`.
    pub fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<u8, BackendError> {
        let p0 = self.prob_zero(q)?;
        let bit = u8::from(draw_unit(rng) >= p0);
        self.project(q, bit)?;
        Ok(bit)
    }

    /// Projects onto `q = bit` (without sampling) and splits `q` into its own component.
    pub fn project(&mut self, q: usize, bit: u8) -> Result<(), BackendError> {
        let idx = self.comp_of(q)?;
        let mut comp = self.comps[idx].take().unwrap();
        let pos = comp.pos(q);
        comp.collapse_remove(pos, bit);
        self.owner.remove(&q);
        if !comp.qubits.is_empty() {
            self.comps[idx] = Some(comp);
        }
        let amps = if bit == 0 {
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        } else {
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        };
        self.push_comp(Component { qubits: vec![q], amps });
        Ok(())
    }

    /// Removes a qubit that is not entangled with anything else.
    pub fn release(&mut self, q: usize) -> Result<(), BackendError> {
        let idx = self.comp_of(q)?;
        if self.comp(idx).qubits.len() > 1 {
            let p0 = self.prob_zero(q)?;
            if p0 > 1.0 - 1e-12 {
                self.project(q, 0)?;
            } else if p0 < 1e-12 {
                self.project(q, 1)?;
            } else {
                return Err(BackendError::Entangled(q));
            }
        }
        let idx = self.comp_of(q)?;
        self.comps[idx] = None;
        self.owner.remove(&q);
        Ok(())
    }

    /// Measures `q` and returns it to `|0⟩`.
    pub fn reset(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<(), BackendError> {
        if self.measure_z(q, rng)? == 1 {
            self.apply(&Gate::X(q))?;
        }
        Ok(())
    }

    /// Reduced density matrix over `qs` (bit `i` of the row index is `qs[i]`).
    pub fn reduced_density(&self, qs: &[usize]) -> Result<Vec<Vec<C64>>, BackendError> {
        let mut result = vec![vec![C64::new(1.0, 0.0)]];
        let mut order: Vec<usize> = Vec::new();
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for &q in qs {
            let c = self.comp_of(q)?;
            match groups.iter_mut().find(|(ci, _)| *ci == c) {
                Some((_, v)) => v.push(q),
                None => groups.push((c, vec![q])),
            }
        }
        for (ci, sub) in &groups {
            let rho = partial_density(self.comp(*ci), sub);
            result = kron_mat(&rho, &result);
            // the newly added factor occupies the high bits
            let mut new_order = order.clone();
            new_order.extend(sub.iter().copied());
            order = new_order;
        }
        // permute from `order` to `qs`
        let k = qs.len();
        let perm: Vec<usize> = qs.iter().map(|q| order.iter().position(|x| x == q).unwrap()).collect();
        let map = |i: usize| -> usize {
            let mut j = 0;
            for (target_bit, &src_bit) in perm.iter().enumerate() {
                if i >> target_bit & 1 == 1 {
                    j |= 1 << src_bit;
                }
            }
            j
        };
        let dim = 1 << k;
        let mut out = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, e) in row.iter_mut().enumerate() {
                *e = result[map(a)][map(b)];
            }
        }
        Ok(out)
    }

    pub fn single_density(&self, q: usize) -> Result<Mat2, BackendError> {
        let r = self.reduced_density(&[q])?;
        Ok([[r[0][0], r[0][1]], [r[1][0], r[1][1]]])
    }

    /// Pure state over `qs`, which must together form whole components.
    pub fn pure_state(&self, qs: &[usize]) -> Result<Vec<C64>, BackendError> {
        let mut comps: Vec<usize> = Vec::new();
        for &q in qs {
            let c = self.comp_of(q)?;
            if !comps.contains(&c) {
                comps.push(c);
            }
        }
        let total: usize = comps.iter().map(|&c| self.comp(c).qubits.len()).sum();
        if total != qs.len() {
            return Err(BackendError::Entangled(qs[0]));
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        let mut order: Vec<usize> = Vec::new();
        for &c in &comps {
            let comp = self.comp(c);
            let mut next = vec![C64::new(0.0, 0.0); amps.len() * comp.amps.len()];
            for (j, b) in comp.amps.iter().enumerate() {
                for (i, a) in amps.iter().enumerate() {
                    next[i | (j << order.len())] = a * b;
                }
            }
            amps = next;
            order.extend(comp.qubits.iter().copied());
        }
        let perm: Vec<usize> = qs.iter().map(|q| order.iter().position(|x| x == q).unwrap()).collect();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut j = 0;
            for (tb, &sb) in perm.iter().enumerate() {
                if i >> tb & 1 == 1 {
                    j |= 1 << sb;
                }
            }
            *o = amps[j];
        }
        Ok(out)
    }

    /// Largest deviation of any component norm from 1.
    pub fn norm_error(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .map(|c| (c.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn partial_density(comp: &Component, keep: &[usize]) -> Vec<Vec<C64>> {
    let kp: Vec<usize> = keep.iter().map(|&q| comp.pos(q)).collect();
    let kmask: usize = kp.iter().map(|p| 1usize << p).sum();
    let dim = 1 << keep.len();
    let mut rho = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    let split = |i: usize| -> usize {
        kp.iter().enumerate().fold(0, |acc, (b, &p)| acc | (((i >> p) & 1) << b))
    };
    let n = comp.amps.len();
    // group indices by their traced-out part
    let mut by_rest: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
    for i in 0..n {
        let a = comp.amps[i];
        if a.norm_sqr() == 0.0 {
            continue;
        }
        by_rest.entry(i & !kmask).or_default().push((split(i), a));
    }
    for entries in by_rest.values() {
        for &(x, ax) in entries {
            for &(y, ay) in entries {
                rho[x][y] += ax * ay.conj();
            }
        }
    }
    rho
}

/// `a ⊗ b` with `b` on the low bits.
fn kron_mat(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let (da, db) = (a.len(), b.len());
    let mut out = vec![vec![C64::new(0.0, 0.0); da * db]; da * db];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hadamard_on_zero_is_plus() {
        let mut sv = StateVector::default();
        let q = sv.alloc();
        sv.apply(&Gate::H(q)).unwrap();
        let s = sv.pure_state(&[q]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0].re - r).abs() < 1e-15 && (s[1].re - r).abs() < 1e-15);
    }

    #[test]
    fn measuring_one_gives_one() {
        let mut sv = StateVector::default();
        let q = sv.alloc();
        sv.apply(&Gate::X(q)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(sv.measure_z(q, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn bell_pair_reduced_state_is_mixed() {
        let mut sv = StateVector::default();
        let a = sv.alloc();
        let b = sv.alloc();
        sv.apply(&Gate::H(a)).unwrap();
        sv.apply(&Gate::Cnot(a, b)).unwrap();
        let rho = sv.single_density(b).unwrap();
        assert!((rho[0][0].re - 0.5).abs() < 1e-12 && rho[0][1].norm() < 1e-12);
        assert!(sv.release(a).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ma = sv.measure_z(a, &mut rng).unwrap();
        let mb = sv.measure_z(b, &mut rng).unwrap();
        assert_eq!(ma, mb);
        sv.release(a).unwrap();
        assert_eq!(sv.live_qubits(), 1);
    }

    #[test]
    fn reduced_density_respects_order() {
        let mut sv = StateVector::default();
        let a = sv.alloc();
        let b = sv.alloc();
        sv.apply(&Gate::X(b)).unwrap();
        let r = sv.reduced_density(&[a, b]).unwrap();
        // |a=0, b=1⟩ is index 2 in [a, b] order
        assert!((r[2][2].re - 1.0).abs() < 1e-12);
        let r = sv.reduced_density(&[b, a]).unwrap();
        assert!((r[1][1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut sv = StateVector::new(3);
        let q: Vec<usize> = (0..4).map(|_| sv.alloc()).collect();
        sv.apply(&Gate::Cnot(q[0], q[1])).unwrap();
        sv.apply(&Gate::Cnot(q[1], q[2])).unwrap();
        assert!(matches!(sv.apply(&Gate::Cnot(q[2], q[3])), Err(BackendError::Capacity { .. })));
    }

    #[test]
    fn controlled_g_keeps_plus_magic() {
        let mut sv = StateVector::default();
        let c = sv.alloc();
        let t = sv.alloc_state(super::super::magic_state());
        sv.apply(&Gate::H(c)).unwrap();
        let before = sv.reduced_density(&[c, t]).unwrap();
        sv.apply(&Gate::Cg(c, t)).unwrap();
        let after = sv.reduced_density(&[c, t]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((before[i][j] - after[i][j]).norm() < 1e-12);
            }
        }
    }
}
