//! Stabilizer tableau with destabilizers (Aaronson–Gottesman), bit-packed.
//!
//! Rows `0..n` are destabilizers, `n..2n` stabilizers, row `2n` is scratch. Qubits are
//! drawn from a fixed pool; released qubits are returned to `|0⟩`.

use rand::RngCore;

use super::{draw_unit, BackendError, Gate, Mat2, Pauli};

#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
    free: Vec<usize>,
    live: Vec<bool>,
}

impl Tableau {
    /// All `capacity` qubits start in `|0⟩` and unallocated.
    pub fn new(capacity: usize) -> Self {
        let words = capacity.div_ceil(64).max(1);
        let rows = 2 * capacity + 1;
        let mut t = Self {
            n: capacity,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            r: vec![false; rows],
            free: (0..capacity).rev().collect(),
            live: vec![false; capacity],
        };
        for i in 0..capacity {
            t.set_x(i, i, true);
            t.set_z(i + capacity, i, true);
        }
        t
    }

    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn live_qubits(&self) -> usize {
        self.live.iter().filter(|&&b| b).count()
    }

    pub fn alloc(&mut self) -> Result<usize, BackendError> {
        let q = self.free.pop().ok_or(BackendError::Capacity { needed: self.n + 1, cap: self.n })?;
        self.live[q] = true;
        Ok(q)
    }

    fn check(&self, q: usize) -> Result<(), BackendError> {
        if q < self.n && self.live[q] {
            Ok(())
        } else {
            Err(BackendError::UnknownQubit(q))
        }
    }

    #[inline]
    fn get_x(&self, row: usize, q: usize) -> bool {
        self.x[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, q: usize) -> bool {
        self.z[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.words + q / 64];
        if v {
            *w |= 1 << (q % 64);
        } else {
            *w &= !(1 << (q % 64));
        }
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.words + q / 64];
        if v {
            *w |= 1 << (q % 64);
        } else {
            *w &= !(1 << (q % 64));
        }
    }

    fn rows(&self) -> usize {
        2 * self.n
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), BackendError> {
        for q in g.qubits() {
            self.check(q)?;
        }
        match *g {
            Gate::H(q) => {
                for i in 0..self.rows() {
                    let (xi, zi) = (self.get_x(i, q), self.get_z(i, q));
                    self.r[i] ^= xi && zi;
                    self.set_x(i, q, zi);
                    self.set_z(i, q, xi);
                }
            }
            Gate::P(q) => self.phase(q),
            Gate::Pdg(q) => {
                self.phase(q);
                self.phase(q);
                self.phase(q);
            }
            Gate::X(q) => {
                for i in 0..self.rows() {
                    self.r[i] ^= self.get_z(i, q);
                }
            }
            Gate::Z(q) => {
                for i in 0..self.rows() {
                    self.r[i] ^= self.get_x(i, q);
                }
            }
            Gate::Y(q) => {
                for i in 0..self.rows() {
                    self.r[i] ^= self.get_x(i, q) ^ self.get_z(i, q);
                }
            }
            Gate::Cnot(a, b) => {
                if a == b {
                    return Err(BackendError::UnsupportedGate(*g));
                }
                for i in 0..self.rows() {
                    let (xa, za, xb, zb) =
                        (self.get_x(i, a), self.get_z(i, a), self.get_x(i, b), self.get_z(i, b));
                    self.r[i] ^= xa && zb && (xb == za);
                    self.set_x(i, b, xb ^ xa);
                    self.set_z(i, a, za ^ zb);
                }
            }
            Gate::T(_) | Gate::Tdg(_) | Gate::Cg(_, _) => return Err(BackendError::UnsupportedGate(*g)),
        }
        Ok(())
    }

    fn phase(&mut self, q: usize) {
        for i in 0..self.rows() {
            let (xi, zi) = (self.get_x(i, q), self.get_z(i, q));
            self.r[i] ^= xi && zi;
            self.set_z(i, q, zi ^ xi);
        }
    }

    /// Left-multiplies row `h` by row `i`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..w {
            let (x1, z1) = (self.x[i * w + k], self.z[i * w + k]);
            let (x2, z2) = (self.x[h * w + k], self.z[h * w + k]);
            let y1 = x1 & z1;
            let xo = x1 & !z1;
            let zo = z1 & !x1;
            plus += ((y1 & z2 & !x2) | (xo & x2 & z2) | (zo & x2 & !z2)).count_ones();
            minus += ((y1 & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2)).count_ones();
            self.x[h * w + k] = x1 ^ x2;
            self.z[h * w + k] = z1 ^ z2;
        }
        let total = 2 * (self.r[h] as i64) + 2 * (self.r[i] as i64) + plus as i64 - minus as i64;
        self.r[h] = total.rem_euclid(4) == 2;
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.r[row] = false;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.r[dst] = self.r[src];
    }

    /// Z measurement consuming exactly one draw (random outcome: 0 iff draw < ½).
    pub fn measure_z(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<u8, BackendError> {
        self.check(a)?;
        let u = draw_unit(rng);
        Ok(self.measure_with(a, u))
    }

    fn measure_with(&mut self, a: usize, u: f64) -> u8 {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.get_x(p, a)) {
            for i in 0..2 * n {
                if i != p && self.get_x(i, a) {
                    self.rowsum(i, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            let bit = u >= 0.5;
            self.set_z(p, a, true);
            self.r[p] = bit;
            u8::from(bit)
        } else {
            let s = 2 * n;
            self.clear_row(s);
            for i in 0..n {
                if self.get_x(i, a) {
                    self.rowsum(s, i + n);
                }
            }
            u8::from(self.r[s])
        }
    }

    /// Outcome of a Z measurement if it is deterministic.
    pub fn deterministic_z(&mut self, a: usize) -> Option<u8> {
        let n = self.n;
        if (n..2 * n).any(|p| self.get_x(p, a)) {
            return None;
        }
        Some(self.measure_with(a, 0.0))
    }

    /// Returns a qubit to the pool; it must be in a Z eigenstate.
    pub fn release(&mut self, q: usize) -> Result<(), BackendError> {
        self.check(q)?;
        match self.deterministic_z(q) {
            Some(1) => self.apply(&Gate::X(q))?,
            Some(_) => {}
            None => return Err(BackendError::Entangled(q)),
        }
        self.live[q] = false;
        self.free.push(q);
        Ok(())
    }

    pub fn reset(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<(), BackendError> {
        if self.measure_z(q, rng)? == 1 {
            self.apply(&Gate::X(q))?;
        }
        Ok(())
    }

    /// Expectation value (−1, 0 or +1) of a Pauli string given as `(qubit, Pauli)` pairs.
    pub fn expectation(&mut self, paulis: &[(usize, Pauli)]) -> f64 {
        let n = self.n;
        let anticommutes = |t: &Self, row: usize| -> bool {
            paulis.iter().fold(false, |acc, &(q, p)| {
                acc ^ ((p.x() && t.get_z(row, q)) ^ (p.z() && t.get_x(row, q)))
            })
        };
        if (n..2 * n).any(|row| anticommutes(self, row)) {
            return 0.0;
        }
        let s = 2 * n;
        self.clear_row(s);
        for i in 0..n {
            if anticommutes(self, i) {
                self.rowsum(s, i + n);
            }
        }
        if self.r[s] {
            -1.0
        } else {
            1.0
        }
    }

    pub fn single_density(&mut self, q: usize) -> Result<Mat2, BackendError> {
        self.check(q)?;
        let x = self.expectation(&[(q, Pauli::X)]);
        let y = self.expectation(&[(q, Pauli::Y)]);
        let z = self.expectation(&[(q, Pauli::Z)]);
        Ok(super::density_from_bloch(x, y, z))
    }

    /// Checks the symplectic structure: destabilizer `i` anticommutes exactly with
    /// stabilizer `i`, all other pairs commute.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        let sym = |a: usize, b: usize| -> bool {
            (0..self.words).fold(0u32, |acc, k| {
                let w = self.words;
                acc + ((self.x[a * w + k] & self.z[b * w + k]) ^ (self.z[a * w + k] & self.x[b * w + k]))
                    .count_ones()
            }) % 2
                == 1
        };
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let expect = j == i + n && i < n;
                if sym(i, j) != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Stabilizer generators as strings over `qs` (e.g. `+ZZ`), for tests and diagnostics.
    pub fn stabilizer_strings(&self, qs: &[usize]) -> Vec<String> {
        (self.n..2 * self.n)
            .map(|row| {
                let mut s = String::from(if self.r[row] { "-" } else { "+" });
                for &q in qs {
                    s.push_str(&Pauli::from_bits(self.get_x(row, q), self.get_z(row, q)).to_string());
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cnot_maps_z1_z2_to_z1_z1z2() {
        let mut t = Tableau::new(2);
        let a = t.alloc().unwrap();
        let b = t.alloc().unwrap();
        t.apply(&Gate::Cnot(a, b)).unwrap();
        let s = t.stabilizer_strings(&[a, b]);
        assert!(s.contains(&"+ZI".to_string()));
        assert!(s.contains(&"+ZZ".to_string()));
        assert!(t.is_valid());
    }

    #[test]
    fn plus_measurement_is_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut ones = 0;
        for _ in 0..1000 {
            let mut t = Tableau::new(1);
            let q = t.alloc().unwrap();
            t.apply(&Gate::H(q)).unwrap();
            ones += t.measure_z(q, &mut rng).unwrap() as usize;
        }
        let f = ones as f64 / 1000.0;
        assert!((f - 0.5).abs() <= 0.05, "frequency {f}");
    }

    #[test]
    fn rejects_non_clifford() {
        let mut t = Tableau::new(2);
        let a = t.alloc().unwrap();
        let b = t.alloc().unwrap();
        assert!(matches!(t.apply(&Gate::T(a)), Err(BackendError::UnsupportedGate(_))));
        assert!(matches!(t.apply(&Gate::Cg(a, b)), Err(BackendError::UnsupportedGate(_))));
    }

    #[test]
    fn expectations_of_y_eigenstate() {
        let mut t = Tableau::new(1);
        let q = t.alloc().unwrap();
        t.apply(&Gate::H(q)).unwrap();
        t.apply(&Gate::P(q)).unwrap();
        assert_eq!(t.expectation(&[(q, Pauli::Y)]), 1.0);
        assert_eq!(t.expectation(&[(q, Pauli::X)]), 0.0);
        t.apply(&Gate::Z(q)).unwrap();
        assert_eq!(t.expectation(&[(q, Pauli::Y)]), -1.0);
    }

    #[test]
    fn release_recycles_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = Tableau::new(1);
        let q = t.alloc().unwrap();
        t.apply(&Gate::H(q)).unwrap();
        t.measure_z(q, &mut rng).unwrap();
        t.release(q).unwrap();
        let q = t.alloc().unwrap();
        assert_eq!(t.deterministic_z(q), Some(0));
    }
}
