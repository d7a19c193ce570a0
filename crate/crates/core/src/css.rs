//! CSS quantum codes built from a pair of classical codes `(V, W)` with `V* ⊆ W`.
//!
//! Conventions: Z-type stabilizers are the parity checks of `V`, X-type stabilizers
//! the parity checks of `W` (generators of `W*`). The logical basis state `|b̄⟩` is the
//! uniform superposition over the coset of `W*` in `V` carrying value `b`, so a Z
//! measurement of every qubit yields a word of `V` and an X measurement a word of `W`.

use std::collections::BTreeSet;

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::backend::physical::QubitBackend;
use crate::backend::{BackendError, Gate, Pauli, Prep};
use crate::gf2::{rref, span, BinaryCode, Bits, CodeError, CosetCode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CssError {
    #[error("V* is not contained in W")]
    DualContainmentViolated,
    #[error("codes have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("code encodes {0} logical qubits, expected exactly 1")]
    LogicalDimension(isize),
    #[error("more than t errors: syndrome {syndrome:#x} has no correctable explanation")]
    TooManyErrors { syndrome: u64 },
    #[error("erasure pattern {0:?} cannot be recovered uniquely")]
    AmbiguousErasure(BTreeSet<usize>),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone)]
pub struct CssCode {
    v: BinaryCode,
    w: BinaryCode,
    n: usize,
    dist: usize,
    x_stabs: Vec<Bits>,
    z_stabs: Vec<Bits>,
    x_logical: Bits,
    z_logical: Bits,
    /// Values of Z-basis readouts: cosets of `W*` in `V`.
    z_values: CosetCode,
    /// Values of X-basis readouts: cosets of `V*` in `W`.
    x_values: CosetCode,
    transversal_clifford: bool,
}

/// Outcome of the transversal-Clifford check with the reasons for any failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalReport {
    pub ok: bool,
    pub reasons: Vec<String>,
    pub stabilizer_weights: Vec<usize>,
    pub x_logical_min_weight: usize,
    pub z_logical_min_weight: usize,
    /// Weight `n` when the all-ones word is a logical X representative.
    pub x_logical_all_ones: Option<usize>,
    pub z_logical_all_ones: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LogicalGateName {
    H,
    P,
    Cnot,
    X,
    Z,
    T,
    Cg,
    MeasZ,
    MeasX,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogicalGate {
    pub name: LogicalGateName,
    pub transversal: bool,
    pub realization: String,
}

fn min_weight_outside(code: &BinaryCode, sub: &BinaryCode) -> Bits {
    span(code.generator(), code.n())
        .into_iter()
        .filter(|c| !sub.contains(c))
        .min_by_key(|c| (c.weight(), c.clone()))
        .expect("code strictly larger than subcode")
}

impl CssCode {
    pub fn new(v: BinaryCode, w: BinaryCode) -> Result<Self, CssError> {
        if v.n() != w.n() {
            return Err(CssError::LengthMismatch(v.n(), w.n()));
        }
        let n = v.n();
        let v_dual = v.dual();
        let w_dual = w.dual();
        if !v_dual.is_subcode_of(&w) {
            return Err(CssError::DualContainmentViolated);
        }
        let k = v.k() as isize + w.k() as isize - n as isize;
        if k != 1 {
            return Err(CssError::LogicalDimension(k));
        }
        let x_logical = min_weight_outside(&v, &w_dual);
        let z_logical = min_weight_outside(&w, &v_dual);
        let dist = x_logical.weight().min(z_logical.weight());
        let z_values = CosetCode::new(v.clone(), w_dual).expect("W* ⊂ V has codimension 1");
        let x_values = CosetCode::new(w.clone(), v_dual).expect("V* ⊂ W has codimension 1");
        let mut code = Self {
            x_stabs: w.parity_check().to_vec(),
            z_stabs: v.parity_check().to_vec(),
            v,
            w,
            n,
            dist,
            x_logical,
            z_logical,
            z_values,
            x_values,
            transversal_clifford: false,
        };
        code.transversal_clifford = code.check_transversal_cliffords().ok;
        Ok(code)
    }

    /// Steane `[[7,1,3]]`: `V = W` = Hamming `[7,4,3]`.
    pub fn steane() -> Self {
        let h = BinaryCode::hamming7();
        Self::new(h.clone(), h).expect("Steane code")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self) -> usize {
        self.dist
    }

    pub fn t(&self) -> usize {
        self.dist.saturating_sub(1) / 2
    }

    pub fn v(&self) -> &BinaryCode {
        &self.v
    }

    pub fn w(&self) -> &BinaryCode {
        &self.w
    }

    pub fn x_stabilizers(&self) -> &[Bits] {
        &self.x_stabs
    }

    pub fn z_stabilizers(&self) -> &[Bits] {
        &self.z_stabs
    }

    pub fn x_logical(&self) -> &Bits {
        &self.x_logical
    }

    pub fn z_logical(&self) -> &Bits {
        &self.z_logical
    }

    pub fn z_values(&self) -> &CosetCode {
        &self.z_values
    }

    pub fn x_values(&self) -> &CosetCode {
        &self.x_values
    }

    pub fn transversal_clifford(&self) -> bool {
        self.transversal_clifford
    }

    /// Whether `P` applied to every qubit of a level-1 block acts as logical `P`
    /// (`true`) or logical `P†` (`false`). Conjugating `X̄` by `P^{⊗n}` gives
    /// `i^{|x̄|-1}·Ȳ` up to the sign convention, so weight ≡ 1 mod 4 yields `P`.
    pub fn transversal_p_is_logical_p(&self) -> bool {
        self.x_logical.weight() % 4 == 1
    }

    /// Same question for a code concatenated `level` times.
    pub fn transversal_p_is_logical_p_at(&self, level: u32) -> bool {
        self.transversal_p_is_logical_p() || level % 2 == 0
    }

    pub fn check_transversal_cliffords(&self) -> TransversalReport {
        let mut reasons = Vec::new();
        if !self.v.same_code(&self.w) {
            reasons.push("property 1: V ≠ W".to_string());
        }
        let stabilizer_weights: Vec<usize> =
            self.x_stabs.iter().chain(&self.z_stabs).map(Bits::weight).collect();
        if stabilizer_weights.is_empty() {
            reasons.push("no stabilizer generators".to_string());
        }
        // checked over the whole stabilizer group so the verdict does not depend on the
        // generator basis
        let bad: BTreeSet<usize> = span(&self.x_stabs, self.n)
            .iter()
            .chain(span(&self.z_stabs, self.n).iter())
            .map(Bits::weight)
            .filter(|w| w % 4 != 0)
            .collect();
        for w in bad {
            reasons.push(format!("stabilizer weight {w} ≢ 0 mod 4"));
        }
        let xw = self.x_logical.weight();
        let zw = self.z_logical.weight();
        if xw % 2 == 0 {
            reasons.push(format!("logical X weight {xw} ≢ 1 or 3 mod 4"));
        }
        if zw % 2 == 0 {
            reasons.push(format!("logical Z weight {zw} ≢ 1 or 3 mod 4"));
        }
        let ones = Bits::ones(self.n);
        // the all-ones word is a logical representative iff it lies in the code but not
        // in the span of the stabilizers of the same type
        let all_ones = |code: &BinaryCode, stabs: &[Bits]| {
            let logical = code.contains(&ones)
                && !crate::gf2::row_space_contains(stabs, std::slice::from_ref(&ones), self.n);
            logical.then_some(self.n)
        };
        let x_all = all_ones(&self.v, &self.x_stabs);
        let z_all = all_ones(&self.w, &self.z_stabs);
        TransversalReport {
            ok: reasons.is_empty(),
            reasons,
            stabilizer_weights,
            x_logical_min_weight: xw,
            z_logical_min_weight: zw,
            x_logical_all_ones: x_all,
            z_logical_all_ones: z_all,
        }
    }

    pub fn logical_gates(&self) -> Vec<LogicalGate> {
        let t = self.transversal_clifford;
        let p_real = if self.transversal_p_is_logical_p() { "P on every qubit" } else { "P† on every qubit" };
        vec![
            LogicalGate { name: LogicalGateName::H, transversal: t, realization: "H on every qubit".into() },
            LogicalGate { name: LogicalGateName::P, transversal: t, realization: p_real.into() },
            LogicalGate { name: LogicalGateName::Cnot, transversal: true, realization: "CNOT between matching qubits".into() },
            LogicalGate { name: LogicalGateName::X, transversal: true, realization: format!("X on {:?}", self.x_logical.support()) },
            LogicalGate { name: LogicalGateName::Z, transversal: true, realization: format!("Z on {:?}", self.z_logical.support()) },
            LogicalGate { name: LogicalGateName::MeasZ, transversal: true, realization: "Z on every qubit, decode against V".into() },
            LogicalGate { name: LogicalGateName::MeasX, transversal: true, realization: "X on every qubit, decode against W".into() },
            LogicalGate { name: LogicalGateName::T, transversal: false, realization: "magic-state gate teleportation".into() },
            LogicalGate { name: LogicalGateName::Cg, transversal: false, realization: "ideal logical controlled-G".into() },
        ]
    }

    /// Clifford circuit mapping `|ψ⟩` on position `input` and `|0⟩` elsewhere to `|ψ̄⟩`.
    pub fn encoding_circuit(&self) -> EncodingCircuit {
        let mut rows = self.x_stabs.clone();
        let pivots = rref(&mut rows, self.n);
        let mut xbar = self.x_logical.clone();
        for (row, &p) in rows.iter().zip(&pivots) {
            if xbar.get(p) {
                xbar.xor_assign(row);
            }
        }
        let input = xbar
            .ones_iter()
            .find(|q| !pivots.contains(q))
            .expect("reduced logical has support off the pivots");
        let mut gates: Vec<Gate> =
            xbar.ones_iter().filter(|&q| q != input).map(|q| Gate::Cnot(input, q)).collect();
        for (row, &p) in rows.iter().zip(&pivots) {
            gates.push(Gate::H(p));
            gates.extend(row.ones_iter().filter(|&q| q != p).map(|q| Gate::Cnot(p, q)));
        }
        EncodingCircuit { n: self.n, input, gates }
    }

    fn measure_syndromes<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<(u64, u64), CssError> {
        let mut sx = 0u64;
        for (i, h) in self.z_stabs.iter().enumerate() {
            let anc = backend.alloc()?;
            for j in h.ones_iter() {
                backend.apply(&Gate::Cnot(qs[j], anc))?;
            }
            sx |= (backend.measure_z(anc, rng)? as u64) << i;
            backend.release(anc)?;
        }
        let mut sz = 0u64;
        for (i, g) in self.x_stabs.iter().enumerate() {
            let anc = backend.alloc_prep(&Prep::Plus)?;
            for j in g.ones_iter() {
                backend.apply(&Gate::Cnot(anc, qs[j]))?;
            }
            backend.apply(&Gate::H(anc))?;
            sz |= (backend.measure_z(anc, rng)? as u64) << i;
            backend.release(anc)?;
        }
        Ok((sx, sz))
    }

    fn decode_circuit<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
    ) -> Result<usize, CssError> {
        let enc = self.encoding_circuit();
        for g in enc.gates.iter().rev() {
            backend.apply(&g.inverse().remap(|i| qs[i]))?;
        }
        for (i, &q) in qs.iter().enumerate() {
            if i != enc.input {
                backend.release(q)?;
            }
        }
        Ok(qs[enc.input])
    }

    /// Extracts syndromes with one ancilla at a time, corrects, and runs the inverse
    /// encoding. Returns the qubit now holding the logical state; the other block
    /// qubits are released.
    pub fn correct_and_decode<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<(usize, ErrorReport), CssError> {
        assert_eq!(qs.len(), self.n);
        let (sx, sz) = self.measure_syndromes(backend, qs, rng)?;
        let ex = self.v.error_for_syndrome(sx).ok_or(CssError::TooManyErrors { syndrome: sx })?;
        let ez = self.w.error_for_syndrome(sz).ok_or(CssError::TooManyErrors { syndrome: sz })?;
        let report = self.apply_corrections(backend, qs, &ex, &ez)?;
        Ok((self.decode_circuit(backend, qs)?, report))
    }

    /// Extracts syndromes and applies the bounded-distance correction without decoding.
    pub fn correct<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<ErrorReport, CssError> {
        assert_eq!(qs.len(), self.n);
        let (sx, sz) = self.measure_syndromes(backend, qs, rng)?;
        let ex = self.v.error_for_syndrome(sx).ok_or(CssError::TooManyErrors { syndrome: sx })?;
        let ez = self.w.error_for_syndrome(sz).ok_or(CssError::TooManyErrors { syndrome: sz })?;
        self.apply_corrections(backend, qs, &ex, &ez)
    }

    fn apply_corrections<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
        ex: &Bits,
        ez: &Bits,
    ) -> Result<ErrorReport, CssError> {
        let mut report = ErrorReport::default();
        for j in 0..self.n {
            let p = Pauli::from_bits(ex.get(j), ez.get(j));
            if let Some(g) = p.gate(qs[j]) {
                backend.apply(&g)?;
                report.corrections.push((j, p));
            }
        }
        Ok(report)
    }

    /// True when every erasure pattern on `erased` is correctable: each codeword of `V`
    /// (resp. `W`) supported on it is a stabilizer.
    pub fn erasure_recoverable(&self, erased: &BTreeSet<usize>) -> bool {
        let support: Vec<usize> = erased.iter().copied().collect();
        let ok = |code: &BinaryCode, stabs: &[Bits]| match code.solve_on_support(0, &support) {
            Ok((_, kernel)) => kernel.iter().all(|k| crate::gf2::row_space_contains(stabs, std::slice::from_ref(k), self.n)),
            Err(_) => false,
        };
        ok(&self.v, &self.x_stabs) && ok(&self.w, &self.z_stabs)
    }

    /// Recovers the logical qubit when only the positions in `kept` are trusted: erased
    /// qubits are reset to `|0⟩`, syndromes are measured and the error is solved on the
    /// erased support.
    pub fn erasure_recover<B: QubitBackend + ?Sized>(
        &self,
        backend: &mut B,
        qs: &[usize],
        kept: &BTreeSet<usize>,
        rng: &mut dyn RngCore,
    ) -> Result<(usize, ErrorReport), CssError> {
        let erased: BTreeSet<usize> = (0..self.n).filter(|j| !kept.contains(j)).collect();
        if !self.erasure_recoverable(&erased) {
            return Err(CssError::AmbiguousErasure(erased));
        }
        for &j in &erased {
            backend.reset(qs[j], rng)?;
        }
        let (sx, sz) = self.measure_syndromes(backend, qs, rng)?;
        let support: Vec<usize> = erased.iter().copied().collect();
        let (ex, _) = self.v.solve_on_support(sx, &support)?;
        let (ez, _) = self.w.solve_on_support(sz, &support)?;
        let report = self.apply_corrections(backend, qs, &ex, &ez)?;
        Ok((self.decode_circuit(backend, qs)?, report))
    }
}

/// Positions corrected by a decoder, with the Pauli applied.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub corrections: Vec<(usize, Pauli)>,
}

impl ErrorReport {
    pub fn positions(&self) -> BTreeSet<usize> {
        self.corrections.iter().map(|&(j, _)| j).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingCircuit {
    pub n: usize,
    /// Position carrying the unencoded input.
    pub input: usize,
    pub gates: Vec<Gate>,
}

impl EncodingCircuit {
    /// Applies the circuit to `qs` (input already on `qs[input]`, others in `|0⟩`).
    pub fn apply<B: QubitBackend + ?Sized>(&self, backend: &mut B, qs: &[usize]) -> Result<(), BackendError> {
        for g in &self.gates {
            backend.apply(&g.remap(|i| qs[i]))?;
        }
        Ok(())
    }

    /// Allocates `n - 1` fresh qubits around `input_qubit` and encodes. Returns the block.
    pub fn encode<B: QubitBackend + ?Sized>(&self, backend: &mut B, input_qubit: usize) -> Result<Vec<usize>, BackendError> {
        let mut qs = Vec::with_capacity(self.n);
        for i in 0..self.n {
            qs.push(if i == self.input { input_qubit } else { backend.alloc()? });
        }
        self.apply(backend, &qs)?;
        Ok(qs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::statevector::StateVector;
    use crate::backend::tableau::Tableau;
    use crate::backend::{magic_state, pure_fidelity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn steane_parameters() {
        let c = CssCode::steane();
        assert_eq!((c.n(), c.dist(), c.t()), (7, 3, 1));
        assert!(c.transversal_clifford());
        let r = c.check_transversal_cliffords();
        assert!(r.ok, "{:?}", r.reasons);
        assert!(r.stabilizer_weights.iter().all(|&w| w == 4));
        assert_eq!(r.x_logical_min_weight, 3);
        assert_eq!(r.x_logical_all_ones, Some(7));
        assert!(!c.transversal_p_is_logical_p());
        assert!(c.transversal_p_is_logical_p_at(2));
    }

    #[test]
    fn even_weight_pair_violates_containment() {
        // V = W = [3,2,2]: V* is the repetition code, which is not inside [3,2,2]
        let e = BinaryCode::even_weight(3);
        assert_eq!(CssCode::new(e.clone(), e).unwrap_err(), CssError::DualContainmentViolated);
    }

    #[test]
    fn trivial_full_space_code() {
        let f = BinaryCode::full_space(1);
        let c = CssCode::new(f.clone(), f).unwrap();
        assert_eq!(c.dist(), 1);
        assert!(!c.transversal_clifford());
    }

    #[test]
    fn weight_six_stabilizer_fails_check() {
        let rows: Vec<Bits> = ["111111000", "110000110", "101000101", "100100011"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let v = BinaryCode::from_generator(9, rows).unwrap().dual();
        let c = CssCode::new(v.clone(), v).unwrap();
        let r = c.check_transversal_cliffords();
        assert!(!r.ok);
        assert!(r.reasons.iter().any(|s| s == "stabilizer weight 6 ≢ 0 mod 4"), "{:?}", r.reasons);
    }

    #[test]
    fn v_not_w_fails_property_one() {
        let v = BinaryCode::hamming7();
        let w = BinaryCode::full_space(7);
        // V* (simplex) ⊆ full space; logical dimension 4 + 7 - 7 = 4 ≠ 1
        assert!(matches!(CssCode::new(v.clone(), w), Err(CssError::LogicalDimension(4))));
        // a genuine single-logical pair with V ≠ W
        let c = CssCode::new(BinaryCode::repetition(3), BinaryCode::full_space(3)).unwrap();
        assert!(c.check_transversal_cliffords().reasons.iter().any(|r| r.starts_with("property 1")));
    }

    fn encode_sv(code: &CssCode, amps: [crate::backend::C64; 2]) -> (StateVector, Vec<usize>) {
        let mut sv = StateVector::default();
        let q = sv.alloc_state(amps);
        let qs = code.encoding_circuit().encode(&mut sv, q).unwrap();
        (sv, qs)
    }

    #[test]
    fn encoded_zero_and_plus_are_stabilized() {
        let code = CssCode::steane();
        for (prep, logical) in [(Prep::Zero, Pauli::Z), (Prep::Plus, Pauli::X)] {
            let mut t = Tableau::new(7);
            let q = QubitBackend::alloc_prep(&mut t, &prep).unwrap();
            let qs = code.encoding_circuit().encode(&mut t, q).unwrap();
            for g in code.x_stabilizers() {
                let p: Vec<_> = g.ones_iter().map(|j| (qs[j], Pauli::X)).collect();
                assert_eq!(t.expectation(&p), 1.0);
            }
            for h in code.z_stabilizers() {
                let p: Vec<_> = h.ones_iter().map(|j| (qs[j], Pauli::Z)).collect();
                assert_eq!(t.expectation(&p), 1.0);
            }
            let rep = if logical == Pauli::Z { code.z_logical() } else { code.x_logical() };
            let p: Vec<_> = rep.ones_iter().map(|j| (qs[j], logical)).collect();
            assert_eq!(t.expectation(&p), 1.0);
        }
    }

    #[test]
    fn magic_round_trip() {
        let code = CssCode::steane();
        let (mut sv, qs) = encode_sv(&code, magic_state());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (out, rep) = code.correct_and_decode(&mut sv, &qs, &mut rng).unwrap();
        assert!(rep.corrections.is_empty());
        let f = pure_fidelity(&sv.pure_state(&[out]).unwrap(), &magic_state()).unwrap();
        assert!(f > 1.0 - 1e-12);
    }

    #[test]
    fn single_x_is_reported() {
        let code = CssCode::steane();
        let (mut sv, qs) = encode_sv(&code, Prep::Plus.amplitudes());
        sv.apply(&Gate::X(qs[4])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (out, rep) = code.correct_and_decode(&mut sv, &qs, &mut rng).unwrap();
        assert_eq!(rep.corrections, vec![(4, Pauli::X)]);
        let f = pure_fidelity(&sv.pure_state(&[out]).unwrap(), &Prep::Plus.amplitudes()).unwrap();
        assert!(f > 1.0 - 1e-12);
    }

    #[test]
    fn erasure_keeps_five_of_seven() {
        let code = CssCode::steane();
        let (mut sv, qs) = encode_sv(&code, magic_state());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let kept: BTreeSet<usize> = [0, 2, 3, 5, 6].into();
        let (out, _) = code.erasure_recover(&mut sv, &qs, &kept, &mut rng).unwrap();
        let f = pure_fidelity(&sv.pure_state(&[out]).unwrap(), &magic_state()).unwrap();
        assert!(f > 1.0 - 1e-12);
    }

    #[test]
    fn three_erasures_are_ambiguous() {
        let code = CssCode::steane();
        let (mut sv, qs) = encode_sv(&code, Prep::Zero.amplitudes());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // {0,1,2} supports the weight-3 logical 1110000
        let kept: BTreeSet<usize> = [3, 4, 5, 6].into();
        assert!(matches!(
            code.erasure_recover(&mut sv, &qs, &kept, &mut rng),
            Err(CssError::AmbiguousErasure(_))
        ));
    }
}
