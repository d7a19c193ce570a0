//! Quantum-state backends.
//!
//! * [`statevector`]: dense amplitudes, factored into independent product components.
//! * [`tableau`]: Aaronson–Gottesman stabilizer tableau (Clifford gates only).
//! * [`frame`]: logical statevector over encoded wires plus a per-slot Pauli frame.
//!
//! [`physical`] builds encoded-grid operations on top of any backend that acts on
//! individual qubits; [`QuantumRegister`] dispatches over all three.


pub mod frame;
pub mod physical;
pub mod register;
pub mod statevector;
pub mod tableau;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use register::{Prep, QuantumRegister};

pub type C64 = Complex64;

/// Random stream used for measurement sampling. Every single-qubit Z measurement
/// consumes exactly one `f64` draw `r ∈ [0,1)` and yields 0 iff `r < p0`.
pub type MeasRng = ChaCha8Rng;

pub fn draw_unit(rng: &mut dyn RngCore) -> f64 {
    // 53 random mantissa bits
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_bit(rng: &mut dyn RngCore, p0: f64) -> u8 {
    u8::from(draw_unit(rng) >= p0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    P(usize),
    Pdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    T(usize),
    Tdg(usize),
    Cnot(usize, usize),
    /// Controlled `G = e^{iπ/4}·X·P†` (control, target).
    Cg(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::P(q)
            | Gate::Pdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::T(q)
            | Gate::Tdg(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cg(a, b) => vec![a, b],
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_) | Gate::Tdg(_) | Gate::Cg(_, _))
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::P(q) => Gate::Pdg(q),
            Gate::Pdg(q) => Gate::P(q),
            Gate::T(q) => Gate::Tdg(q),
            Gate::Tdg(q) => Gate::T(q),
            g @ Gate::Cg(_, _) => g, // only used for diagnostics; C-G is not self-inverse
            g => g,
        }
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::P(q) => Gate::P(f(q)),
            Gate::Pdg(q) => Gate::Pdg(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Y(q) => Gate::Y(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::T(q) => Gate::T(f(q)),
            Gate::Tdg(q) => Gate::Tdg(f(q)),
            Gate::Cnot(a, b) => Gate::Cnot(f(a), f(b)),
            Gate::Cg(a, b) => Gate::Cg(f(a), f(b)),
        }
    }
}

/// Single-qubit Pauli with phases dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x() ^ other.x(), self.z() ^ other.z())
    }

    pub fn gate(self, q: usize) -> Option<Gate> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Gate::X(q)),
            Pauli::Y => Some(Gate::Y(q)),
            Pauli::Z => Some(Gate::Z(q)),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Statevector,
    Tableau,
    Frame,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sv" | "statevector" => Ok(BackendKind::Statevector),
            "tableau" | "stab" => Ok(BackendKind::Tableau),
            "frame" => Ok(BackendKind::Frame),
            other => Err(format!("unknown backend {other:?} (expected sv, tableau or frame)")),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BackendKind::Statevector => "sv",
            BackendKind::Tableau => "tableau",
            BackendKind::Frame => "frame",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("gate {0:?} is not supported by this backend")]
    UnsupportedGate(Gate),
    #[error("state preparation {0} is not supported by this backend")]
    UnsupportedPrep(String),
    #[error("component of {needed} qubits exceeds capacity {cap}")]
    Capacity { needed: usize, cap: usize },
    #[error("frame cannot propagate through {gate}: {detail}")]
    UnsupportedFramePropagation { gate: String, detail: String },
    #[error("operation needs matching backends")]
    BackendMismatch,
    #[error("unknown qubit {0}")]
    UnknownQubit(usize),
    #[error("qubit {0} is entangled and cannot be released")]
    Entangled(usize),
    #[error("{0}")]
    Unsupported(String),
}

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Single-qubit unitary of a one-qubit gate.
pub fn gate_matrix(g: Gate) -> Option<Mat2> {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let t = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    Some(match g {
        Gate::H(_) => [[o * r, o * r], [o * r, -o * r]],
        Gate::P(_) => [[o, z], [z, i]],
        Gate::Pdg(_) => [[o, z], [z, -i]],
        Gate::X(_) => [[z, o], [o, z]],
        Gate::Y(_) => [[z, -i], [i, z]],
        Gate::Z(_) => [[o, z], [z, -o]],
        Gate::T(_) => [[o, z], [z, t]],
        Gate::Tdg(_) => [[o, z], [z, t.conj()]],
        Gate::Cnot(_, _) | Gate::Cg(_, _) => return None,
    })
}

/// `G = e^{iπ/4}·X·P†`, normalised so that `G|m⟩ = |m⟩` for `|m⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2`.
pub fn cxp_dagger_phase_convention() -> Mat2 {
    let x = gate_matrix(Gate::X(0)).unwrap();
    let pdg = gate_matrix(Gate::Pdg(0)).unwrap();
    let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let mut g = mat2_mul(&x, &pdg);
    for row in &mut g {
        for e in row {
            *e *= phase;
        }
    }
    g
}

/// Amplitudes of `|m⟩ = T|+⟩`.
pub fn magic_state() -> [C64; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(r, 0.0), C64::from_polar(r, std::f64::consts::FRAC_PI_4)]
}

pub fn apply_mat2(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Density matrix `|ψ⟩⟨ψ|` of a normalised single-qubit state.
pub fn pure_density(psi: &[C64; 2]) -> Mat2 {
    [
        [psi[0] * psi[0].conj(), psi[0] * psi[1].conj()],
        [psi[1] * psi[0].conj(), psi[1] * psi[1].conj()],
    ]
}

/// Density matrix from Bloch-vector expectations `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
pub fn density_from_bloch(x: f64, y: f64, z: f64) -> Mat2 {
    [
        [C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
        [C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    ]
}

pub fn bloch_vector(rho: &Mat2) -> [f64; 3] {
    [2.0 * rho[1][0].re, 2.0 * rho[1][0].im, (rho[0][0] - rho[1][1]).re]
}

/// Trace distance `½‖ρ − σ‖₁` between single-qubit states (half the Bloch distance).
pub fn trace_distance(rho: &Mat2, sigma: &Mat2) -> f64 {
    let a = bloch_vector(rho);
    let b = bloch_vector(sigma);
    0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Uhlmann fidelity `(tr√(√ρ σ √ρ))²` for single-qubit states.
pub fn fidelity(rho: &Mat2, sigma: &Mat2) -> f64 {
    // closed form for 2×2: F = tr(ρσ) + 2√(det ρ · det σ)
    let tr = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| rho[i][j] * sigma[j][i])
        .sum::<C64>()
        .re;
    let det = |m: &Mat2| (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re.max(0.0);
    (tr + 2.0 * (det(rho) * det(sigma)).sqrt()).clamp(0.0, 1.0)
}

/// `|⟨a|b⟩|²`.
pub fn pure_fidelity(a: &[C64], b: &[C64]) -> Result<f64, BackendError> {
    if a.len() != b.len() {
        return Err(BackendError::BackendMismatch);
    }
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn g_stabilises_magic_state() {
        let g = cxp_dagger_phase_convention();
        let m = magic_state();
        let gm = apply_mat2(&g, &m);
        assert!(close(pure_fidelity(&gm, &m).unwrap(), 1.0, 1e-12));
        assert!((gm[0] - m[0]).norm() < 1e-12 && (gm[1] - m[1]).norm() < 1e-12);
        let ggm = apply_mat2(&g, &gm);
        assert!((ggm[0] - m[0]).norm() < 1e-12 && (ggm[1] - m[1]).norm() < 1e-12);
    }

    #[test]
    fn bare_xpdg_has_eigenvalue_minus_pi_over_4() {
        let x = gate_matrix(Gate::X(0)).unwrap();
        let pdg = gate_matrix(Gate::Pdg(0)).unwrap();
        let m = magic_state();
        let v = apply_mat2(&mat2_mul(&x, &pdg), &m);
        let lambda = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!((v[0] - lambda * m[0]).norm() < 1e-12);
        assert!((v[1] - lambda * m[1]).norm() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let one = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let plus = [C64::new(r, 0.0), C64::new(r, 0.0)];
        assert!(close(pure_fidelity(&zero, &zero).unwrap(), 1.0, 1e-15));
        assert!(close(pure_fidelity(&zero, &one).unwrap(), 0.0, 1e-15));
        assert!(close(pure_fidelity(&zero, &plus).unwrap(), 0.5, 1e-15));
        assert!(close(fidelity(&pure_density(&zero), &pure_density(&plus)), 0.5, 1e-12));
        let mixed = density_from_bloch(0.0, 0.0, 0.0);
        assert!(close(fidelity(&mixed, &pure_density(&zero)), 0.5, 1e-12));
        assert!(close(trace_distance(&pure_density(&zero), &pure_density(&one)), 1.0, 1e-12));
        assert!(pure_fidelity(&zero, &[C64::new(1.0, 0.0)]).is_err());
    }
}
