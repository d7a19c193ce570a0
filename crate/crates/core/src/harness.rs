//! Experiment harness: canned scenarios, the ideal oracle, real-vs-ideal comparison,
//! resource sweeps and report files.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adversary::{ground_truth_audit, Adversary, AdversaryError, AuditReport};
use crate::backend::register::Prep;
use crate::backend::statevector::StateVector;
use crate::backend::{bloch_vector, cxp_dagger_phase_convention, trace_distance, BackendKind, Gate, Mat2, C64};
use crate::circuit::{Circuit, CircuitError, CircuitGate, Stmt};
use crate::netsim::{hex, ledger_csv, NetworkConfig, NodeId, Phase, ResourceLedger};
use crate::protocol::{mpqc_run, NodeOutput, ProtocolError, RunResult, VerifyReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Trace distances below this are floating-point noise from the logical simulator and
/// count as exact agreement.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMode {
    VsIdealOracle,
    ResourceOnly,
}

/// Parses `0`, `1`, `+`, `-`, `+i` or `m`.
pub fn parse_prep(s: &str) -> Result<Prep, HarnessError> {
    Ok(match s.trim() {
        "0" => Prep::Zero,
        "1" => Prep::One,
        "+" => Prep::Plus,
        "-" => Prep::Minus,
        "+i" => Prep::PlusI,
        "m" => Prep::Magic,
        other => return Err(HarnessError::Config(format!("unknown input state {other:?}"))),
    })
}

/// Haar-random single-qubit state.
pub fn haar_state(rng: &mut impl Rng) -> Prep {
    let u: f64 = rng.gen();
    let phi: f64 = rng.gen::<f64>() * 2.0 * PI;
    Prep::from_amplitudes([C64::new(u.sqrt(), 0.0), C64::from_polar((1.0 - u).sqrt(), phi)])
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub scenario: String,
    pub config: NetworkConfig,
    pub circuit: Circuit,
    #[serde(skip)]
    pub inputs: Vec<Prep>,
    pub adversary: String,
    pub corrupt: Option<BTreeSet<NodeId>>,
    pub adv_seed: u64,
    pub seeds: Vec<u64>,
    pub mode: ComparisonMode,
    /// Security parameters to sweep; empty means just `config.s`.
    pub s_values: Vec<usize>,
}

/// Per-node ideal outputs of the circuit on the raw inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealOracleResult {
    pub outputs: BTreeMap<usize, (NodeId, Mat2)>,
}

/// Dense statevector over the circuit's wires; shares nothing with the protocol backends.
struct Dense {
    amps: Vec<C64>,
    index: BTreeMap<usize, usize>,
}

impl Dense {
    fn bit(&self, w: usize) -> usize {
        1 << self.index[&w]
    }

    fn single(&mut self, w: usize, m: [[C64; 2]; 2]) {
        let b = self.bit(w);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (bc, bt) = (self.bit(c), self.bit(t));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
    }

    fn density(&self, w: usize) -> Mat2 {
        let b = self.bit(w);
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        rho
    }
}

/// Runs the circuit directly on unencoded inputs.
pub fn ideal_oracle(circuit: &Circuit, inputs: &[Prep]) -> IdealOracleResult {
    let wires = circuit.wires();
    let index: BTreeMap<usize, usize> = wires.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << wires.len()];
    // product of inputs, ancillas in |0⟩
    for (i, a) in amps.iter_mut().enumerate() {
        let mut v = C64::new(1.0, 0.0);
        for (w, &pos) in &index {
            let bit = (i >> pos) & 1;
            v *= match inputs.get(*w).filter(|_| *w < circuit.inputs) {
                Some(p) => p.amplitudes()[bit],
                None => C64::new(if bit == 0 { 1.0 } else { 0.0 }, 0.0),
            };
        }
        *a = v;
    }
    let mut st = Dense { amps, index };
    let (o, l, r) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), std::f64::consts::FRAC_1_SQRT_2);
    let h = [[C64::new(r, 0.0), C64::new(r, 0.0)], [C64::new(r, 0.0), C64::new(-r, 0.0)]];
    for s in &circuit.stmts {
        let Stmt::Gate(g) = s else { continue };
        match *g {
            CircuitGate::H(w) => st.single(w, h),
            CircuitGate::P(w) => st.single(w, [[l, o], [o, C64::new(0.0, 1.0)]]),
            CircuitGate::Pdg(w) => st.single(w, [[l, o], [o, C64::new(0.0, -1.0)]]),
            CircuitGate::X(w) => st.single(w, [[o, l], [l, o]]),
            CircuitGate::Z(w) => st.single(w, [[l, o], [o, -l]]),
            CircuitGate::T(w) => st.single(w, [[l, o], [o, C64::from_polar(1.0, PI / 4.0)]]),
            CircuitGate::Cnot(c, t) => st.cnot(c, t),
        }
    }
    let outputs = circuit.outputs.iter().map(|(&w, &node)| (w, (node, st.density(w)))).collect();
    IdealOracleResult { outputs }
}

/// Largest trace distance between honest real outputs and the oracle; `∞` when an honest
/// output is `⊥` without an abort. Values below [`EXACT_TOLERANCE`] are reported as 0.
pub fn discrepancy(run: &RunResult, ideal: &IdealOracleResult) -> f64 {
    let mut worst: f64 = 0.0;
    for (w, out) in run.honest_outputs() {
        match out {
            NodeOutput::Value(m) => worst = worst.max(trace_distance(m, &ideal.outputs[&w].1)),
            NodeOutput::Bottom if !run.abort => worst = f64::INFINITY,
            NodeOutput::Bottom => {}
        }
    }
    if worst < EXACT_TOLERANCE {
        0.0
    } else {
        worst
    }
}

/// `⊥`-consistency: an abort leaves every honest output `⊥`, and no abort leaves none.
pub fn bottom_consistent(run: &RunResult) -> bool {
    if run.abort {
        run.all_honest_bottom()
    } else {
        run.honest_outputs().all(|(_, o)| !o.is_bottom())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputReport {
    pub wire: usize,
    pub owner: NodeId,
    /// Bloch vector, or `None` for `⊥`.
    pub bloch: Option<[f64; 3]>,
    pub ideal_bloch: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub s: usize,
    pub adversary: String,
    pub corrupt: BTreeSet<NodeId>,
    pub abort: bool,
    pub apparent_cheaters: BTreeSet<NodeId>,
    pub outputs: Vec<OutputReport>,
    pub discrepancy: Option<f64>,
    pub bottom_consistent: bool,
    pub verdicts: Vec<VerifyReport>,
    pub decoded: Vec<crate::protocol::DecodedValue>,
    pub ledger: ResourceLedger,
    pub transcript_digest: String,
    pub audit: AuditReport,
}

impl RunReport {
    pub fn from_run(spec: &ExperimentSpec, seed: u64, s: usize, run: &RunResult, ideal: Option<&IdealOracleResult>) -> Self {
        let outputs = run
            .outputs
            .iter()
            .map(|(&w, (owner, o))| OutputReport {
                wire: w,
                owner: *owner,
                bloch: o.value().map(bloch_vector),
                ideal_bloch: ideal.map(|i| bloch_vector(&i.outputs[&w].1)),
            })
            .collect();
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            scenario: spec.scenario.clone(),
            seed,
            s,
            adversary: spec.adversary.clone(),
            corrupt: run.corrupt.clone(),
            abort: run.abort,
            apparent_cheaters: run.sets.global.clone(),
            outputs,
            discrepancy: ideal.map(|i| discrepancy(run, i)),
            bottom_consistent: bottom_consistent(run),
            verdicts: run.transcript.verdicts.clone(),
            decoded: run.transcript.decoded.clone(),
            ledger: run.ledger.clone(),
            transcript_digest: run.digest.clone(),
            audit: ground_truth_audit(&run.injections, &run.corrupt, &run.sets.global, &run.sets.blocks),
        }
    }
}

/// One protocol run of a spec at `(seed, s)`.
pub fn run_once(spec: &ExperimentSpec, seed: u64, s: usize) -> Result<(RunResult, Option<IdealOracleResult>), HarnessError> {
    let mut config = spec.config.clone();
    config.seed = seed;
    config.s = s;
    let adv = Adversary::by_name(&spec.adversary, config.n, spec.corrupt.clone(), spec.adv_seed ^ seed)?;
    let run = mpqc_run(&config, &spec.circuit, &spec.inputs, adv)?;
    let ideal = (spec.mode == ComparisonMode::VsIdealOracle).then(|| ideal_oracle(&spec.circuit, &spec.inputs));
    Ok((run, ideal))
}

#[derive(Debug, Clone, Serialize)]
pub struct Predicate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    /// SHA-256 over the experiment (config, circuit, adversary, seeds).
    pub digest: String,
    pub runs: Vec<RunReport>,
    pub predicates: Vec<Predicate>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.predicates.iter().all(|p| p.passed)
    }

    /// Ledger summary, one block of rows per run.
    pub fn csv(&self) -> String {
        let n = self.spec.config.n;
        let rows: Vec<(usize, usize, &ResourceLedger)> = self.runs.iter().map(|r| (n, r.s, &r.ledger)).collect();
        ledger_csv(&rows)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}  digest {}", self.spec.scenario, &self.digest[..16]);
        let _ = writeln!(out, "{:>6} {:>3} {:>6} {:>12} {:>10} {:>8}", "seed", "s", "abort", "discrepancy", "max_sent", "max_hwm");
        for r in &self.runs {
            let d = r.discrepancy.map_or("-".to_string(), |d| format!("{d:.3e}"));
            let _ = writeln!(
                out,
                "{:>6} {:>3} {:>6} {:>12} {:>10} {:>8}",
                r.seed,
                r.s,
                r.abort,
                d,
                r.ledger.max_sent(),
                r.ledger.max_hwm()
            );
        }
        for p in &self.predicates {
            let _ = writeln!(out, "{} {}: {}", if p.passed { "PASS" } else { "FAIL" }, p.name, p.detail);
        }
        out
    }
}

pub fn spec_digest(spec: &ExperimentSpec) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(spec).expect("spec serialises"));
    let inputs: Vec<String> = spec.inputs.iter().map(|p| format!("{p:?}")).collect();
    h.update(inputs.join(";").as_bytes());
    hex(&h.finalize())
}

/// Runs every `(s, seed)` of the experiment in parallel and evaluates the scenario predicates.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let s_values = if spec.s_values.is_empty() { vec![spec.config.s] } else { spec.s_values.clone() };
    let jobs: Vec<(usize, u64)> = s_values.iter().flat_map(|&s| spec.seeds.iter().map(move |&seed| (s, seed))).collect();
    let runs: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(s, seed)| {
            let (run, ideal) = run_once(spec, seed, s)?;
            Ok(RunReport::from_run(spec, seed, s, &run, ideal.as_ref()))
        })
        .collect::<Result<_, HarnessError>>()?;
    let predicates = predicates(spec, &runs);
    Ok(ExperimentReport { schema_version: REPORT_SCHEMA_VERSION, spec: spec.clone(), digest: spec_digest(spec), runs, predicates })
}

/// Least-squares fit of `y = c·x²` through the origin; returns `(c, R²)` with `R²`
/// measured against the mean of `y`.
pub fn fit_quadratic(points: &[(f64, f64)]) -> (f64, f64) {
    let sxx: f64 = points.iter().map(|(x, _)| x.powi(4)).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * x * y).sum();
    let c = sxy / sxx;
    let mean = points.iter().map(|(_, y)| y).sum::<f64>() / points.len() as f64;
    let ss_res: f64 = points.iter().map(|(x, y)| (y - c * x * x).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean).powi(2)).sum();
    (c, 1.0 - ss_res / ss_tot)
}

fn predicates(spec: &ExperimentSpec, runs: &[RunReport]) -> Vec<Predicate> {
    let n = spec.config.n;
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| out.push(Predicate { name: name.into(), passed, detail });
    if spec.mode == ComparisonMode::VsIdealOracle {
        let worst = runs.iter().filter(|r| !r.abort).filter_map(|r| r.discrepancy).fold(0.0, f64::max);
        push("honest outputs match the ideal oracle", worst == 0.0, format!("max discrepancy {worst:e}"));
        let consistent = runs.iter().all(|r| r.bottom_consistent);
        push("abort and ⊥ agree", consistent, format!("{} runs", runs.len()));
    }
    match spec.scenario.as_str() {
        "steane-cnot" => {
            let hwm: BTreeSet<usize> = runs.iter().map(|r| r.ledger.max_hwm()).collect();
            push("workspace per node = 28", hwm == BTreeSet::from([28]), format!("high-water marks {hwm:?}"));
        }
        "abort-two-cheaters" => {
            let aborted = runs.iter().filter(|r| r.abort && r.outputs.iter().all(|o| o.bloch.is_none() || r.corrupt.contains(&o.owner))).count();
            push("every seed aborts", aborted == runs.len(), format!("{aborted}/{}", runs.len()));
        }
        "resource-sweep" => {
            let mut ok = true;
            let mut detail = Vec::new();
            let mut points = Vec::new();
            for r in runs {
                let sharing = r.ledger.phase(Phase::Sharing).sent.iter().copied().max().unwrap_or(0);
                let bound = ((n + 1) * n * r.s * r.s) as u64;
                ok &= sharing <= bound;
                detail.push(format!("s={} sharing sent {sharing} (bound {bound})", r.s));
                points.push((r.s as f64, r.ledger.max_sent() as f64));
            }
            push("sharing-phase sent ≤ (n+1)ns²", ok, detail.join("; "));
            let (c, r2) = fit_quadratic(&points);
            push("total sent fits c·s² with R² ≥ 0.999", r2 >= 0.999, format!("c = {c:.1}, R² = {r2:.5}"));
        }
        _ => {}
    }
    out
}

/// Writes `report.json`, one JSON file per run, `summary.csv` and `summary.txt` into `dir`.
pub fn write_reports(report: &ExperimentReport, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    for r in &report.runs {
        let name = format!("run-s{}-seed{}.json", r.s, r.seed);
        std::fs::write(dir.join(name), serde_json::to_string_pretty(r)?)?;
    }
    std::fs::write(dir.join("summary.csv"), report.csv())?;
    std::fs::write(dir.join("summary.txt"), report.table())?;
    Ok(())
}

/// Canned scenarios.
pub fn scenario(name: &str) -> Result<ExperimentSpec, HarnessError> {
    let cnot = Circuit::parse("WIRES 2\nCNOT 1 2\nOUT 1 1\nOUT 2 2\n")?;
    let one_t = Circuit::parse("WIRES 1\nT 1\nOUT 1 1\n")?;
    let base = |s: usize| NetworkConfig::new(7, s, 0, BackendKind::Frame);
    let spec = match name {
        "steane-cnot" => ExperimentSpec {
            scenario: name.into(),
            config: base(2),
            circuit: cnot,
            inputs: vec![Prep::Plus, Prep::Zero],
            adversary: "honest".into(),
            corrupt: None,
            adv_seed: 0,
            seeds: (0..10).collect(),
            mode: ComparisonMode::VsIdealOracle,
            s_values: vec![],
        },
        "abort-two-cheaters" => ExperimentSpec {
            scenario: name.into(),
            config: base(4),
            circuit: cnot,
            inputs: vec![Prep::One, Prep::Plus],
            adversary: "two-cheater-collusion".into(),
            corrupt: None,
            adv_seed: 7,
            seeds: (0..100).collect(),
            mode: ComparisonMode::VsIdealOracle,
            s_values: vec![],
        },
        "resource-sweep" => ExperimentSpec {
            scenario: name.into(),
            config: base(1),
            circuit: one_t,
            inputs: vec![Prep::Plus],
            adversary: "honest".into(),
            corrupt: None,
            adv_seed: 0,
            seeds: vec![0],
            mode: ComparisonMode::ResourceOnly,
            s_values: vec![1, 2, 3, 4],
        },
        other => return Err(HarnessError::Config(format!("unknown scenario {other:?}"))),
    };
    Ok(spec)
}

pub const SCENARIOS: [&str; 3] = ["steane-cnot", "abort-two-cheaters", "resource-sweep"];

#[derive(Debug, Clone, Serialize)]
pub struct SecurityBudget {
    pub kappa: usize,
    pub bound: String,
    /// Measured single-round detection probability of a bad magic state, when supplied.
    pub detection_rate: Option<f64>,
}

/// `κ = n + #T + #ancillas` and the failure bound `κ·2^{−Ω(s)}`; with a measured
/// detection rate `p` the empirical base `κ·(1−p)^{s²+2s}` is printed alongside.
pub fn security_budget(n: usize, s: usize, circuit: &Circuit, detection_rate: Option<f64>) -> SecurityBudget {
    let kappa = circuit.stats(n).kappa;
    let mut bound = format!("{kappa}·2^(-Ω({s}))");
    if let Some(p) = detection_rate {
        let rounds = (s * s + 2 * s) as i32;
        let _ = write!(bound, " ; empirical {kappa}·(1-{p:.4})^{rounds} = {:.3e}", kappa as f64 * (1.0 - p).powi(rounds));
    }
    SecurityBudget { kappa, bound, detection_rate }
}

/// Two-qubit magic check on a bare register: control `|0⟩` → H → C-G into `target` →
/// H → measure. Returns the fraction of `1` outcomes over `trials`.
pub fn magic_check_detection_rate(target: &Prep, trials: usize, seed: u64) -> f64 {
    let g = cxp_dagger_phase_convention();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ones = 0usize;
    for _ in 0..trials {
        let mut sv = StateVector::new(2);
        let c = sv.alloc();
        let t = sv.alloc_state(target.amplitudes());
        sv.apply(&Gate::H(c)).expect("H");
        sv.apply_controlled_unitary(c, t, &g).expect("C-G");
        sv.apply(&Gate::H(c)).expect("H");
        ones += sv.measure_z(c, &mut rng).expect("measure") as usize;
    }
    ones as f64 / trials as f64
}
