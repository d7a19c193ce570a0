//! Honest two-level run of a single CNOT on the 7-node Steane network.

use mpqc::adversary::Adversary;
use mpqc::backend::register::Prep;
use mpqc::backend::{bloch_vector, BackendKind};
use mpqc::circuit::Circuit;
use mpqc::harness::{discrepancy, ideal_oracle};
use mpqc::netsim::{ledger_report, NetworkConfig};
use mpqc::protocol::mpqc_run;

fn main() {
    let circuit = Circuit::parse("WIRES 2\nCNOT 1 2\nOUT 1 1\nOUT 2 2\n").unwrap();
    let inputs = [Prep::One, Prep::Plus];
    let cfg = NetworkConfig::new(7, 2, 42, BackendKind::Frame);
    let run = mpqc_run(&cfg, &circuit, &inputs, Adversary::honest()).unwrap();
    for (w, (owner, out)) in &run.outputs {
        println!("wire {w} -> node {owner}: bloch {:?}", out.value().map(bloch_vector));
    }
    println!("discrepancy vs ideal: {}", discrepancy(&run, &ideal_oracle(&circuit, &inputs)));
    for row in ledger_report(&run.ledger, 7, 2) {
        println!("{:<36} {:>6} <= {:<10} = {:>6}  {}", row.quantity, row.measured, row.formula, row.formula_value, row.within);
    }
    println!("transcript digest {}", run.digest);
}
