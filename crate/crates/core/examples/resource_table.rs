//! Qubits sent and workspace per node as the security parameter grows.

use mpqc::harness::{run_experiment, scenario};

fn main() {
    let report = run_experiment(&scenario("resource-sweep").unwrap()).unwrap();
    print!("{}", report.table());
    println!();
    print!("{}", report.csv());
}
