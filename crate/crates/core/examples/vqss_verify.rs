//! Share a state, verify it, and watch verification catch a dealer who shares |1⟩ as an ancilla.

use mpqc::adversary::{Adversary, GridRole};
use mpqc::backend::register::Prep;
use mpqc::backend::BackendKind;
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::{vqss_share, vqss_verify, vqss_zero_verify, Session};

fn main() {
    let cfg = NetworkConfig::new(7, 2, 1, BackendKind::Frame);
    let mut sess = Session::new(&cfg, Adversary::by_name("single-x-on-share", 7, None, 9).unwrap()).unwrap();

    let g = vqss_share(&mut sess, 0, &Prep::Plus, GridRole::Data).unwrap();
    let rep = vqss_verify(&mut sess, &g).unwrap();
    println!("data from node 0: passed={} iterations={} apparent cheaters {:?}", rep.passed, rep.iterations, rep.apparent);

    let bad = vqss_share(&mut sess, 2, &Prep::One, GridRole::Zero).unwrap();
    let rep = vqss_zero_verify(&mut sess, &bad).unwrap();
    println!("|1⟩ claimed as |0⟩ by node 2: passed={} nonzero={}", rep.passed, rep.nonzero);
    println!("B = {:?}", sess.sets.global);
}
