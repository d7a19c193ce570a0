//! The controlled-G stabilizer check: |m⟩ passes, |0⟩ is caught about half the time.

use mpqc::adversary::Adversary;
use mpqc::backend::register::Prep;
use mpqc::backend::BackendKind;
use mpqc::harness::{magic_check_detection_rate, security_budget};
use mpqc::circuit::Circuit;
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::{vmagic, Session};

fn main() {
    for (name, p) in [("|m⟩", Prep::Magic), ("|0⟩", Prep::Zero), ("|+⟩", Prep::Plus)] {
        println!("detection rate for {name}: {:.4}", magic_check_detection_rate(&p, 10_000, 1));
    }
    let rate = magic_check_detection_rate(&Prep::Zero, 10_000, 2);
    let c = Circuit::parse("WIRES 1\nT 1\nOUT 1 1\n").unwrap();
    println!("{}", security_budget(7, 3, &c, Some(rate)).bound);

    let cfg = NetworkConfig::new(7, 1, 5, BackendKind::Frame);
    let mut sess = Session::new(&cfg, Adversary::honest()).unwrap();
    let pair = vmagic(&mut sess, 3).unwrap();
    println!("distributed check from dealer 3: readout {}, B = {:?}", pair.check, sess.sets.global);
}
