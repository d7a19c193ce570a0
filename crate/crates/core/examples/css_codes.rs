//! The Steane code, its transversal gates, and a code that fails the checks.

use mpqc::css::CssCode;
use mpqc::gf2::{BinaryCode, Bits};

fn main() {
    let steane = CssCode::steane();
    println!("Steane: n={} d={} t={}", steane.n(), steane.dist(), steane.t());
    println!("X stabilizers: {:?}", steane.x_stabilizers().iter().map(|b| b.to_string()).collect::<Vec<_>>());
    println!("transversal gates: {:?}", steane.logical_gates());
    println!("check: {:?}", steane.check_transversal_cliffords());

    let mut word = BinaryCode::hamming7().encode(&Bits::from_u64(4, 0b1011));
    word.flip(5);
    let r = BinaryCode::hamming7().syndrome_decode(&word);
    println!("decode of a word with bit 5 flipped: errors {:?}", r.errors);

    let shor_like = CssCode::new(BinaryCode::repetition(3), BinaryCode::full_space(3)).unwrap();
    println!("repetition/full-space: {:?}", shor_like.check_transversal_cliffords().reasons);
}
