//! Simulator for verifiable quantum secret sharing and secure multi-party quantum
//! computation over concatenated CSS codes.
//!
//! The crate is layered bottom-up: [`gf2`] classical codes, [`css`] quantum codes built
//! from them, three interchangeable quantum [`backend`]s, a synchronous network
//! simulator ([`netsim`]) with resource accounting, an [`adversary`] corpus, a circuit
//! format ([`circuit`]), the [`protocol`] layer, and an experiment [`harness`].

pub mod gf2;
pub mod backend;
pub mod css;
pub mod netsim;
pub mod circuit;
pub mod adversary;
pub mod protocol;
pub mod harness;
