//! Additive decompositions, integrability tests and embeddings in
//! S-primitive differential towers over Q(x).

pub mod arith;
pub mod cli;
pub mod decomp;
pub mod elem;
pub mod embed;
pub mod hermite;
pub mod matryoshka;
pub mod tower;
