//! Fibonacci numbers, weight sequences, windows and witness generators.

mod fib;
mod generator;
mod lambda;
mod window;
mod witness;

pub use fib::{cassini, fib, fib_rational, fib_ratio};
pub use generator::{SeqGenerator, SeqSpec, SpecGenerator};
pub use lambda::{parse_lambda_text, Family, LambdaSeq, TailRule};
pub use window::{parse_csv, values_to_csv, Provenance, RealWindow, SeqWindow};
pub use witness::{gen_witness, gen_witness_real, witness_image, WitnessId};
