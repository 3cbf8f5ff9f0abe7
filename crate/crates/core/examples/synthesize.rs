//! Synthesizes the Bell expression for one measurement angle and prints it.
//!
//! `cargo run -p selftest-core --example synthesize -- 0.2914`
//! (the angle is in radians; the default is the best angle)

use selftest_core::synth::{synthesize, SynthesisOptions};

fn main() {
    let phi: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.092_756_44 * std::f64::consts::PI);
    let r = synthesize(phi, SynthesisOptions::default()).expect("synthesis runs");
    println!("phi = {phi}");
    println!("status {:?}, flags {:?}", r.status, r.flags);
    println!("Q = {:.10}, L = {:.10}, Q/L = {:.10}", r.q, r.local_bound, r.q_over_l());
    for (k, c) in r.b.coeffs_f64().iter().enumerate() {
        println!("  b[{k}] = {c:+.10}");
    }
}
