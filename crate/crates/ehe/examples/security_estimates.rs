//! Attack-cost estimates for published parameter points, plus a measured
//! report for a freshly generated key.
//!
//! Run with: cargo run --release --example security_estimates

use ehe::keygen::{generate_keypair, KeyParams};
use ehe::security::{key_report, structural_report, SecurityParams};

fn main() {
    println!("parameter points:");
    println!("  k     w    d   chi   log2_xl  log2_icrp  log2_denc  grover  criterion");
    for (k, w) in [(128u32, 160u32), (256, 280), (512, 540), (1024, 1050)] {
        let d = k.div_ceil(10);
        let params = SecurityParams::new(k, w, d, 2.5, vec![d; 8]);
        let r = structural_report(&params).unwrap();
        println!(
            "  {k:5} {w:5} {d:3}  {:.1}  {:8.1}  {:9.1}  {:9.1}  {:6.1}  {}",
            params.chi,
            r.log2_xl,
            r.log2_icrp,
            r.log2_denc,
            r.log2_grover,
            if r.criterion.all() { "holds" } else { "FAILS" }
        );
    }

    // measured structure of an actual (small, insecure) key
    let (_, private) = generate_keypair(&KeyParams::insecure(16, 20, 9)).unwrap();
    let r = key_report(&private, 2.5).unwrap();
    println!("\nmeasured key (k=16, w=20, test parameters):");
    println!("  degree d = {}", r.params.d);
    for (i, b) in r.measured_blocks.as_ref().unwrap().iter().enumerate() {
        println!(
            "  block {i}: declared {} gates, greedy max set {}, exact max set {:?}",
            b.declared, b.greedy, b.exact
        );
    }
    println!(
        "  log2: xl={:.1} icrp={:.1} denc={:.1} (test parameters, criterion {})",
        r.log2_xl,
        r.log2_icrp,
        r.log2_denc,
        if r.criterion.all() { "holds" } else { "fails, as expected at this size" }
    );
}
