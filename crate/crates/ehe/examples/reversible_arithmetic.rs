//! The reversible arithmetic circuit library, verified exhaustively against
//! plain integer arithmetic.
//!
//! Run with: cargo run --release --example reversible_arithmetic

use ehe::circuits::{
    build_function_circuit, verify_circuit, FunctionKind, FunctionSpec, VerifyMode,
};

fn main() {
    println!("kind              L  width  gates  checked  result");
    for kind in FunctionKind::ALL {
        let l = match kind {
            FunctionKind::Add | FunctionKind::Sub | FunctionKind::Compare => 8,
            _ => 4,
        };
        let spec = FunctionSpec::new(kind, l).unwrap();
        let circuit = build_function_circuit(&spec).unwrap();
        let report = verify_circuit(&circuit, &spec, VerifyMode::Exhaustive).unwrap();
        println!(
            "{:16} {:2}  {:5}  {:5}  {:7}  {}",
            kind.name(),
            l,
            circuit.width(),
            circuit.gate_count(),
            report.checked,
            if report.passed() { "exact" } else { "MISMATCH" }
        );
        assert!(report.passed());
    }
}
