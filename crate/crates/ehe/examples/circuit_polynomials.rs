//! The evaluation duality: a circuit's generated polynomial tuple, evaluated
//! at an input, equals the circuit executed on that input.
//!
//! Run with: cargo run --example circuit_polynomials

use ehe::bits::BitVec;
use ehe::gates::{Circuit, Gate};

fn show(p: &ehe::Anf) -> String {
    let mut terms: Vec<String> = p
        .sorted_monomials()
        .iter()
        .map(|m| {
            let vars: Vec<String> = m.mask().iter_ones().map(|i| format!("x{}", i + 1)).collect();
            if vars.is_empty() {
                "1".to_string()
            } else {
                vars.join("*")
            }
        })
        .collect();
    if terms.is_empty() {
        terms.push("0".to_string());
    }
    terms.join(" + ")
}

fn main() {
    // Three wires: a Toffoli, then a CNOT, then a negation.
    let circuit = Circuit::new(
        3,
        vec![
            Gate::toffoli(3, 0, 1, 2),
            Gate::cnot(3, 2, 0),
            Gate::not(3, 1),
        ],
    )
    .unwrap();

    let polys = circuit.generate_polynomials();
    println!("wire functions:");
    for (i, p) in polys.iter().enumerate() {
        println!("  y{} = {}", i + 1, show(p));
    }

    println!("\ninput -> circuit run | polynomial evaluation");
    for x in 0u64..8 {
        let input = BitVec::from_u64(3, x);
        let state = circuit.run_state(&input).unwrap();
        let evaluated: Vec<bool> = polys.iter().map(|p| p.eval(&input).unwrap()).collect();
        let eval_str: String = evaluated.iter().map(|b| if *b { '1' } else { '0' }).collect();
        println!("  {input:?} -> {state:?} | {eval_str}");
        assert!(
            (0..3).all(|i| state.get(i) == evaluated[i as usize]),
            "duality violated"
        );
    }
    println!("\nduality holds on all 8 inputs");
}
