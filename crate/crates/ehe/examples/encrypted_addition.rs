//! Homomorphic addition end to end: encrypt two 8-bit operands, evaluate the
//! encrypted adder program on the ciphertext, decrypt the exact sum.
//!
//! Run with: cargo run --release --example encrypted_addition

use ehe::bits::BitVec;
use ehe::circuits::{FunctionKind, FunctionSpec};
use ehe::cryptoval::{
    decrypt_result, encrypt_computation, evaluate_program, ActionVariant, PipelineOptions,
};
use ehe::ime::{encrypt, PaddingMode, Plaintext};
use ehe::keygen::{generate_keypair, KeyParams};

fn main() {
    let spec = FunctionSpec::new(FunctionKind::Add, 8).unwrap();
    // Two 8-bit operands pack into one 16-bit plaintext.
    let params = KeyParams::insecure(16, 20, 3);
    let (public, private) = generate_keypair(&params).unwrap();

    let opts = PipelineOptions::new(ActionVariant::TwoKey, 99);
    let (program, cv_key, stats) = encrypt_computation(&private, &spec, &opts).unwrap();
    println!(
        "encrypted adder: program width n={} sections={} peak monomials={} max section work={}",
        program.n,
        program.sections.len(),
        stats.peak_monomials,
        stats.max_section_work()
    );

    for (a, b) in [(25u64, 17u64), (200, 100), (255, 255), (0, 0)] {
        let m = Plaintext::new(BitVec::from_u64(8, a).concat(&BitVec::from_u64(8, b)));
        let c = encrypt(&public, &m, PaddingMode::Zeros).unwrap();
        let evaluated = evaluate_program(&program, &c).unwrap();
        let result = decrypt_result(&cv_key, &evaluated, &program.output_map).unwrap();
        // output map: 8 sum bits then the carry bit
        let value = result.to_u64();
        println!("{a:3} + {b:3} = {value:3}  (encrypted end to end)");
        assert_eq!(value, a + b);
    }
    println!("all sums exact");
}
