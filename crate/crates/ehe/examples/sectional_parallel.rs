//! Sectional program generation: section counts never change results, and
//! worker counts never change the program bytes.
//!
//! Run with: cargo run --release --example sectional_parallel

use ehe::bits::BitVec;
use ehe::circuits::{FunctionKind, FunctionSpec};
use ehe::cryptoval::{
    decrypt_result, encrypt_computation, evaluate_program, ActionVariant, PipelineOptions,
};
use ehe::format::serialize_program;
use ehe::ime::{encrypt, PaddingMode, Plaintext};
use ehe::keygen::{generate_keypair, KeyParams};

fn main() {
    let spec = FunctionSpec::new(FunctionKind::Mul, 4).unwrap();
    let params = KeyParams::insecure(8, 12, 5);
    let (public, private) = generate_keypair(&params).unwrap();

    let m = Plaintext::new(BitVec::from_u64(4, 13).concat(&BitVec::from_u64(4, 11)));
    let c = encrypt(&public, &m, PaddingMode::Zeros).unwrap();

    // the same computation under different section counts
    let mut results = Vec::new();
    for e in [1usize, 4, 11, 44] {
        let mut opts = PipelineOptions::new(ActionVariant::TwoKey, 77);
        opts.sections = Some(e);
        let (program, cv_key, _) = encrypt_computation(&private, &spec, &opts).unwrap();
        let evaluated = evaluate_program(&program, &c).unwrap();
        let result = decrypt_result(&cv_key, &evaluated, &program.output_map).unwrap();
        println!(
            "sections={:3} -> 13 * 11 = {}",
            program.sections.len(),
            result.to_u64()
        );
        results.push(result.to_u64());
    }
    assert!(results.iter().all(|r| *r == 143));

    // byte-identical program files under 1, 4 and 8 workers
    let build = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let opts = PipelineOptions::new(ActionVariant::TwoKey, 77);
            let (program, _, _) = encrypt_computation(&private, &spec, &opts).unwrap();
            serialize_program(&program)
        })
    };
    let one = build(1);
    let four = build(4);
    let eight = build(8);
    assert_eq!(one, four);
    assert_eq!(four, eight);
    println!(
        "program bytes identical across 1/4/8 workers ({} bytes)",
        one.len()
    );
}
