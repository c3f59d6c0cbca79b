//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with: cargo test -p ehe --test acceptance -- --nocapture

use std::time::Instant;

use ehe::bits::BitVec;
use ehe::circuits::{
    build_function_circuit, oracle_bits, verify_circuit, FunctionKind, FunctionSpec, VerifyMode,
};
use ehe::cryptoval::{
    decrypt_result, encrypt_computation, evaluate_program, ActionVariant, PipelineOptions,
};
use ehe::format::serialize_program;
use ehe::gates::{sample_gate, Circuit, Gate, RankDist};
use ehe::ime::{decrypt, encrypt, random_plaintext, PaddingMode, Plaintext};
use ehe::keygen::{generate_keypair, sample_noncommuting_set, KeyParams};
use ehe::rng::StreamFactory;
use ehe::security;
use rand::Rng;

/// Criterion 1: evaluation duality on 200 random circuits, width 2..=10,
/// up to 128 gates, checked on every input, exactly, in under 60 s.
#[test]
fn criterion_1_duality_suite() {
    let started = Instant::now();
    let factory = StreamFactory::new(0xD0A117);
    let mut rng = factory.stream("duality-suite", 0);
    let dist = RankDist::standard();
    for trial in 0..200 {
        let width = rng.gen_range(2..=10u32);
        let gate_count = rng.gen_range(1..=128usize);
        let gates: Vec<Gate> = (0..gate_count)
            .map(|_| sample_gate(width, &dist, &mut rng).unwrap())
            .collect();
        let circuit = Circuit::new(width, gates).unwrap();
        let tables: Vec<Vec<bool>> = circuit
            .generate_polynomials()
            .iter()
            .map(|p| p.truth_table().unwrap())
            .collect();
        for x in 0u64..(1 << width) {
            let input = BitVec::from_u64(width, x);
            let state = circuit.run_state(&input).unwrap();
            for (i, table) in tables.iter().enumerate() {
                assert_eq!(
                    table[x as usize],
                    state.get(i as u32),
                    "trial {trial}, wire {i}, input {x}"
                );
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "duality suite took {elapsed:.1} s");
    println!("criterion 1: PASS - 200 circuits, exhaustive duality, {elapsed:.1} s");
}

/// Criterion 2: message roundtrips at the four presets, 1000 messages each,
/// zero failures; a (128,160) decryption completes in under a second.
#[test]
fn criterion_2_message_roundtrips() {
    let presets: [(u32, u32, bool); 4] = [
        (16, 20, false),
        (32, 40, false),
        (64, 72, false),
        (128, 160, true),
    ];
    let mut decrypt_128_seconds = f64::NAN;
    for (k, w, secure) in presets {
        let params = if secure {
            KeyParams::secure(k, w, 7)
        } else {
            KeyParams::insecure(k, w, 7)
        };
        let (public, private) = generate_keypair(&params).unwrap();
        let mut rng = StreamFactory::new(0xACCE97).stream("messages", k as u64);
        for trial in 0..1000u64 {
            let message = random_plaintext(k, &mut rng);
            let padding = if trial % 2 == 0 {
                PaddingMode::Zeros
            } else {
                PaddingMode::Random { seed: trial }
            };
            let ciphertext = ehe::ime::encrypt_block(&public, &message, padding, trial).unwrap();
            assert_eq!(ciphertext.bits.len(), w);
            let (recovered, _) = decrypt(&private, &ciphertext).unwrap();
            assert_eq!(recovered, message, "preset ({k},{w}), trial {trial}");
        }
        if secure {
            let message = random_plaintext(k, &mut rng);
            let ciphertext = encrypt(&public, &message, PaddingMode::Zeros).unwrap();
            let t = Instant::now();
            let (recovered, _) = decrypt(&private, &ciphertext).unwrap();
            decrypt_128_seconds = t.elapsed().as_secs_f64();
            assert_eq!(recovered, message);
            assert!(
                decrypt_128_seconds < 1.0,
                "(128,160) decryption took {decrypt_128_seconds} s"
            );
        }
    }
    println!(
        "criterion 2: PASS - 4000 roundtrips exact; (128,160) decryption {:.6} s",
        decrypt_128_seconds
    );
}

struct Pipeline {
    public: ehe::ImePublicKey,
    program: ehe::EncryptedProgram,
    cv_key: ehe::CryptovalPrivateKey,
    spec: FunctionSpec,
}

fn build_pipeline(
    kind: FunctionKind,
    operand_bits: u32,
    variant: ActionVariant,
    seed: u64,
    sections: Option<usize>,
) -> Pipeline {
    let spec = FunctionSpec::new(kind, operand_bits).unwrap();
    let k = spec.input_bits();
    let w = match variant {
        ActionVariant::TwoKey => k + 4,
        ActionVariant::SameKey => FunctionSpec::shell_width(operand_bits),
    };
    let params = KeyParams::insecure(k, w, seed);
    let (public, private) = generate_keypair(&params).unwrap();
    let mut opts = PipelineOptions::new(variant, seed ^ 0x5ec);
    opts.sections = sections;
    if sections.is_some() {
        // forced section counts down to e=1 make tuples arbitrarily deep, so
        // lift the runaway-growth guardrail for them
        opts.generate.monomial_budget = Some(4 << 20);
    }
    let (program, cv_key, _) = encrypt_computation(&private, &spec, &opts).unwrap();
    Pipeline {
        public,
        program,
        cv_key,
        spec,
    }
}

fn run_pipeline(p: &Pipeline, a: u64, b: u64) -> Vec<bool> {
    let l = p.spec.operand_bits;
    let m = Plaintext::new(BitVec::from_u64(l, a).concat(&BitVec::from_u64(l, b)));
    let c = encrypt(&p.public, &m, PaddingMode::Zeros).unwrap();
    let evaluated = evaluate_program(&p.program, &c).unwrap();
    let result = decrypt_result(&p.cv_key, &evaluated, &p.program.output_map).unwrap();
    (0..result.len()).map(|i| result.get(i)).collect()
}

/// Criterion 3: homomorphic exactness for the adder, subtractor (operand
/// width 8, 1000 random pairs each), multiplier (width 4, exhaustive) and
/// comparator (width 8), under both the two-key and same-key constructions.
#[test]
fn criterion_3_homomorphic_exactness() {
    let mut checked = 0u64;
    for variant in [ActionVariant::TwoKey, ActionVariant::SameKey] {
        for (kind, l) in [
            (FunctionKind::Add, 8),
            (FunctionKind::Sub, 8),
            (FunctionKind::Mul, 4),
            (FunctionKind::Compare, 8),
        ] {
            let p = build_pipeline(kind, l, variant, 0xE0 + l as u64, None);
            if kind == FunctionKind::Mul {
                for a in 0u64..16 {
                    for b in 0u64..16 {
                        assert_eq!(
                            run_pipeline(&p, a, b),
                            oracle_bits(&p.spec, a, b),
                            "{kind:?} {variant:?} a={a} b={b}"
                        );
                        checked += 1;
                    }
                }
            } else {
                let mut rng = StreamFactory::new(31).stream(kind.name(), l as u64);
                for _ in 0..1000 {
                    let a = rng.gen_range(0..(1u64 << l));
                    let b = rng.gen_range(0..(1u64 << l));
                    assert_eq!(
                        run_pipeline(&p, a, b),
                        oracle_bits(&p.spec, a, b),
                        "{kind:?} {variant:?} a={a} b={b}"
                    );
                    checked += 1;
                }
            }
        }
    }
    println!("criterion 3: PASS - {checked} encrypted computations exact (two-key and same-key)");
}

/// Criterion 4: section counts never change evaluation results, and worker
/// counts never change program bytes.
#[test]
fn criterion_4_sectional_equivalence() {
    for (kind, l) in [
        (FunctionKind::Add, 8),
        (FunctionKind::Sub, 8),
        (FunctionKind::Mul, 4),
        (FunctionKind::Compare, 8),
    ] {
        let n = FunctionSpec::shell_width(l) as usize;
        let e_values = [1usize, n.div_ceil(8), n.div_ceil(2), 4 * n];
        let mut per_e: Vec<Vec<Vec<bool>>> = Vec::new();
        for &e in &e_values {
            // section counts above the gate count clamp to it, giving
            // min(4n, gates) for the largest entry
            let p = build_pipeline(kind, l, ActionVariant::TwoKey, 0xACC, Some(e));
            let mut rng = StreamFactory::new(17).stream("sectional", l as u64);
            let outputs: Vec<Vec<bool>> = (0..100)
                .map(|_| {
                    let a = rng.gen_range(0..(1u64 << l));
                    let b = rng.gen_range(0..(1u64 << l));
                    run_pipeline(&p, a, b)
                })
                .collect();
            per_e.push(outputs);
        }
        for window in per_e.windows(2) {
            assert_eq!(window[0], window[1], "{kind:?}: results differ across e");
        }

        // byte-identical program files across worker counts
        let build_bytes = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let p = build_pipeline(kind, l, ActionVariant::TwoKey, 0xACC, None);
                serialize_program(&p.program)
            })
        };
        let b1 = build_bytes(1);
        let b4 = build_bytes(4);
        let b8 = build_bytes(8);
        assert_eq!(b1, b4, "{kind:?}: program bytes differ between 1 and 4 workers");
        assert_eq!(b4, b8, "{kind:?}: program bytes differ between 4 and 8 workers");
    }
    println!("criterion 4: PASS - results identical across section counts; bytes identical across 1/4/8 workers");
}

/// Criterion 5: for 50 random sets of four pairwise-noncommuting gates of
/// rank >= 2, all 24 gate orderings generate pairwise distinct polynomial
/// sets.
#[test]
fn criterion_5_noncommutativity_distinctness() {
    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for (pos, &head) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(pos);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }
    let perms = permutations(&[0, 1, 2, 3]);
    assert_eq!(perms.len(), 24);
    let width = 8u32;
    let factory = StreamFactory::new(0xD157);
    let mut collisions = 0;
    for set_index in 0..50u64 {
        let mut rng = factory.stream("sets", set_index);
        let gates = sample_noncommuting_set(width, 4, &mut rng).unwrap();
        assert!(gates.iter().all(|g| g.rank() >= 2));
        let polysets: Vec<Vec<ehe::Anf>> = perms
            .iter()
            .map(|perm| {
                let ordered: Vec<Gate> = perm.iter().map(|&i| gates[i].clone()).collect();
                Circuit::new(width, ordered).unwrap().generate_polynomials()
            })
            .collect();
        for i in 0..polysets.len() {
            for j in 0..i {
                if polysets[i] == polysets[j] {
                    collisions += 1;
                }
            }
        }
    }
    assert_eq!(collisions, 0, "permuted gate orders produced equal polynomial sets");
    println!("criterion 5: PASS - 50 sets x 24 orderings, all polynomial sets pairwise distinct");
}

/// Criterion 6: the security estimators at the published parameter point.
/// All terms come from exact big-integer arithmetic.
#[test]
fn criterion_6_security_estimators() {
    let mut lines: Vec<(bool, String)> = Vec::new();

    let icrp = security::icrp_log2(160);
    lines.push((icrp == 160.0, format!("log2_icrp(160) = {icrp} (want exactly 160)")));

    let grover = security::grover_log2(128, 160);
    lines.push((
        (grover - 86.0).abs() <= 1.0,
        format!("log2_grover(128,160) = {grover:.4} (want within 1 of 86)"),
    ));

    let subexp = security::xl_quadratic_subexp_log2(160, 2.0).unwrap();
    lines.push((
        subexp >= 128.0,
        format!(
            "xl_quadratic_subexp_log2(160, chi=2) = {subexp:.4} (want >= 128; \
             the bound clears 128 only for chi > 2.0069)"
        ),
    ));

    let params = security::SecurityParams::new(128, 160, 13, 2.5, vec![13; 8]);
    let report = security::structural_report(&params).unwrap();
    let chain_ok = report.criterion.all();
    lines.push((
        chain_ok,
        format!(
            "criterion chain at (k=128, w=160, d=13, chi=2.5, l=8, h=13): \
             denc {:.2} > icrp {:.2} > xl {:.2} > 128 = {}",
            report.log2_denc, report.log2_icrp, report.log2_xl, chain_ok
        ),
    ));
    // exact big-integer cross-pins
    assert_eq!(
        report.xl_monomials.to_string(),
        "238116253820077233",
        "exact XL monomial count at k=128, D=13"
    );
    assert!((report.log2_xl - 144.31110928861483).abs() < 1e-9);
    assert!((report.log2_denc - 260.287159617732).abs() < 1e-9);

    let all_ok = lines.iter().all(|(ok, _)| *ok);
    let verdict = if all_ok { "PASS" } else { "FAIL" };
    println!("criterion 6: {verdict}");
    for (ok, line) in &lines {
        println!("  [{}] {line}", if *ok { "ok" } else { "FAIL" });
    }
    assert!(all_ok, "one or more estimator subclauses failed");
}

/// Criterion 7: the circuit library verifies exhaustively against integer
/// oracles, including ancilla restoration.
#[test]
fn criterion_7_circuit_library() {
    let mut total_checked = 0u64;
    for (kind, widths) in [
        (FunctionKind::Add, vec![1u32, 4, 8]),
        (FunctionKind::Sub, vec![1, 4, 8]),
        (FunctionKind::Compare, vec![1, 4, 8]),
        (FunctionKind::Mul, vec![1, 2, 4]),
        (FunctionKind::Div, vec![1, 2, 4]),
        (FunctionKind::SumOfSquares, vec![1, 2, 4]),
        (FunctionKind::MonomialPower, vec![1, 2, 4]),
    ] {
        for l in widths {
            let spec = FunctionSpec::new(kind, l).unwrap();
            let circuit = build_function_circuit(&spec).unwrap();
            let report = verify_circuit(&circuit, &spec, VerifyMode::Exhaustive).unwrap();
            assert!(
                report.passed(),
                "{kind:?} L={l}: {} mismatches, {} ancilla failures (first: {:?})",
                report.mismatches.len(),
                report.ancilla_failures,
                report.mismatches.first()
            );
            total_checked += report.checked;
        }
    }
    println!("criterion 7: PASS - {total_checked} exhaustive circuit checks, ancillas restored");
}

/// Criterion 8: per-section generation work for the encrypted adder stays in
/// the [n^3/8, 4 n^4] envelope across n in {64, 128, 256}, and no polynomial
/// exceeds 4 n^2 monomials.
#[test]
fn criterion_8_scaling_envelope() {
    let spec = FunctionSpec::new(FunctionKind::Add, 8).unwrap();
    let params = KeyParams::insecure(16, 20, 11);
    let (_, private) = generate_keypair(&params).unwrap();
    let mut maxima = Vec::new();
    for n in [64u32, 128, 256] {
        let mut opts = PipelineOptions::new(ActionVariant::TwoKey, 0x5ca1e);
        opts.n_override = Some(n);
        let (program, _, stats) = encrypt_computation(&private, &spec, &opts).unwrap();
        let floor = (n as u64).pow(3) / 8;
        let cap = 4 * (n as u64).pow(4);
        for (q, &work) in stats.section_work.iter().enumerate() {
            assert!(
                work >= floor && work <= cap,
                "n={n} section {q}: work {work} outside [{floor}, {cap}]"
            );
        }
        assert!(
            stats.peak_monomials <= (4 * n * n) as usize,
            "n={n}: peak monomials {} above 4n^2",
            stats.peak_monomials
        );
        let max_per_poly = program
            .sections
            .iter()
            .flatten()
            .map(|p| p.monomial_count())
            .max()
            .unwrap();
        assert!(max_per_poly <= (4 * n * n) as usize);
        maxima.push((n, stats.max_section_work()));
    }
    // and the work grows with n
    assert!(maxima.windows(2).all(|w| w[0].1 < w[1].1));
    println!(
        "criterion 8: PASS - per-section work within [n^3/8, 4n^4] at n=64/128/256: {:?}",
        maxima
    );
}
