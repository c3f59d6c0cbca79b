//! The `ehe` command line: key generation, message encryption/decryption,
//! circuit building, computation encryption (keygen / eval / decrypt),
//! security reports and a benchmark harness.
//!
//! Output is plain `key=value` text; `bench` emits CSV. Exit codes: 0 ok,
//! 2 usage or parameter guard, 3 file/format, 4 contract or dimension,
//! 5 sampling/budget/keygen failure.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::RngCore;

use crate::circuits::{build_function_circuit, FunctionKind, FunctionSpec};
use crate::cryptoval::{
    decrypt_result, encrypt_computation, evaluate_program, ActionVariant, GenStats,
    PipelineOptions,
};
use crate::error::{Error, Result};
use crate::format;
use crate::ime::{decrypt_stream, encrypt_stream, Ciphertext, PaddingMode};
use crate::keygen::{generate_keypair, KeyParams};
use crate::security::{key_report, structural_report, SecurityParams, SecurityReport};

#[derive(Parser, Debug)]
#[command(
    name = "ehe",
    about = "Exact homomorphic encryption over GF(2) polynomial sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a message key pair.
    Keygen(KeygenArgs),
    /// Encrypt a file under a public key.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext file with a private key.
    Decrypt(DecryptArgs),
    /// Reversible-circuit utilities.
    #[command(subcommand)]
    Circuit(CircuitCommand),
    /// Computation encryption.
    #[command(subcommand)]
    Cv(CvCommand),
    /// Security estimators and the parameter criterion.
    Security(SecurityArgs),
    /// Benchmark harness (CSV rows per operation).
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
enum CircuitCommand {
    /// Build an arithmetic circuit and write it to a file.
    Build(CircuitBuildArgs),
}

#[derive(Subcommand, Debug)]
enum CvCommand {
    /// Encrypt a computation: emit the public program and the private key.
    Keygen(CvKeygenArgs),
    /// Evaluate an encrypted program on a ciphertext file.
    Eval(CvEvalArgs),
    /// Decrypt an evaluated result file.
    Decrypt(CvDecryptArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    w: Option<u32>,
    /// Preset pair "(k,w)", e.g. "(128,160)".
    #[arg(long)]
    preset: Option<String>,
    /// Seed (decimal u64) or "os" for system entropy.
    #[arg(long)]
    seed: String,
    #[arg(long)]
    d_lo: Option<u32>,
    #[arg(long)]
    d_hi: Option<u32>,
    /// Allow small, insecure parameters (test mode).
    #[arg(long)]
    insecure_params: bool,
    /// Use k variables instead of w (encrypt-only keys).
    #[arg(long)]
    nvars_k: bool,
    /// Output path prefix; writes PREFIX.pub and PREFIX.priv.
    #[arg(long, default_value = "ehe_key")]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct EncryptArgs {
    /// Public key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long, name = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// zeros | random
    #[arg(long, default_value = "zeros")]
    padding: String,
    /// Seed for random padding.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    /// Private key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long, name = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CircuitBuildArgs {
    /// add | sub | mul | div | compare | sum-of-squares | monomial-power
    #[arg(long = "fn")]
    function: String,
    /// Operand width in bits.
    #[arg(long)]
    width: u32,
    /// Exponent for monomial-power.
    #[arg(long, default_value_t = 3)]
    exponent: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CvKeygenArgs {
    /// Message private key file.
    #[arg(long)]
    key: PathBuf,
    /// add | sub | mul | div | compare | sum-of-squares | monomial-power
    #[arg(long = "fn")]
    function: String,
    /// Operand width in bits (plaintext must be 2 operands of this width).
    #[arg(long)]
    width: u32,
    /// Exponent for monomial-power.
    #[arg(long, default_value_t = 3)]
    exponent: u32,
    /// Program width override (defaults to the blindness shell).
    #[arg(long)]
    n: Option<u32>,
    /// Section count (defaults to ceil(n/8)).
    #[arg(long)]
    sections: Option<usize>,
    /// two-key | same-key
    #[arg(long, default_value = "two-key")]
    variant: String,
    #[arg(long)]
    seed: String,
    #[arg(long)]
    out_program: PathBuf,
    #[arg(long)]
    out_key: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CvEvalArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long, name = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CvDecryptArgs {
    /// Cryptovaluation private key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long, name = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SecurityArgs {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    w: Option<u32>,
    /// Public-key degree d (XL uses D = d).
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = 2.5)]
    chi: f64,
    /// Comma-separated noncommuting block sizes, e.g. "13,13,13".
    #[arg(long)]
    blocks: Option<String>,
    /// Analyze an actual private key file instead.
    #[arg(long)]
    key: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// "(k,w)" for message encryption, "(k,w,n)" to add cryptovaluation.
    #[arg(long)]
    preset: String,
    /// Function for the cryptovaluation columns.
    #[arg(long = "fn", default_value = "add")]
    function: String,
    #[arg(long, default_value = "1")]
    seed: String,
    #[arg(long)]
    insecure_params: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Messages per encrypt/decrypt timing batch.
    #[arg(long, default_value_t = 16)]
    messages: u32,
    /// CSV output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run the CLI on the given arguments (without the program name) and return
/// the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = vec!["ehe".into()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with exit code 0
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) => 2,
        Error::BadMagic | Error::Version(_) | Error::WrongKind { .. } | Error::Truncated(_) => 3,
        Error::Io(_) => 3,
        Error::Dimension { .. } | Error::Contract(_) => 4,
        Error::Sampling { .. } | Error::Budget(_) | Error::Keygen(_) => 5,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen(args) => with_pool(args.jobs, || cmd_keygen(&args)),
        Command::Encrypt(args) => with_pool(args.jobs, || cmd_encrypt(&args)),
        Command::Decrypt(args) => with_pool(args.jobs, || cmd_decrypt(&args)),
        Command::Circuit(CircuitCommand::Build(args)) => cmd_circuit_build(&args),
        Command::Cv(CvCommand::Keygen(args)) => with_pool(args.jobs, || cmd_cv_keygen(&args)),
        Command::Cv(CvCommand::Eval(args)) => with_pool(args.jobs, || cmd_cv_eval(&args)),
        Command::Cv(CvCommand::Decrypt(args)) => cmd_cv_decrypt(&args),
        Command::Security(args) => cmd_security(&args),
        Command::Bench(args) => {
            let jobs = args.jobs;
            with_pool(jobs, || cmd_bench(&args))
        }
    }
}

/// Run inside a bounded rayon pool when --jobs is given. Output never
/// depends on the worker count; only the wall time does.
fn with_pool<F: FnOnce() -> Result<()> + Send>(jobs: Option<usize>, f: F) -> Result<()> {
    match jobs {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))?;
            pool.install(f)
        }
    }
}

fn parse_seed(text: &str) -> Result<u64> {
    if text == "os" {
        let mut rng = rand::rngs::OsRng;
        return Ok(rng.next_u64());
    }
    text.parse::<u64>()
        .map_err(|_| Error::Parameter(format!("seed must be a u64 or \"os\", got '{text}'")))
}

/// Parse "(k,w)" or "(k,w,n)".
fn parse_preset(text: &str) -> Result<Vec<u32>> {
    let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(Error::Parameter(format!(
            "preset must be (k,w) or (k,w,n), got '{text}'"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| Error::Parameter(format!("bad preset component '{p}'")))
        })
        .collect()
}

fn parse_padding(text: &str, seed: Option<&String>) -> Result<PaddingMode> {
    match text {
        "zeros" => Ok(PaddingMode::Zeros),
        "random" => {
            let seed = parse_seed(seed.map(String::as_str).unwrap_or("os"))?;
            Ok(PaddingMode::Random { seed })
        }
        other => Err(Error::Parameter(format!(
            "padding must be zeros or random, got '{other}'"
        ))),
    }
}

fn parse_variant(text: &str) -> Result<ActionVariant> {
    match text {
        "two-key" => Ok(ActionVariant::TwoKey),
        "same-key" => Ok(ActionVariant::SameKey),
        other => Err(Error::Parameter(format!(
            "variant must be two-key or same-key, got '{other}'"
        ))),
    }
}

fn function_spec(name: &str, width: u32, exponent: u32) -> Result<FunctionSpec> {
    let kind = FunctionKind::parse(name)?;
    let spec = FunctionSpec::new(kind, width)?;
    if kind == FunctionKind::MonomialPower {
        spec.with_exponent(exponent)
    } else {
        Ok(spec)
    }
}

fn cmd_keygen(args: &KeygenArgs) -> Result<()> {
    let (k, w) = match (&args.preset, args.k, args.w) {
        (Some(p), None, None) => {
            let parts = parse_preset(p)?;
            (parts[0], parts[1])
        }
        (None, Some(k), Some(w)) => (k, w),
        _ => {
            return Err(Error::Parameter(
                "give either --preset \"(k,w)\" or both --k and --w".into(),
            ));
        }
    };
    let seed = parse_seed(&args.seed)?;
    let mut params = if args.insecure_params {
        KeyParams::insecure(k, w, seed)
    } else {
        KeyParams::secure(k, w, seed)
    };
    if args.nvars_k {
        params = params.with_nvars_k();
    }
    if let Some(d) = args.d_lo {
        params.d_lo = d;
    }
    if let Some(d) = args.d_hi {
        params.d_hi = d;
    }
    let started = Instant::now();
    let (public, private) = generate_keypair(&params)?;
    let elapsed = started.elapsed().as_secs_f64();
    let pub_path = args.out.with_extension("pub");
    let priv_path = args.out.with_extension("priv");
    format::write_file(&pub_path, &format::serialize_public_key(&public))?;
    format::write_file(&priv_path, &format::serialize_private_key(&private))?;
    println!("k={k}");
    println!("w={w}");
    println!("nvars={}", params.nvars);
    println!("degree={}", public.measured_degree);
    println!("gates={}", private.mapping.gate_count());
    println!("seconds={elapsed:.3}");
    println!("public_key={}", pub_path.display());
    println!("private_key={}", priv_path.display());
    Ok(())
}

fn cmd_encrypt(args: &EncryptArgs) -> Result<()> {
    let pk = format::deserialize_public_key(&format::read_file(&args.key)?)?;
    let data = format::read_file(&args.input)?;
    let padding = parse_padding(&args.padding, args.seed.as_ref())?;
    let blocks = encrypt_stream(&pk, &data, padding)?;
    let bytes = format::serialize_ciphertexts(pk.k, pk.w, data.len() as u64 * 8, &blocks);
    format::write_file(&args.out, &bytes)?;
    println!("blocks={}", blocks.len());
    println!("ciphertext={}", args.out.display());
    Ok(())
}

fn cmd_decrypt(args: &DecryptArgs) -> Result<()> {
    let sk = format::deserialize_private_key(&format::read_file(&args.key)?)?;
    let (k, w, message_bits, blocks) =
        format::deserialize_ciphertexts(&format::read_file(&args.input)?)?;
    if k != sk.params.k || w != sk.params.w {
        return Err(Error::Contract(format!(
            "ciphertext is for (k={k}, w={w}), key is (k={}, w={})",
            sk.params.k, sk.params.w
        )));
    }
    let data = decrypt_stream(&sk, &blocks, message_bits)?;
    format::write_file(&args.out, &data)?;
    println!("bytes={}", data.len());
    println!("plaintext={}", args.out.display());
    Ok(())
}

fn cmd_circuit_build(args: &CircuitBuildArgs) -> Result<()> {
    let spec = function_spec(&args.function, args.width, args.exponent)?;
    let circuit = build_function_circuit(&spec)?;
    format::write_file(&args.out, &format::serialize_circuit(&circuit))?;
    let layout = spec.layout();
    println!("function={}", spec.kind.name());
    println!("operand_bits={}", spec.operand_bits);
    println!("width={}", circuit.width());
    println!("gates={}", circuit.gate_count());
    println!(
        "outputs={}",
        layout
            .outputs
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    println!("circuit={}", args.out.display());
    Ok(())
}

fn cmd_cv_keygen(args: &CvKeygenArgs) -> Result<()> {
    let sk = format::deserialize_private_key(&format::read_file(&args.key)?)?;
    let spec = function_spec(&args.function, args.width, args.exponent)?;
    let seed = parse_seed(&args.seed)?;
    let mut opts = PipelineOptions::new(parse_variant(&args.variant)?, seed);
    opts.n_override = args.n;
    opts.sections = args.sections;
    let started = Instant::now();
    let (program, cv_key, stats) = encrypt_computation(&sk, &spec, &opts)?;
    let elapsed = started.elapsed().as_secs_f64();
    format::write_file(&args.out_program, &format::serialize_program(&program))?;
    format::write_file(&args.out_key, &format::serialize_cv_key(&cv_key))?;
    println!("function={}", spec.kind.name());
    println!("n={}", program.n);
    println!("sections={}", program.sections.len());
    println!("work_floor={}", program.blindness.work_floor);
    println!("max_section_work={}", stats.max_section_work());
    println!("peak_monomials={}", stats.peak_monomials);
    println!("seconds={elapsed:.3}");
    println!("program={}", args.out_program.display());
    println!("cv_key={}", args.out_key.display());
    Ok(())
}

fn cmd_cv_eval(args: &CvEvalArgs) -> Result<()> {
    let program = format::deserialize_program(&format::read_file(&args.program)?)?;
    let (k, w, message_bits, blocks) =
        format::deserialize_ciphertexts(&format::read_file(&args.input)?)?;
    if w != program.w {
        return Err(Error::dimension("program input width", program.w, w));
    }
    let started = Instant::now();
    let evaluated: Vec<Ciphertext> = blocks
        .iter()
        .map(|c| {
            evaluate_program(&program, c).map(|bits| Ciphertext { bits })
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed = started.elapsed().as_secs_f64();
    let bytes = format::serialize_ciphertexts(k, program.n, message_bits, &evaluated);
    format::write_file(&args.out, &bytes)?;
    println!("blocks={}", evaluated.len());
    println!("seconds={elapsed:.3}");
    println!("evaluated={}", args.out.display());
    Ok(())
}

fn cmd_cv_decrypt(args: &CvDecryptArgs) -> Result<()> {
    let key = format::deserialize_cv_key(&format::read_file(&args.key)?)?;
    let (_, n, _, blocks) = format::deserialize_ciphertexts(&format::read_file(&args.input)?)?;
    if n != key.r_cv.width() {
        return Err(Error::dimension("evaluated state width", key.r_cv.width(), n));
    }
    let mut out_bits = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let result = decrypt_result(&key, &block.bits, &key.output_map)?;
        if result.len() <= 64 {
            println!("result_{i}={}", result.to_u64());
        }
        out_bits.push(result);
    }
    // raw packed result bits, one byte-aligned record per block
    let mut bytes = Vec::new();
    for bits in &out_bits {
        let mut packed = vec![0u8; (bits.len() as usize).div_ceil(8)];
        for i in 0..bits.len() {
            if bits.get(i) {
                packed[(i / 8) as usize] |= 1 << (i % 8);
            }
        }
        bytes.extend_from_slice(&packed);
    }
    format::write_file(&args.out, &bytes)?;
    println!("blocks={}", out_bits.len());
    println!("result={}", args.out.display());
    Ok(())
}

fn print_report(report: &SecurityReport) {
    let p = &report.params;
    println!("k={}", p.k);
    println!("w={}", p.w);
    println!("d={}", p.d);
    println!("cap_d={}", p.cap_d.unwrap_or(p.d));
    println!("chi={}", p.chi);
    println!(
        "blocks={}",
        p.block_sizes
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    println!("xl_monomials_log2={:.4}", crate::security::log2_biguint(&report.xl_monomials));
    println!("log2_xl={:.4}", report.log2_xl);
    println!(
        "log2_xl_quadratic_subexp={:.4}",
        report.log2_xl_quadratic_subexp
    );
    println!("log2_icrp={:.4}", report.log2_icrp);
    println!("log2_denc={:.4}", report.log2_denc);
    println!("log2_grover={:.4}", report.log2_grover);
    println!("criterion_denc_above_icrp={}", report.criterion.denc_above_icrp);
    println!("criterion_icrp_above_xl={}", report.criterion.icrp_above_xl);
    println!(
        "criterion_xl_above_bruteforce={}",
        report.criterion.xl_above_bruteforce
    );
    println!("criterion_ok={}", report.criterion.all());
    println!("level_log2={:.4}", report.level_log2());
    println!("band_128={}", report.level_log2() >= 128.0);
    println!("band_1024={}", report.level_log2() >= 1024.0);
    if let Some(blocks) = &report.measured_blocks {
        for (i, b) in blocks.iter().enumerate() {
            println!(
                "block_{i}=declared:{},greedy:{},exact:{}",
                b.declared,
                b.greedy,
                b.exact.map_or("-".to_string(), |e| e.to_string())
            );
        }
    }
}

fn cmd_security(args: &SecurityArgs) -> Result<()> {
    let report = if let Some(path) = &args.key {
        let sk = format::deserialize_private_key(&format::read_file(path)?)?;
        key_report(&sk, args.chi)?
    } else {
        let (k, w, d) = match (args.k, args.w, args.d) {
            (Some(k), Some(w), Some(d)) => (k, w, d),
            _ => {
                return Err(Error::Parameter(
                    "give --k, --w and --d, or --key FILE".into(),
                ));
            }
        };
        let blocks = match &args.blocks {
            Some(text) => text
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parameter(format!("bad block size '{p}'")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![k.div_ceil(10); 8],
        };
        structural_report(&SecurityParams::new(k, w, d, args.chi, blocks))?
    };
    print_report(&report);
    Ok(())
}

struct BenchRow {
    operation: &'static str,
    k: u32,
    w: u32,
    n: u32,
    sections: u32,
    workers: usize,
    wall_seconds: f64,
    peak_poly_monomials: usize,
    total_monomials: usize,
    monomial_ops: u64,
}

const BENCH_HEADER: &str =
    "operation,k,w,n,sections,workers,wall_seconds,peak_poly_monomials,total_monomials,monomial_ops";

impl BenchRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{},{}",
            self.operation,
            self.k,
            self.w,
            self.n,
            self.sections,
            self.workers,
            self.wall_seconds,
            self.peak_poly_monomials,
            self.total_monomials,
            self.monomial_ops
        )
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let parts = parse_preset(&args.preset)?;
    let (k, w) = (parts[0], parts[1]);
    let n = parts.get(2).copied();
    let seed = parse_seed(&args.seed)?;
    let workers = args.jobs.unwrap_or_else(rayon::current_num_threads);
    let params = if args.insecure_params {
        KeyParams::insecure(k, w, seed)
    } else {
        KeyParams::secure(k, w, seed)
    };
    let mut rows: Vec<BenchRow> = Vec::new();

    let started = Instant::now();
    let (public, private) = generate_keypair(&params)?;
    let keygen_s = started.elapsed().as_secs_f64();
    let peak = public.polys.iter().map(|p| p.monomial_count()).max().unwrap_or(0);
    let total: usize = public.polys.iter().map(|p| p.monomial_count()).sum();
    rows.push(BenchRow {
        operation: "keygen",
        k,
        w,
        n: 0,
        sections: 0,
        workers,
        wall_seconds: keygen_s,
        peak_poly_monomials: peak,
        total_monomials: total,
        monomial_ops: 0,
    });

    let factory = crate::rng::StreamFactory::new(seed ^ 0xBE11C);
    let mut rng = factory.stream("bench-messages", 0);
    let messages: Vec<crate::ime::Plaintext> = (0..args.messages)
        .map(|_| crate::ime::random_plaintext(k, &mut rng))
        .collect();
    let started = Instant::now();
    let ciphertexts: Vec<Ciphertext> = messages
        .iter()
        .map(|m| crate::ime::encrypt(&public, m, PaddingMode::Zeros))
        .collect::<Result<Vec<_>>>()?;
    let encrypt_s = started.elapsed().as_secs_f64() / args.messages.max(1) as f64;
    rows.push(BenchRow {
        operation: "encrypt",
        k,
        w,
        n: 0,
        sections: 0,
        workers,
        wall_seconds: encrypt_s,
        peak_poly_monomials: peak,
        total_monomials: total,
        monomial_ops: 0,
    });

    let started = Instant::now();
    for c in &ciphertexts {
        let _ = crate::ime::decrypt(&private, c)?;
    }
    let decrypt_s = started.elapsed().as_secs_f64() / ciphertexts.len().max(1) as f64;
    rows.push(BenchRow {
        operation: "decrypt",
        k,
        w,
        n: 0,
        sections: 0,
        workers,
        wall_seconds: decrypt_s,
        peak_poly_monomials: peak,
        total_monomials: total,
        monomial_ops: 0,
    });

    if let Some(n_target) = n {
        if k % 2 != 0 {
            return Err(Error::Parameter(
                "cryptovaluation bench needs an even k (two packed operands)".into(),
            ));
        }
        let spec = function_spec(&args.function, k / 2, 3)?;
        let mut opts = PipelineOptions::new(ActionVariant::TwoKey, seed ^ 0xCC);
        opts.n_override = Some(n_target);
        let started = Instant::now();
        let (program, cv_key, stats) = encrypt_computation(&private, &spec, &opts)?;
        let cvkg_s = started.elapsed().as_secs_f64();
        let push_cv = |rows: &mut Vec<BenchRow>,
                       op: &'static str,
                       secs: f64,
                       stats: &GenStats,
                       program: &crate::cryptoval::EncryptedProgram| {
            rows.push(BenchRow {
                operation: op,
                k,
                w,
                n: program.n,
                sections: program.sections.len() as u32,
                workers,
                wall_seconds: secs,
                peak_poly_monomials: stats.peak_monomials,
                total_monomials: stats.total_monomials,
                monomial_ops: stats.max_section_work(),
            });
        };
        push_cv(&mut rows, "cv_keygen", cvkg_s, &stats, &program);

        let started = Instant::now();
        let evaluated: Vec<crate::bits::BitVec> = ciphertexts
            .iter()
            .map(|c| evaluate_program(&program, c))
            .collect::<Result<Vec<_>>>()?;
        let eval_s = started.elapsed().as_secs_f64() / ciphertexts.len().max(1) as f64;
        push_cv(&mut rows, "cv_eval", eval_s, &stats, &program);

        let started = Instant::now();
        for state in &evaluated {
            let _ = decrypt_result(&cv_key, state, &program.output_map)?;
        }
        let cvde_s = started.elapsed().as_secs_f64() / evaluated.len().max(1) as f64;
        push_cv(&mut rows, "cv_decrypt", cvde_s, &stats, &program);
    }

    let mut csv = String::from(BENCH_HEADER);
    for row in &rows {
        csv.push('\n');
        csv.push_str(&row.csv());
    }
    match &args.out {
        Some(path) => {
            format::write_file(path, csv.as_bytes())?;
            println!("bench={}", path.display());
        }
        None => println!("{csv}"),
    }
    Ok(())
}
