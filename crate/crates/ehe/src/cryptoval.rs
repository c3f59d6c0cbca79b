//! Computation encryption and sectional evaluation.
//!
//! A target circuit M is hidden inside an encrypted action: undo the input
//! encryption, run M, apply the output encryption. The action's circuit is
//! split into contiguous sections with freshly sampled boundary keys that
//! cancel pairwise, each section is published as a polynomial set (generated
//! independently, so sections parallelize), and evaluation folds the sets
//! over the ciphertext. The output encryption circuit is the private
//! cryptovaluation key; running its inverse on the final state and projecting
//! the output wires recovers the plain result exactly.

use rayon::prelude::*;

use crate::anf::Anf;
use crate::bits::BitVec;
use crate::circuits::{build_function_circuit, FunctionSpec};
use crate::error::{Error, Result};
use crate::gates::{sample_gate, Circuit, RankDist};
use crate::ime::Ciphertext;
use crate::keygen::ImePrivateKey;
use crate::rng::StreamFactory;

/// How the encrypted action composes its encryption operators.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionVariant {
    /// One operator both decrypts the input and encrypts the output; the
    /// computation width must equal the ciphertext width.
    SameKey,
    /// Separate input and output operators; the computation width exceeds
    /// the ciphertext width and the input operator is identity-extended.
    TwoKey,
}

/// One published polynomial set: n polynomials over n variables.
pub type PolySet = Vec<Anf>;

/// Shell label shared by every program of one blindness class.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlindnessClass {
    pub width: u32,
    pub sections: u32,
    /// Per-section generation-work band floor (monomial operations).
    pub work_floor: u64,
}

/// The public encrypted program: sectional polynomial sets plus the wire
/// map of the (still encrypted) result.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EncryptedProgram {
    pub n: u32,
    pub w: u32,
    pub k: u32,
    pub sections: Vec<PolySet>,
    pub output_map: Vec<u32>,
    pub blindness: BlindnessClass,
}

/// The private cryptovaluation key: the output-encryption circuit plus the
/// message-key link and result map, enough to decrypt on its own.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CryptovalPrivateKey {
    pub r_cv: Circuit,
    pub k: u32,
    pub w: u32,
    pub output_map: Vec<u32>,
}

/// Per-section generation statistics (the cost model's observables).
#[derive(Clone, Debug, Default)]
pub struct GenStats {
    /// Monomial operations per section (scans + XOR toggles), padding included.
    pub section_work: Vec<u64>,
    /// Identity-acting padding gates applied per section.
    pub pad_gates: Vec<u64>,
    /// Largest monomial count seen in any polynomial.
    pub peak_monomials: usize,
    /// Total monomials across all published polynomials.
    pub total_monomials: usize,
}

impl GenStats {
    pub fn max_section_work(&self) -> u64 {
        self.section_work.iter().copied().max().unwrap_or(0)
    }
}

/// Compose the encrypted action as a circuit, never as polynomial products:
/// inverse input encryption (identity-extended), then M, then the output
/// encryption.
pub fn build_encrypted_action(
    m_circuit: &Circuit,
    r_en: &Circuit,
    r_cv: &Circuit,
    variant: ActionVariant,
) -> Result<Circuit> {
    let n = m_circuit.width();
    if r_cv.width() != n {
        return Err(Error::dimension("output encryption operator", n, r_cv.width()));
    }
    match variant {
        ActionVariant::SameKey => {
            if r_en.width() != n {
                return Err(Error::dimension("same-key operator", n, r_en.width()));
            }
            if r_en != r_cv {
                return Err(Error::Contract(
                    "same-key action requires identical input and output operators".into(),
                ));
            }
        }
        ActionVariant::TwoKey => {
            if r_en.width() >= n {
                return Err(Error::Contract(format!(
                    "two-key action requires n > w, got n={n} w={}",
                    r_en.width()
                )));
            }
        }
    }
    let undo_input = r_en.inverse().extended(n);
    undo_input.then(m_circuit)?.then(r_cv)
}

/// Split the action into `e` near-equal contiguous gate runs and wrap the
/// interior boundaries with freshly sampled keys that cancel pairwise, so
/// the sections compose to exactly the original action and no residual key
/// remains beyond the output operator.
pub fn sectionalize(
    u_cv: &Circuit,
    e: usize,
    boundary_gates: usize,
    factory: &StreamFactory,
) -> Result<Vec<Circuit>> {
    let total = u_cv.gate_count();
    if e == 0 || e > total.max(1) {
        return Err(Error::Parameter(format!(
            "section count {e} outside 1..={}",
            total.max(1)
        )));
    }
    let n = u_cv.width();
    if e == 1 {
        return Ok(vec![u_cv.clone()]);
    }
    // near-equal contiguous runs
    let base = total / e;
    let extra = total % e;
    let mut runs: Vec<Vec<_>> = Vec::with_capacity(e);
    let mut cursor = 0;
    for q in 0..e {
        let len = base + usize::from(q < extra);
        runs.push(u_cv.gates()[cursor..cursor + len].to_vec());
        cursor += len;
    }
    // Boundary keys B_1..B_{e-1}. Low polarity keeps their substitution
    // expansion small, so thin sections stay inside the monomial budget.
    let dist = RankDist::new(vec![(1, 0.3), (2, 0.5), (3, 0.2)], 1)?;
    let boundaries: Vec<Circuit> = (0..e - 1)
        .map(|q| {
            let mut rng = factory.stream("boundary", q as u64);
            let gates = (0..boundary_gates)
                .map(|_| sample_gate(n, &dist, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            Circuit::new(n, gates)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sections = Vec::with_capacity(e);
    for (q, run) in runs.into_iter().enumerate() {
        let core = Circuit::new(n, run)?;
        let mut section = if q == 0 {
            core
        } else {
            boundaries[q - 1].inverse().then(&core)?
        };
        if q < e - 1 {
            section = section.then(&boundaries[q])?;
        }
        sections.push(section);
    }
    Ok(sections)
}

/// Generate one section's polynomial set with work accounting and
/// band-floor padding.
///
/// The published polynomials are the section circuit's generated tuple. To
/// keep generation times of different functions in the same band (the
/// blindness requirement), sections whose generation work lands under the
/// floor run extra identity-acting conjugation churn: random gates applied
/// to an identity tuple and then unapplied in reverse, a palindrome whose
/// net effect is nothing but whose substitutions are counted like any
/// other. The published set is unaffected.
fn generate_section(
    circuit: &Circuit,
    budget: usize,
    work_floor: u64,
    pad_rng_factory: &StreamFactory,
    section_index: u64,
) -> Result<(PolySet, u64, u64, usize)> {
    let n = circuit.width();
    let mut work: u64 = 0;
    let mut peak: usize = 0;
    let mut polys: PolySet = Vec::with_capacity(n as usize);
    for i in 0..n {
        let mut p = Anf::variable(n, i);
        for g in circuit.gates().iter().rev() {
            let ops = g.substitute(&mut p);
            work += ops.total();
            peak = peak.max(p.monomial_count());
            if p.monomial_count() > budget {
                return Err(Error::Budget(format!(
                    "polynomial {i} of section {section_index} exceeded {budget} monomials"
                )));
            }
        }
        polys.push(p);
    }
    // band padding: palindromic identity-acting churn
    let mut pad_gates: u64 = 0;
    if work < work_floor {
        let dist = RankDist::standard();
        let mut rng = pad_rng_factory.stream("pad", section_index);
        let mut tuple: Vec<Anf> = (0..n).map(|i| Anf::variable(n, i)).collect();
        while work < work_floor {
            let mut applied = Vec::new();
            let mut round_forward: u64 = 0;
            // forward half: stop once the unwind alone can reach the floor
            loop {
                let g = sample_gate(n, &dist, &mut rng)?;
                let mut forward: u64 = 0;
                for p in tuple.iter_mut() {
                    let ops = g.substitute(p);
                    forward += ops.total();
                    peak = peak.max(p.monomial_count());
                }
                work += forward;
                round_forward += forward;
                pad_gates += 1;
                applied.push(g);
                if work + round_forward >= work_floor || applied.len() >= 4096 {
                    break;
                }
            }
            // unwind half: retrace to the identity tuple
            for g in applied.iter().rev() {
                for p in tuple.iter_mut() {
                    let ops = g.substitute(p);
                    work += ops.total();
                }
                pad_gates += 1;
            }
            debug_assert!(tuple
                .iter()
                .enumerate()
                .all(|(i, p)| *p == Anf::variable(n, i as u32)));
        }
    }
    Ok((polys, work, pad_gates, peak))
}

/// Options for program generation.
#[derive(Clone, Copy, Debug)]
pub struct GenerateOptions {
    /// Max monomials per polynomial; defaults to 4 n^2.
    pub monomial_budget: Option<usize>,
    /// Per-section work band floor; defaults to n^3 / 8.
    pub work_floor: Option<u64>,
    pub seed: u64,
}

impl GenerateOptions {
    pub fn new(seed: u64) -> Self {
        GenerateOptions {
            monomial_budget: None,
            work_floor: None,
            seed,
        }
    }
}

/// Generate the sectional polynomial sets in parallel. Sections are
/// independent, and each one is deterministic given the seed, so the output
/// is identical for every worker count.
pub fn generate_program(
    sections: &[Circuit],
    k: u32,
    w: u32,
    output_map: Vec<u32>,
    opts: &GenerateOptions,
) -> Result<(EncryptedProgram, GenStats)> {
    if sections.is_empty() {
        return Err(Error::Parameter("program needs at least one section".into()));
    }
    let n = sections[0].width();
    for s in sections {
        if s.width() != n {
            return Err(Error::dimension("section width", n, s.width()));
        }
    }
    let budget = opts
        .monomial_budget
        .unwrap_or(4 * (n as usize) * (n as usize));
    let floor = opts.work_floor.unwrap_or((n as u64).pow(3) / 8);
    let factory = StreamFactory::new(opts.seed).child("generation", 0);
    let results: Vec<(PolySet, u64, u64, usize)> = sections
        .par_iter()
        .enumerate()
        .map(|(q, circ)| generate_section(circ, budget, floor, &factory, q as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut stats = GenStats::default();
    let mut published = Vec::with_capacity(results.len());
    for (polys, work, pads, peak) in results {
        stats.section_work.push(work);
        stats.pad_gates.push(pads);
        stats.peak_monomials = stats.peak_monomials.max(peak);
        stats.total_monomials += polys.iter().map(Anf::monomial_count).sum::<usize>();
        published.push(polys);
    }
    let program = EncryptedProgram {
        n,
        w,
        k,
        output_map,
        blindness: BlindnessClass {
            width: n,
            sections: sections.len() as u32,
            work_floor: floor,
        },
        sections: published,
    };
    Ok((program, stats))
}

/// Sequentially evaluate the sections on a ciphertext (zero-extended to the
/// program width): each section's polynomials map the previous state to the
/// next. Polynomials within a section evaluate in parallel.
pub fn evaluate_program(program: &EncryptedProgram, c: &Ciphertext) -> Result<BitVec> {
    if c.bits.len() != program.w {
        return Err(Error::dimension("program input", program.w, c.bits.len()));
    }
    let n = program.n;
    let mut state = c.bits.extended(n);
    for polys in &program.sections {
        let values: Vec<bool> = polys
            .par_iter()
            .map(|p| p.eval(&state))
            .collect::<Result<Vec<_>>>()?;
        let mut next = BitVec::zeros(n);
        for (i, v) in values.into_iter().enumerate() {
            next.set(i as u32, v);
        }
        state = next;
    }
    Ok(state)
}

/// Decrypt an evaluated state: run the inverse of the output-encryption
/// circuit, then project the output wires, in map order.
pub fn decrypt_result(
    sk: &CryptovalPrivateKey,
    state: &BitVec,
    output_map: &[u32],
) -> Result<BitVec> {
    if state.len() != sk.r_cv.width() {
        return Err(Error::dimension("evaluated state", sk.r_cv.width(), state.len()));
    }
    let plain = sk.r_cv.inverse().run_state(state)?;
    let mut out = BitVec::zeros(output_map.len() as u32);
    for (i, &wire) in output_map.iter().enumerate() {
        if wire >= plain.len() {
            return Err(Error::dimension("output wire", plain.len(), wire));
        }
        out.set(i as u32, plain.get(wire));
    }
    Ok(out)
}

/// Options for the full computation-encryption pipeline.
#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub variant: ActionVariant,
    /// Program width; defaults to the blindness shell for the operand width.
    pub n_override: Option<u32>,
    /// Section count; defaults to ceil(n/8), clamped to the gate count.
    pub sections: Option<usize>,
    /// Output-encryption circuit size; defaults to n gates.
    pub rcv_gates: Option<usize>,
    /// Boundary key size; defaults to ceil(n/4) gates.
    pub boundary_gates: Option<usize>,
    pub generate: GenerateOptions,
}

impl PipelineOptions {
    pub fn new(variant: ActionVariant, seed: u64) -> Self {
        PipelineOptions {
            variant,
            n_override: None,
            sections: None,
            rcv_gates: None,
            boundary_gates: None,
            generate: GenerateOptions::new(seed),
        }
    }
}

/// Build an encrypted program for a function under a message key: compose
/// the encrypted action, sectionalize it, and generate the polynomial sets.
/// Returns the public program, the private cryptovaluation key and the
/// generation statistics.
pub fn encrypt_computation(
    msg_key: &ImePrivateKey,
    spec: &FunctionSpec,
    opts: &PipelineOptions,
) -> Result<(EncryptedProgram, CryptovalPrivateKey, GenStats)> {
    let k = msg_key.params.k;
    let w = msg_key.params.w;
    if spec.input_bits() != k {
        return Err(Error::dimension("function input bits", k, spec.input_bits()));
    }
    let layout = spec.layout();
    let shell = FunctionSpec::shell_width(spec.operand_bits);
    let n = opts.n_override.unwrap_or(shell).max(layout.width);
    let m_circuit = build_function_circuit(spec)?.extended(n);
    let r_en = msg_key.full_circuit()?;
    let factory = StreamFactory::new(opts.generate.seed);
    let r_cv = match opts.variant {
        ActionVariant::SameKey => {
            if w != n {
                return Err(Error::Contract(format!(
                    "same-key pipeline needs a message key of width n={n}, got w={w}"
                )));
            }
            r_en.clone()
        }
        ActionVariant::TwoKey => {
            let gates = opts.rcv_gates.unwrap_or(n as usize);
            let dist = RankDist::standard();
            let mut rng = factory.stream("rcv", 0);
            Circuit::new(
                n,
                (0..gates)
                    .map(|_| sample_gate(n, &dist, &mut rng))
                    .collect::<Result<Vec<_>>>()?,
            )?
        }
    };
    let action = build_encrypted_action(&m_circuit, &r_en, &r_cv, opts.variant)?;
    // Thin sections keep every tuple shallow and its monomial count low;
    // about six core gates per section, held inside the supported range
    // n/8 <= e <= 4n.
    let e = opts
        .sections
        .unwrap_or_else(|| {
            action
                .gate_count()
                .div_ceil(6)
                .clamp((n as usize).div_ceil(8), 4 * n as usize)
        })
        .clamp(1, action.gate_count());
    let boundary = opts.boundary_gates.unwrap_or((n as usize).div_ceil(4));
    let sections = sectionalize(&action, e, boundary, &factory)?;
    let (program, stats) =
        generate_program(&sections, k, w, layout.outputs.clone(), &opts.generate)?;
    let key = CryptovalPrivateKey {
        r_cv,
        k,
        w,
        output_map: layout.outputs.clone(),
    };
    Ok((program, key, stats))
}
