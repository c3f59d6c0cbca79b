//! Message-encryption key generation.
//!
//! A key pair is built in three steps: prepare an initial ordered set of `w`
//! polynomials (k independent linear entries plus w-k low-degree nonlinear
//! ones), sample a random encryption-mapping circuit organized around blocks
//! of pairwise noncommuting gates, and push every initial polynomial through
//! the mapping's substitution chain. The resulting polynomial set is the
//! public key; the mapping circuit (plus the initial-set recipe) is the
//! private key.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::anf::{Anf, Monomial};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gates::{commutes, sample_gate, Circuit, Gate, RankDist};
use crate::rng::StreamFactory;

/// Retries per gate slot before sampling gives up.
const SLOT_RETRIES: usize = 120;
/// Full keygen attempts before reporting a degree failure.
const KEYGEN_ATTEMPTS: u64 = 16;

/// Parameter mode: secure presets enforce the published criterion ranges,
/// insecure mode unlocks small test values.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParamMode {
    Secure,
    Insecure,
}

/// Key-generation parameters.
#[derive(Clone, PartialEq, Debug)]
pub struct KeyParams {
    /// Plaintext bits.
    pub k: u32,
    /// Ciphertext bits = number of public polynomials.
    pub w: u32,
    /// Variable count; `w` (default, decryptable) or `k` (encrypt-only).
    pub nvars: u32,
    /// Target measured-degree range for the public key.
    pub d_lo: u32,
    pub d_hi: u32,
    /// Sizes of the pairwise-noncommuting gate blocks.
    pub block_sizes: Vec<u32>,
    /// Filler gates inserted around each block.
    pub fillers_per_gap: u32,
    /// Maximum monomials per public polynomial.
    pub monomial_budget: usize,
    pub seed: u64,
    pub mode: ParamMode,
}

impl KeyParams {
    /// Defaults satisfying the security criterion ranges: 8 blocks of
    /// ceil(k/10) gates, degree window [ceil(k/10), k/2), budget 4*v^2.
    pub fn secure(k: u32, w: u32, seed: u64) -> Self {
        let h = k.div_ceil(10);
        KeyParams {
            k,
            w,
            nvars: w,
            d_lo: h,
            d_hi: k / 2 - 1,
            block_sizes: vec![h; 8],
            fillers_per_gap: 4,
            monomial_budget: 4 * (w as usize) * (w as usize),
            seed,
            mode: ParamMode::Secure,
        }
    }

    /// Small test parameters (not secure): two blocks of three gates,
    /// shrunk further when k cannot hold them.
    pub fn insecure(k: u32, w: u32, seed: u64) -> Self {
        let block_sizes = if k >= 6 {
            vec![3, 3]
        } else if k >= 4 {
            vec![2, 2]
        } else {
            vec![k.clamp(1, 2)]
        };
        KeyParams {
            k,
            w,
            nvars: w,
            d_lo: 2,
            d_hi: w,
            block_sizes,
            fillers_per_gap: 2,
            monomial_budget: (4 * (w as usize) * (w as usize)).max(64),
            seed,
            mode: ParamMode::Insecure,
        }
    }

    pub fn with_nvars_k(mut self) -> Self {
        self.nvars = self.k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.w < self.k {
            return Err(Error::Parameter(format!(
                "need w >= k, got w={} k={}",
                self.w, self.k
            )));
        }
        if self.k == 0 {
            return Err(Error::Parameter("k must be positive".into()));
        }
        if self.nvars != self.k && self.nvars != self.w {
            return Err(Error::Parameter(format!(
                "nvars must be k or w, got {}",
                self.nvars
            )));
        }
        if self.nvars < 3 {
            return Err(Error::Parameter(
                "key generation needs at least 3 variables (rank-2 block gates)".into(),
            ));
        }
        if self.d_lo < 2 || self.d_hi < self.d_lo {
            return Err(Error::Parameter(format!(
                "bad degree range [{}, {}]",
                self.d_lo, self.d_hi
            )));
        }
        if self.block_sizes.is_empty() {
            return Err(Error::Parameter("at least one noncommuting block".into()));
        }
        let h_sum: u32 = self.block_sizes.iter().sum();
        if h_sum > self.k {
            return Err(Error::Parameter(format!(
                "block sizes sum to {h_sum}, above the plaintext width {}",
                self.k
            )));
        }
        if self.mode == ParamMode::Secure {
            if self.k < 128 {
                return Err(Error::Parameter("secure mode requires k >= 128".into()));
            }
            if !(self.k <= self.w && self.w < 2 * self.k) {
                return Err(Error::Parameter("secure mode requires k <= w < 2k".into()));
            }
            if !(self.d_lo >= self.k.div_ceil(10) && self.d_hi < self.k / 2) {
                return Err(Error::Parameter(
                    "secure mode requires k/10 <= d < k/2".into(),
                ));
            }
            if self.block_sizes.len() < 8 {
                return Err(Error::Parameter("secure mode requires l >= 8 blocks".into()));
            }
            for &h in &self.block_sizes {
                if !(h >= self.k.div_ceil(10) && h < self.k / 2) {
                    return Err(Error::Parameter(
                        "secure mode requires k/10 <= h_i < k/2".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Recipe for one nonlinear initial polynomial `x_target + x_a * x_b`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InitEntry {
    pub target: u32,
    pub a: u32,
    pub b: u32,
}

/// The initial ordered polynomial set plus its construction recipe.
///
/// With `nvars = w` each nonlinear entry targets its own coordinate, so the
/// whole initial map is a sequence of Toffoli gates; that keeps the map
/// invertible and makes state-level decryption possible.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InitialSet {
    pub nvars: u32,
    pub w: u32,
    pub k: u32,
    pub entries: Vec<InitEntry>,
}

impl InitialSet {
    /// The ordered polynomials: x_1..x_k, then the nonlinear entries.
    pub fn polynomials(&self) -> Vec<Anf> {
        let v = self.nvars;
        let mut polys: Vec<Anf> = (0..self.k).map(|i| Anf::variable(v, i)).collect();
        for e in &self.entries {
            let mut p = Anf::variable(v, e.target);
            p.toggle(Monomial::from_vars(v, &[e.a, e.b]));
            polys.push(p);
        }
        polys
    }

    /// The Toffoli realization of the initial map (only when nvars = w).
    pub fn circuit(&self) -> Option<Circuit> {
        if self.nvars != self.w {
            return None;
        }
        let gates = self
            .entries
            .iter()
            .map(|e| Gate::toffoli(self.nvars, e.a, e.b, e.target))
            .collect();
        Some(Circuit::new(self.nvars, gates).unwrap())
    }
}

/// Step 1: k identity variables, then w-k degree-2 entries. With nvars = w
/// entry j targets coordinate j and multiplies two distinct variables from
/// the linear block; with nvars = k the target coordinate is drawn at random.
pub fn build_initial_set(params: &KeyParams) -> Result<InitialSet> {
    params.validate()?;
    let factory = StreamFactory::new(params.seed);
    let mut rng = factory.stream("initial-set", 0);
    let mut entries = Vec::new();
    for j in params.k..params.w {
        let a = rng.gen_range(0..params.k);
        let b = loop {
            let b = rng.gen_range(0..params.k);
            if b != a {
                break b;
            }
        };
        let target = if params.nvars == params.w {
            j
        } else {
            rng.gen_range(0..params.k)
        };
        entries.push(InitEntry { target, a, b });
    }
    Ok(InitialSet {
        nvars: params.nvars,
        w: params.w,
        k: params.k,
        entries,
    })
}

/// Span of a designated noncommuting block inside the private circuit,
/// in execution-order gate indices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockSpan {
    pub start: u32,
    pub len: u32,
}

/// Public key: the ordered polynomial set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ImePublicKey {
    pub k: u32,
    pub w: u32,
    pub nvars: u32,
    pub measured_degree: u32,
    pub polys: Vec<Anf>,
}

/// Private key: the encryption-mapping circuit plus the initial-set recipe.
#[derive(Clone, PartialEq, Debug)]
pub struct ImePrivateKey {
    pub params: KeyParams,
    pub mapping: Circuit,
    pub blocks: Vec<BlockSpan>,
    pub initial: InitialSet,
}

impl ImePrivateKey {
    /// The full encryption circuit: the sampled mapping followed by the
    /// initial map's Toffoli gates. Its generated polynomial tuple equals
    /// the public key, so ciphertexts are states this circuit produces and
    /// its inverse decrypts them. Only defined for nvars = w keys.
    pub fn full_circuit(&self) -> Result<Circuit> {
        let init = self.initial.circuit().ok_or_else(|| {
            Error::Contract(
                "keys with nvars = k are encrypt-only (no state-level inverse); \
                 verify by re-encryption instead"
                    .into(),
            )
        })?;
        self.mapping.then(&init)
    }

    /// Rebuild the public polynomial set from the private material.
    pub fn regenerate_public_polys(&self) -> Vec<Anf> {
        self.mapping
            .transform_polynomials(self.initial.polynomials())
    }
}

/// Slot plan for the mapping sample: `None` is a filler slot, `Some(b)` a
/// slot of block `b`. Blocks are separated by filler runs.
fn build_plan(params: &KeyParams) -> Vec<Option<usize>> {
    let mut slots = Vec::new();
    for (bi, &h) in params.block_sizes.iter().enumerate() {
        for _ in 0..params.fillers_per_gap {
            slots.push(None);
        }
        for _ in 0..h {
            slots.push(Some(bi));
        }
    }
    for _ in 0..params.fillers_per_gap {
        slots.push(None);
    }
    slots
}

/// Propose a gate for a block under construction. Controls always include
/// every prior target of the block (so the new gate is shape-noncommuting
/// with each of them) plus random extras up to the minimum rank; the final
/// "capstone" gate of a block gets one extra control so its control monomial
/// reaches degree >= h. Block gates carry no polarity: the noncommutation
/// rule is stated on (target, controls) alone, and for polarity-free gates
/// shape noncommutativity coincides with semantic noncommutativity.
fn propose_block_gate(
    width: u32,
    prior: &[Gate],
    is_capstone: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Gate> {
    let mut controls = BitVec::zeros(width);
    for g in prior {
        controls.set(g.target(), true);
    }
    let taken = |wire: u32, controls: &BitVec, prior: &[Gate]| {
        controls.get(wire) || prior.iter().any(|g| g.target() == wire)
    };
    let mut guard = 0;
    let target = loop {
        let t = rng.gen_range(0..width);
        if !taken(t, &controls, prior) {
            break t;
        }
        guard += 1;
        if guard > 16 * width {
            return Err(Error::Sampling {
                constraint: "distinct block target wire".into(),
            });
        }
    };
    let min_rank = prior.len() as u32 + if is_capstone { 1 } else { 0 };
    let min_rank = min_rank.max(2);
    let mut guard = 0;
    while controls.count_ones() < min_rank {
        let wire = rng.gen_range(0..width);
        if wire != target && !taken(wire, &controls, prior) {
            controls.set(wire, true);
        }
        guard += 1;
        if guard > 32 * width {
            return Err(Error::Sampling {
                constraint: "block gate rank".into(),
            });
        }
    }
    Gate::new(target, controls, BitVec::zeros(width))
}

/// Sample `h` pairwise-noncommuting polarity-free gates of rank >= 2, the
/// raw material of a designated block.
pub fn sample_noncommuting_set(width: u32, h: u32, rng: &mut ChaCha8Rng) -> Result<Vec<Gate>> {
    let mut out: Vec<Gate> = Vec::new();
    for i in 0..h {
        let is_capstone = i + 1 == h;
        let mut accepted = false;
        for _ in 0..SLOT_RETRIES {
            let g = propose_block_gate(width, &out, is_capstone, rng)?;
            if out.iter().any(|p| commutes(p, &g).unwrap_or(true)) {
                continue;
            }
            out.push(g);
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::Sampling {
                constraint: format!("pairwise-noncommuting set of {h} gates at width {width}"),
            });
        }
    }
    Ok(out)
}

/// Steps 2 and 3 fused: sample the encryption mapping while transforming the
/// initial polynomials, probing the monomial budget incrementally. Returns
/// the circuit in execution order, the designated block spans, and the final
/// public polynomials.
pub fn sample_encryption_mapping(
    params: &KeyParams,
    initial_polys: &[Anf],
    factory: &StreamFactory,
    attempt: u64,
) -> Result<(Circuit, Vec<BlockSpan>, Vec<Anf>)> {
    let v = params.nvars;
    let slots = build_plan(params);
    let filler_dist = RankDist::standard();
    let mut rng = factory.stream("mapping", attempt);
    let mut polys: Vec<Anf> = initial_polys.to_vec();

    // Gates collected in substitution order; execution order is the reverse.
    let mut subst_gates: Vec<Gate> = Vec::with_capacity(slots.len());
    let mut block_membership: Vec<Option<usize>> = Vec::with_capacity(slots.len());
    let mut open_block: Vec<Gate> = Vec::new();

    for &slot in &slots {
        let is_capstone = match slot {
            Some(bi) => open_block.len() + 1 == params.block_sizes[bi] as usize,
            None => false,
        };
        let mut accepted = false;
        for _retry in 0..SLOT_RETRIES {
            let candidate = match slot {
                None => sample_gate(v, &filler_dist, &mut rng)?,
                Some(_) => propose_block_gate(v, &open_block, is_capstone, &mut rng)?,
            };
            if slot.is_some()
                && open_block
                    .iter()
                    .any(|g| commutes(g, &candidate).unwrap_or(true))
            {
                continue;
            }
            // Tentatively substitute into every polynomial; revert on budget
            // overflow (substitution is an involution).
            let mut over_budget = false;
            for p in polys.iter_mut() {
                candidate.substitute(p);
                if p.monomial_count() > params.monomial_budget {
                    over_budget = true;
                }
            }
            if over_budget {
                for p in polys.iter_mut() {
                    candidate.substitute(p);
                }
                continue;
            }
            if slot.is_some() {
                open_block.push(candidate.clone());
            }
            subst_gates.push(candidate);
            block_membership.push(slot);
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::Sampling {
                constraint: match slot {
                    Some(bi) => format!(
                        "pairwise-noncommuting gate {} of block {bi} within the monomial budget",
                        open_block.len() + 1
                    ),
                    None => "filler gate within the monomial budget".into(),
                },
            });
        }
        if is_capstone {
            open_block.clear();
        }
    }

    let total = subst_gates.len();
    subst_gates.reverse();
    let circuit = Circuit::new(v, subst_gates)?;
    let mut spans: Vec<BlockSpan> = Vec::new();
    for bi in 0..params.block_sizes.len() {
        let exec_indices: Vec<usize> = block_membership
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Some(bi))
            .map(|(subst_idx, _)| total - 1 - subst_idx)
            .collect();
        let start = *exec_indices.iter().min().unwrap() as u32;
        let end = *exec_indices.iter().max().unwrap() as u32;
        spans.push(BlockSpan {
            start,
            len: end - start + 1,
        });
    }
    spans.sort_by_key(|s| s.start);
    Ok((circuit, spans, polys))
}

/// The full key-generation algorithm: initial set, mapping sample, measured
/// degree check, bounded resampling.
pub fn generate_keypair(params: &KeyParams) -> Result<(ImePublicKey, ImePrivateKey)> {
    params.validate()?;
    let initial = build_initial_set(params)?;
    let initial_polys = initial.polynomials();
    let factory = StreamFactory::new(params.seed);
    let mut last_degree = 0;
    for attempt in 0..KEYGEN_ATTEMPTS {
        let (circuit, spans, polys) =
            sample_encryption_mapping(params, &initial_polys, &factory, attempt)?;
        let degree = polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        last_degree = degree;
        if degree < params.d_lo || degree > params.d_hi {
            continue;
        }
        let public = ImePublicKey {
            k: params.k,
            w: params.w,
            nvars: params.nvars,
            measured_degree: degree,
            polys,
        };
        let private = ImePrivateKey {
            params: params.clone(),
            mapping: circuit,
            blocks: spans,
            initial,
        };
        return Ok((public, private));
    }
    Err(Error::Keygen(format!(
        "no mapping with measured degree in [{}, {}] after {} attempts (last degree {})",
        params.d_lo, params.d_hi, KEYGEN_ATTEMPTS, last_degree
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// GF(2) rank of the linear parts of the first k polynomials.
    fn linear_rank(polys: &[Anf], k: u32, v: u32) -> u32 {
        let mut rows: Vec<u64> = polys
            .iter()
            .take(k as usize)
            .map(|p| {
                let mut row = 0u64;
                for m in p.iter() {
                    if m.degree() == 1 {
                        row ^= m.mask().to_u64();
                    }
                }
                row
            })
            .collect();
        let mut rank = 0;
        for bit in 0..v {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            let lead = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row >> bit & 1 == 1 {
                    *row ^= lead;
                }
            }
            rank += 1;
        }
        rank as u32
    }

    #[test]
    fn initial_set_shapes() {
        // k = w: identity variables only
        let p = KeyParams::insecure(3, 3, 1);
        let init = build_initial_set(&p).unwrap();
        assert_eq!(
            init.polynomials(),
            (0..3).map(|i| Anf::variable(3, i)).collect::<Vec<_>>()
        );
        assert_eq!(init.circuit().unwrap().gate_count(), 0);

        // k = 3 < w = 5: nonlinear entries of degree 2 targeting their own
        // coordinates
        let p = KeyParams::insecure(3, 5, 5);
        let init = build_initial_set(&p).unwrap();
        let polys = init.polynomials();
        assert_eq!(polys.len(), 5);
        assert_eq!(polys[3].degree(), Some(2));
        assert_eq!(polys[4].degree(), Some(2));
        assert_eq!(init.entries[0].target, 3);
        assert_eq!(init.entries[1].target, 4);

        // rank of the linear block is k
        let p = KeyParams::insecure(8, 12, 9);
        let init = build_initial_set(&p).unwrap();
        assert_eq!(linear_rank(&init.polynomials(), 8, 12), 8);
    }

    #[test]
    fn mapping_blocks_are_pairwise_noncommuting() {
        let mut params = KeyParams::insecure(8, 8, 42);
        params.block_sizes = vec![3];
        let initial = build_initial_set(&params).unwrap();
        let factory = StreamFactory::new(params.seed);
        let (circuit, spans, _) =
            sample_encryption_mapping(&params, &initial.polynomials(), &factory, 0).unwrap();
        assert_eq!(spans.len(), 1);
        let span = spans[0];
        let block: Vec<&Gate> = circuit.gates()
            [span.start as usize..(span.start + span.len) as usize]
            .iter()
            .collect();
        assert_eq!(block.len(), 3);
        for i in 0..block.len() {
            for j in 0..i {
                assert!(!commutes(block[i], block[j]).unwrap());
                assert!(block[i].rank() >= 2 && block[j].rank() >= 2);
            }
        }
    }

    #[test]
    fn keygen_replays_deterministically() {
        let params = KeyParams::insecure(8, 10, 7);
        let (pub1, priv1) = generate_keypair(&params).unwrap();
        let (pub2, priv2) = generate_keypair(&params).unwrap();
        assert_eq!(pub1, pub2);
        assert_eq!(priv1.mapping, priv2.mapping);
        let (pub3, _) = generate_keypair(&KeyParams::insecure(8, 10, 8)).unwrap();
        assert_ne!(pub1, pub3);
    }

    #[test]
    fn insecure_smoke_and_invariants() {
        let params = KeyParams::insecure(8, 8, 3);
        let (public, private) = generate_keypair(&params).unwrap();
        assert_eq!(public.polys.len(), 8);
        assert!(public.measured_degree >= 2);
        for p in &public.polys {
            assert!(p.monomial_count() <= params.monomial_budget);
        }
        // reconstruction: private material regenerates the public set
        assert_eq!(private.regenerate_public_polys(), public.polys);
        // the full circuit's generated tuple also equals the public set
        let full = private.full_circuit().unwrap();
        assert_eq!(full.generate_polynomials(), public.polys);
    }

    #[test]
    fn full_circuit_matches_public_key_with_padding_wires() {
        let params = KeyParams::insecure(5, 9, 77);
        let (public, private) = generate_keypair(&params).unwrap();
        assert_eq!(private.full_circuit().unwrap().generate_polynomials(), public.polys);
    }

    #[test]
    fn identity_mapping_reproduces_initial_set() {
        let params = KeyParams::insecure(4, 6, 11);
        let initial = build_initial_set(&params).unwrap();
        let polys = Circuit::identity(6).transform_polynomials(initial.polynomials());
        assert_eq!(polys, initial.polynomials());
    }

    #[test]
    fn two_gate_key_example() {
        // Execution order: CNOT 1->2 then N_1; public polys (x1+1, x1+x2).
        let mapping = Circuit::new(2, vec![Gate::cnot(2, 0, 1), Gate::not(2, 0)]).unwrap();
        let initial: Vec<Anf> = (0..2).map(|i| Anf::variable(2, i)).collect();
        let polys = mapping.transform_polynomials(initial);
        let x1_plus_1 = Anf::variable(2, 0).add(&Anf::one(2)).unwrap();
        let x1_plus_x2 = Anf::variable(2, 0).add(&Anf::variable(2, 1)).unwrap();
        assert_eq!(polys, vec![x1_plus_1, x1_plus_x2]);
    }

    #[test]
    fn parameter_guards() {
        assert!(KeyParams::insecure(8, 6, 0).validate().is_err()); // w < k
        assert!(KeyParams::secure(64, 80, 0).validate().is_err()); // k < 128
        assert!(KeyParams::secure(128, 300, 0).validate().is_err()); // w >= 2k
        assert!(KeyParams::secure(128, 160, 0).validate().is_ok());
        let mut p = KeyParams::insecure(8, 10, 0);
        p.block_sizes = vec![5, 5]; // sums above k
        assert!(p.validate().is_err());
    }
}
