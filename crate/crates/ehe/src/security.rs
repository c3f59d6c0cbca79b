//! Attack-cost estimators and the parameter criterion.
//!
//! All counts are computed with exact big integers and reported as log2
//! magnitudes: the XL equation-solving cost over the monomial count, its
//! subexponential quadratic-system variant, the circuit-reconstruction
//! floor 2^w, the factorial product over the noncommuting blocks, and the
//! quantum search cost w^3 * 2^(k/2+1). The criterion chain requires
//! deNC > ICRP > XL > brute force.
//!
//! These are estimators of published attack costs, not an audit; nothing
//! here attempts an actual attack.

use num_bigint::BigUint;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::gates::{commutes, Gate};
use crate::keygen::ImePrivateKey;
use crate::rng::StreamFactory;

/// log2 of a positive big integer, accurate to f64 precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        let mut v: u64 = 0;
        for (i, d) in x.to_u64_digits().iter().enumerate() {
            if i == 0 {
                v = *d;
            }
        }
        return (v as f64).log2();
    }
    let shift = bits - 53;
    let top = x >> shift;
    let mantissa = top.to_u64_digits()[0] as f64;
    mantissa.log2() + shift as f64
}

/// Exact factorial.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Exact sum of binomials C(k, 0) + ... + C(k, cap).
pub fn binomial_sum(k: u64, cap: u64) -> BigUint {
    let mut term = BigUint::from(1u32);
    let mut sum = BigUint::from(1u32);
    for i in 1..=cap.min(k) {
        term = term * (k - i + 1) / i;
        sum += &term;
    }
    sum
}

/// XL cost on a degree-d key: the exact monomial count over degrees <= D and
/// the log2 cost chi * log2(count). D defaults to d at the call sites.
pub fn xl_report(k: u32, d: u32, cap_d: u32, chi: f64) -> Result<(BigUint, f64)> {
    if !(2 <= d && d <= cap_d && cap_d <= k) {
        return Err(Error::Parameter(format!(
            "need 2 <= d <= D <= k, got d={d} D={cap_d} k={k}"
        )));
    }
    if !(chi > 2.0 && chi <= 3.0) {
        return Err(Error::Parameter(format!("need 2 < chi <= 3, got {chi}")));
    }
    let count = binomial_sum(k as u64, cap_d as u64);
    let log2 = chi * log2_biguint(&count);
    Ok((count, log2))
}

/// Subexponential quadratic-system XL cost:
/// chi * (sqrt(w) * log2(w) - log2(floor(sqrt(w))!)), factorial exact.
pub fn xl_quadratic_subexp_log2(w: u32, chi: f64) -> Result<f64> {
    if w < 4 {
        return Err(Error::Parameter(format!("need w >= 4, got {w}")));
    }
    let sqrt_w = (w as f64).sqrt();
    let floor_sqrt = sqrt_w.floor() as u64;
    let fact_log2 = log2_biguint(&factorial(floor_sqrt));
    Ok(chi * (sqrt_w * (w as f64).log2() - fact_log2))
}

/// Circuit-reconstruction floor: 2^w.
pub fn icrp_log2(w: u32) -> f64 {
    w as f64
}

/// Factorial product over the noncommuting blocks: sum of log2(h_i!).
pub fn denc_log2(block_sizes: &[u32]) -> f64 {
    block_sizes
        .iter()
        .map(|&h| log2_biguint(&factorial(h as u64)))
        .sum()
}

/// Quantum search cost w^3 * 2^(k/2 + 1) in log2.
pub fn grover_log2(k: u32, w: u32) -> f64 {
    3.0 * (w as f64).log2() + k as f64 / 2.0 + 1.0
}

/// Estimator inputs.
#[derive(Clone, Debug)]
pub struct SecurityParams {
    pub k: u32,
    pub w: u32,
    /// Measured (or target) public-key degree.
    pub d: u32,
    /// XL extension degree; defaults to d.
    pub cap_d: Option<u32>,
    /// XL exponent, 2 < chi <= 3.
    pub chi: f64,
    pub block_sizes: Vec<u32>,
}

impl SecurityParams {
    pub fn new(k: u32, w: u32, d: u32, chi: f64, block_sizes: Vec<u32>) -> Self {
        SecurityParams {
            k,
            w,
            d,
            cap_d: None,
            chi,
            block_sizes,
        }
    }
}

/// Per-inequality verdicts of the criterion chain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CriterionVerdict {
    pub denc_above_icrp: bool,
    pub icrp_above_xl: bool,
    pub xl_above_bruteforce: bool,
}

impl CriterionVerdict {
    pub fn all(&self) -> bool {
        self.denc_above_icrp && self.icrp_above_xl && self.xl_above_bruteforce
    }
}

/// Measured noncommutativity structure of an actual private key.
#[derive(Clone, Debug)]
pub struct BlockEstimate {
    pub declared: u32,
    /// Greedy-with-restarts lower bound on the maximal pairwise set.
    pub greedy: u32,
    /// Exact maximum (branch and bound), only for blocks of <= 24 gates.
    pub exact: Option<u32>,
}

/// The full report: log2 magnitudes, criterion verdicts, parameter echo.
#[derive(Clone, Debug)]
pub struct SecurityReport {
    pub params: SecurityParams,
    pub log2_xl: f64,
    pub xl_monomials: BigUint,
    pub log2_xl_quadratic_subexp: f64,
    pub log2_icrp: f64,
    pub log2_denc: f64,
    pub log2_grover: f64,
    pub criterion: CriterionVerdict,
    /// Present when the report was computed from an actual key.
    pub measured_blocks: Option<Vec<BlockEstimate>>,
}

impl SecurityReport {
    /// The weakest estimated attack, in log2.
    pub fn level_log2(&self) -> f64 {
        self.log2_xl.min(self.log2_icrp).min(self.log2_denc)
    }
}

/// Evaluate the criterion chain deNC > ICRP > XL > 2^k in log2 space.
pub fn criterion_check(
    log2_denc: f64,
    log2_icrp: f64,
    log2_xl: f64,
    k: u32,
) -> CriterionVerdict {
    CriterionVerdict {
        denc_above_icrp: log2_denc > log2_icrp,
        icrp_above_xl: log2_icrp > log2_xl,
        xl_above_bruteforce: log2_xl > k as f64,
    }
}

/// Build the report from parameters alone.
pub fn structural_report(params: &SecurityParams) -> Result<SecurityReport> {
    if params.w < params.k {
        return Err(Error::Parameter("need w >= k".into()));
    }
    let cap_d = params.cap_d.unwrap_or(params.d);
    let (monomials, log2_xl) = xl_report(params.k, params.d, cap_d, params.chi)?;
    let log2_icrp = icrp_log2(params.w);
    let log2_denc = denc_log2(&params.block_sizes);
    let log2_grover = grover_log2(params.k, params.w);
    let log2_subexp = xl_quadratic_subexp_log2(params.w.max(4), params.chi)?;
    let criterion = criterion_check(log2_denc, log2_icrp, log2_xl, params.k);
    Ok(SecurityReport {
        params: params.clone(),
        log2_xl,
        xl_monomials: monomials,
        log2_xl_quadratic_subexp: log2_subexp,
        log2_icrp,
        log2_denc,
        log2_grover,
        criterion,
        measured_blocks: None,
    })
}

/// Build the report from an actual private key, measuring each designated
/// block's maximal pairwise-noncommuting set (greedy lower bound always,
/// exact search for blocks of at most 24 gates). The measured sizes replace
/// the declared block sizes in the deNC term.
pub fn key_report(key: &ImePrivateKey, chi: f64) -> Result<SecurityReport> {
    let degree = key
        .regenerate_public_polys()
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let mut estimates = Vec::new();
    let mut measured_sizes = Vec::new();
    for (bi, span) in key.blocks.iter().enumerate() {
        let gates: Vec<Gate> = key.mapping.gates()
            [span.start as usize..(span.start + span.len) as usize]
            .to_vec();
        let greedy = greedy_max_noncommuting(&gates, 24, bi as u64);
        let exact = if gates.len() <= 24 {
            Some(exact_max_noncommuting(&gates))
        } else {
            None
        };
        measured_sizes.push(exact.unwrap_or(greedy));
        estimates.push(BlockEstimate {
            declared: span.len,
            greedy,
            exact,
        });
    }
    let params = SecurityParams {
        k: key.params.k,
        w: key.params.w,
        d: degree.max(2),
        cap_d: None,
        chi,
        block_sizes: measured_sizes,
    };
    let mut report = structural_report(&params)?;
    report.measured_blocks = Some(estimates);
    Ok(report)
}

/// Greedy maximal pairwise-noncommuting subset with shuffled restarts;
/// a lower bound on the exact maximum.
pub fn greedy_max_noncommuting(gates: &[Gate], restarts: u32, salt: u64) -> u32 {
    if gates.is_empty() {
        return 0;
    }
    let factory = StreamFactory::new(0xC0FFEE ^ salt);
    let mut best = 0u32;
    for r in 0..restarts {
        let mut order: Vec<usize> = (0..gates.len()).collect();
        let mut rng = factory.stream("greedy", r as u64);
        order.shuffle(&mut rng);
        let mut chosen: Vec<usize> = Vec::new();
        for idx in order {
            if chosen
                .iter()
                .all(|&c| !commutes(&gates[c], &gates[idx]).unwrap_or(true))
            {
                chosen.push(idx);
            }
        }
        best = best.max(chosen.len() as u32);
    }
    best
}

/// Exact maximum pairwise-noncommuting subset via branch and bound on the
/// conflict graph; intended for blocks of at most 24 gates.
pub fn exact_max_noncommuting(gates: &[Gate]) -> u32 {
    let n = gates.len();
    assert!(n <= 24, "exact search capped at 24 gates");
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && !commutes(&gates[i], &gates[j]).unwrap_or(true) {
                adj[i] |= 1 << j;
            }
        }
    }
    // Bron-Kerbosch style enumeration with a size bound.
    fn bk(adj: &[u32], r_size: u32, p: u32, best: &mut u32) {
        if p == 0 {
            *best = (*best).max(r_size);
            return;
        }
        if r_size + p.count_ones() <= *best {
            return;
        }
        let mut p_mut = p;
        while p_mut != 0 {
            let v = p_mut.trailing_zeros() as usize;
            let v_bit = 1u32 << v;
            p_mut &= !v_bit;
            bk(adj, r_size + 1, p_mut & adj[v], best);
        }
        *best = (*best).max(r_size);
    }
    let mut best = 0;
    let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
    bk(&adj, 0, all, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keygen::sample_noncommuting_set;

    #[test]
    fn xl_small_counts() {
        // k=4, D=2: 1 + 4 + 6 monomials
        assert_eq!(binomial_sum(4, 2), BigUint::from(11u32));
        // D=0: one monomial, log2 cost 0
        assert_eq!(binomial_sum(7, 0), BigUint::from(1u32));
        assert_eq!(log2_biguint(&BigUint::from(1u32)), 0.0);
        // guards
        assert!(xl_report(128, 1, 13, 2.5).is_err());
        assert!(xl_report(128, 13, 13, 2.0).is_err());
        assert!(xl_report(128, 13, 12, 2.5).is_err());
    }

    #[test]
    fn log2_biguint_precision() {
        let big = BigUint::from(3u32).pow(200);
        let expect = 200.0 * 3f64.log2();
        assert!((log2_biguint(&big) - expect).abs() < 1e-9);
        assert!((log2_biguint(&factorial(12)) - 479001600f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn denc_and_grover_values() {
        // two blocks of 3: 3! * 3! = 36
        let d = denc_log2(&[3, 3]);
        assert!((d - 36f64.log2()).abs() < 1e-12);
        // the published parameter point
        let g = grover_log2(128, 160);
        assert!((g - 86.9657842847).abs() < 1e-6);
        assert!((g - 86.0).abs() <= 1.0);
    }

    #[test]
    fn stirling_cross_check() {
        // exact log2(h!) vs Stirling within 0.1% for h >= 64
        for h in [64u64, 100, 256, 1000] {
            let exact = log2_biguint(&factorial(h));
            let hf = h as f64;
            let stirling = (hf * hf.ln() - hf
                + 0.5 * (2.0 * std::f64::consts::PI * hf).ln()
                + 1.0 / (12.0 * hf))
                / std::f64::consts::LN_2;
            assert!(
                (exact - stirling).abs() / exact < 0.001,
                "h={h}: exact {exact}, stirling {stirling}"
            );
        }
    }

    #[test]
    fn subexp_values() {
        // w=160, chi=2: pinned from the exact factorial oracle
        let v = xl_quadratic_subexp_log2(160, 2.0).unwrap();
        assert!((v - 127.56084668).abs() < 1e-6, "got {v}");
        // any chi above ~2.007 clears 128
        assert!(xl_quadratic_subexp_log2(160, 2.5).unwrap() > 128.0);
        // w=400 clears 256 for some chi <= 3
        let base = xl_quadratic_subexp_log2(400, 1.0).unwrap();
        assert!(3.0 * base >= 256.0);
        assert!((2.5 * base) >= 256.0 || 3.0 * base >= 256.0);
        // monotone in w within a floor-stable stretch (fixed chi)
        let mut prev = 0.0;
        for w in 145..=168 {
            let v = xl_quadratic_subexp_log2(w, 2.5).unwrap();
            assert!(v > prev, "w={w}");
            prev = v;
        }
    }

    #[test]
    fn criterion_chain_golden() {
        let params = SecurityParams::new(128, 160, 13, 2.5, vec![13; 8]);
        let report = structural_report(&params).unwrap();
        assert_eq!(report.log2_icrp, 160.0);
        // 8 * log2(13!) = 260.29...
        assert!((report.log2_denc - 8.0 * log2_biguint(&factorial(13))).abs() < 1e-9);
        assert!(report.log2_denc > 260.0 && report.log2_denc < 261.0);
        // XL cost between 2^128 and 2^160
        assert!(report.log2_xl > 128.0 && report.log2_xl < 160.0);
        assert!(report.criterion.all());
        // degenerate single-gate block: deNC = 1, criterion fails
        let weak = SecurityParams::new(128, 160, 13, 2.5, vec![1]);
        let weak_report = structural_report(&weak).unwrap();
        assert_eq!(weak_report.log2_denc, 0.0);
        assert!(!weak_report.criterion.all());
        assert!(!weak_report.criterion.denc_above_icrp);
    }

    #[test]
    fn greedy_bounded_by_exact() {
        let factory = StreamFactory::new(55);
        for trial in 0..10u64 {
            let mut rng = factory.stream("sets", trial);
            let h = 3 + (trial % 3) as u32;
            let mut gates = sample_noncommuting_set(10, h, &mut rng).unwrap();
            // dilute with unrelated low-rank gates
            for i in 0..4 {
                gates.push(Gate::cnot(10, (i * 2) % 10, (i * 2 + 1) % 10));
            }
            let greedy = greedy_max_noncommuting(&gates, 16, trial);
            let exact = exact_max_noncommuting(&gates);
            assert!(greedy <= exact);
            assert!(exact >= h, "exact {exact} below designed {h}");
        }
    }
}
