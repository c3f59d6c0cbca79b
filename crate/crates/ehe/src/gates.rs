//! Reversible elementary gates and circuits.
//!
//! A gate is a multi-controlled NOT: it flips its target wire exactly when
//! every control wire matches its polarity (polarity bit clear = control on 1,
//! "black dot"; set = control on 0, "white dot"). Rank 0 is a negation, rank 1
//! a CNOT, rank 2 a Toffoli. Every gate is an involution.
//!
//! Gates act in two dual ways:
//! - on states ([`Gate::apply_to_state`], [`Circuit::run_state`]), and
//! - on polynomials ([`Gate::apply_to_poly`]) by the substitution
//!   `x_r <- x_r + prod_{i in controls}(x_i + polarity_i)`.
//!
//! [`Circuit::generate_polynomials`] folds the substitutions over the gates in
//! reverse execution order, starting from the identity tuple `(x_1..x_v)`.
//! The resulting tuple, evaluated at any input, equals the circuit run on
//! that input — the evaluation duality the whole encryption scheme rests on.

use rand::Rng;

use crate::anf::{Anf, Monomial};
use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Multi-controlled NOT with per-control polarity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gate {
    target: u32,
    controls: BitVec,
    polarity: BitVec,
}

/// Operation counts of one polynomial substitution, used for the cost model.
#[derive(Clone, Copy, Default, Debug)]
pub struct SubstOps {
    /// Monomials visited while scanning for the target variable.
    pub scanned: u64,
    /// Monomial XOR-insertions performed.
    pub toggled: u64,
}

impl SubstOps {
    pub fn total(&self) -> u64 {
        self.scanned + self.toggled
    }
}

impl Gate {
    /// Well-formed gate: target outside the controls, polarity within them.
    pub fn new(target: u32, controls: BitVec, polarity: BitVec) -> Result<Self> {
        let width = controls.len();
        if polarity.len() != width {
            return Err(Error::dimension("gate polarity mask", width, polarity.len()));
        }
        if target >= width {
            return Err(Error::Parameter(format!(
                "gate target {target} out of range for width {width}"
            )));
        }
        if controls.get(target) {
            return Err(Error::Parameter(format!(
                "gate target {target} may not be one of its controls"
            )));
        }
        if !polarity.is_subset_of(&controls) {
            return Err(Error::Parameter(
                "gate polarity bits must be a subset of its controls".into(),
            ));
        }
        Ok(Gate {
            target,
            controls,
            polarity,
        })
    }

    /// Negation of a single wire.
    pub fn not(width: u32, target: u32) -> Self {
        Gate::new(target, BitVec::zeros(width), BitVec::zeros(width)).unwrap()
    }

    /// CNOT: flip `target` when `control` is 1.
    pub fn cnot(width: u32, control: u32, target: u32) -> Self {
        Gate::new(
            target,
            BitVec::from_indices(width, &[control]),
            BitVec::zeros(width),
        )
        .unwrap()
    }

    /// Toffoli: flip `target` when both controls are 1.
    pub fn toffoli(width: u32, c1: u32, c2: u32, target: u32) -> Self {
        Gate::new(
            target,
            BitVec::from_indices(width, &[c1, c2]),
            BitVec::zeros(width),
        )
        .unwrap()
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.controls.len()
    }

    #[inline]
    pub fn target(&self) -> u32 {
        self.target
    }

    #[inline]
    pub fn controls(&self) -> &BitVec {
        &self.controls
    }

    #[inline]
    pub fn polarity(&self) -> &BitVec {
        &self.polarity
    }

    /// Number of control wires.
    #[inline]
    pub fn rank(&self) -> u32 {
        self.controls.count_ones()
    }

    /// Same gate on a wider register.
    pub fn extended(&self, width: u32) -> Gate {
        Gate {
            target: self.target,
            controls: self.controls.extended(width),
            polarity: self.polarity.extended(width),
        }
    }

    /// Add one control wire (with positive polarity) to the gate.
    pub fn with_extra_control(&self, wire: u32) -> Result<Gate> {
        let mut controls = self.controls.clone();
        if wire == self.target || controls.get(wire) {
            return Err(Error::Parameter(format!(
                "control wire {wire} conflicts with existing gate wires"
            )));
        }
        controls.set(wire, true);
        Gate::new(self.target, controls, self.polarity.clone())
    }

    /// Does the gate fire on `state`? True iff all controls match polarity.
    #[inline]
    pub fn fires(&self, state: &BitVec) -> bool {
        debug_assert_eq!(state.len(), self.width());
        // a_i XOR polarity_i must be 1 on every control wire
        self.controls
            .words()
            .iter()
            .zip(state.words().iter().zip(self.polarity.words().iter()))
            .all(|(&c, (&s, &z))| (s ^ z) & c == c)
    }

    /// Flip the target wire iff the controls match; all other wires unchanged.
    pub fn apply_to_state(&self, state: &BitVec) -> Result<BitVec> {
        if state.len() != self.width() {
            return Err(Error::dimension("gate on state", self.width(), state.len()));
        }
        let mut out = state.clone();
        if self.fires(state) {
            out.toggle(self.target);
        }
        Ok(out)
    }

    /// ANF expansion of the control product `prod_{i in controls}(x_i + z_i)`:
    /// one mask per subset of the white-dot controls.
    pub fn control_expansion(&self) -> Vec<BitVec> {
        let mut black = self.controls.clone();
        black.xor_assign(&self.polarity); // polarity is a subset of controls
        let white: Vec<u32> = self.polarity.iter_ones().collect();
        let mut out = Vec::with_capacity(1 << white.len());
        for pick in 0u64..(1 << white.len()) {
            let mut mask = black.clone();
            for (j, &w) in white.iter().enumerate() {
                if (pick >> j) & 1 == 1 {
                    mask.set(w, true);
                }
            }
            out.push(mask);
        }
        out
    }

    /// Substitute `x_target <- x_target + control product` into `p`, reducing
    /// multilinearly. For every point a: `result(a) = p(apply_to_state(a))`.
    pub fn apply_to_poly(&self, p: &Anf) -> Result<Anf> {
        if p.nvars() != self.width() {
            return Err(Error::dimension("gate on polynomial", self.width(), p.nvars()));
        }
        let mut out = p.clone();
        self.substitute(&mut out);
        Ok(out)
    }

    /// In-place substitution; returns the operation counts. Only monomials
    /// containing the target variable are affected: each contributes one new
    /// mask per expansion term, OR-combined with the monomial minus the
    /// target, XOR-accumulated into the set.
    pub fn substitute(&self, p: &mut Anf) -> SubstOps {
        debug_assert_eq!(p.nvars(), self.width());
        let mut ops = SubstOps {
            scanned: p.monomial_count() as u64,
            toggled: 0,
        };
        let affected: Vec<BitVec> = p
            .iter()
            .filter(|m| m.mask().get(self.target))
            .map(|m| m.mask().without_bit(self.target))
            .collect();
        if affected.is_empty() {
            return ops;
        }
        let expansion = self.control_expansion();
        for base in affected {
            for term in &expansion {
                p.toggle(Monomial::new(base.or_with(term)));
                ops.toggled += 1;
            }
        }
        ops
    }
}

/// Noncommutation test on gate shape: two gates do not commute iff either
/// target lies in the other's controls. Polarity is ignored.
pub fn commutes(g1: &Gate, g2: &Gate) -> Result<bool> {
    if g1.width() != g2.width() {
        return Err(Error::dimension("gate pair", g1.width(), g2.width()));
    }
    Ok(!(g2.controls.get(g1.target) || g1.controls.get(g2.target)))
}

/// An ordered gate sequence, stored in state-execution order: element 0 acts
/// on states first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Circuit {
    width: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: u32, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            if g.width() != width {
                return Err(Error::dimension("circuit gate", width, g.width()));
            }
        }
        Ok(Circuit { width, gates })
    }

    pub fn identity(width: u32) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    #[inline]
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert_eq!(gate.width(), self.width);
        self.gates.push(gate);
    }

    /// Concatenation: `self` executes first, then `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.width != self.width {
            return Err(Error::dimension("circuit concatenation", self.width, other.width));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(Circuit {
            width: self.width,
            gates,
        })
    }

    /// The inverse circuit: gate order reversed (each gate is self-inverse).
    pub fn inverse(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.reverse();
        Circuit {
            width: self.width,
            gates,
        }
    }

    /// Same circuit on a wider register (extra wires untouched).
    pub fn extended(&self, width: u32) -> Circuit {
        assert!(width >= self.width);
        Circuit {
            width,
            gates: self.gates.iter().map(|g| g.extended(width)).collect(),
        }
    }

    /// Execute on a state: fold the gates in execution order.
    pub fn run_state(&self, input: &BitVec) -> Result<BitVec> {
        if input.len() != self.width {
            return Err(Error::dimension("circuit on state", self.width, input.len()));
        }
        let mut state = input.clone();
        for g in &self.gates {
            if g.fires(&state) {
                state.toggle(g.target);
            }
        }
        Ok(state)
    }

    /// The ANF tuple of the Boolean function this circuit computes: start
    /// from the identity tuple and apply the gate substitutions in reverse
    /// execution order. For every input a:
    /// `eval(generate_polynomials(c), a) = run_state(c, a)`.
    pub fn generate_polynomials(&self) -> Vec<Anf> {
        self.transform_polynomials((0..self.width).map(|i| Anf::variable(self.width, i)))
    }

    /// Apply this circuit's substitution chain to an arbitrary polynomial
    /// tuple (reverse execution order), one polynomial at a time.
    pub fn transform_polynomials<I: IntoIterator<Item = Anf>>(&self, polys: I) -> Vec<Anf> {
        polys
            .into_iter()
            .map(|mut p| {
                debug_assert_eq!(p.nvars(), self.width);
                for g in self.gates.iter().rev() {
                    g.substitute(&mut p);
                }
                p
            })
            .collect()
    }
}

/// A weighted distribution over gate ranks.
#[derive(Clone, Debug)]
pub struct RankDist {
    weights: Vec<(u32, f64)>,
    /// Cap on white-dot (negated-control) count per sampled gate.
    pub max_polarity: u32,
}

impl RankDist {
    pub fn new(weights: Vec<(u32, f64)>, max_polarity: u32) -> Result<Self> {
        if weights.is_empty() || weights.iter().all(|(_, w)| *w <= 0.0) {
            return Err(Error::Parameter("rank distribution has no mass".into()));
        }
        Ok(RankDist {
            weights,
            max_polarity,
        })
    }

    /// Default mix: 20% rank <=1, 50% rank 2, 30% rank 3-4.
    pub fn standard() -> Self {
        RankDist {
            weights: vec![(0, 0.05), (1, 0.15), (2, 0.50), (3, 0.20), (4, 0.10)],
            max_polarity: 4,
        }
    }

    /// Low-rank mix for filler gates (NOT/CNOT/Toffoli).
    pub fn filler() -> Self {
        RankDist {
            weights: vec![(0, 0.2), (1, 0.4), (2, 0.4)],
            max_polarity: 2,
        }
    }

    fn sample_rank<R: Rng + ?Sized>(&self, width: u32, rng: &mut R) -> Result<u32> {
        let feasible: Vec<&(u32, f64)> = self
            .weights
            .iter()
            .filter(|(r, w)| *r < width && *w > 0.0)
            .collect();
        if feasible.is_empty() {
            return Err(Error::Parameter(format!(
                "no feasible gate rank below width {width}"
            )));
        }
        let total: f64 = feasible.iter().map(|(_, w)| w).sum();
        let mut pick = rng.gen::<f64>() * total;
        for (r, w) in &feasible {
            pick -= w;
            if pick <= 0.0 {
                return Ok(*r);
            }
        }
        Ok(feasible.last().unwrap().0)
    }
}

/// Draw a random well-formed gate: rank from the distribution (ranks at or
/// above the width are infeasible), uniform target, a random control set of
/// that rank excluding the target, and a random polarity subset capped at
/// `dist.max_polarity` white dots.
pub fn sample_gate<R: Rng + ?Sized>(width: u32, dist: &RankDist, rng: &mut R) -> Result<Gate> {
    if width == 0 {
        return Err(Error::Parameter("gate width must be positive".into()));
    }
    let rank = dist.sample_rank(width, rng)?;
    let target = rng.gen_range(0..width);
    let mut controls = BitVec::zeros(width);
    let mut placed = 0;
    while placed < rank {
        let wire = rng.gen_range(0..width);
        if wire != target && !controls.get(wire) {
            controls.set(wire, true);
            placed += 1;
        }
    }
    let mut polarity = BitVec::zeros(width);
    let mut white = 0;
    for wire in controls.iter_ones().collect::<Vec<_>>() {
        if white >= dist.max_polarity {
            break;
        }
        if rng.gen::<bool>() {
            polarity.set(wire, true);
            white += 1;
        }
    }
    Gate::new(target, controls, polarity)
}
