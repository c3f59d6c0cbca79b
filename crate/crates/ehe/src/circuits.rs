//! Reversible arithmetic circuits and Boolean lowering.
//!
//! Every builder emits only NOT/CNOT/Toffoli/multi-controlled gates, so each
//! circuit is reversible by construction. The adder is an in-place
//! majority/unmajority ripple-carry (two attached bits: carry-in and
//! carry-out); subtraction is complement-add; multiplication accumulates
//! controlled shifted additions into a double-width product register;
//! division is restoring (trial subtract, conditional add-back); comparison
//! subtracts, copies the no-borrow flag, then uncomputes.
//!
//! [`verify_circuit`] replays a circuit against plain integer arithmetic,
//! exhaustively for small operand widths, and also checks that every wire
//! declared restored really returns to zero.

use rand::Rng;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate};
use crate::rng::StreamFactory;

/// The supported elementary functions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FunctionKind {
    Add,
    Sub,
    Mul,
    Div,
    Compare,
    SumOfSquares,
    MonomialPower,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 7] = [
        FunctionKind::Add,
        FunctionKind::Sub,
        FunctionKind::Mul,
        FunctionKind::Div,
        FunctionKind::Compare,
        FunctionKind::SumOfSquares,
        FunctionKind::MonomialPower,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Add => "add",
            FunctionKind::Sub => "sub",
            FunctionKind::Mul => "mul",
            FunctionKind::Div => "div",
            FunctionKind::Compare => "compare",
            FunctionKind::SumOfSquares => "sum-of-squares",
            FunctionKind::MonomialPower => "monomial-power",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "add" => FunctionKind::Add,
            "sub" => FunctionKind::Sub,
            "mul" => FunctionKind::Mul,
            "div" => FunctionKind::Div,
            "compare" => FunctionKind::Compare,
            "sum-of-squares" | "ssq" => FunctionKind::SumOfSquares,
            "monomial-power" | "pow" => FunctionKind::MonomialPower,
            other => {
                return Err(Error::Parameter(format!("unknown function kind '{other}'")));
            }
        })
    }
}

/// A function instance: kind, operand width in bits, and (for monomial
/// powers) the fixed exponent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub operand_bits: u32,
    /// Exponent for `MonomialPower`, ignored otherwise.
    pub exponent: u32,
}

/// Wire map of a built circuit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Layout {
    pub width: u32,
    /// Operand wire ranges (lo, len); one or two operands.
    pub inputs: Vec<(u32, u32)>,
    /// Output wires in result-bit order.
    pub outputs: Vec<u32>,
    /// Wires that must return to zero on every input.
    pub restored: Vec<u32>,
    /// Scratch wires left holding intermediate values.
    pub garbage: Vec<u32>,
}

pub const MAX_OPERAND_BITS: u32 = 64;

impl FunctionSpec {
    pub fn new(kind: FunctionKind, operand_bits: u32) -> Result<Self> {
        let spec = FunctionSpec {
            kind,
            operand_bits,
            exponent: 3,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_exponent(mut self, exponent: u32) -> Result<Self> {
        self.exponent = exponent;
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        if self.operand_bits == 0 || self.operand_bits > MAX_OPERAND_BITS {
            return Err(Error::Parameter(format!(
                "operand width {} outside 1..={MAX_OPERAND_BITS}",
                self.operand_bits
            )));
        }
        if self.kind == FunctionKind::MonomialPower && !(2..=4).contains(&self.exponent) {
            return Err(Error::Parameter(format!(
                "monomial-power exponent {} outside 2..=4",
                self.exponent
            )));
        }
        Ok(())
    }

    /// Total plaintext bits consumed (both operands).
    pub fn input_bits(&self) -> u32 {
        match self.kind {
            FunctionKind::MonomialPower => self.operand_bits,
            _ => 2 * self.operand_bits,
        }
    }

    /// Uniform shell width covering every kind at this operand width, so
    /// different functions are interchangeable inside one encrypted-program
    /// shell (the sum-of-squares layout is the widest).
    pub fn shell_width(operand_bits: u32) -> u32 {
        5 * operand_bits + 4
    }

    pub fn layout(&self) -> Layout {
        let l = self.operand_bits;
        match self.kind {
            FunctionKind::Add | FunctionKind::Sub => Layout {
                width: 2 * l + 2,
                inputs: vec![(0, l), (l, l)],
                outputs: (l..2 * l).chain([2 * l + 1]).collect(),
                restored: (0..l).chain([2 * l]).collect(),
                garbage: vec![],
            },
            FunctionKind::Mul => Layout {
                width: 4 * l + 1,
                inputs: vec![(0, l), (l, l)],
                outputs: (2 * l..4 * l).collect(),
                restored: (0..2 * l).chain([4 * l]).collect(),
                garbage: vec![],
            },
            FunctionKind::Div => Layout {
                // dividend low half, divisor, dividend high half (zeros),
                // divisor zero-extension, quotient, carry
                width: 4 * l + 2,
                inputs: vec![(0, l), (l, l)],
                outputs: (3 * l + 1..4 * l + 1).chain(0..l).collect(),
                restored: (l..3 * l + 1).chain([4 * l + 1]).collect(),
                garbage: vec![],
            },
            FunctionKind::Compare => Layout {
                width: 2 * l + 5,
                inputs: vec![(0, l), (l, l)],
                outputs: vec![2 * l + 3, 2 * l + 4, 2 * l + 2], // eq, gt, geq
                restored: (0..2 * l).chain([2 * l, 2 * l + 1]).collect(),
                garbage: vec![],
            },
            FunctionKind::SumOfSquares => Layout {
                width: 5 * l + 4,
                inputs: vec![(0, l), (l, l)],
                outputs: (2 * l..4 * l + 1).collect(),
                restored: (0..2 * l)
                    .chain([4 * l + 1, 4 * l + 2])
                    .chain(4 * l + 3..5 * l + 4)
                    .collect(),
                garbage: vec![],
            },
            FunctionKind::MonomialPower => {
                let e = self.exponent;
                Layout {
                    width: e * l + 2,
                    inputs: vec![(0, l)],
                    outputs: ((e - 1) * l..e * l).collect(),
                    restored: (0..l).chain([e * l, e * l + 1]).collect(),
                    garbage: (l..(e - 1) * l).collect(),
                }
            }
        }
    }
}

/// Append an in-place ripple-carry addition `acc += x (+ cin)` built from
/// majority/unmajority triples. Carries live transiently in the `x` wires,
/// which are restored; `cin` is restored; the final carry is XORed into
/// `cout` when given. With `ctl`, every gate takes one extra control, which
/// conditions the whole addition on that wire.
fn ripple_add(
    width: u32,
    x: &[u32],
    acc: &[u32],
    cin: u32,
    cout: Option<u32>,
    ctl: Option<u32>,
    gates: &mut Vec<Gate>,
) {
    assert!(!x.is_empty() && x.len() == acc.len());
    let gate = |target: u32, controls: &[u32]| -> Gate {
        let mut all: Vec<u32> = controls.to_vec();
        if let Some(c) = ctl {
            all.push(c);
        }
        Gate::new(target, BitVec::from_indices(width, &all), BitVec::zeros(width)).unwrap()
    };
    let n = x.len();
    let mut prev = cin;
    for i in 0..n {
        gates.push(gate(acc[i], &[x[i]]));
        gates.push(gate(prev, &[x[i]]));
        gates.push(gate(x[i], &[prev, acc[i]]));
        prev = x[i];
    }
    if let Some(z) = cout {
        gates.push(gate(z, &[x[n - 1]]));
    }
    for i in (0..n).rev() {
        let prev_i = if i == 0 { cin } else { x[i - 1] };
        gates.push(gate(x[i], &[prev_i, acc[i]]));
        gates.push(gate(prev_i, &[x[i]]));
        gates.push(gate(acc[i], &[prev_i]));
    }
}

fn not_gate(width: u32, wire: u32, ctl: Option<u32>) -> Gate {
    let controls = match ctl {
        Some(c) => BitVec::from_indices(width, &[c]),
        None => BitVec::zeros(width),
    };
    Gate::new(wire, controls, BitVec::zeros(width)).unwrap()
}

/// Build the reversible circuit for a function instance on its own layout.
pub fn build_function_circuit(spec: &FunctionSpec) -> Result<Circuit> {
    spec.check()?;
    let l = spec.operand_bits;
    let layout = spec.layout();
    let w = layout.width;
    let mut gates = Vec::new();
    let a: Vec<u32> = (0..l).collect();
    let b: Vec<u32> = (l..2 * l).collect();
    match spec.kind {
        FunctionKind::Add => {
            let cin = 2 * l;
            let cout = 2 * l + 1;
            ripple_add(w, &a, &b, cin, Some(cout), None, &mut gates);
        }
        FunctionKind::Sub => {
            // a - b = a + !b + 1: complement b, set carry-in, add, restore
            let cin = 2 * l;
            let cout = 2 * l + 1;
            for &wire in &b {
                gates.push(not_gate(w, wire, None));
            }
            gates.push(not_gate(w, cin, None));
            ripple_add(w, &a, &b, cin, Some(cout), None, &mut gates);
            gates.push(not_gate(w, cin, None));
        }
        FunctionKind::Mul => {
            // p += (b << i) conditioned on a_i; row tops are untouched zeros
            let p: Vec<u32> = (2 * l..4 * l).collect();
            let cin = 4 * l;
            for i in 0..l as usize {
                let window: Vec<u32> = p[i..i + l as usize].to_vec();
                // the window top p[i+l] is still zero when row i runs
                ripple_add(w, &b, &window, cin, Some(p[i + l as usize]), Some(a[i]), &mut gates);
            }
        }
        FunctionKind::Div => {
            // restoring division on the widened dividend register
            let r: Vec<u32> = (0..l).chain(2 * l..3 * l).collect();
            let bz = 3 * l;
            let q: Vec<u32> = (3 * l + 1..4 * l + 1).collect();
            let cin = 4 * l + 1;
            let xw: Vec<u32> = b.iter().copied().chain([bz]).collect();
            for i in (0..l as usize).rev() {
                let window: Vec<u32> = r[i..i + l as usize + 1].to_vec();
                // trial subtract: complement, add divisor, complement;
                // the carry lands on q_i and means "divisor was larger"
                for &wire in &window {
                    gates.push(not_gate(w, wire, None));
                }
                ripple_add(w, &xw, &window, cin, Some(q[i]), None, &mut gates);
                for &wire in &window {
                    gates.push(not_gate(w, wire, None));
                }
                // add back when the subtraction borrowed
                ripple_add(w, &xw, &window, cin, None, Some(q[i]), &mut gates);
                // quotient bit is the no-borrow flag
                gates.push(not_gate(w, q[i], None));
            }
        }
        FunctionKind::Compare => {
            let z = 2 * l;
            let cin = 2 * l + 1;
            let geq = 2 * l + 2;
            let eq = 2 * l + 3;
            let gt = 2 * l + 4;
            // subtract, copy the no-borrow flag, then uncompute the subtract
            let mut sub_chain = Vec::new();
            for &wire in &b {
                sub_chain.push(not_gate(w, wire, None));
            }
            sub_chain.push(not_gate(w, cin, None));
            ripple_add(w, &a, &b, cin, Some(z), None, &mut sub_chain);
            sub_chain.push(not_gate(w, cin, None));
            gates.extend(sub_chain.iter().cloned());
            gates.push(Gate::cnot(w, z, geq));
            gates.extend(sub_chain.into_iter().rev());
            // equality: XOR the operands into b, complement, fire on all-ones.
            // The negation sandwich keeps every gate's substitution expansion
            // at one mask, where a white-dot gate would expand 2^l-fold.
            for i in 0..l as usize {
                gates.push(Gate::cnot(w, a[i], b[i]));
            }
            for &wire in &b {
                gates.push(not_gate(w, wire, None));
            }
            let bmask = BitVec::from_indices(w, &b);
            gates.push(Gate::new(eq, bmask, BitVec::zeros(w)).unwrap());
            for &wire in &b {
                gates.push(not_gate(w, wire, None));
            }
            for i in 0..l as usize {
                gates.push(Gate::cnot(w, a[i], b[i]));
            }
            // strictly greater: at-least and not equal
            gates.push(
                Gate::new(
                    gt,
                    BitVec::from_indices(w, &[geq, eq]),
                    BitVec::from_indices(w, &[eq]),
                )
                .unwrap(),
            );
        }
        FunctionKind::SumOfSquares => {
            let p: Vec<u32> = (2 * l..4 * l + 1).collect();
            let cin = 4 * l + 1;
            let t = 4 * l + 2;
            let zpool: Vec<u32> = (4 * l + 3..5 * l + 4).collect();
            // a^2: plain product rows into the clean accumulator
            for i in 0..l as usize {
                gates.push(Gate::cnot(w, a[i], t));
                let window: Vec<u32> = p[i..i + l as usize].to_vec();
                ripple_add(w, &a, &window, cin, Some(p[i + l as usize]), Some(t), &mut gates);
                gates.push(Gate::cnot(w, a[i], t));
            }
            // b^2: rows ripple all the way to the top so carries propagate
            // through the already-occupied high bits
            for i in 0..l as usize {
                gates.push(Gate::cnot(w, b[i], t));
                let window: Vec<u32> = p[i..].to_vec();
                let xw: Vec<u32> = b
                    .iter()
                    .copied()
                    .chain(zpool.iter().copied())
                    .take(window.len())
                    .collect();
                ripple_add(w, &xw, &window, cin, None, Some(t), &mut gates);
                gates.push(Gate::cnot(w, b[i], t));
            }
        }
        FunctionKind::MonomialPower => {
            let e = spec.exponent;
            let cin = e * l;
            let t = e * l + 1;
            let reg = |s: u32| -> Vec<u32> { (s * l..(s + 1) * l).collect() };
            // r1 = a^2 mod 2^l (rows shrink: no carry out of the top)
            let r1 = reg(1);
            for i in 0..l as usize {
                gates.push(Gate::cnot(w, a[i], t));
                let window: Vec<u32> = r1[i..].to_vec();
                let xw: Vec<u32> = a[..window.len()].to_vec();
                ripple_add(w, &xw, &window, cin, None, Some(t), &mut gates);
                gates.push(Gate::cnot(w, a[i], t));
            }
            // r_{s+1} = r_s * a mod 2^l
            for s in 1..e - 1 {
                let rs = reg(s);
                let rn = reg(s + 1);
                for i in 0..l as usize {
                    let window: Vec<u32> = rn[i..].to_vec();
                    let xw: Vec<u32> = a[..window.len()].to_vec();
                    ripple_add(w, &xw, &window, cin, None, Some(rs[i]), &mut gates);
                }
            }
        }
    }
    Circuit::new(w, gates)
}

/// Expected output bits for a plain-integer input, in layout output order.
pub fn oracle_bits(spec: &FunctionSpec, a: u64, b: u64) -> Vec<bool> {
    let l = spec.operand_bits;
    let mask: u128 = if l == 64 { u128::MAX >> 64 } else { (1u128 << l) - 1 };
    let (a, b) = (a as u128 & mask, b as u128 & mask);
    let value_bits = |value: u128, len: u32| -> Vec<bool> {
        (0..len).map(|i| (value >> i) & 1 == 1).collect()
    };
    match spec.kind {
        FunctionKind::Add => value_bits(a + b, l + 1),
        FunctionKind::Sub => {
            let diff = (a.wrapping_sub(b)) & mask;
            let mut bits = value_bits(diff, l);
            bits.push(a >= b);
            bits
        }
        FunctionKind::Mul => value_bits(a * b, 2 * l),
        FunctionKind::Div => {
            let (q, r) = if b == 0 { (mask, a) } else { (a / b, a % b) };
            let mut bits = value_bits(q, l);
            bits.extend(value_bits(r, l));
            bits
        }
        FunctionKind::Compare => vec![a == b, a > b, a >= b],
        FunctionKind::SumOfSquares => value_bits(a * a + b * b, 2 * l + 1),
        FunctionKind::MonomialPower => {
            let mut acc: u128 = 1;
            for _ in 0..spec.exponent {
                acc = (acc * a) & mask;
            }
            value_bits(acc, l)
        }
    }
}

/// Build the circuit input state for plain operands.
pub fn input_state(spec: &FunctionSpec, width: u32, a: u64, b: u64) -> BitVec {
    let layout = spec.layout();
    let mut state = BitVec::zeros(width);
    let operands = [a, b];
    for (range, value) in layout.inputs.iter().zip(operands.iter()) {
        state.insert_u64(range.0, range.1, *value);
    }
    state
}

/// Read the output wires of a final state as packed result bits.
pub fn output_bits(layout: &Layout, state: &BitVec) -> Vec<bool> {
    layout.outputs.iter().map(|&wi| state.get(wi)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerifyMode {
    Exhaustive,
    Sampled(u64),
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checked: u64,
    /// (a, b, expected bits, actual bits), capped.
    pub mismatches: Vec<(u64, u64, Vec<bool>, Vec<bool>)>,
    pub ancilla_failures: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.ancilla_failures == 0
    }
}

/// Run a circuit against the integer oracle. Exhaustive mode enumerates all
/// operand pairs (total input bits capped at 20); sampled mode draws N pairs
/// from a fixed-seed stream. Also checks restored wires return to zero.
pub fn verify_circuit(c: &Circuit, spec: &FunctionSpec, mode: VerifyMode) -> Result<VerifyReport> {
    let layout = spec.layout();
    if c.width() < layout.width {
        return Err(Error::dimension("circuit width", layout.width, c.width()));
    }
    let l = spec.operand_bits;
    let two_operands = layout.inputs.len() == 2;
    let mut report = VerifyReport::default();
    let check = |a: u64, b: u64, report: &mut VerifyReport| -> Result<()> {
        let state = input_state(spec, c.width(), a, b);
        let out = c.run_state(&state)?;
        let got = output_bits(&layout, &out);
        let expected = oracle_bits(spec, a, b);
        report.checked += 1;
        if got != expected && report.mismatches.len() < 32 {
            report.mismatches.push((a, b, expected, got));
        }
        for &wire in &layout.restored {
            if out.get(wire) != state.get(wire) {
                report.ancilla_failures += 1;
                break;
            }
        }
        Ok(())
    };
    match mode {
        VerifyMode::Exhaustive => {
            let total_bits = if two_operands { 2 * l } else { l };
            if total_bits > 20 {
                return Err(Error::Parameter(format!(
                    "exhaustive verification capped at 20 input bits, got {total_bits}"
                )));
            }
            for a in 0..(1u64 << l) {
                if two_operands {
                    for b in 0..(1u64 << l) {
                        check(a, b, &mut report)?;
                    }
                } else {
                    check(a, 0, &mut report)?;
                }
            }
        }
        VerifyMode::Sampled(n) => {
            if l > 63 {
                return Err(Error::Parameter("sampled verification capped at 63 bits".into()));
            }
            let mut rng = StreamFactory::new(0x5eed).stream("verify", l as u64);
            for _ in 0..n {
                let a = rng.gen_range(0..(1u64 << l));
                let b = if two_operands {
                    rng.gen_range(0..(1u64 << l))
                } else {
                    0
                };
                check(a, b, &mut report)?;
            }
        }
    }
    Ok(report)
}

/// One classical Boolean operation with wire bindings; AND/OR consume a
/// fresh zero ancilla that receives the result.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoolOp {
    Not {
        wire: u32,
    },
    And {
        a: u32,
        b: u32,
        anc: u32,
    },
    /// With `restore_inputs`, the trailing negations undo the complementing
    /// of the inputs; otherwise they are left complemented.
    Or {
        a: u32,
        b: u32,
        anc: u32,
        restore_inputs: bool,
    },
}

/// Lower a Boolean operation to elementary gates: NOT is itself, AND is a
/// Toffoli into the ancilla, OR is three negations plus a Toffoli so the
/// ancilla holds 1+(a+1)(b+1).
pub fn lower_boolean(width: u32, op: BoolOp) -> Vec<Gate> {
    match op {
        BoolOp::Not { wire } => vec![Gate::not(width, wire)],
        BoolOp::And { a, b, anc } => vec![Gate::toffoli(width, a, b, anc)],
        BoolOp::Or {
            a,
            b,
            anc,
            restore_inputs,
        } => {
            let mut gates = vec![
                Gate::not(width, a),
                Gate::not(width, b),
                Gate::not(width, anc),
                Gate::toffoli(width, a, b, anc),
            ];
            if restore_inputs {
                gates.push(Gate::not(width, a));
                gates.push(Gate::not(width, b));
            }
            gates
        }
    }
}

/// Decompose a multi-controlled gate into rank <= 2 gates using zeroed
/// ancilla wires (t - 2 of them for rank t). White-dot controls are handled
/// by sandwiching negations. Rank <= 2 gates decompose to themselves.
pub fn decompose_multicontrolled(g: &Gate, ancilla_pool: &[u32]) -> Result<Vec<Gate>> {
    let width = g.width();
    let rank = g.rank();
    if rank <= 2 {
        return Ok(vec![g.clone()]);
    }
    let needed = (rank - 2) as usize;
    let mut pool = Vec::new();
    for &wire in ancilla_pool {
        if wire >= width {
            return Err(Error::Parameter(format!("ancilla wire {wire} out of range")));
        }
        if wire == g.target() || g.controls().get(wire) {
            continue;
        }
        pool.push(wire);
        if pool.len() == needed {
            break;
        }
    }
    if pool.len() < needed {
        return Err(Error::Parameter(format!(
            "need {needed} free ancilla wires for a rank-{rank} gate, found {}",
            pool.len()
        )));
    }
    let controls: Vec<u32> = g.controls().iter_ones().collect();
    let whites: Vec<u32> = g.polarity().iter_ones().collect();
    let mut gates = Vec::new();
    for &wire in &whites {
        gates.push(Gate::not(width, wire));
    }
    let mut forward = vec![Gate::toffoli(width, controls[0], controls[1], pool[0])];
    for j in 0..needed - 1 {
        forward.push(Gate::toffoli(width, controls[j + 2], pool[j], pool[j + 1]));
    }
    gates.extend(forward.iter().cloned());
    gates.push(Gate::toffoli(
        width,
        controls[rank as usize - 1],
        pool[needed - 1],
        g.target(),
    ));
    gates.extend(forward.into_iter().rev());
    for &wire in &whites {
        gates.push(Gate::not(width, wire));
    }
    Ok(gates)
}
