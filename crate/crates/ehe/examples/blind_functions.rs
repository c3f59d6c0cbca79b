//! Blindness shell: different functions of one operand width share the same
//! program width, section count and generation-work band, so the published
//! program does not reveal which function it computes.
//!
//! Run with: cargo run --release --example blind_functions

use ehe::circuits::{FunctionKind, FunctionSpec};
use ehe::cryptoval::{encrypt_computation, ActionVariant, PipelineOptions};
use ehe::keygen::{generate_keypair, KeyParams};

fn main() {
    let l = 4;
    let params = KeyParams::insecure(2 * l, 12, 31);
    let (_, private) = generate_keypair(&params).unwrap();

    println!("function          n  sections  floor      max work   in band");
    for kind in [
        FunctionKind::Add,
        FunctionKind::Sub,
        FunctionKind::Mul,
        FunctionKind::Div,
        FunctionKind::Compare,
        FunctionKind::SumOfSquares,
    ] {
        let spec = FunctionSpec::new(kind, l as u32).unwrap();
        let opts = PipelineOptions::new(ActionVariant::TwoKey, 500);
        let (program, _, stats) = encrypt_computation(&private, &spec, &opts).unwrap();
        let floor = program.blindness.work_floor;
        println!(
            "{:14} {:4}  {:8}  {:9}  {:9}  {}",
            kind.name(),
            program.n,
            program.sections.len(),
            floor,
            stats.max_section_work(),
            stats.section_work.iter().all(|w| *w >= floor)
        );
        assert_eq!(program.n, FunctionSpec::shell_width(l as u32));
    }
    println!("\nevery program shares the shell width and meets the work floor");
}
