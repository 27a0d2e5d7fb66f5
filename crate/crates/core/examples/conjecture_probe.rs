//! Degree brackets for h_λ and -h_μ, the remainders of the rational bounds.

use cmdeg_kit::inequalities::{conjecture_probe, ProbeOutcome};
use cmdeg_kit::{EvalContext, Result};

fn show(label: &str, o: &ProbeOutcome) {
    match o {
        ProbeOutcome::Bracket(d) => println!("  {label}: degree in [{:.4}, {:.4}]", d.lo, d.hi),
        ProbeOutcome::Invalid { reason } => println!("  {label}: {reason}"),
    }
}

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    for (lambda, mu) in [(0.0, 4.0), (1.0, 5.0)] {
        let p = conjecture_probe(lambda, mu, &ctx)?;
        println!("λ = {lambda}, μ = {mu} ({})", p.regime);
        show("h_λ", &p.h);
        show("-h_μ", &p.neg_h);
    }
    Ok(())
}
