//! Samples of the Laplace kernel and the positivity chain behind it.

use cmdeg_kit::kernel::{kernel_sample, positivity_chain};
use cmdeg_kit::{EvalContext, Grid, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "σ(t)", "q''''(t)", "[ln σ'']''");
    for t in [1e-3, 0.1, 1.0, 5.0, 20.0] {
        let s = kernel_sample(t, &ctx)?;
        println!("{t:>8} {:>14.6e} {:>14.6e} {:>14.6e}", s.sigma, s.q4, s.logconc);
    }

    let chain = positivity_chain(&Grid::log(1e-3, 30.0, 200)?, &ctx)?;
    println!("\nchain holds on 200 points: {}", chain.verdict);
    for b in &chain.convolution {
        println!("  t = {:>4}: A = {:.6e}  B = {:.6e}  C = {:.6e}", b.t, b.a, b.b, b.c);
    }
    Ok(())
}
