//! Polygamma values, the recurrence, and agreement with the integral form.

use cmdeg_kit::polygamma::{polygamma, polygamma_integral, polygamma_jet};
use cmdeg_kit::{EvalContext, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    println!("{:>6} {:>3} {:>24} {:>24} {:>10}", "x", "n", "series", "integral", "rel diff");
    for x in [0.5, 1.0, 3.0, 25.0] {
        for n in 1..=4 {
            let a = polygamma(n, x, &ctx)?;
            let b = polygamma_integral(n, x, &ctx)?;
            println!("{x:>6} {n:>3} {a:>24.16e} {b:>24.16e} {:>10.2e}", ((a - b) / a).abs());
        }
    }
    let jet = polygamma_jet(6, 2.0, &ctx)?;
    println!("\nψ^(n)(2), n = 1..=6: {jet:?}");
    Ok(())
}
