//! Strong complete monotonicity against complete monotonicity of x·f(x).

use cmdeg_kit::catalog::CatalogFunction;
use cmdeg_kit::strongcm::equivalence_test;
use cmdeg_kit::{EvalContext, Grid, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    let grid = Grid::default_check();
    println!("{:<12} {:>8} {:>8} {:>8}", "f", "strong", "x·f CM", "agree");
    for f in CatalogFunction::strong_catalog() {
        let e = equivalence_test(&f, 8, &grid, &ctx)?;
        println!(
            "{:<12} {:>8} {:>8} {:>8}",
            f.to_string(),
            e.strong_verdict.is_pass(),
            e.xcm_verdict.is_pass(),
            e.agree
        );
    }
    Ok(())
}
