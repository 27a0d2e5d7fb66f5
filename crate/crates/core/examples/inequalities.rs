//! Rational bounds for Ψ and the sharpness of the double inequality.

use cmdeg_kit::inequalities::{double_inequality_check, double_inequality_scan, sandwich_check, sandwich_point};
use cmdeg_kit::{EvalContext, Grid, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    let p = sandwich_point(1.0, &ctx)?;
    println!("x = 1: {:.6} < {:.6} < Ψ = {:.6} < {:.6}", p.poly_lower, p.rational_lower, p.psi, p.upper);

    let grid = Grid::default_check();
    let s = sandwich_check(&grid, &ctx)?;
    println!("sandwich on default grid: {:?}, min margin {:.3e}", s.verdict, s.min_margin);

    let ok = double_inequality_check(0.0, 4.0, &grid, &ctx)?;
    println!("(μ, ν) = (0, 4): {:?}", ok.verdict);
    for (mu, nu) in [(0.5, 4.0), (0.0, 3.5)] {
        let r = double_inequality_scan(mu, nu, &ctx)?;
        let w = r.refined.first().or(r.witnesses.first());
        println!("(μ, ν) = ({mu}, {nu}): {:?}, violated near x = {:.4e}", r.verdict, w.map_or(f64::NAN, |w| w.x));
    }
    Ok(())
}
