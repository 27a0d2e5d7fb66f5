//! Complete monotonicity of x^α Ψ(x) and the bisected degree bracket.

use cmdeg_kit::catalog::CatalogFunction;
use cmdeg_kit::cmdeg::{cm_check, degree_estimate, phi};
use cmdeg_kit::{EvalContext, Grid, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    let psi = CatalogFunction::Psi;
    let grid = Grid::default_check();

    for alpha in [3.0, 4.0, 4.5] {
        let r = cm_check(&psi, alpha, 10, &grid, &ctx)?;
        match r.witnesses.first() {
            None => println!("α = {alpha}: completely monotonic through order 10"),
            Some(w) => println!("α = {alpha}: fails, first witness x = {:.4}, k = {}, value = {:.3e}", w.x, w.k, w.value),
        }
    }

    for x in [1e-2, 1.0, 10.0, 1e3] {
        println!("φ({x}) = {:.6}", phi(x, &ctx)?);
    }

    let d = degree_estimate(&psi, 0.0, 8.0, 0.05, 6, &Grid::default_degree(), &ctx)?;
    println!("degree bracket [{}, {}] after {} bisections", d.lo, d.hi, d.iterations);
    Ok(())
}
