//! Exact Q(k) table, the quadratics controlling its sign, and CSV export.

use cmdeg_kit::series::{q_positivity, quadratic_larger_roots, quadratic_positivity_start, theta, q_series_sum};
use cmdeg_kit::Result;

fn main() -> Result<()> {
    let table = q_positivity(40)?;
    table.write_csv(std::io::stdout()).expect("stdout is writable");
    println!("all positive up to 40: {}", table.all_positive);

    let roots = quadratic_larger_roots();
    println!("larger roots: {:.6}, {:.6}, {:.6}", roots[0], roots[1], roots[2]);
    println!("all three quadratics positive from k = {}", quadratic_positivity_start());

    for t in [0.5, 1.0, 8.0] {
        println!("t = {t}: ϑ = {:.6e}, (1/6)ΣQ(k)tᵏ/k! = {:.6e}", theta(t)?, q_series_sum(t, 60));
    }
    Ok(())
}
