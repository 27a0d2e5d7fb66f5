//! Ψ(x) computed from polygammas against its Laplace integral.

use cmdeg_kit::cmdeg::laplace_identity_check;
use cmdeg_kit::{EvalContext, Result};

fn main() -> Result<()> {
    let ctx = EvalContext::default();
    for x in [0.5, 1.0, 2.0, 5.0, 20.0] {
        let r = laplace_identity_check(x, &ctx)?;
        println!(
            "x = {x:>4}: closed form {:.15e}  integral {:.15e}  rel err {:.2e}{}",
            r.lhs,
            r.rhs,
            r.rel_err,
            if r.tail_warning { "  (tail warning)" } else { "" }
        );
    }
    Ok(())
}
