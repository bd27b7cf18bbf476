//! The A_1^(1) R matrix as a power series in z.
use qaffine::evalrep::EvalRep;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::solve_theta;

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::A1, 1)?)?;
    let art = solve_theta(&rep, 4)?;
    let r = art.r_series();
    for (t, c) in r.terms() {
        println!("z^{t}:");
        for (a, b, v) in c.entries() {
            println!("    R[{}][{}] = {v}", a + 1, b + 1);
        }
    }
    Ok(())
}
