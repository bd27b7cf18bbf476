//! L operators of A_2^(1): RLL relations, the invariant-vector relation and
//! the quantum determinant.
use qaffine::evalrep::{EvalRep, InvariantVec};
use qaffine::lops::EvalL;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::solve_theta;

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::A1, 2)?)?;
    let inv = InvariantVec::build(&rep)?;
    let art = solve_theta(&rep, 2)?;
    let lop = EvalL::build(&art, &rep)?;
    let l11 = lop.entry(true, 0, 0);
    for (t, c) in l11.terms() {
        let diag: Vec<String> = (0..c.dim()).map(|a| c.get(a, a).to_string()).collect();
        println!("L+_11 at z^{t}: diag({})", diag.join(", "));
    }
    for o in [lop.check_rll(&art, 2), lop.check_w_relation(&inv, 2), lop.check_qdet(&rep, &inv, 2)] {
        println!("{:<5} {} order {} {}", o.name, o.status, o.certified_order, o.detail);
    }
    Ok(())
}
