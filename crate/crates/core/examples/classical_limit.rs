//! Compares the q -> 1 limit of the solved R matrix with the classical
//! r-matrix built by an independent recursion over the rationals.
use qaffine::evalrep::EvalRep;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::{classical_r, solve_theta};

fn main() -> qaffine::Result<()> {
    for (f, l) in [(Family::C1, 2), (Family::A2even, 2)] {
        let rep = EvalRep::build(AffineType::new(f, l)?)?;
        let art = solve_theta(&rep, 2)?;
        let r = classical_r(&rep, 2)?;
        println!("{}: {} classical coefficients", rep.ty(), r.len());
        let o = art.check_classical(&rep);
        println!("    {} {} {}", o.name, o.status, o.detail);
    }
    Ok(())
}
