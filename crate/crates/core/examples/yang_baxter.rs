//! Selects the Yang-Baxter variant satisfied by the evaluated R matrix.
use qaffine::evalrep::EvalRep;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::{solve_theta, YbeVariant};

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::C1, 2)?)?;
    let mut art = solve_theta(&rep, 2)?;
    for v in [YbeVariant::Plain, YbeVariant::Conjugated] {
        let o = art.check_ybe(v, 2);
        println!("{v}: {} to order {} {}", o.status, o.certified_order, o.detail);
    }
    art.select_ybe(2);
    println!("selected {:?}", art.ybe);
    Ok(())
}
