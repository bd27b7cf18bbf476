//! Generators on the vector representation, their self-check and the
//! invariant vector of the twisted tensor power.
use qaffine::evalrep::{selfcheck, EvalRep, InvariantVec};
use qaffine::rootdata::{AffineType, Family};

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::B1, 3)?)?;
    for (i, e) in rep.e.iter().enumerate() {
        let entries: Vec<String> = e.entries().map(|(a, b, v)| format!("{v}*E{}{}", a + 1, b + 1)).collect();
        println!("e_{i} = {}", entries.join(" + "));
    }
    let sc = selfcheck(&rep);
    println!("{} relations hold, {} fail", sc.passed.len(), sc.failures.len());

    let inv = InvariantVec::build(&rep)?;
    println!("w lives in V^(x{}) at points {:?}", inv.m, inv.points);
    println!("w has {} nonzero components", inv.w.len());
    Ok(())
}
