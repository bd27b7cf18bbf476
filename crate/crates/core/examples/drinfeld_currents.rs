//! Gauss decomposition of the C_2^(1) L operators and the Drinfeld modes
//! read off from it.
use qaffine::drinfeld::{check_drinfeld_relations, extract_currents};
use qaffine::evalrep::EvalRep;
use qaffine::lops::EvalL;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::solve_theta;

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::C1, 2)?)?;
    let art = solve_theta(&rep, 2)?;
    let lop = EvalL::build(&art, &rep)?;
    let ex = extract_currents(&lop, &rep)?;
    let cur = &ex.currents;
    for i in 1..=cur.rank() {
        for k in -2..=2 {
            let x = cur.x_plus(i, k).expect("within range");
            let terms: Vec<String> = x.entries().map(|(a, b, v)| format!("({v})E{}{}", a + 1, b + 1)).collect();
            println!("x+_{{{i},{k}}} = {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") });
        }
    }
    for ((i, r), h) in &cur.h {
        println!("h_{{{i},{r}}} has {} nonzero entries", h.nnz());
    }
    for o in check_drinfeld_relations(cur, &rep) {
        println!("{} {} order {}", o.name, o.status, o.certified_order);
    }
    Ok(())
}
