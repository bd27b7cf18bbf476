//! Saves a solved artifact and reads it back byte for byte.
use qaffine::evalrep::EvalRep;
use qaffine::qadm::cache;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::solve_theta;

fn main() -> qaffine::Result<()> {
    let rep = EvalRep::build(AffineType::new(Family::D2, 2)?)?;
    let art = solve_theta(&rep, 2)?;
    let path = std::env::temp_dir().join("qaffine-example-D2.qaf");
    cache::save(&path, &art)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(10) {
        println!("{line}");
    }
    println!("... {} lines", text.lines().count());
    let back = cache::load(&path)?;
    assert_eq!(back, art);
    assert_eq!(cache::to_string(&back)?, text);
    std::fs::remove_file(&path)?;
    Ok(())
}
