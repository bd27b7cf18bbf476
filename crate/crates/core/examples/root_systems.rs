//! Cartan data of the seven affine families at their smallest ranks.
use qaffine::rootdata::{AffineType, Family, RootDatum};

fn main() -> qaffine::Result<()> {
    for f in Family::ALL {
        let d = RootDatum::build(AffineType::new(f, f.min_rank())?)?;
        println!("{}  (D = {}, dim V = {}, h = {})", d.ty, d.dd, d.dim(), d.h_dual);
        for row in &d.cartan {
            println!("    {row:?}");
        }
        println!("    marks {:?}  comarks {:?}  d {:?}", d.marks, d.comarks, d.d);
        let gram: Vec<String> = (0..d.dim()).map(|j| d.eta_pairing(0, j).to_string()).collect();
        println!("    (eta_1|eta_j) = {}", gram.join(" "));
    }
    Ok(())
}
