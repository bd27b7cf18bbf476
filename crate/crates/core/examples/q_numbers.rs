//! Exact arithmetic in Q(s) with q = s^D.
use num_rational::BigRational;
use qaffine::qfield::{QContext, QScalar};

fn main() -> qaffine::Result<()> {
    let ctx = QContext::new(3);
    let q = ctx.q();
    println!("q            = {q}");
    println!("[3]          = {}", ctx.qint(3, 1));
    println!("[4 choose 2] = {}", ctx.qbinom(4, 2, 1)?);
    println!("q^(1/3)      = {}", ctx.q_pow_rat(&qaffine::qfield::rat(1, 3))?);

    let x = q.sub(&q.inv()?).div(&QScalar::one().sub(&ctx.q_pow(2)))?;
    println!("(q - q^-1)/(1 - q^2) = {x}");
    let back: QScalar = x.to_string().parse()?;
    assert_eq!(back, x);

    let s0 = BigRational::new(2.into(), 1.into());
    println!("at s = 2: {}", x.specialize(&s0)?);
    Ok(())
}
