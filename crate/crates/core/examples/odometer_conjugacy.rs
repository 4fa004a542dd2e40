//! Odometer arithmetic, supernatural numbers and the conjugacy test.

use cantor_towers::odometer::{self, OdometerSpec};

fn main() -> cantor_towers::Result<()> {
    let two: OdometerSpec = ":2".parse()?;
    println!("(1,1,0) + 1 = {:?}", two.step(&[1, 1, 0])?);

    let specs = [":2", ":4", ":3", ":6", ":2,3", "6:5", ":30", "2,3:5"];
    let specs: Vec<OdometerSpec> = specs.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    for s in &specs {
        println!("{s:>8}  {}", s.supernatural());
    }
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            if odometer::conjugate(a, b) {
                println!("{a} ~ {b}");
            }
        }
    }
    Ok(())
}
