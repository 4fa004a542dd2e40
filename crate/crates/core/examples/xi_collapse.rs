//! Follow points of W_4 down the collapse maps and check the morphism property.

use cantor_towers::spiral::{self, SpiralPoint};

fn main() -> cantor_towers::Result<()> {
    for s in ["(L1M2G1G2|l|17)", "(G2M1L1M2|m|-3)", "(M2M2G1L2|r|5)"] {
        let mut p: SpiralPoint = s.parse()?;
        print!("{p}");
        while p.level() > 1 {
            p = spiral::xi_step(&p)?;
            print!(" -> {p}");
        }
        println!();
    }
    for n in 1..=3 {
        println!("W_{} -> W_{n} preserves relations: {}", n + 1, spiral::verify_xi_morphism(n)?);
    }
    Ok(())
}
