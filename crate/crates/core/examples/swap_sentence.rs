//! The sentence "some clopen set is mapped onto its complement" separates
//! the 2-adic odometer from the 3-adic one.

use cantor_towers::findyn;
use cantor_towers::odometer::{self, OdometerSpec};

fn main() -> cantor_towers::Result<()> {
    for s in [":2", ":3", "3,4", ":5", "6:5"] {
        let spec: OdometerSpec = s.parse()?;
        let holds = odometer::swap_sentence_holds(&spec);
        print!("{s:>5}: {holds}");
        if let Some(level) = spec.phi_k(2) {
            let t = spec.truncation(level)?;
            let blocks = findyn::phi_k_holds(t.system(), 2)?.expect("level carries a witness");
            print!("  U = {:?} at level {level}", blocks[0]);
        }
        println!();
    }
    Ok(())
}
