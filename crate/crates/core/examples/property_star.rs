//! Recover the digit sequence of an odometer from its tower of truncations.

use cantor_towers::odometer::OdometerSpec;
use cantor_towers::tower;

fn main() -> cantor_towers::Result<()> {
    for s in [":2", ":2,3", ":6", "4:3"] {
        let spec: OdometerSpec = s.parse()?;
        let t = spec.tower(4)?;
        match tower::property_star(&t, 4)? {
            Some(w) => {
                let blocks: Vec<usize> = w.partitions.iter().map(|p| p.blocks().len()).collect();
                println!("{s:>5}: digits {:?}, block counts {blocks:?}", w.digits);
            }
            None => println!("{s:>5}: nothing within depth 4"),
        }
    }
    Ok(())
}
