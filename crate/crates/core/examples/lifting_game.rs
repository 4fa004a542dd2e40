//! One round of the lifting game on the spiral tower.

use cantor_towers::findyn::EquivariantMap;
use cantor_towers::spiral;
use cantor_towers::tower::{self, LevelPartition, LiftOutcome};

fn main() -> cantor_towers::Result<()> {
    let t = spiral::spiral_tower(3)?;
    let phi = EquivariantMap::identity(t.level(0)?.clone());
    let a = LevelPartition::from_fibers(&t, 0, &phi)?;

    match tower::lifting_check(&t, 0, &phi, 1, &a, 2, 2)? {
        LiftOutcome::Found(lift) => {
            let a_psi = LevelPartition::from_fibers(&t, lift.level, &lift.psi)?;
            println!(
                "psi: level {} -> W_{}, {} fibers, refines A: {}",
                lift.level,
                1 + lift.k,
                a_psi.blocks().len(),
                tower::refines(&a_psi, &a, &t)?
            );
        }
        LiftOutcome::AbsentWithinBounds => println!("no lift within bounds"),
    }

    let coarse = LevelPartition::new(&t, 0, vec![(0..18).collect()])?;
    if let Err(e) = tower::lifting_check(&t, 0, &phi, 1, &coarse, 2, 2) {
        println!("coarse partition: {e}");
    }
    Ok(())
}
