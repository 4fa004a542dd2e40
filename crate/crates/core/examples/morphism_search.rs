//! Enumerate equivariant maps between small permutation systems.

use std::sync::Arc;

use cantor_towers::findyn::{self, FiniteSystem};

fn main() -> cantor_towers::Result<()> {
    let c6 = Arc::new(FiniteSystem::cycle(6));
    let c3 = Arc::new(FiniteSystem::cycle(3));
    for f in findyn::find_equivariant_maps(&c6, &c3, true, usize::MAX) {
        println!("C6 -> C3: {:?}", f.assignment());
    }

    let x = FiniteSystem::from_cycle_type(&[4, 2, 1]);
    let dec = findyn::cycle_decomposition(&x)?;
    println!("cycles {:?}, order {}", dec.cycles(), dec.order());

    for k in 1..=4 {
        let blocks = findyn::phi_k_holds(&FiniteSystem::cycle(12), k)?;
        println!("C12 splits into {k} rotating blocks: {}", blocks.is_some());
    }
    Ok(())
}
