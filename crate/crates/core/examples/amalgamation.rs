//! Amalgamate two covers of a 2-cycle and check the square commutes.

use std::sync::Arc;

use cantor_towers::findyn::{self, EquivariantMap, FiniteSystem};
use cantor_towers::fraisse::{self, AmalgamProblem};

fn main() -> cantor_towers::Result<()> {
    let w = Arc::new(FiniteSystem::cycle(2));
    let x = Arc::new(FiniteSystem::from_cycle_type(&[4, 2]));
    let y = Arc::new(FiniteSystem::from_cycle_type(&[6]));
    let f = EquivariantMap::new(x, w.clone(), vec![0, 1, 0, 1, 1, 0])?;
    let g = EquivariantMap::new(y, w, vec![0, 1, 0, 1, 0, 1])?;
    let p = AmalgamProblem::new(f, g)?;

    let s = fraisse::amalgamate(&p)?;
    println!("apex cycles {:?}", findyn::cycle_decomposition(&s.apex)?.lengths());
    println!("h = {:?}", s.h.assignment());
    println!("i = {:?}", s.i.assignment());
    println!("verified: {}", fraisse::verify_amalgam(&p, &s));

    let (z, _, _) = fraisse::jep(&Arc::new(FiniteSystem::cycle(2)), &Arc::new(FiniteSystem::cycle(3)))?;
    println!("C2 x C3 cycles {:?}", findyn::cycle_decomposition(&z)?.lengths());
    Ok(())
}
