//! Build a generic chain, save it, and certify that it has no wandering atoms
//! while the spiral levels do.

use cantor_towers::fraisse;
use cantor_towers::tower::Tower;

fn main() -> cantor_towers::Result<()> {
    let chain = fraisse::generic_chain(&[2, 3, 4], 5)?;
    let sizes: Vec<usize> = chain.levels().iter().map(|l| l.len()).collect();
    println!("level sizes {sizes:?}, valid: {:?}", chain.validate());

    let path = std::env::temp_dir().join("chain.json");
    std::fs::write(&path, chain.to_json())?;
    let back = Tower::from_json(&std::fs::read_to_string(&path)?)?;
    assert_eq!(back, chain);

    let cert = fraisse::not_special_certificate(&back, 2)?;
    for l in &cert.chain {
        println!("level {}: order {}, largest atom period {}", l.level, l.order, l.max_period);
    }
    for s in &cert.spirals {
        println!("W_{}: {} wandering points", s.n, s.wandering);
    }
    println!("certificate holds: {}", cert.holds());
    Ok(())
}
