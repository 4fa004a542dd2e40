//! Build the spiral levels, list a few points and write W_1 as DOT.

use cantor_towers::spiral;

fn main() -> cantor_towers::Result<()> {
    for n in 1..=3 {
        let level = spiral::build_level(n)?;
        println!(
            "W_{n}: {} states, {} relation pairs, {} wandering",
            level.len(),
            level.system().edge_count(),
            spiral::wandering_points(&level).len()
        );
    }

    let w2 = spiral::build_level(2)?;
    for x in (0..w2.len()).step_by(50) {
        println!("  state {x} = {}", w2.point(x));
    }

    let path = std::env::temp_dir().join("w1.dot");
    std::fs::write(&path, spiral::build_level(1)?.to_dot())?;
    println!("wrote {}", path.display());
    Ok(())
}
