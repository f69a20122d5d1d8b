use multising::lattice::{
    chain_length_census, decompose_box_with, directional_constant, Convention, LatticeBox,
};
use multising::presets;

fn main() -> multising::Result<()> {
    let (spec, j) = presets::fig2();
    let lb: LatticeBox = "24x30".parse()?;

    for conv in [Convention::CoordinateCap, Convention::RankCap] {
        let dec = decompose_box_with(&lb, &spec, j, conv)?;
        println!("{conv}: {} chains, {} retained sites", dec.chains.len(), dec.retained_count());
        for chain in dec.chains.iter().filter(|c| c.members.len() > 2).take(3) {
            let members: Vec<String> = chain.members.iter().map(|s| s.to_string()).collect();
            println!("  {}", members.join(" -> "));
        }
    }

    // census needs no enumeration of sites
    let big = LatticeBox::new(vec![1_000_000, 1_000_000])?;
    let census = chain_length_census(&big, &spec, j, Convention::CoordinateCap)?;
    for (len, count) in census.iter().take(6) {
        println!("length {len:>2}: {count} chains");
    }
    println!("C = {}", directional_constant(&spec, j)?);
    Ok(())
}
