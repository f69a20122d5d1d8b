use multising::lattice::{chain_index_j, factor_index, gamma, is_root, Direction, SemigroupSpec, Site};

fn main() -> multising::Result<()> {
    let spec = SemigroupSpec::scalar(&[2, 3, 5, 7, 11])?;
    let g = spec.section(0);
    println!("{spec}");
    println!("elements up to 30: {:?}", g.elements_up_to(30));
    println!("gamma = {} ({:.6})", g.gamma(), g.gamma_f64());
    println!("gamma(<2,3>) = {}", gamma(&[2, 3]));

    let s23 = SemigroupSpec::scalar(&[2, 3])?;
    for i in [1u64, 6, 13, 72] {
        let site = Site::scalar(i);
        let f = factor_index(&site, &s23)?;
        println!(
            "{i:>3}: root {} exponents {:?} rank {} root? {}",
            f.root,
            f.exponents,
            chain_index_j(&site, &s23, Direction::FIRST)?,
            is_root(&site, &s23)
        );
    }
    Ok(())
}
