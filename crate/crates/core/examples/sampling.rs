use multising::gibbs::sample_box;
use multising::lattice::{LatticeBox, Site};
use multising::presets;

fn main() -> multising::Result<()> {
    let (spec, j) = presets::fig2();
    let lb = LatticeBox::new(vec![12, 12])?;
    let sample = sample_box(&lb, 1.2, &spec, j, 7, 2000)?;
    let a = sample.sites.iter().position(|s| *s == Site::new(vec![1, 1])).unwrap();
    let b = sample.sites.iter().position(|s| *s == Site::new(vec![2, 3])).unwrap();
    let agree = sample.configs.iter().filter(|c| c[a] == c[b]).count();
    println!("P(s(1,1) = s(2,3)) ~ {:.4}", agree as f64 / sample.configs.len() as f64);
    println!("q = {:.4}", multising::transfer::bond_agreement(1.2));
    Ok(())
}
