use multising::free_energy::Truncation;
use multising::gibbs::{ks_entropy_2multiple, ks_entropy_2multiple_closed, ks_entropy_directional};
use multising::presets;

fn main() -> multising::Result<()> {
    for beta in [0.0, 0.5, 1.0, 2.0] {
        let s = ks_entropy_2multiple(beta, &[2, 3])?;
        println!(
            "p=(2,3) beta={beta}: series {:.12} closed {:.12}",
            s.value,
            ks_entropy_2multiple_closed(beta, &[2, 3])
        );
    }
    let (spec, j) = presets::fig2();
    for beta in [0.0, 1.0, 3.0] {
        let s = ks_entropy_directional(beta, &spec, j, Truncation::Tolerance(1e-9))?;
        println!("fig2 beta={beta}: {:.12} (K = {}, remainder {:.1e})", s.value, s.truncation_k, s.tail_bound);
    }
    Ok(())
}
