use multising::gibbs::{
    check_multiplication_invariance, finite_volume_probability, layers,
    limit_cylinder_probability, CylinderEvent,
};
use multising::lattice::{Convention, Direction, LatticeBox, SemigroupSpec, Site};
use multising::transfer::Spin;

fn main() -> multising::Result<()> {
    let spec = SemigroupSpec::scalar(&[2])?;
    let j = Direction::FIRST;
    let beta = 0.9;
    let event = CylinderEvent::new(
        [1, 2, 4, 3].map(Site::scalar).to_vec(),
        vec![Spin::Up, Spin::Up, Spin::Down, Spin::Up],
    )?;
    for layer in layers(&event, &spec, j)? {
        println!("root {} ranks {:?}", layer.root, layer.positions);
    }
    let limit = limit_cylinder_probability(&event, beta, &spec, j)?;
    println!("limit: {limit:.12}");
    for n in [2u64, 4, 8] {
        let lb = LatticeBox::new(vec![n])?;
        let p = finite_volume_probability(&event, beta, &spec, j, &lb, Convention::CoordinateCap)?;
        println!("N = {n}: {p:.12}");
    }
    for m in [2u64, 3, 5] {
        let gap = check_multiplication_invariance(&event, &Site::scalar(m), beta, &spec, j)?;
        println!("m = {m}: |difference| = {gap:e}");
    }
    Ok(())
}
