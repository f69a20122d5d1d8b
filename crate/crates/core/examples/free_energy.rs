use multising::free_energy::{
    finite_mgf, free_energy_1d, free_energy_derivative, free_energy_directional,
    free_energy_general, Truncation,
};
use multising::lattice::{Direction, LatticeBox, SemigroupSpec};
use multising::presets;

fn main() -> multising::Result<()> {
    let (r, beta) = (0.3, 1.0);
    let tol = Truncation::Tolerance(1e-12);

    let f = free_energy_1d(r, beta, &[2], tol)?;
    println!("<2>: F = {:.12} (K = {}, tail <= {:.1e})", f.value, f.truncation_k, f.tail_bound);
    for n in [10u32, 15, 20] {
        let lb = LatticeBox::new(vec![1 << n])?;
        let fin = finite_mgf(r, beta, &SemigroupSpec::scalar(&[2])?, &lb, Direction::FIRST)?;
        println!("  N = 2^{n}: {fin:.12}");
    }

    let (spec, j) = presets::fig2();
    let f = free_energy_directional(r, beta, &spec, j, tol)?;
    let slope = free_energy_derivative(r, beta, &spec, j, tol)?;
    println!("fig2: F = {:.12}, F' = {slope:.12}", f.value);

    let diag = SemigroupSpec::new(2, vec![vec![2, 3]])?;
    let g = free_energy_general(r, beta, &diag, Direction::FIRST, 40)?;
    println!("<(2,3)> b-count form, K = 40: {:.12}", g.value);
    Ok(())
}
