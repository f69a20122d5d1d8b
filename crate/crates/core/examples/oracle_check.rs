use multising::free_energy::finite_log_mgf;
use multising::lattice::{Convention, Direction, LatticeBox, SemigroupSpec};
use multising::oracle::{brute_force_mgf, cross_checks, InvolvedSiteSet};

fn main() -> multising::Result<()> {
    let spec = SemigroupSpec::scalar(&[2, 3])?;
    let lb = LatticeBox::new(vec![8])?;
    let j = Direction::FIRST;
    let set = InvolvedSiteSet::for_box(&spec, j, &lb, Convention::CoordinateCap)?;
    println!("{} involved spins, {} bonds", set.len(), set.bond_count());
    let exact = brute_force_mgf(0.3, 0.7, &spec, &lb, j, Convention::CoordinateCap)?;
    let fast = finite_log_mgf(0.3, 0.7, &spec, &lb, j, Convention::CoordinateCap)?;
    println!("enumeration {:.15}\ncensus      {:.15}", exact.log_expectation, fast.log_expectation);

    for c in cross_checks(16)? {
        println!("{:<36} {:>5} cases  max error {:.2e}", c.name, c.cases, c.max_error);
    }
    Ok(())
}
