use multising::free_energy::DirectionalModel;
use multising::ldp::rate_curve;
use multising::numerics::linspace;

fn main() -> multising::Result<()> {
    let model = DirectionalModel::one_dim(&[2, 3])?;
    let xs = linspace(-0.9, 0.9, 19);
    for r in [0.5, 0.2] {
        println!("r = {r}");
        for p in rate_curve(&model, r, &xs, 1e-10)? {
            let eta = p.eta.map_or("-".to_string(), |e| format!("{e:+.5}"));
            println!("  x = {:+.2}  I = {:.8}  eta = {eta}", p.x, p.rate);
        }
    }
    Ok(())
}
