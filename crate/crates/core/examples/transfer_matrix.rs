use multising::transfer::{chain_partition, field_from_bias, spectral};

fn main() -> multising::Result<()> {
    let (beta, r) = (0.8, 0.3);
    let h = field_from_bias(r)?;
    let sd = spectral(beta, h)?;
    println!("h = {h:.6}");
    println!("lambda+ = {:.12}, lambda- = {:.12}", sd.lambda_plus, sd.lambda_minus);
    println!("|v.e+|^2 = {:.12}, ratio = {:.6}", sd.overlap, sd.ratio());

    // Z(n) against the leading eigenvalue
    for n in [1usize, 2, 10, 100] {
        let z = chain_partition(beta, h, n)?;
        println!("Z({n}) = {z:.6e}, Z^(1/n) = {:.9}", z.powf(1.0 / n as f64));
    }
    Ok(())
}
