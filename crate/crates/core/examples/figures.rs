//! Writes the two figure datasets to the current directory.

use std::path::Path;

use multising::free_energy::{DirectionalModel, Truncation};
use multising::io::{write_atomic, Format, Table};
use multising::presets::{self, FIGURE_BIASES, FIGURE_TERMS};

fn main() -> multising::Result<()> {
    let (fig2, j2) = presets::fig2();
    let runs = [
        ("fig1.csv", DirectionalModel::new(&presets::fig1(), j2)?),
        ("fig2.csv", DirectionalModel::new(&fig2, j2)?),
    ];
    for (file, model) in runs {
        let mut table = Table::new(["r", "beta", "F"]);
        table.meta("terms", FIGURE_TERMS);
        for r in FIGURE_BIASES {
            for beta in presets::figure_beta_grid() {
                let f = model.evaluate(r, beta, Truncation::Terms(FIGURE_TERMS))?;
                table.push(vec![r.into(), beta.into(), f.value.into()])?;
            }
        }
        write_atomic(Path::new(file), &table.render(Format::Csv)?)?;
        println!("wrote {file} ({} rows)", table.rows().len());
    }
    Ok(())
}
