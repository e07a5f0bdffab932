//! Writing a sampled field as a manifest plus binary data, reading it back, and
//! loading the same samples from CSV.
//!
//! ```bash
//! cargo run --example field_files
//! ```

use std::fmt::Write as _;

use formtensor::field::manufactured;
use formtensor::field::verify::div_t_residual;
use formtensor::field::{FieldSource, GridField};
use formtensor::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("formtensor-field-files");
    std::fs::create_dir_all(&dir)?;
    let case = manufactured::case("gas-static-nonuniform", 6)?;

    let manifest = dir.join("gas.json");
    let data = case.field.write(&manifest)?;
    println!("wrote {} and {}", manifest.display(), data.display());
    println!("{}", std::fs::read_to_string(&manifest)?);
    let back = GridField::read(&manifest)?;
    assert_eq!(back, case.field);

    let spec = case.field.spec();
    let labels = case.field.component_order();
    let mut csv = (0..spec.dim()).map(|k| format!("i{k}")).chain(labels.iter().cloned()).collect::<Vec<_>>().join(",");
    csv.push('\n');
    let width = case.field.n_components();
    let mut idx = vec![0; spec.dim()];
    for flat in 0..spec.n_points() {
        spec.unflat(flat, &mut idx);
        let cells: Vec<String> = idx.iter().map(usize::to_string).collect();
        let mut values: Vec<f64> = case.field.coeffs()[flat * width..(flat + 1) * width].to_vec();
        if let Some(s) = case.field.entropy() {
            values.push(s[flat]);
        }
        let _ = writeln!(csv, "{},{}", cells.join(","), values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","));
    }
    let from_csv = GridField::from_csv(csv.as_bytes(), case.field.degree(), spec.spacing().to_vec(), spec.origin().to_vec())?;
    println!("csv round trip equal: {}", from_csv == case.field);
    println!("|div T| on the loaded field: {:.3e}", div_t_residual(&case.model, &back)?.max);
    Ok(())
}
