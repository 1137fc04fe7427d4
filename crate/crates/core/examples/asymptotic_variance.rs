//! Asymptotic variances for a two-component model, as a CSV table.

use chirpfit::asymptotics::write_variance_table;
use chirpfit::*;

fn main() -> Result<()> {
    let model = ChirpModel::new(vec![ChirpComponent::new(7.0, 0.0, 1.0), ChirpComponent::new(5.0, 0.0, 0.5)])?;
    let inv = sigma_inv_matrix(&model.components()[0])?;
    println!("Sigma^-1 for A = 7:\n{inv:.4}");
    write_variance_table(&model, &[101, 201, 501], &[1.0, 3.0], std::io::stdout())?;
    Ok(())
}
