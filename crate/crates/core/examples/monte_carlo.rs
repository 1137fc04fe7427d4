//! A short Monte Carlo run on the single-chirp preset. Pass a replication
//! count as the first argument; the default is kept small.

use chirpfit::experiments::{log_log_slope, run_experiment, ExperimentConfig};
use chirpfit::*;

fn main() -> Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let mut cfg = ExperimentConfig::preset("4a")?;
    cfg.sigma2_values = vec![1.0];
    cfg.replications = reps;
    let table = run_experiment(&cfg)?;
    table.write_csv(std::io::stdout())?;

    for m in [Method::Lse, Method::Alse] {
        let rows = table.series(m, 1, "beta");
        let n: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let mse: Vec<f64> = rows.iter().map(|r| r.mse.unwrap()).collect();
        println!("{m}: log-log slope of beta MSE on N = {:.2}", log_log_slope(&n, &mse)?);
    }
    Ok(())
}
