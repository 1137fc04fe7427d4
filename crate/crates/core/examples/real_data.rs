//! The workflow for a recorded signal: read CSV, probe orders, select one,
//! check the residuals for whiteness. Reads the file named on the command
//! line, or synthesizes a stand-in.

use chirpfit::experiments::{fit_real, noise_floor_tau};
use chirpfit::io::read_signal_file;
use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let y = match std::env::args().nth(1) {
        Some(path) => read_signal_file(std::path::Path::new(&path))?,
        None => {
            let model = ChirpModel::new(vec![
                ChirpComponent::new(6.0, 2.0, 1.3),
                ChirpComponent::new(4.0, 0.0, 0.6),
            ])?;
            add(&synthesize_clean(&model, 400)?, &generate_noise(&NoiseSpec::iid(1.0, 99), 400)?)?
        }
    };
    let tau = noise_floor_tau(y.len());
    let r = fit_real(&y, 5, tau, 20, Flavor::Lse, &SimplexConfig::default())?;
    println!("tau = {tau:.4}");
    print!("{}", r.report.to_text());
    for c in &r.fit.components {
        println!("A {:.4}{:+.4}i  beta {:.8}", c.a_re, c.a_im, c.beta);
    }
    Ok(())
}
