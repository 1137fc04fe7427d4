//! Fit one chirp by least squares and by the approximate estimator, then
//! compare the errors with the asymptotic standard deviations.

use chirpfit::asymptotics::attach_covariance;
use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let (n, sigma2) = (201, 2.0);
    let truth = ChirpComponent::new(5.0, 0.0, 0.5);
    let y = add(
        &synthesize_clean(&ChirpModel::new(vec![truth])?, n)?,
        &generate_noise(&NoiseSpec::iid(sigma2, 11), n)?,
    )?;
    let cfg = SimplexConfig::default();

    for mut fit in [lse_one(&y, Init::Scan, &cfg)?, alse_one(&y, Init::Scan, &cfg)?] {
        attach_covariance(&mut fit, None, n)?;
        let c = &fit.components[0];
        let cov = &fit.covariance.as_ref().unwrap()[0];
        let sd = [0, 1, 2].map(|i| cov[(i, i)].sqrt());
        println!(
            "{:>5}: A = {:.4}{:+.4}i  beta = {:.10}  err/sd = {:+.2} {:+.2} {:+.2}",
            fit.method,
            c.a_re,
            c.a_im,
            c.beta,
            (c.a_re - truth.a_re) / sd[0],
            (c.a_im - truth.a_im) / sd[1],
            (c.beta - truth.beta) / sd[2],
        );
    }
    Ok(())
}
