//! Peel three chirps off one at a time and watch the residual sum of squares.

use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let n = 256;
    let model = ChirpModel::new(vec![
        ChirpComponent::new(8.0, 1.0, 0.9),
        ChirpComponent::new(0.0, 5.0, 2.1),
        ChirpComponent::new(3.0, 0.0, 0.35),
    ])?;
    let y = add(&synthesize_clean(&model, n)?, &generate_noise(&NoiseSpec::iid(1.0, 3), n)?)?;

    for flavor in [Flavor::Lse, Flavor::Alse] {
        let fit = sequential_fit(&y, 3, flavor, &SimplexConfig::default())?;
        println!("{}", fit.method);
        for (c, rss) in fit.components.iter().zip(&fit.rss_trajectory) {
            println!("  |A| {:6.3}  beta {:.8}  rss after {rss:10.2}", c.magnitude(), c.beta);
        }
    }
    println!("noise energy is about {}", n);
    Ok(())
}
