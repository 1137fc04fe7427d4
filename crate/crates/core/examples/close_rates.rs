//! Two chirps whose rates differ by 0.001. Joint least squares resolves
//! them; the sequential fit is pulled by the other component.

use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let n = 300;
    let model = ChirpModel::new(vec![ChirpComponent::new(7.0, 0.0, 0.501), ChirpComponent::new(5.0, 0.0, 0.5)])?;
    let clean = synthesize_clean(&model, n)?;
    let cfg = SimplexConfig::default();
    let sd = [45.0 / (8.0 * 49.0), 45.0 / (8.0 * 25.0)].map(|v: f64| (v / (n as f64).powi(5)).sqrt());

    for (label, y) in [("noiseless", clean.clone()), ("sigma2 = 1", add(&clean, &generate_noise(&NoiseSpec::iid(1.0, 5), n)?)?)] {
        println!("{label}");
        let joint = lse_joint(&y, 2, None, &cfg)?;
        let seq = sequential_fit(&y, 2, Flavor::Lse, &cfg)?;
        for fit in [joint, seq] {
            let mut b = fit.betas();
            b.sort_by(|x, y| y.total_cmp(x));
            println!(
                "  {:>9}: beta1 {:.7} ({:+.1} sd)  beta2 {:.7} ({:+.1} sd)",
                fit.method.to_string(),
                b[0],
                (b[0] - 0.501) / sd[0],
                b[1],
                (b[1] - 0.5) / sd[1]
            );
        }
    }
    Ok(())
}
