//! Scan the periodogram-type function of a two-chirp record and list the
//! strongest peaks.

use chirpfit::periodogram::top_peaks;
use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let n = 120;
    let model = ChirpModel::new(vec![ChirpComponent::new(7.0, 0.0, 1.0), ChirpComponent::new(5.0, 0.0, 0.5)])?;
    let y = add(&synthesize_clean(&model, n)?, &generate_noise(&NoiseSpec::iid(1.0, 7), n)?)?;

    let grid = GridSpec::ptf(n)?;
    let s = scan(&y, &grid, &Kernel::Ptf)?;
    println!("{} grid points, cell {:.3e}", s.len(), grid.cell());

    let peaks = top_peaks(&s, 4, chirpfit::periodogram::default_min_separation(n))?;
    for (beta, value) in peaks.locations.iter().zip(&peaks.magnitudes) {
        println!("beta {beta:.6}  I {value:.1}");
    }
    Ok(())
}
