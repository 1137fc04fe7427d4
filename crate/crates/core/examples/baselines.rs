//! Dechirping, CPF and PCPF against least squares on one noisy chirp,
//! including the modulo-pi ambiguity of the lag-based methods. At beta = 2
//! the CPF rate 2·beta lies outside the band it can represent; CPF and PCPF
//! land on an alias and say so through `alias_ambiguous`.

use std::time::Instant;

use chirpfit::signal::add;
use chirpfit::*;

fn main() -> Result<()> {
    let n = 201;
    let cfg = SimplexConfig::default();
    let cpf = CpfConfig::default();

    for beta in [0.5, 2.0] {
        let model = ChirpModel::new(vec![ChirpComponent::new(5.0, 0.0, beta)])?;
        let y = add(&synthesize_clean(&model, n)?, &generate_noise(&NoiseSpec::iid(1.0, 1), n)?)?;
        println!("true beta {beta}");

        let t = Instant::now();
        let l = lse_one(&y, Init::Scan, &cfg)?;
        println!("  lse      {:.8}  {:>8.2?}", l.components[0].beta, t.elapsed());

        let t = Instant::now();
        let d = dechirp_estimate(&y, Init::Scan, &cfg)?;
        println!(
            "  dechirp  {:.8}  {:>8.2?}  raw {:.8} ambiguous {}",
            d.beta_resolved,
            t.elapsed(),
            d.beta,
            d.alias_ambiguous
        );

        let t = Instant::now();
        let c = cpf_estimate(&y, &cpf, Init::Scan, &cfg)?;
        println!("  cpf      {:.8}  {:>8.2?}  ambiguous {}", c.beta_resolved, t.elapsed(), c.alias_ambiguous);

        let t = Instant::now();
        let p = pcpf_estimate(&y, &cpf, Init::Scan, &cfg)?;
        println!("  pcpf     {:.8}  {:>8.2?}  ambiguous {}", p.beta_resolved, t.elapsed(), p.alias_ambiguous);
    }
    Ok(())
}
