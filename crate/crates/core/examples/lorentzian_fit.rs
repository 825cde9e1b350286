//! Recovering centre, width and peak from noisy Lorentzian samples.

use cavity_vdw::modecoupling::{fit_lorentzian, lorentzian_profile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cavity_vdw::Result<()> {
    let (w0, gamma, peak) = (3.0e15, 6.0e11, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<(f64, f64)> = (-40..=40)
        .map(|i| {
            let w = w0 + i as f64 * 0.1 * gamma;
            let y = lorentzian_profile(peak, w0, gamma, w) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0));
            (w, y)
        })
        .collect();
    let fit = fit_lorentzian(&samples)?;
    println!("centre {:.9e} (true {w0:.9e})", fit.omega_nu);
    println!("width  {:.6e} (true {gamma:.6e})", fit.gamma_nu);
    println!("peak   {:.6} (true {peak})", fit.peak);
    println!("{} iterations, residual {:.3e}", fit.iterations, fit.residual_norm);
    Ok(())
}
