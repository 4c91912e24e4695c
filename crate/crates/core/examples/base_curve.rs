//! Base-tranche loss curve of the 125-name portfolio: normal approximation
//! against Monte Carlo.
//!
//! ```text
//! cargo run --release --example base_curve [samples]
//! ```

use gauss_tranche::oracles::mc_price_tranches;
use gauss_tranche::{price_base_curve, McConfig, PricerConfig, Preset, Tranche};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200_000);
    let portfolio = Preset::Paper125.portfolio();
    let detachments = [0.03, 0.07, 0.10, 0.15];

    let analytic = price_base_curve(&portfolio, &detachments, &PricerConfig::gaussian())?;
    let tranches: Vec<Tranche> = detachments.iter().map(|&d| Tranche::base(d)).collect::<Result<_, _>>()?;
    let mc = mc_price_tranches(&portfolio, &tranches, &McConfig::new(samples, 1))?;

    println!("{} loans, expected loss {:.5}", portfolio.len(), portfolio.expected_loss());
    println!("{:>8} {:>10} {:>10} {:>9} {:>7}", "detach", "gaussian", "mc", "std err", "z");
    for ((d, a), m) in detachments.iter().zip(&analytic).zip(&mc) {
        println!(
            "{d:>8.2} {:>10.6} {:>10.6} {:>9.6} {:>7.2}",
            a.value,
            m.estimate,
            m.std_error,
            (a.value - m.estimate) / m.std_error
        );
    }
    println!(
        "semi-analytic: {} grid points in {:.2?}",
        analytic[0].diagnostics.grid_points, analytic[0].diagnostics.wall_time
    );
    Ok(())
}
