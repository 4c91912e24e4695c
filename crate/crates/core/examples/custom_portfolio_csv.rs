//! A two-factor portfolio written to CSV, read back, and priced with every
//! engine.

use gauss_tranche::io::{read_portfolio_file, write_portfolio};
use gauss_tranche::oracles::{exact_price_tranches, mc_price_tranches};
use gauss_tranche::{price_tranches, LoanRecord, McConfig, Portfolio, PricerConfig, Tranche, ValidationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two sectors of six loans each; each sector loads mostly on its own factor.
    let records: Vec<LoanRecord> = (0..12)
        .map(|i| {
            let (own, other) = (0.5, 0.2);
            let loadings = if i < 6 { vec![own, other] } else { vec![other, own] };
            LoanRecord::new(format!("loan_{i}"), 1.0 / 12.0, 0.02 + 0.005 * i as f64, 0.4, loadings)
        })
        .collect();
    let portfolio = Portfolio::new(records, 2)?;

    let path = std::env::temp_dir().join("gauss_tranche_two_sector.csv");
    write_portfolio(&portfolio, std::fs::File::create(&path)?)?;
    let portfolio = read_portfolio_file(&path, ValidationOptions::default())?;
    println!("read {} loans with {} factors from {}", portfolio.len(), portfolio.factors(), path.display());

    let tranches = [Tranche::new(0.0, 0.05)?, Tranche::new(0.05, 0.15)?, Tranche::new(0.15, 0.4)?];
    let cfg = |order| PricerConfig::hermite(order).with_nodes(32);
    let gaussian = price_tranches(&portfolio, &tranches, &cfg(1))?;
    let hermite = price_tranches(&portfolio, &tranches, &cfg(5))?;
    let exact = exact_price_tranches(&portfolio, &tranches, 32)?;
    let mc = mc_price_tranches(&portfolio, &tranches, &McConfig::new(200_000, 11))?;

    println!("{:>12} {:>9} {:>9} {:>9} {:>18}", "tranche", "gaussian", "hermite5", "exact", "mc");
    for (i, t) in tranches.iter().enumerate() {
        println!(
            "{:>12} {:>9.5} {:>9.5} {:>9.5} {:>9.5} ± {:.5}",
            format!("{}-{}", t.attach(), t.detach()),
            gaussian[i].value,
            hermite[i].value,
            exact[i],
            mc[i].estimate,
            mc[i].std_error
        );
    }
    println!("grid: {} points", gaussian[0].diagnostics.grid_points);
    std::fs::remove_file(&path)?;
    Ok(())
}
