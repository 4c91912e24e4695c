//! Equity-tranche price of the small presets as the expansion order grows,
//! with a Monte Carlo reference.

use gauss_tranche::{mc_price, price_tranche, McConfig, PricerConfig, Preset, Tranche};

fn main() -> gauss_tranche::Result<()> {
    let equity = Tranche::base(0.03)?;
    let orders = [1, 3, 4, 5, 6, 8, 10];

    print!("{:>9}", "preset");
    for n in orders {
        print!(" {:>8}", format!("N={n}"));
    }
    println!(" {:>17}", "mc (200k)");

    for preset in [Preset::Paper25, Preset::Paper30, Preset::Paper50, Preset::Paper100] {
        let portfolio = preset.portfolio();
        print!("{:>9}", preset.name());
        for n in orders {
            let v = price_tranche(&portfolio, equity, &PricerConfig::hermite(n))?.value;
            print!(" {v:>8.5}");
        }
        let mc = mc_price(&portfolio, equity, &McConfig::new(200_000, 7))?;
        println!(" {:>8.5} ± {:.5}", mc.estimate, mc.std_error);
    }
    Ok(())
}
