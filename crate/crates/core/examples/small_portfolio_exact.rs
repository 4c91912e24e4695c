//! Small portfolios, where the loss given the factor is far from normal:
//! normal and Hermite prices against exact enumeration.

use gauss_tranche::{exact_price, price_tranche, PricerConfig, Preset, Tranche};

fn main() -> gauss_tranche::Result<()> {
    let base = Preset::Paper25.portfolio();
    let equity = Tranche::base(0.03)?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>9}", "n", "exact", "gaussian", "err", "hermite5", "err");
    for n in [4, 6, 8, 10, 12, 15, 18] {
        let p = base.truncated(n)?;
        let exact = exact_price(&p, equity, 64)?;
        let g = price_tranche(&p, equity, &PricerConfig::gaussian())?.value;
        let h = price_tranche(&p, equity, &PricerConfig::hermite(5))?.value;
        println!(
            "{n:>3} {exact:>9.5} {g:>9.5} {:>9.5} {h:>9.5} {:>9.5}",
            g - exact,
            h - exact
        );
    }
    Ok(())
}
