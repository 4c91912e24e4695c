//! The loss distribution at one factor value: cumulants, Gram-Charlier
//! coefficients and the truncated distribution function against the exact one.

use gauss_tranche::conditional::truncated_cdf;
use gauss_tranche::{conditional_default_prob, conditional_loss_pmf, ConditionalLossStats, LoanRecord, Portfolio};

fn main() -> gauss_tranche::Result<()> {
    // Twelve identical loans, so the exact loss lives on a lattice of 13 points.
    let records = (0..12)
        .map(|i| LoanRecord::new(format!("loan_{i}"), 1.0 / 12.0, 0.03, 0.4, vec![0.45]))
        .collect();
    let portfolio = Portfolio::new(records, 1)?;
    let phi = [-1.0];

    let first = &portfolio.loans()[0];
    println!(
        "loan {}: p = {}, p(φ = {}) = {:.6}",
        first.id(),
        first.default_prob(),
        phi[0],
        conditional_default_prob(first, &phi)
    );

    let stats = ConditionalLossStats::compute(&portfolio, &phi, 8)?;
    println!("mean {:.6}, sd {:.6}", stats.mean, stats.sd());
    let c = stats.charlier.clone().expect("positive variance");
    for (n, (k, cn)) in stats.cumulants.iter().zip(&c[1..]).enumerate() {
        println!("  κ{} = {k:>13.6e}   c{} = {cn:>11.6}", n + 1, n + 1);
    }

    let pmf = conditional_loss_pmf(&portfolio, &phi)?;
    println!("\n{:>9} {:>8} {:>8} {:>8} {:>8}", "defaults", "exact", "N=1", "N=4", "N=8");
    let mut below = 0.0;
    for (i, &(loss, p)) in pmf.iter().enumerate().take(7) {
        below += p;
        // Evaluate between atoms, where the step cdf is flat.
        let next = pmf.get(i + 1).map_or(loss + 0.01, |a| a.0);
        let x = (0.5 * (loss + next) - stats.mean) / stats.sd();
        println!(
            "{i:>9} {below:>8.5} {:>8.5} {:>8.5} {:>8.5}",
            truncated_cdf(x, &c[..2]),
            truncated_cdf(x, &c[..5]),
            truncated_cdf(x, &c)
        );
    }
    Ok(())
}
