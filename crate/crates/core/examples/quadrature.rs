//! Gauss-Hermite rules: nodes and weights, moment exactness, and how the
//! price of the 125-name base curve settles as nodes are added.

use gauss_tranche::{price_base_curve, PricerConfig, Preset, QuadratureRule};

fn main() -> gauss_tranche::Result<()> {
    let rule = QuadratureRule::gauss_hermite(6)?;
    println!("6-point rule");
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        println!("  {x:>20.16} {w:>20.16e}");
    }

    println!("\nE[Z^j] with 8 nodes (exact through j = 15)");
    let rule = QuadratureRule::gauss_hermite(8)?;
    for j in (0..=18).step_by(2) {
        println!("  j = {j:>2}: {:.10e}", rule.integrate(|x| x.powi(j)));
    }

    println!("\nbase curve of paper125 (N = 1) by node count");
    let portfolio = Preset::Paper125.portfolio();
    let ds = [0.03, 0.07, 0.10, 0.15];
    for k in [16, 32, 64, 128, 256] {
        let curve = price_base_curve(&portfolio, &ds, &PricerConfig::gaussian().with_nodes(k))?;
        let values: Vec<String> = curve.iter().map(|r| format!("{:.10}", r.value)).collect();
        println!("  K = {k:>3}: {}", values.join("  "));
    }
    Ok(())
}
