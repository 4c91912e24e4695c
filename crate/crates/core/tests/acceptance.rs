//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use gauss_tranche::oracles::mc_price_tranches;
use gauss_tranche::{
    conditional_default_prob, conditional_loss_pmf, exact_price, inner_gaussian, inner_hermite, mc_price,
    price_base_curve, price_tranche, ConditionalLossStats, FactorGrid, McConfig, Portfolio, PricerConfig,
    Preset, QuadratureRule, Tranche,
};

use common::{charlier_from_pmf, random_portfolio, random_portfolio_pd, tranche_against_density, Rng};

type Outcome = Result<Vec<String>, Vec<String>>;
type Check = fn() -> Outcome;

const BASE_DETACHMENTS: [f64; 4] = [0.03, 0.07, 0.10, 0.15];
const MC_SEED: u64 = 1;
const MC_SAMPLES: usize = 1_000_000;

fn verdict(ok: bool, lines: Vec<String>) -> Outcome {
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn base_curve_against_monte_carlo() -> Outcome {
    let portfolio = Preset::Paper125.portfolio();
    let started = Instant::now();
    let analytic = price_base_curve(&portfolio, &BASE_DETACHMENTS, &PricerConfig::gaussian()).unwrap();
    let analytic_time = started.elapsed();
    let tranches: Vec<Tranche> = BASE_DETACHMENTS.iter().map(|&d| Tranche::base(d).unwrap()).collect();
    let started = Instant::now();
    let mc = mc_price_tranches(&portfolio, &tranches, &McConfig::new(MC_SAMPLES, MC_SEED)).unwrap();
    let mc_time = started.elapsed();

    let mut ok = analytic_time < Duration::from_millis(100) && mc_time < Duration::from_secs(30);
    let mut lines = vec![format!("semi-analytic {} (< 0.1s), mc {} (< 30s)", secs(analytic_time), secs(mc_time))];
    for ((d, a), m) in BASE_DETACHMENTS.iter().zip(&analytic).zip(&mc) {
        let z = (a.value - m.estimate) / m.std_error;
        ok &= z.abs() <= 3.0;
        lines.push(format!(
            "(0, {d}): gaussian {:.6}  mc {:.6} ± {:.6}  z = {z:+.2}",
            a.value, m.estimate, m.std_error
        ));
    }
    verdict(ok, lines)
}

fn equity_hermite_against_monte_carlo() -> Outcome {
    let equity = Tranche::base(0.03).unwrap();
    let presets = [Preset::Paper25, Preset::Paper30, Preset::Paper50, Preset::Paper100];
    let mut analytic_time = Duration::ZERO;
    let mut ok = true;
    let mut lines = Vec::new();
    for preset in presets {
        let portfolio = preset.portfolio();
        let started = Instant::now();
        let h = price_tranche(&portfolio, equity, &PricerConfig::hermite(5)).unwrap();
        analytic_time += started.elapsed();
        let m = mc_price(&portfolio, equity, &McConfig::new(MC_SAMPLES, MC_SEED)).unwrap();
        let z = (h.value - m.estimate) / m.std_error;
        ok &= z.abs() <= 3.0;
        lines.push(format!(
            "{preset}: hermite-5 {:.6}  mc {:.6} ± {:.6}  z = {z:+.2}",
            h.value, m.estimate, m.std_error
        ));
    }
    ok &= analytic_time < Duration::from_secs(1);
    lines.insert(0, format!("semi-analytic total {} (< 1s)", secs(analytic_time)));
    verdict(ok, lines)
}

fn hermite_beats_gaussian_on_small_portfolios() -> Outcome {
    let started = Instant::now();
    let base = Preset::Paper25.portfolio();
    let equity = Tranche::base(0.03).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for n in [8, 10, 12, 15] {
        let p = base.truncated(n).unwrap();
        let exact = exact_price(&p, equity, 64).unwrap();
        let g = price_tranche(&p, equity, &PricerConfig::gaussian()).unwrap().value;
        let h = price_tranche(&p, equity, &PricerConfig::hermite(5)).unwrap().value;
        let (eg, eh) = ((g - exact).abs(), (h - exact).abs());
        ok &= eh <= eg;
        lines.push(format!(
            "n={n:2}: exact {exact:.6}  |gaussian - exact| {eg:.6}  |hermite - exact| {eh:.6}"
        ));
    }
    let elapsed = started.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    lines.insert(0, format!("runtime {} (< 5s)", secs(elapsed)));
    verdict(ok, lines)
}

fn law_of_total_probability() -> Outcome {
    let rule = QuadratureRule::gauss_hermite(64).unwrap();
    let grid = FactorGrid::tensor(&rule, 1).unwrap();
    let mut worst: f64 = 0.0;
    let mut loans = 0;
    for preset in Preset::ALL {
        for loan in preset.portfolio().loans() {
            let avg: f64 = grid.iter().map(|(x, w)| w * conditional_default_prob(loan, x)).sum();
            worst = worst.max((avg - loan.default_prob()).abs());
            loans += 1;
        }
    }
    verdict(
        worst <= 1e-8,
        vec![format!("{loans} loans, max |E[p(φ)] - p| = {worst:.2e} (tolerance 1e-8)")],
    )
}

fn coefficient_identities() -> Outcome {
    let rule = QuadratureRule::gauss_hermite(64).unwrap();
    let mut ok = true;
    let mut worst_low: f64 = 0.0;
    let mut points = 0;
    let mut degenerate = 0;
    for preset in Preset::ALL {
        let portfolio = preset.portfolio();
        for &x in rule.nodes() {
            let stats = ConditionalLossStats::compute(&portfolio, &[x], 10).unwrap();
            points += 1;
            match stats.charlier {
                Some(c) => {
                    ok &= c[0] == 1.0;
                    worst_low = worst_low.max(c[1].abs()).max(c[2].abs());
                }
                None => degenerate += 1,
            }
        }
    }
    ok &= worst_low <= 1e-12;

    // Above |c| = 1 the bound is applied relative to |c|: an absolute 1e-12
    // is finer than the f64 spacing of coefficients in the thousands.
    let mut worst_match: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut cases = 0;
    let mut portfolios: Vec<Portfolio> = [4, 8, 12].iter().map(|&n| Preset::Paper25.portfolio().truncated(n).unwrap()).collect();
    let mut rng = Rng::new(99);
    portfolios.extend([6, 12].iter().map(|&n| random_portfolio(&mut rng, n)));
    let phis = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
    for p in &portfolios {
        for phi in phis {
            let pmf = conditional_loss_pmf(p, &[phi]).unwrap();
            let want = charlier_from_pmf(&pmf, 6);
            let got = ConditionalLossStats::compute(p, &[phi], 6).unwrap().charlier.unwrap();
            for k in 0..=6 {
                let err = (got[k] - want[k]).abs();
                worst_abs = worst_abs.max(err);
                worst_match = worst_match.max(err / want[k].abs().max(1.0));
            }
            cases += 1;
        }
    }
    ok &= worst_match <= 1e-12;
    verdict(
        ok,
        vec![
            format!(
                "{points} grid points ({degenerate} with zero variance): c0 = 1, max |c1|,|c2| = {worst_low:.2e} (tolerance 1e-12)"
            ),
            format!(
                "{cases} enumerated cases, n <= 6: max |c_n - E[He_n]/n!| / max(1, |c_n|) = {worst_match:.2e} (tolerance 1e-12; absolute {worst_abs:.2e})"
            ),
        ],
    )
}

fn closed_form_inner_integrals() -> Outcome {
    let mut rng = Rng::new(4242);
    let (mut worst_g, mut worst_h, mut worst_same): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..200 {
        let a = rng.uniform(0.0, 0.4);
        let b = (a + rng.uniform(0.005, 0.4)).min(1.0);
        let t = Tranche::new(a, b).unwrap();
        let mean = rng.uniform(0.0, 0.5);
        let sd = rng.uniform(0.003, 0.2);
        let order = 3 + (rng.next_u64() % 8) as usize;
        let mut c = vec![1.0, 0.0, 0.0];
        for _ in 3..=order {
            c.push(rng.uniform(-0.5, 0.5));
        }
        let g = inner_gaussian(&t, mean, sd);
        worst_g = worst_g.max((g - tranche_against_density(&t, mean, sd, &[1.0])).abs());
        let h = inner_hermite(&t, mean, sd, &c).unwrap();
        worst_h = worst_h.max((h - tranche_against_density(&t, mean, sd, &c)).abs());
        let mut plain = vec![0.0; order + 1];
        plain[0] = 1.0;
        worst_same = worst_same.max((inner_hermite(&t, mean, sd, &plain).unwrap() - g).abs());
    }
    verdict(
        worst_g <= 1e-10 && worst_h <= 1e-10 && worst_same <= 1e-12,
        vec![
            format!("gaussian vs adaptive quadrature: max error {worst_g:.2e} (tolerance 1e-10)"),
            format!("hermite vs adaptive quadrature: max error {worst_h:.2e} (tolerance 1e-10)"),
            format!("hermite with c = (1, 0, ...) vs gaussian: max difference {worst_same:.2e} (tolerance 1e-12)"),
        ],
    )
}

fn quadrature_exactness() -> Outcome {
    let mut ok = true;
    let mut worst_moment: f64 = 0.0;
    for k in [2usize, 4, 8, 16] {
        let rule = QuadratureRule::gauss_hermite(k).unwrap();
        let mut moment = 1.0;
        for j in 0..2 * k {
            if j >= 2 && j % 2 == 0 {
                moment *= (j - 1) as f64;
            }
            let got = rule.integrate(|x| x.powi(j as i32));
            let err = if j % 2 == 0 {
                (got - moment).abs() / moment
            } else {
                got.abs() / rule.integrate(|x| x.abs().powi(j as i32))
            };
            worst_moment = worst_moment.max(err);
        }
    }
    ok &= worst_moment <= 1e-10;
    let mut lines = vec![format!(
        "moments up to degree 2K-1, K in {{2,4,8,16}}: max relative error {worst_moment:.2e} (tolerance 1e-10)"
    )];

    let mut ds = BASE_DETACHMENTS.to_vec();
    ds.push(1.0);
    for preset in Preset::ALL {
        let portfolio = preset.portfolio();
        for order in [1, 5] {
            let coarse = price_base_curve(&portfolio, &ds, &PricerConfig::hermite(order).with_nodes(64)).unwrap();
            let fine = price_base_curve(&portfolio, &ds, &PricerConfig::hermite(order).with_nodes(128)).unwrap();
            let moves: Vec<f64> = coarse.iter().zip(&fine).map(|(a, b)| (a.value - b.value).abs()).collect();
            let worst = moves.iter().cloned().fold(0.0, f64::max);
            ok &= worst <= 1e-8;
            let detail: Vec<String> = moves.iter().map(|m| format!("{m:.1e}")).collect();
            lines.push(format!(
                "{preset} N={order}: |K=64 - K=128| = [{}] (tolerance 1e-8)",
                detail.join(", ")
            ));
        }
    }
    verdict(ok, lines)
}

fn exact_against_monte_carlo() -> Outcome {
    let equity = Tranche::base(0.03).unwrap();
    let mut cases: Vec<(String, Portfolio)> = vec![("paper25[..10]".into(), Preset::Paper25.portfolio().truncated(10).unwrap())];
    let mut rng = Rng::new(2718);
    for i in 0..2 {
        cases.push((format!("random #{i}"), random_portfolio_pd(&mut rng, 10, 0.005, 0.08)));
    }
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, p) in &cases {
        let e = exact_price(p, equity, 64).unwrap();
        let m = mc_price(p, equity, &McConfig::new(MC_SAMPLES, MC_SEED)).unwrap();
        let z = (e - m.estimate) / m.std_error;
        ok &= z.abs() <= 3.0;
        lines.push(format!("{name}: exact {e:.6}  mc {:.6} ± {:.6}  z = {z:+.2}", m.estimate, m.std_error));
    }
    verdict(ok, lines)
}

fn cli_determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["price", "--preset", "paper125", "--detach", "0.03,0.07,0.10,0.15", "--method", "mc", "--samples", "100000", "--seed", "1"],
        &["price", "--preset", "paper50", "--detach", "0.03", "--method", "mc", "--samples", "100000", "--seed", "3", "--antithetic"],
        &["price", "--preset", "paper100", "--detach", "0.03,0.07", "--order", "5"],
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for args in runs {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let out = Command::new(env!("CARGO_BIN_EXE_gauss-tranche")).args(args).output().unwrap();
                assert!(out.status.success());
                out.stdout
            })
            .collect();
        let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
        ok &= same;
        lines.push(format!("{}: {}", args.join(" "), if same { "identical" } else { "DIFFERENT" }));
    }
    verdict(ok, lines)
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("base-curve reproduction (paper125, gaussian vs mc)", base_curve_against_monte_carlo),
        ("equity reproduction (hermite N=5 vs mc)", equity_hermite_against_monte_carlo),
        ("small-portfolio superiority (hermite vs gaussian)", hermite_beats_gaussian_on_small_portfolios),
        ("law of total probability", law_of_total_probability),
        ("coefficient identities", coefficient_identities),
        ("closed-form inner integrals", closed_form_inner_integrals),
        ("quadrature exactness and convergence", quadrature_exactness),
        ("cross-oracle agreement (exact vs mc, n=10)", exact_against_monte_carlo),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (tag, lines) = match check() {
            Ok(lines) => ("PASS", lines),
            Err(lines) => {
                failed += 1;
                ("FAIL", lines)
            }
        };
        println!("{tag} {name}");
        for l in lines {
            println!("     {l}");
        }
    }
    println!("\n{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
