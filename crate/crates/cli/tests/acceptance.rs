//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! fails if any criterion fails.

use std::process::Command;
use std::time::Instant;

use robust_ancova::distributions::chisq_cdf;
use robust_ancova::hypotheses::{nested_projection, twoway_projection};
use robust_ancova::rng::{derive_seed, CounterRng, StreamRole};
use robust_ancova::simulation::{ScenarioDesign, SimulationReport};
use robust_ancova::{
    contrast_to_projection, equal_means_contrast, fit_ols, oneway_projection, run_power_study, run_type1_study,
    sandwich, white_test, wild_bootstrap_test, BootstrapConfig, CrossedEffect, Dataset, ErrorDistribution, HcFlavor,
    HypothesisSpec, Matrix, NestedEffect, Scale, SimulationScenario, VarianceScenario, Vector,
};

const SEED: u64 = 0;
const N1: [usize; 4] = [40, 40, 40, 40];
const N2: [usize; 4] = [15, 15, 15, 15];
const N3: [usize; 4] = [5, 5, 5, 5];
const N4: [usize; 4] = [5, 10, 20, 25];
const N5: [usize; 4] = [25, 20, 10, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn desk(sizes: &[usize], dist: ErrorDistribution, var: VarianceScenario, flavor: HcFlavor) -> SimulationReport {
    let scenario = SimulationScenario::null(sizes, dist, var, flavor, Scale::Desk, SEED);
    run_type1_study(&scenario).expect("study runs")
}

/// Checks `observed` (a rate) against `expected` (percent) within `tol` points.
fn cell(name: &str, observed: f64, expected: f64, tol: f64, detail: &mut Vec<String>) -> bool {
    let pct = 100.0 * observed;
    let ok = (pct - expected).abs() <= tol;
    detail.push(format!("{name} {pct:.2}% (ref {expected}){}", if ok { "" } else { " OUT" }));
    ok
}

struct Cells {
    i_n1: SimulationReport,
    i_n3: SimulationReport,
    ii_n5: SimulationReport,
    ii_n4: SimulationReport,
}

fn criterion_reference_cells(cells: &Cells) -> Outcome {
    let mut d = Vec::new();
    let mut ok = true;
    ok &= cell("I/n1 F", cells.i_n1.f_test.rate, 4.9, 1.8, &mut d);
    ok &= cell("I/n1 White", cells.i_n1.white.rate, 6.4, 1.8, &mut d);
    ok &= cell("I/n1 WB", cells.i_n1.wild_bootstrap.rate, 5.2, 1.8, &mut d);
    ok &= cell("I/n3 White", cells.i_n3.white.rate, 19.6, 1.8, &mut d);
    ok &= cell("I/n3 WB", cells.i_n3.wild_bootstrap.rate, 6.9, 1.8, &mut d);
    ok &= cell("II/n5 F", cells.ii_n5.f_test.rate, 10.0, 1.8, &mut d);
    ok &= cell("II/n5 WB", cells.ii_n5.wild_bootstrap.rate, 5.0, 1.8, &mut d);
    ok &= cell("II/n4 F", cells.ii_n4.f_test.rate, 3.3, 1.8, &mut d);
    ok &= cell("II/n4 WB", cells.ii_n4.wild_bootstrap.rate, 5.2, 1.8, &mut d);
    let logn = desk(&N2, ErrorDistribution::Lognormal, VarianceScenario::I, HcFlavor::HC2);
    ok &= cell("I/n2 lognormal WB", logn.wild_bootstrap.rate, 3.5, 1.8, &mut d);
    Outcome { pass: ok, detail: d.join("; ") }
}

fn criterion_hc0_liberality(cells: &Cells) -> Outcome {
    let mut d = Vec::new();
    let hc0 = desk(&N3, ErrorDistribution::StandardNormal, VarianceScenario::I, HcFlavor::HC0);
    let mut ok = cell("I/n3 White-HC0", hc0.white.rate, 31.9, 2.5, &mut d);
    ok &= cell("I/n3 White-HC2", cells.i_n3.white.rate, 19.6, 2.5, &mut d);
    let pairs = [
        ("I/n3", hc0.white.rate, cells.i_n3.white.rate),
        (
            "II/n4",
            desk(&N4, ErrorDistribution::StandardNormal, VarianceScenario::II, HcFlavor::HC0).white.rate,
            cells.ii_n4.white.rate,
        ),
        (
            "II/n5",
            desk(&N5, ErrorDistribution::StandardNormal, VarianceScenario::II, HcFlavor::HC0).white.rate,
            cells.ii_n5.white.rate,
        ),
    ];
    for (name, r0, r2) in pairs {
        let ordered = r0 > r2;
        ok &= ordered;
        d.push(format!("{name} HC0 {:.2}% {} HC2 {:.2}%", 100.0 * r0, if ordered { ">" } else { "<=" }, 100.0 * r2));
    }
    Outcome { pass: ok, detail: d.join("; ") }
}

fn criterion_chisq_errors() -> Outcome {
    let mut d = Vec::new();
    let r = desk(&N5, ErrorDistribution::ChiSquared5, VarianceScenario::II, HcFlavor::HC2);
    let mut ok = cell("F", r.f_test.rate, 10.0, 1.8, &mut d);
    ok &= cell("White", r.white.rate, 9.6, 1.8, &mut d);
    ok &= cell("WB", r.wild_bootstrap.rate, 5.0, 1.8, &mut d);
    Outcome { pass: ok, detail: d.join("; ") }
}

/// Nondecreasing least-squares fit by pool-adjacent-violators.
fn isotonic(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            blocks.push(((m1 * n1 as f64 + m2 * n2 as f64) / (n1 + n2) as f64, n1 + n2));
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

fn criterion_power() -> Outcome {
    let base = SimulationScenario::null(
        &[15, 15],
        ErrorDistribution::StandardNormal,
        VarianceScenario::Custom(vec![1.0, 1.0]),
        HcFlavor::HC2,
        Scale::Desk,
        SEED,
    );
    let deltas: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let points = run_power_study(&deltas, &base).expect("power study runs");
    let mut ok = true;
    let mut d = Vec::new();
    let alpha = base.alpha;
    let null_se = (alpha * (1.0 - alpha) / base.n_sim as f64).sqrt();
    for (name, p) in [("F", points[0].power_f.rate), ("WB", points[0].power_wb.rate)] {
        let good = (p - alpha).abs() <= 3.0 * null_se;
        ok &= good;
        d.push(format!("size {name} {:.2}%{}", 100.0 * p, if good { "" } else { " OUT" }));
    }
    for (name, rates) in [
        ("F", points.iter().map(|p| p.power_f).collect::<Vec<_>>()),
        ("WB", points.iter().map(|p| p.power_wb).collect::<Vec<_>>()),
    ] {
        let y: Vec<f64> = rates.iter().map(|r| r.rate).collect();
        let fit = isotonic(&y);
        let worst = rates
            .iter()
            .zip(&fit)
            .map(|(r, f)| (r.rate - f).abs() / r.monte_carlo_se.max(null_se))
            .fold(0.0, f64::max);
        ok &= worst <= 3.0;
        d.push(format!("isotonic residual {name} {worst:.2} SE"));
    }
    let gap = points.iter().map(|p| p.power_f.rate - p.power_wb.rate).fold(f64::NEG_INFINITY, f64::max);
    ok &= gap <= 0.09;
    d.push(format!("max F-WB gap {gap:.4}"));
    let curve: Vec<String> =
        points.iter().map(|p| format!("{}:{:.3}/{:.3}", p.delta, p.power_f.rate, p.power_wb.rate)).collect();
    d.push(format!("curve {}", curve.join(" ")));
    Outcome { pass: ok, detail: d.join("; ") }
}

fn ks_distance(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.total_cmp(b));
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn two_group_scenario(n: usize, seed: u64) -> SimulationScenario {
    SimulationScenario {
        coefficients: vec![-0.5],
        n_sim: 1,
        n_boot: 1,
        ..SimulationScenario::null(
            &[n, n],
            ErrorDistribution::StandardNormal,
            VarianceScenario::I,
            HcFlavor::HC0,
            Scale::Desk,
            seed,
        )
    }
}

fn criterion_chisq_limit() -> Outcome {
    let scenario = two_group_scenario(1000, SEED);
    let design = ScenarioDesign::new(&scenario).unwrap();
    let hyp = equal_means_contrast(2, 1).unwrap();
    let stats: Vec<f64> = (0..2000u64)
        .map(|k| {
            let mut rng = CounterRng::new(derive_seed(SEED, k, StreamRole::Errors), 0);
            let fit = fit_ols(&design.generate(&mut rng).unwrap()).unwrap();
            white_test(&fit, &hyp, HcFlavor::HC0).unwrap().statistic
        })
        .collect();
    let d = ks_distance(stats, |x| chisq_cdf(x, 1));
    Outcome { pass: d <= 0.05, detail: format!("KS distance {d:.4} over 2000 replicates, N = 2000") }
}

fn criterion_bootstrap_uniformity() -> Outcome {
    let scenario = two_group_scenario(30, SEED);
    let design = ScenarioDesign::new(&scenario).unwrap();
    let hyp = equal_means_contrast(2, 1).unwrap();
    let pvalues: Vec<f64> = (0..500u64)
        .map(|k| {
            let mut rng = CounterRng::new(derive_seed(SEED, k, StreamRole::Errors), 0);
            let fit = fit_ols(&design.generate(&mut rng).unwrap()).unwrap();
            let cfg = BootstrapConfig::new(499, HcFlavor::HC2, derive_seed(SEED, k, StreamRole::Bootstrap));
            wild_bootstrap_test(&fit, &hyp, &cfg).unwrap().p_value
        })
        .collect();
    let d = ks_distance(pvalues, |p| p.clamp(0.0, 1.0));
    Outcome { pass: d <= 0.08, detail: format!("KS distance {d:.4} over 500 datasets, B = 499") }
}

fn random_dataset(rng: &mut CounterRng) -> Dataset<f64> {
    let a = 2 + (rng.next_u64() % 4) as usize;
    let r = (rng.next_u64() % 3) as usize;
    let groups: Vec<usize> = (1..=a).flat_map(|g| std::iter::repeat_n(g, 3 + (rng.next_u64() % 8) as usize)).collect();
    let n = groups.len();
    let y: Vec<f64> = (0..n).map(|_| rng.standard_normal() * (1.0 + 3.0 * rng.uniform_open())).collect();
    let z: Vec<f64> = (0..n * r).map(|_| 4.0 * rng.uniform_open() - 2.0).collect();
    Dataset::new(Vector::from_vec(y).unwrap(), groups, Matrix::from_row_major(n, r, z).unwrap()).unwrap()
}

fn projection_defects(spec: &HypothesisSpec<f64>) -> (f64, f64) {
    let t = spec.matrix();
    (t.matmul(t).unwrap().max_abs_diff(t), t.max_asymmetry())
}

fn criterion_oracles() -> Outcome {
    let mut rng = CounterRng::new(SEED, 99);
    let mut sandwich_err: f64 = 0.0;
    let mut form_err: f64 = 0.0;
    for _ in 0..100 {
        let data = random_dataset(&mut rng);
        let fit = fit_ols(&data).unwrap();
        let x = fit.design();
        let g = fit.gram_inverse();
        let w: Vec<f64> = fit.residuals().iter().map(|u| u * u).collect();
        let meat = x.transpose().matmul(&Matrix::diagonal(&w)).unwrap().matmul(x).unwrap();
        let brute = g.matmul(&meat).unwrap().matmul(g).unwrap().scale(fit.n_total() as f64);
        sandwich_err = sandwich_err.max(sandwich(&fit, HcFlavor::HC0).unwrap().matrix.max_abs_diff(&brute));
        let (a, r) = (data.n_groups(), data.n_covariates());
        let h = equal_means_contrast(a, r).unwrap();
        let t = oneway_projection(a, r).unwrap();
        for flavor in [HcFlavor::HC0, HcFlavor::HC2] {
            let s1 = white_test(&fit, &h, flavor).unwrap().statistic;
            let s2 = white_test(&fit, &t, flavor).unwrap().statistic;
            form_err = form_err.max((s1 - s2).abs() / s1.abs().max(s2.abs()));
        }
    }
    let mut conversion_err: f64 = 0.0;
    let mut projections = Vec::new();
    for a in 2..8 {
        for r in 0..3 {
            let converted = contrast_to_projection(&equal_means_contrast::<f64>(a, r).unwrap()).unwrap();
            let direct = oneway_projection(a, r).unwrap();
            conversion_err = conversion_err.max(converted.matrix().max_abs_diff(direct.matrix()));
            projections.push(converted);
            projections.push(direct);
        }
    }
    for (b, c) in [(2, 2), (2, 3), (3, 4), (4, 2)] {
        for effect in [CrossedEffect::MainB, CrossedEffect::MainC, CrossedEffect::Interaction] {
            projections.push(twoway_projection(b, c, effect, 2).unwrap());
        }
    }
    for c_per in [vec![2, 2], vec![1, 3], vec![2, 3, 4], vec![3, 1, 1, 2]] {
        for effect in [NestedEffect::Category, NestedEffect::Subcategory] {
            projections.push(nested_projection(c_per.len(), &c_per, effect, 1).unwrap());
        }
    }
    let (mut idem, mut asym): (f64, f64) = (0.0, 0.0);
    for p in &projections {
        let (i, s) = projection_defects(p);
        idem = idem.max(i);
        asym = asym.max(s);
    }
    let pass = sandwich_err <= 1e-10 && form_err <= 1e-8 && conversion_err <= 1e-10 && idem <= 1e-10 && asym <= 1e-10;
    Outcome {
        pass,
        detail: format!(
            "HC0 vs brute force {sandwich_err:.2e}; contrast vs projection {form_err:.2e} rel; \
             converted vs direct {conversion_err:.2e}; {} projections idempotent {idem:.2e}, symmetric {asym:.2e}",
            projections.len()
        ),
    }
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_robust-ancova")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("robust-ancova-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sim = dir.join("simulate.toml");
    std::fs::write(
        &sim,
        "distribution = \"lognormal\"\nvariance_scenario = \"II\"\nn_sim = 150\nn_boot = 99\n\
         [[scenario]]\ngroup_sizes = [5, 10, 20, 25]\n[[scenario]]\ngroup_sizes = [6, 6, 6]\nflavor = \"hc0\"\n",
    )
    .unwrap();
    let pow = dir.join("power.toml");
    std::fs::write(&pow, "deltas = [0.0, 0.7, 1.4]\nn_sim = 120\nn_boot = 99\n").unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, path) in [("simulate", &sim), ("power", &pow)] {
        let path = path.to_str().unwrap();
        let outputs: Vec<Vec<u8>> = ["1", "2", "3", "auto", "1"]
            .iter()
            .map(|t| run_cli(&["--seed", "17", "--threads", t, "--output", "csv", name, path]))
            .collect();
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        detail.push(format!(
            "{name}: {} bytes {} across threads 1, 2, 3, auto, 1",
            outputs[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome { pass, detail: detail.join("; ") }
}

fn main() {
    let start = Instant::now();
    let cells = Cells {
        i_n1: desk(&N1, ErrorDistribution::StandardNormal, VarianceScenario::I, HcFlavor::HC2),
        i_n3: desk(&N3, ErrorDistribution::StandardNormal, VarianceScenario::I, HcFlavor::HC2),
        ii_n5: desk(&N5, ErrorDistribution::StandardNormal, VarianceScenario::II, HcFlavor::HC2),
        ii_n4: desk(&N4, ErrorDistribution::StandardNormal, VarianceScenario::II, HcFlavor::HC2),
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 type-I reference cells, HC2, desk scale, +-1.8 pt", Box::new(|| criterion_reference_cells(&cells))),
        ("2 HC0 vs HC2 White liberality, +-2.5 pt", Box::new(|| criterion_hc0_liberality(&cells))),
        ("3 chi-squared(5) errors, II/n5, +-1.8 pt", Box::new(criterion_chisq_errors)),
        ("4 power curve: size, monotonicity, F-WB gap", Box::new(criterion_power)),
        ("5 White statistic vs chi-squared(1), KS <= 0.05", Box::new(criterion_chisq_limit)),
        ("6 bootstrap p-values vs uniform, KS <= 0.08", Box::new(criterion_bootstrap_uniformity)),
        ("7 oracle equivalences", Box::new(criterion_oracles)),
        ("8 CLI output identical across thread counts", Box::new(criterion_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} [{name}] {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
