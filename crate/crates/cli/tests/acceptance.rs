//! Acceptance suite: one line per criterion, then a summary.
//!
//! Runs as a plain binary (`harness = false`) so the lines are printed even
//! when everything passes.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::process::Command;
use std::time::Instant;

use annulus_core::exact::CHI_PRIME_NEGATIVE_FUGACITY;
use annulus_core::exact::{loop_gas_partition, odd_hull_probability, CHI_PRIME_UNIT_FUGACITY};
use annulus_core::mc::{Color, SpanningCounter};
use annulus_core::{
    crossing_probability, distribution, geometry_for, make_modulus, mean_spanning_clusters,
    p_exact, run_trials, Coloring, CrossingForm, LatticeGeometry, Truncation,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn trunc() -> Truncation {
    Truncation::default()
}

fn three_figures(x: f64) -> String {
    format!("{x:.2e}")
}

fn criterion_1() -> Outcome {
    let m = make_modulus(1.0).unwrap();
    let p2 = p_exact(2, &m, &trunc()).unwrap().value;
    let p3 = p_exact(3, &m, &trunc()).unwrap().value;
    let ok = three_figures(p2) == "2.02e-3" && three_figures(p3) == "1.71e-7";
    outcome(ok, format!("P(2) = {p2:.6e}, P(3) = {p3:.6e} at rho = 1"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in [0.2, 0.5, 1.0, 2.0, 5.0] {
        let m = make_modulus(rho).unwrap();
        let values: Vec<f64> = CrossingForm::EXPLICIT
            .iter()
            .map(|&f| crossing_probability(&m, f, &trunc()).unwrap())
            .collect();
        for a in &values {
            for b in &values {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("largest pairwise relative difference {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut p0_ok = true;
    for rho in [0.3, 1.0, 3.0] {
        let m = make_modulus(rho).unwrap();
        let d = distribution(&m, 40, &trunc()).unwrap();
        let crossing = crossing_probability(&m, CrossingForm::Auto, &trunc()).unwrap();
        worst = worst.max((d.spanning_mass() + d.tail_bound - crossing).abs());
        p0_ok &= d.p[0] > 0.0 && d.p[0] < 1.0;
    }
    outcome(
        worst <= 1e-10 && p0_ok,
        format!("|sum P(1..40) + tail - crossing| <= {worst:.2e}, P(0) in (0, 1): {p0_ok}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut raw = Vec::new();
    for rho in [0.3, 1.0, 3.0] {
        let m = make_modulus(rho).unwrap();
        worst = worst.max((odd_hull_probability(&m, &trunc()).unwrap() - 0.5).abs());
        let z = |chi| loop_gas_partition(chi, &m, &trunc()).unwrap();
        raw.push(z(CHI_PRIME_UNIT_FUGACITY) - z(CHI_PRIME_NEGATIVE_FUGACITY));
    }
    outcome(
        worst <= 1e-12,
        format!(
            "odd-hull sum = 0.5 within {worst:.2e}; unhalved partition difference = {:.15}",
            raw[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let rho = 0.05;
    let mean = mean_spanning_clusters(&make_modulus(rho).unwrap(), &trunc()).unwrap();
    let ratio = mean * rho * 4.0 / 3f64.sqrt();
    outcome(
        (0.99..=1.01).contains(&ratio),
        format!("E[N_c] = {mean:.6} at rho = 0.05, ratio {ratio:.6}"),
    )
}

fn exhaustive(rows: usize, width: usize) -> Result<u64, String> {
    let g = LatticeGeometry::new(rows, 2 * width).unwrap();
    let adj = oracle::adjacency(rows, width);
    let mut counter = SpanningCounter::new();
    let mut cases = 0;
    for bits in 0..1u64 << g.sites() {
        let c = Coloring::from_bits(g, bits).unwrap();
        let want = oracle::count(rows, width, &adj, c.cells());
        let got = counter.count(&c, Color::Blue);
        if (got.n_spanning, got.wrap_excluded) != (want.n_spanning, want.wrap_excluded) {
            return Err(format!(
                "{rows}x{width} colouring {bits:#x}: {got:?} vs {want:?}"
            ));
        }
        if want.wrap_excluded && want.all_spanning != 1 {
            return Err(format!(
                "{rows}x{width} colouring {bits:#x}: winding cluster not alone"
            ));
        }
        cases += 1;
    }
    Ok(cases)
}

fn criterion_6() -> Outcome {
    let mut total = 0;
    for (rows, width) in [(3, 4), (4, 4), (4, 6)] {
        match exhaustive(rows, width) {
            Ok(n) => total += n,
            Err(e) => return outcome(false, e),
        }
    }
    outcome(
        true,
        format!("{total} colourings of 3x4, 4x4, 4x6 agree with flood fill"),
    )
}

struct Run {
    freq: f64,
    exact: f64,
    sigma: f64,
}

fn crossing_run(cols: usize, trials: u64, seed: u64) -> (Run, annulus_core::TrialStatistics) {
    let g = geometry_for(1.0, cols).unwrap();
    let stats = run_trials(g, trials, seed, 1).unwrap();
    let m = make_modulus(g.rho_effective()).unwrap();
    let exact = crossing_probability(&m, CrossingForm::Auto, &trunc()).unwrap();
    let n = trials as f64;
    let run = Run {
        freq: stats.spanning_trials() as f64 / n,
        exact,
        sigma: (exact * (1.0 - exact) / n).sqrt(),
    };
    (run, stats)
}

fn criterion_7(run: &Run, stats: &annulus_core::TrialStatistics) -> Outcome {
    let n = stats.trials as f64;
    let g = stats.geometry;
    let crossing_ok = (run.freq - run.exact).abs() <= 4.0 * run.sigma + 0.01;

    let p2 = p_exact(2, &make_modulus(g.rho_effective()).unwrap(), &trunc())
        .unwrap()
        .value;
    let f2 = stats.frequency(2);
    let sigma2 = (p2 * (1.0 - p2) / n).sqrt();
    let p2_ok = (f2 - p2).abs() <= 4.0 * sigma2;

    // diagnostic only: the same data against the edge-extended aspect ratio
    let m_ext = make_modulus(g.rho_extended()).unwrap();
    let ext = crossing_probability(&m_ext, CrossingForm::Auto, &trunc()).unwrap();
    let p2_ext = p_exact(2, &m_ext, &trunc()).unwrap().value;

    outcome(
        crossing_ok && p2_ok,
        format!(
            "{}x{} lattice, rho_eff {:.4}: crossing {:.5} vs {:.5} (|d| = {:.5}, allowed {:.5}) {}; \
             P(2) {:.2e} vs {:.2e} ({:+.1} sigma) {}; at rho_ext {:.4}: crossing {:.5}, P(2) {:.2e}",
            g.rows(),
            g.cols(),
            g.rho_effective(),
            run.freq,
            run.exact,
            (run.freq - run.exact).abs(),
            4.0 * run.sigma + 0.01,
            if crossing_ok { "ok" } else { "out" },
            f2,
            p2,
            (f2 - p2) / sigma2,
            if p2_ok { "ok" } else { "out" },
            g.rho_extended(),
            ext,
            p2_ext,
        ),
    )
}

fn criterion_8(runs: &[(usize, &Run)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for w in runs.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        let (da, db) = ((a.freq - a.exact).abs(), (b.freq - b.exact).abs());
        // allow the later distance to exceed the earlier one by 3 combined sigma
        ok &= db <= da + 3.0 * (a.sigma.powi(2) + b.sigma.powi(2)).sqrt();
    }
    for (cols, r) in runs {
        parts.push(format!("cols {cols}: {:+.5}", r.freq - r.exact));
    }
    outcome(ok, format!("frequency - exact: {}", parts.join(", ")))
}

fn mc_json(workers: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args([
            "--format", "json", "mc", "--rho", "1", "--cols", "64", "--trials", "20000",
        ])
        .args(["--seed", "7", "--workers", workers])
        .output()
        .expect("run annulus");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn criterion_9() -> Outcome {
    let a = mc_json("1");
    let b = mc_json("1");
    let c = mc_json("8");
    outcome(
        a == b && a == c,
        format!(
            "{} bytes, runs and worker counts 1/8 identical: {}",
            a.len(),
            a == b && a == c
        ),
    )
}

fn main() {
    // libtest flags such as --list or --nocapture are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut passed = 0;
    let mut failed = Vec::new();
    let mut record = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {id} [{}] {name}: {} ({:.1} s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.passed {
            passed += 1;
        } else {
            failed.push(id);
        }
    };

    record(
        1,
        "P(2), P(3) at rho = 1 to three figures",
        &mut criterion_1,
    );
    record(2, "five crossing forms agree", &mut criterion_2);
    record(
        3,
        "distribution sums to the crossing probability",
        &mut criterion_3,
    );
    record(4, "odd-hull sum rule", &mut criterion_4);
    record(
        5,
        "mean number of spanning clusters for thin annuli",
        &mut criterion_5,
    );
    record(
        6,
        "union-find matches exhaustive flood fill",
        &mut criterion_6,
    );

    // seeds fixed once, before any of these runs were looked at
    let mut run128 = None;
    record(7, "Monte Carlo vs exact at cols = 128", &mut || {
        let (run, stats) = crossing_run(128, 200_000, 2024);
        let o = criterion_7(&run, &stats);
        run128 = Some(run);
        o
    });
    record(8, "finite-size convergence", &mut || {
        let (run32, _) = crossing_run(32, 200_000, 2025);
        let (run64, _) = crossing_run(64, 200_000, 2026);
        criterion_8(&[(32, &run32), (64, &run64), (128, run128.as_ref().unwrap())])
    });
    record(9, "deterministic mc output", &mut criterion_9);

    println!("acceptance: {passed}/9 criteria passed");
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
