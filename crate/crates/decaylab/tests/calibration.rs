//! Calibration probes, all ignored: they (re)measure the numeric bands the
//! built-in catalog asserts, and regenerate the committed reference
//! fixture. Run by hand with
//!
//! ```text
//! cargo test -p decaylab --test calibration -- --ignored --nocapture
//! ```

use decaylab::ratefit::fit_power;
use decaylab::scenarios::{builtin_catalog, builtin_pairs, run_scenario_with_series};

#[test]
#[ignore = "calibration probe, run by hand"]
fn probe_catalog_exponents() {
    let mut series_by_id = std::collections::BTreeMap::new();
    for cfg in builtin_catalog() {
        let started = std::time::Instant::now();
        let (report, series) = run_scenario_with_series(&cfg).unwrap();
        let wall = started.elapsed().as_secs_f64();
        println!("== {} [{}] {:.2}s", report.id, report.outcome, wall);
        let d = &report.data;
        println!(
            "   data: e0 {:.4e}, |u0|^2 {:.4e}, I0^2 {:.4e}, K0^2 {:.4e}, K0h^2 {:.4e}, K0p^2 {:.4e}",
            d.e0, d.l2_u0_sq, d.i0_sq, d.k0_sq, d.k0h_sq, d.k0p_sq
        );
        for c in &report.checks {
            println!("   {:<26} {:<15} {}", c.name, format!("{:?}", c.status), c.detail);
        }
        if let Some(s) = series {
            series_by_id.insert(report.id.clone(), s);
        }
    }
    for pair in builtin_pairs() {
        let (Some(base), Some(with)) = (
            series_by_id.get(&pair.baseline),
            series_by_id.get(&pair.with_potential),
        ) else {
            println!("pair {} vs {}: series missing", pair.baseline, pair.with_potential);
            continue;
        };
        let res = pair.evaluate(base, with);
        println!("pair {} vs {}: {:?} {}", res.baseline, res.with_potential, res.status, res.detail);
    }
}

/// The S6 gaussian amplitude is chosen so the (1+t)^2-weighted energy
/// plateaus inside the fit window: strong potentials push the crossover
/// from the rising constant-damping transient to the decaying absorbed
/// regime before t = 25 (fitted slope clearly negative), weak ones push it
/// past t = 100 (slope clearly positive). This sweep finds the saturating
/// amplitude where the boundedness verdict is informative.
#[test]
#[ignore = "amplitude sweep used to choose the S6 potential"]
fn probe_s6_saturation_amplitude() {
    let base = builtin_catalog()
        .into_iter()
        .find(|c| c.id == "S6-damped-fast-decay")
        .expect("catalog carries S6");
    for amp in [0.05, 0.1, 0.12, 0.13, 0.14, 0.15, 0.2, 0.3, 0.5, 1.0] {
        let mut cfg = base.clone();
        cfg.potential = decaylab::potential::PotentialSpec::Gaussian { amplitude: amp, sigma: 1.0 };
        let (report, series) = run_scenario_with_series(&cfg).unwrap();
        let series = series.expect("march completed");
        let col = series.column("weighted_energy").unwrap();
        let fit = fit_power(&col, (25.0, 100.0)).unwrap();
        let scale = decaylab::scenarios::ScaleChoice::DampedEnergy.resolve(&series.data);
        let sup = col
            .iter()
            .filter(|p| p.0 >= 25.0 && p.0 <= 100.0)
            .fold(0.0f64, |m, p| m.max(p.1));
        println!(
            "amp {amp:<5} beta {:+.4} (r^2 {:.3}, se {:.1e}) sup/scale {:.4} [{}]",
            fit.exponent,
            fit.r_squared,
            fit.slope_se,
            sup / scale,
            report.outcome
        );
    }
}

#[test]
#[ignore = "writes the committed reference fixture"]
fn regenerate_s7_reference() {
    let mut cfg = builtin_catalog()
        .into_iter()
        .find(|c| c.id == "S7-damped-no-potential-contrast")
        .expect("catalog carries S7");
    cfg.grid.points_per_axis = 2 * (cfg.grid.points_per_axis - 1) + 1;
    cfg.sample_every *= 2;
    // only the measured fit matters here, so the entry's own band (which
    // this run is about to redefine) must not be able to fail the run
    cfg.checks.power_fits[0].beta_min = -10.0;
    cfg.checks.power_fits[0].beta_max = 10.0;
    let (_, series) = run_scenario_with_series(&cfg).unwrap();
    let series = series.expect("march completed");
    let col = series.column("energy").unwrap();
    let fit = fit_power(&col, (25.0, 100.0)).unwrap();
    let beta = (fit.exponent * 1e4).round() / 1e4;
    println!(
        "doubled-resolution energy exponent: {beta} (r^2 {:.5}, se {:.2e})",
        fit.r_squared, fit.slope_se
    );
    let fixture = serde_json::json!({
        "beta": beta,
        "window": [25.0, 100.0],
        "half_width": cfg.grid.half_width,
        "points_per_axis": cfg.grid.points_per_axis,
        "horizon": cfg.horizon,
        "safety": cfg.safety,
        "note": "Energy-decay exponent of the free damped wave measured on a grid at \
                 twice the catalog resolution. Regenerate with: cargo test -p decaylab \
                 --test calibration regenerate_s7_reference -- --ignored --nocapture",
    });
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/s7_reference.json");
    std::fs::write(path, format!("{fixture:#}\n")).unwrap();
    println!("wrote {path}");
}
