//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! `cargo test -p cvqec-core --test acceptance`

mod common;

use std::time::Instant;

use cvqec::correction::{combine_ptot, p_sigma, teleport_correct, QunaughtSupply, Weighting};
use cvqec::decoder::Variant;
use cvqec::experiment::{run_point, run_sweep, sweep_threshold, Crossing, PointResult, SimConfig};
use cvqec::noise::{init_gkp_mode, NoiseParams, SQRT_PI};
use cvqec::symplectic::{
    gate_noise_variance, induced_gate, is_symplectic, output_noise_variances, BasisSetting, Matrix, TwoModeGate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SEED: u64 = 20_240_917;
const TOL_DB: f64 = 1.0;

struct Report {
    results: Vec<bool>,
}

impl Report {
    fn record(&mut self, ok: bool, name: &str, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.results.push(ok);
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

struct Scenario {
    variant: Variant,
    weighting: Weighting,
    gate_noise: bool,
    p_fail: f64,
}

impl Scenario {
    fn analog() -> Self {
        Scenario { variant: Variant::Surface4Gkp, weighting: Weighting::Analog, gate_noise: true, p_fail: 0.0 }
    }

    fn sweep(&self, dbs: &[f64]) -> Vec<PointResult> {
        let mut configs = Vec::new();
        for d in [3, 5] {
            for &db in dbs {
                let mut c = SimConfig::new(d, db, self.variant);
                c.weighting = self.weighting;
                c.gate_noise = self.gate_noise;
                c.p_fail = self.p_fail;
                c.max_samples = 20_000;
                c.stop_errors = 500;
                c.seed = SEED;
                c.bootstrap_resamples = 200;
                configs.push(c);
            }
        }
        let t = Instant::now();
        let sweep = run_sweep(&configs).expect("sweep runs");
        eprintln!("  [{} {:?} gate_noise={} p_fail={}] {:.0} s", self.variant.name(), self.weighting, self.gate_noise, self.p_fail, t.elapsed().as_secs_f64());
        for p in &sweep.points {
            eprintln!("    d={} {:>5.2} dB  n={:>6}  rate={:.5} ± {:.5}", p.config.distance, p.config.squeezing_db, p.samples, p.combined_rate, p.combined_std);
        }
        sweep.points
    }
}

fn crossing(points: &[PointResult]) -> Crossing {
    sweep_threshold(points, 3, 5, |_| true)
}

fn show(c: Crossing) -> String {
    c.value().map_or("no crossing".into(), |x| format!("{x:.2} dB"))
}

fn within(c: Crossing, target: f64) -> bool {
    c.value().is_some_and(|x| (x - target).abs() <= TOL_DB)
}

fn rate_at(points: &[PointResult], d: usize, db: f64) -> &PointResult {
    points
        .iter()
        .find(|p| p.config.distance == d && (p.config.squeezing_db - db).abs() < 1e-9)
        .expect("point in sweep")
}

fn thresholds(report: &mut Report) {
    let analog_points = Scenario::analog().sweep(&grid(11.0, 15.0, 0.5));
    let analog = crossing(&analog_points);
    report.record(within(analog, 12.7), "threshold surface-4-gkp analog", format!("{} (want 12.7 ± {TOL_DB})", show(analog)));

    // Variant ordering
    let sgkp = Scenario { variant: Variant::SurfaceGkp, ..Scenario::analog() };
    let sgkp_points = sgkp.sweep(&grid(15.0, 19.0, 1.0));
    let mut ordered = true;
    let mut detail = Vec::new();
    for d in [3, 5] {
        let a = rate_at(&sgkp_points, d, 15.0);
        let b = rate_at(&analog_points, d, 15.0);
        let sigma = (a.combined_std.powi(2) + b.combined_std.powi(2)).sqrt();
        let gap = a.combined_rate - b.combined_rate;
        ordered &= gap >= 3.0 * sigma;
        detail.push(format!("d={d}: {:.5} vs {:.5} ({:.1}σ)", a.combined_rate, b.combined_rate, gap / sigma.max(1e-300)));
    }
    report.record(ordered, "variant ordering at 15 dB", detail.join(", "));
    let sc = crossing(&sgkp_points);
    let (ok, why) = match sc {
        Crossing::At(x) => (x > 15.5, format!("{x:.2} dB (want > 15.5)")),
        Crossing::None => {
            // Larger codes still worse at the top of the window means the crossing lies beyond it.
            let above = [15.0, 16.0]
                .iter()
                .all(|&db| rate_at(&sgkp_points, 5, db).combined_rate > rate_at(&sgkp_points, 3, db).combined_rate);
            (above, "no crossing in 15-19 dB; d=5 worse than d=3 at 15 and 16 dB".into())
        }
    };
    report.record(ok, "threshold surface-gkp above 15.5 dB", why);

    let free = Scenario { gate_noise: false, ..Scenario::analog() }.sweep(&grid(9.0, 11.5, 0.5));
    let fc = crossing(&free);
    report.record(within(fc, 10.2), "threshold without gate noise", format!("{} (want 10.2 ± {TOL_DB})", show(fc)));

    let fixed = Scenario { weighting: Weighting::Fixed, ..Scenario::analog() }.sweep(&grid(12.5, 15.0, 0.5));
    let xc = crossing(&fixed);
    let above = matches!((xc, analog), (Crossing::At(x), Crossing::At(a)) if x > a);
    report.record(
        within(xc, 13.6) && above,
        "threshold fixed weighting",
        format!("{} (want 13.6 ± {TOL_DB}, above analog {})", show(xc), show(analog)),
    );

    let mut supply = vec![(0.0, analog)];
    for (p_fail, lo, hi) in [(0.05, 11.5, 15.0), (0.1, 12.0, 15.5)] {
        let pts = Scenario { p_fail, ..Scenario::analog() }.sweep(&grid(lo, hi, 0.5));
        supply.push((p_fail, crossing(&pts)));
    }
    let values: Vec<Option<f64>> = supply.iter().map(|s| s.1.value()).collect();
    let monotone = values.iter().all(Option::is_some) && values.windows(2).all(|w| w[1] > w[0]);
    report.record(
        monotone,
        "threshold increases with p_fail",
        supply.iter().map(|(p, c)| format!("{p}: {}", show(*c))).collect::<Vec<_>>().join(", "),
    );
}

fn algebra(report: &mut Report) {
    let g = 1.0;
    let a = (2.0f64 / g).atan();
    let h = std::f64::consts::FRAC_PI_2;
    let printed = [
        (TwoModeGate::FdagFThenCz, [-a, 0.0, 0.0, a]),
        (TwoModeGate::CzThenFFdag, [-h + a, h, -h, h - a]),
        (TwoModeGate::FFdagThenCx, [-h + a, h, -h, h - a]),
        (TwoModeGate::CxThenFdagF, [-a, 0.0, 0.0, a]),
    ];
    let s5 = 5f64.sqrt() / 2.0;
    let r2 = 2f64.sqrt();
    let i2 = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let d1 = Matrix::from_row_slice(4, 4, &[
        -s5, 0.0, i2, s5,
        -s5, -i2, 0.0, -s5,
        0.0, -r2, 0.0, 0.0,
        0.0, 0.0, r2, 0.0,
    ]);
    #[rustfmt::skip]
    let d2 = Matrix::from_row_slice(4, 4, &[
        0.0, -r2, 0.0, 0.0,
        0.0, 0.0, -r2, 0.0,
        s5, 0.0, -i2, s5,
        s5, -i2, 0.0, -s5,
    ]);
    let mut gate_err = 0.0f64;
    let mut disp_err = 0.0f64;
    let mut noise_err = 0.0f64;
    let mut symplectic = true;
    for (gate, angles) in printed {
        let ind = induced_gate(&BasisSetting::two_wire(angles)).expect("valid setting");
        gate_err = gate_err.max((&ind.g - gate.target(g)).amax());
        let want = match gate {
            TwoModeGate::FdagFThenCz | TwoModeGate::CxThenFdagF => &d1,
            _ => &d2,
        };
        disp_err = disp_err.max((&ind.displacement - want).amax());
        symplectic &= is_symplectic(&ind.g, 1e-10) && is_symplectic(&gate.target(g), 1e-10);
        for r in [0.0, 0.25, 0.5, 1.0, 1.5] {
            let worst = gate_noise_variance(&BasisSetting::two_wire(angles), r).expect("valid setting");
            noise_err = noise_err.max((worst - (-2.0 * r).exp()).abs());
            for v in output_noise_variances(&ind, r) {
                noise_err = noise_err.max((v - (-2.0 * r).exp()).abs());
            }
        }
    }
    report.record(gate_err < 1e-10, "induced gates match the four targets", format!("max error {gate_err:.1e}"));
    report.record(disp_err < 1e-10, "displacement matrices", format!("max error {disp_err:.1e}"));
    report.record(noise_err < 1e-10, "gate noise variance equals e^-2r", format!("max error {noise_err:.1e}"));
    report.record(symplectic, "returned gates symplectic", "tolerance 1e-10".into());
}

fn brute_p_sigma(z: f64, s2: f64) -> f64 {
    let (mut odd, mut all) = (0.0, 0.0);
    for n in -50i64..=50 {
        let t = (-(z - n as f64 * SQRT_PI).powi(2) / (2.0 * s2)).exp();
        all += t;
        if n.rem_euclid(2) == 1 {
            odd += t;
        }
    }
    odd / all
}

fn soft_information(report: &mut Report) {
    let sigmas = [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0, 1.5];
    let half = sigmas.iter().all(|&s: &f64| {
        p_sigma(SQRT_PI / 2.0, s * s).unwrap() == 0.5 && p_sigma(-SQRT_PI / 2.0, s * s).unwrap() == 0.5
    });
    report.record(half, "p_sigma at the bin edge is 1/2", format!("{} widths", sigmas.len()));

    let mut worst = 0.0f64;
    for &s in &sigmas {
        for i in 0..=40 {
            let z = -SQRT_PI / 2.0 + SQRT_PI * i as f64 / 40.0;
            worst = worst.max((p_sigma(z, s * s).unwrap() - brute_p_sigma(z, s * s)).abs());
        }
    }
    report.record(worst < 1e-10, "p_sigma against brute-force sum", format!("max error {worst:.1e}"));

    let mut worst = 0.0f64;
    for i in 0..=50 {
        let p = 0.5 * i as f64 / 50.0;
        worst = worst.max((combine_ptot(&[p, p]).unwrap() - 2.0 * p * (1.0 - p)).abs());
    }
    report.record(worst < 1e-15, "combining two equal probabilities", format!("max error {worst:.1e}"));

    let n = 100_000;
    let mut all_ok = true;
    let mut detail = Vec::new();
    for (weighting, s2) in [(Weighting::Analog, 0.08), (Weighting::Fixed, 0.08), (Weighting::Analog, 0.04)] {
        let params = NoiseParams::from_sigma2(s2, true);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let (mut flips, mut mean_p) = (0usize, 0.0);
        for _ in 0..n {
            let mut m = init_gkp_mode(&params, false, &mut rng);
            m.shift.q += rng.sample::<f64, _>(StandardNormal) * params.sigma2_gate.sqrt();
            m.var.q += params.sigma2_gate;
            let out = teleport_correct(&mut m, &params, QunaughtSupply::perfect(), weighting, &mut rng);
            flips += ((m.shift.q / SQRT_PI).round() as i64).rem_euclid(2) as usize;
            mean_p += out.p_x;
        }
        let freq = flips as f64 / n as f64;
        let mean_p = mean_p / n as f64;
        let se = (mean_p * (1.0 - mean_p) / n as f64).sqrt();
        all_ok &= (freq - mean_p).abs() < 3.0 * se;
        detail.push(format!("{weighting:?} σ²={s2}: {freq:.4} vs {mean_p:.4}"));
    }
    report.record(all_ok, "misrounding frequency matches reported p", detail.join(", "));
}

fn decoder(report: &mut Report) {
    let mut all_ok = true;
    let mut detail = Vec::new();
    for d in [3, 5] {
        for variant in [Variant::SurfaceGkp, Variant::Surface4Gkp] {
            let (n, bad) = common::single_fault_failures(d, variant);
            all_ok &= bad.is_empty();
            detail.push(format!("d={d} {}: {}/{n} fail", variant.name(), bad.len()));
        }
    }
    report.record(all_ok, "single faults corrected", detail.join(", "));

    let mut all_ok = true;
    let mut detail = Vec::new();
    for variant in [Variant::SurfaceGkp, Variant::Surface4Gkp] {
        let (n, bad) = common::double_fault_failures(5, variant);
        all_ok &= bad.is_empty();
        detail.push(format!("{}: {}/{n} fail", variant.name(), bad.len()));
    }
    report.record(all_ok, "double faults corrected at d=5", detail.join(", "));

    let check = common::matching_vs_brute_force(1000, SEED);
    report.record(
        check.weight_mismatches == 0 && check.path_mismatches == 0,
        "matching equals brute force",
        format!("{} instances, {} weight and {} path mismatches", check.instances, check.weight_mismatches, check.path_mismatches),
    );
}

fn statistics(report: &mut Report) {
    let mut c = SimConfig::new(3, 12.0, Variant::Surface4Gkp);
    c.max_samples = 100_000;
    c.stop_errors = u64::MAX;
    c.seed = SEED;
    c.bootstrap_resamples = 100;
    let p = run_point(&c).expect("point runs");
    let n = p.samples as f64;
    let pooled = (p.logical_x_errors + p.logical_z_errors) as f64 / (2.0 * n);
    let se = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
    let z = (p.logical_x_rate - p.logical_z_rate) / se;
    report.record(
        z.abs() < 3.0,
        "logical X and Z rates agree",
        format!("{:.5} vs {:.5} over {} samples, z = {z:.2}", p.logical_x_rate, p.logical_z_rate, p.samples),
    );

    let mut c = SimConfig::new(3, 12.5, Variant::Surface4Gkp);
    c.max_samples = 3000;
    c.stop_errors = 200;
    c.seed = SEED;
    let results: Vec<PointResult> = [1, 2, 4]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            pool.install(|| run_point(&c)).expect("point runs")
        })
        .collect();
    let same = results.windows(2).all(|w| w[0] == w[1]);
    report.record(
        same,
        "identical results across thread counts",
        format!("1, 2 and 4 threads, {} samples, {} X + {} Z errors", results[0].samples, results[0].logical_x_errors, results[0].logical_z_errors),
    );
}

fn main() {
    let start = Instant::now();
    let mut report = Report { results: Vec::new() };
    algebra(&mut report);
    soft_information(&mut report);
    decoder(&mut report);
    statistics(&mut report);
    thresholds(&mut report);
    let failed = report.results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed in {:.0} s", report.results.len() - failed, report.results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
