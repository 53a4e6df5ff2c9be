//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints a PASS/FAIL line; exits non-zero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};

use num_complex::Complex64;
use rand::Rng;

use isa_sim::polarization::{
    density_at, density_from_stokes, eigendecompose, ensemble_density, rotate_ensemble,
    stokes_from_density, DensityMatrix, PhotonEnsemble, PolarizationAngle, StokesVector,
};
use isa_sim::rng::{rng_from_seed, SimRng};
use isa_sim::sweep::{DEFAULT_DELTAS, FIGURE_PRESETS};
use isa_sim::tomography::simulate_counts_with;
use isa_sim::{
    closed_form_lambda_max, intensity_check, matrix_distance, reconstruct, run_protocol,
    sweep_delta_family, sweep_siphon, Bit, Decision, EveConfig, ProtocolConfig, SweepSpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn deg(d: f64) -> PolarizationAngle {
    PolarizationAngle::new(d).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn worked_mixture() -> DensityMatrix {
    ensemble_density(&[(80, deg(30.0)), (20, deg(45.0))].into_iter().collect()).unwrap()
}

fn ac1_worked_matrix() -> Outcome {
    let e = worked_mixture().real_parts();
    let want = [[0.7, 0.4464], [0.4464, 0.3]];
    let worst = (0..4)
        .map(|k| (e[k / 2][k % 2] - want[k / 2][k % 2]).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-3, format!("max entry error {worst:.2e} > 1e-3"))?;
    Ok(format!("max entry error {worst:.2e}"))
}

fn ac2_worked_spectrum() -> Outcome {
    let sp = eigendecompose(&worked_mixture());
    let angle = sp
        .principal_angle
        .ok_or("principal angle undefined")?
        .degrees();
    check(
        (sp.lambda_max - 0.9892).abs() <= 5e-4,
        format!("lambda_max {}", sp.lambda_max),
    )?;
    check(
        (sp.lambda_min - 0.0108).abs() <= 5e-4,
        format!("lambda_min {}", sp.lambda_min),
    )?;
    check((angle - 32.93).abs() <= 0.05, format!("angle {angle}"))?;
    Ok(format!(
        "lambda = {{{:.4}, {:.4}}}, angle {angle:.3}°",
        sp.lambda_min, sp.lambda_max
    ))
}

fn ac3_stokes_example() -> Outcome {
    let s = stokes_from_density(&DensityMatrix::from_real(0.5, 0.5, 0.5).unwrap());
    check(s == StokesVector::new(1.0, 1.0, 0.0, 0.0), format!("{s:?}"))?;
    Ok("(1, 1, 0, 0) exactly".into())
}

fn ac4_detection() -> Outcome {
    let cfg = ProtocolConfig::exact(100, deg(30.0), Bit::Zero).with_eve(EveConfig::replace(
        10,
        10,
        deg(45.0),
    ));
    let out = run_protocol(&cfg).map_err(|e| e.to_string())?;
    check(
        out.purity_received < 1.0 - 1e-6,
        format!("purity {}", out.purity_received),
    )?;
    check(
        out.decision == Decision::EveDetected,
        format!("decision {}", out.decision),
    )?;
    check(
        intensity_check(&out.stage_intensities),
        "intensity check failed",
    )?;
    Ok(format!(
        "purity {:.4}, decision {}, intensity unchanged",
        out.purity_received, out.decision
    ))
}

/// Per-photon sum of projectors; independent of the library's mixture code.
fn brute_force_lambda_max(n: u64, eve: u64, delta: f64) -> f64 {
    let mut m = [0.0f64; 3];
    for i in 0..n {
        let t = if i < eve { 30.0 + delta } else { 30.0f64 }.to_radians();
        m[0] += t.cos() * t.cos();
        m[1] += t.cos() * t.sin();
        m[2] += t.sin() * t.sin();
    }
    let (a, b, d) = (m[0] / n as f64, m[1] / n as f64, m[2] / n as f64);
    let tr = a + d;
    let det = a * d - b * b;
    0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
}

fn ac5_oracle_equivalence() -> Outcome {
    let n = 200u64;
    let fractions: Vec<f64> = (0..=10).map(|k| k as f64 / 20.0).collect();
    let deltas = [7.5, 15.0, 30.0, 60.0, 90.0];
    let mut worst_oracle: f64 = 0.0;
    for &d in &deltas {
        for &f in &fractions {
            let eve = (f * n as f64).round() as u64;
            let diff =
                (brute_force_lambda_max(n, eve, d) - closed_form_lambda_max(f, deg(d))).abs();
            worst_oracle = worst_oracle.max(diff);
        }
    }
    check(
        worst_oracle <= 1e-10,
        format!("closed form vs brute force {worst_oracle:.2e}"),
    )?;

    let mut worst: f64 = 0.0;
    for &d in &deltas {
        let totals = fractions
            .iter()
            .map(|f| (f * n as f64).round() as u64)
            .collect();
        let spec = SweepSpec::exact(deg(30.0), deg(30.0 + d), n, totals);
        for r in sweep_siphon(&spec).map_err(|e| e.to_string())? {
            let f = r.siphon_total as f64 / n as f64;
            worst = worst.max((r.lambda_max - closed_form_lambda_max(f, deg(d))).abs());
        }
    }
    check(worst <= 1e-10, format!("sweep vs closed form {worst:.2e}"))?;
    Ok(format!(
        "55 points, sweep error {worst:.1e}, oracle validated to {worst_oracle:.1e}"
    ))
}

fn ac6_figure_shapes() -> Outcome {
    for (name, theta, phi) in FIGURE_PRESETS {
        let spec = SweepSpec::figure_preset(name).ok_or(format!("missing preset {name}"))?;
        let recs = sweep_siphon(&spec).map_err(|e| e.to_string())?;
        for w in recs.windows(2) {
            check(
                w[1].lambda_max <= w[0].lambda_max + 1e-15,
                format!("{name}: lambda_max rises at total {}", w[1].siphon_total),
            )?;
        }
        let start = deg(theta);
        let direction = start.signed_offset_to(deg(phi)).signum();
        let mut last = 0.0;
        for r in &recs {
            let a = r.peak_angle.ok_or(format!("{name}: undefined angle"))?;
            let drift = start.signed_offset_to(a) * direction;
            check(
                drift >= last - 1e-9,
                format!("{name}: angle reverses at {}", r.siphon_total),
            )?;
            last = drift;
        }
        check(last > 0.0, format!("{name}: angle never moves toward phi"))?;
    }

    let deltas: Vec<PolarizationAngle> = DEFAULT_DELTAS.iter().map(|&d| deg(d)).collect();
    let fractions: Vec<f64> = (1..=10).map(|k| k as f64 / 20.0).collect();
    let pts = sweep_delta_family(&deltas, deg(30.0), &fractions, 200).map_err(|e| e.to_string())?;
    for &f in &fractions {
        let series: Vec<f64> = deltas
            .iter()
            .map(|d| {
                pts.iter()
                    .find(|p| p.delta == *d && p.fraction == f)
                    .map(|p| p.record.lambda_max)
                    .unwrap()
            })
            .collect();
        check(
            series.windows(2).all(|w| w[1] < w[0]),
            format!("delta ordering fails at fraction {f}: {series:?}"),
        )?;
    }
    Ok("fig4-fig11 monotone with angle drift toward phi; delta family ordered".into())
}

fn ac7_no_attack() -> Outcome {
    let mut ok = 0;
    for theta in 0..180 {
        for (bit, want) in [(Bit::Zero, Decision::Bit0), (Bit::One, Decision::Bit1)] {
            let out = run_protocol(&ProtocolConfig::exact(100, deg(theta as f64), bit))
                .map_err(|e| e.to_string())?;
            if out.decision == want {
                ok += 1;
            }
        }
    }
    check(ok == 360, format!("{ok}/360"))?;
    Ok("360/360".into())
}

fn ac8_tomography_convergence() -> Outcome {
    let mut report = Vec::new();
    for (label, rho) in [
        ("rho(30)", density_at(deg(30.0))),
        ("80/20 mixture", worked_mixture()),
    ] {
        let hits = (0..100u64)
            .filter(|&seed| {
                let mut rng = rng_from_seed(seed);
                let est = reconstruct(&simulate_counts_with(&rho, 100_000, &mut rng)).unwrap();
                matrix_distance(&est, &rho) <= 0.02
            })
            .count();
        check(hits >= 99, format!("{label}: {hits}/100 within 0.02"))?;
        report.push(format!("{label} {hits}/100"));
    }
    Ok(report.join(", "))
}

fn random_density(rng: &mut SimRng) -> DensityMatrix {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return density_from_stokes(&StokesVector::new(1.0, v[0], v[1], v[2])).unwrap();
        }
    }
}

fn ac9_property_suites() -> Outcome {
    let mut rng = rng_from_seed(2024);
    for i in 0..1000 {
        let rho = random_density(&mut rng);
        let e = *rho.entries();
        check((rho.trace() - 1.0).abs() <= 1e-12, format!("#{i} trace"))?;
        check(
            (e[0][1] - e[1][0].conj()).norm() <= 1e-12,
            format!("#{i} hermitian"),
        )?;
        check(
            eigendecompose(&rho).lambda_min >= -1e-10,
            format!("#{i} psd"),
        )?;
        // perturbations must be rejected at construction
        let mut bad = e;
        bad[0][0] += Complex64::new(1e-6, 0.0);
        check(
            DensityMatrix::new(bad).is_err(),
            format!("#{i} accepted trace error"),
        )?;
        let mut bad = e;
        bad[0][1] += Complex64::new(0.0, 1e-6);
        check(
            DensityMatrix::new(bad).is_err(),
            format!("#{i} accepted non-Hermitian"),
        )?;
    }
    for i in 0..1000 {
        let rho = random_density(&mut rng);
        let back = density_from_stokes(&stokes_from_density(&rho)).map_err(|e| e.to_string())?;
        check(
            matrix_distance(&back, &rho) <= 1e-12,
            format!("#{i} round trip"),
        )?;
    }
    let mut worst_residual: f64 = 0.0;
    for _ in 0..1000 {
        let rho = random_density(&mut rng);
        let sp = eigendecompose(&rho);
        let e = rho.entries();
        for (lam, v) in [
            (sp.lambda_max, sp.principal_vector),
            (sp.lambda_min, sp.minor_vector),
        ] {
            for row in 0..2 {
                let r = (e[row][0] * v[0] + e[row][1] * v[1] - v[row] * lam).norm();
                worst_residual = worst_residual.max(r);
            }
        }
    }
    check(
        worst_residual < 1e-10,
        format!("eigen residual {worst_residual:.2e}"),
    )?;
    for i in 0..1000 {
        let parts = rng.random_range(1..5);
        let ens: PhotonEnsemble = (0..parts)
            .map(|_| {
                (
                    rng.random_range(1..500u64),
                    deg(rng.random_range(0.0..180.0)),
                )
            })
            .collect();
        let delta = deg(rng.random_range(0.0..180.0));
        let a = eigendecompose(&ensemble_density(&ens).unwrap());
        let b = eigendecompose(&ensemble_density(&rotate_ensemble(&ens, delta)).unwrap());
        check(
            (a.lambda_max - b.lambda_max).abs() <= 1e-12
                && (a.lambda_min - b.lambda_min).abs() <= 1e-12,
            format!("#{i} rotation changed spectrum"),
        )?;
    }
    Ok(format!(
        "4 x 1000 inputs, worst eigen residual {worst_residual:.1e}"
    ))
}

fn ac10_reproducibility() -> Outcome {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_isa-sim"))
            .args(["sweep", "--preset", "fig4", "--mode", "exact", "--out"])
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?
            .status;
        check(status.success(), format!("sweep exited with {status}"))?;
    }
    let a = fs::read(dirs[0].path().join("fig4.csv")).map_err(|e| e.to_string())?;
    let b = fs::read(dirs[1].path().join("fig4.csv")).map_err(|e| e.to_string())?;
    check(a == b, "fig4.csv differs between runs")?;
    Ok(format!("fig4.csv identical ({} bytes)", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 worked-example matrix", ac1_worked_matrix),
        ("AC2 worked-example spectrum", ac2_worked_spectrum),
        ("AC3 Stokes example", ac3_stokes_example),
        ("AC4 replacement attack detected", ac4_detection),
        ("AC5 closed-form oracle equivalence", ac5_oracle_equivalence),
        ("AC6 figure-shape properties", ac6_figure_shapes),
        ("AC7 no-attack correctness", ac7_no_attack),
        ("AC8 tomography convergence", ac8_tomography_convergence),
        ("AC9 property suites", ac9_property_suites),
        ("AC10 sweep reproducibility", ac10_reproducibility),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
