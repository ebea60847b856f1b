//! Acceptance criteria, one PASS/FAIL line each. Runs without the test harness so the
//! table is always printed; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soapfilm::access::{accessibility_report, cone_margin, fixtures, is_accessible_at, totally_accessible, wedge_sum_lemma, BoundarySamples};
use soapfilm::catenoid::*;
use soapfilm::graph::{first_variation, graph_mean_curvature, NormalGraph};
use soapfilm::lab::*;
use soapfilm::surface::{build_base, revolution_curvatures, BaseKind, BaseSurface, GridSpec};

type Verdict = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Verdict);
type Case = (u8, fn(f64) -> f64);

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

/// Independent fold oracle: bisection on the solvability of `c cosh(d/(2c)) = 1`, decided by
/// ternary search for the minimum over `c`.
fn fold_oracle() -> f64 {
    let solvable = |d: f64| {
        let f = |c: f64| c * (d / (2.0 * c)).cosh();
        let (mut a, mut b) = (0.05, 1.0);
        for _ in 0..200 {
            let (m1, m2) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
            if f(m1) < f(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        f(0.5 * (a + b)) <= 1.0
    };
    let (mut lo, mut hi) = (0.5, 2.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if solvable(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let rep = enumerate_family(&TwoCircleBoundary::new(1.0, 1.0, 0.5).map_err(e)?);
    let reg = rep.regular();
    let res = reg.iter().map(|s| s.residual).fold(0.0, f64::max);
    let d = critical_separation(1.0, 1.0);
    let secs = t.elapsed().as_secs_f64();
    let err = (d - fold_oracle()).abs();
    let ok = reg.len() == 2 && res <= 1e-10 && err <= 1e-3 && secs < 5.0;
    Ok((ok, format!("{} catenoids, residual {res:.2e}, d* = {d:.6} (oracle error {err:.2e}), {secs:.3} s", reg.len())))
}

fn criterion_2() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for sep in [0.3, 0.5, 0.8, 1.1] {
        let rep = enumerate_family_with_stability(&TwoCircleBoundary::new(1.0, 1.0, sep).map_err(e)?).map_err(e)?;
        let reg = rep.regular();
        if reg.len() != 2 {
            return Ok((false, format!("sep {sep}: {} catenoids", reg.len())));
        }
        // order by c: the larger c is the stable branch
        let (big, small) = if reg[0].catenoid_params().unwrap().0 > reg[1].catenoid_params().unwrap().0 {
            (reg[0], reg[1])
        } else {
            (reg[1], reg[0])
        };
        let (a, b) = (big.stability_eig.unwrap(), small.stability_eig.unwrap());
        ok &= a > 0.0 && b < 0.0;
        parts.push(format!("{sep}: {a:+.3}/{b:+.3}"));
    }
    let disk = build_base(BaseKind::FlatDisk { radius: 1.0 }, GridSpec::new(JACOBI_NODES)).map_err(e)?;
    let lambda = jacobi_spectrum(&disk, &[0]).map_err(e)?[0];
    ok &= (lambda - 5.7832).abs() <= 0.01;
    Ok((ok, format!("eigenvalues {}; disk lambda_1 = {lambda:.5}", parts.join(", "))))
}

fn criterion_3() -> Verdict {
    for sep in [0.3, 0.5, 0.8] {
        let Ok(sols) = solve_singular_catenoid(&TwoCircleBoundary::new(1.0, 1.0, sep).map_err(e)?) else {
            continue;
        };
        if sols.len() != 2 {
            continue;
        }
        let worst = sols
            .iter()
            .map(|s| conormal_sum(&s.params).map_or(f64::INFINITY, |v| v[0].hypot(v[1])))
            .fold(0.0, f64::max);
        let (r4, r5) = (junction_radius(&sols[0]), junction_radius(&sols[1]));
        let ok = worst <= 1e-10 && r4 > r5;
        return Ok((ok, format!("sep {sep}: r_j {r4:.6} > {r5:.6}, conormal sum {worst:.2e}")));
    }
    Ok((false, "no separation with both junction configurations".into()))
}

fn field(base: &BaseSurface, f: fn(f64) -> f64) -> Vec<f64> {
    let (a, b) = (base.nodes[0].s, base.nodes[base.len() - 1].s);
    base.nodes
        .iter()
        .zip(&base.boundary_mask)
        .map(|(g, m)| if *m { 0.0 } else { f((g.s - a) / (b - a)) })
        .collect()
}

fn make(kind: u8, nodes: usize) -> Result<Arc<BaseSurface>, String> {
    let k = match kind {
        0 => BaseKind::Catenoid { c: 1.0, z0: 0.0, z_min: -0.5, z_max: 0.5 },
        1 => BaseKind::FlatAnnulus { r_in: 0.5, r_out: 1.5 },
        _ => BaseKind::FlatDisk { radius: 1.0 },
    };
    Ok(Arc::new(build_base(k, GridSpec::new(nodes)).map_err(e)?))
}

/// Pulled-back mean curvature against curvatures of the embedded image meridian.
fn oracle_error(base: Arc<BaseSurface>, f: fn(f64) -> f64) -> Result<f64, String> {
    let g = NormalGraph::new(base.clone(), field(&base, f)).map_err(e)?;
    let image = g.image_profile();
    let n = base.len();
    let skip = (n - 1) / 10;
    let (mut err, mut scale) = (0.0_f64, 0.0_f64);
    for i in skip..n - skip {
        let k = revolution_curvatures(&image, i).map_err(e)?;
        err = err.max((graph_mean_curvature(&g)[i] - k.mean).abs());
        scale = scale.max(k.mean.abs());
    }
    Ok(err / scale)
}

fn criterion_4() -> Verdict {
    let cases: [Case; 5] = [
        (0, |t| 0.04 * (PI * t).sin()),
        (0, |t| 0.05 * t * (1.0 - t) * (1.0 + 2.0 * t)),
        (0, |t| 0.02 * (2.0 * PI * t).sin()),
        (1, |t| 0.05 * (PI * t).sin().powi(2)),
        (2, |t| 0.05 * (1.0 - t * t)),
    ];
    let mut ratios = Vec::new();
    for (kind, f) in cases {
        ratios.push(oracle_error(make(kind, 81)?, f)? / oracle_error(make(kind, 161)?, f)?);
    }
    let base = make(0, 201)?;
    let u = field(&base, |t| 0.04 * (PI * t).sin());
    let phi = field(&base, |t| (t * (1.0 - t)).powi(2) * (3.0 * t).cos());
    let exact = first_variation(&NormalGraph::new(base.clone(), u.clone()).map_err(e)?, &phi).map_err(e)?;
    let t = 1e-4;
    let area = |s: f64| -> Result<f64, String> {
        let v: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| a + s * b).collect();
        Ok(NormalGraph::new(base.clone(), v).map_err(e)?.area())
    };
    let fd = (area(t)? - area(-t)?) / (2.0 * t);
    let rel = (exact - fd).abs() / exact.abs();
    let ok = ratios.iter().all(|r| *r >= 3.5) && rel <= 1e-5;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    Ok((ok, format!("error ratios {}, first variation rel {rel:.2e}", shown.join(" "))))
}

fn disk() -> Result<Arc<BaseSurface>, String> {
    Ok(Arc::new(flat_disk_base(GridSpec::new(201)).map_err(e)?))
}

fn catenoid() -> Result<Arc<BaseSurface>, String> {
    Ok(Arc::new(stable_catenoid_base(1.0, 0.5, GridSpec::new(201)).map_err(e)?))
}

fn criterion_5() -> Verdict {
    let mut ok = true;
    let mut shown = Vec::new();
    for base in [disk()?, catenoid()?] {
        let (h, v): (Vec<f64>, Vec<f64>) = two_interface_sweep(base, 0.5, &default_h_values()).map_err(e)?.into_iter().unzip();
        let fit = fit_loglog(&h, &v).map_err(e)?;
        ok &= (fit.slope - 2.0).abs() <= 0.10;
        shown.push(format!("{:.4}", fit.slope));
    }
    Ok((ok, format!("slopes flat {}, catenoid {}", shown[0], shown[1])))
}

fn criterion_6() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut shown = Vec::new();
    for (name, base) in [("disk", disk()?), ("catenoid", catenoid()?)] {
        let sw = run_sweep(base, &default_h_values(), 3.0).map_err(e)?;
        ok &= sw.records.len() == 9;
        for (x, y, slope, tol) in [
            (Norm::HLinf, Norm::UC0, 1.0, 0.05),
            (Norm::HL2, Norm::AreaExcess, 2.0, 0.10),
            (Norm::DeltaWeak, Norm::UH1, 1.0, 0.05),
        ] {
            let fit = fit_estimate(&sw.records, x, y).map_err(e)?;
            ok &= (fit.slope - slope).abs() <= tol && fit.r2 >= 0.99;
            shown.push(format!("{name} {:.4} (r2 {:.6})", fit.slope, fit.r2));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    Ok((ok, format!("{}; {secs:.2} s", shown.join(", "))))
}

fn criterion_7() -> Verdict {
    let reps = flat_case_sweep(disk()?, &default_h_values()).map_err(e)?;
    let least = reps.iter().map(|(_, r)| r.slack_gradient.min(r.slack_area)).fold(f64::INFINITY, f64::min);
    let ok = reps.len() == 9 && reps.iter().all(|(_, r)| r.holds && r.slack_gradient >= 0.0 && r.slack_area >= 0.0);
    Ok((ok, format!("{} records, smallest slack {least:.3e}", reps.len())))
}

fn least_margin(b: &BoundarySamples) -> f64 {
    let all: Vec<&Vec<f64>> = b.points().collect();
    let mut least = f64::INFINITY;
    for x in b.points() {
        if let Some(c) = is_accessible_at(x, b) {
            let others: Vec<&Vec<f64>> = all.iter().copied().filter(|y| *y != x).collect();
            let m = if c.theta > 0.0 { cone_margin(&c.apex, &c.axis, c.theta, &others) } else { c.margin };
            least = least.min(m.min(c.margin));
        }
    }
    least
}

fn criterion_8() -> Verdict {
    let nested = fixtures::nested_circles(96);
    let rep = accessibility_report(&nested);
    let inner_blocked = rep[0].accessible == 0;
    let coaxial = fixtures::coaxial_circles(0.5, 96);
    let three = fixtures::three_circles(96);
    let good = totally_accessible(&accessibility_report(&coaxial)) && totally_accessible(&accessibility_report(&three));
    let margin = [&nested, &coaxial, &three].iter().map(|b| least_margin(b)).fold(f64::INFINITY, f64::min);
    let ok = inner_blocked && good && margin >= 0.0;
    Ok((ok, format!("inner accessible samples {}, others accessible {good}, least margin {margin:.3e}", rep[0].accessible)))
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0077_ed9e);
    let mut ok = true;
    let mut least = f64::INFINITY;
    for _ in 0..10_000 {
        let phi = rng.gen_range(1e-4..PI / 2.0 - 1e-6);
        let count = 2 * rng.gen_range(1..10) + 1;
        let angles: Vec<f64> = (0..count).map(|_| rng.gen_range(-phi..=phi)).collect();
        let w = wedge_sum_lemma(&angles, phi).map_err(e)?;
        ok &= w.sum_length > 1.0 && w.sum_length >= w.pairing_bound * (1.0 - 1e-12);
        least = least.min(w.sum_length);
    }
    Ok((ok, format!("10000 trials, smallest sum length {least:.6}")))
}

fn criterion_10() -> Verdict {
    let mut reps = Vec::new();
    for eps in [0.1, 0.05, 0.025] {
        reps.push(bubbling_family(1.0, eps).map_err(e)?);
    }
    let d1: Vec<f64> = reps.iter().map(|r| r.deficits.delta_p[0].1).collect();
    let away: Vec<f64> = reps.iter().map(|r| r.delta_inf_away).collect();
    let dual: Vec<f64> = reps.iter().map(|r| r.deficits.delta_dual_lb[0].1).collect();
    let last = &reps[2];
    let area_err = (last.area - last.limit_area).abs() / last.limit_area;
    let bounded = d1.iter().all(|v| *v <= 2.0 * d1[0] && *v >= 0.5 * d1[0]);
    let ok = bounded
        && away.windows(2).all(|w| w[1] < w[0])
        && dual.windows(2).all(|w| w[1] < w[0])
        && area_err <= 0.05;
    Ok((
        ok,
        format!(
            "delta_1 {:.3}/{:.3}/{:.3}, away {:.3e}/{:.3e}/{:.3e}, dual {:.3e}/{:.3e}/{:.3e}, area error {:.2}%",
            d1[0], d1[1], d1[2], away[0], away[1], away[2], dual[0], dual[1], dual[2], 100.0 * area_err
        ),
    ))
}

fn criterion_11() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_soapfilm"))
            .args(["check", "--suite", "all", "--seed", "12345"])
            .output()
            .map_err(e)
    };
    let (a, b) = (run()?, run()?);
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout;
    let summary = String::from_utf8_lossy(&a.stdout).lines().last().unwrap_or("").to_string();
    Ok((ok, format!("{summary}; outputs identical {}", a.stdout == b.stdout)))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("catenoid family and fold", criterion_1),
        ("stability split and disk calibration", criterion_2),
        ("singular catenoids", criterion_3),
        ("graph calculus oracles", criterion_4),
        ("two-interface expansion", criterion_5),
        ("sharp estimate exponents", criterion_6),
        ("flat-case inequality chain", criterion_7),
        ("accessibility fixtures", criterion_8),
        ("wedge-sum lemma", criterion_9),
        ("bubbling family", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f().unwrap_or_else(|err| (false, format!("error: {err}")));
        if !ok {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
