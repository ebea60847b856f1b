use std::sync::Arc;

use soapfilm::catenoid::{enumerate_family, TwoCircleBoundary};
use soapfilm::graph::NormalGraph;
use soapfilm::lab::*;
use soapfilm::solver::{solve_gravity_film, GravityParams};
use soapfilm::surface::{build_base, BaseKind, GridSpec};

fn disk(nodes: usize) -> Arc<soapfilm::surface::BaseSurface> {
    Arc::new(flat_disk_base(GridSpec::new(nodes)).unwrap())
}

fn catenoid(nodes: usize) -> Arc<soapfilm::surface::BaseSurface> {
    Arc::new(stable_catenoid_base(1.0, 0.5, GridSpec::new(nodes)).unwrap())
}

#[test]
fn disk_sweep_has_positive_area_excess() {
    let sw = run_sweep(disk(201), &default_h_values(), 3.0).unwrap();
    assert_eq!(sw.records.len(), 9);
    assert!(sw.dropped.is_empty());
    assert!(sw.records.iter().all(|r| r.area_excess > 0.0));
}

#[test]
fn zero_load_gives_zero_norms() {
    let sw = run_sweep(disk(101), &[0.0], 3.0).unwrap();
    let r = &sw.records[0];
    for v in [r.u_c0, r.u_h1, r.area_excess, r.h_linf, r.h_l2, r.h_lp, r.delta_weak] {
        assert_eq!(v, 0.0);
    }
}

#[test]
fn estimate_exponents() {
    for base in [disk(201), catenoid(201)] {
        let sw = run_sweep(base, &default_h_values(), 3.0).unwrap();
        for (x, y, slope, tol) in [
            (Norm::HLinf, Norm::UC0, 1.0, 0.05),
            (Norm::HL2, Norm::AreaExcess, 2.0, 0.10),
            (Norm::DeltaWeak, Norm::UH1, 1.0, 0.05),
            (Norm::HL2, Norm::DeltaWeak, 1.0, 0.05),
        ] {
            let fit = fit_estimate(&sw.records, x, y).unwrap();
            assert!((fit.slope - slope).abs() <= tol && fit.r2 >= 0.99, "{y:?} vs {x:?}: {fit:?}");
        }
    }
}

#[test]
fn sweeps_are_grid_converged() {
    for (coarse, fine) in [(disk(201), disk(401)), (catenoid(201), catenoid(401))] {
        let a = run_sweep(coarse, &default_h_values(), 3.0).unwrap();
        let b = run_sweep(fine, &default_h_values(), 3.0).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            for n in [Norm::UC0, Norm::UH1, Norm::AreaExcess, Norm::HL2, Norm::HLp, Norm::DeltaWeak] {
                let (x, y) = (n.of(ra), n.of(rb));
                assert!((x - y).abs() <= 0.01 * y.abs(), "{n:?}: {x} vs {y}");
            }
        }
        for (x, y) in [(Norm::HLinf, Norm::UC0), (Norm::HL2, Norm::AreaExcess), (Norm::DeltaWeak, Norm::UH1)] {
            let fa = fit_estimate(&a.records, x, y).unwrap();
            let fb = fit_estimate(&b.records, x, y).unwrap();
            assert!((fa.slope - fb.slope).abs() <= 0.02);
        }
    }
}

#[test]
fn measured_constants_are_bounded() {
    let sw = run_sweep(catenoid(201), &default_h_values(), 3.0).unwrap();
    let c = sweep_constants(&sw.records);
    for r in &sw.records {
        assert!(r.u_h1 <= c.h1_over_delta * r.delta_weak * (1.0 + 1e-12));
        assert!(r.delta_weak.powi(2) <= c.delta2_over_h2 * r.h_l2.powi(2) * (1.0 + 1e-12));
    }
    // the ratio barely moves across two decades, so one constant serves the sweep
    let ratios: Vec<f64> = sw.records.iter().map(|r| r.u_h1 / r.delta_weak).collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1.01);
}

#[test]
fn unstable_catenoid_is_refused() {
    let b = TwoCircleBoundary::new(1.0, 1.0, 0.5).unwrap();
    let (c, z0) = enumerate_family(&b)
        .regular()
        .iter()
        .filter_map(|s| s.catenoid_params())
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    let base = build_base(BaseKind::Catenoid { c, z0, z_min: -0.25, z_max: 0.25 }, GridSpec::new(801)).unwrap();
    let err = run_sweep(Arc::new(base), &default_h_values(), 3.0).unwrap_err();
    assert!(err.to_string().contains("strictly stable"));
}

#[test]
fn fit_rejects_bad_input() {
    let sw = run_sweep(disk(101), &default_h_values()[..4], 3.0).unwrap();
    assert!(fit_estimate(&sw.records, Norm::HLinf, Norm::UC0).is_err());
    assert!(fit_loglog(&[1.0, 2.0, 3.0, 4.0, 0.0], &[1.0; 5]).is_err());
    let fit = fit_loglog(&[1.0, 2.0, 4.0, 8.0, 16.0], &[3.0, 12.0, 48.0, 192.0, 768.0]).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept - 3f64.ln()).abs() < 1e-12 && fit.r2 > 1.0 - 1e-12);
}

#[test]
fn flat_case_chain_holds() {
    let base = disk(201);
    let g = solve_gravity_film(base.clone(), GravityParams::new(0.05).unwrap()).unwrap().graph;
    let rep = flat_case_constant_check(&g).unwrap();
    assert!(rep.holds && rep.slack_gradient > 0.0 && rep.slack_area > 0.0);

    let doubled = NormalGraph::new(base.clone(), g.u.iter().map(|v| 2.0 * v).collect()).unwrap();
    let rep2 = flat_case_constant_check(&doubled).unwrap();
    assert!(rep2.holds && rep2.slack_gradient > 0.0);

    let zero = NormalGraph::new(base.clone(), vec![0.0; base.len()]).unwrap();
    let rep0 = flat_case_constant_check(&zero).unwrap();
    assert!(rep0.holds && rep0.slack_gradient == 0.0 && rep0.slack_area == 0.0);

    let curved = NormalGraph::new(catenoid(101), vec![0.0; 101]).unwrap();
    assert!(flat_case_constant_check(&curved).is_err());
}

#[test]
fn two_interface_residual_is_second_order() {
    for base in [disk(201), catenoid(201)] {
        let (h, v): (Vec<f64>, Vec<f64>) = two_interface_sweep(base, 0.5, &default_h_values()).unwrap().into_iter().unzip();
        let fit = fit_loglog(&h, &v).unwrap();
        assert!((fit.slope - 2.0).abs() <= 0.1 && fit.r2 >= 0.99, "{fit:?}");
    }
}

#[test]
fn sweep_csv_layout() {
    let sw = run_sweep(disk(51), &[0.01, 0.02], 3.0).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&sw.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "h,u_c0,u_h1,area_excess,H_linf,H_l2,H_lp,delta_weak,grid");
    assert_eq!(lines.count(), 2);
}

#[test]
fn bubbling_family_limits() {
    let reps: Vec<BubblingReport> = [0.1, 0.05, 0.025].iter().map(|&e| bubbling_family(1.0, e).unwrap()).collect();
    for w in reps.windows(2) {
        assert!(w[1].delta_inf_away < w[0].delta_inf_away);
        assert!(w[1].deficits.delta_dual_lb[0].1 < w[0].deficits.delta_dual_lb[0].1);
    }
    let l1: Vec<f64> = reps.iter().map(|r| r.deficits.delta_p[0].1).collect();
    assert!(l1.iter().all(|v| *v < 20.0 && *v > 1.0), "{l1:?}");
    let first = &reps[0];
    assert_eq!(first.crossing_radii.len(), 3);
    let target = 3.0 * 2.0 * std::f64::consts::PI;
    assert!((first.crossing_length - target).abs() <= 0.1 * target);
    let last = reps.last().unwrap();
    assert!((last.area - last.limit_area).abs() <= 0.05 * last.limit_area);
    // the sharp turn carries a mean curvature of order 1/eps
    assert!(last.deficits.delta_inf > 100.0);
}

#[test]
fn bubbling_rejects_large_neck() {
    assert!(bubbling_family(1.0, 0.3).is_err());
    assert!(bubbling_family(1.0, 0.0).is_err());
}
