//! Estimate sweeps over gravity films, log-log slope fits, the flat-case inequality chain
//! and the bubbling profile family.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::catenoid::{enumerate_family, jacobi_spectrum, TwoCircleBoundary};
use crate::deficits::{
    circle_points, dirichlet_energy, dual_deficit_lower_bound, graph_integral_deficits, sample_gap, weak_deficit, DeficitMeta,
    DeficitReport, SampledSurface,
};
use crate::error::{Error, Result};
use crate::graph::{discrete_area, nodal_slope, NormalGraph};
use crate::solver::{solve_gravity_film, two_interface_residual, GravityParams};
use crate::surface::{build_base, catenoid_band_area, fmt17, BaseKind, BaseSurface, BoundaryFlag, GridSpec, ProfileCurve};

/// `n` log-spaced values from `a` to `b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Default sweep: nine values over `[1e-3, 1e-1]`.
pub fn default_h_values() -> Vec<f64> {
    logspace(1e-3, 1e-1, 9)
}

/// Norms of one gravity film.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub h: f64,
    pub u_c0: f64,
    pub u_h1: f64,
    pub area_excess: f64,
    #[serde(rename = "H_linf")]
    pub h_linf: f64,
    #[serde(rename = "H_l2")]
    pub h_l2: f64,
    #[serde(rename = "H_lp")]
    pub h_lp: f64,
    pub delta_weak: f64,
    pub grid: usize,
}

/// Sweep records plus the largest values dropped because their film left the graph regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub p: f64,
    pub records: Vec<SweepRecord>,
    pub dropped: Vec<f64>,
}

/// Measured quantity of a [`SweepRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Norm {
    H,
    UC0,
    UH1,
    AreaExcess,
    HLinf,
    HL2,
    HLp,
    DeltaWeak,
}

impl Norm {
    pub fn of(self, r: &SweepRecord) -> f64 {
        match self {
            Norm::H => r.h,
            Norm::UC0 => r.u_c0,
            Norm::UH1 => r.u_h1,
            Norm::AreaExcess => r.area_excess,
            Norm::HLinf => r.h_linf,
            Norm::HL2 => r.h_l2,
            Norm::HLp => r.h_lp,
            Norm::DeltaWeak => r.delta_weak,
        }
    }
}

/// Stable catenoid spanning two unit-scaled coaxial circles, as a base surface.
pub fn stable_catenoid_base(radius: f64, sep: f64, grid: GridSpec) -> Result<BaseSurface> {
    let b = TwoCircleBoundary::new(radius, radius, sep)?;
    let fam = enumerate_family(&b);
    let (c, z0) = fam
        .regular()
        .iter()
        .filter_map(|s| s.catenoid_params())
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::NoSolution(format!("no catenoid spans circles of radius {radius} at separation {sep}")))?;
    build_base(
        BaseKind::Catenoid {
            c,
            z0,
            z_min: -0.5 * sep,
            z_max: 0.5 * sep,
        },
        grid,
    )
}

/// Smallest Jacobi eigenvalue over the first three Fourier modes; flat bases are stable
/// and skip the eigenvalue.
pub fn stability_margin(base: &BaseSurface) -> Result<Option<f64>> {
    if base.is_flat() {
        return Ok(None);
    }
    let spec = jacobi_spectrum(base, &[0, 1, 2])?;
    Ok(Some(spec.into_iter().fold(f64::INFINITY, f64::min)))
}

/// Norms of the gravity film at `kappa2h = h`.
pub fn sweep_record(base: &Arc<BaseSurface>, h: f64, p: f64) -> Result<SweepRecord> {
    let rep = solve_gravity_film(base.clone(), GravityParams::new(h)?)?;
    Ok(record_of(&rep.graph, h, p))
}

/// Norms of a graph: `u` on the base, `H` on the image, `delta(u)` from the dual problem.
pub fn record_of(g: &NormalGraph, h: f64, p: f64) -> SweepRecord {
    let base = &g.base;
    let u = &g.u;
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let u_h1 = (base.integrate(&u2) + dirichlet_energy(base, u)).sqrt();
    let (h_linf, norms) = graph_integral_deficits(g, &[2.0, p]);
    SweepRecord {
        h,
        u_c0: u.iter().fold(0.0, |m, v| m.max(v.abs())),
        u_h1,
        area_excess: discrete_area(base, u) - discrete_area(base, &vec![0.0; u.len()]),
        h_linf,
        h_l2: norms[0].1,
        h_lp: norms[1].1,
        delta_weak: weak_deficit(g).unwrap_or(f64::NAN),
        grid: base.len(),
    }
}

/// Solves the gravity film for every `h` in parallel. Refuses unstable bases; the largest
/// values are dropped if their films leave the graph regime.
pub fn run_sweep(base: Arc<BaseSurface>, hs: &[f64], p: f64) -> Result<Sweep> {
    if let Some(lambda) = stability_margin(&base)? {
        if !(lambda > 0.0) {
            return Err(Error::Precondition(format!(
                "base is not strictly stable (smallest Jacobi eigenvalue {lambda:.6}); the estimates need a strictly stable minimal surface"
            )));
        }
    }
    if !(p >= 1.0) {
        return Err(Error::Precondition("integrability exponent p must be at least 1".into()));
    }
    let mut order: Vec<f64> = hs.to_vec();
    order.sort_by(f64::total_cmp);
    let results: Vec<(f64, Result<SweepRecord>)> = order.par_iter().map(|&h| (h, sweep_record(&base, h, p))).collect();
    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut failed = false;
    for (h, r) in results {
        match r {
            Ok(rec) if !failed => records.push(rec),
            Ok(_) => return Err(Error::Precondition(format!("sweep failed below h = {h}; not a regime exit at the top of the range"))),
            Err(Error::GraphRegime { .. }) | Err(Error::ContinuationFailure { .. }) => {
                failed = true;
                dropped.push(h);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Sweep { p, records, dropped })
}

/// Writes the sweep CSV.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Input(e.to_string());
    wr.write_record(["h", "u_c0", "u_h1", "area_excess", "H_linf", "H_l2", "H_lp", "delta_weak", "grid"])
        .map_err(io)?;
    for r in records {
        let mut row: Vec<String> = [r.h, r.u_c0, r.u_h1, r.area_excess, r.h_linf, r.h_l2, r.h_lp, r.delta_weak]
            .iter()
            .map(|v| fmt17(*v))
            .collect();
        row.push(r.grid.to_string());
        wr.write_record(&row).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Input(e.to_string()))
}

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: [f64; 2],
}

/// Fits `log y = slope log x + intercept` over arbitrary positive pairs.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::Precondition(format!("need at least 5 points, got {}", x.len().min(y.len()))));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Precondition(format!("log-log fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let window = [x.iter().copied().fold(f64::INFINITY, f64::min), x.iter().copied().fold(0.0, f64::max)];
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
        window,
    })
}

pub fn fit_estimate(records: &[SweepRecord], x: Norm, y: Norm) -> Result<SlopeFit> {
    let xs: Vec<f64> = records.iter().map(|r| x.of(r)).collect();
    let ys: Vec<f64> = records.iter().map(|r| y.of(r)).collect();
    fit_loglog(&xs, &ys)
}

/// Largest ratio `y / x` over a sweep: the measured constant of `y <= C x`.
pub fn measured_constant(records: &[SweepRecord], f: impl Fn(&SweepRecord) -> (f64, f64)) -> f64 {
    records
        .iter()
        .map(|r| {
            let (y, x) = f(r);
            if x > 0.0 {
                y / x
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Measured constants of one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConstants {
    /// `||u||_C0 / ||H||_L2`: the graph form of the C0 estimate with `p = 2`.
    pub c0_over_h: f64,
    /// `||u||_H1 / delta(u)`.
    pub h1_over_delta: f64,
    /// `delta(u)^2 / int H^2`.
    pub delta2_over_h2: f64,
    /// `area excess / int H^2`.
    pub area_over_h2: f64,
}

pub fn sweep_constants(records: &[SweepRecord]) -> SweepConstants {
    SweepConstants {
        c0_over_h: measured_constant(records, |r| (r.u_c0, r.h_l2)),
        h1_over_delta: measured_constant(records, |r| (r.u_h1, r.delta_weak)),
        delta2_over_h2: measured_constant(records, |r| (r.delta_weak * r.delta_weak, r.h_l2 * r.h_l2)),
        area_over_h2: measured_constant(records, |r| (r.area_excess, r.h_l2 * r.h_l2)),
    }
}

/// Both flat-case inequalities evaluated on one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatCaseReport {
    /// `||u||_C0 + Lip(u)`.
    pub eps: f64,
    pub dirichlet: f64,
    pub delta: f64,
    pub area_excess: f64,
    /// `delta ||grad u|| - (1/3 - eps^2) int |grad u|^2`.
    pub slack_gradient: f64,
    /// `delta^2 - (1/3 - eps^2) (area(Psi_u) - area(N))`.
    pub slack_area: f64,
    pub holds: bool,
}

pub fn flat_case_constant_check(g: &NormalGraph) -> Result<FlatCaseReport> {
    let base = &g.base;
    if !base.is_flat() {
        return Err(Error::Precondition("flat-case check needs a flat base".into()));
    }
    let lip = nodal_slope(base, &g.u).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let eps = g.u.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + lip;
    if eps * eps >= 1.0 / 3.0 {
        return Err(Error::GraphRegime {
            node: 0,
            what: "||u||_C0 + Lip(u)",
            value: eps,
            limit: (1.0_f64 / 3.0).sqrt(),
        });
    }
    let factor = 1.0 / 3.0 - eps * eps;
    let dirichlet = dirichlet_energy(base, &g.u);
    let delta = weak_deficit(g)?;
    let area_excess = discrete_area(base, &g.u) - discrete_area(base, &vec![0.0; g.u.len()]);
    let slack_gradient = delta * dirichlet.sqrt() - factor * dirichlet;
    let slack_area = delta * delta - factor * area_excess;
    Ok(FlatCaseReport {
        eps,
        dirichlet,
        delta,
        area_excess,
        slack_gradient,
        slack_area,
        holds: slack_gradient >= 0.0 && slack_area >= 0.0,
    })
}

/// Flat-case check on the gravity film at every `h` of a sweep over a flat base.
pub fn flat_case_sweep(base: Arc<BaseSurface>, hs: &[f64]) -> Result<Vec<(f64, FlatCaseReport)>> {
    hs.par_iter()
        .map(|&h| {
            let rep = solve_gravity_film(base.clone(), GravityParams::new(h)?)?;
            Ok((h, flat_case_constant_check(&rep.graph)?))
        })
        .collect()
}

/// Two-interface residual of a thin film of half-thickness `h` around the gravity film at
/// fixed `kappa^2 h = k`: max over free nodes of the residual with `alpha = beta = h`.
pub fn two_interface_sweep(base: Arc<BaseSurface>, k: f64, hs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let rep = solve_gravity_film(base, GravityParams::new(k)?)?;
    let m = rep.graph.image_base();
    let free: Vec<usize> = m.free_nodes().collect();
    hs.iter()
        .map(|&h| {
            let t = vec![h; m.len()];
            let r = two_interface_residual(&m, &t, &t, k / h)?;
            Ok((h, free.iter().map(|&i| r[i].abs()).fold(0.0, f64::max)))
        })
        .collect()
}

/// One meridian sample of the bubbling profile.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    r: f64,
    z: f64,
    phi: f64,
    h: f64,
}

/// Path builder in the convention `(r', z') = (cos phi, sin phi)`, `nu = (-sin phi, cos phi)`,
/// `H = -phi' - sin(phi)/r`.
struct Path {
    nodes: Vec<Node>,
}

impl Path {
    fn last(&self) -> Node {
        *self.nodes.last().expect("path starts with a node")
    }

    fn line(&mut self, length: f64, step: f64) {
        let n = (length / step).ceil().max(1.0) as usize;
        let a = self.last();
        for k in 1..=n {
            let s = length * k as f64 / n as f64;
            let r = a.r + s * a.phi.cos();
            self.nodes.push(Node {
                r,
                z: a.z + s * a.phi.sin(),
                phi: a.phi,
                h: -a.phi.sin() / r,
            });
        }
    }

    /// Circular arc turning by `turn` over `length`.
    fn arc(&mut self, turn: f64, length: f64, step: f64) {
        let n = (length / step).ceil().max(4.0) as usize;
        let a = self.last();
        let k = turn / length;
        for j in 1..=n {
            let s = length * j as f64 / n as f64;
            let phi = a.phi + k * s;
            let r = a.r + (phi.sin() - a.phi.sin()) / k;
            let z = a.z - (phi.cos() - a.phi.cos()) / k;
            self.nodes.push(Node { r, z, phi, h: -k - phi.sin() / r });
        }
    }
}

/// Output of [`bubbling_family`].
#[derive(Debug, Clone, Serialize)]
pub struct BubblingReport {
    pub eps: f64,
    pub circle_radius: f64,
    pub separation: f64,
    pub profile: ProfileCurve,
    /// `sup |H|` outside the `eps`-neighborhood of the lower circle.
    pub delta_inf_away: f64,
    pub deficits: DeficitReport,
    pub area: f64,
    /// `area(K) + 2 area(D)`.
    pub limit_area: f64,
    /// Radii of the circles where the surface crosses the boundary of the `eps`-neighborhood.
    pub crossing_radii: Vec<f64>,
    pub crossing_length: f64,
}

/// Angle of the meridian of `r = c cosh((z - z0)/c)` traversed upward, at height `z`.
fn catenoid_angle(c: f64, z0: f64, z: f64) -> f64 {
    1f64.atan2(((z - z0) / c).sinh())
}

fn rk4_minimal(start: Node, z_top: f64, step: f64) -> Result<Vec<Node>> {
    let rhs = |s: [f64; 3]| [s[2].cos(), s[2].sin(), -s[2].sin() / s[0]];
    let mut out = Vec::new();
    let mut y = [start.r, start.z, start.phi];
    for _ in 0..1_000_000 {
        if !(y[2] > 0.0 && y[2] < PI && y[0] > 0.0) {
            return Err(Error::NoSolution("minimal sheet turned back before reaching the upper circle".into()));
        }
        let remaining = (z_top - y[1]) / y[2].sin();
        let ds = step.min(remaining);
        let adv = |y: [f64; 3], k: [f64; 3], f: f64| [y[0] + f * k[0], y[1] + f * k[1], y[2] + f * k[2]];
        let k1 = rhs(y);
        let k2 = rhs(adv(y, k1, 0.5 * ds));
        let k3 = rhs(adv(y, k2, 0.5 * ds));
        let k4 = rhs(adv(y, k3, ds));
        for d in 0..3 {
            y[d] += ds / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        out.push(Node {
            r: y[0],
            z: y[1],
            phi: y[2],
            h: 0.0,
        });
        if (z_top - y[1]).abs() <= 1e-13 * z_top.abs().max(1.0) {
            return Ok(out);
        }
    }
    Err(Error::NoSolution("minimal sheet integration did not reach the upper circle".into()))
}

/// Revolution surface bubbling onto a double disk at the lower circle of a coaxial pair.
///
/// Starting at the lower circle, the meridian runs inward along a flat sheet, climbs through
/// a small catenoidal neck joined by fillets of length `eps/4`, runs back outward on a flat
/// sheet just above the first one to `eps/4` past the circle, turns sharply upward with radius
/// `eps/4` and finally follows a minimal meridian to the upper circle, shot to land on it.
/// Mean curvature is known in closed form on each piece.
pub fn bubbling_family(circle_radius: f64, eps: f64) -> Result<BubblingReport> {
    let r = circle_radius;
    if !(r > 0.0 && eps > 0.0 && eps <= 0.2 * r) {
        return Err(Error::Precondition(format!(
            "neck scale must lie in (0, 0.2 * radius] = (0, {}] to embed, got {eps}",
            0.2 * r
        )));
    }
    let d = 0.5 * r;
    let boundary = TwoCircleBoundary::new(r, r, d)?;
    let (c, z0) = enumerate_family(&boundary)
        .regular()
        .iter()
        .filter_map(|s| s.catenoid_params())
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::NoSolution("no stable catenoid for the bubbling boundary".into()))?;

    let r0 = eps * r;
    let alpha = eps * eps;
    let fillet = 0.25 * eps;
    let fine = eps / 64.0;
    let coarse = r / 800.0;

    let mut path = Path {
        nodes: vec![Node {
            r,
            z: -0.5 * d,
            phi: PI,
            h: 0.0,
        }],
    };
    // lower sheet, ending where the fillet lands on the neck radius
    path.line(r - r0 - fillet * alpha.sin() / alpha, coarse);
    path.arc(-alpha, fillet, fine);
    // catenoidal neck r = a cosh t, z = a t, uniform in arc length a sinh t
    let a = r0 * alpha.sin();
    let big_t = (1.0 / alpha.tan()).asinh();
    let start = path.last();
    let zc = start.z + a * big_t;
    let neck_len = 2.0 * a * big_t.sinh();
    let n_neck = 200;
    for k in 1..=n_neck {
        let sigma = -a * big_t.sinh() + neck_len * k as f64 / n_neck as f64;
        let t = (sigma / a).asinh();
        path.nodes.push(Node {
            r: a * t.cosh(),
            z: zc + a * t,
            phi: 1f64.atan2(t.sinh()),
            h: 0.0,
        });
    }
    path.arc(-alpha, fillet, fine);
    let upper = path.last();
    path.line(r + 0.25 * eps - upper.r, coarse.min(eps / 8.0));
    let turn_start = path.last();

    // shoot the turning angle so the minimal sheet lands on the upper circle
    let land = |phi_t: f64| -> Result<(f64, Vec<Node>)> {
        let mut p = Path {
            nodes: vec![turn_start],
        };
        p.arc(phi_t, 0.25 * eps * phi_t, fine);
        let tail = rk4_minimal(p.last(), 0.5 * d, coarse.min(eps / 8.0))?;
        let end = tail.last().copied().unwrap_or(p.last());
        p.nodes.extend(tail);
        Ok((end.r - r, p.nodes))
    };
    let mut x0 = catenoid_angle(c, z0, -0.5 * d);
    let mut x1 = x0 + 0.02;
    let mut f0 = land(x0)?.0;
    let mut f1 = land(x1)?.0;
    for _ in 0..60 {
        if f1.abs() < 1e-12 || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2.clamp(1e-3, PI - 1e-3);
        f1 = land(x1)?.0;
    }
    if f1.abs() > 1e-9 {
        return Err(Error::NoSolution(format!("shooting to the upper circle missed by {f1:e}")));
    }
    let (_, tail) = land(x1)?;
    path.nodes.extend(tail.into_iter().skip(1));
    let nodes = path.nodes;

    // midpoint quadrature on each segment
    let mut mid_r = Vec::new();
    let mut mid_z = Vec::new();
    let mut mid_n = Vec::new();
    let mut mid_w = Vec::new();
    let mut mid_h = Vec::new();
    for s in nodes.windows(2) {
        let (p, q) = (s[0], s[1]);
        let len = (q.r - p.r).hypot(q.z - p.z);
        if len == 0.0 {
            continue;
        }
        let rm = 0.5 * (p.r + q.r);
        let phi = 0.5 * (p.phi + q.phi);
        mid_r.push(rm);
        mid_z.push(0.5 * (p.z + q.z));
        mid_n.push([-phi.sin(), phi.cos()]);
        mid_w.push(2.0 * PI * rm * len);
        mid_h.push(0.5 * (p.h + q.h));
    }
    let gamma1 = [r, -0.5 * d];
    let dist = |rr: f64, zz: f64| (rr - gamma1[0]).hypot(zz - gamma1[1]);
    let delta_inf_away = mid_r
        .iter()
        .zip(&mid_z)
        .zip(&mid_h)
        .filter(|((rr, zz), _)| dist(**rr, **zz) > eps)
        .fold(0.0_f64, |m, (_, h)| m.max(h.abs()));
    let delta_inf = mid_h.iter().fold(0.0_f64, |m, h| m.max(h.abs()));
    let delta_1: f64 = mid_h.iter().zip(&mid_w).map(|(h, w)| h.abs() * w).sum();
    let delta_2: f64 = mid_h.iter().zip(&mid_w).map(|(h, w)| h * h * w).sum::<f64>().sqrt();
    let area: f64 = mid_w.iter().sum();
    let limit_area = catenoid_band_area(c, z0, -0.5 * d, 0.5 * d) + 2.0 * PI * r * r;

    let mut crossing_radii = Vec::new();
    for s in nodes.windows(2) {
        let (fa, fb) = (dist(s[0].r, s[0].z) - eps, dist(s[1].r, s[1].z) - eps);
        if (fa < 0.0) != (fb < 0.0) {
            let t = fa / (fa - fb);
            crossing_radii.push(s[0].r + t * (s[1].r - s[0].r));
        }
    }
    let crossing_length = crossing_radii.iter().map(|rc| 2.0 * PI * rc).sum();

    let ntheta = 512;
    let surface = SampledSurface::revolve(&mid_r, &mid_z, &mid_n, &mid_w, ntheta);
    let mut gamma = circle_points(r, -0.5 * d, ntheta);
    gamma.extend(circle_points(r, 0.5 * d, ntheta));
    let dual = dual_deficit_lower_bound(&surface, &gamma, sample_gap(&gamma[..ntheta]), f64::INFINITY)?;

    let mut params = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    for (i, n) in nodes.iter().enumerate() {
        if i > 0 {
            acc += (n.r - nodes[i - 1].r).hypot(n.z - nodes[i - 1].z);
        }
        params.push(acc);
    }
    let keep: Vec<usize> = (0..nodes.len()).filter(|&i| i == 0 || params[i] > params[i - 1]).collect();
    let profile = ProfileCurve::new(
        keep.iter().map(|&i| params[i]).collect(),
        keep.iter().map(|&i| nodes[i].r).collect(),
        keep.iter().map(|&i| nodes[i].z).collect(),
        [BoundaryFlag::Fixed, BoundaryFlag::Fixed],
    )?;

    Ok(BubblingReport {
        eps,
        circle_radius: r,
        separation: d,
        profile,
        delta_inf_away,
        deficits: DeficitReport {
            delta_inf,
            delta_p: vec![(1.0, delta_1), (2.0, delta_2)],
            delta_weak: None,
            delta_dual_lb: vec![(f64::INFINITY, dual.value)],
            meta: DeficitMeta {
                nodes: nodes.len(),
                samples: surface.len(),
                dictionary_size: dual.dictionary_size,
            },
        },
        area,
        limit_area,
        crossing_radii,
        crossing_length,
    })
}

/// Default flat and catenoid bases used by the sweeps.
pub fn flat_disk_base(grid: GridSpec) -> Result<BaseSurface> {
    build_base(BaseKind::FlatDisk { radius: 1.0 }, grid)
}
