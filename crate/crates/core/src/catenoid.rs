//! Minimal surfaces spanned by two coaxial horizontal circles at `z = -sep/2`
//! (radius `r1`) and `z = +sep/2` (radius `r2`): the pair of disks, regular
//! catenoids, and singular catenoids made of two catenoid pieces and a floating
//! disk meeting at 120 degrees along a junction circle.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::surface::{build_base, catenoid_band_area, BaseKind, BaseSurface, GridSpec};

/// Two horizontal coaxial circles centred on the z-axis at `z = -sep/2` and `z = +sep/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoCircleBoundary {
    pub r1: f64,
    pub r2: f64,
    pub sep: f64,
}

impl TwoCircleBoundary {
    pub fn new(r1: f64, r2: f64, sep: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0 && sep > 0.0) || !(r1.is_finite() && r2.is_finite() && sep.is_finite()) {
            return Err(Error::Precondition(format!(
                "radii and separation must be positive (r1={r1}, r2={r2}, sep={sep})"
            )));
        }
        Ok(TwoCircleBoundary { r1, r2, sep })
    }

    fn equal_radii(&self) -> bool {
        (self.r1 - self.r2).abs() <= 1e-14 * self.r1.max(self.r2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    TwoDisks,
    Catenoid,
    SingularCatenoid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SolutionParams {
    TwoDisks {
        r1: f64,
        r2: f64,
    },
    /// `r = c cosh((z - z0)/c)`.
    Catenoid { c: f64, z0: f64 },
    /// Lower piece first. Each piece is `r = c cosh((z - z0)/c)`.
    Singular {
        c_out: [f64; 2],
        z0_out: [f64; 2],
        r_j: f64,
        floating_disk: bool,
    },
}

/// One member of the two-circle family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatenoidSolution {
    pub kind: SolutionKind,
    pub params: SolutionParams,
    pub area: f64,
    pub stability_eig: Option<f64>,
    pub residual: f64,
    #[serde(skip)]
    pub boundary: TwoCircleBoundary,
}

impl CatenoidSolution {
    pub fn catenoid_params(&self) -> Option<(f64, f64)> {
        match self.params {
            SolutionParams::Catenoid { c, z0 } => Some((c, z0)),
            _ => None,
        }
    }
}

/// Solutions plus the search intervals that were scanned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub solutions: Vec<CatenoidSolution>,
    pub diagnostics: Vec<String>,
}

impl FamilyReport {
    pub fn regular(&self) -> Vec<&CatenoidSolution> {
        self.solutions.iter().filter(|s| s.kind == SolutionKind::Catenoid).collect()
    }

    pub fn singular(&self) -> Vec<&CatenoidSolution> {
        self.solutions
            .iter()
            .filter(|s| s.kind == SolutionKind::SingularCatenoid)
            .collect()
    }
}

/// Bisection to machine precision on a bracket with `f(a) f(b) <= 0`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimisation on `[a, b]`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Roots of a function that is convex in `c` on a log-spaced bracket `[lo, hi]`:
/// locate the minimum by a scan plus golden section, then bisect each side.
fn convex_roots<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let grid: Vec<f64> = (0..samples)
        .map(|k| lo * (hi / lo).powf(k as f64 / (samples - 1) as f64))
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&c| f(c)).collect();
    let kmin = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);
    let a = grid[kmin.saturating_sub(1)];
    let b = grid[(kmin + 1).min(samples - 1)];
    let cmin = golden_min(f, a, b);
    let fmin = f(cmin);
    let mut roots = Vec::new();
    if fmin > 0.0 {
        return roots;
    }
    if fmin == 0.0 {
        roots.push(cmin);
        return roots;
    }
    if f(lo) > 0.0 {
        roots.push(bisect(f, lo, cmin));
    }
    if f(hi) > 0.0 {
        roots.push(bisect(f, cmin, hi));
    }
    roots
}

fn catenoid_residual(b: &TwoCircleBoundary, c: f64, z0: f64) -> f64 {
    let h = 0.5 * b.sep;
    let e1 = c * ((-h - z0) / c).cosh() - b.r1;
    let e2 = c * ((h - z0) / c).cosh() - b.r2;
    e1.abs().max(e2.abs())
}

/// Regular catenoids `(c, z0)` spanning the boundary, larger `c` first, plus a description of the scan.
pub fn regular_catenoids(b: &TwoCircleBoundary) -> (Vec<(f64, f64)>, String) {
    let h = 0.5 * b.sep;
    if b.equal_radii() {
        let r = b.r1;
        let lo = h / 700.0;
        let hi = r;
        let f = |c: f64| c * (h / c).cosh() - r;
        let mut roots = convex_roots(&f, lo, hi, 400);
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let diag = format!("regular catenoid: scanned c in [{lo:.6e}, {hi:.6e}] (400 log-spaced samples), {} root(s)", roots.len());
        return (roots.into_iter().map(|c| (c, 0.0)).collect(), diag);
    }
    // unequal radii: reduce to c on each branch of the lower boundary condition, then polish (c, z0)
    let cmax = b.r1.min(b.r2);
    let lo = h / 700.0;
    let mut out = Vec::new();
    for sigma in [1.0, -1.0] {
        let z0_of = |c: f64| -h + sigma * c * (b.r1 / c).max(1.0).acosh();
        let f = |c: f64| c * ((h - z0_of(c)) / c).cosh() - b.r2;
        let samples = 400;
        let grid: Vec<f64> = (0..samples)
            .map(|k| lo * (cmax / lo).powf(k as f64 / (samples - 1) as f64))
            .collect();
        for w in grid.windows(2) {
            let (fa, fb) = (f(w[0]), f(w[1]));
            if fa.is_finite() && fb.is_finite() && (fa < 0.0) != (fb < 0.0) {
                let c = bisect(f, w[0], w[1]);
                let (c, z0) = newton_polish(b, c, z0_of(c));
                if !out.iter().any(|&(cc, zz): &(f64, f64)| (cc - c).abs() < 1e-9 && (zz - z0).abs() < 1e-9) {
                    out.push((c, z0));
                }
            }
        }
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let diag = format!(
        "regular catenoid (unequal radii): scanned c in [{lo:.6e}, {cmax:.6e}] on both neck branches, {} root(s)",
        out.len()
    );
    (out, diag)
}

fn newton_polish(b: &TwoCircleBoundary, mut c: f64, mut z0: f64) -> (f64, f64) {
    let h = 0.5 * b.sep;
    for _ in 0..30 {
        let (w1, w2) = ((-h - z0) / c, (h - z0) / c);
        let f1 = c * w1.cosh() - b.r1;
        let f2 = c * w2.cosh() - b.r2;
        if f1.abs().max(f2.abs()) < 1e-15 * b.r1.max(b.r2) {
            break;
        }
        // d/dc [c cosh(w)] = cosh(w) - w sinh(w); d/dz0 = -sinh(w)
        let j = [
            [w1.cosh() - w1 * w1.sinh(), -w1.sinh()],
            [w2.cosh() - w2 * w2.sinh(), -w2.sinh()],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dc = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let dz = (j[0][0] * f2 - j[1][0] * f1) / det;
        c -= dc;
        z0 -= dz;
    }
    (c, z0)
}

/// Separation beyond which no regular catenoid spans the circles.
pub fn critical_separation(r1: f64, r2: f64) -> f64 {
    if (r1 - r2).abs() <= 1e-14 * r1.max(r2) {
        // maximiser x = r/c of 2c acosh(r/c) solves acosh(x) = x / sqrt(x^2 - 1)
        let x = bisect(|x| x.acosh() - x / (x * x - 1.0).sqrt(), 1.0 + 1e-9, 50.0);
        return 2.0 * r1 * x.acosh() / x;
    }
    let cmax = r1.min(r2);
    let d = |c: f64| c * ((r1 / c).max(1.0).acosh() + (r2 / c).max(1.0).acosh());
    let c = golden_min(|c| -d(c), 1e-9 * cmax, cmax);
    d(c)
}

fn stable_catenoid_area(b: &TwoCircleBoundary) -> Option<f64> {
    let (roots, _) = regular_catenoids(b);
    roots
        .first()
        .map(|&(c, z0)| catenoid_band_area(c, z0, -0.5 * b.sep, 0.5 * b.sep))
}

/// Separation at which the stable catenoid and the two disks have equal area.
pub fn goldschmidt_separation(r1: f64, r2: f64) -> Option<f64> {
    let dstar = critical_separation(r1, r2);
    let disks = PI * (r1 * r1 + r2 * r2);
    let excess = |d: f64| -> f64 {
        let b = TwoCircleBoundary { r1, r2, sep: d };
        stable_catenoid_area(&b).map_or(f64::INFINITY, |a| a - disks)
    };
    let hi = dstar * (1.0 - 1e-9);
    if excess(hi) <= 0.0 {
        return None;
    }
    Some(bisect(excess, 1e-6 * dstar, hi))
}

/// `asinh(1/sqrt 3)`: the meridian leaves the junction at 30 degrees from the vertical.
fn junction_angle_param() -> f64 {
    (1.0 / 3f64.sqrt()).asinh()
}

/// Sum of the three unit conormals along the junction circle (lower piece, upper piece, disk).
pub fn conormal_sum(params: &SolutionParams) -> Option<[f64; 2]> {
    let SolutionParams::Singular { c_out, z0_out, .. } = params else {
        return None;
    };
    // into-piece meridian tangent at z = 0 is (dr/dz * s, s)/norm with s = +1 upward, -1 downward
    let mut sum = [1.0, 0.0];
    for (k, s) in [(0usize, -1.0), (1usize, 1.0)] {
        let slope = ((0.0 - z0_out[k]) / c_out[k]).sinh();
        let t = [slope * s, s];
        let norm = t[0].hypot(t[1]);
        sum[0] -= t[0] / norm;
        sum[1] -= t[1] / norm;
    }
    Some(sum)
}

/// Singular catenoids for equal radii. The first entry has the larger junction radius.
pub fn solve_singular_catenoid(b: &TwoCircleBoundary) -> Result<Vec<CatenoidSolution>> {
    if !b.equal_radii() {
        return Err(Error::Unsupported(format!(
            "singular catenoids are only constructed for equal radii (r1={}, r2={})",
            b.r1, b.r2
        )));
    }
    let (r, h) = (b.r1, 0.5 * b.sep);
    let a0 = junction_angle_param();
    let f = |c: f64| c * (h / c + a0).cosh() - r;
    let (lo, hi) = (h / 700.0, r);
    let roots = convex_roots(&f, lo, hi, 400);
    if roots.is_empty() {
        return Err(Error::NoSolution(format!(
            "no junction configuration: scanned piece scale c in [{lo:.6e}, {hi:.6e}]"
        )));
    }
    let mut sols: Vec<CatenoidSolution> = roots
        .into_iter()
        .map(|c0| {
            let (c, z0_up) = polish_junction(r, h, c0, -c0 * a0);
            let r_j = c * (-z0_up / c).cosh();
            let params = SolutionParams::Singular {
                c_out: [c, c],
                z0_out: [-z0_up, z0_up],
                r_j,
                floating_disk: true,
            };
            let sum = conormal_sum(&params).unwrap();
            let boundary_err = (c * ((h - z0_up) / c).cosh() - r).abs();
            let residual = boundary_err.max(sum[0].hypot(sum[1]));
            let area = 2.0 * catenoid_band_area(c, z0_up, 0.0, h) + PI * r_j * r_j;
            CatenoidSolution {
                kind: SolutionKind::SingularCatenoid,
                params,
                area,
                stability_eig: None,
                residual,
                boundary: *b,
            }
        })
        .collect();
    sols.sort_by(|a, b| junction_radius(b).partial_cmp(&junction_radius(a)).unwrap());
    Ok(sols)
}

/// Newton on the upper piece: boundary interpolation and the 30-degree slope at `z = 0`.
fn polish_junction(r: f64, h: f64, mut c: f64, mut z0: f64) -> (f64, f64) {
    let target = 1.0 / 3f64.sqrt();
    for _ in 0..30 {
        let w = (h - z0) / c;
        let v = -z0 / c;
        let f1 = c * w.cosh() - r;
        let f2 = v.sinh() - target;
        if f1.abs() < 1e-15 * r && f2.abs() < 1e-16 {
            break;
        }
        let j = [
            [w.cosh() - w * w.sinh(), -w.sinh()],
            [-v.cosh() * v / c, -v.cosh() / c],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dc = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let dz = (j[0][0] * f2 - j[1][0] * f1) / det;
        c -= dc;
        z0 -= dz;
    }
    (c, z0)
}

pub fn junction_radius(sol: &CatenoidSolution) -> f64 {
    match sol.params {
        SolutionParams::Singular { r_j, .. } => r_j,
        _ => f64::NAN,
    }
}

/// All family members for the boundary. Stability eigenvalues are left empty; see
/// [`jacobi_smallest_eigenvalue`].
pub fn enumerate_family(b: &TwoCircleBoundary) -> FamilyReport {
    let mut solutions = vec![CatenoidSolution {
        kind: SolutionKind::TwoDisks,
        params: SolutionParams::TwoDisks { r1: b.r1, r2: b.r2 },
        area: PI * (b.r1 * b.r1 + b.r2 * b.r2),
        stability_eig: None,
        residual: 0.0,
        boundary: *b,
    }];
    let mut diagnostics = Vec::new();
    let (roots, diag) = regular_catenoids(b);
    diagnostics.push(diag);
    for (c, z0) in roots {
        solutions.push(CatenoidSolution {
            kind: SolutionKind::Catenoid,
            params: SolutionParams::Catenoid { c, z0 },
            area: catenoid_band_area(c, z0, -0.5 * b.sep, 0.5 * b.sep),
            stability_eig: None,
            residual: catenoid_residual(b, c, z0),
            boundary: *b,
        });
    }
    match solve_singular_catenoid(b) {
        Ok(s) => solutions.extend(s),
        Err(e) => diagnostics.push(format!("singular catenoid: {e}")),
    }
    FamilyReport {
        solutions,
        diagnostics,
    }
}

/// Default meridian resolution for stability eigenvalues.
pub const JACOBI_NODES: usize = 401;

/// Smallest eigenvalue per Fourier mode of `-Laplacian - |A|^2` with Dirichlet data on the
/// fixed boundary nodes, by shifted inverse iteration on the symmetric tridiagonal pencil.
pub fn jacobi_spectrum(base: &BaseSurface, modes: &[u32]) -> Result<Vec<f64>> {
    let n = base.len();
    let free: Vec<usize> = base.free_nodes().collect();
    let index_of = |i: usize| free.iter().position(|&k| k == i);
    let a2: Vec<f64> = base
        .nodes
        .iter()
        .map(|g| g.kappa[0] * g.kappa[0] + g.kappa[1] * g.kappa[1])
        .collect();
    let mut out = Vec::with_capacity(modes.len());
    for &m in modes {
        let mm = (m * m) as f64;
        let nf = free.len();
        let (mut lo, mut di, mut up) = (vec![0.0; nf], vec![0.0; nf], vec![0.0; nf]);
        for h in 0..n - 1 {
            let len = base.ds * base.half[h].speed;
            let k = base.half_weight[h] / (len * len);
            let (ia, ib) = (index_of(h), index_of(h + 1));
            if let Some(a) = ia {
                di[a] += k;
            }
            if let Some(b) = ib {
                di[b] += k;
            }
            if let (Some(a), Some(b)) = (ia, ib) {
                up[a] -= k;
                lo[b] -= k;
            }
        }
        let mut potential_min = f64::INFINITY;
        for (a, &i) in free.iter().enumerate() {
            let v = mm / (base.nodes[i].r * base.nodes[i].r) - a2[i];
            potential_min = potential_min.min(v);
            di[a] += base.area_weight[i] * v;
        }
        // symmetric scaling by the lumped mass
        let sq: Vec<f64> = free.iter().map(|&i| base.area_weight[i].sqrt()).collect();
        for a in 0..nf {
            di[a] /= sq[a] * sq[a];
            if a + 1 < nf {
                up[a] /= sq[a] * sq[a + 1];
                lo[a + 1] /= sq[a + 1] * sq[a];
            }
        }
        let shift = potential_min - 1.0;
        let shifted: Vec<f64> = di.iter().map(|d| d - shift).collect();
        let mut x: Vec<f64> = (0..nf).map(|a| 1.0 + 0.1 * ((a as f64) * 0.37).sin()).collect();
        let mut lambda = f64::NAN;
        for _ in 0..2000 {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            let y = solve_tridiagonal(&lo, &shifted, &up, &x)?;
            // Rayleigh quotient of the unshifted operator at the new iterate
            let ynorm2: f64 = y.iter().map(|v| v * v).sum();
            let mut ty = 0.0;
            for a in 0..nf {
                let mut s = di[a] * y[a];
                if a > 0 {
                    s += lo[a] * y[a - 1];
                }
                if a + 1 < nf {
                    s += up[a] * y[a + 1];
                }
                ty += y[a] * s;
            }
            let next = ty / ynorm2;
            x = y;
            if (next - lambda).abs() <= 1e-14 * next.abs().max(1.0) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        out.push(lambda);
    }
    Ok(out)
}

/// Meridian grid with `max|kappa| * spacing <= 0.05` and at least [`JACOBI_NODES`] nodes.
pub fn catenoid_grid(c: f64, z0: f64, z_min: f64, z_max: f64) -> GridSpec {
    let speed = ((z_min - z0) / c).cosh().max(((z_max - z0) / c).cosh());
    let needed = (20.0 * speed * (z_max - z_min) / c).ceil() as usize + 1;
    GridSpec::new(needed.max(JACOBI_NODES))
}

/// Smallest Jacobi eigenvalue over the modes `m = 0, 1, 2` of a regular catenoid.
pub fn jacobi_smallest_eigenvalue(sol: &CatenoidSolution) -> Result<f64> {
    let (c, z0) = sol
        .catenoid_params()
        .ok_or_else(|| Error::Precondition("stability eigenvalue needs a regular catenoid".into()))?;
    let h = 0.5 * sol.boundary.sep;
    jacobi_smallest_eigenvalue_with(sol, catenoid_grid(c, z0, -h, h))
}

pub fn jacobi_smallest_eigenvalue_with(sol: &CatenoidSolution, grid: GridSpec) -> Result<f64> {
    let (c, z0) = sol
        .catenoid_params()
        .ok_or_else(|| Error::Precondition("stability eigenvalue needs a regular catenoid".into()))?;
    let h = 0.5 * sol.boundary.sep;
    let base = build_base(
        BaseKind::Catenoid {
            c,
            z0,
            z_min: -h,
            z_max: h,
        },
        grid,
    )?;
    let spec = jacobi_spectrum(&base, &[0, 1, 2])?;
    Ok(spec.into_iter().fold(f64::INFINITY, f64::min))
}

/// Family with stability eigenvalues filled in for the regular catenoids.
pub fn enumerate_family_with_stability(b: &TwoCircleBoundary) -> Result<FamilyReport> {
    let mut report = enumerate_family(b);
    for s in report.solutions.iter_mut() {
        if s.kind == SolutionKind::Catenoid {
            s.stability_eig = Some(jacobi_smallest_eigenvalue(s)?);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disks_always_present() {
        let b = TwoCircleBoundary::new(1.0, 1.0, 2.0).unwrap();
        let rep = enumerate_family(&b);
        assert_eq!(rep.solutions[0].kind, SolutionKind::TwoDisks);
        assert!((rep.solutions[0].area - 2.0 * PI).abs() < 1e-15);
        assert!(rep.regular().is_empty());
    }

    #[test]
    fn unequal_radii_catenoids_interpolate() {
        let b = TwoCircleBoundary::new(1.0, 1.3, 0.4).unwrap();
        let (roots, _) = regular_catenoids(&b);
        assert_eq!(roots.len(), 2);
        for (c, z0) in roots {
            assert!(catenoid_residual(&b, c, z0) < 1e-10);
        }
    }

    #[test]
    fn singular_unequal_is_unsupported() {
        let b = TwoCircleBoundary::new(1.0, 1.3, 0.4).unwrap();
        assert!(matches!(solve_singular_catenoid(&b), Err(Error::Unsupported(_))));
    }
}
