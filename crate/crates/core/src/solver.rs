//! Prescribed mean curvature for normal graphs, the soap film with gravity, and the
//! two-interface equilibrium residual.
//!
//! The axisymmetric solver works on the discrete graph area of [`crate::graph`]: the
//! equation `H = f` is imposed as `dA/du_i = w_i f_i J_i / S_i`, and since `J = S prod(1 + kappa_j u)`
//! the right side is `w_i f_i prod(1 + kappa_j u_i)`. Newton uses the analytic area Hessian
//! and analytic derivatives of the target. A second discretization on a full polar grid
//! covers flat disks with arbitrary gravity direction.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, NormalGraph};
use crate::linalg::{max_abs, Banded};
use crate::surface::{BaseSurface, NodeGeom, ProfileCurve};

/// Physical input of the gravity film: `kappa2h = kappa^2 h` and the unit direction opposing gravity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GravityParams {
    pub kappa2h: f64,
    pub gravity_dir: [f64; 3],
}

impl GravityParams {
    pub fn new(kappa2h: f64) -> Result<Self> {
        Self::with_direction(kappa2h, [0.0, 0.0, 1.0])
    }

    pub fn with_direction(kappa2h: f64, gravity_dir: [f64; 3]) -> Result<Self> {
        if !(kappa2h >= 0.0) || !kappa2h.is_finite() {
            return Err(Error::Precondition(format!("kappa2h must be finite and >= 0, got {kappa2h}")));
        }
        let norm = gravity_dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition("gravity direction must be a unit vector".into()));
        }
        Ok(GravityParams { kappa2h, gravity_dir })
    }
}

/// Target mean curvature `f(node, u, du)` with its partial derivatives `(f, df/du, df/d(du))`,
/// where `du` is the meridian derivative of `u`.
pub trait TargetCurvature: Sync {
    fn eval(&self, node: &NodeGeom, u: f64, du: f64) -> (f64, f64, f64);
}

impl<F> TargetCurvature for F
where
    F: Fn(&NodeGeom, f64, f64) -> (f64, f64, f64) + Sync,
{
    fn eval(&self, node: &NodeGeom, u: f64, du: f64) -> (f64, f64, f64) {
        self(node, u, du)
    }
}

/// Constant target curvature.
#[derive(Debug, Clone, Copy)]
pub struct ConstantH(pub f64);

impl TargetCurvature for ConstantH {
    fn eval(&self, _: &NodeGeom, _: f64, _: f64) -> (f64, f64, f64) {
        (self.0, 0.0, 0.0)
    }
}

/// `f = kappa2h (nu_Psi . e3)` for an axisymmetric graph, with `sign = g . e3 = +-1`.
#[derive(Debug, Clone, Copy)]
pub struct AxialGravity {
    pub kappa2h: f64,
    pub sign: f64,
}

impl TargetCurvature for AxialGravity {
    fn eval(&self, g: &NodeGeom, u: f64, du: f64) -> (f64, f64, f64) {
        let k = self.kappa2h * self.sign;
        let a1 = 1.0 + g.kappa[0] * u;
        let q = du / a1;
        let s = (1.0 + q * q).sqrt();
        let b = g.normal[1] - q * g.tangent[1];
        let f = k * b / s;
        let f_q = k * (-g.tangent[1] / s - b * q / (s * s * s));
        (f, f_q * (-q * g.kappa[0] / a1), f_q / a1)
    }
}

/// Newton and continuation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Tolerance on `max |H - f|` over free nodes.
    pub tol: f64,
    pub max_newton: usize,
    pub max_continuation: usize,
    pub min_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_newton: 30,
            max_continuation: 20,
            min_step: 1e-6,
        }
    }
}

/// Result of a successful solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub graph: NormalGraph,
    pub residual_linf: f64,
    pub newton_iters: usize,
    pub continuation_steps: usize,
    /// Residual after each Newton iteration of the last solve.
    pub residual_history: Vec<f64>,
}

struct Residual {
    r: Vec<f64>,
    h_err: f64,
}

fn residual<T: TargetCurvature + ?Sized>(base: &BaseSurface, u: &[f64], target: &T) -> Residual {
    let grad = graph::area_gradient(base, u);
    let du = graph::nodal_slope(base, u);
    let mut r = vec![0.0; u.len()];
    let mut h_err: f64 = 0.0;
    for i in 0..u.len() {
        if base.boundary_mask[i] {
            r[i] = u[i];
            continue;
        }
        let g = &base.nodes[i];
        let p = (1.0 + g.kappa[0] * u[i]) * (1.0 + g.kappa[1] * u[i]);
        let (f, _, _) = target.eval(g, u[i], du[i]);
        r[i] = grad[i] - base.area_weight[i] * f * p;
        h_err = h_err.max((r[i] / (base.area_weight[i] * p)).abs());
    }
    Residual { r, h_err }
}

fn slope_stencil(base: &BaseSurface, i: usize) -> Vec<(usize, f64)> {
    let n = base.len();
    let ds = base.ds;
    let m = base.nodes[i].speed;
    if i == 0 && base.axis {
        let (r0, r1) = (base.nodes[0].r, base.nodes[1].r);
        let c = 2.0 * r0 * base.nodes[0].tangent[0] / (r1 * r1 - r0 * r0);
        vec![(0, -c), (1, c)]
    } else if i == 0 {
        let c = 1.0 / (2.0 * ds * m);
        vec![(0, -3.0 * c), (1, 4.0 * c), (2, -c)]
    } else if i == n - 1 {
        let c = 1.0 / (2.0 * ds * m);
        vec![(n - 1, 3.0 * c), (n - 2, -4.0 * c), (n - 3, c)]
    } else {
        let c = 1.0 / (2.0 * ds * m);
        vec![(i - 1, -c), (i + 1, c)]
    }
}

fn jacobian<T: TargetCurvature + ?Sized>(base: &BaseSurface, u: &[f64], target: &T) -> Banded {
    let n = u.len();
    let (lo, di, up) = graph::area_hessian(base, u);
    let du = graph::nodal_slope(base, u);
    let mut jac = Banded::zeros(n, 2, 2);
    for i in 0..n {
        if base.boundary_mask[i] {
            jac.add(i, i, 1.0);
            continue;
        }
        jac.add(i, i, di[i]);
        if i > 0 {
            jac.add(i, i - 1, lo[i]);
        }
        if i + 1 < n {
            jac.add(i, i + 1, up[i]);
        }
        let g = &base.nodes[i];
        let a = [1.0 + g.kappa[0] * u[i], 1.0 + g.kappa[1] * u[i]];
        let p = a[0] * a[1];
        let dp = g.kappa[0] * a[1] + g.kappa[1] * a[0];
        let (f, f_z, f_xi) = target.eval(g, u[i], du[i]);
        let w = base.area_weight[i];
        jac.add(i, i, -w * (f_z * p + f * dp));
        for (j, c) in slope_stencil(base, i) {
            jac.add(i, j, -w * f_xi * p * c);
        }
    }
    jac
}

/// Newton iteration from `u0` for `H_{Psi_u} = target`.
pub fn newton<T: TargetCurvature + ?Sized>(
    base: &BaseSurface,
    u0: Vec<f64>,
    target: &T,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, f64, usize, Vec<f64>)> {
    let mut u = u0;
    let kmax = base.max_abs_kappa();
    let mut res = residual(base, &u, target);
    let mut history = vec![res.h_err];
    for it in 0..=opts.max_newton {
        if res.h_err <= opts.tol {
            return Ok((u, res.h_err, it, history));
        }
        if it == opts.max_newton {
            break;
        }
        let step = jacobian(base, &u, target).solve(&res.r)?;
        for (ui, si) in u.iter_mut().zip(&step) {
            *ui -= si;
        }
        for (i, m) in base.boundary_mask.iter().enumerate() {
            if *m {
                u[i] = 0.0;
            }
        }
        if u.iter().any(|v| !v.is_finite()) || max_abs(&u) * kmax >= 1.0 {
            return Err(Error::NewtonDivergence {
                iterations: it + 1,
                residual: f64::INFINITY,
            });
        }
        res = residual(base, &u, target);
        history.push(res.h_err);
        if !res.h_err.is_finite() || res.h_err > 1e6 * history[0].max(1.0) {
            break;
        }
    }
    Err(Error::NewtonDivergence {
        iterations: history.len() - 1,
        residual: res.h_err,
    })
}

/// Solves `H_{Psi_u} = target` with `u = 0` on the boundary, starting from `u = 0`.
pub fn solve_pmc<T: TargetCurvature + ?Sized>(base: Arc<BaseSurface>, target: &T) -> Result<SolveReport> {
    solve_pmc_with(base, target, &SolveOptions::default())
}

pub fn solve_pmc_with<T: TargetCurvature + ?Sized>(
    base: Arc<BaseSurface>,
    target: &T,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let (u, res, iters, history) = newton(&base, vec![0.0; base.len()], target, opts)?;
    let graph = NormalGraph::new(base, u)?;
    Ok(SolveReport {
        graph,
        residual_linf: res,
        newton_iters: iters,
        continuation_steps: 1,
        residual_history: history,
    })
}

fn axial_sign(params: &GravityParams) -> Result<f64> {
    let d = params.gravity_dir;
    if d[0].abs() > 1e-14 || d[1].abs() > 1e-14 {
        return Err(Error::Unsupported(
            "axisymmetric films need gravity along the axis; use the polar solver for tilted flat disks".into(),
        ));
    }
    Ok(d[2].signum())
}

/// Soap film with gravity, `H = kappa2h nu . e3`, by continuation in `kappa2h` from 0.
pub fn solve_gravity_film(base: Arc<BaseSurface>, params: GravityParams) -> Result<SolveReport> {
    solve_gravity_film_with(base, params, &SolveOptions::default())
}

pub fn solve_gravity_film_with(base: Arc<BaseSurface>, params: GravityParams, opts: &SolveOptions) -> Result<SolveReport> {
    let sign = axial_sign(&params)?;
    let target_k = params.kappa2h;
    let mut u = vec![0.0; base.len()];
    let mut reached = 0.0;
    let mut step = target_k;
    let mut steps = 0;
    let mut last = (0.0, 0, Vec::new());
    let mut last_residual = f64::NAN;
    if target_k == 0.0 {
        let (u0, res, it, hist) = newton(&base, u, &AxialGravity { kappa2h: 0.0, sign }, opts)?;
        return Ok(SolveReport {
            graph: NormalGraph::new(base, u0)?,
            residual_linf: res,
            newton_iters: it,
            continuation_steps: 0,
            residual_history: hist,
        });
    }
    while reached < target_k {
        if steps >= opts.max_continuation || step < opts.min_step {
            return Err(Error::ContinuationFailure {
                reached,
                target: target_k,
                residual: last_residual,
            });
        }
        let trial = (reached + step).min(target_k);
        let target = AxialGravity { kappa2h: trial, sign };
        let attempt = newton(&base, u.clone(), &target, opts)
            .and_then(|(v, res, it, hist)| NormalGraph::new(base.clone(), v.clone()).map(|_| (v, res, it, hist)));
        match attempt {
            Ok((v, res, it, hist)) => {
                u = v;
                reached = trial;
                steps += 1;
                last = (res, it, hist);
                step *= 2.0;
            }
            Err(Error::NewtonDivergence { residual, .. }) => {
                last_residual = residual;
                step *= 0.5;
            }
            Err(Error::GraphRegime { value, .. }) => {
                last_residual = value;
                step *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    let graph = NormalGraph::new(base, u)?;
    Ok(SolveReport {
        graph,
        residual_linf: last.0,
        newton_iters: last.1,
        continuation_steps: steps,
        residual_history: last.2,
    })
}

/// `H_{M(alpha)}(x+) - H_{M(-beta)}(x-) - kappa2 (alpha + beta) nu . e3` at every node, both
/// interface curvatures taken with respect to the normal pointing out of the film.
///
/// Constant thicknesses use the closed-form offset curvatures; varying thicknesses are
/// evaluated on the embedded offset meridians.
pub fn two_interface_residual(base: &BaseSurface, alpha: &[f64], beta: &[f64], kappa2: f64) -> Result<Vec<f64>> {
    let n = base.len();
    if alpha.len() != n || beta.len() != n {
        return Err(Error::Precondition("thickness fields must match the grid".into()));
    }
    if alpha.iter().chain(beta).any(|v| !(*v >= 0.0)) {
        return Err(Error::Precondition("thicknesses must be nonnegative".into()));
    }
    let spread = |v: &[f64]| v.iter().copied().fold(f64::MIN, f64::max) - v.iter().copied().fold(f64::MAX, f64::min);
    let (h_plus, h_minus) = if spread(alpha) == 0.0 && spread(beta) == 0.0 {
        let plus = graph::offset_curvatures(base, alpha[0])?;
        let minus = graph::offset_curvatures(base, -beta[0])?;
        (plus.h_offset, minus.h_offset.iter().map(|h| -h).collect::<Vec<_>>())
    } else {
        (offset_mean_curvature(base, alpha, 1.0)?, offset_mean_curvature(base, beta, -1.0)?)
    };
    Ok((0..n)
        .map(|i| h_plus[i] - h_minus[i] - kappa2 * (alpha[i] + beta[i]) * base.nodes[i].normal[1])
        .collect())
}

/// Mean curvature of the meridian `p + side t nu`, oriented by `side nu`.
fn offset_mean_curvature(base: &BaseSurface, t: &[f64], side: f64) -> Result<Vec<f64>> {
    let kmax = base.max_abs_kappa();
    for (i, v) in t.iter().enumerate() {
        if v * kmax >= 1.0 {
            return Err(Error::FocalDistance {
                node: i,
                t: side * v,
                kappa: kmax,
            });
        }
    }
    let prof = base.profile();
    let curve = ProfileCurve {
        params: prof.params,
        r: base.nodes.iter().zip(t).map(|(g, v)| g.r + side * v * g.normal[0]).collect(),
        z: base.nodes.iter().zip(t).map(|(g, v)| g.z + side * v * g.normal[1]).collect(),
        boundary_flags: prof.boundary_flags,
    };
    (0..base.len())
        .map(|i| {
            let d = curve.derivatives(i)?;
            let m = d[0].hypot(d[1]);
            // orientation fixed by the base normal, not by the curve's own convention
            let nu = [d[1] / m, -d[0] / m];
            let g = &base.nodes[i];
            let sigma = side * (nu[0] * g.normal[0] + nu[1] * g.normal[1]).signum();
            let r = curve.r[i];
            if r <= 0.0 {
                return Err(Error::DegenerateNode { index: i });
            }
            let merid = sigma * (d[0] * d[3] - d[1] * d[2]) / (m * m * m);
            Ok(merid + sigma * d[1] / (m * r))
        })
        .collect()
}

/// Target for the full polar solver on a flat disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarTarget {
    Constant(f64),
    Gravity(GravityParams),
}

/// Solution of the flat-disk problem on a polar grid with `nr` rings (the last on the
/// boundary) and `ntheta` angles, plus a center node.
#[derive(Debug, Clone)]
pub struct PolarSolution {
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub center: f64,
    /// `u[(i - 1) * ntheta + j]` at radius `i dr`, angle `j dtheta`, for `i = 1..=nr`.
    pub u: Vec<f64>,
    pub residual_linf: f64,
    pub newton_iters: usize,
    pub residual_history: Vec<f64>,
}

impl PolarSolution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        if i == 0 {
            self.center
        } else {
            self.u[(i - 1) * self.ntheta + j % self.ntheta]
        }
    }

    /// Largest spread over angles within one ring.
    pub fn angular_variation(&self) -> f64 {
        (1..=self.nr)
            .map(|i| {
                let ring = &self.u[(i - 1) * self.ntheta..i * self.ntheta];
                ring.iter().copied().fold(f64::MIN, f64::max) - ring.iter().copied().fold(f64::MAX, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Rows `(i, j, s, theta, u)` with `s` the radius.
    pub fn grid_rows(&self) -> Vec<(usize, usize, f64, f64, f64)> {
        let dr = self.radius / self.nr as f64;
        let dt = 2.0 * std::f64::consts::PI / self.ntheta as f64;
        let mut rows = vec![(0, 0, 0.0, 0.0, self.center)];
        for i in 1..=self.nr {
            for j in 0..self.ntheta {
                rows.push((i, j, i as f64 * dr, j as f64 * dt, self.value(i, j)));
            }
        }
        rows
    }
}

struct Polar {
    nr: usize,
    nt: usize,
    dr: f64,
    dt: f64,
}

impl Polar {
    /// Unknown index of node `(i, j)`; `None` on the boundary ring.
    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        if i == 0 {
            Some(0)
        } else if i >= self.nr {
            None
        } else {
            Some(1 + (i - 1) * self.nt + j % self.nt)
        }
    }

    fn len(&self) -> usize {
        1 + (self.nr - 1) * self.nt
    }

    fn val(&self, x: &[f64], i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| x[k])
    }

    fn jm(&self, j: usize) -> usize {
        (j + self.nt - 1) % self.nt
    }
}

/// Sparse linear form `sum c_k x_k`.
type Lin = Vec<(Option<usize>, f64)>;

fn eval_lin(l: &Lin, x: &[f64]) -> f64 {
    l.iter().map(|(k, c)| k.map_or(0.0, |k| c * x[k])).sum()
}

fn polar_assemble(g: &Polar, x: &[f64], target: PolarTarget, want_jac: bool) -> (Vec<f64>, Vec<f64>, Option<Banded>) {
    let n = g.len();
    let mut r = vec![0.0; n];
    let mut jac = want_jac.then(|| Banded::zeros(n, 2 * g.nt, 2 * g.nt));
    let (dr, dt) = (g.dr, g.dt);
    let mut vol = vec![0.0; n];
    vol[0] = std::f64::consts::PI * (0.5 * dr).powi(2);
    for i in 1..g.nr {
        for j in 0..g.nt {
            vol[g.idx(i, j).unwrap()] = i as f64 * dr * dr * dt;
        }
    }

    // flux L d_n / S leaving node `a` toward its neighbour
    let face = |a: usize, dn: Lin, dtan: Lin, len: f64, other: Option<usize>, r: &mut Vec<f64>, jac: &mut Option<Banded>| {
        let (vn, vt) = (eval_lin(&dn, x), eval_lin(&dtan, x));
        let s = (1.0 + vn * vn + vt * vt).sqrt();
        let flux = len * vn / s;
        r[a] -= flux;
        if let Some(b) = other {
            r[b] += flux;
        }
        if let Some(jm) = jac.as_mut() {
            let fn_ = len * (1.0 + vt * vt) / (s * s * s);
            let ft = -len * vn * vt / (s * s * s);
            for (k, c) in dn.iter().map(|(k, c)| (k, fn_ * c)).chain(dtan.iter().map(|(k, c)| (k, ft * c))) {
                if let Some(k) = *k {
                    jm.add(a, k, -c);
                    if let Some(b) = other {
                        jm.add(b, k, c);
                    }
                }
            }
        }
    };

    for j in 0..g.nt {
        let jp = (j + 1) % g.nt;
        let jm = g.jm(j);
        // center to ring 1
        let rh = 0.5 * dr;
        let dn = vec![(g.idx(1, j), 1.0 / dr), (Some(0), -1.0 / dr)];
        let dtan = vec![(g.idx(1, jp), 0.25 / (dt * dr)), (g.idx(1, jm), -0.25 / (dt * dr))];
        face(0, dn, dtan, rh * dt, g.idx(1, j), &mut r, &mut jac);
        for i in 1..g.nr {
            let a = g.idx(i, j).unwrap();
            let ri = i as f64 * dr;
            // radial face toward ring i + 1
            let rh = ri + 0.5 * dr;
            let dn = vec![(g.idx(i + 1, j), 1.0 / dr), (Some(a), -1.0 / dr)];
            let c = 0.25 / (dt * rh);
            let dtan = vec![
                (g.idx(i, jp), c),
                (g.idx(i, jm), -c),
                (g.idx(i + 1, jp), c),
                (g.idx(i + 1, jm), -c),
            ];
            face(a, dn, dtan, rh * dt, g.idx(i + 1, j), &mut r, &mut jac);
            // angular face toward j + 1
            let dn = vec![(g.idx(i, jp), 1.0 / (ri * dt)), (Some(a), -1.0 / (ri * dt))];
            let c = 0.25 / dr;
            let inner = |jj: usize| if i == 1 { Some(0) } else { g.idx(i - 1, jj) };
            let dtan = vec![
                (g.idx(i + 1, j), c),
                (g.idx(i + 1, jp), c),
                (inner(j), -c),
                (inner(jp), -c),
            ];
            face(a, dn, dtan, dr, g.idx(i, jp), &mut r, &mut jac);
        }
    }

    // forcing
    let mut h_err: Vec<f64> = vec![0.0; n];
    let nodes: Vec<(usize, Lin, Lin)> = {
        let mut v = Vec::with_capacity(n);
        let mut gx = Vec::new();
        let mut gy = Vec::new();
        for j in 0..g.nt {
            let th = j as f64 * dt;
            let c = 2.0 / (g.nt as f64 * dr);
            gx.push((g.idx(1, j), c * th.cos()));
            gy.push((g.idx(1, j), c * th.sin()));
        }
        v.push((0, gx, gy));
        for i in 1..g.nr {
            for j in 0..g.nt {
                let th = j as f64 * dt;
                let ri = i as f64 * dr;
                let inner = if i == 1 { Some(0) } else { g.idx(i - 1, j) };
                let ur = [(g.idx(i + 1, j), 0.5 / dr), (inner, -0.5 / dr)];
                let ut = [(g.idx(i, j + 1), 0.5 / (dt * ri)), (g.idx(i, g.jm(j)), -0.5 / (dt * ri))];
                let (c, s) = (th.cos(), th.sin());
                let ux: Lin = ur.iter().map(|(k, w)| (*k, w * c)).chain(ut.iter().map(|(k, w)| (*k, -w * s))).collect();
                let uy: Lin = ur.iter().map(|(k, w)| (*k, w * s)).chain(ut.iter().map(|(k, w)| (*k, w * c))).collect();
                v.push((g.idx(i, j).unwrap(), ux, uy));
            }
        }
        v
    };
    for (a, ux, uy) in &nodes {
        let (f, fx, fy) = match target {
            PolarTarget::Constant(h0) => (h0, 0.0, 0.0),
            PolarTarget::Gravity(p) => {
                let (vx, vy) = (eval_lin(ux, x), eval_lin(uy, x));
                let d = p.gravity_dir;
                let s = (1.0 + vx * vx + vy * vy).sqrt();
                let b = d[2] - d[0] * vx - d[1] * vy;
                let k = p.kappa2h;
                (
                    k * b / s,
                    k * (-d[0] / s - b * vx / (s * s * s)),
                    k * (-d[1] / s - b * vy / (s * s * s)),
                )
            }
        };
        r[*a] -= f * vol[*a];
        if let Some(jm) = jac.as_mut() {
            for (k, c) in ux.iter().map(|(k, c)| (k, fx * c)).chain(uy.iter().map(|(k, c)| (k, fy * c))) {
                if let Some(k) = *k {
                    jm.add(*a, k, -c * vol[*a]);
                }
            }
        }
    }
    for a in 0..n {
        h_err[a] = r[a] / vol[a];
    }
    (r, h_err, jac)
}

/// Solves the flat-disk problem `-div(grad u / sqrt(1 + |grad u|^2)) = f` on a polar grid.
pub fn solve_flat_polar(radius: f64, nr: usize, ntheta: usize, target: PolarTarget, opts: &SolveOptions) -> Result<PolarSolution> {
    if nr < 3 || ntheta < 4 || !(radius > 0.0) {
        return Err(Error::Precondition("polar grid needs nr >= 3, ntheta >= 4 and a positive radius".into()));
    }
    let g = Polar {
        nr,
        nt: ntheta,
        dr: radius / nr as f64,
        dt: 2.0 * std::f64::consts::PI / ntheta as f64,
    };
    let mut x = vec![0.0; g.len()];
    let mut history = Vec::new();
    for it in 0..=opts.max_newton {
        let (r, h, jac) = polar_assemble(&g, &x, target, true);
        let err = max_abs(&h);
        history.push(err);
        if err <= opts.tol {
            let mut u = Vec::with_capacity(nr * ntheta);
            for i in 1..=nr {
                for j in 0..ntheta {
                    u.push(g.val(&x, i, j));
                }
            }
            return Ok(PolarSolution {
                radius,
                nr,
                ntheta,
                center: x[0],
                u,
                residual_linf: err,
                newton_iters: it,
                residual_history: history,
            });
        }
        if it == opts.max_newton || !err.is_finite() {
            break;
        }
        let step = jac.expect("jacobian requested").solve(&r)?;
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
    }
    Err(Error::NewtonDivergence {
        iterations: history.len() - 1,
        residual: *history.last().unwrap_or(&f64::NAN),
    })
}
