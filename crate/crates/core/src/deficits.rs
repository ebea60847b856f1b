//! Almost-minimality deficits: sup and `L^p` norms of the mean curvature, the weak graph
//! deficit `delta(u)` as a dual norm, and a certified lower bound for the duality deficit.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::NormalGraph;
use crate::linalg::conjugate_gradient;
use crate::surface::BaseSurface;

/// Computed deficits of one surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitReport {
    pub delta_inf: f64,
    /// `(p, ||H||_{L^p})`.
    pub delta_p: Vec<(f64, f64)>,
    pub delta_weak: Option<f64>,
    /// `(p, lower bound of delta_{-p})`; `p = inf` is serialized as `null`.
    pub delta_dual_lb: Vec<(f64, f64)>,
    pub meta: DeficitMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitMeta {
    pub nodes: usize,
    pub samples: usize,
    pub dictionary_size: usize,
}

/// `(delta_inf, [(p, delta_p)])` of a nodal mean-curvature field.
pub fn integral_deficits(surface: &BaseSurface, h: &[f64], ps: &[f64]) -> (f64, Vec<(f64, f64)>) {
    let delta_inf = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let delta_p = ps
        .iter()
        .map(|&p| {
            if p.is_infinite() {
                (p, delta_inf)
            } else {
                let pow: Vec<f64> = h.iter().map(|v| v.abs().powf(p)).collect();
                (p, surface.integrate(&pow).powf(1.0 / p))
            }
        })
        .collect();
    (delta_inf, delta_p)
}

/// Deficits of a graph measured on its image surface.
pub fn graph_integral_deficits(g: &NormalGraph, ps: &[f64]) -> (f64, Vec<(f64, f64)>) {
    integral_deficits(&g.image_base(), &g.graph_h, ps)
}

/// Dirichlet energy `sum_h W_h ((phi_{h+1} - phi_h)/len_h)^2` of an axisymmetric field.
pub fn dirichlet_energy(base: &BaseSurface, phi: &[f64]) -> f64 {
    (0..base.half.len())
        .map(|h| {
            let len = base.ds * base.half[h].speed;
            base.half_weight[h] * ((phi[h + 1] - phi[h]) / len).powi(2)
        })
        .sum()
}

/// The maximizer direction `w` of the weak deficit together with `delta(u) = ||grad w||_{L^2}`.
///
/// The first-variation functional of an axisymmetric graph only sees the angular mean of a
/// test function, and averaging does not increase the Dirichlet energy, so the supremum is
/// attained among axisymmetric fields.
pub fn weak_deficit_with_field(g: &NormalGraph) -> Result<(f64, Vec<f64>)> {
    let base = &g.base;
    let free: Vec<usize> = base.free_nodes().collect();
    let m = free.len();
    if m == 0 {
        return Ok((0.0, vec![0.0; base.len()]));
    }
    let mut slot = vec![usize::MAX; base.len()];
    for (k, &i) in free.iter().enumerate() {
        slot[i] = k;
    }
    let coef: Vec<f64> = (0..base.half.len())
        .map(|h| {
            let len = base.ds * base.half[h].speed;
            base.half_weight[h] / (len * len)
        })
        .collect();
    let mut diag = vec![0.0; m];
    for (h, c) in coef.iter().enumerate() {
        for i in [h, h + 1] {
            if slot[i] != usize::MAX {
                diag[slot[i]] += c;
            }
        }
    }
    if diag.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Configuration("singular stiffness matrix; refine the grid".into()));
    }
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; m];
        for (h, c) in coef.iter().enumerate() {
            let (a, b) = (slot[h], slot[h + 1]);
            let xa = if a == usize::MAX { 0.0 } else { x[a] };
            let xb = if b == usize::MAX { 0.0 } else { x[b] };
            let d = c * (xb - xa);
            if a != usize::MAX {
                y[a] -= d;
            }
            if b != usize::MAX {
                y[b] += d;
            }
        }
        y
    };
    let rhs: Vec<f64> = free.iter().map(|&i| g.area_gradient[i]).collect();
    let out = conjugate_gradient(apply, &diag, &rhs, 1e-10, 20 * m + 100)?;
    let value: f64 = out.x.iter().zip(&rhs).map(|(a, b)| a * b).sum();
    let mut w = vec![0.0; base.len()];
    for (k, &i) in free.iter().enumerate() {
        w[i] = out.x[k];
    }
    Ok((value.max(0.0).sqrt(), w))
}

/// Weak deficit `delta(u)`: the dual norm of the first variation on `H^1_0(N)`.
pub fn weak_deficit(g: &NormalGraph) -> Result<f64> {
    weak_deficit_with_field(g).map(|(d, _)| d)
}

/// Points of an embedded surface with unit normals and area weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSurface {
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SampledSurface {
    /// Revolves meridian samples `(r, z)` with meridian normals `(n_r, n_z)` and band weights
    /// (already integrated over the angle) into `ntheta` rotated copies.
    pub fn revolve(r: &[f64], z: &[f64], normal: &[[f64; 2]], weights: &[f64], ntheta: usize) -> Self {
        let cap = r.len() * ntheta;
        let mut s = SampledSurface {
            points: Vec::with_capacity(cap),
            normals: Vec::with_capacity(cap),
            weights: Vec::with_capacity(cap),
        };
        for k in 0..ntheta {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / ntheta as f64;
            let (c, sn) = (th.cos(), th.sin());
            for i in 0..r.len() {
                s.points.push([r[i] * c, r[i] * sn, z[i]]);
                s.normals.push([normal[i][0] * c, normal[i][0] * sn, normal[i][1]]);
                s.weights.push(weights[i] / ntheta as f64);
            }
        }
        s
    }

    pub fn from_base(base: &BaseSurface, ntheta: usize) -> Self {
        let r: Vec<f64> = base.nodes.iter().map(|g| g.r).collect();
        let z: Vec<f64> = base.nodes.iter().map(|g| g.z).collect();
        let n: Vec<[f64; 2]> = base.nodes.iter().map(|g| g.normal).collect();
        Self::revolve(&r, &z, &n, &base.area_weight, ntheta)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

/// Points on the horizontal circle of radius `r` at height `z`.
pub fn circle_points(r: f64, z: f64, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

/// Direction part of a dictionary field, in bump coordinates `y = (x - c)/rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    Constant(usize),
    Radial,
    Rotation(usize),
}

impl FieldKind {
    const ALL: [FieldKind; 7] = [
        FieldKind::Constant(0),
        FieldKind::Constant(1),
        FieldKind::Constant(2),
        FieldKind::Radial,
        FieldKind::Rotation(0),
        FieldKind::Rotation(1),
        FieldKind::Rotation(2),
    ];

    /// Norm class: 0 constant, 1 radial, 2 rotation.
    pub fn class(self) -> usize {
        match self {
            FieldKind::Constant(_) => 0,
            FieldKind::Radial => 1,
            FieldKind::Rotation(_) => 2,
        }
    }
}

/// `X(x) = beta(|y|) V(y)` with `beta(t) = (1 - t^2)^3` on the unit ball and `y = (x - c)/rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DictionaryField {
    pub center: [f64; 3],
    pub rho: f64,
    pub kind: FieldKind,
}

/// Jacobian `dX_i/dy_j` of `beta V` in bump coordinates; zero outside the unit ball.
fn bump_jacobian(kind: FieldKind, y: [f64; 3]) -> [[f64; 3]; 3] {
    let t2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let mut m = [[0.0; 3]; 3];
    if t2 >= 1.0 {
        return m;
    }
    let beta = (1.0 - t2).powi(3);
    let dbeta = [-6.0 * y[0] * (1.0 - t2).powi(2), -6.0 * y[1] * (1.0 - t2).powi(2), -6.0 * y[2] * (1.0 - t2).powi(2)];
    let (v, dv): ([f64; 3], [[f64; 3]; 3]) = match kind {
        FieldKind::Constant(k) => {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            (e, [[0.0; 3]; 3])
        }
        FieldKind::Radial => (y, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        FieldKind::Rotation(k) => {
            // e_k x y and its (skew) Jacobian
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let v = [e[1] * y[2] - e[2] * y[1], e[2] * y[0] - e[0] * y[2], e[0] * y[1] - e[1] * y[0]];
            let dv = [[0.0, -e[2], e[1]], [e[2], 0.0, -e[0]], [-e[1], e[0], 0.0]];
            (v, dv)
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = v[i] * dbeta[j] + beta * dv[i][j];
        }
    }
    m
}

const NORM_GRID: usize = 64;

fn unit_norms_table() -> &'static Vec<[f64; 3]> {
    // Frobenius norms of the three field classes at every quadrature point
    static TABLE: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 2.0 / NORM_GRID as f64;
        let mut out = Vec::with_capacity(NORM_GRID * NORM_GRID * NORM_GRID);
        for a in 0..NORM_GRID {
            for b in 0..NORM_GRID {
                for c in 0..NORM_GRID {
                    let y = [-1.0 + (a as f64 + 0.5) * h, -1.0 + (b as f64 + 0.5) * h, -1.0 + (c as f64 + 0.5) * h];
                    let mut f = [0.0; 3];
                    for (cls, kind) in [FieldKind::Constant(0), FieldKind::Radial, FieldKind::Rotation(2)].into_iter().enumerate() {
                        let m = bump_jacobian(kind, y);
                        f[cls] = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
                    }
                    out.push(f);
                }
            }
        }
        out
    })
}

/// `||grad_y (beta V)||_{L^p}` over the unit ball by midpoint quadrature on a `64^3` grid,
/// using the Frobenius norm of the Jacobian. Rotations about different axes share one value.
pub fn unit_gradient_norm(kind: FieldKind, p: f64) -> f64 {
    let cls = kind.class();
    let table = unit_norms_table();
    if p.is_infinite() {
        return table.iter().map(|f| f[cls]).fold(0.0, f64::max);
    }
    let vol = (2.0 / NORM_GRID as f64).powi(3);
    (table.iter().map(|f| f[cls].powf(p)).sum::<f64>() * vol).powf(1.0 / p)
}

fn rho_scale(rho: f64, p: f64) -> f64 {
    if p.is_infinite() {
        1.0 / rho
    } else {
        rho.powf(3.0 / p - 1.0)
    }
}

/// `||grad X||_{L^p(R^3)}` of a dictionary field: `rho^(3/p - 1)` times the unit-bump norm.
pub fn field_gradient_norm(field: &DictionaryField, p: f64) -> f64 {
    rho_scale(field.rho, p) * unit_gradient_norm(field.kind, p)
}

/// `int_M div^M X`, with `div^M X = div X - nu . (grad X) nu`.
pub fn tangential_divergence_integral(surface: &SampledSurface, field: &DictionaryField) -> f64 {
    (0..surface.len()).map(|k| divergence_term(surface, field, k)).sum()
}

fn divergence_term(surface: &SampledSurface, field: &DictionaryField, k: usize) -> f64 {
    let (x, nu, w) = (surface.points[k], surface.normals[k], surface.weights[k]);
    let inv = 1.0 / field.rho;
    let y = [(x[0] - field.center[0]) * inv, (x[1] - field.center[1]) * inv, (x[2] - field.center[2]) * inv];
    if y[0] * y[0] + y[1] * y[1] + y[2] * y[2] >= 1.0 {
        return 0.0;
    }
    let m = bump_jacobian(field.kind, y);
    let tr = m[0][0] + m[1][1] + m[2][2];
    let mut nmn = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            nmn += nu[i] * m[i][j] * nu[j];
        }
    }
    w * (tr - nmn) * inv
}

/// Uniform cell index of the sample points, so a bump only visits nearby samples.
struct Buckets {
    lo: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    start: Vec<usize>,
    order: Vec<usize>,
}

impl Buckets {
    /// Cells depend on the surface only, so every dictionary sums in the same order.
    fn new(surface: &SampledSurface) -> Self {
        let (lo, hi) = surface.bounding_box();
        let diam = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt();
        let cell = (diam / 64.0).max(1e-12);
        let dims = [0, 1, 2].map(|d| (((hi[d] - lo[d]) / cell).floor() as usize + 1).min(4096));
        let cell_of = |x: &[f64; 3]| -> usize {
            let c = [0, 1, 2].map(|d| (((x[d] - lo[d]) / cell) as usize).min(dims[d] - 1));
            (c[0] * dims[1] + c[1]) * dims[2] + c[2]
        };
        let ncell = dims[0] * dims[1] * dims[2];
        let mut count = vec![0usize; ncell + 1];
        let ids: Vec<usize> = surface.points.iter().map(cell_of).collect();
        for &c in &ids {
            count[c + 1] += 1;
        }
        for c in 0..ncell {
            count[c + 1] += count[c];
        }
        let mut fill = count.clone();
        let mut order = vec![0; ids.len()];
        for (k, &c) in ids.iter().enumerate() {
            order[fill[c]] = k;
            fill[c] += 1;
        }
        Buckets {
            lo,
            cell,
            dims,
            start: count,
            order,
        }
    }

    /// Same sum as [`tangential_divergence_integral`], restricted to cells meeting the support.
    fn divergence_integral(&self, surface: &SampledSurface, field: &DictionaryField) -> f64 {
        let range = |d: usize| {
            let a = ((field.center[d] - field.rho - self.lo[d]) / self.cell).floor().max(0.0) as usize;
            let b = ((field.center[d] + field.rho - self.lo[d]) / self.cell).floor();
            if b < 0.0 {
                return (1, 0);
            }
            (a, (b as usize).min(self.dims[d] - 1))
        };
        let (rx, ry, rz) = (range(0), range(1), range(2));
        let mut sum = 0.0;
        for i in rx.0..=rx.1 {
            for j in ry.0..=ry.1 {
                for k in rz.0..=rz.1 {
                    let c = (i * self.dims[1] + j) * self.dims[2] + k;
                    for &p in &self.order[self.start[c]..self.start[c + 1]] {
                        sum += divergence_term(surface, field, p);
                    }
                }
            }
        }
        sum
    }
}

/// Smallest distance from `x` to the sampled boundary.
fn distance_to(points: &[[f64; 3]], x: [f64; 3]) -> f64 {
    points
        .iter()
        .map(|p| ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Fields at scales `2^-k diam`, `k = 1..=levels`, centred on a `5^3` lattice over the
/// bounding box, kept only when the support stays at least one radius plus the boundary
/// sample gap away from the boundary.
pub fn dictionary(surface: &SampledSurface, boundary: &[[f64; 3]], boundary_gap: f64, levels: u32) -> Vec<DictionaryField> {
    let (lo, hi) = surface.bounding_box();
    let diam = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt();
    let mut out = Vec::new();
    for k in 1..=levels {
        let rho = diam * 0.5_f64.powi(k as i32);
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let t = |i: usize, d: usize| lo[d] + (i as f64 + 0.5) / 5.0 * (hi[d] - lo[d]);
                    let center = [t(a, 0), t(b, 1), t(c, 2)];
                    if distance_to(boundary, center) < rho + boundary_gap {
                        continue;
                    }
                    for kind in FieldKind::ALL {
                        out.push(DictionaryField { center, rho, kind });
                    }
                }
            }
        }
    }
    out
}

/// Largest normalized tangential divergence over the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualBound {
    pub p: f64,
    pub value: f64,
    pub best: Option<DictionaryField>,
    pub dictionary_size: usize,
}

/// Lower bound of `delta_{-p}` over a given dictionary.
pub fn dual_bound_over(surface: &SampledSurface, fields: &[DictionaryField], p: f64) -> Result<DualBound> {
    if fields.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let unit = [
        unit_gradient_norm(FieldKind::Constant(0), p),
        unit_gradient_norm(FieldKind::Radial, p),
        unit_gradient_norm(FieldKind::Rotation(0), p),
    ];
    let buckets = Buckets::new(surface);
    let (value, idx) = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let norm = rho_scale(f.rho, p) * unit[f.kind.class()];
            (buckets.divergence_integral(surface, f).abs() / norm, i)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(DualBound {
        p,
        value,
        best: fields.get(idx).copied(),
        dictionary_size: fields.len(),
    })
}

/// Certified lower bound of `delta_{-p}` using the default five-level dictionary.
pub fn dual_deficit_lower_bound(surface: &SampledSurface, boundary: &[[f64; 3]], boundary_gap: f64, p: f64) -> Result<DualBound> {
    let fields = dictionary(surface, boundary, boundary_gap, 5);
    dual_bound_over(surface, &fields, p)
}

/// Deficits of a base surface of revolution with its own nodal mean curvature. The boundary
/// consists of the circles at the non-axis ends of the meridian. Dual lower bounds use at
/// least `ntheta` angular samples, raised so that the smallest bump spans eight samples.
pub fn surface_deficits(base: &BaseSurface, ps: &[f64], dual_ps: &[f64], ntheta: usize) -> Result<DeficitReport> {
    let h = base.mean_curvature();
    let (delta_inf, delta_p) = integral_deficits(base, &h, ps);
    let coarse = SampledSurface::from_base(base, 8);
    let (lo, hi) = coarse.bounding_box();
    let diam = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt();
    let r_max = base.nodes.iter().map(|g| g.r).fold(0.0, f64::max);
    let rho_min = diam * 0.5_f64.powi(5);
    let ntheta = ntheta.max((2.0 * std::f64::consts::PI * r_max * 8.0 / rho_min).ceil() as usize);
    let surface = SampledSurface::from_base(base, ntheta);
    let mut gamma = Vec::new();
    let mut gap: f64 = 0.0;
    for (i, end) in [0, base.len() - 1].into_iter().enumerate() {
        if i == 0 && base.axis {
            continue;
        }
        let g = &base.nodes[end];
        let circle = circle_points(g.r, g.z, ntheta);
        gap = gap.max(sample_gap(&circle));
        gamma.extend(circle);
    }
    let fields = dictionary(&surface, &gamma, gap, 5);
    let delta_dual_lb = dual_ps
        .iter()
        .map(|&p| dual_bound_over(&surface, &fields, p).map(|b| (p, b.value)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeficitReport {
        delta_inf,
        delta_p,
        delta_weak: None,
        delta_dual_lb,
        meta: DeficitMeta {
            nodes: base.len(),
            samples: surface.len(),
            dictionary_size: fields.len(),
        },
    })
}

/// Largest spacing between consecutive samples of closed boundary curves given as one list.
pub fn sample_gap(curve: &[[f64; 3]]) -> f64 {
    (0..curve.len())
        .map(|i| {
            let (a, b) = (curve[i], curve[(i + 1) % curve.len()]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_matches_finite_differences() {
        let y = [0.2, -0.3, 0.4];
        for kind in FieldKind::ALL {
            let value = |y: [f64; 3]| -> [f64; 3] {
                let t2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                let beta = (1.0 - t2).powi(3);
                let v = match kind {
                    FieldKind::Constant(k) => {
                        let mut e = [0.0; 3];
                        e[k] = 1.0;
                        e
                    }
                    FieldKind::Radial => y,
                    FieldKind::Rotation(k) => {
                        let mut e = [0.0; 3];
                        e[k] = 1.0;
                        [e[1] * y[2] - e[2] * y[1], e[2] * y[0] - e[0] * y[2], e[0] * y[1] - e[1] * y[0]]
                    }
                };
                [beta * v[0], beta * v[1], beta * v[2]]
            };
            let m = bump_jacobian(kind, y);
            for j in 0..3 {
                let (mut a, mut b) = (y, y);
                a[j] += 1e-6;
                b[j] -= 1e-6;
                let (fa, fb) = (value(a), value(b));
                for i in 0..3 {
                    assert!((m[i][j] - (fa[i] - fb[i]) / 2e-6).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn constant_bump_l1_norm_matches_radial_integral() {
        // int |grad beta| = int_0^1 6 t (1 - t^2)^2 4 pi t^2 dt
        let exact = 24.0 * std::f64::consts::PI * (1.0 / 4.0 - 2.0 / 6.0 + 1.0 / 8.0);
        let q = unit_gradient_norm(FieldKind::Constant(0), 1.0);
        assert!((q - exact).abs() / exact < 2e-3, "{q} vs {exact}");
        let sup = unit_gradient_norm(FieldKind::Constant(1), f64::INFINITY);
        // max of 6 t (1 - t^2)^2 at t = 1/sqrt(5)
        let t = 1.0 / 5f64.sqrt();
        assert!((sup - 6.0 * t * (1.0 - t * t).powi(2)).abs() < 2e-2);
    }
}
