//! Accessibility from infinity of sampled boundaries, and the odd-vector wedge-sum lemma.
//!
//! A closed convex cone contains the convex hull of a set iff it contains the set, so the
//! test at `x` only needs the unit directions from `x` to the other samples. Their smallest
//! enclosing ball gives the axis of the narrowest circular cone.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sampled boundary: one point list per component, all points of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub components: Vec<Vec<Vec<f64>>>,
}

impl BoundarySamples {
    pub fn new(components: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let dim = components
            .first()
            .and_then(|c| c.first())
            .map(|p| p.len())
            .ok_or_else(|| Error::Input("boundary has no samples".into()))?;
        if dim < 2 {
            return Err(Error::Input("points need at least two coordinates".into()));
        }
        for (k, c) in components.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Input(format!("component {k} is empty")));
            }
            for p in c {
                if p.len() != dim || p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Input(format!(
                        "component {k} has a point of wrong dimension or with non-finite coordinates"
                    )));
                }
            }
        }
        Ok(BoundarySamples { components })
    }

    pub fn dim(&self) -> usize {
        self.components[0][0].len()
    }

    pub fn points(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.components.iter().flatten()
    }

    /// Reads `component,x,y,z` rows (any number of coordinate columns).
    pub fn read_csv<R: Read>(rd: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(rd);
        let headers = reader.headers().map_err(|e| Error::Input(e.to_string()))?.clone();
        if headers.get(0) != Some("component") || headers.len() < 3 {
            return Err(Error::Input("boundary CSV header must start with `component` followed by coordinates".into()));
        }
        let mut comps: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Input(format!("row {}: cannot parse `{s}`", line + 2)))
            };
            let id: usize = rec[0]
                .parse()
                .map_err(|_| Error::Input(format!("row {}: bad component id `{}`", line + 2, &rec[0])))?;
            let p = rec.iter().skip(1).map(parse).collect::<Result<Vec<f64>>>()?;
            match comps.iter_mut().find(|(c, _)| *c == id) {
                Some((_, pts)) => pts.push(p),
                None => comps.push((id, vec![p])),
            }
        }
        comps.sort_by_key(|(c, _)| *c);
        Self::new(comps.into_iter().map(|(_, p)| p).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Input(e.to_string());
        let mut header = vec!["component".to_string()];
        let names = ["x", "y", "z"];
        for k in 0..self.dim() {
            header.push(if self.dim() <= 3 { names[k].to_string() } else { format!("x{}", k + 1) });
        }
        wr.write_record(&header).map_err(io)?;
        for (c, pts) in self.components.iter().enumerate() {
            for p in pts {
                let mut row = vec![c.to_string()];
                row.extend(p.iter().map(|v| crate::surface::fmt17(*v)));
                wr.write_record(&row).map_err(io)?;
            }
        }
        wr.flush().map_err(|e| Error::Input(e.to_string()))?;
        Ok(())
    }
}

/// Circular-cone certificate `Gamma - x` inside `{z : z.e >= |z - (z.e)e| / tan(theta/2)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WedgeCertificate {
    pub apex: Vec<f64>,
    pub axis: Vec<f64>,
    pub theta: f64,
    pub margin: f64,
    /// Two half-space normals in the plane of `e`, at angle `(pi - theta)/2` from it.
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
}

/// Margin of a cone against a point set; nonnegative iff every point lies in the cone.
pub fn cone_margin(apex: &[f64], axis: &[f64], theta: f64, points: &[&Vec<f64>]) -> f64 {
    let cot = 1.0 / (0.5 * theta).tan();
    points
        .iter()
        .map(|y| {
            let d: Vec<f64> = y.iter().zip(apex).map(|(a, b)| a - b).collect();
            let along = dot(&d, axis);
            let perp = d
                .iter()
                .zip(axis)
                .map(|(di, ei)| (di - along * ei).powi(2))
                .sum::<f64>()
                .sqrt();
            along - perp * cot
        })
        .fold(f64::INFINITY, f64::min)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone)]
struct Ball {
    center: Vec<f64>,
    r2: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = p.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        d2 <= self.r2 * (1.0 + 1e-12) + 1e-24
    }
}

/// Smallest ball through all support points (on its boundary), within their affine hull.
fn circumball(support: &[&[f64]]) -> Option<Ball> {
    let dim = support.first()?.len();
    let p0 = support[0];
    let k = support.len() - 1;
    if k == 0 {
        return Some(Ball {
            center: p0.to_vec(),
            r2: 0.0,
        });
    }
    let v: Vec<Vec<f64>> = support[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    // 2 sum_i (v_j . v_i) l_i = |v_j|^2
    let mut a = vec![vec![0.0; k + 1]; k];
    for j in 0..k {
        for i in 0..k {
            a[j][i] = 2.0 * dot(&v[j], &v[i]);
        }
        a[j][k] = dot(&v[j], &v[j]);
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut center = p0.to_vec();
    for i in 0..k {
        let l = a[i][k] / a[i][i];
        for d in 0..dim {
            center[d] += l * v[i][d];
        }
    }
    let r2 = support
        .iter()
        .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        .fold(0.0, f64::max);
    Some(Ball { center, r2 })
}

fn welzl_rec<'a>(pts: &[&'a [f64]], n: usize, support: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    let mut ball = if support.is_empty() {
        Ball {
            center: pts.first().map_or(vec![0.0; dim], |p| p.to_vec()),
            r2: -1.0,
        }
    } else {
        circumball(support).unwrap_or_else(|| {
            // affinely dependent support: fall back to the widest pair
            let mut best = (0, 0, -1.0);
            for i in 0..support.len() {
                for j in i..support.len() {
                    let d: f64 = support[i].iter().zip(support[j]).map(|(a, b)| (a - b).powi(2)).sum();
                    if d > best.2 {
                        best = (i, j, d);
                    }
                }
            }
            circumball(&[support[best.0], support[best.1]]).expect("two points have a circumball")
        })
    };
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..n {
        if ball.r2 < 0.0 || !ball.contains(pts[i]) {
            support.push(pts[i]);
            ball = welzl_rec(pts, i, support, dim);
            support.pop();
        }
    }
    ball
}

/// Smallest enclosing ball `(center, radius)` by Welzl's randomized incremental algorithm.
/// The shuffle uses a fixed seed, so results are reproducible.
pub fn smallest_enclosing_ball(points: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let dim = points.first()?.len();
    let mut order: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut support = Vec::with_capacity(dim + 1);
    let ball = welzl_rec(&order, order.len(), &mut support, dim);
    Some((ball.center, ball.r2.max(0.0).sqrt()))
}

/// Cone certificate at `x`, or `None` if no acute cone with apex `x` contains the boundary.
pub fn is_accessible_at(x: &[f64], b: &BoundarySamples) -> Option<WedgeCertificate> {
    let scale = b.points().map(|p| norm(p)).fold(1.0, f64::max);
    let others: Vec<&Vec<f64>> = b
        .points()
        .filter(|y| norm(&y.iter().zip(x).map(|(a, c)| a - c).collect::<Vec<_>>()) > 1e-12 * scale)
        .collect();
    let dim = x.len();
    let mut axis = vec![0.0; dim];
    axis[0] = 1.0;
    if others.is_empty() {
        return Some(certificate(x, axis, 0.0, 0.0));
    }
    let dirs: Vec<Vec<f64>> = others
        .iter()
        .map(|y| {
            let d: Vec<f64> = y.iter().zip(x).map(|(a, c)| a - c).collect();
            let l = norm(&d);
            d.into_iter().map(|v| v / l).collect()
        })
        .collect();
    let (center, _) = smallest_enclosing_ball(&dirs)?;
    let c = norm(&center);
    if c < 1e-12 {
        return None;
    }
    let axis: Vec<f64> = center.iter().map(|v| v / c).collect();
    let phi = dirs
        .iter()
        .map(|d| dot(d, &axis).clamp(-1.0, 1.0).acos())
        .fold(0.0, f64::max);
    if phi >= std::f64::consts::FRAC_PI_2 {
        return None;
    }
    let theta = 2.0 * (phi + 1e-9);
    let margin = cone_margin(x, &axis, theta, &others);
    Some(certificate(x, axis, theta, margin))
}

fn certificate(x: &[f64], axis: Vec<f64>, theta: f64, margin: f64) -> WedgeCertificate {
    // any unit vector orthogonal to the axis
    let dim = axis.len();
    let k = (0..dim).min_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs())).unwrap_or(0);
    let mut u = vec![0.0; dim];
    u[k] = 1.0;
    let a = dot(&u, &axis);
    for d in 0..dim {
        u[d] -= a * axis[d];
    }
    let l = norm(&u);
    u.iter_mut().for_each(|v| *v /= l);
    let beta = 0.5 * (std::f64::consts::PI - theta);
    let nu = |s: f64| -> Vec<f64> { (0..dim).map(|d| beta.cos() * axis[d] + s * beta.sin() * u[d]).collect() };
    WedgeCertificate {
        apex: x.to_vec(),
        nu1: nu(1.0),
        nu2: nu(-1.0),
        axis,
        theta,
        margin,
    }
}

/// Accessibility summary of one component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentAccess {
    pub component: usize,
    pub samples: usize,
    pub accessible: usize,
    pub accessible_fraction: f64,
    pub accessible_any: bool,
}

/// Checks every sample of every component; `accessible_any` approximates "accessible on a
/// set of positive measure" by a positive fraction of samples.
pub fn accessibility_report(b: &BoundarySamples) -> Vec<ComponentAccess> {
    b.components
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let accessible = comp.par_iter().filter(|x| is_accessible_at(x, b).is_some()).count();
            let fraction = accessible as f64 / comp.len() as f64;
            ComponentAccess {
                component: k,
                samples: comp.len(),
                accessible,
                accessible_fraction: fraction,
                accessible_any: accessible > 0,
            }
        })
        .collect()
}

/// Whether every component is accessible somewhere.
pub fn totally_accessible(report: &[ComponentAccess]) -> bool {
    report.iter().all(|c| c.accessible_any)
}

/// `|sum v_h|` and the pairing bound `sum_j w_j . v_{p+1} + |v_{p+1}|` for unit vectors
/// `v_h = (cos theta_h, sin theta_h)`, with the angles sorted and `w_j = v_j + v_{2p+2-j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeSum {
    pub sum_length: f64,
    pub pairing_bound: f64,
}

pub fn wedge_sum_lemma(angles: &[f64], phi: f64) -> Result<WedgeSum> {
    if angles.len() < 3 || angles.len().is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "need an odd number of at least three angles, got {}",
            angles.len()
        )));
    }
    if !(phi > 0.0 && phi < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Precondition("half-opening must lie in (0, pi/2)".into()));
    }
    if let Some(a) = angles.iter().find(|a| !(a.abs() <= phi)) {
        return Err(Error::Precondition(format!("angle {a} outside [-{phi}, {phi}]")));
    }
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    let p = sorted.len() / 2;
    let v = |t: f64| [t.cos(), t.sin()];
    let mid = v(sorted[p]);
    let mut bound = 1.0;
    for j in 0..p {
        let (a, b) = (v(sorted[j]), v(sorted[2 * p - j]));
        bound += (a[0] + b[0]) * mid[0] + (a[1] + b[1]) * mid[1];
    }
    let (sx, sy) = sorted.iter().fold((0.0, 0.0), |s, t| (s.0 + t.cos(), s.1 + t.sin()));
    let out = WedgeSum {
        sum_length: sx.hypot(sy),
        pairing_bound: bound,
    };
    debug_assert!(out.pairing_bound <= out.sum_length * (1.0 + 1e-12) && out.pairing_bound > 1.0);
    Ok(out)
}

/// `n` samples of a circle with given center, radius and unit plane normal.
pub fn circle(center: [f64; 3], radius: f64, normal: [f64; 3], n: usize) -> Vec<Vec<f64>> {
    let nn = norm(&normal);
    let k: Vec<f64> = normal.iter().map(|v| v / nn).collect();
    let seed = if k[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let a = dot(&seed, &k);
    let mut u: Vec<f64> = (0..3).map(|d| seed[d] - a * k[d]).collect();
    let lu = norm(&u);
    u.iter_mut().for_each(|v| *v /= lu);
    let w = [k[1] * u[2] - k[2] * u[1], k[2] * u[0] - k[0] * u[2], k[0] * u[1] - k[1] * u[0]];
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (0..3).map(|d| center[d] + radius * (t.cos() * u[d] + t.sin() * w[d])).collect()
        })
        .collect()
}

/// Shipped boundary configurations.
pub mod fixtures {
    use super::{circle, BoundarySamples};

    /// Coplanar concentric circles of radii 1 and 2; the inner one is listed first.
    pub fn nested_circles(n: usize) -> BoundarySamples {
        BoundarySamples {
            components: vec![circle([0.0; 3], 1.0, [0.0, 0.0, 1.0], n), circle([0.0; 3], 2.0, [0.0, 0.0, 1.0], n)],
        }
    }

    /// Unit circles in the planes `z = -sep/2` and `z = sep/2`.
    pub fn coaxial_circles(sep: f64, n: usize) -> BoundarySamples {
        BoundarySamples {
            components: vec![
                circle([0.0, 0.0, -0.5 * sep], 1.0, [0.0, 0.0, 1.0], n),
                circle([0.0, 0.0, 0.5 * sep], 1.0, [0.0, 0.0, 1.0], n),
            ],
        }
    }

    /// Two horizontal circles at different heights and a vertical one beside them.
    pub fn three_circles(n: usize) -> BoundarySamples {
        BoundarySamples {
            components: vec![
                circle([0.0, 0.0, 0.0], 1.0, [0.0, 0.0, 1.0], n),
                circle([3.0, 0.0, 0.5], 0.8, [0.0, 0.0, 1.0], n),
                circle([1.5, 2.5, 0.0], 0.7, [1.0, 0.0, 0.0], n),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosing_ball_of_square_corners() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0], vec![1.0, 1.0]];
        let (c, r) = smallest_enclosing_ball(&pts).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn enclosing_ball_matches_brute_force_in_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        use rand::Rng;
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let (c, r) = smallest_enclosing_ball(&pts).unwrap();
            for p in &pts {
                assert!(norm(&p.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>()) <= r * (1.0 + 1e-9));
            }
            // no shifted center does better
            for d in 0..3 {
                for s in [-1e-3, 1e-3] {
                    let mut c2 = c.clone();
                    c2[d] += s;
                    let r2 = pts
                        .iter()
                        .map(|p| norm(&p.iter().zip(&c2).map(|(a, b)| a - b).collect::<Vec<_>>()))
                        .fold(0.0, f64::max);
                    assert!(r2 >= r - 1e-12);
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let w = wedge_sum_lemma(&[0.0; 5], 0.3).unwrap();
        assert!((w.sum_length - 5.0).abs() < 1e-15);
        let q = std::f64::consts::FRAC_PI_4;
        let w = wedge_sum_lemma(&[-q, 0.0, q], q).unwrap();
        assert!((w.sum_length - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!(wedge_sum_lemma(&[0.0, 0.1], 0.3).is_err());
        assert!(wedge_sum_lemma(&[0.0, 0.1, 0.5], 0.3).is_err());
    }
}
