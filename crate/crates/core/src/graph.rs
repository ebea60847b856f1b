//! Normal graphs `psi_u(p) = p + u(p) nu_N(p)` over an axisymmetric base.
//!
//! The discrete area is `A(u) = sum_h W_h G(p_h, u_h, xi_h)` over half nodes `h`, with
//! `u_h` the average of the two neighbouring nodal values and `xi_h` their difference
//! quotient along the meridian. Its gradient is the discrete first variation, and the
//! pulled-back mean curvature is read off the same gradient, so the solver and the
//! estimates share one operator.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::surface::{BaseShape, BaseSurface, NodeGeom, ProfileCurve};

/// Value and derivatives of `G(p, z, xi) = prod(1 + kappa_i z) sqrt(1 + sum (xi_i/(1 + kappa_i z))^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GDerivs {
    pub value: f64,
    /// `dG/dz`.
    pub dz: f64,
    /// `dG/dxi_i`.
    pub dxi: [f64; 2],
    /// Hessian over `(z, xi_1, xi_2)`.
    pub hess: [[f64; 3]; 3],
}

/// The area integrand `G`.
pub fn g_value(kappa: [f64; 2], z: f64, xi: [f64; 2]) -> f64 {
    let a = [1.0 + kappa[0] * z, 1.0 + kappa[1] * z];
    let q = [xi[0] / a[0], xi[1] / a[1]];
    a[0] * a[1] * (1.0 + q[0] * q[0] + q[1] * q[1]).sqrt()
}

/// `G` with first and second derivatives, from the logarithmic form
/// `ln G = sum ln(1 + kappa_i z) + ln(S^2)/2`.
pub fn g_derivs(kappa: [f64; 2], z: f64, xi: [f64; 2]) -> GDerivs {
    let a = [1.0 + kappa[0] * z, 1.0 + kappa[1] * z];
    let s2 = 1.0 + (xi[0] / a[0]).powi(2) + (xi[1] / a[1]).powi(2);
    let value = a[0] * a[1] * s2.sqrt();

    // derivatives of S^2 with respect to (z, xi1, xi2)
    let mut d = [0.0; 3];
    let mut dd = [[0.0; 3]; 3];
    for i in 0..2 {
        let (k, x, ai) = (kappa[i], xi[i], a[i]);
        d[0] += -2.0 * x * x * k / ai.powi(3);
        d[i + 1] = 2.0 * x / (ai * ai);
        dd[0][0] += 6.0 * x * x * k * k / ai.powi(4);
        dd[0][i + 1] = -4.0 * x * k / ai.powi(3);
        dd[i + 1][0] = dd[0][i + 1];
        dd[i + 1][i + 1] = 2.0 / (ai * ai);
    }
    let mut l = [0.0; 3];
    let mut ll = [[0.0; 3]; 3];
    for x in 0..3 {
        l[x] = d[x] / (2.0 * s2);
        for y in 0..3 {
            ll[x][y] = dd[x][y] / (2.0 * s2) - d[x] * d[y] / (2.0 * s2 * s2);
        }
    }
    for i in 0..2 {
        l[0] += kappa[i] / a[i];
        ll[0][0] -= (kappa[i] / a[i]).powi(2);
    }
    let mut hess = [[0.0; 3]; 3];
    for x in 0..3 {
        for y in 0..3 {
            hess[x][y] = value * (ll[x][y] + l[x] * l[y]);
        }
    }
    GDerivs {
        value,
        dz: value * l[0],
        dxi: [value * l[1], value * l[2]],
        hess,
    }
}

/// Size limits defining the graph regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphRegime {
    /// `sup|u| * max|kappa|` must not exceed this.
    pub c0_fraction: f64,
    /// `max|Du|` must not exceed this.
    pub slope_cap: f64,
}

impl Default for GraphRegime {
    fn default() -> Self {
        GraphRegime {
            c0_fraction: 0.5,
            slope_cap: 0.5,
        }
    }
}

impl GraphRegime {
    /// Wider limits, still inside the focal distance, for strongly curved graphs used as test geometry.
    pub fn relaxed() -> Self {
        GraphRegime {
            c0_fraction: 0.75,
            slope_cap: 2.0,
        }
    }
}

/// Coefficients of the divergence-form rewrite at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: [f64; 2],
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Remainder of `dG/dz + c u`, quadratic in the slope.
    pub e: f64,
}

/// A scalar field `u` on the base grid with eagerly computed derived fields.
#[derive(Debug, Clone)]
pub struct NormalGraph {
    pub base: Arc<BaseSurface>,
    pub u: Vec<f64>,
    /// `d_1 u` along the meridian direction (the parallel derivative vanishes).
    pub du: Vec<f64>,
    /// `d*_1 u = d_1 u / (1 + u kappa_1)`.
    pub dstar_u: Vec<f64>,
    pub jacobian: Vec<f64>,
    /// `nu_Psi . e3`.
    pub nu_e3: Vec<f64>,
    /// `nu_Psi . nu_N = 1/sqrt(1 + |D*u|^2)`.
    pub nu_n: Vec<f64>,
    /// Gradient of the discrete area with respect to the nodal values.
    pub area_gradient: Vec<f64>,
    /// Pulled-back mean curvature of the graph.
    pub graph_h: Vec<f64>,
}

/// Nodal derivative of `u` along the meridian (arc length).
pub fn nodal_slope(base: &BaseSurface, u: &[f64]) -> Vec<f64> {
    let n = base.len();
    let ds = base.ds;
    (0..n)
        .map(|i| {
            let g = &base.nodes[i];
            let du_ds = if i == 0 {
                if base.axis {
                    let (r0, r1) = (base.nodes[0].r, base.nodes[1].r);
                    let b = (u[1] - u[0]) / (r1 * r1 - r0 * r0);
                    // du/dr times dr/d(arc), expressed per unit parameter
                    return 2.0 * b * r0 * g.tangent[0];
                }
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * ds)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * ds)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * ds)
            };
            du_ds / g.speed
        })
        .collect()
}

fn half_state(base: &BaseSurface, u: &[f64], h: usize) -> (f64, f64, f64) {
    let g = &base.half[h];
    let len = base.ds * g.speed;
    (0.5 * (u[h] + u[h + 1]), (u[h + 1] - u[h]) / len, len)
}

/// Discrete area of the graph `Psi_u`.
pub fn discrete_area(base: &BaseSurface, u: &[f64]) -> f64 {
    let mut area = 0.0;
    for h in 0..base.half.len() {
        let (z, xi, _) = half_state(base, u, h);
        area += base.half_weight[h] * g_value(base.half[h].kappa, z, [xi, 0.0]);
    }
    if base.axis {
        area += base.core_area * g_value(base.nodes[0].kappa, u[0], [0.0, 0.0]);
    }
    area
}

/// Gradient of [`discrete_area`] with respect to the nodal values of `u`.
pub fn area_gradient(base: &BaseSurface, u: &[f64]) -> Vec<f64> {
    let mut grad = vec![0.0; base.len()];
    for h in 0..base.half.len() {
        let (z, xi, len) = half_state(base, u, h);
        let d = g_derivs(base.half[h].kappa, z, [xi, 0.0]);
        let w = base.half_weight[h];
        grad[h] += w * (0.5 * d.dz - d.dxi[0] / len);
        grad[h + 1] += w * (0.5 * d.dz + d.dxi[0] / len);
    }
    if base.axis {
        grad[0] += base.core_area * g_derivs(base.nodes[0].kappa, u[0], [0.0, 0.0]).dz;
    }
    grad
}

/// Tridiagonal Hessian `(lower, diag, upper)` of [`discrete_area`].
pub fn area_hessian(base: &BaseSurface, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = base.len();
    let (mut lo, mut di, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for h in 0..base.half.len() {
        let (z, xi, len) = half_state(base, u, h);
        let d = g_derivs(base.half[h].kappa, z, [xi, 0.0]);
        let w = base.half_weight[h];
        // (z, xi) = J (u_h, u_{h+1}) with J = [[1/2, 1/2], [-1/len, 1/len]]
        let jac = [[0.5, 0.5], [-1.0 / len, 1.0 / len]];
        let hz = [[d.hess[0][0], d.hess[0][1]], [d.hess[1][0], d.hess[1][1]]];
        let mut local = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for x in 0..2 {
                    for y in 0..2 {
                        s += jac[x][a] * hz[x][y] * jac[y][b];
                    }
                }
                local[a][b] = w * s;
            }
        }
        di[h] += local[0][0];
        di[h + 1] += local[1][1];
        up[h] += local[0][1];
        lo[h + 1] += local[1][0];
    }
    if base.axis {
        di[0] += base.core_area * g_derivs(base.nodes[0].kappa, u[0], [0.0, 0.0]).hess[0][0];
    }
    (lo, di, up)
}

impl NormalGraph {
    /// Builds the graph with the default regime.
    pub fn new(base: Arc<BaseSurface>, u: Vec<f64>) -> Result<Self> {
        Self::with_regime(base, u, GraphRegime::default())
    }

    pub fn with_regime(base: Arc<BaseSurface>, u: Vec<f64>, regime: GraphRegime) -> Result<Self> {
        if u.len() != base.len() {
            return Err(Error::Precondition(format!(
                "field has {} values for {} nodes",
                u.len(),
                base.len()
            )));
        }
        for (i, &v) in u.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Precondition(format!("non-finite u at node {i}")));
            }
            if base.boundary_mask[i] && v != 0.0 {
                return Err(Error::Precondition(format!(
                    "u must vanish at boundary node {i} (found {v:e})"
                )));
            }
        }
        let du = nodal_slope(&base, &u);
        let kmax = base.max_abs_kappa();
        for i in 0..u.len() {
            let c0 = u[i].abs() * kmax;
            if c0 > regime.c0_fraction {
                return Err(Error::GraphRegime {
                    node: i,
                    what: "|u| max|kappa|",
                    value: c0,
                    limit: regime.c0_fraction,
                });
            }
            if du[i].abs() > regime.slope_cap {
                return Err(Error::GraphRegime {
                    node: i,
                    what: "|Du|",
                    value: du[i].abs(),
                    limit: regime.slope_cap,
                });
            }
        }
        Ok(Self::assemble(base, u, du))
    }

    fn assemble(base: Arc<BaseSurface>, u: Vec<f64>, du: Vec<f64>) -> Self {
        let n = base.len();
        let area_gradient = area_gradient(&base, &u);
        let mut dstar_u = vec![0.0; n];
        let mut jacobian = vec![0.0; n];
        let mut nu_e3 = vec![0.0; n];
        let mut nu_n = vec![0.0; n];
        let mut graph_h = vec![0.0; n];
        for i in 0..n {
            let g = &base.nodes[i];
            let q = du[i] / (1.0 + u[i] * g.kappa[0]);
            let s = (1.0 + q * q).sqrt();
            dstar_u[i] = q;
            jacobian[i] = g_value(g.kappa, u[i], [du[i], 0.0]);
            nu_n[i] = 1.0 / s;
            nu_e3[i] = (g.normal[1] - q * g.tangent[1]) / s;
            graph_h[i] = area_gradient[i] / base.area_weight[i] * s / jacobian[i];
        }
        // the area gradient at a fixed node is a reaction, not a curvature; extrapolate instead
        if n >= 4 {
            if base.boundary_mask[0] {
                graph_h[0] = 3.0 * graph_h[1] - 3.0 * graph_h[2] + graph_h[3];
            }
            if base.boundary_mask[n - 1] {
                graph_h[n - 1] = 3.0 * graph_h[n - 2] - 3.0 * graph_h[n - 3] + graph_h[n - 4];
            }
        }
        NormalGraph {
            base,
            u,
            du,
            dstar_u,
            jacobian,
            nu_e3,
            nu_n,
            area_gradient,
            graph_h,
        }
    }

    /// Area of the graph.
    pub fn area(&self) -> f64 {
        discrete_area(&self.base, &self.u)
    }

    /// Unit normal of the graph at node `i`, angle `theta`, as a 3-vector.
    pub fn normal3(&self, i: usize, theta: f64) -> [f64; 3] {
        let g = &self.base.nodes[i];
        let nu = g.normal3(theta);
        let tau = g.frame3(theta)[0];
        let s = (1.0 + self.dstar_u[i].powi(2)).sqrt();
        [
            (nu[0] - self.dstar_u[i] * tau[0]) / s,
            (nu[1] - self.dstar_u[i] * tau[1]) / s,
            (nu[2] - self.dstar_u[i] * tau[2]) / s,
        ]
    }

    /// Image meridian `p + u nu_N`.
    pub fn image_profile(&self) -> ProfileCurve {
        let nodes = &self.base.nodes;
        let pts: Vec<(f64, f64)> = nodes
            .iter()
            .zip(&self.u)
            .map(|(g, &u)| (g.r + u * g.normal[0], g.z + u * g.normal[1]))
            .collect();
        let base_profile = self.base.profile();
        ProfileCurve {
            params: base_profile.params,
            r: pts.iter().map(|p| p.0).collect(),
            z: pts.iter().map(|p| p.1).collect(),
            boundary_flags: base_profile.boundary_flags,
        }
    }

    /// The image surface as a base surface. The parallel curvature comes from the image
    /// normal; the meridian curvature is the discrete graph mean curvature minus it, so
    /// the principal curvatures sum exactly to [`NormalGraph::graph_h`].
    pub fn image_base(&self) -> BaseSurface {
        let base = &self.base;
        let n = base.len();
        let profile = self.image_profile();
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let g = &base.nodes[i];
            let q = self.dstar_u[i];
            let s = (1.0 + q * q).sqrt();
            let normal = [(g.normal[0] - q * g.tangent[0]) / s, (g.normal[1] - q * g.tangent[1]) / s];
            let tangent = [-normal[1], normal[0]];
            let tangent = if tangent[0] * g.tangent[0] + tangent[1] * g.tangent[1] < 0.0 {
                [-tangent[0], -tangent[1]]
            } else {
                tangent
            };
            let r = profile.r[i];
            let parallel = normal[0] / r;
            nodes.push(NodeGeom {
                s: g.s,
                r,
                z: profile.z[i],
                speed: g.speed * self.jacobian[i] / (1.0 + self.u[i] * g.kappa[1]),
                tangent,
                normal,
                kappa: [self.graph_h[i] - parallel, parallel],
            });
        }
        let half: Vec<NodeGeom> = (0..n - 1)
            .map(|h| {
                let (a, b) = (&nodes[h], &nodes[h + 1]);
                let rp = (b.r - a.r) / base.ds;
                let zp = (b.z - a.z) / base.ds;
                let m = rp.hypot(zp);
                let t = [rp / m, zp / m];
                let sigma = if t[1] * base.half[h].normal[0] - t[0] * base.half[h].normal[1] >= 0.0 {
                    1.0
                } else {
                    -1.0
                };
                NodeGeom {
                    s: 0.5 * (a.s + b.s),
                    r: 0.5 * (a.r + b.r),
                    z: 0.5 * (a.z + b.z),
                    speed: m,
                    tangent: t,
                    normal: [sigma * t[1], -sigma * t[0]],
                    kappa: [0.5 * (a.kappa[0] + b.kappa[0]), 0.5 * (a.kappa[1] + b.kappa[1])],
                }
            })
            .collect();
        let area_weight: Vec<f64> = base
            .area_weight
            .iter()
            .zip(&self.jacobian)
            .map(|(w, j)| w * j)
            .collect();
        let half_weight: Vec<f64> = (0..n - 1)
            .map(|h| {
                let (z, xi, _) = half_state(base, &self.u, h);
                base.half_weight[h] * g_value(base.half[h].kappa, z, [xi, 0.0])
            })
            .collect();
        BaseSurface {
            shape: BaseShape::Revolution,
            ds: base.ds,
            nodes,
            half,
            area_weight,
            half_weight,
            boundary_mask: base.boundary_mask.clone(),
            axis: base.axis,
            core_area: base.core_area,
        }
    }

    /// Coefficients of the divergence-form rewrite on a minimal base.
    ///
    /// `a_i = g/(1 + kappa_i u)^2` and `d = J/sqrt(1 + |D*u|^2)`. With
    /// `w_j = q_j^2/(1 + |q|^2)`, `q_j = xi_j/(1 + kappa_j u)`, the exact split
    /// `dG/dz = -c u + e` holds for `c = G sum kappa_j^2 (1 - w_j)/(1 + kappa_j u) >= 0` and the
    /// quadratic remainder `e = -G sum kappa_j w_j`, which is `O(|Du|^2)`. `b` is the ratio of `c`
    /// to `sum kappa_j^2/(1 + kappa_j u)` (or `G` on flat bases), so `|b - 1| = O(eps)`.
    pub fn coefficients(&self) -> Vec<Coefficients> {
        self.base
            .nodes
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let u = self.u[i];
                let a = [1.0 + g.kappa[0] * u, 1.0 + g.kappa[1] * u];
                let q = [self.du[i] / a[0], 0.0];
                let s2 = 1.0 + q[0] * q[0] + q[1] * q[1];
                let big_g = a[0] * a[1] * s2.sqrt();
                let small_g = a[0] * a[1] / s2.sqrt();
                let w = [q[0] * q[0] / s2, q[1] * q[1] / s2];
                let c = big_g * (0..2).map(|j| g.kappa[j].powi(2) * (1.0 - w[j]) / a[j]).sum::<f64>();
                let e = -big_g * (0..2).map(|j| g.kappa[j] * w[j]).sum::<f64>();
                let k2: f64 = (0..2).map(|j| g.kappa[j].powi(2) / a[j]).sum();
                let b = if k2 > 0.0 { c / k2 } else { big_g };
                Coefficients {
                    a: [small_g / (a[0] * a[0]), small_g / (a[1] * a[1])],
                    b,
                    c,
                    d: self.jacobian[i] / s2.sqrt(),
                    e,
                }
            })
            .collect()
    }
}

/// Area Jacobian `J^N psi_u` at every node.
pub fn graph_jacobian(g: &NormalGraph) -> &[f64] {
    &g.jacobian
}

/// Pulled-back mean curvature (sum convention) of the graph.
pub fn graph_mean_curvature(g: &NormalGraph) -> &[f64] {
    &g.graph_h
}

/// `(nu_Psi . e3, nu_Psi . nu_N)` at every node.
pub fn graph_normal_vertical(g: &NormalGraph) -> (&[f64], &[f64]) {
    (&g.nu_e3, &g.nu_n)
}

/// Derivative of the graph area in the direction `phi` (which must vanish on the boundary).
pub fn first_variation(g: &NormalGraph, phi: &[f64]) -> Result<f64> {
    if phi.len() != g.u.len() {
        return Err(Error::Precondition("test function length mismatch".into()));
    }
    for (i, &v) in phi.iter().enumerate() {
        if g.base.boundary_mask[i] && v != 0.0 {
            return Err(Error::Precondition(format!(
                "test function must vanish at boundary node {i}"
            )));
        }
    }
    Ok(g.area_gradient.iter().zip(phi).map(|(a, b)| a * b).sum())
}

/// Offset-surface curvatures at signed distance `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetCurvatures {
    pub t: f64,
    pub kappas_offset: Vec<[f64; 2]>,
    pub h_offset: Vec<f64>,
}

/// Principal curvatures `kappa_i/(1 + t kappa_i)` of the parallel surface at distance `t`.
pub fn offset_curvatures(base: &BaseSurface, t: f64) -> Result<OffsetCurvatures> {
    let mut kappas_offset = Vec::with_capacity(base.len());
    let mut h_offset = Vec::with_capacity(base.len());
    for (i, g) in base.nodes.iter().enumerate() {
        let mut k = [0.0; 2];
        for j in 0..2 {
            let denom = 1.0 + t * g.kappa[j];
            if (t * g.kappa[j]).abs() >= 1.0 || denom <= 0.0 {
                return Err(Error::FocalDistance {
                    node: i,
                    t,
                    kappa: g.kappa[j],
                });
            }
            k[j] = g.kappa[j] / denom;
        }
        kappas_offset.push(k);
        h_offset.push(k[0] + k[1]);
    }
    Ok(OffsetCurvatures {
        t,
        kappas_offset,
        h_offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn g_derivatives_match_finite_differences() {
        let kappa = [0.7, -1.3];
        let (z, xi) = (0.11, [0.3, -0.2]);
        let d = g_derivs(kappa, z, xi);
        assert!((d.dz - fd(|t| g_value(kappa, t, xi), z)).abs() < 1e-8);
        assert!((d.dxi[0] - fd(|t| g_value(kappa, z, [t, xi[1]]), xi[0])).abs() < 1e-8);
        assert!((d.dxi[1] - fd(|t| g_value(kappa, z, [xi[0], t]), xi[1])).abs() < 1e-8);
        let dz_at = |x: [f64; 3]| g_derivs(kappa, x[0], [x[1], x[2]]);
        let p = [z, xi[0], xi[1]];
        for a in 0..3 {
            let mut hi = p;
            let mut lo = p;
            hi[a] += 1e-6;
            lo[a] -= 1e-6;
            let (dh, dl) = (dz_at(hi), dz_at(lo));
            let grad = |d: GDerivs| [d.dz, d.dxi[0], d.dxi[1]];
            for b in 0..3 {
                let num = (grad(dh)[b] - grad(dl)[b]) / 2e-6;
                assert!((d.hess[b][a] - num).abs() < 1e-6, "hess[{b}][{a}] {} vs {num}", d.hess[b][a]);
            }
        }
    }

    #[test]
    fn closed_form_gradients_agree() {
        let kappa = [0.4, -0.9];
        let (z, xi) = (0.05, [0.2, 0.1]);
        let d = g_derivs(kappa, z, xi);
        let a = [1.0 + kappa[0] * z, 1.0 + kappa[1] * z];
        let s2 = 1.0 + (xi[0] / a[0]).powi(2) + (xi[1] / a[1]).powi(2);
        let g = a[0] * a[1] / s2.sqrt();
        for i in 0..2 {
            assert!((d.dxi[i] - g * xi[i] / (a[i] * a[i])).abs() < 1e-14);
        }
        let mut dz = 0.0;
        for j in 0..2 {
            dz += kappa[j] / a[j] * (1.0 - xi[j] * xi[j] / (a[j] * a[j] * s2));
        }
        assert!((d.dz - d.value * dz).abs() < 1e-14);
    }
}
