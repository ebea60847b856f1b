//! Surfaces of revolution about the vertical axis: sampled meridians, pointwise
//! differential geometry and quadrature.
//!
//! Mean curvature is the sum of principal curvatures. The unit normal of a
//! revolution surface points away from the axis; a horizontal flat base uses +e3.
//! Principal curvatures follow `d(nu)/d(tau_i) = kappa_i tau_i`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker for each end of a meridian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryFlag {
    Fixed,
    Junction,
    Axis,
    Free,
}

/// Sampled meridian `(r(s), z(s))` generating a surface of revolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub params: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub boundary_flags: [BoundaryFlag; 2],
}

/// Principal curvatures at one meridian node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvatures {
    pub meridian: f64,
    pub parallel: f64,
    pub mean: f64,
}

impl ProfileCurve {
    pub fn new(params: Vec<f64>, r: Vec<f64>, z: Vec<f64>, boundary_flags: [BoundaryFlag; 2]) -> Result<Self> {
        let n = params.len();
        if n < 3 || r.len() != n || z.len() != n {
            return Err(Error::Input(format!(
                "profile needs >= 3 samples of equal length (params {}, r {}, z {})",
                n,
                r.len(),
                z.len()
            )));
        }
        for i in 0..n {
            if !(params[i].is_finite() && r[i].is_finite() && z[i].is_finite()) {
                return Err(Error::Input(format!("non-finite profile sample at row {i}")));
            }
            if r[i] < 0.0 {
                return Err(Error::Input(format!("negative radius {} at row {i}", r[i])));
            }
            if i > 0 && params[i] <= params[i - 1] {
                return Err(Error::Input(format!("parameters not increasing at row {i}")));
            }
        }
        Ok(ProfileCurve {
            params,
            r,
            z,
            boundary_flags,
        })
    }

    /// Samples `f(s) = (r, z)` at `n` equally spaced parameters on `[a, b]`.
    pub fn sample<F: Fn(f64) -> (f64, f64)>(f: F, a: f64, b: f64, n: usize, flags: [BoundaryFlag; 2]) -> Result<Self> {
        let params: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let (r, z) = params.iter().map(|&s| f(s)).unzip();
        ProfileCurve::new(params, r, z, flags)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// `(r', z', r'', z'')` at node `i`: centered three-point stencils inside,
    /// one-sided four-point stencils at the ends, so both derivatives stay second order.
    pub fn derivatives(&self, i: usize) -> Result<[f64; 4]> {
        let n = self.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let (base, width) = if i > 0 && i < n - 1 {
            (i - 1, 3)
        } else {
            let width = n.min(4);
            (if i == 0 { 0 } else { n - width }, width)
        };
        let xs = &self.params[base..base + width];
        let (d1, d2) = lagrange_weights(xs, self.params[i]);
        let mut out = [0.0; 4];
        for k in 0..width {
            out[0] += d1[k] * self.r[base + k];
            out[1] += d1[k] * self.z[base + k];
            out[2] += d2[k] * self.r[base + k];
            out[3] += d2[k] * self.z[base + k];
        }
        Ok(out)
    }

    /// Global orientation sign `sigma` for `nu = sigma (z', -r') / |gamma'|`.
    ///
    /// If the meridian is steeper than 45 degrees somewhere, `nu` points away from the
    /// axis at its most vertical sample. Otherwise the surface is a tilted sheet and `nu`
    /// points up (`nu . e3 > 0`) at its most horizontal sample.
    pub fn orientation(&self) -> f64 {
        let mut vertical = (0.0, 1.0);
        let mut horizontal = (0.0, 1.0);
        for i in 0..self.len() {
            if let Ok([rp, zp, _, _]) = self.derivatives(i) {
                let m = rp.hypot(zp);
                if m == 0.0 {
                    continue;
                }
                if (zp / m).abs() > vertical.0 {
                    vertical = ((zp / m).abs(), zp.signum());
                }
                if (rp / m).abs() > horizontal.0 {
                    horizontal = ((rp / m).abs(), -rp.signum());
                }
            }
        }
        if vertical.0 >= std::f64::consts::FRAC_1_SQRT_2 {
            vertical.1
        } else {
            horizontal.1
        }
    }

    /// Length of the meridian by the trapezoid rule on the samples.
    pub fn meridian_length(&self) -> f64 {
        (1..self.len())
            .map(|i| (self.r[i] - self.r[i - 1]).hypot(self.z[i] - self.z[i - 1]))
            .sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["s", "r", "z"]).map_err(csv_err)?;
        for i in 0..self.len() {
            wr.write_record(&[fmt17(self.params[i]), fmt17(self.r[i]), fmt17(self.z[i])])
                .map_err(csv_err)?;
        }
        wr.flush().map_err(|e| Error::Input(e.to_string()))?;
        Ok(())
    }

    /// Reads a `s,r,z` CSV. Ends are tagged `Fixed` unless they lie on the axis.
    pub fn read_csv<R: Read>(rd: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(rd);
        let headers = reader.headers().map_err(csv_err)?.clone();
        let names: Vec<&str> = headers.iter().map(str::trim).collect();
        if names != ["s", "r", "z"] {
            return Err(Error::Input(format!("expected header s,r,z, found {}", names.join(","))));
        }
        let (mut s, mut r, mut z) = (Vec::new(), Vec::new(), Vec::new());
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Input(format!("row {row}: missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Input(format!("row {row}: {e}")))
            };
            s.push(parse(0)?);
            r.push(parse(1)?);
            z.push(parse(2)?);
        }
        let flag = |rv: Option<&f64>| match rv {
            Some(v) if *v == 0.0 => BoundaryFlag::Axis,
            _ => BoundaryFlag::Fixed,
        };
        let flags = [flag(r.first()), flag(r.last())];
        ProfileCurve::new(s, r, z, flags)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(e.to_string())
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// First and second derivative weights of the Lagrange interpolant through `xs`, at `x`.
fn lagrange_weights(xs: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let k = xs.len();
    let mut d1 = vec![0.0; k];
    let mut d2 = vec![0.0; k];
    for j in 0..k {
        let denom: f64 = (0..k).filter(|&m| m != j).map(|m| xs[j] - xs[m]).product();
        let prod_except = |skip: &[usize]| -> f64 {
            (0..k).filter(|m| *m != j && !skip.contains(m)).map(|m| x - xs[m]).product()
        };
        for a in (0..k).filter(|&a| a != j) {
            d1[j] += prod_except(&[a]);
            for b in (0..k).filter(|&b| b != j && b != a) {
                d2[j] += prod_except(&[a, b]);
            }
        }
        d1[j] /= denom;
        d2[j] /= denom;
    }
    (d1, d2)
}

fn curvatures_from(derivs: [f64; 4], r: f64, sigma: f64, index: usize) -> Result<(PrincipalCurvatures, f64)> {
    let [rp, zp, rpp, zpp] = derivs;
    let m = rp.hypot(zp);
    if !(m > 1e-14) {
        return Err(Error::IrregularParameterization { index, speed: m });
    }
    if r <= 0.0 {
        return Err(Error::DegenerateNode { index });
    }
    let meridian = sigma * (rp * zpp - zp * rpp) / (m * m * m);
    let parallel = sigma * zp / (m * r);
    Ok((
        PrincipalCurvatures {
            meridian,
            parallel,
            mean: meridian + parallel,
        },
        m,
    ))
}

/// Principal curvatures of the revolution surface at meridian node `index`.
pub fn revolution_curvatures(curve: &ProfileCurve, index: usize) -> Result<PrincipalCurvatures> {
    let d = curve.derivatives(index)?;
    curvatures_from(d, curve.r[index], curve.orientation(), index).map(|(k, _)| k)
}

/// Principal curvatures at every node of the meridian.
pub fn revolution_curvatures_all(curve: &ProfileCurve) -> Result<Vec<PrincipalCurvatures>> {
    let sigma = curve.orientation();
    (0..curve.len())
        .map(|i| curvatures_from(curve.derivatives(i)?, curve.r[i], sigma, i).map(|(k, _)| k))
        .collect()
}

/// Geometry of one meridian sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeom {
    pub s: f64,
    pub r: f64,
    pub z: f64,
    /// `|gamma'(s)|`.
    pub speed: f64,
    /// Unit meridian tangent `(t_r, t_z)`.
    pub tangent: [f64; 2],
    /// Unit normal `(n_r, n_z)`.
    pub normal: [f64; 2],
    /// `[kappa_meridian, kappa_parallel]`.
    pub kappa: [f64; 2],
}

impl NodeGeom {
    pub fn position(&self, theta: f64) -> [f64; 3] {
        [self.r * theta.cos(), self.r * theta.sin(), self.z]
    }

    pub fn normal3(&self, theta: f64) -> [f64; 3] {
        [
            self.normal[0] * theta.cos(),
            self.normal[0] * theta.sin(),
            self.normal[1],
        ]
    }

    /// Principal frame `[tau_meridian, tau_parallel]`.
    pub fn frame3(&self, theta: f64) -> [[f64; 3]; 2] {
        [
            [
                self.tangent[0] * theta.cos(),
                self.tangent[0] * theta.sin(),
                self.tangent[1],
            ],
            [-theta.sin(), theta.cos(), 0.0],
        ]
    }

    pub fn mean_curvature(&self) -> f64 {
        self.kappa[0] + self.kappa[1]
    }
}

/// Base surface requested from [`build_base`].
#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    FlatDisk { radius: f64 },
    FlatAnnulus { r_in: f64, r_out: f64 },
    /// `r = c cosh((z - z0)/c)` for `z` in `[z_min, z_max]`.
    Catenoid { c: f64, z0: f64, z_min: f64, z_max: f64 },
    Revolution(ProfileCurve),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseShape {
    FlatDisk,
    FlatAnnulus,
    Catenoid,
    Revolution,
}

/// Number of meridian nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(nodes: usize) -> Self {
        GridSpec { nodes }
    }

    pub fn doubled(self) -> Self {
        GridSpec {
            nodes: 2 * self.nodes - 1,
        }
    }
}

/// Excised core radius of disks, relative to the disk radius.
pub const AXIS_CORE: f64 = 1e-3;

/// Chart-based base surface of revolution on a uniform meridian grid.
///
/// Quantities are stored at nodes and at half nodes; `half_weight[i]` is the
/// area of the band between nodes `i` and `i+1`, and `area_weight[i]` the area
/// of the cell around node `i`.
#[derive(Debug, Clone)]
pub struct BaseSurface {
    pub shape: BaseShape,
    pub ds: f64,
    pub nodes: Vec<NodeGeom>,
    pub half: Vec<NodeGeom>,
    pub area_weight: Vec<f64>,
    pub half_weight: Vec<f64>,
    pub boundary_mask: Vec<bool>,
    /// Node 0 sits on the excised core around the axis.
    pub axis: bool,
    pub core_area: f64,
}

/// Summary norms of a mean-curvature field on a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSummary {
    pub area: f64,
    pub h_linf: f64,
    pub h_l1: f64,
    pub h_l2: f64,
    pub h_lp: f64,
    pub p: f64,
    pub diameter: f64,
}

fn analytic_node(kind: &BaseKind, s: f64) -> NodeGeom {
    match *kind {
        BaseKind::FlatDisk { .. } | BaseKind::FlatAnnulus { .. } => NodeGeom {
            s,
            r: s,
            z: 0.0,
            speed: 1.0,
            tangent: [1.0, 0.0],
            normal: [0.0, 1.0],
            kappa: [0.0, 0.0],
        },
        BaseKind::Catenoid { c, z0, .. } => {
            let w = (s - z0) / c;
            let ch = w.cosh();
            let sh = w.sinh();
            let k = 1.0 / (c * ch * ch);
            NodeGeom {
                s,
                r: c * ch,
                z: s,
                speed: ch,
                tangent: [sh / ch, 1.0 / ch],
                normal: [1.0 / ch, -sh / ch],
                kappa: [-k, k],
            }
        }
        BaseKind::Revolution(_) => unreachable!("sampled kinds are handled separately"),
    }
}

/// Builds a base surface on a uniform meridian grid.
pub fn build_base(kind: BaseKind, grid: GridSpec) -> Result<BaseSurface> {
    let n = grid.nodes;
    if n < 3 {
        return Err(Error::Precondition("at least 3 meridian nodes required".into()));
    }
    let (shape, nodes, half, ds, axis, fixed_ends) = match &kind {
        BaseKind::FlatDisk { radius } => {
            if !(*radius > 0.0) {
                return Err(Error::Precondition("disk radius must be positive".into()));
            }
            let (a, b) = (AXIS_CORE * radius, *radius);
            let (ds, nodes, half) = analytic_grid(&kind, a, b, n);
            (BaseShape::FlatDisk, nodes, half, ds, true, [false, true])
        }
        BaseKind::FlatAnnulus { r_in, r_out } => {
            if !(*r_in > 0.0 && r_out > r_in) {
                return Err(Error::Precondition("annulus needs 0 < r_in < r_out".into()));
            }
            let (ds, nodes, half) = analytic_grid(&kind, *r_in, *r_out, n);
            (BaseShape::FlatAnnulus, nodes, half, ds, false, [true, true])
        }
        BaseKind::Catenoid { c, z_min, z_max, .. } => {
            if !(*c > 0.0 && z_max > z_min) {
                return Err(Error::Precondition("catenoid needs c > 0 and z_min < z_max".into()));
            }
            let (ds, nodes, half) = analytic_grid(&kind, *z_min, *z_max, n);
            (BaseShape::Catenoid, nodes, half, ds, false, [true, true])
        }
        BaseKind::Revolution(curve) => {
            let (ds, nodes, half) = sampled_grid(curve)?;
            let fixed = |f: BoundaryFlag| matches!(f, BoundaryFlag::Fixed | BoundaryFlag::Junction);
            let axis = curve.boundary_flags[0] == BoundaryFlag::Axis;
            (
                BaseShape::Revolution,
                nodes,
                half,
                ds,
                axis,
                [fixed(curve.boundary_flags[0]), fixed(curve.boundary_flags[1])],
            )
        }
    };
    let n = nodes.len();

    let max_kappa = nodes
        .iter()
        .chain(half.iter())
        .map(|g| g.kappa[0].abs().max(g.kappa[1].abs()))
        .fold(0.0, f64::max);
    let spacing = nodes.iter().map(|g| g.speed * ds).fold(0.0, f64::max);
    let product = max_kappa * spacing;
    if product > 0.5 {
        let required = ((n - 1) as f64 * product / 0.5).ceil() as usize + 1;
        return Err(Error::GridTooCoarse {
            product,
            required_nodes: required,
        });
    }

    let rm = |g: &NodeGeom| g.r * g.speed;
    let half_weight: Vec<f64> = half.iter().map(|g| 2.0 * PI * ds * rm(g)).collect();
    // each band is split evenly between its two end nodes, so the nodal weights sum to
    // the same area as the band weights used by the graph area functional
    let mut area_weight = vec![0.0; n];
    for (h, w) in half_weight.iter().enumerate() {
        area_weight[h] += 0.5 * w;
        area_weight[h + 1] += 0.5 * w;
    }
    let core_area = if axis { PI * nodes[0].r * nodes[0].r } else { 0.0 };
    area_weight[0] += core_area;

    let mut boundary_mask = vec![false; n];
    boundary_mask[0] = fixed_ends[0] && !axis;
    boundary_mask[n - 1] = fixed_ends[1];

    Ok(BaseSurface {
        shape,
        ds,
        nodes,
        half,
        area_weight,
        half_weight,
        boundary_mask,
        axis,
        core_area,
    })
}

fn analytic_grid(kind: &BaseKind, a: f64, b: f64, n: usize) -> (f64, Vec<NodeGeom>, Vec<NodeGeom>) {
    let ds = (b - a) / (n - 1) as f64;
    let nodes = (0..n).map(|i| analytic_node(kind, a + ds * i as f64)).collect();
    let half = (0..n - 1)
        .map(|i| analytic_node(kind, a + ds * (i as f64 + 0.5)))
        .collect();
    (ds, nodes, half)
}

fn sampled_grid(curve: &ProfileCurve) -> Result<(f64, Vec<NodeGeom>, Vec<NodeGeom>)> {
    let n = curve.len();
    let ds = (curve.params[n - 1] - curve.params[0]) / (n - 1) as f64;
    for i in 1..n {
        let step = curve.params[i] - curve.params[i - 1];
        if (step - ds).abs() > 1e-9 * ds.abs().max(1.0) {
            return Err(Error::Precondition(
                "revolution bases need uniformly spaced profile parameters".into(),
            ));
        }
    }
    let sigma = curve.orientation();
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let d = curve.derivatives(i)?;
        let (k, m) = curvatures_from(d, curve.r[i], sigma, i)?;
        let t = [d[0] / m, d[1] / m];
        nodes.push(NodeGeom {
            s: curve.params[i],
            r: curve.r[i],
            z: curve.z[i],
            speed: m,
            tangent: t,
            normal: [sigma * t[1], -sigma * t[0]],
            kappa: [k.meridian, k.parallel],
        });
    }
    let half = (0..n - 1)
        .map(|i| {
            let (a, b) = (&nodes[i], &nodes[i + 1]);
            let rp = (b.r - a.r) / ds;
            let zp = (b.z - a.z) / ds;
            let m = rp.hypot(zp);
            let t = [rp / m, zp / m];
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
    Ok((ds, nodes, half))
}

impl BaseSurface {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of a nodal field over the whole surface.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        integrate(self, field)
    }

    pub fn area(&self) -> f64 {
        self.area_weight.iter().sum()
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.shape, BaseShape::FlatDisk | BaseShape::FlatAnnulus)
    }

    pub fn free_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.boundary_mask[i])
    }

    pub fn mean_curvature(&self) -> Vec<f64> {
        self.nodes.iter().map(NodeGeom::mean_curvature).collect()
    }

    pub fn max_abs_kappa(&self) -> f64 {
        self.nodes
            .iter()
            .chain(self.half.iter())
            .map(|g| g.kappa[0].abs().max(g.kappa[1].abs()))
            .fold(0.0, f64::max)
    }

    /// Largest meridian arc-length spacing.
    pub fn spacing(&self) -> f64 {
        self.nodes.iter().map(|g| g.speed * self.ds).fold(0.0, f64::max)
    }

    /// Value at the axis by even extension `f = a + b r^2` through the two innermost nodes.
    pub fn center_value(&self, field: &[f64]) -> Option<f64> {
        if !self.axis {
            return None;
        }
        let (r0, r1) = (self.nodes[0].r, self.nodes[1].r);
        let b = (field[1] - field[0]) / (r1 * r1 - r0 * r0);
        Some(field[0] - b * r0 * r0)
    }

    /// Extrinsic diameter of the revolution surface spanned by the nodes.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.nodes {
            for b in &self.nodes {
                d = d.max((a.r + b.r).hypot(a.z - b.z));
            }
        }
        d
    }

    /// Norms of a mean-curvature field with the `L^p` exponent `p`.
    pub fn summary(&self, h: &[f64], p: f64) -> SurfaceSummary {
        let abs: Vec<f64> = h.iter().map(|v| v.abs()).collect();
        let lp = |q: f64| -> f64 {
            let pow: Vec<f64> = abs.iter().map(|v| v.powf(q)).collect();
            self.integrate(&pow).powf(1.0 / q)
        };
        SurfaceSummary {
            area: self.area(),
            h_linf: abs.iter().copied().fold(0.0, f64::max),
            h_l1: self.integrate(&abs),
            h_l2: lp(2.0),
            h_lp: if p.is_infinite() {
                abs.iter().copied().fold(0.0, f64::max)
            } else {
                lp(p)
            },
            p,
            diameter: self.diameter(),
        }
    }

    /// The meridian of the base as a profile curve.
    pub fn profile(&self) -> ProfileCurve {
        let first = if self.axis {
            BoundaryFlag::Axis
        } else if self.boundary_mask[0] {
            BoundaryFlag::Fixed
        } else {
            BoundaryFlag::Free
        };
        let last = if self.boundary_mask[self.len() - 1] {
            BoundaryFlag::Fixed
        } else {
            BoundaryFlag::Free
        };
        ProfileCurve {
            params: self.nodes.iter().map(|g| g.s).collect(),
            r: self.nodes.iter().map(|g| g.r).collect(),
            z: self.nodes.iter().map(|g| g.z).collect(),
            boundary_flags: [first, last],
        }
    }
}

/// Quadrature of a nodal field; second order in the grid spacing for smooth fields.
pub fn integrate(surface: &BaseSurface, field: &[f64]) -> f64 {
    surface
        .area_weight
        .iter()
        .zip(field)
        .map(|(w, f)| w * f)
        .sum()
}

/// Area of a catenoid band `r = c cosh((z - z0)/c)` between heights `za` and `zb`.
pub fn catenoid_band_area(c: f64, z0: f64, za: f64, zb: f64) -> f64 {
    let prim = |z: f64| {
        let w = (z - z0) / c;
        PI * c * (z - z0 + 0.5 * c * (2.0 * w).sinh())
    };
    prim(zb) - prim(za)
}
