//! Representation models and coefficient calculus.
//!
//! A representation with Casimir value mu is realized concretely on four
//! charts: the line and the circle arc (-pi/2, pi/2) for mu > 0, and the
//! upper half-plane and unit disk for the discrete series (mu <= 0).  Each
//! model carries an orthogonal basis {u_k}; functions are finite coefficient
//! vectors over that basis ([`SpectralFunction`]), and the Lie-algebra
//! operators act through exact coefficient recurrences: ladder shifts,
//! diagonal eigenvalues for the rotation generator / Laplacian / Casimir,
//! and the tridiagonal action of the horocycle generator U.
//!
//! Pointwise realizations use closed-form basis evaluation; Sobolev norms
//! are diagonal with eigenvalue (1 + mu + 8 k^2)^s and basis norms from
//! closed forms (principal and discrete series) or cached quadrature
//! (complementary series, which has no closed form).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{HoromapError, Result};
use crate::quad::{self, QuadratureSpec};
use crate::sl2::{SeriesClass, SeriesKind};

pub type C64 = Complex64;

/// Default half-width of the coefficient window: |k| <= 64 for mu > 0,
/// n <= k <= n + 64 for the discrete series.
pub const DEFAULT_WINDOW: i64 = 64;

/// Derivative-order cap for [`evaluate`].
pub const DEFAULT_DERIVATIVE_CAP: usize = 6;

const I: C64 = C64::new(0.0, 1.0);

/// The four concrete charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Line,
    Circle,
    HalfPlane,
    Disk,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::Line => "Line",
            Chart::Circle => "Circle",
            Chart::HalfPlane => "HalfPlane",
            Chart::Disk => "Disk",
        };
        write!(f, "{s}")
    }
}

impl Chart {
    /// Line/Circle carry the mu > 0 models; HalfPlane/Disk the discrete series.
    pub fn admits(&self, kind: SeriesKind) -> bool {
        match self {
            Chart::Line | Chart::Circle => kind != SeriesKind::Discrete,
            Chart::HalfPlane | Chart::Disk => kind == SeriesKind::Discrete,
        }
    }

    pub fn default_for(kind: SeriesKind) -> Chart {
        if kind == SeriesKind::Discrete {
            Chart::HalfPlane
        } else {
            Chart::Line
        }
    }
}

/// A series class together with a chart choice.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpace {
    pub series: SeriesClass,
    pub chart: Chart,
}

impl ModelSpace {
    pub fn new(series: SeriesClass, chart: Chart) -> Result<Self> {
        if !chart.admits(series.kind) {
            return Err(HoromapError::DomainError(format!(
                "chart {chart} does not carry the {:?} series",
                series.kind
            )));
        }
        Ok(ModelSpace { series, chart })
    }
}

/// A finite coefficient vector over the basis {u_k}, k_min <= k <= k_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub mu: f64,
    pub chart: Chart,
    pub k_min: i64,
    pub coeffs: Vec<C64>,
}

/// JSON shape: {mu, chart, k_min, coeffs: [[re, im], ...]}.
#[derive(Serialize, Deserialize)]
struct SpectralFunctionJson {
    mu: f64,
    chart: Chart,
    k_min: i64,
    coeffs: Vec<[f64; 2]>,
}

impl SpectralFunction {
    pub fn new(mu: f64, chart: Chart, k_min: i64, coeffs: Vec<C64>) -> Result<Self> {
        let class = crate::sl2::classify(mu)?;
        if !chart.admits(class.kind) {
            return Err(HoromapError::DomainError(format!(
                "chart {chart} does not carry the {:?} series",
                class.kind
            )));
        }
        if let Some(n) = class.lowest_weight {
            if k_min < n {
                return Err(HoromapError::IndexError {
                    k: k_min,
                    detail: format!("discrete series requires k >= lowest weight {n}"),
                });
            }
        }
        Ok(SpectralFunction { mu, chart, k_min, coeffs })
    }

    pub fn zero(mu: f64, chart: Chart, k_min: i64) -> Self {
        SpectralFunction { mu, chart, k_min, coeffs: Vec::new() }
    }

    /// Unit coefficient vector at index k.
    pub fn basis_vector(mu: f64, chart: Chart, k: i64) -> Result<Self> {
        SpectralFunction::new(mu, chart, k, vec![C64::new(1.0, 0.0)])
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> C64 {
        if k < self.k_min || k > self.k_max() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.k_min) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, c)| (self.k_min + i as i64, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Drop exactly-zero entries at both window ends.
    pub fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.k_min += lead as i64;
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SpectralFunctionJson {
            mu: self.mu,
            chart: self.chart,
            k_min: self.k_min,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpectralFunctionJson = serde_json::from_str(text)?;
        SpectralFunction::new(
            doc.mu,
            doc.chart,
            doc.k_min,
            doc.coeffs.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
    }
}

/// Sampled realization of a model function on one chart.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub chart: Chart,
    pub nodes: Vec<C64>,
    pub values: Vec<C64>,
    pub derivative_order: usize,
}

impl GridFunction {
    pub fn new(chart: Chart, nodes: Vec<C64>, values: Vec<C64>, derivative_order: usize) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(HoromapError::DomainError(format!(
                "{} nodes vs {} values",
                nodes.len(),
                values.len()
            )));
        }
        match chart {
            Chart::Line | Chart::Circle => {
                let increasing = nodes.windows(2).all(|w| w[0].re < w[1].re);
                if !increasing {
                    return Err(HoromapError::DomainError(
                        "1-D chart nodes must be strictly increasing".into(),
                    ));
                }
            }
            Chart::HalfPlane | Chart::Disk => {
                for (i, a) in nodes.iter().enumerate() {
                    if nodes[i + 1..].iter().any(|b| (a - b).norm() == 0.0) {
                        return Err(HoromapError::DomainError(
                            "2-D chart nodes must be pairwise distinct".into(),
                        ));
                    }
                }
            }
        }
        Ok(GridFunction { chart, nodes, values, derivative_order })
    }

    /// CSV rows (node, re, im); 2-D nodes are written as "x+yi".
    pub fn to_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "re", "im"])?;
        for (z, v) in self.nodes.iter().zip(&self.values) {
            let node = if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
            };
            w.write_record([node, v.re.to_string(), v.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A model with its cached basis norms.
#[derive(Debug, Clone)]
pub struct Model {
    pub space: ModelSpace,
    pub window: i64,
    quad: QuadratureSpec,
    /// ||u_k||^2 for k in the window (index 0 = k_floor()).
    norm_cache: Vec<f64>,
}

impl Model {
    pub fn new(mu: f64, window: i64, quad: QuadratureSpec) -> Result<Self> {
        let series = crate::sl2::classify(mu)?;
        let chart = Chart::default_for(series.kind);
        let space = ModelSpace::new(series, chart)?;
        let k_lo = space.series.k_floor().unwrap_or(-window);
        let k_hi = k_lo + if space.series.lowest_weight.is_some() { window } else { 2 * window };
        let mut norm_cache = Vec::with_capacity((k_hi - k_lo + 1) as usize);
        for k in k_lo..=k_hi {
            norm_cache.push(basis_norm_sq(&series, k, &quad)?);
        }
        Ok(Model { space, window, quad, norm_cache })
    }

    pub fn with_defaults(mu: f64) -> Result<Self> {
        Model::new(mu, DEFAULT_WINDOW, QuadratureSpec::default())
    }

    pub fn class(&self) -> &SeriesClass {
        &self.space.series
    }

    pub fn mu(&self) -> f64 {
        self.class().mu
    }

    pub fn nu(&self) -> C64 {
        self.class().nu
    }

    pub fn quad_spec(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Smallest admissible basis index (lowest weight, or -window).
    pub fn k_floor(&self) -> i64 {
        self.class().k_floor().unwrap_or(-self.window)
    }

    pub fn k_ceil(&self) -> i64 {
        if self.class().lowest_weight.is_some() {
            self.k_floor() + self.window
        } else {
            self.window
        }
    }

    /// ||u_k||^2, from the closed forms (principal/discrete) or cached
    /// quadrature (complementary).
    pub fn norm_sq(&self, k: i64) -> Result<f64> {
        let lo = self.k_floor();
        let idx = k - lo;
        if idx >= 0 && (idx as usize) < self.norm_cache.len() {
            return Ok(self.norm_cache[idx as usize]);
        }
        basis_norm_sq(self.class(), k, &self.quad)
    }

    /// Sobolev norm of order s: (sum |c_k|^2 (1+mu+8k^2)^s ||u_k||^2)^(1/2).
    pub fn sobolev_norm(&self, f: &SpectralFunction, s: f64) -> Result<f64> {
        let mu = self.mu();
        let mut acc = 0.0;
        for (k, c) in f.iter() {
            let lam = 1.0 + mu + 8.0 * (k * k) as f64;
            acc += c.norm_sqr() * lam.powf(s) * self.norm_sq(k)?;
        }
        Ok(acc.sqrt())
    }

    /// Pointwise evaluation of f on a chart.
    pub fn eval(&self, f: &SpectralFunction, point: C64, chart: Chart) -> Result<C64> {
        eval_window(self.class(), f, point, chart)
    }

    /// Pointwise values of the r-th derivative of f (the spatial derivative;
    /// the horocycle generator acts as U = -d/dx, so this is (-U)^r f —
    /// a chart-independent function evaluated on the requested chart).
    pub fn evaluate(
        &self,
        f: &SpectralFunction,
        nodes: &[C64],
        chart: Chart,
        r: usize,
    ) -> Result<GridFunction> {
        if r > DEFAULT_DERIVATIVE_CAP {
            return Err(HoromapError::DerivativeOrderTooLarge { r, max: DEFAULT_DERIVATIVE_CAP });
        }
        let mut g = f.clone();
        for _ in 0..r {
            g = u_field_apply(self.class(), &g)?;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let values: Result<Vec<C64>> =
            nodes.iter().map(|z| Ok(self.eval(&g, *z, chart)? * sign)).collect();
        GridFunction::new(chart, nodes.to_vec(), values?, r)
    }

    /// The singular pairing realizing the complementary-series inner product
    /// <f, g>; for the principal series the plain L^2(R) pairing; for the
    /// discrete series the weighted half-plane pairing.  Quadrature-backed,
    /// independent of the coefficient-space norm formulas.
    pub fn pairing(&self, f: &SpectralFunction, g: &SpectralFunction) -> Result<C64> {
        match self.class().kind {
            SeriesKind::Complementary => {
                let nu = self.class().real_nu();
                let max_k = f.k_max().abs().max(f.k_min.abs()).max(g.k_max().abs().max(g.k_min.abs()));
                let cls = self.class().clone();
                let ff = f.clone();
                let gg = g.clone();
                let phi_f = move |theta: f64| circle_profile(&cls, &ff, theta);
                let cls2 = self.class().clone();
                let phi_g = move |theta: f64| circle_profile(&cls2, &gg, theta);
                let est = quad::integrate_complementary_pairing(
                    phi_f,
                    phi_g,
                    nu,
                    2.0 * max_k as f64,
                    &self.quad,
                )?;
                Ok(est.value)
            }
            SeriesKind::Principal => {
                let est = quad::integrate_line(
                    |x| {
                        let a = eval_window(self.class(), f, C64::new(x, 0.0), Chart::Line)
                            .unwrap_or_default();
                        let b = eval_window(self.class(), g, C64::new(x, 0.0), Chart::Line)
                            .unwrap_or_default();
                        a * b.conj()
                    },
                    &self.quad,
                )?;
                Ok(est.value)
            }
            SeriesKind::Discrete => {
                let nu = self.class().real_nu();
                let est = quad::integrate_halfplane(
                    |z| {
                        let a = eval_window(self.class(), f, z, Chart::HalfPlane).unwrap_or_default();
                        let b = eval_window(self.class(), g, z, Chart::HalfPlane).unwrap_or_default();
                        a * b.conj()
                    },
                    nu,
                    &self.quad,
                )?;
                Ok(est.value)
            }
        }
    }
}

/// ||u_k||^2 for one basis vector.
fn basis_norm_sq(series: &SeriesClass, k: i64, quad_spec: &QuadratureSpec) -> Result<f64> {
    match series.kind {
        SeriesKind::Principal => Ok(std::f64::consts::PI),
        SeriesKind::Complementary => {
            quad::complementary_basis_norm_sq(series.real_nu(), k, quad_spec)
        }
        SeriesKind::Discrete => {
            let n = series.lowest_weight.expect("discrete series has a lowest weight");
            if k < n {
                return Err(HoromapError::IndexError {
                    k,
                    detail: format!("basis starts at lowest weight {n}"),
                });
            }
            let nu = series.real_nu();
            // (pi/nu) 4^-nu (k-n)! nu! / (k+n-1)! via log-gamma.
            let ln = std::f64::consts::PI.ln() - nu.ln() - nu * 4.0f64.ln()
                + ln_gamma((k - n) as f64 + 1.0)
                + ln_gamma(nu + 1.0)
                - ln_gamma((k + n) as f64);
            Ok(ln.exp())
        }
    }
}

/// Circle-chart profile Phi(theta) = sum c_k e^{2 i k theta} (f divided by
/// the cos^{1+nu} weight).
fn circle_profile(series: &SeriesClass, f: &SpectralFunction, theta: f64) -> C64 {
    debug_assert!(series.kind != SeriesKind::Discrete);
    let w = (2.0 * I * theta).exp();
    let mut pow = (2.0 * I * f.k_min as f64 * theta).exp();
    let mut acc = C64::new(0.0, 0.0);
    for c in &f.coeffs {
        acc += c * pow;
        pow *= w;
    }
    acc
}

/// Disk-chart profile Phi(xi) = sum c_k xi^{k-n}.
fn disk_profile(series: &SeriesClass, f: &SpectralFunction, xi: C64) -> C64 {
    let n = series.lowest_weight.expect("disk profile needs the discrete series");
    let mut pow = xi.powi((f.k_min - n) as i32);
    let mut acc = C64::new(0.0, 0.0);
    for c in &f.coeffs {
        acc += c * pow;
        pow *= xi;
    }
    acc
}

fn check_point(chart: Chart, point: C64) -> Result<()> {
    let ok = match chart {
        Chart::Line => point.im == 0.0,
        Chart::Circle => point.im == 0.0 && point.re.abs() < std::f64::consts::FRAC_PI_2,
        Chart::HalfPlane => point.im > 0.0,
        Chart::Disk => point.norm() < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(HoromapError::DomainError(format!(
            "point {point} outside the {chart} chart domain"
        )))
    }
}

/// Closed-form basis vector u_k at one point.
pub fn basis_eval(series: &SeriesClass, k: i64, point: C64, chart: Chart) -> Result<C64> {
    if !chart.admits(series.kind) {
        return Err(HoromapError::DomainError(format!(
            "chart {chart} does not carry the {:?} series",
            series.kind
        )));
    }
    check_point(chart, point)?;
    let nu = series.nu;
    match chart {
        Chart::Circle => {
            let theta = point.re;
            // e^{2 i k theta} cos^{1+nu}(theta), principal branch
            // (cos > 0 on the open arc).
            let ln_cos = theta.cos().ln();
            Ok((2.0 * I * k as f64 * theta).exp() * ((nu + 1.0) * ln_cos).exp())
        }
        Chart::Line => {
            let x = point.re;
            let theta = x.atan();
            let ln_w = -(0.5 * (1.0 + x * x).ln());
            Ok((2.0 * I * k as f64 * theta).exp() * ((nu + 1.0) * ln_w).exp())
        }
        Chart::HalfPlane => {
            let n = series.lowest_weight.expect("HalfPlane chart implies discrete series");
            if k < n {
                return Err(HoromapError::IndexError {
                    k,
                    detail: format!("basis starts at lowest weight {n}"),
                });
            }
            let z = point;
            let w = (z - I) / (z + I);
            let m = (nu.re.round() as i32) + 1;
            Ok(w.powi((k - n) as i32) * (z + I).powi(-m))
        }
        Chart::Disk => {
            let n = series.lowest_weight.expect("Disk chart implies discrete series");
            if k < n {
                return Err(HoromapError::IndexError {
                    k,
                    detail: format!("basis starts at lowest weight {n}"),
                });
            }
            let xi = point;
            let m = (nu.re.round() as i32) + 1;
            Ok(xi.powi((k - n) as i32) * ((C64::new(1.0, 0.0) - xi) / (-2.0 * I)).powi(m))
        }
    }
}

/// Window evaluation sum c_k u_k(point) via a running power (one complex
/// exponential per call instead of one per basis vector).
fn eval_window(series: &SeriesClass, f: &SpectralFunction, point: C64, chart: Chart) -> Result<C64> {
    if f.coeffs.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    if !chart.admits(series.kind) {
        return Err(HoromapError::DomainError(format!(
            "chart {chart} does not carry the {:?} series",
            series.kind
        )));
    }
    check_point(chart, point)?;
    match chart {
        Chart::Line | Chart::Circle => {
            let theta = if chart == Chart::Line { point.re.atan() } else { point.re };
            let ln_cos = if chart == Chart::Line {
                -(0.5 * (1.0 + point.re * point.re).ln())
            } else {
                point.re.cos().ln()
            };
            let weight = ((series.nu + 1.0) * ln_cos).exp();
            Ok(circle_profile(series, f, theta) * weight)
        }
        Chart::HalfPlane => {
            let z = point;
            let n = series.lowest_weight.expect("discrete series");
            let w = (z - I) / (z + I);
            let m = (series.nu.re.round() as i32) + 1;
            let base = (z + I).powi(-m);
            let mut pow = w.powi((f.k_min - n) as i32);
            let mut acc = C64::new(0.0, 0.0);
            for c in &f.coeffs {
                acc += c * pow;
                pow *= w;
            }
            Ok(acc * base)
        }
        Chart::Disk => {
            let m = (series.nu.re.round() as i32) + 1;
            let weight = ((C64::new(1.0, 0.0) - point) / (-2.0 * I)).powi(m);
            Ok(disk_profile(series, f, point) * weight)
        }
    }
}

/// Ladder direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Raise,
    Lower,
}

/// Coefficient-space ladder shift: raising sends c_k to -(1+nu+2k) c_k at
/// index k+1; lowering sends c_k to (2k-1-nu) c_k at index k-1.  In the
/// discrete series the lowering coefficient vanishes identically at the
/// lowest weight, so that entry drops out of the window.
pub fn ladder_apply(series: &SeriesClass, f: &SpectralFunction, direction: LadderDirection) -> SpectralFunction {
    let nu = series.nu;
    let out_min = match direction {
        LadderDirection::Raise => f.k_min + 1,
        LadderDirection::Lower => f.k_min - 1,
    };
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for (k, c) in f.iter() {
        let factor = match direction {
            LadderDirection::Raise => -(nu + (1 + 2 * k) as f64),
            LadderDirection::Lower => C64::new((2 * k - 1) as f64, 0.0) - nu,
        };
        coeffs.push(c * factor);
    }
    let out = SpectralFunction { mu: f.mu, chart: f.chart, k_min: out_min, coeffs };
    out.trimmed()
}

/// Diagonal operator choice for [`diagonal_apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalOperator {
    Theta,
    Laplacian,
    Casimir,
}

/// Diagonal coefficient action: Theta multiplies c_k by (2ik)^p, the
/// Laplacian by (mu + 8k^2)^p, the Casimir by mu^p.
pub fn diagonal_apply(
    series: &SeriesClass,
    f: &SpectralFunction,
    operator: DiagonalOperator,
    power: u32,
) -> SpectralFunction {
    let mu = series.mu;
    let coeffs = f
        .iter()
        .map(|(k, c)| {
            let lam = match operator {
                DiagonalOperator::Theta => 2.0 * I * k as f64,
                DiagonalOperator::Laplacian => C64::new(mu + 8.0 * (k * k) as f64, 0.0),
                DiagonalOperator::Casimir => C64::new(mu, 0.0),
            };
            c * lam.powu(power)
        })
        .collect();
    SpectralFunction { mu: f.mu, chart: f.chart, k_min: f.k_min, coeffs }
}

/// Tridiagonal coefficient action of the horocycle generator U, the derived
/// representation of U = (Theta - Y)/2.
///
/// On every chart U u_k = -ik u_k + s·i(1+nu+2k)/4 u_{k+1} + s·i(2k-1-nu)/4
/// u_{k-1}, where s = -1 on the circle/line models and s = +1 on the
/// half-plane (the pointwise realization U = -d/dx fixes the signs; the
/// two chart families realize the ladder pair with opposite sign).
pub fn u_field_apply(series: &SeriesClass, f: &SpectralFunction) -> Result<SpectralFunction> {
    if f.coeffs.is_empty() {
        return Ok(f.clone());
    }
    let nu = series.nu;
    let s = if series.kind == SeriesKind::Discrete { 1.0 } else { -1.0 };
    let out_min = f.k_min - 1;
    let out_len = f.coeffs.len() + 2;
    let mut coeffs = vec![C64::new(0.0, 0.0); out_len];
    for (k, c) in f.iter() {
        let idx = (k - out_min) as usize;
        // diagonal: -ik
        coeffs[idx] += c * (-I * k as f64);
        // up: s * i (1 + nu + 2k)/4 into k+1
        coeffs[idx + 1] += c * (I * s * 0.25) * (nu + (1 + 2 * k) as f64);
        // down: s * i (2k - 1 - nu)/4 into k-1
        coeffs[idx - 1] += c * (I * s * 0.25) * (C64::new((2 * k - 1) as f64, 0.0) - nu);
    }
    let out = SpectralFunction { mu: f.mu, chart: f.chart, k_min: out_min, coeffs }.trimmed();
    if let Some(n) = series.lowest_weight {
        if out.k_min < n && !out.coeffs.iter().take((n - out.k_min) as usize).all(|c| c.norm() < 1e-14)
        {
            return Err(HoromapError::IndexError {
                k: out.k_min,
                detail: "U action leaked below the lowest weight".into(),
            });
        }
    }
    Ok(out.trimmed())
}

/// Chart maps: x = tan(theta) between Line and Circle, and the Cayley-type
/// map alpha(xi) = -i(xi+1)/(xi-1) between Disk and HalfPlane.
pub fn chart_map(point: C64, from: Chart, to: Chart) -> Result<C64> {
    check_point(from, point)?;
    let mapped = match (from, to) {
        (a, b) if a == b => point,
        (Chart::Circle, Chart::Line) => C64::new(point.re.tan(), 0.0),
        (Chart::Line, Chart::Circle) => C64::new(point.re.atan(), 0.0),
        (Chart::Disk, Chart::HalfPlane) => {
            -I * (point + 1.0) / (point - 1.0)
        }
        (Chart::HalfPlane, Chart::Disk) => (point - I) / (point + I),
        _ => {
            return Err(HoromapError::DomainError(format!(
                "no chart map from {from} to {to}: different series families"
            )))
        }
    };
    check_point(to, mapped)?;
    Ok(mapped)
}

/// Coefficients from dense chart samples.
///
/// For mu > 0 the grid must be the canonical uniform midpoint grid on the
/// circle arc; c_k = (1/pi) Int Phi(theta) e^{-2ik theta} dtheta by the
/// periodic trapezoid rule, Phi = values / cos^{1+nu}.  For the discrete
/// series the grid must be a uniform ring |xi| = rho in the disk chart;
/// c_k is the Cauchy coefficient integral of Phi = values / ((1-xi)/(-2i))^{nu+1}.
/// A round-trip residual above 1e-8 (relative) reports IllConditioned.
pub fn coeffs_from_samples(
    g: &GridFunction,
    model: &Model,
    k_min: i64,
    k_max: i64,
) -> Result<SpectralFunction> {
    let series = model.class();
    let m = g.nodes.len();
    let width = (k_max - k_min + 1) as usize;
    if k_max < k_min {
        return Err(HoromapError::Config("empty coefficient window".into()));
    }
    if m < 4 * width {
        return Err(HoromapError::DomainError(format!(
            "{m} samples below the Nyquist floor {} for window width {width}",
            4 * width
        )));
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); width];
    match g.chart {
        Chart::Circle => {
            // Expect midpoints theta_j = -pi/2 + pi (j + 1/2)/M.
            let pi = std::f64::consts::PI;
            for (j, node) in g.nodes.iter().enumerate() {
                let expect = -pi / 2.0 + pi * (j as f64 + 0.5) / m as f64;
                if (node.re - expect).abs() > 1e-10 || node.im != 0.0 {
                    return Err(HoromapError::DomainError(
                        "circle samples must lie on the uniform midpoint grid".into(),
                    ));
                }
            }
            for (j, node) in g.nodes.iter().enumerate() {
                let theta = node.re;
                let ln_cos = theta.cos().ln();
                let phi = g.values[j] * ((-(series.nu + 1.0)) * ln_cos).exp();
                for (i, slot) in coeffs.iter_mut().enumerate() {
                    let k = k_min + i as i64;
                    *slot += phi * (-2.0 * I * k as f64 * theta).exp();
                }
            }
            for c in &mut coeffs {
                *c /= m as f64;
            }
        }
        Chart::Disk => {
            let n = series.lowest_weight.ok_or_else(|| {
                HoromapError::DomainError("disk samples require the discrete series".into())
            })?;
            if k_min < n {
                return Err(HoromapError::IndexError {
                    k: k_min,
                    detail: format!("window below lowest weight {n}"),
                });
            }
            let rho = g.nodes[0].norm();
            let tau = 2.0 * std::f64::consts::PI;
            for (j, node) in g.nodes.iter().enumerate() {
                let expect = rho * (I * tau * j as f64 / m as f64).exp();
                if (node - expect).norm() > 1e-10 * (1.0 + rho) {
                    return Err(HoromapError::DomainError(
                        "disk samples must lie on a uniform ring".into(),
                    ));
                }
            }
            let mnu = (series.nu.re.round() as i32) + 1;
            for (j, node) in g.nodes.iter().enumerate() {
                let xi = *node;
                let phi = g.values[j] * ((C64::new(1.0, 0.0) - xi) / (-2.0 * I)).powi(-mnu);
                for (i, slot) in coeffs.iter_mut().enumerate() {
                    let k = k_min + i as i64;
                    *slot += phi * xi.powi(-((k - n) as i32));
                }
            }
            for c in &mut coeffs {
                *c /= m as f64;
            }
        }
        Chart::Line | Chart::HalfPlane => {
            return Err(HoromapError::DomainError(format!(
                "coefficient extraction expects the periodic chart, not {}",
                g.chart
            )));
        }
    }
    let f = SpectralFunction::new(model.mu(), Chart::default_for(series.kind), k_min, coeffs)?
        .trimmed();
    // Round-trip residual at the sample nodes.
    let scale = g.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
    let mut worst = 0.0f64;
    for (node, v) in g.nodes.iter().zip(&g.values) {
        let back = eval_window(series, &f, *node, g.chart)?;
        worst = worst.max((back - v).norm());
    }
    let tol = 1e-8;
    if worst > tol * scale {
        return Err(HoromapError::IllConditioned { residual: worst / scale, tol });
    }
    Ok(f)
}

/// Canonical circle midpoint sample nodes.
pub fn circle_sample_nodes(m: usize) -> Vec<C64> {
    let pi = std::f64::consts::PI;
    (0..m)
        .map(|j| C64::new(-pi / 2.0 + pi * (j as f64 + 0.5) / m as f64, 0.0))
        .collect()
}

/// Canonical disk ring sample nodes, |xi| = rho.
pub fn disk_sample_nodes(m: usize, rho: f64) -> Vec<C64> {
    let tau = 2.0 * std::f64::consts::PI;
    (0..m).map(|j| rho * (I * tau * j as f64 / m as f64).exp()).collect()
}

/// Project a pointwise line-chart function onto a coefficient window by
/// sampling it on the canonical circle grid.
pub fn project_line<F: Fn(f64) -> C64>(
    model: &Model,
    f: F,
    k_min: i64,
    k_max: i64,
    samples: usize,
) -> Result<SpectralFunction> {
    let nodes = circle_sample_nodes(samples);
    let values: Vec<C64> = nodes.iter().map(|t| f(t.re.tan())).collect();
    let g = GridFunction::new(Chart::Circle, nodes, values, 0)?;
    coeffs_from_samples(&g, model, k_min, k_max)
}

/// Ring radius for Cauchy coefficient extraction over `width` indices.
/// Extraction divides sample noise by rho^(k - n), so the radius must grow
/// toward 1 as the window widens to keep the amplified noise near 1e-12;
/// below width 90 the default 0.9 already does.
pub fn ring_radius_for(width: i64) -> f64 {
    (1e-4f64).powf(1.0 / width.max(1) as f64).max(0.9)
}

/// Project a pointwise half-plane function onto a coefficient window by
/// sampling it on the canonical disk ring (default radius 0.5).
pub fn project_halfplane<F: Fn(C64) -> C64>(
    model: &Model,
    f: F,
    k_min: i64,
    k_max: i64,
    samples: usize,
    rho: f64,
) -> Result<SpectralFunction> {
    let nodes = disk_sample_nodes(samples, rho);
    let values: Result<Vec<C64>> = nodes
        .iter()
        .map(|xi| {
            let z = chart_map(*xi, Chart::Disk, Chart::HalfPlane)?;
            Ok(f(z))
        })
        .collect();
    let g = GridFunction::new(Chart::Disk, nodes.clone(), values?, 0)?;
    coeffs_from_samples(&g, model, k_min, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::classify;
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_eval_examples() {
        // principal mu=1, k=0, theta=0 on the circle.
        let p = classify(1.0).unwrap();
        let v = basis_eval(&p, 0, c(0.0, 0.0), Chart::Circle).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        // discrete nu=3 (n=2), k=2 at z=i: (2i)^-4 = 1/16.
        let d = classify(-8.0).unwrap();
        let v = basis_eval(&d, 2, c(0.0, 1.0), Chart::HalfPlane).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        // complementary nu=0.5, k=0 at x=1: 2^(-3/4).
        let q = classify(0.75).unwrap();
        let v = basis_eval(&q, 0, c(1.0, 0.0), Chart::Line).unwrap();
        assert_abs_diff_eq!(v.re, 2.0f64.powf(-0.75), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn basis_eval_rejects_bad_indices_and_points() {
        let d = classify(-8.0).unwrap();
        assert!(matches!(
            basis_eval(&d, 1, c(0.0, 1.0), Chart::HalfPlane),
            Err(HoromapError::IndexError { .. })
        ));
        assert!(matches!(
            basis_eval(&d, 2, c(0.0, -1.0), Chart::HalfPlane),
            Err(HoromapError::DomainError(_))
        ));
        let p = classify(2.0).unwrap();
        assert!(matches!(
            basis_eval(&p, 0, c(2.0, 0.0), Chart::Circle),
            Err(HoromapError::DomainError(_))
        ));
    }

    #[test]
    fn ladder_examples() {
        let q = classify(0.75).unwrap(); // nu = 0.5
        let u0 = SpectralFunction::basis_vector(0.75, Chart::Line, 0).unwrap();
        let up = ladder_apply(&q, &u0, LadderDirection::Raise);
        assert_eq!(up.k_min, 1);
        assert_eq!(up.coeffs.len(), 1);
        assert_abs_diff_eq!(up.coeffs[0].re, -1.5, epsilon = 1e-15);
        let down = ladder_apply(&q, &u0, LadderDirection::Lower);
        assert_eq!(down.k_min, -1);
        assert_abs_diff_eq!(down.coeffs[0].re, -1.5, epsilon = 1e-15);
        // zero in, zero out
        let z = SpectralFunction::zero(0.75, Chart::Line, 0);
        assert!(ladder_apply(&q, &z, LadderDirection::Raise).is_zero());
    }

    #[test]
    fn discrete_lowering_annihilates_lowest_weight() {
        let d = classify(-8.0).unwrap(); // nu = 3, n = 2
        let un = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 2).unwrap();
        let down = ladder_apply(&d, &un, LadderDirection::Lower);
        assert!(down.is_zero());
    }

    #[test]
    fn diagonal_examples() {
        let p = classify(1.0).unwrap();
        let u3 = SpectralFunction::basis_vector(1.0, Chart::Line, 3).unwrap();
        let th = diagonal_apply(&p, &u3, DiagonalOperator::Theta, 1);
        assert_abs_diff_eq!(th.get(3).im, 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(th.get(3).re, 0.0, epsilon = 1e-15);
        let u2 = SpectralFunction::basis_vector(1.0, Chart::Line, 2).unwrap();
        let lap = diagonal_apply(&p, &u2, DiagonalOperator::Laplacian, 1);
        assert_abs_diff_eq!(lap.get(2).re, 33.0, epsilon = 1e-15);
        let q = classify(0.75).unwrap();
        let u5 = SpectralFunction::basis_vector(0.75, Chart::Line, 5).unwrap();
        let cas = diagonal_apply(&q, &u5, DiagonalOperator::Casimir, 1);
        assert_abs_diff_eq!(cas.get(5).re, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn casimir_equals_laplacian_plus_twice_theta_squared() {
        // Box = Laplacian + 2 Theta^2 on coefficients: mu + 8k^2 + 2(2ik)^2 = mu.
        let p = classify(5.0).unwrap();
        let f = SpectralFunction::new(5.0, Chart::Line, -2, vec![c(1.0, 0.5), c(-2.0, 0.1), c(0.0, 1.0), c(0.3, 0.0), c(2.0, -1.0)]).unwrap();
        let lap = diagonal_apply(&p, &f, DiagonalOperator::Laplacian, 1);
        let th2 = diagonal_apply(&p, &f, DiagonalOperator::Theta, 2);
        let cas = diagonal_apply(&p, &f, DiagonalOperator::Casimir, 1);
        for k in f.k_min..=f.k_max() {
            let combo = lap.get(k) + th2.get(k) * 2.0;
            assert!((combo - cas.get(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn u_field_on_u0_matches_assembled_form() {
        // U u_0 = (1+nu)/(4i) u_1 - (1+nu)/(4i) u_{-1}.
        let q = classify(0.75).unwrap(); // nu = 0.5
        let u0 = SpectralFunction::basis_vector(0.75, Chart::Line, 0).unwrap();
        let uf = u_field_apply(&q, &u0).unwrap();
        let expect_up = (c(1.5, 0.0)) / (4.0 * I);
        assert!((uf.get(1) - expect_up).norm() < 1e-15);
        assert!((uf.get(-1) + expect_up).norm() < 1e-15);
        assert!(uf.get(0).norm() < 1e-15);
    }

    #[test]
    fn u_field_matches_minus_derivative_mu_positive() {
        // Finite-difference oracle on the line chart.
        let model = Model::new(2.0, 16, QuadratureSpec::default()).unwrap();
        let f = SpectralFunction::new(
            2.0,
            Chart::Line,
            -2,
            vec![c(0.4, -0.3), c(1.0, 0.2), c(-0.5, 0.0), c(0.2, 0.7), c(0.0, -1.1)],
        )
        .unwrap();
        let uf = u_field_apply(model.class(), &f).unwrap();
        let h = 1e-5;
        for x in [-1.3f64, -0.2, 0.4, 2.2] {
            let left = model.eval(&f, c(x - h, 0.0), Chart::Line).unwrap();
            let right = model.eval(&f, c(x + h, 0.0), Chart::Line).unwrap();
            let fd = -(right - left) / (2.0 * h);
            let direct = model.eval(&uf, c(x, 0.0), Chart::Line).unwrap();
            assert!(
                (fd - direct).norm() <= 1e-6 * direct.norm().max(1.0),
                "x={x}: fd={fd}, direct={direct}"
            );
        }
    }

    #[test]
    fn u_field_matches_minus_derivative_discrete() {
        let model = Model::new(-8.0, 16, QuadratureSpec::default()).unwrap();
        let f = SpectralFunction::new(
            -8.0,
            Chart::HalfPlane,
            2,
            vec![c(1.0, 0.0), c(0.5, -0.2), c(0.0, 0.3)],
        )
        .unwrap();
        let uf = u_field_apply(model.class(), &f).unwrap();
        let h = 1e-5;
        for z in [c(0.3, 1.1), c(-0.7, 0.6), c(1.4, 2.0)] {
            let left = model.eval(&f, z - h, Chart::HalfPlane).unwrap();
            let right = model.eval(&f, z + h, Chart::HalfPlane).unwrap();
            let fd = -(right - left) / (2.0 * h);
            let direct = model.eval(&uf, z, Chart::HalfPlane).unwrap();
            assert!(
                (fd - direct).norm() <= 1e-6 * direct.norm().max(1.0),
                "z={z}: fd={fd}, direct={direct}"
            );
        }
    }

    #[test]
    fn theta_realization_matches_eigenvalue() {
        // Theta = -(1+nu) tan(theta) - d/dtheta pointwise; on u_k it acts
        // as the scalar -2ik.  Checked by finite differences on the circle.
        let q = classify(0.75).unwrap();
        let h = 1e-5;
        for k in [-3i64, 0, 2, 7] {
            for theta in [-0.9f64, 0.1, 0.6] {
                let at = |t: f64| basis_eval(&q, k, c(t, 0.0), Chart::Circle).unwrap();
                let dtheta = (at(theta + h) - at(theta - h)) / (2.0 * h);
                let val = at(theta);
                let theta_action = -(q.nu + 1.0) * theta.tan() * val - dtheta;
                let eig = -2.0 * I * k as f64 * val;
                assert!(
                    (theta_action - eig).norm() <= 1e-6 * eig.norm().max(1.0),
                    "k={k}, theta={theta}"
                );
            }
        }
    }

    #[test]
    fn sobolev_norm_examples() {
        let model = Model::new(1.0, 8, QuadratureSpec::default()).unwrap();
        let u2 = SpectralFunction::basis_vector(1.0, Chart::Line, 2).unwrap();
        assert_abs_diff_eq!(
            model.sobolev_norm(&u2, 1.0).unwrap(),
            (34.0 * PI).sqrt(),
            epsilon = 1e-12
        );
        let dm = Model::new(-8.0, 8, QuadratureSpec::default()).unwrap();
        let un = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 2).unwrap();
        assert_abs_diff_eq!(
            dm.sobolev_norm(&un, 0.0).unwrap(),
            (PI / 192.0).sqrt(),
            epsilon = 1e-12
        );
        let f = SpectralFunction::new(1.0, Chart::Line, 0, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(model.sobolev_norm(&f, 0.0).unwrap(), (2.0 * PI).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn sobolev_norm_monotone_in_s() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let f = SpectralFunction::new(
            2.0,
            Chart::Line,
            -1,
            vec![c(0.3, 0.1), c(1.0, -0.4), c(0.2, 0.2)],
        )
        .unwrap();
        let mut prev = 0.0;
        for s in [0.0, 0.5, 1.0, 2.0, 3.5] {
            let n = model.sobolev_norm(&f, s).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn discrete_laplacian_eigenvalue_floor() {
        // 1 + mu + 8k^2 >= (nu+2)^2 for k >= n, equality at k = n.
        for mu in [-8.0, -24.0, 0.0] {
            let cls = classify(mu).unwrap();
            let n = cls.lowest_weight.unwrap();
            let nu = cls.real_nu();
            let bound = (nu + 2.0) * (nu + 2.0);
            for k in n..n + 12 {
                let lam = 1.0 + mu + 8.0 * (k * k) as f64;
                assert!(lam >= bound - 1e-9, "mu={mu}, k={k}");
            }
            let at_n = 1.0 + mu + 8.0 * (n * n) as f64;
            assert_abs_diff_eq!(at_n, bound, epsilon = 1e-9);
        }
    }

    #[test]
    fn evaluate_derivative_example() {
        // d/dz of u_n (nu=3) at z=i: -4 (2i)^-5.
        let model = Model::new(-8.0, 8, QuadratureSpec::default()).unwrap();
        let un = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 2).unwrap();
        let g = model.evaluate(&un, &[c(0.0, 1.0)], Chart::HalfPlane, 1).unwrap();
        let expect = (2.0 * I).powi(-5) * -4.0;
        assert!((g.values[0] - expect).norm() < 1e-12, "got {}", g.values[0]);
        assert_eq!(g.derivative_order, 1);
    }

    #[test]
    fn evaluate_chart_consistency() {
        let model = Model::new(0.75, 8, QuadratureSpec::default()).unwrap();
        let f = SpectralFunction::new(
            0.75,
            Chart::Line,
            -1,
            vec![c(0.5, 0.2), c(1.0, 0.0), c(-0.3, 0.4)],
        )
        .unwrap();
        for r in [0usize, 1, 2] {
            for x in [-0.8f64, 0.3, 1.9] {
                let on_line = model.evaluate(&f, &[c(x, 0.0)], Chart::Line, r).unwrap();
                let on_circle = model.evaluate(&f, &[c(x.atan(), 0.0)], Chart::Circle, r).unwrap();
                assert!(
                    (on_line.values[0] - on_circle.values[0]).norm() < 1e-12,
                    "r={r}, x={x}"
                );
            }
        }
    }

    #[test]
    fn evaluate_rejects_large_order() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let f = SpectralFunction::basis_vector(2.0, Chart::Line, 0).unwrap();
        assert!(matches!(
            model.evaluate(&f, &[c(0.0, 0.0)], Chart::Line, 7),
            Err(HoromapError::DerivativeOrderTooLarge { .. })
        ));
    }

    #[test]
    fn coeffs_from_samples_round_trip() {
        let model = Model::new(2.0, 16, QuadratureSpec::default()).unwrap();
        // u_3 -> unit vector at k=3.
        let f = project_line(
            &model,
            |x| basis_eval(model.class(), 3, c(x, 0.0), Chart::Line).unwrap(),
            -8,
            8,
            256,
        )
        .unwrap();
        assert!((f.get(3) - c(1.0, 0.0)).norm() < 1e-10);
        for k in -8..=8 {
            if k != 3 {
                assert!(f.get(k).norm() < 1e-10, "k={k}");
            }
        }
        // 2 u_1 - i u_4.
        let g = project_line(
            &model,
            |x| {
                basis_eval(model.class(), 1, c(x, 0.0), Chart::Line).unwrap() * 2.0
                    + basis_eval(model.class(), 4, c(x, 0.0), Chart::Line).unwrap() * (-I)
            },
            -8,
            8,
            256,
        )
        .unwrap();
        assert!((g.get(1) - c(2.0, 0.0)).norm() < 1e-10);
        assert!((g.get(4) + I).norm() < 1e-10);
    }

    #[test]
    fn coeffs_from_samples_translated_function() {
        let model = Model::new(2.0, 64, QuadratureSpec::default()).unwrap();
        let t = 1.0;
        let f = project_line(
            &model,
            |x| basis_eval(model.class(), 0, c(x - t, 0.0), Chart::Line).unwrap(),
            -64,
            64,
            768,
        )
        .unwrap();
        // Reconstruction against fresh off-grid samples.
        for x in [-2.3f64, 0.1, 0.7, 3.9] {
            let truth = basis_eval(model.class(), 0, c(x - t, 0.0), Chart::Line).unwrap();
            let back = model.eval(&f, c(x, 0.0), Chart::Line).unwrap();
            assert!((truth - back).norm() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn coeffs_from_samples_discrete_round_trip() {
        let model = Model::new(-8.0, 16, QuadratureSpec::default()).unwrap();
        let f = project_halfplane(
            &model,
            |z| {
                basis_eval(model.class(), 3, z, Chart::HalfPlane).unwrap() * c(0.0, 2.0)
                    + basis_eval(model.class(), 5, z, Chart::HalfPlane).unwrap()
            },
            2,
            10,
            128,
            0.5,
        )
        .unwrap();
        assert!((f.get(3) - c(0.0, 2.0)).norm() < 1e-10);
        assert!((f.get(5) - c(1.0, 0.0)).norm() < 1e-10);
        assert!(f.get(4).norm() < 1e-10);
    }

    #[test]
    fn coeffs_from_samples_nyquist_guard() {
        let model = Model::new(2.0, 16, QuadratureSpec::default()).unwrap();
        let nodes = circle_sample_nodes(16);
        let values = vec![c(1.0, 0.0); 16];
        let g = GridFunction::new(Chart::Circle, nodes, values, 0).unwrap();
        assert!(matches!(
            coeffs_from_samples(&g, &model, -8, 8),
            Err(HoromapError::DomainError(_))
        ));
    }

    #[test]
    fn chart_map_examples() {
        // Disk origin -> z = i.
        let z = chart_map(c(0.0, 0.0), Chart::Disk, Chart::HalfPlane).unwrap();
        assert!((z - I).norm() < 1e-15);
        // theta = pi/4 -> x = 1.
        let x = chart_map(c(PI / 4.0, 0.0), Chart::Circle, Chart::Line).unwrap();
        assert_abs_diff_eq!(x.re, 1.0, epsilon = 1e-15);
        // Round trips.
        for xi in [c(0.3, 0.1), c(-0.4, 0.5), c(0.0, -0.7)] {
            let there = chart_map(xi, Chart::Disk, Chart::HalfPlane).unwrap();
            let back = chart_map(there, Chart::HalfPlane, Chart::Disk).unwrap();
            assert!((back - xi).norm() < 1e-14);
        }
        for x in [-3.0f64, 0.2, 10.0] {
            let there = chart_map(c(x, 0.0), Chart::Line, Chart::Circle).unwrap();
            let back = chart_map(there, Chart::Circle, Chart::Line).unwrap();
            assert!((back.re - x).abs() < 1e-13 * x.abs().max(1.0));
        }
        assert!(chart_map(c(0.5, 0.0), Chart::Line, Chart::Disk).is_err());
    }

    #[test]
    fn principal_basis_orthogonality_by_quadrature() {
        let model = Model::new(5.0, 8, QuadratureSpec::default()).unwrap();
        let u0 = SpectralFunction::basis_vector(5.0, Chart::Line, 0).unwrap();
        let u1 = SpectralFunction::basis_vector(5.0, Chart::Line, 1).unwrap();
        let p01 = model.pairing(&u0, &u1).unwrap();
        assert!(p01.norm() < 1e-6 * PI, "got {}", p01.norm());
        let p00 = model.pairing(&u0, &u0).unwrap();
        assert_abs_diff_eq!(p00.re, PI, epsilon = 1e-8);
    }

    #[test]
    fn discrete_basis_orthogonality_by_quadrature() {
        let model = Model::new(-8.0, 8, QuadratureSpec { extent: 60.0, ..Default::default() }).unwrap();
        let u2 = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 2).unwrap();
        let u3 = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 3).unwrap();
        let p23 = model.pairing(&u2, &u3).unwrap();
        let scale = model.norm_sq(2).unwrap().sqrt() * model.norm_sq(3).unwrap().sqrt();
        assert!(p23.norm() < 1e-6 * scale, "got {}", p23.norm());
        let p22 = model.pairing(&u2, &u2).unwrap();
        assert_abs_diff_eq!(p22.re, PI / 192.0, epsilon = 1e-6 * PI / 192.0);
    }

    #[test]
    fn complementary_norm_band() {
        // ||u_k||^2 (1+|k|)^nu within a factor-10 band.
        let model = Model::new(0.75, 8, QuadratureSpec::default()).unwrap();
        let nu = model.class().real_nu();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..=40i64 {
            let v = model.norm_sq(k).unwrap() * (1.0 + k as f64).powf(nu);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(hi / lo < 10.0, "band ratio {}", hi / lo);
    }

    #[test]
    fn spectral_function_json_round_trip() {
        let f = SpectralFunction::new(
            0.75,
            Chart::Line,
            -2,
            vec![c(1.0, -0.5), c(0.0, 2.0), c(0.25, 0.0)],
        )
        .unwrap();
        let text = f.to_json().unwrap();
        let back = SpectralFunction::from_json(&text).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn grid_function_csv_export() {
        let g = GridFunction::new(
            Chart::HalfPlane,
            vec![c(0.5, 1.0), c(1.5, 2.0)],
            vec![c(0.25, -0.125), c(1.0, 0.0)],
            0,
        )
        .unwrap();
        let mut buf = Vec::new();
        g.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node,re,im\n"));
        assert!(text.contains("0.5+1i"));
        assert!(text.contains("-0.125"));
    }

    #[test]
    fn grid_function_node_validation() {
        assert!(GridFunction::new(
            Chart::Line,
            vec![c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            0
        )
        .is_err());
        assert!(GridFunction::new(
            Chart::HalfPlane,
            vec![c(1.0, 1.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            0
        )
        .is_err());
    }
}
