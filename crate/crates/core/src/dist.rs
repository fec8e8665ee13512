//! Invariant distributions and their dual objects.
//!
//! The boundary jets delta^(r) (coefficient functionals read off at the
//! chart seam), the horocycle-eigenfunctionals deltahat_{k/T} (Fourier
//! values at the resonant frequencies, with the principal-series
//! regularization), Sobolev-order diagnostics, the averaging operator A_T,
//! and the dual functions built from compactly supported Fourier bumps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{HoromapError, Result};
use crate::models::{Chart, Model, SpectralFunction};
use crate::quad::{self, IntegralEstimate, QuadratureSpec};
use crate::sl2::{SeriesClass, SeriesKind};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);
const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Largest jet order the closed-form evaluators accept.
pub const JET_ORDER_CAP: usize = 12;

/// Distribution families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistKind {
    /// Boundary value delta^(0).
    Delta0,
    /// Boundary jet delta^(r) = Theta^r delta^(0).
    DeltaR(usize),
    /// Horocycle eigenfunctional at frequency k/T; `y` is the evaluation
    /// line for the discrete series (must be absent for mu > 0).
    DeltaHat { k: i64, t_period: f64, y: Option<f64> },
}

/// A tagged invariant distribution on the model with Casimir parameter mu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantDistribution {
    pub kind: DistKind,
    pub mu: f64,
}

impl InvariantDistribution {
    pub fn new(kind: DistKind, mu: f64) -> Result<Self> {
        let class = crate::sl2::classify(mu)?;
        match kind {
            DistKind::DeltaR(r) if r > JET_ORDER_CAP => {
                return Err(HoromapError::DerivativeOrderTooLarge { r, max: JET_ORDER_CAP });
            }
            DistKind::DeltaHat { t_period, y, .. } => {
                if !(t_period > 0.0) {
                    return Err(HoromapError::Config(format!(
                        "period T = {t_period} must be positive"
                    )));
                }
                match (class.kind, y) {
                    (SeriesKind::Discrete, Some(yy)) if yy > 0.0 => {}
                    (SeriesKind::Discrete, _) => {
                        return Err(HoromapError::DomainError(
                            "discrete-series deltahat carries a line height y > 0".into(),
                        ));
                    }
                    (_, None) => {}
                    (_, Some(_)) => {
                        return Err(HoromapError::DomainError(
                            "deltahat carries no line height for mu > 0".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(InvariantDistribution { kind, mu })
    }

    /// Claimed Sobolev order (the distribution is bounded on H^s for
    /// s above this value).
    pub fn claimed_order(&self) -> Result<f64> {
        let class = crate::sl2::classify(self.mu)?;
        let base = (1.0 + class.re_nu()) / 2.0;
        Ok(match self.kind {
            DistKind::Delta0 => base,
            DistKind::DeltaR(r) => r as f64 + base,
            DistKind::DeltaHat { .. } => {
                if class.kind == SeriesKind::Discrete {
                    1.0
                } else {
                    base
                }
            }
        })
    }

    /// Apply the distribution to a coefficient vector.
    pub fn evaluate(&self, model: &Model, f: &SpectralFunction) -> Result<IntegralEstimate> {
        match self.kind {
            DistKind::Delta0 => Ok(IntegralEstimate {
                value: eval_boundary_jet(model.class(), f, 0)?,
                error_estimate: 0.0,
            }),
            DistKind::DeltaR(r) => Ok(IntegralEstimate {
                value: eval_boundary_jet(model.class(), f, r)?,
                error_estimate: 0.0,
            }),
            DistKind::DeltaHat { k, t_period, y } => eval_deltahat(model, f, k, t_period, y),
        }
    }

    /// Value on the basis vector u_k (closed form where available).
    pub fn basis_value(&self, model: &Model, k: i64) -> Result<C64> {
        let class = model.class();
        if let Some(n) = class.lowest_weight {
            if k < n {
                return Err(HoromapError::IndexError {
                    k,
                    detail: format!("basis starts at lowest weight {n}"),
                });
            }
        }
        let w = jet_weight(class, k);
        match self.kind {
            DistKind::Delta0 => Ok(C64::new(w, 0.0)),
            DistKind::DeltaR(r) => Ok((2.0 * I * k as f64).powu(r as u32) * w),
            DistKind::DeltaHat { k: k0, t_period, y } => {
                let chart = Chart::default_for(class.kind);
                let u = SpectralFunction::basis_vector(self.mu, chart, k)?;
                Ok(eval_deltahat(model, &u, k0, t_period, y)?.value)
            }
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            DistKind::Delta0 => "delta0".into(),
            DistKind::DeltaR(r) => format!("delta{r}"),
            DistKind::DeltaHat { k, t_period, y } => match y {
                Some(yy) => format!("deltahat[{k}/{t_period},y={yy}]"),
                None => format!("deltahat[{k}/{t_period}]"),
            },
        }
    }
}

/// Seam weight of u_k in the jet formulas: (-1)^k for mu > 0 (the circle
/// profile at theta = pi/2), 1 for the discrete series (the disk profile
/// at xi = 1).
fn jet_weight(series: &SeriesClass, k: i64) -> f64 {
    if series.kind == SeriesKind::Discrete {
        1.0
    } else if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Boundary jet delta^(r)(f) = sum_k c_k (2ik)^r w_k in closed coefficient
/// form.
pub fn eval_boundary_jet(series: &SeriesClass, f: &SpectralFunction, r: usize) -> Result<C64> {
    if r > JET_ORDER_CAP {
        return Err(HoromapError::DerivativeOrderTooLarge { r, max: JET_ORDER_CAP });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (k, c) in f.iter() {
        acc += c * (2.0 * I * k as f64).powu(r as u32) * jet_weight(series, k);
    }
    Ok(acc)
}

/// Jet vector (delta^(0), ..., delta^(r))(f).
pub fn jet_vector(series: &SeriesClass, f: &SpectralFunction, r: usize) -> Result<Vec<C64>> {
    (0..=r).map(|j| eval_boundary_jet(series, f, j)).collect()
}

/// r-th Taylor coefficient derivative of the disk profile at the seam:
/// Phi^(r)(1) = sum_k c_k (k-n)(k-n-1)...(k-n-r+1).
pub fn disk_taylor_coefficient(series: &SeriesClass, f: &SpectralFunction, r: usize) -> Result<C64> {
    let n = series.lowest_weight.ok_or_else(|| {
        HoromapError::DomainError("disk Taylor coefficients require the discrete series".into())
    })?;
    if r > JET_ORDER_CAP {
        return Err(HoromapError::DerivativeOrderTooLarge { r, max: JET_ORDER_CAP });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (k, c) in f.iter() {
        let mut fall = 1.0f64;
        for j in 0..r {
            fall *= (k - n - j as i64) as f64;
        }
        acc += c * fall;
    }
    Ok(acc)
}

/// u_0 line shape (1+x^2)^(-(1+nu)/2), the regularizing profile.
fn u0_line(series: &SeriesClass, x: f64) -> C64 {
    (-(series.nu + 1.0) * 0.5 * (1.0 + x * x).ln()).exp()
}

/// Integral of the u_0 line shape: sqrt(pi) Gamma(nu/2) / Gamma((1+nu)/2),
/// finite for real nu > 0.
fn u0_line_integral(nu: f64) -> f64 {
    (0.5 * std::f64::consts::PI.ln() + ln_gamma(0.5 * nu) - ln_gamma(0.5 * (1.0 + nu))).exp()
}

/// deltahat_{k/T} on a pointwise realization.
///
/// `f` receives line points x + 0i for mu > 0 and half-plane points x + iy
/// for the discrete series.  `delta0` is the boundary value of f; it enters
/// the mu >= 1 regularization and the exact tail compensation of the
/// complementary zero-frequency value, and may be zero whenever the caller
/// knows the function annihilates delta^(0).
pub fn eval_deltahat_fn<F: Fn(C64) -> C64>(
    series: &SeriesClass,
    f: F,
    delta0: C64,
    k: i64,
    t_period: f64,
    y: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    if !(t_period > 0.0) {
        return Err(HoromapError::Config(format!("period T = {t_period} must be positive")));
    }
    let xi = k as f64 / t_period;
    match series.kind {
        SeriesKind::Principal => {
            // F(f - delta0 * u_0-shape)(k/T): the subtraction makes the
            // integrand decay one power faster, which is what renders the
            // transform absolutely convergent at mu >= 1.
            let h = |z: C64| f(z) - delta0 * u0_line(series, z.re);
            quad::fourier_transform(h, xi, 0.0, spec)
        }
        SeriesKind::Complementary => {
            if k == 0 {
                // Direct value, computed as F(f - delta0 u_0)(0) plus the
                // closed-form integral of the subtracted profile; the slow
                // x^-(1+nu) tail is integrated exactly this way.
                let h = |z: C64| f(z) - delta0 * u0_line(series, z.re);
                let est = quad::fourier_transform(h, 0.0, 0.0, spec)?;
                Ok(IntegralEstimate {
                    value: est.value + delta0 * u0_line_integral(series.real_nu()),
                    error_estimate: est.error_estimate,
                })
            } else {
                quad::fourier_transform(&f, xi, 0.0, spec)
            }
        }
        SeriesKind::Discrete => {
            if !(y > 0.0) {
                return Err(HoromapError::DomainError(format!(
                    "discrete-series deltahat requires a line height y > 0, got {y}"
                )));
            }
            quad::fourier_transform(&f, xi, y, spec)
        }
    }
}

/// deltahat_{k/T} of a coefficient vector (line-chart realization for
/// mu > 0, the y-line integral for the discrete series; y defaults to 1).
pub fn eval_deltahat(
    model: &Model,
    f: &SpectralFunction,
    k: i64,
    t_period: f64,
    y: Option<f64>,
) -> Result<IntegralEstimate> {
    let class = *model.class();
    match class.kind {
        SeriesKind::Discrete => {
            let yy = y.unwrap_or(1.0);
            let g = |z: C64| model.eval(f, z, Chart::HalfPlane).unwrap_or_default();
            eval_deltahat_fn(&class, g, C64::new(0.0, 0.0), k, t_period, yy, model.quad_spec())
        }
        _ => {
            if y.is_some() {
                return Err(HoromapError::DomainError(
                    "deltahat carries no line height for mu > 0".into(),
                ));
            }
            let d0 = eval_boundary_jet(&class, f, 0)?;
            let g = |z: C64| model.eval(f, C64::new(z.re, 0.0), Chart::Line).unwrap_or_default();
            eval_deltahat_fn(&class, g, d0, k, t_period, 0.0, model.quad_spec())
        }
    }
}

/// Truncated dual-norm proxy over the coefficient window:
/// (sum_k |d(u_k)|^2 / ((1+mu+8k^2)^s ||u_k||^2))^(1/2) for each s.
///
/// The table flattens under window doubling for s above the claimed order
/// and grows without bound below it; it is a diagnostic, not a proof.
pub fn distribution_order_estimate(
    model: &Model,
    dist: &InvariantDistribution,
    s_grid: &[f64],
    window: i64,
) -> Result<Vec<(f64, f64)>> {
    if window < 1 {
        return Err(HoromapError::Config("order estimate needs a positive window".into()));
    }
    let class = model.class();
    let (k_lo, k_hi) = match class.lowest_weight {
        Some(n) => (n, n + window),
        None => (-window, window),
    };
    let mu = class.mu;
    let mut weights = Vec::new();
    for k in k_lo..=k_hi {
        let d = dist.basis_value(model, k)?.norm_sqr();
        let norm = model.norm_sq(k)?;
        let lam = 1.0 + mu + 8.0 * (k * k) as f64;
        weights.push((lam, d / norm));
    }
    Ok(s_grid
        .iter()
        .map(|&s| {
            let total: f64 = weights.iter().map(|(lam, w)| w * lam.powf(-s)).sum();
            (s, total.sqrt())
        })
        .collect())
}

/// The averaging operator (A_T f)(z) = Int_0^T f(z - t) dt, realized by
/// Gauss panels; works on either the line (real z) or the half-plane.
pub fn apply_at<F: Fn(C64) -> C64>(f: F, t_period: f64) -> impl Fn(C64) -> C64 {
    let (nodes, weights) = quad::gauss_legendre(16);
    let panels = ((t_period * 4.0).ceil() as usize).max(8);
    move |z: C64| {
        let dt = t_period / panels as f64;
        let hw = 0.5 * dt;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * dt;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += f(z - (mid + hw * x)) * *w;
            }
        }
        acc * hw
    }
}

/// A dual function: for mu > 0 the bump-localized wave chi_k with
/// deltahat_{j/T}(chi_k) = [j = k] and delta^(0)(chi_k) = 0; for the
/// discrete series the holomorphic G-function with the e^{-2 pi k/T}
/// normalization folded in so that deltahat_{k/T, 1}(G) = 1 exactly.
#[derive(Debug, Clone)]
pub struct DualFunction {
    pub series: SeriesClass,
    pub k: i64,
    pub t_period: f64,
    pub width: f64,
    table: ChebTable,
}

/// Build the dual function of deltahat_{k/T}.  The bump width must satisfy
/// width < 1/(2T) so the translated supports stay disjoint.
pub fn dual_function(
    series: &SeriesClass,
    k: i64,
    t_period: f64,
    width: f64,
) -> Result<DualFunction> {
    if !(t_period > 0.0) {
        return Err(HoromapError::Config(format!("period T = {t_period} must be positive")));
    }
    if !(width > 0.0 && width < 1.0 / (2.0 * t_period)) {
        return Err(HoromapError::Config(format!(
            "bump width {width} outside (0, 1/(2T)) = (0, {})",
            1.0 / (2.0 * t_period)
        )));
    }
    if series.kind == SeriesKind::Discrete && k <= 0 {
        return Err(HoromapError::UnsupportedIndex {
            k,
            detail: "discrete-series duals exist for k >= 1 only".into(),
        });
    }
    let table = ChebTable::build(width);
    Ok(DualFunction { series: *series, k, t_period, width, table })
}

/// Fourier integral of the C^infinity bump profile:
/// Int_{-w}^{w} exp(1 - 1/(1 - (xi/w)^2)) e^{2 pi i xi arg} d xi.
/// Real and even in a real argument (the profile is real and even).
fn bump_fourier(w: f64, arg: C64) -> C64 {
    let profile = |t: f64| -> f64 {
        // t = xi / w in (-1, 1)
        let d = 1.0 - t * t;
        if d <= 0.0 {
            0.0
        } else {
            (1.0 - 1.0 / d).exp()
        }
    };
    let (nodes, weights) = quad::gauss_legendre(16);
    // Keep the oscillation per panel below ~7 radians for GL-16 accuracy.
    let n_panels = 8 + (1.6 * w * arg.norm()).ceil() as usize;
    let dxi = 2.0 * w / n_panels as f64;
    let hw = 0.5 * dxi;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..n_panels {
        let mid = -w + (p as f64 + 0.5) * dxi;
        for (x, wt) in nodes.iter().zip(&weights) {
            let xi = mid + hw * x;
            acc += profile(xi / w) * (TAU * I * xi * arg).exp() * *wt;
        }
    }
    acc * hw
}

const CHEB_DEGREE: usize = 16;
const CHEB_PANEL: f64 = 2.0;
const CHEB_EXTENT: f64 = 240.0;

/// Piecewise-Chebyshev table of the bump transform on [0, CHEB_EXTENT].
/// The transform is band-limited to [-w, w], so degree-16 panels of width 2
/// carry it to well below 1e-12; evaluation drops from a quadrature to a
/// 17-term Clenshaw sum, which is what makes nesting it inside the Fourier
/// engine affordable.
#[derive(Debug, Clone)]
struct ChebTable {
    width: f64,
    coeffs: Vec<[f64; CHEB_DEGREE + 1]>,
}

impl ChebTable {
    fn build(width: f64) -> Self {
        let n_panels = (CHEB_EXTENT / CHEB_PANEL) as usize;
        let mut coeffs = Vec::with_capacity(n_panels);
        let m = CHEB_DEGREE;
        for p in 0..n_panels {
            let a = p as f64 * CHEB_PANEL;
            let mid = a + 0.5 * CHEB_PANEL;
            let hw = 0.5 * CHEB_PANEL;
            let values: Vec<f64> = (0..=m)
                .map(|j| {
                    let t = (std::f64::consts::PI * j as f64 / m as f64).cos();
                    bump_fourier(width, C64::new(mid + hw * t, 0.0)).re
                })
                .collect();
            let mut c = [0.0f64; CHEB_DEGREE + 1];
            for (r, cr) in c.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, v) in values.iter().enumerate() {
                    let term = v * (std::f64::consts::PI * (j * r) as f64 / m as f64).cos();
                    acc += if j == 0 || j == m { 0.5 * term } else { term };
                }
                *cr = 2.0 * acc / m as f64;
            }
            c[0] *= 0.5;
            c[m] *= 0.5;
            coeffs.push(c);
        }
        ChebTable { width, coeffs }
    }

    /// Table lookup for real arguments inside the covered range, direct
    /// quadrature otherwise (complex arguments, or beyond the extent).
    fn eval(&self, arg: C64) -> C64 {
        if arg.im != 0.0 || arg.re.abs() >= CHEB_EXTENT {
            return bump_fourier(self.width, arg);
        }
        let x = arg.re.abs(); // the transform is even
        let p = ((x / CHEB_PANEL) as usize).min(self.coeffs.len() - 1);
        let t = (x - (p as f64 + 0.5) * CHEB_PANEL) / (0.5 * CHEB_PANEL);
        let c = &self.coeffs[p];
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0f64, 0.0f64);
        for &ck in c.iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        C64::new(b1 - t * b2, 0.0)
    }
}

impl DualFunction {
    /// Pointwise value (line realization for mu > 0, half-plane for the
    /// discrete series).
    pub fn eval(&self, z: C64) -> C64 {
        let center = self.k as f64 / self.t_period;
        match self.series.kind {
            SeriesKind::Discrete => {
                let zz = z - I;
                let damp = (-TAU * center).exp();
                (TAU * I * center * zz).exp() * self.table.eval(zz) * damp
            }
            _ => {
                let x = C64::new(z.re, 0.0);
                (TAU * I * center * x).exp() * self.table.eval(x)
            }
        }
    }

    /// Evaluate deltahat_{j/T} on this dual (the stored T; y = 1 for the
    /// discrete series).  delta^(0) vanishes exactly (compact Fourier
    /// support means a Schwartz profile), so no regularization term enters.
    pub fn pair_with(&self, j: i64, spec: &QuadratureSpec) -> Result<IntegralEstimate> {
        let g = |z: C64| self.eval(z);
        eval_deltahat_fn(&self.series, g, C64::new(0.0, 0.0), j, self.t_period, 1.0, spec)
    }

    /// Sampled bound on |delta^(0)|: the decay limit sup |f| (1+|x|)^(1+Re nu)
    /// far out on the chart (exact vanishing shows up as a tiny bound).
    pub fn boundary_decay_estimate(&self) -> f64 {
        match self.series.kind {
            SeriesKind::Discrete => {
                let nup1 = self.series.real_nu() + 1.0;
                [20.0f64, 40.0]
                    .iter()
                    .map(|&y| self.eval(C64::new(0.0, y)).norm() * (y + 1.0).powf(nup1))
                    .fold(0.0, f64::max)
            }
            _ => {
                let e = 1.0 + self.series.re_nu();
                [-1500.0f64, -800.0, 800.0, 1500.0]
                    .iter()
                    .map(|&x| self.eval(C64::new(x, 0.0)).norm() * (1.0 + x * x).powf(0.5 * e))
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// Project out the first `orders` boundary jets: returns f' = f - sum a_i
/// u_{q_i} with delta^(j)(f') = 0 for j < orders, using corrector indices
/// spread above the window for conditioning.
pub fn jet_project(
    series: &SeriesClass,
    f: &SpectralFunction,
    orders: usize,
) -> Result<SpectralFunction> {
    if orders == 0 {
        return Ok(f.clone());
    }
    if orders > JET_ORDER_CAP {
        return Err(HoromapError::DerivativeOrderTooLarge { r: orders, max: JET_ORDER_CAP });
    }
    let q0 = f.k_max() + 1;
    let qs: Vec<i64> = (0..orders).map(|i| q0 + 7 * i as i64).collect();
    // A[j][i] = delta^(j)(u_{q_i})
    let a: Vec<Vec<C64>> = (0..orders)
        .map(|j| {
            qs.iter()
                .map(|&q| (2.0 * I * q as f64).powu(j as u32) * jet_weight(series, q))
                .collect()
        })
        .collect();
    let b = jet_vector(series, f, orders - 1)?;
    let coef = solve_dense(a, b)?;
    let mut out = f.clone();
    let new_max = *qs.last().expect("orders > 0");
    let mut coeffs = vec![C64::new(0.0, 0.0); (new_max - out.k_min + 1) as usize];
    coeffs[..out.coeffs.len()].copy_from_slice(&out.coeffs);
    for (i, &q) in qs.iter().enumerate() {
        coeffs[(q - out.k_min) as usize] -= coef[i];
    }
    out.coeffs = coeffs;
    Ok(out.trimmed())
}

/// Dense complex linear solve with partial pivoting (the systems here are
/// tiny: jet correctors and dual-basis fits).
pub(crate) fn solve_dense(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Result<Vec<C64>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    for row in &a {
        if row.len() != n {
            return Err(HoromapError::Config("non-square system".into()));
        }
    }
    if b.len() != n {
        return Err(HoromapError::Config("right-hand side length mismatch".into()));
    }
    for col in 0..n {
        let (pivot, mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty range");
        if mag == 0.0 {
            return Err(HoromapError::IllConditioned { residual: f64::INFINITY, tol: 0.0 });
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                let sub = a[col][c] * factor;
                a[r][c] -= sub;
            }
            let sub = b[col] * factor;
            b[r] -= sub;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// sup over a two-sided log-spaced line grid of |f(x)| (1+|x|)^exponent.
pub fn line_decay_supremum(
    model: &Model,
    f: &SpectralFunction,
    exponent: f64,
    extent: f64,
    samples: usize,
) -> Result<f64> {
    let mut sup = 0.0f64;
    for i in 0..samples {
        let t = i as f64 / (samples - 1).max(1) as f64;
        let x = (extent.ln() * t).exp(); // 1 .. extent log-spaced
        for s in [x, -x] {
            let v = model.eval(f, C64::new(s, 0.0), Chart::Line)?.norm();
            sup = sup.max(v * (1.0 + s.abs()).powf(exponent));
        }
    }
    Ok(sup)
}

/// sup over half-plane rays (vertical, diagonal, and horizontal at height 1)
/// of |f(z)| (1+|z|)^exponent.
pub fn halfplane_decay_supremum(
    model: &Model,
    f: &SpectralFunction,
    exponent: f64,
    extent: f64,
    samples: usize,
) -> Result<f64> {
    let dirs = [C64::new(0.0, 1.0), C64::new(1.0, 1.0) / 2.0f64.sqrt()];
    let mut sup = 0.0f64;
    for i in 0..samples {
        let t = i as f64 / (samples - 1).max(1) as f64;
        let r = (extent.ln() * t).exp();
        for d in dirs {
            let z = d * r;
            if z.im <= 0.0 {
                continue;
            }
            let v = model.eval(f, z, Chart::HalfPlane)?.norm();
            sup = sup.max(v * (1.0 + z.norm()).powf(exponent));
        }
        for sign in [1.0f64, -1.0] {
            let z = C64::new(sign * r, 1.0);
            let v = model.eval(f, z, Chart::HalfPlane)?.norm();
            sup = sup.max(v * (1.0 + z.norm()).powf(exponent));
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{u_field_apply, Chart};
    use crate::sl2::classify;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn wide_spec() -> QuadratureSpec {
        QuadratureSpec { extent: 100.0, ..Default::default() }
    }

    fn fixed_window(mu: f64, chart: Chart, k_min: i64, coeffs: &[(f64, f64)]) -> SpectralFunction {
        SpectralFunction::new(mu, chart, k_min, coeffs.iter().map(|&(a, b)| c(a, b)).collect())
            .unwrap()
    }

    #[test]
    fn boundary_jet_examples() {
        let p = classify(2.0).unwrap();
        for k in [-3i64, 0, 2, 5] {
            let u = SpectralFunction::basis_vector(2.0, Chart::Line, k).unwrap();
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let j0 = eval_boundary_jet(&p, &u, 0).unwrap();
            assert!((j0 - c(sign, 0.0)).norm() < 1e-15);
            let j1 = eval_boundary_jet(&p, &u, 1).unwrap();
            assert!((j1 - 2.0 * I * k as f64 * sign).norm() < 1e-15);
        }
        let d = classify(-8.0).unwrap();
        for k in [2i64, 4, 7] {
            let u = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, k).unwrap();
            assert!((eval_boundary_jet(&d, &u, 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
            let j2 = eval_boundary_jet(&d, &u, 2).unwrap();
            assert!((j2 - (2.0 * I * k as f64).powu(2)).norm() < 1e-12);
        }
    }

    #[test]
    fn boundary_jet_order_cap() {
        let p = classify(2.0).unwrap();
        let u = SpectralFunction::basis_vector(2.0, Chart::Line, 0).unwrap();
        assert!(matches!(
            eval_boundary_jet(&p, &u, JET_ORDER_CAP + 1),
            Err(HoromapError::DerivativeOrderTooLarge { .. })
        ));
    }

    #[test]
    fn disk_taylor_examples() {
        let d = classify(-8.0).unwrap(); // n = 2
        let u5 = SpectralFunction::basis_vector(-8.0, Chart::HalfPlane, 5).unwrap();
        // Phi = xi^3: derivatives at 1 are 1, 3, 6.
        assert!((disk_taylor_coefficient(&d, &u5, 0).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((disk_taylor_coefficient(&d, &u5, 1).unwrap() - c(3.0, 0.0)).norm() < 1e-14);
        assert!((disk_taylor_coefficient(&d, &u5, 2).unwrap() - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn deltahat_of_coboundary_vanishes() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let g = fixed_window(
            2.0,
            Chart::Line,
            -3,
            &[(0.4, -0.1), (1.0, 0.3), (-0.6, 0.2), (0.2, 0.0), (0.5, -0.4), (0.0, 0.3), (-0.2, 0.1)],
        );
        let t = 1.0;
        let class = *model.class();
        let f = |z: C64| {
            model.eval(&g, c(z.re - t, 0.0), Chart::Line).unwrap()
                - model.eval(&g, c(z.re, 0.0), Chart::Line).unwrap()
        };
        for k in [0i64, 1, 2] {
            let est = eval_deltahat_fn(&class, f, c(0.0, 0.0), k, t, 0.0, &wide_spec()).unwrap();
            assert!(
                est.value.norm() <= 1e-8,
                "k={k}: |deltahat| = {:.3e}",
                est.value.norm()
            );
        }
    }

    #[test]
    fn deltahat_translation_invariance_principal() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let f = fixed_window(
            2.0,
            Chart::Line,
            -2,
            &[(0.8, 0.1), (-0.3, 0.5), (1.0, 0.0), (0.4, -0.2), (0.1, 0.6)],
        );
        let class = *model.class();
        let d0 = eval_boundary_jet(&class, &f, 0).unwrap();
        let t = 1.0;
        let spec = wide_spec();
        for k in [-2i64, 0, 1] {
            let plain = |z: C64| model.eval(&f, c(z.re, 0.0), Chart::Line).unwrap();
            let moved = |z: C64| model.eval(&f, c(z.re - t, 0.0), Chart::Line).unwrap();
            let a = eval_deltahat_fn(&class, plain, d0, k, t, 0.0, &spec).unwrap();
            let b = eval_deltahat_fn(&class, moved, d0, k, t, 0.0, &spec).unwrap();
            assert!(
                (a.value - b.value).norm() <= 1e-8,
                "k={k}: |diff| = {:.3e}",
                (a.value - b.value).norm()
            );
        }
    }

    #[test]
    fn deltahat_translation_invariance_complementary() {
        let model = Model::new(0.75, 8, QuadratureSpec::default()).unwrap();
        let f = fixed_window(
            0.75,
            Chart::Line,
            -2,
            &[(0.5, -0.3), (1.0, 0.2), (0.0, 0.7), (-0.4, 0.0), (0.3, 0.3)],
        );
        let class = *model.class();
        let d0 = eval_boundary_jet(&class, &f, 0).unwrap();
        let t = 1.0;
        let spec = wide_spec();
        for k in [0i64, 1, 3] {
            let plain = |z: C64| model.eval(&f, c(z.re, 0.0), Chart::Line).unwrap();
            let moved = |z: C64| model.eval(&f, c(z.re - t, 0.0), Chart::Line).unwrap();
            let a = eval_deltahat_fn(&class, plain, d0, k, t, 0.0, &spec).unwrap();
            let b = eval_deltahat_fn(&class, moved, d0, k, t, 0.0, &spec).unwrap();
            assert!(
                (a.value - b.value).norm() <= 1e-8,
                "k={k}: |diff| = {:.3e}",
                (a.value - b.value).norm()
            );
        }
    }

    #[test]
    fn deltahat_discrete_y_independence_and_vanishing() {
        let model = Model::new(-24.0, 8, QuadratureSpec::default()).unwrap(); // nu = 5, n = 3
        let f = fixed_window(
            -24.0,
            Chart::HalfPlane,
            3,
            &[(1.0, 0.0), (0.4, -0.3), (0.0, 0.5), (0.2, 0.1)],
        );
        let spec = wide_spec();
        let class = *model.class();
        let g = |z: C64| model.eval(&f, z, Chart::HalfPlane).unwrap();
        let t = 1.0;
        let lo = eval_deltahat_fn(&class, g, c(0.0, 0.0), 1, t, 0.5, &spec).unwrap();
        let hi = eval_deltahat_fn(&class, g, c(0.0, 0.0), 1, t, 2.0, &spec).unwrap();
        assert!(
            (lo.value - hi.value).norm() <= 1e-8,
            "y-independence broke: {:.3e}",
            (lo.value - hi.value).norm()
        );
        for k in [0i64, -1] {
            let v = eval_deltahat_fn(&class, g, c(0.0, 0.0), k, t, 1.0, &spec).unwrap();
            assert!(v.value.norm() <= 1e-8, "k={k}: {:.3e}", v.value.norm());
        }
    }

    #[test]
    fn delta0_flow_invariance_by_round_trip() {
        let model = Model::new(2.0, 64, QuadratureSpec::default()).unwrap();
        let f = fixed_window(
            2.0,
            Chart::Line,
            -3,
            &[(0.9, 0.0), (0.2, -0.5), (1.0, 0.4), (-0.3, 0.0), (0.0, 0.8), (0.4, 0.1), (0.2, 0.2)],
        );
        let class = *model.class();
        let d0 = eval_boundary_jet(&class, &f, 0).unwrap();
        for t in [0.1f64, 0.5, 1.0] {
            let moved = crate::models::project_line(
                &model,
                |x| model.eval(&f, c(x - t, 0.0), Chart::Line).unwrap(),
                -64,
                64,
                768,
            )
            .unwrap();
            let d0_moved = eval_boundary_jet(&class, &moved, 0).unwrap();
            assert!(
                (d0 - d0_moved).norm() <= 1e-8,
                "t={t}: |diff| = {:.3e}",
                (d0 - d0_moved).norm()
            );
        }
    }

    #[test]
    fn order_estimate_window_doubling() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let d0 = InvariantDistribution::new(DistKind::Delta0, 2.0).unwrap();
        // Above the claimed order 1/2: stable under doubling.
        let narrow = distribution_order_estimate(&model, &d0, &[0.6], 64).unwrap()[0].1;
        let wide = distribution_order_estimate(&model, &d0, &[0.6], 128).unwrap()[0].1;
        assert!(wide / narrow < 2.0, "stable ratio {}", wide / narrow);
        // Below it: grows.
        let narrow0 = distribution_order_estimate(&model, &d0, &[0.0], 64).unwrap()[0].1;
        let wide0 = distribution_order_estimate(&model, &d0, &[0.0], 128).unwrap()[0].1;
        assert!(wide0 > 1.2 * narrow0, "grew only {}", wide0 / narrow0);
        // DeltaR(1) behaves like Delta0 shifted by one order.
        let d1 = InvariantDistribution::new(DistKind::DeltaR(1), 2.0).unwrap();
        let n1 = distribution_order_estimate(&model, &d1, &[2.0], 64).unwrap()[0].1;
        let w1 = distribution_order_estimate(&model, &d1, &[2.0], 128).unwrap()[0].1;
        assert!(w1 / n1 < 2.0);
        let n1b = distribution_order_estimate(&model, &d1, &[1.0], 64).unwrap()[0].1;
        let w1b = distribution_order_estimate(&model, &d1, &[1.0], 128).unwrap()[0].1;
        assert!(w1b > 1.2 * n1b);
    }

    #[test]
    fn apply_at_constant() {
        let at = apply_at(|_z| c(2.5, -1.0), 1.5);
        let v = at(c(0.3, 0.0));
        assert!((v - c(3.75, -1.5)).norm() < 1e-12);
    }

    #[test]
    fn apply_at_flow_coboundary_identity() {
        // A_T(L_U u) = u(. - T) - u.
        let model = Model::new(0.75, 8, QuadratureSpec::default()).unwrap();
        let u = fixed_window(0.75, Chart::Line, -2, &[(0.7, 0.2), (0.0, -0.4), (1.0, 0.0), (0.3, 0.5), (-0.2, 0.1)]);
        let lu = u_field_apply(model.class(), &u).unwrap();
        let t = 1.0;
        let at = apply_at(|z| model.eval(&lu, c(z.re, 0.0), Chart::Line).unwrap(), t);
        for x in [-1.2f64, 0.0, 0.7, 2.0] {
            let lhs = at(c(x, 0.0));
            let rhs = model.eval(&u, c(x - t, 0.0), Chart::Line).unwrap()
                - model.eval(&u, c(x, 0.0), Chart::Line).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9, "x={x}: {:.3e}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn apply_at_fourier_vanishing() {
        let model = Model::new(2.0, 8, QuadratureSpec::default()).unwrap();
        let class = *model.class();
        let g = fixed_window(2.0, Chart::Line, -2, &[(0.6, 0.1), (1.0, -0.3), (0.2, 0.4), (-0.5, 0.0), (0.3, 0.2)]);
        let f = jet_project(&class, &g, 2).unwrap();
        let t = 1.0;
        let at = apply_at(|z| model.eval(&f, c(z.re, 0.0), Chart::Line).unwrap(), t);
        let est = eval_deltahat_fn(&class, |z| at(c(z.re, 0.0)), c(0.0, 0.0), 1, t, 0.0, &wide_spec())
            .unwrap();
        assert!(est.value.norm() <= 1e-6, "got {:.3e}", est.value.norm());
    }

    #[test]
    fn dual_function_duality_mu_positive() {
        let class = classify(2.0).unwrap();
        let chi = dual_function(&class, 3, 1.0, 0.25).unwrap();
        // The on-target integrand is non-oscillatory, so truncation error is
        // the raw bump-transform tail; extent 200 puts it near 3e-10.
        let spec = QuadratureSpec { extent: 200.0, ..Default::default() };
        let on_target = chi.pair_with(3, &spec).unwrap();
        assert!(
            (on_target.value - c(1.0, 0.0)).norm() <= 1e-8,
            "pairing with own index: {}",
            on_target.value
        );
        let off_target = chi.pair_with(2, &spec).unwrap();
        assert!(off_target.value.norm() <= 1e-8, "off index: {:.3e}", off_target.value.norm());
        assert!(chi.boundary_decay_estimate() <= 1e-8);
    }

    #[test]
    fn dual_function_duality_discrete() {
        let class = classify(-8.0).unwrap(); // nu = 3
        let g = dual_function(&class, 3, 1.0, 0.25).unwrap();
        let spec = QuadratureSpec { extent: 200.0, ..Default::default() };
        let on_target = g.pair_with(3, &spec).unwrap();
        assert!(
            (on_target.value - c(1.0, 0.0)).norm() <= 1e-8,
            "pairing with own index: {}",
            on_target.value
        );
        let off_target = g.pair_with(2, &spec).unwrap();
        assert!(off_target.value.norm() <= 1e-8, "off index: {:.3e}", off_target.value.norm());
        assert!(g.boundary_decay_estimate() <= 1e-8);
        assert!(matches!(
            dual_function(&class, 0, 1.0, 0.25),
            Err(HoromapError::UnsupportedIndex { .. })
        ));
    }

    #[test]
    fn dual_function_width_guard() {
        let class = classify(2.0).unwrap();
        assert!(dual_function(&class, 1, 2.0, 0.3).is_err()); // 1/(2T) = 0.25
        assert!(dual_function(&class, 1, 2.0, 0.2).is_ok());
    }

    #[test]
    fn jet_project_kills_jets() {
        let class = classify(0.75).unwrap();
        let g = fixed_window(0.75, Chart::Line, -4, &[(0.3, 0.9), (1.0, 0.0), (0.5, -0.5), (0.0, 0.2), (0.8, 0.1), (-0.6, 0.4), (0.2, 0.0), (0.1, -0.3), (0.4, 0.6)]);
        let f = jet_project(&class, &g, 3).unwrap();
        for j in 0..3 {
            let v = eval_boundary_jet(&class, &f, j).unwrap();
            assert!(v.norm() < 1e-10, "jet {j}: {:.3e}", v.norm());
        }
        // Untouched higher content: f still differs from zero.
        assert!(!f.is_zero());
    }

    #[test]
    fn line_decay_gate_stable_under_extent_doubling() {
        let model = Model::new(0.75, 8, QuadratureSpec::default()).unwrap();
        let class = *model.class();
        let re_nu = class.re_nu();
        let g = fixed_window(0.75, Chart::Line, -3, &[(0.5, 0.2), (1.0, -0.1), (0.0, 0.6), (0.7, 0.0), (-0.3, 0.4), (0.2, 0.1), (0.0, -0.5)]);
        for s in [1usize, 3] {
            let f = jet_project(&class, &g, s).unwrap();
            let e = s as f64 + 1.0 + re_nu;
            let near = line_decay_supremum(&model, &f, e, 20.0, 160).unwrap();
            let far = line_decay_supremum(&model, &f, e, 40.0, 160).unwrap();
            assert!(near.is_finite() && near > 0.0);
            let change = (far - near).abs() / near;
            assert!(change < 0.25, "s={s}: sup changed by {change:.3}");
        }
    }

    #[test]
    fn halfplane_decay_gate_stable_under_extent_doubling() {
        let model = Model::new(-8.0, 8, QuadratureSpec::default()).unwrap();
        let class = *model.class();
        let nu = class.real_nu();
        let g = fixed_window(-8.0, Chart::HalfPlane, 2, &[(1.0, 0.2), (0.4, -0.6), (0.0, 0.5), (0.3, 0.0), (0.1, 0.1)]);
        let s = 2.0f64;
        for r in [0usize, 2] {
            let f = jet_project(&class, &g, r).unwrap();
            let e = 0.5 * s + nu + r as f64;
            let near = halfplane_decay_supremum(&model, &f, e, 20.0, 120).unwrap();
            let far = halfplane_decay_supremum(&model, &f, e, 40.0, 120).unwrap();
            assert!(near.is_finite() && near > 0.0);
            let change = (far - near).abs() / near;
            assert!(change < 0.25, "r={r}: sup changed by {change:.3}");
        }
    }

    #[test]
    fn taylor_coefficients_vanish_below_half_regularity() {
        let model = Model::new(-8.0, 16, QuadratureSpec::default()).unwrap();
        let class = *model.class();
        let g = fixed_window(-8.0, Chart::HalfPlane, 2, &[(0.8, -0.2), (0.3, 0.5), (1.0, 0.0), (0.0, 0.4), (0.2, 0.1)]);
        let s = 6.0f64;
        let m = ((s - 1.0) / 2.0).floor() as usize; // r < m must vanish
        let f = jet_project(&class, &g, m).unwrap();
        let norm_s = model.sobolev_norm(&f, s).unwrap();
        for r in 0..m {
            let v = disk_taylor_coefficient(&class, &f, r).unwrap();
            assert!(
                v.norm() <= 1e-6 * norm_s,
                "r={r}: |Phi^(r)(1)| = {:.3e} vs bound {:.3e}",
                v.norm(),
                1e-6 * norm_s
            );
        }
    }

    #[test]
    fn invariant_distribution_validation() {
        assert!(InvariantDistribution::new(
            DistKind::DeltaHat { k: 1, t_period: 1.0, y: None },
            -8.0
        )
        .is_err());
        assert!(InvariantDistribution::new(
            DistKind::DeltaHat { k: 1, t_period: 1.0, y: Some(1.0) },
            2.0
        )
        .is_err());
        assert!(InvariantDistribution::new(
            DistKind::DeltaHat { k: 1, t_period: 1.0, y: Some(1.0) },
            -8.0
        )
        .is_ok());
        let d = InvariantDistribution::new(DistKind::DeltaR(2), 0.75).unwrap();
        assert_abs_diff_eq!(d.claimed_order().unwrap(), 2.75, epsilon = 1e-12);
        let dh = InvariantDistribution::new(
            DistKind::DeltaHat { k: 2, t_period: 0.5, y: Some(1.0) },
            -8.0,
        )
        .unwrap();
        assert_abs_diff_eq!(dh.claimed_order().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_dense_small_system() {
        // [[1, i], [i, 2]] x = [1+i, 0]
        let a = vec![vec![c(1.0, 0.0), I], vec![I, c(2.0, 0.0)]];
        let b = vec![c(1.0, 1.0), c(0.0, 0.0)];
        let x = solve_dense(a.clone(), b.clone()).unwrap();
        for r in 0..2 {
            let lhs = a[r][0] * x[0] + a[r][1] * x[1];
            assert!((lhs - b[r]).norm() < 1e-14);
        }
    }
}
