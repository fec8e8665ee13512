//! Seeded test batteries: random coefficient windows and translation
//! coboundaries with exact primitives.
//!
//! Everything here is deterministic given the seed, so the verification
//! suites can freeze a battery by recording nothing more than (mu, window,
//! rho, seed).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::models::{project_halfplane, project_line, Chart, Model, SpectralFunction};
use crate::sl2::SeriesKind;

pub type C64 = Complex64;

/// Random coefficient window with geometric envelope rho^|k| (discrete
/// series: rho^(k-n) starting at the lowest weight).
pub fn random_spectral(mu: f64, window: i64, rho: f64, seed: u64) -> Result<SpectralFunction> {
    let class = crate::sl2::classify(mu)?;
    let chart = Chart::default_for(class.kind);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64| {
        C64::new(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale)
    };
    match class.lowest_weight {
        Some(n) => {
            let coeffs = (0..=window).map(|j| draw(rho.powi(j as i32))).collect();
            SpectralFunction::new(mu, chart, n, coeffs)
        }
        None => {
            let coeffs = (-window..=window).map(|k: i64| draw(rho.powi(k.abs() as i32))).collect();
            SpectralFunction::new(mu, chart, -window, coeffs)
        }
    }
}

/// A translation coboundary f = g(. - T) - g carried together with its
/// exact primitive g; the closed forms below are what the solver and
/// averaging oracles compare against.
#[derive(Debug, Clone)]
pub struct Coboundary {
    pub g: SpectralFunction,
    pub t_shift: f64,
}

impl Coboundary {
    pub fn new(g: SpectralFunction, t_shift: f64) -> Self {
        Coboundary { g, t_shift }
    }

    /// f(z) = g(z - T) - g(z).
    pub fn difference_at(&self, model: &Model, z: C64, chart: Chart) -> Result<C64> {
        let shift = C64::new(self.t_shift, 0.0);
        Ok(model.eval(&self.g, z - shift, chart)? - model.eval(&self.g, z, chart)?)
    }

    /// Exact telescoped Birkhoff sum:
    /// (1/N) sum_{n=0}^{N-1} f(z + nT) = (g(z - T) - g(z + (N-1) T)) / N.
    pub fn birkhoff_average(&self, model: &Model, z: C64, chart: Chart, n: usize) -> Result<C64> {
        let t = self.t_shift;
        let head = model.eval(&self.g, z - C64::new(t, 0.0), chart)?;
        let tail = model.eval(&self.g, z + C64::new((n as f64 - 1.0) * t, 0.0), chart)?;
        Ok((head - tail) / n as f64)
    }
}

/// Project the coboundary of g onto the model window as a coefficient
/// vector.  Translates of window-limited functions are analytic across the
/// seam, so the projection converges spectrally; the tail starts at the
/// top of g's window and carries a polynomial enhancement of that order,
/// which is why callers should leave generous room between g's window and
/// the model's.  The residual guard in the sampling path keeps us honest.
pub fn project_coboundary(model: &Model, g: &SpectralFunction, t_shift: f64) -> Result<SpectralFunction> {
    let w = model.window;
    let shift = C64::new(t_shift, 0.0);
    match model.class().kind {
        SeriesKind::Discrete => {
            let n = model.class().lowest_weight.expect("discrete class");
            project_halfplane(
                model,
                |z| {
                    model.eval(g, z - shift, Chart::HalfPlane).unwrap_or_default()
                        - model.eval(g, z, Chart::HalfPlane).unwrap_or_default()
                },
                n,
                n + 2 * w,
                (10 * w as usize).max(512),
                crate::models::ring_radius_for(2 * w),
            )
        }
        _ => project_line(
            model,
            |x| {
                let z = C64::new(x, 0.0);
                model.eval(g, z - shift, Chart::Line).unwrap_or_default()
                    - model.eval(g, z, Chart::Line).unwrap_or_default()
            },
            -w,
            w,
            (10 * w as usize).max(512),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadratureSpec;

    #[test]
    fn random_spectral_is_deterministic_and_decays() {
        let a = random_spectral(2.0, 16, 0.6, 7).unwrap();
        let b = random_spectral(2.0, 16, 0.6, 7).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        let c = random_spectral(2.0, 16, 0.6, 8).unwrap();
        assert_ne!(a.coeffs, c.coeffs);
        // Envelope: |c_k| <= sqrt(2) rho^|k|.
        for (k, v) in a.iter() {
            assert!(v.norm() <= 1.5 * 0.6f64.powi(k.abs() as i32));
        }
        let d = random_spectral(-8.0, 12, 0.5, 3).unwrap();
        assert_eq!(d.k_min, 2);
        assert_eq!(d.k_max(), 14);
    }

    #[test]
    fn coboundary_closed_forms_agree() {
        let model = Model::new(0.75, 16, QuadratureSpec::default()).unwrap();
        let g = random_spectral(0.75, 8, 0.5, 11).unwrap();
        let cb = Coboundary::new(g.clone(), 0.75);
        let z = C64::new(0.4, 0.0);
        // Direct N-term sum against the telescoped form.
        let n = 37;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += cb
                .difference_at(&model, z + C64::new(j as f64 * 0.75, 0.0), Chart::Line)
                .unwrap();
        }
        let tele = cb.birkhoff_average(&model, z, Chart::Line, n).unwrap();
        assert!((acc / n as f64 - tele).norm() < 1e-12);
    }

    #[test]
    fn projected_coboundary_matches_pointwise() {
        let model = Model::new(2.0, 64, QuadratureSpec::default()).unwrap();
        let g = random_spectral(2.0, 8, 0.55, 5).unwrap();
        let t = 1.0;
        let cb = Coboundary::new(g.clone(), t);
        let f = project_coboundary(&model, &g, t).unwrap();
        for x in [-3.0f64, -0.7, 0.0, 1.3, 6.0] {
            let z = C64::new(x, 0.0);
            let direct = cb.difference_at(&model, z, Chart::Line).unwrap();
            let via_coeffs = model.eval(&f, z, Chart::Line).unwrap();
            assert!(
                (direct - via_coeffs).norm() < 1e-10,
                "x={x}: {:.3e}",
                (direct - via_coeffs).norm()
            );
        }
    }

    #[test]
    fn projected_coboundary_discrete() {
        let model = Model::new(-8.0, 24, QuadratureSpec::default()).unwrap();
        let g = random_spectral(-8.0, 8, 0.5, 9).unwrap();
        let t = 0.5;
        let cb = Coboundary::new(g.clone(), t);
        let f = project_coboundary(&model, &g, t).unwrap();
        for z in [C64::new(0.3, 0.8), C64::new(-1.0, 2.0), C64::new(2.0, 0.4)] {
            let direct = cb.difference_at(&model, z, Chart::HalfPlane).unwrap();
            let via_coeffs = model.eval(&f, z, Chart::HalfPlane).unwrap();
            assert!(
                (direct - via_coeffs).norm() < 1e-8,
                "z={z}: {:.3e}",
                (direct - via_coeffs).norm()
            );
        }
    }
}
