// Scratch probe for suite calibration; not part of the library surface.
use horomap::battery::{project_coboundary, random_spectral};
use horomap::dist::eval_boundary_jet;
use horomap::models::{project_halfplane, Chart, Model};
use horomap::quad::QuadratureSpec;
use horomap::solver::{
    compute_removal, removed_value, solve_with_options, SolveMethod, SolveOptions,
};
use num_complex::Complex64 as C64;

fn main() {
    // Which stage breaks at which period in the invariant suite.
    let opts = SolveOptions {
        method: SolveMethod::Series,
        tol: 1e-6,
        grid_extent: 4.0,
        grid_step: 0.25,
        recover: true,
    };
    for (t, window) in [(0.25f64, 32i64), (0.5, 32), (1.0, 48), (2.0, 96)] {
        let model = Model::new(2.0, window, QuadratureSpec::default()).unwrap();
        let g = random_spectral(2.0, 5, 0.55, 8007).unwrap();
        let f = match project_coboundary(&model, &g, t) {
            Ok(f) => f,
            Err(e) => {
                println!("T={t}: project_coboundary error: {e}");
                continue;
            }
        };
        match solve_with_options(&model, &f, t, 4, &opts) {
            Ok(out) => println!(
                "T={t}: recovered={} r0={:?}",
                out.coefficients.is_some(),
                out.sobolev_ratios.first()
            ),
            Err(e) => println!("T={t}: solve error: {e}"),
        }
    }

    // Window-doubling block of the invariant suite, stage by stage.
    for window in [32i64, 64] {
        let model = Model::new(0.75, window, QuadratureSpec::default()).unwrap();
        let g = random_spectral(0.75, 5, 0.55, 8008).unwrap();
        let f = match project_coboundary(&model, &g, 1.0) {
            Ok(f) => f,
            Err(e) => {
                println!("w={window}: project_coboundary error: {e}");
                continue;
            }
        };
        match solve_with_options(&model, &f, 1.0, 4, &opts) {
            Ok(out) => println!(
                "w={window}: recovered={} r0={:?}",
                out.coefficients.is_some(),
                out.sobolev_ratios.first()
            ),
            Err(e) => println!("w={window}: solve error: {e}"),
        }
    }

    // Discrete remainder jet re-projection: error versus ring parameters.
    let window = 64i64;
    let model = Model::new(-8.0, window, QuadratureSpec::default()).unwrap();
    let series = *model.class();
    let n = series.lowest_weight.unwrap();
    let t = 0.5;
    let g = random_spectral(-8.0, 6, 0.55, 3009).unwrap();
    let f = project_coboundary(&model, &g, t).unwrap();
    let removal = compute_removal(&model, &f, t, 4).unwrap();
    for (hi, samples, rho) in [
        (128i64, 1280usize, 0.9306f64),
        (128, 1280, 0.97),
        (128, 1280, 0.995),
        (128, 2560, 0.999),
        (160, 2560, 0.999),
    ] {
        let fd = project_halfplane(
            &model,
            |z| removed_value(&model, &f, &removal, z, Chart::HalfPlane).unwrap_or_default(),
            n,
            n + hi,
            samples,
            rho,
        );
        match fd {
            Ok(fd) => {
                print!("hi={hi} m={samples} rho={rho}: ");
                for k in 0..=4usize {
                    let v = eval_boundary_jet(&series, &fd, k).unwrap();
                    let scale = model.sobolev_norm(&f, k as f64 + 2.0).unwrap();
                    print!("j{k}={:.2e}/{:.2e} ", v.norm(), 1e-8 * scale);
                }
                println!();
            }
            Err(e) => println!("hi={hi} m={samples} rho={rho}: projection error: {e}"),
        }
    }
}
