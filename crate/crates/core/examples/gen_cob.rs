use horomap::battery::{project_coboundary, random_spectral};
use horomap::models::Model;
use horomap::quad::QuadratureSpec;

fn main() {
    for (mu, window, name) in [(2.0f64, 48i64, "p"), (-8.0, 48, "d")] {
        let model = Model::new(mu, window, QuadratureSpec::default()).unwrap();
        let g = random_spectral(mu, 5, 0.55, 42).unwrap();
        let f = project_coboundary(&model, &g, 1.0).unwrap();
        std::fs::write(format!("/tmp/cob_{name}.json"), f.to_json().unwrap()).unwrap();
    }
}
