//! Shared chart fixtures for unit tests; thin wrappers over the registry plus
//! a plain Euclidean chart of arbitrary even dimension.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::chart::ManifoldChart;
use crate::geodesic::GeodesicState;
use crate::registry;

pub fn paper_r2_chart() -> ManifoldChart {
    registry::lookup("paper-r2-kahler").unwrap().chart()
}

pub fn paper_r2_chart_fd() -> ManifoldChart {
    registry::lookup("paper-r2-kahler").unwrap().chart_without_jacobian()
}

pub fn cp1_chart() -> ManifoldChart {
    registry::lookup("cp1-fubini-study").unwrap().chart()
}

pub fn flat_cm_chart() -> ManifoldChart {
    registry::lookup("flat-cm").unwrap().chart()
}

pub fn bumpy_chart() -> ManifoldChart {
    registry::lookup("bumpy-surface-control").unwrap().chart()
}

pub fn perturbed_chart() -> ManifoldChart {
    registry::lookup("perturbed-r2-control").unwrap().chart()
}

/// Identity metric with the block rotation structure.
pub fn euclidean_chart(dim: usize) -> ManifoldChart {
    let mut j = DMatrix::zeros(dim, dim);
    for b in 0..dim / 2 {
        j[(2 * b, 2 * b + 1)] = -1.0;
        j[(2 * b + 1, 2 * b)] = 1.0;
    }
    ManifoldChart::new(
        dim,
        move |_x: &DVector<f64>| DMatrix::identity(dim, dim),
        move |_x: &DVector<f64>| j.clone(),
    )
    .with_metric_jacobian(move |_x: &DVector<f64>| vec![DMatrix::zeros(dim, dim); dim])
}

/// Unit-bundle initial data with conserved value `K`, drawn at a positive
/// base point that lies in every test chart's domain.
pub fn unit_initial_data(chart: &ManifoldChart, delta: f64, big_k: f64, seed: u64) -> (GeodesicState, f64) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DVector::from_fn(chart.dim(), |_, _| rng.random_range(0.8..2.0));
    let state = registry::unit_initial_data(chart, &x, delta, big_k, &mut rng).unwrap();
    (state, big_k)
}
