//! Parallel wrappers over the pure per-entry computations in the core
//! crate. Entries are independent, so results are bit-identical to the
//! serial paths regardless of thread count or schedule.

use qmlkit_core::error::Result as CoreResult;
use qmlkit_core::featmap::{self, FeatureMapSpec, GramMatrix};
use qmlkit_core::qsim::StateVector;
use qmlkit_core::quanv::{self, FeatureTensor, PixelGrid, QuanvSpec};
use rayon::prelude::*;

use crate::error::RunError;

/// A rayon pool with `threads` workers, or the default-sized pool.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| RunError::runtime("thread-pool", e))
}

fn prepare_states(
    pool: &rayon::ThreadPool,
    spec: &FeatureMapSpec,
    samples: &[Vec<f64>],
) -> CoreResult<Vec<StateVector>> {
    pool.install(|| {
        samples
            .par_iter()
            .map(|x| featmap::feature_state(spec, x))
            .collect()
    })
}

/// Square Gram over one sample set, rows computed in parallel. Matches
/// `featmap::gram_matrix` bit for bit.
pub fn gram_square(
    pool: &rayon::ThreadPool,
    spec: &FeatureMapSpec,
    samples: &[Vec<f64>],
) -> CoreResult<GramMatrix> {
    let states = prepare_states(pool, spec, samples)?;
    let n = samples.len();
    let rows: Vec<CoreResult<Vec<f64>>> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| featmap::fidelity(&states[i], &states[j]))
                    .collect()
            })
            .collect()
    });
    let mut values = Vec::with_capacity(n * n);
    for row in rows {
        values.extend(row?);
    }
    GramMatrix::from_values(n, n, values, *spec)
}

/// Rectangular Gram, rows in parallel against shared column states.
pub fn gram_rect(
    pool: &rayon::ThreadPool,
    spec: &FeatureMapSpec,
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
) -> CoreResult<GramMatrix> {
    let col_states = prepare_states(pool, spec, cols)?;
    let out: Vec<CoreResult<Vec<f64>>> = pool.install(|| {
        rows.par_iter()
            .map(|row| {
                let psi = featmap::feature_state(spec, row)?;
                col_states
                    .iter()
                    .map(|cs| featmap::fidelity(&psi, cs))
                    .collect()
            })
            .collect()
    });
    let mut values = Vec::with_capacity(rows.len() * cols.len());
    for row in out {
        values.extend(row?);
    }
    GramMatrix::from_values(rows.len(), cols.len(), values, *spec)
}

/// Quanvolve with patches processed in parallel; identical output to
/// `quanv::quanvolve`.
pub fn quanvolve(
    pool: &rayon::ThreadPool,
    image: &PixelGrid,
    spec: &QuanvSpec,
) -> CoreResult<FeatureTensor> {
    let (out_h, out_w) = quanv::output_dims(image, spec)?;
    let circuit = quanv::random_circuit(spec);
    let responses: Vec<CoreResult<[f64; 4]>> = pool.install(|| {
        (0..out_h * out_w)
            .into_par_iter()
            .map(|idx| {
                let (oy, ox) = (idx / out_w, idx % out_w);
                let (iy, ix) = (oy * spec.stride, ox * spec.stride);
                let patch = [
                    image.get(iy, ix),
                    image.get(iy, ix + 1),
                    image.get(iy + 1, ix),
                    image.get(iy + 1, ix + 1),
                ];
                quanv::patch_response(patch, &circuit)
            })
            .collect()
    });
    let mut values = Vec::with_capacity(out_h * out_w * QuanvSpec::N_QUBITS);
    for response in responses {
        values.extend(response?);
    }
    FeatureTensor::from_values(out_h, out_w, QuanvSpec::N_QUBITS, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmlkit_core::featmap::FeatureMapKind;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn parallel_gram_equals_serial_bitwise() {
        let spec = FeatureMapSpec::new(FeatureMapKind::Angle, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let samples: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..5).map(|_| rng.random_range(0.0..PI)).collect())
            .collect();
        let serial = featmap::gram_matrix(&spec, &samples).unwrap();
        for threads in [1, 4] {
            let pool = thread_pool(Some(threads)).unwrap();
            let parallel = gram_square(&pool, &spec, &samples).unwrap();
            assert_eq!(serial.values(), parallel.values());
        }

        let serial_rect = featmap::gram_matrix_rect(&spec, &samples[..4], &samples[4..]).unwrap();
        let pool = thread_pool(Some(3)).unwrap();
        let parallel_rect = gram_rect(&pool, &spec, &samples[..4], &samples[4..]).unwrap();
        assert_eq!(serial_rect.values(), parallel_rect.values());
    }

    #[test]
    fn parallel_quanvolve_equals_serial_bitwise() {
        let spec = QuanvSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pixels: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..=1.0)).collect();
        let image = PixelGrid::new(10, 10, pixels).unwrap();
        let serial = quanv::quanvolve(&image, &spec).unwrap();
        for threads in [1, 4] {
            let pool = thread_pool(Some(threads)).unwrap();
            let parallel = quanvolve(&pool, &image, &spec).unwrap();
            assert_eq!(serial, parallel);
        }
    }
}
