//! On-disk artifact formats. Gram matrices round-trip losslessly (17
//! significant digits); quanvolution tensors are cached at 9 significant
//! digits, and every tensor is normalized through that precision so cached
//! and fresh runs produce bit-identical downstream results.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use qmlkit_core::featmap::{FeatureMapSpec, GramMatrix};
use qmlkit_core::metrics::{ClassificationReport, ConfusionMatrix};
use qmlkit_core::nn::TrainLog;
use qmlkit_core::quanv::{FeatureTensor, PixelGrid, QuanvSpec};
use qmlkit_core::svm::{KernelSpec, SvmModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
}

fn io_err(path: &Path, source: std::io::Error) -> FormatError {
    FormatError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn malformed(path: &Path, message: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Row-major CSV of reals, no header, 17 significant digits (lossless for
/// f64).
pub fn write_gram_csv(path: &Path, gram: &GramMatrix) -> Result<(), FormatError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    for i in 0..gram.rows() {
        let row = gram.row(i);
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(",")).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Read a gram CSV back; shape comes from the file, the spec from the
/// caller.
pub fn read_gram_csv(path: &Path, spec: &FeatureMapSpec) -> Result<GramMatrix, FormatError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for line in reader.lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut count = 0usize;
        for cell in line.split(',') {
            let v: f64 = cell
                .parse()
                .map_err(|_| malformed(path, format!("bad number {cell:?}")))?;
            values.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c == count => {}
            Some(c) => {
                return Err(malformed(
                    path,
                    format!("ragged row: {count} fields, expected {c}"),
                ))
            }
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| malformed(path, "empty file"))?;
    GramMatrix::from_values(rows, cols, values, *spec)
        .map_err(|e| malformed(path, e.to_string()))
}

/// 2x2 integer counts, one row per true class.
pub fn write_confusion_csv(path: &Path, cm: &ConfusionMatrix) -> Result<(), FormatError> {
    let counts = cm.counts();
    let body = format!(
        "{},{}\n{},{}\n",
        counts[0][0], counts[0][1], counts[1][0], counts[1][1]
    );
    std::fs::write(path, body).map_err(|e| io_err(path, e))
}

pub fn read_confusion_csv(path: &Path) -> Result<ConfusionMatrix, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut counts = [[0usize; 2]; 2];
    let mut rows = 0;
    for (i, line) in text.lines().filter(|l| !l.is_empty()).enumerate() {
        if i >= 2 {
            return Err(malformed(path, "expected exactly 2 rows"));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 2 {
            return Err(malformed(path, format!("row {i} has {} fields", cells.len())));
        }
        for (j, cell) in cells.iter().enumerate() {
            counts[i][j] = cell
                .trim()
                .parse()
                .map_err(|_| malformed(path, format!("bad count {cell:?}")))?;
        }
        rows += 1;
    }
    if rows != 2 {
        return Err(malformed(path, "expected exactly 2 rows"));
    }
    Ok(ConfusionMatrix::from_counts(counts))
}

/// Epoch log CSV: `epoch,train_loss,train_acc,test_loss,test_acc` at 6
/// decimal places.
pub fn write_epochs_csv(path: &Path, log: &TrainLog) -> Result<(), FormatError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "epoch,train_loss,train_acc,test_loss,test_acc").map_err(|e| io_err(path, e))?;
    for r in log.records() {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            r.epoch, r.train_loss, r.train_acc, r.test_loss, r.test_acc
        )
        .map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Full-precision structured metrics next to the rendered text table.
#[derive(Serialize)]
struct MetricsFile<'a> {
    report: &'a ClassificationReport,
    confusion: [[usize; 2]; 2],
}

pub fn write_metrics_json(
    path: &Path,
    report: &ClassificationReport,
    cm: &ConfusionMatrix,
) -> Result<(), FormatError> {
    let payload = MetricsFile {
        report,
        confusion: cm.counts(),
    };
    let body = serde_json::to_string_pretty(&payload)
        .map_err(|e| malformed(path, e.to_string()))?;
    std::fs::write(path, body + "\n").map_err(|e| io_err(path, e))
}

const SVM_FORMAT_TAG: &str = "svm-v1";

#[derive(Serialize, Deserialize)]
struct SvmModelFile {
    format: String,
    kernel: KernelSpec,
    c: f64,
    bias: f64,
    alphas: Vec<f64>,
    labels: Vec<f64>,
    support: Vec<usize>,
    train_x: Vec<Vec<f64>>,
}

/// Persist a model under the `svm-v1` tag. JSON floats are written with
/// exact round-trip precision, so save → load → predict is bit-identical.
pub fn save_svm_model(path: &Path, model: &SvmModel) -> Result<(), FormatError> {
    let file = SvmModelFile {
        format: SVM_FORMAT_TAG.to_string(),
        kernel: *model.kernel(),
        c: model.c(),
        bias: model.bias(),
        alphas: model.alphas().to_vec(),
        labels: model.labels().to_vec(),
        support: model.support_indices(),
        train_x: model.train_x().to_vec(),
    };
    let body = serde_json::to_string_pretty(&file).map_err(|e| malformed(path, e.to_string()))?;
    std::fs::write(path, body + "\n").map_err(|e| io_err(path, e))
}

pub fn load_svm_model(path: &Path) -> Result<SvmModel, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: SvmModelFile =
        serde_json::from_str(&text).map_err(|e| malformed(path, e.to_string()))?;
    if file.format != SVM_FORMAT_TAG {
        return Err(malformed(
            path,
            format!("unsupported format tag {:?}, expected {SVM_FORMAT_TAG:?}", file.format),
        ));
    }
    SvmModel::from_parts(
        file.kernel,
        file.c,
        file.alphas,
        file.bias,
        file.labels,
        file.train_x,
    )
    .map_err(|e| malformed(path, e.to_string()))
}

/// Tensor cache precision: 9 significant digits.
fn cache_round(v: f64) -> f64 {
    format!("{v:.8e}").parse().expect("formatted float parses")
}

/// Push every value through the cache precision. Applied to freshly
/// computed tensors as well, so a cache hit cannot change results.
pub fn normalize_tensor(tensor: &FeatureTensor) -> FeatureTensor {
    let values = tensor.values().iter().map(|&v| cache_round(v)).collect();
    FeatureTensor::from_values(tensor.height(), tensor.width(), tensor.channels(), values)
        .expect("rounding keeps shape and range")
}

/// One row per output pixel: `y,x,c0..c3`, 9 significant digits.
pub fn write_tensor_csv(path: &Path, tensor: &FeatureTensor) -> Result<(), FormatError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    for y in 0..tensor.height() {
        for x in 0..tensor.width() {
            let mut cells = vec![y.to_string(), x.to_string()];
            for c in 0..tensor.channels() {
                cells.push(format!("{:.8e}", tensor.get(y, x, c)));
            }
            writeln!(out, "{}", cells.join(",")).map_err(|e| io_err(path, e))?;
        }
    }
    out.flush().map_err(|e| io_err(path, e))
}

pub fn read_tensor_csv(path: &Path) -> Result<FeatureTensor, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut entries: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    let mut channels = None;
    for line in text.lines().filter(|l| !l.is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 3 {
            return Err(malformed(path, format!("short row {line:?}")));
        }
        let y: usize = cells[0]
            .parse()
            .map_err(|_| malformed(path, format!("bad y {:?}", cells[0])))?;
        let x: usize = cells[1]
            .parse()
            .map_err(|_| malformed(path, format!("bad x {:?}", cells[1])))?;
        let vals: Vec<f64> = cells[2..]
            .iter()
            .map(|c| c.parse().map_err(|_| malformed(path, format!("bad value {c:?}"))))
            .collect::<Result<_, _>>()?;
        match channels {
            None => channels = Some(vals.len()),
            Some(n) if n == vals.len() => {}
            Some(n) => {
                return Err(malformed(
                    path,
                    format!("row has {} channels, expected {n}", vals.len()),
                ))
            }
        }
        entries.push((y, x, vals));
    }
    let channels = channels.ok_or_else(|| malformed(path, "empty file"))?;
    let height = entries.iter().map(|e| e.0).max().map_or(0, |m| m + 1);
    let width = entries.iter().map(|e| e.1).max().map_or(0, |m| m + 1);
    if entries.len() != height * width {
        return Err(malformed(
            path,
            format!("{} rows for a {height}x{width} grid", entries.len()),
        ));
    }
    let mut values = vec![0.0; height * width * channels];
    for (y, x, vals) in entries {
        let base = (y * width + x) * channels;
        values[base..base + channels].copy_from_slice(&vals);
    }
    FeatureTensor::from_values(height, width, channels, values)
        .map_err(|e| malformed(path, e.to_string()))
}

/// Cache key for a quanvolved image: digest of pixel bits, dims, and the
/// spec.
pub fn tensor_cache_key(image: &PixelGrid, spec: &QuanvSpec) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update((image.height() as u64).to_le_bytes());
    hasher.update((image.width() as u64).to_le_bytes());
    for &p in image.pixels() {
        hasher.update(p.to_bits().to_le_bytes());
    }
    hasher.update((spec.depth as u64).to_le_bytes());
    hasher.update(spec.seed.to_le_bytes());
    hasher.update((spec.stride as u64).to_le_bytes());
    format!("{:x}", hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmlkit_core::featmap::{self, FeatureMapKind};
    use qmlkit_core::svm::{self, SmoParams};

    #[test]
    fn gram_csv_round_trips_bit_exactly() {
        let spec = FeatureMapSpec::new(FeatureMapKind::Angle, 2, 1).unwrap();
        let samples = vec![vec![0.3, 1.7], vec![2.0, 0.1], vec![1.1, 1.1]];
        let gram = featmap::gram_matrix(&spec, &samples).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gram.csv");
        write_gram_csv(&path, &gram).unwrap();
        let back = read_gram_csv(&path, &spec).unwrap();
        assert_eq!(gram.values(), back.values());
        assert_eq!((back.rows(), back.cols()), (3, 3));
    }

    #[test]
    fn confusion_csv_round_trips() {
        let cm = ConfusionMatrix::from_counts([[365, 142], [99, 394]]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("confusion.csv");
        write_confusion_csv(&path, &cm).unwrap();
        assert_eq!(read_confusion_csv(&path).unwrap(), cm);
    }

    #[test]
    fn svm_model_round_trip_preserves_predictions() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![-1.0, -1.0, 1.0, 1.0];
        let params = SmoParams {
            c: 10.0,
            ..SmoParams::default()
        };
        let model =
            svm::train_smo(&x, &y, &svm::KernelSpec::Rbf { gamma: 1.0 }, &params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_svm_model(&path, &model).unwrap();
        let loaded = load_svm_model(&path).unwrap();
        assert_eq!(model, loaded);
        for xi in &x {
            assert_eq!(
                model.decision_value(xi).unwrap().to_bits(),
                loaded.decision_value(xi).unwrap().to_bits()
            );
        }
        // wrong tag is rejected
        let mangled = std::fs::read_to_string(&path)
            .unwrap()
            .replace("svm-v1", "svm-v9");
        std::fs::write(&path, mangled).unwrap();
        assert!(load_svm_model(&path).is_err());
    }

    #[test]
    fn tensor_cache_round_trips_normalized_values() {
        use qmlkit_core::quanv::{self, QuanvSpec};
        let spec = QuanvSpec::new(2, 42, 2).unwrap();
        let pixels: Vec<f64> = (0..36).map(|i| (i as f64) / 35.0).collect();
        let image = PixelGrid::new(6, 6, pixels).unwrap();
        let tensor = normalize_tensor(&quanv::quanvolve(&image, &spec).unwrap());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tensor.csv");
        write_tensor_csv(&path, &tensor).unwrap();
        let back = read_tensor_csv(&path).unwrap();
        assert_eq!(tensor, back);

        // normalization is idempotent
        assert_eq!(normalize_tensor(&tensor), tensor);
    }

    #[test]
    fn cache_keys_separate_specs_and_images() {
        let image_a = PixelGrid::new(2, 2, vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        let image_b = PixelGrid::new(2, 2, vec![0.0, 0.5, 0.5, 0.9]).unwrap();
        let spec_a = QuanvSpec::new(2, 42, 2).unwrap();
        let spec_b = QuanvSpec::new(3, 42, 2).unwrap();
        assert_eq!(tensor_cache_key(&image_a, &spec_a), tensor_cache_key(&image_a, &spec_a));
        assert_ne!(tensor_cache_key(&image_a, &spec_a), tensor_cache_key(&image_b, &spec_a));
        assert_ne!(tensor_cache_key(&image_a, &spec_a), tensor_cache_key(&image_a, &spec_b));
    }

    #[test]
    fn epochs_csv_layout() {
        use qmlkit_core::nn::{self, SgdParams};
        let mut net = qmlkit_core::nn::DenseNet::zeros(&[2, 2]).unwrap();
        let inputs = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let labels = vec![0, 1];
        let log = nn::train_sgd(
            &mut net,
            &inputs,
            &labels,
            &inputs,
            &labels,
            &SgdParams {
                epochs: 2,
                ..SgdParams::default()
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("epochs.csv");
        write_epochs_csv(&path, &log).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epoch,train_loss,train_acc,test_loss,test_acc");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
