//! Dataset ingestion: the tabular survey CSV and the two-folder image
//! corpus, plus seeded balanced sampling and min-max scaling to [0, π].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qmlkit_core::quanv::PixelGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        source: csv::Error,
    },
    #[error("CSV file {path} is empty or has no header row")]
    EmptyCsv { path: PathBuf },
    #[error("label column {column:?} not found; columns are {available:?}")]
    MissingColumn {
        column: String,
        available: Vec<String>,
    },
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: label {value} is not 0 or 1")]
    BadLabel { row: usize, value: f64 },
    #[error("class {class} has {available} rows, need {needed}")]
    NotEnoughRows {
        class: u8,
        available: usize,
        needed: usize,
    },
    #[error("empty dataset")]
    Empty,
    #[error("image layout error at {path}: {message}")]
    Layout { path: PathBuf, message: String },
    #[error("cannot decode image {path}: {message}")]
    BadImage { path: PathBuf, message: String },
}

/// Feature matrix with binary labels; feature column order follows the CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularDataset {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub label_column: String,
}

impl TabularDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    fn take_rows(&self, indices: &[usize]) -> TabularDataset {
        TabularDataset {
            feature_names: self.feature_names.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_column: self.label_column.clone(),
        }
    }
}

/// Parse a headered numeric CSV; every non-label column becomes a feature,
/// in file order. Labels must be 0/1 (a trailing ".0" is accepted).
pub fn load_csv(path: &Path, label_column: &str) -> Result<TabularDataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|source| csv_open_error(path, source))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| csv_open_error(path, source))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(DataError::EmptyCsv {
            path: path.to_path_buf(),
        });
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingColumn {
            column: label_column.to_string(),
            available: headers.clone(),
        })?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|source| DataError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let mut row = Vec::with_capacity(feature_names.len());
        let mut label = None;
        for (col_idx, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| DataError::BadCell {
                row: row_idx + 1,
                column: headers
                    .get(col_idx)
                    .cloned()
                    .unwrap_or_else(|| format!("#{col_idx}")),
                value: cell.to_string(),
            })?;
            if col_idx == label_idx {
                label = Some(value);
            } else {
                row.push(value);
            }
        }
        let label = label.ok_or_else(|| DataError::BadCell {
            row: row_idx + 1,
            column: label_column.to_string(),
            value: String::new(),
        })?;
        if label != 0.0 && label != 1.0 {
            return Err(DataError::BadLabel {
                row: row_idx + 1,
                value: label,
            });
        }
        features.push(row);
        labels.push(label as u8);
    }
    Ok(TabularDataset {
        feature_names,
        features,
        labels,
        label_column: label_column.to_string(),
    })
}

fn csv_open_error(path: &Path, source: csv::Error) -> DataError {
    if let csv::ErrorKind::Io(io) = source.kind() {
        if io.kind() == std::io::ErrorKind::NotFound {
            return DataError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
            };
        }
    }
    DataError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Draw `per_class` rows per class uniformly without replacement (class 0
/// first, then class 1, from one ChaCha8 stream seeded with `seed`). Both the
/// sample and the remainder preserve original row order.
pub fn balanced_sample(
    ds: &TabularDataset,
    per_class: usize,
    seed: u64,
) -> Result<(TabularDataset, TabularDataset), DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; ds.len()];
    for class in 0..2u8 {
        let members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == class).collect();
        if members.len() < per_class {
            return Err(DataError::NotEnoughRows {
                class,
                available: members.len(),
                needed: per_class,
            });
        }
        for pick in rand::seq::index::sample(&mut rng, members.len(), per_class) {
            chosen[members[pick]] = true;
        }
    }
    let sampled: Vec<usize> = (0..ds.len()).filter(|&i| chosen[i]).collect();
    let remainder: Vec<usize> = (0..ds.len()).filter(|&i| !chosen[i]).collect();
    Ok((ds.take_rows(&sampled), ds.take_rows(&remainder)))
}

/// Per-feature min-max scaler onto [0, π]; values outside the fitted range
/// clip to the boundary, constant features map to π/2.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

pub fn fit_scaler(train: &TabularDataset) -> Result<Scaler, DataError> {
    if train.is_empty() {
        return Err(DataError::Empty);
    }
    let d = train.n_features();
    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    for row in &train.features {
        for (i, &v) in row.iter().enumerate() {
            mins[i] = mins[i].min(v);
            maxs[i] = maxs[i].max(v);
        }
    }
    Ok(Scaler { mins, maxs })
}

impl Scaler {
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(i, &v)| {
                let (lo, hi) = (self.mins[i], self.maxs[i]);
                if hi <= lo {
                    PI / 2.0
                } else {
                    PI * (v.clamp(lo, hi) - lo) / (hi - lo)
                }
            })
            .collect()
    }

    pub fn transform(&self, ds: &TabularDataset) -> Vec<Vec<f64>> {
        ds.features.iter().map(|r| self.transform_row(r)).collect()
    }
}

pub fn apply_scaler(scaler: &Scaler, ds: &TabularDataset) -> Vec<Vec<f64>> {
    scaler.transform(ds)
}

/// Grayscale images at one resolution, with labels assigned by sorted class
/// folder name.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageDataset {
    pub images: Vec<PixelGrid>,
    pub labels: Vec<u8>,
    pub class_names: [String; 2],
    pub resolution: usize,
}

impl ImageDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }
}

/// Load `root/{train,test}/<two class folders>/`. Images are converted to
/// grayscale (unweighted channel mean), box-filter downsampled to
/// `resolution`², and scaled to [0, 1]. Caps subsample each split with class
/// proportions preserved up to rounding: the train split draws with `seed`,
/// the test split with `seed + 1`.
pub fn load_images(
    root: &Path,
    resolution: usize,
    train_cap: usize,
    test_cap: usize,
    seed: u64,
) -> Result<(ImageDataset, ImageDataset), DataError> {
    let train = load_split(&root.join("train"), resolution, train_cap, seed)?;
    let test = load_split(&root.join("test"), resolution, test_cap, seed.wrapping_add(1))?;
    if train.class_names != test.class_names {
        return Err(DataError::Layout {
            path: root.to_path_buf(),
            message: format!(
                "train classes {:?} do not match test classes {:?}",
                train.class_names, test.class_names
            ),
        });
    }
    Ok((train, test))
}

fn load_split(
    split_dir: &Path,
    resolution: usize,
    cap: usize,
    seed: u64,
) -> Result<ImageDataset, DataError> {
    let mut class_dirs: Vec<PathBuf> = std::fs::read_dir(split_dir)
        .map_err(|source| DataError::Io {
            path: split_dir.to_path_buf(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();
    if class_dirs.len() != 2 {
        return Err(DataError::Layout {
            path: split_dir.to_path_buf(),
            message: format!("expected exactly 2 class folders, found {}", class_dirs.len()),
        });
    }
    let class_names: [String; 2] = [dir_name(&class_dirs[0]), dir_name(&class_dirs[1])];

    // sorted file lists per class, then proportional caps
    let mut files_per_class: Vec<Vec<PathBuf>> = Vec::with_capacity(2);
    for dir in &class_dirs {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|source| DataError::Io {
                path: dir.clone(),
                source,
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        files_per_class.push(files);
    }
    let counts = [files_per_class[0].len(), files_per_class[1].len()];
    let targets = proportional_caps(counts, cap);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (class, files) in files_per_class.iter().enumerate() {
        let take = targets[class];
        let mut selected: Vec<usize> = if take >= files.len() {
            (0..files.len()).collect()
        } else {
            let mut picks: Vec<usize> =
                rand::seq::index::sample(&mut rng, files.len(), take).into_iter().collect();
            picks.sort_unstable();
            picks
        };
        selected.dedup();
        for idx in selected {
            images.push(load_grayscale(&files[idx], resolution)?);
            labels.push(class as u8);
        }
    }
    Ok(ImageDataset {
        images,
        labels,
        class_names,
        resolution,
    })
}

fn dir_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Split `cap` across classes proportionally to their sizes, distributing
/// the rounding remainder by largest fractional part.
fn proportional_caps(counts: [usize; 2], cap: usize) -> [usize; 2] {
    let total: usize = counts.iter().sum();
    if total <= cap || total == 0 {
        return counts;
    }
    let exact = [
        cap as f64 * counts[0] as f64 / total as f64,
        cap as f64 * counts[1] as f64 / total as f64,
    ];
    let mut targets = [exact[0].floor() as usize, exact[1].floor() as usize];
    let mut leftover = cap - targets[0] - targets[1];
    let order = if exact[0] - exact[0].floor() >= exact[1] - exact[1].floor() {
        [0, 1]
    } else {
        [1, 0]
    };
    for i in order {
        while leftover > 0 && targets[i] < counts[i] {
            targets[i] += 1;
            leftover -= 1;
            break;
        }
    }
    // any remainder still left goes wherever capacity remains
    for i in 0..2 {
        while leftover > 0 && targets[i] < counts[i] {
            targets[i] += 1;
            leftover -= 1;
        }
    }
    targets
}

fn load_grayscale(path: &Path, resolution: usize) -> Result<PixelGrid, DataError> {
    let decoded = image::open(path).map_err(|e| DataError::BadImage {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let sixteen_bit = matches!(
        decoded.color(),
        image::ColorType::L16 | image::ColorType::La16 | image::ColorType::Rgb16 | image::ColorType::Rgba16
    );
    let (width, height, gray): (usize, usize, Vec<f64>) = if sixteen_bit {
        let rgb = decoded.to_rgb16();
        let (w, h) = (rgb.width() as usize, rgb.height() as usize);
        let gray = rgb
            .pixels()
            .map(|p| {
                (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * u16::MAX as f64)
            })
            .collect();
        (w, h, gray)
    } else {
        let rgb = decoded.to_rgb8();
        let (w, h) = (rgb.width() as usize, rgb.height() as usize);
        let gray = rgb
            .pixels()
            .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * u8::MAX as f64))
            .collect();
        (w, h, gray)
    };
    downsample(&gray, height, width, resolution).map_err(|message| DataError::BadImage {
        path: path.to_path_buf(),
        message,
    })
}

/// Box filter onto a resolution×resolution grid: each output pixel is the
/// mean of its source bucket.
fn downsample(
    pixels: &[f64],
    height: usize,
    width: usize,
    resolution: usize,
) -> Result<PixelGrid, String> {
    if height == 0 || width == 0 || resolution == 0 {
        return Err("empty image".to_string());
    }
    let bucket = |i: usize, len: usize| {
        let start = i * len / resolution;
        let end = ((i + 1) * len / resolution).max(start + 1).min(len);
        (start, end)
    };
    let mut out = Vec::with_capacity(resolution * resolution);
    for oy in 0..resolution {
        let (y0, y1) = bucket(oy, height);
        for ox in 0..resolution {
            let (x0, x1) = bucket(ox, width);
            let mut sum = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    sum += pixels[y * width + x];
                }
            }
            let mean = sum / ((y1 - y0) * (x1 - x0)) as f64;
            out.push(mean.clamp(0.0, 1.0));
        }
    }
    PixelGrid::new(resolution, resolution, out).map_err(|e| e.to_string())
}

/// Counts and a content hash identifying exactly what a run consumed.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DataFingerprint {
    pub rows: usize,
    pub class_counts: BTreeMap<String, usize>,
    pub sha256: String,
}

pub fn fingerprint_tabular(path: &Path, ds: &TabularDataset) -> Result<DataFingerprint, DataError> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&bytes);
    let [neg, pos] = ds.class_counts();
    let mut class_counts = BTreeMap::new();
    class_counts.insert("0".to_string(), neg);
    class_counts.insert("1".to_string(), pos);
    Ok(DataFingerprint {
        rows: ds.len(),
        class_counts,
        sha256: format!("{digest:x}"),
    })
}

pub fn fingerprint_images(train: &ImageDataset, test: &ImageDataset) -> DataFingerprint {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for ds in [train, test] {
        for (image, label) in ds.images.iter().zip(&ds.labels) {
            hasher.update([*label]);
            for &p in image.pixels() {
                hasher.update(p.to_bits().to_le_bytes());
            }
        }
    }
    let mut class_counts = BTreeMap::new();
    class_counts.insert(
        format!("train/{}", train.class_names[0]),
        train.class_counts()[0],
    );
    class_counts.insert(
        format!("train/{}", train.class_names[1]),
        train.class_counts()[1],
    );
    class_counts.insert(
        format!("test/{}", test.class_names[0]),
        test.class_counts()[0],
    );
    class_counts.insert(
        format!("test/{}", test.class_names[1]),
        test.class_counts()[1],
    );
    DataFingerprint {
        rows: train.len() + test.len(),
        class_counts,
        sha256: format!("{:x}", hasher.finalize()),
    }
}
