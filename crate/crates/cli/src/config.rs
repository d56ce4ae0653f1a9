//! Experiment configuration: a JSON file with `--set` overrides, validated
//! with precise paths, unknown-key suggestions, and documented defaults.

use std::path::PathBuf;

use qmlkit_core::featmap::FeatureMapKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TabularSvm,
    ImageHybrid,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentKind::TabularSvm => write!(f, "tabular_svm"),
            ExperimentKind::ImageHybrid => write!(f, "image_hybrid"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
    Poly,
    Quantum,
}

/// Which arms the image experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmMode {
    Both,
    Baseline,
    Hybrid,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// RBF/poly width; `None` resolves to 1/(n_features · Var(X)) at run
    /// time.
    pub gamma: Option<f64>,
    pub degree: u32,
    pub coef0: f64,
    /// Quantum map family.
    pub map: FeatureMapKind,
    /// `None` resolves to min(n_features, 10).
    pub n_qubits: Option<usize>,
    /// `None` resolves to ceil(n_features / n_qubits).
    pub n_layers: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TabularConfig {
    pub csv_path: PathBuf,
    pub label_column: String,
    pub class_names: [String; 2],
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub kernel: KernelConfig,
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub export_gram: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuanvConfig {
    pub depth: usize,
    pub seed: u64,
    pub stride: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NnConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub outputs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageConfig {
    pub root: PathBuf,
    pub resolution: usize,
    pub train_cap: usize,
    pub test_cap: usize,
    pub quanv: QuanvConfig,
    pub use_quanv: ArmMode,
    pub nn: NnConfig,
}

/// Fully resolved run configuration; serialized verbatim into the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    /// Gram/tensor cache directory; `None` disables disk caching.
    pub cache_dir: Option<PathBuf>,
    pub tabular: Option<TabularConfig>,
    pub image: Option<ImageConfig>,
}

impl ExperimentConfig {
    pub fn tabular(&self) -> Result<&TabularConfig, RunError> {
        self.tabular
            .as_ref()
            .ok_or_else(|| RunError::config("missing `tabular` section"))
    }

    pub fn image(&self) -> Result<&ImageConfig, RunError> {
        self.image
            .as_ref()
            .ok_or_else(|| RunError::config("missing `image` section"))
    }
}

// ---- raw (pre-default) shapes ------------------------------------------

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawConfig {
    experiment: Option<ExperimentKind>,
    seed: Option<u64>,
    out_dir: Option<String>,
    threads: Option<usize>,
    cache_dir: Option<String>,
    tabular: Option<RawTabular>,
    image: Option<RawImage>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawTabular {
    csv_path: Option<String>,
    label_column: Option<String>,
    class_names: Option<[String; 2]>,
    train_per_class: Option<usize>,
    test_per_class: Option<usize>,
    kernel: Option<RawKernel>,
    c: Option<f64>,
    tol: Option<f64>,
    max_passes: Option<usize>,
    export_gram: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawKernel {
    kind: Option<KernelKind>,
    gamma: Option<f64>,
    degree: Option<u32>,
    coef0: Option<f64>,
    map: Option<FeatureMapKind>,
    n_qubits: Option<usize>,
    n_layers: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawImage {
    root: Option<String>,
    resolution: Option<usize>,
    train_cap: Option<usize>,
    test_cap: Option<usize>,
    quanv: Option<RawQuanv>,
    use_quanv: Option<ArmMode>,
    nn: Option<RawNn>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawQuanv {
    depth: Option<usize>,
    seed: Option<u64>,
    stride: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawNn {
    lr: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    outputs: Option<usize>,
}

// ---- schema walk ---------------------------------------------------------

const TOP_KEYS: &[&str] = &[
    "experiment",
    "seed",
    "out_dir",
    "threads",
    "cache_dir",
    "tabular",
    "image",
];
const TABULAR_KEYS: &[&str] = &[
    "csv_path",
    "label_column",
    "class_names",
    "train_per_class",
    "test_per_class",
    "kernel",
    "c",
    "tol",
    "max_passes",
    "export_gram",
];
const KERNEL_KEYS: &[&str] = &[
    "kind", "gamma", "degree", "coef0", "map", "n_qubits", "n_layers",
];
const IMAGE_KEYS: &[&str] = &[
    "root",
    "resolution",
    "train_cap",
    "test_cap",
    "quanv",
    "use_quanv",
    "nn",
];
const QUANV_KEYS: &[&str] = &["depth", "seed", "stride"];
const NN_KEYS: &[&str] = &["lr", "epochs", "batch_size", "outputs"];

fn allowed_keys(path: &str) -> Option<&'static [&'static str]> {
    match path {
        "" => Some(TOP_KEYS),
        "tabular" => Some(TABULAR_KEYS),
        "tabular.kernel" => Some(KERNEL_KEYS),
        "image" => Some(IMAGE_KEYS),
        "image.quanv" => Some(QUANV_KEYS),
        "image.nn" => Some(NN_KEYS),
        _ => None,
    }
}

fn check_keys(value: &Value, path: &str) -> Result<(), RunError> {
    let Value::Object(map) = value else {
        return Ok(());
    };
    if let Some(allowed) = allowed_keys(path) {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                let full = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                let nearest = allowed
                    .iter()
                    .map(|candidate| (strsim::levenshtein(key, candidate), *candidate))
                    .min()
                    .filter(|(distance, _)| *distance <= 3);
                let hint = match nearest {
                    Some((_, candidate)) => format!("; did you mean {candidate:?}?"),
                    None => format!("; allowed keys here: {allowed:?}"),
                };
                return Err(RunError::config(format!("unknown key `{full}`{hint}")));
            }
        }
    }
    for (key, child) in map {
        let child_path = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        check_keys(child, &child_path)?;
    }
    Ok(())
}

// ---- overrides -----------------------------------------------------------

/// Apply one `path=value` override onto the JSON tree; the value is parsed
/// as JSON when possible, otherwise taken as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), RunError> {
    let (path, raw_value) = assignment.split_once('=').ok_or_else(|| {
        RunError::config(format!("override {assignment:?} is not of the form path=value"))
    })?;
    let value = serde_json::from_str(raw_value).unwrap_or(Value::String(raw_value.to_string()));
    let mut node = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        if segment.is_empty() {
            return Err(RunError::config(format!("override path {path:?} has an empty segment")));
        }
        let map = node.as_object_mut().ok_or_else(|| {
            RunError::config(format!("override path {path:?} crosses a non-object value"))
        })?;
        if i + 1 == segments.len() {
            map.insert(segment.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(segment.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

// ---- validation ----------------------------------------------------------

/// Parse, override, and validate a config file into its resolved form.
pub fn validate_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, RunError> {
    let mut tree: Value = serde_json::from_str(text).map_err(|e| {
        RunError::config(format!(
            "invalid JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if !tree.is_object() {
        return Err(RunError::config("top level must be a JSON object"));
    }
    for assignment in overrides {
        apply_override(&mut tree, assignment)?;
    }
    check_keys(&tree, "")?;

    let deserializer = tree.clone();
    let raw: RawConfig = serde_path_to_error::deserialize(deserializer)
        .map_err(|e| RunError::config(format!("at `{}`: {}", e.path(), e.inner())))?;
    resolve(raw)
}

fn positive_f64(value: f64, field: &str) -> Result<f64, RunError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(RunError::config(format!("`{field}` must be positive, got {value}")))
    }
}

fn positive_usize(value: usize, field: &str) -> Result<usize, RunError> {
    if value > 0 {
        Ok(value)
    } else {
        Err(RunError::config(format!("`{field}` must be positive")))
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig, RunError> {
    let experiment = raw
        .experiment
        .ok_or_else(|| RunError::config("missing `experiment` (tabular_svm or image_hybrid)"))?;
    let seed = raw.seed.unwrap_or(42);

    match experiment {
        ExperimentKind::TabularSvm => {
            if raw.image.is_some() {
                return Err(RunError::config(
                    "experiment is tabular_svm but an `image` section is present; keep exactly one",
                ));
            }
            if raw.tabular.is_none() {
                return Err(RunError::config("experiment tabular_svm needs a `tabular` section"));
            }
        }
        ExperimentKind::ImageHybrid => {
            if raw.tabular.is_some() {
                return Err(RunError::config(
                    "experiment is image_hybrid but a `tabular` section is present; keep exactly one",
                ));
            }
            if raw.image.is_none() {
                return Err(RunError::config("experiment image_hybrid needs an `image` section"));
            }
        }
    }

    let out_dir = PathBuf::from(
        raw.out_dir
            .unwrap_or_else(|| format!("runs/{experiment}")),
    );
    let cache_dir = match raw.cache_dir {
        None => Some(PathBuf::from(".qmlkit-cache")),
        Some(dir) if dir.is_empty() => None,
        Some(dir) => Some(PathBuf::from(dir)),
    };

    let tabular = raw.tabular.map(|t| resolve_tabular(t, seed)).transpose()?;
    let image = raw.image.map(|i| resolve_image(i, seed)).transpose()?;

    Ok(ExperimentConfig {
        experiment,
        seed,
        out_dir,
        threads: raw.threads,
        cache_dir,
        tabular,
        image,
    })
}

fn resolve_tabular(raw: RawTabular, _seed: u64) -> Result<TabularConfig, RunError> {
    let csv_path = raw
        .csv_path
        .ok_or_else(|| RunError::config("missing `tabular.csv_path`"))?;
    let kernel = raw.kernel.unwrap_or_default();
    if let Some(gamma) = kernel.gamma {
        positive_f64(gamma, "tabular.kernel.gamma")?;
    }
    if let Some(q) = kernel.n_qubits {
        if q == 0 || q > 20 {
            return Err(RunError::config(format!(
                "`tabular.kernel.n_qubits` must be in 1..=20, got {q}"
            )));
        }
    }
    if let Some(layers) = kernel.n_layers {
        positive_usize(layers, "tabular.kernel.n_layers")?;
    }
    let degree = kernel.degree.unwrap_or(3);
    if degree == 0 {
        return Err(RunError::config("`tabular.kernel.degree` must be at least 1"));
    }
    Ok(TabularConfig {
        csv_path: PathBuf::from(csv_path),
        label_column: raw
            .label_column
            .unwrap_or_else(|| "HeartDiseaseorAttack".to_string()),
        class_names: raw
            .class_names
            .unwrap_or_else(|| ["Class 0".to_string(), "Class 1".to_string()]),
        train_per_class: positive_usize(
            raw.train_per_class.unwrap_or(500),
            "tabular.train_per_class",
        )?,
        test_per_class: positive_usize(
            raw.test_per_class.unwrap_or(500),
            "tabular.test_per_class",
        )?,
        kernel: KernelConfig {
            kind: kernel.kind.unwrap_or(KernelKind::Rbf),
            gamma: kernel.gamma,
            degree,
            coef0: kernel.coef0.unwrap_or(0.0),
            map: kernel.map.unwrap_or(FeatureMapKind::Angle),
            n_qubits: kernel.n_qubits,
            n_layers: kernel.n_layers,
        },
        c: positive_f64(raw.c.unwrap_or(1.0), "tabular.c")?,
        tol: positive_f64(raw.tol.unwrap_or(1e-3), "tabular.tol")?,
        max_passes: positive_usize(raw.max_passes.unwrap_or(10), "tabular.max_passes")?,
        export_gram: raw.export_gram.unwrap_or(false),
    })
}

fn resolve_image(raw: RawImage, seed: u64) -> Result<ImageConfig, RunError> {
    let root = raw
        .root
        .ok_or_else(|| RunError::config("missing `image.root`"))?;
    let quanv = raw.quanv.unwrap_or_default();
    let nn = raw.nn.unwrap_or_default();
    let resolution = raw.resolution.unwrap_or(28);
    if resolution < 2 {
        return Err(RunError::config(format!(
            "`image.resolution` must be at least the 2-pixel patch size, got {resolution}"
        )));
    }
    let lr = nn.lr.unwrap_or(0.01);
    if !lr.is_finite() || lr < 0.0 {
        return Err(RunError::config(format!("`image.nn.lr` must be non-negative, got {lr}")));
    }
    let outputs = nn.outputs.unwrap_or(2);
    if outputs < 2 {
        return Err(RunError::config(format!(
            "`image.nn.outputs` must be at least 2, got {outputs}"
        )));
    }
    Ok(ImageConfig {
        root: PathBuf::from(root),
        resolution,
        train_cap: positive_usize(raw.train_cap.unwrap_or(181), "image.train_cap")?,
        test_cap: positive_usize(raw.test_cap.unwrap_or(46), "image.test_cap")?,
        quanv: QuanvConfig {
            depth: quanv.depth.unwrap_or(2),
            seed: quanv.seed.unwrap_or(seed),
            stride: positive_usize(quanv.stride.unwrap_or(2), "image.quanv.stride")?,
        },
        use_quanv: raw.use_quanv.unwrap_or(ArmMode::Both),
        nn: NnConfig {
            lr,
            epochs: positive_usize(nn.epochs.unwrap_or(10), "image.nn.epochs")?,
            batch_size: positive_usize(nn.batch_size.unwrap_or(4), "image.nn.batch_size")?,
            outputs,
        },
    })
}
