//! Dataset generation with a verify-and-regenerate loop, evaluation of image
//! directories, and the manifest / report / stats files.
//!
//! Layout of a dataset directory:
//!
//! ```text
//! out/
//!   images/<id>.png
//!   exceptions/<id>.png     (written by evaluation)
//!   manifest.jsonl
//!   stats.json
//!   reports.jsonl           (written by evaluation)
//!   config.toml
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::captions::{self, CaptionError, CaptionTemplate};
use crate::evaluator::{self, DetectedClass, EvalConfig, EvalError, EvalReport};
use crate::geometry::{self, FigureClass, FigureSpec, GeometryError, GeometryParams, Palette, PaletteColor};
use crate::raster::{self, RasterConfig, RasterError, Rgb};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const STATS_FILE: &str = "stats.json";
pub const REPORTS_FILE: &str = "reports.jsonl";
pub const CONFIG_FILE: &str = "config.toml";
pub const IMAGES_DIR: &str = "images";
pub const EXCEPTIONS_DIR: &str = "exceptions";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("infeasible config: {0}")]
    InfeasibleConfig(String),
    #[error("record {index}: no accepted figure after {attempts} attempts")]
    RejectionBudgetExceeded { index: u64, attempts: u32 },
    #[error("manifest has no records")]
    EmptyManifest,
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Caption(#[from] CaptionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("config file: {0}")]
    Toml(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Relative sampling weights of the three classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassMix {
    pub parallel_lines: f64,
    pub regular_polygon: f64,
    pub irregular_polygon: f64,
}

impl Default for ClassMix {
    fn default() -> Self {
        ClassMix {
            parallel_lines: 1.0,
            regular_polygon: 1.0,
            irregular_polygon: 1.0,
        }
    }
}

impl ClassMix {
    pub fn weight(&self, class: FigureClass) -> f64 {
        match class {
            FigureClass::ParallelLines => self.parallel_lines,
            FigureClass::RegularPolygon => self.regular_polygon,
            FigureClass::IrregularPolygon => self.irregular_polygon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub count: u64,
    pub image_size: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub palette: Palette,
    pub class_mix: ClassMix,
    /// (class, n) combinations reserved for the zero-shot split.
    pub holdout: Vec<(FigureClass, u32)>,
    pub captions_per_image: usize,
    pub master_seed: u64,
    /// Attempts per record before giving up.
    pub max_attempts: u32,
    /// JSONL caption template pool; the built-in pool when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    /// Geometry knobs; scaled defaults for `image_size` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raster: Option<RasterConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<EvalConfig>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            count: 100,
            image_size: 64,
            n_min: 3,
            n_max: 9,
            palette: Palette::default(),
            class_mix: ClassMix::default(),
            holdout: Vec::new(),
            captions_per_image: 7,
            master_seed: 0,
            max_attempts: 100,
            templates: None,
            geometry: None,
            raster: None,
            evaluator: None,
        }
    }
}

impl DatasetConfig {
    /// The 3-9 World: counts 3 to 9 at 64×64, 41,000 images, 7 captions each,
    /// with every nine-element figure held out.
    pub fn three_nine_world() -> Self {
        DatasetConfig {
            count: 41_000,
            holdout: FigureClass::ALL.iter().map(|&c| (c, 9)).collect(),
            ..DatasetConfig::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "3-9-world" | "3-9" => Ok(DatasetConfig::three_nine_world()),
            other => Err(DatasetError::InvalidConfig(format!("unknown preset '{other}'"))),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| DatasetError::Toml(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| DatasetError::Toml(e.to_string()))
    }

    pub fn geometry_params(&self) -> GeometryParams {
        self.geometry
            .clone()
            .unwrap_or_else(|| GeometryParams::for_canvas(self.image_size))
    }

    pub fn raster_config(&self) -> RasterConfig {
        self.raster
            .clone()
            .unwrap_or_else(|| RasterConfig::for_canvas(self.image_size))
    }

    pub fn eval_config(&self) -> EvalConfig {
        self.evaluator
            .clone()
            .unwrap_or_else(|| EvalConfig::for_canvas(self.image_size))
    }

    pub fn template_pool(&self) -> Result<Vec<CaptionTemplate>> {
        match &self.templates {
            Some(p) => Ok(captions::load_template_pool(p)?),
            None => Ok(captions::default_pool()),
        }
    }

    pub fn is_held_out(&self, class: FigureClass, n: u32) -> bool {
        self.holdout.contains(&(class, n))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DatasetError::InvalidConfig(m));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if self.n_min < 3 || self.n_min > self.n_max {
            return bad(format!("need 3 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max));
        }
        if self.image_size < evaluator::MIN_IMAGE_SIDE {
            return bad(format!("image_size {} below {}", self.image_size, evaluator::MIN_IMAGE_SIDE));
        }
        let w: Vec<f64> = FigureClass::ALL.iter().map(|&c| self.class_mix.weight(c)).collect();
        if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || w.iter().all(|x| *x == 0.0) {
            return bad("class weights must be nonnegative and not all zero".into());
        }
        if self.captions_per_image == 0 {
            return bad("captions_per_image must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        Palette::new(self.palette.colors().to_vec()).map_err(DatasetError::InvalidConfig)?;
        for &(class, n) in &self.holdout {
            if n < self.n_min || n > self.n_max {
                return bad(format!("holdout ({class}, {n}) outside {}..={}", self.n_min, self.n_max));
            }
        }
        Ok(())
    }
}

/// Parses `regular:9,irregular:9,lines:9`.
pub fn parse_holdout(text: &str) -> Result<Vec<(FigureClass, u32)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (c, n) = item
                .split_once(':')
                .ok_or_else(|| DatasetError::InvalidConfig(format!("holdout item '{item}' is not class:n")))?;
            let class = FigureClass::parse(c)?;
            let n = n
                .trim()
                .parse()
                .map_err(|_| DatasetError::InvalidConfig(format!("bad count in holdout item '{item}'")))?;
            Ok((class, n))
        })
        .collect()
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of record `index`: depends only on the master seed and the index.
pub fn record_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

/// Seed of the `attempt`-th figure tried for a record.
pub fn attempt_seed(record_seed: u64, attempt: u32) -> u64 {
    splitmix64(record_seed ^ splitmix64(0xA77E_u64 << 32 | attempt as u64))
}

const CAPTION_STREAM: u64 = 0xCA97_1095;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Zeroshot,
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    /// Path relative to the dataset root.
    pub image: String,
    pub class: FigureClass,
    pub n: u32,
    pub color: String,
    pub rgb: Rgb,
    pub split: Split,
    pub captions: Vec<String>,
    /// Geometry seed of the accepted figure; `synth_figure` with this seed
    /// reproduces it.
    pub seed: u64,
}

impl DatasetRecord {
    pub fn spec(&self, canvas: u32) -> FigureSpec {
        FigureSpec::new(self.class, self.n, self.color.clone(), canvas)
    }

    pub fn file_name(&self) -> &str {
        Path::new(&self.image)
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.image)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCount {
    pub class: FigureClass,
    pub n: u32,
    pub color: String,
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub accepted: u64,
    /// Candidates the evaluator did not recover, plus geometry draws that
    /// exhausted their own rejection budget.
    pub rejected: u64,
    /// Rejected candidates the evaluator flagged as exceptions.
    pub exceptions: u64,
    pub histogram: Vec<CellCount>,
}

/// Whether `report` recovers exactly the spec's class, count and color.
pub fn report_matches(report: &EvalReport, class: FigureClass, n: u32, rgb: Rgb, color_tol: f64) -> bool {
    !report.exception
        && report.detected_class == DetectedClass::from(class)
        && report.detected_n == n
        && report.color_matches(rgb, color_tol)
}

struct Generated {
    record: DatasetRecord,
    png: Vec<u8>,
    rejected: u64,
    exceptions: u64,
}

struct Generator {
    cfg: DatasetConfig,
    pool: Vec<CaptionTemplate>,
    params: GeometryParams,
    raster: RasterConfig,
    eval: EvalConfig,
    classes: Vec<FigureClass>,
    weights: WeightedIndex<f64>,
}

impl Generator {
    fn new(cfg: &DatasetConfig) -> Result<Self> {
        cfg.validate()?;
        let pool = cfg.template_pool()?;
        let classes: Vec<FigureClass> = FigureClass::ALL
            .into_iter()
            .filter(|&c| cfg.class_mix.weight(c) > 0.0)
            .collect();
        let weights = WeightedIndex::new(classes.iter().map(|&c| cfg.class_mix.weight(c)))
            .map_err(|e| DatasetError::InvalidConfig(e.to_string()))?;
        let params = cfg.geometry_params();
        for &class in &classes {
            let applicable = pool.iter().filter(|t| t.applies_to(class)).count();
            if applicable < cfg.captions_per_image {
                return Err(CaptionError::PoolTooSmall {
                    class,
                    available: applicable,
                    requested: cfg.captions_per_image,
                }
                .into());
            }
            for n in cfg.n_min..=cfg.n_max {
                match geometry::synth_figure(class, n, cfg.image_size, 0, &params) {
                    Err(GeometryError::InfeasibleCanvas(m)) => {
                        return Err(DatasetError::InfeasibleConfig(format!("{class} n={n}: {m}")))
                    }
                    Err(GeometryError::RejectionBudgetExceeded { .. }) | Ok(_) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(Generator {
            cfg: cfg.clone(),
            pool,
            params,
            raster: cfg.raster_config(),
            eval: cfg.eval_config(),
            classes,
            weights,
        })
    }

    fn record(&self, index: u64) -> Result<Generated> {
        let cfg = &self.cfg;
        let rseed = record_seed(cfg.master_seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(rseed);
        let class = self.classes[self.weights.sample(&mut rng)];
        let n = rng.gen_range(cfg.n_min..=cfg.n_max);
        let color: &PaletteColor = &cfg.palette.colors()[rng.gen_range(0..cfg.palette.len())];
        let spec = FigureSpec::new(class, n, color.name.clone(), cfg.image_size);
        let captions = captions::sample_captions(&spec, &self.pool, rseed ^ CAPTION_STREAM, cfg.captions_per_image)?
            .into_iter()
            .map(|c| c.text)
            .collect();

        let (mut rejected, mut exceptions) = (0, 0);
        for attempt in 0..cfg.max_attempts {
            let seed = attempt_seed(rseed, attempt);
            let geom = match geometry::synth_figure(class, n, cfg.image_size, seed, &self.params) {
                Ok(g) => g,
                Err(GeometryError::RejectionBudgetExceeded { .. }) => {
                    rejected += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let img = raster::rasterize_figure(&geom, color, cfg.image_size, &self.raster)?;
            let report = evaluator::analyze_image(&img, &self.eval)?;
            if report_matches(&report, class, n, color.rgb, self.eval.color_linf_tol) {
                let id = format!("{index:06}");
                return Ok(Generated {
                    record: DatasetRecord {
                        image: format!("{IMAGES_DIR}/{id}.png"),
                        id,
                        class,
                        n,
                        color: color.name.clone(),
                        rgb: color.rgb,
                        split: if cfg.is_held_out(class, n) { Split::Zeroshot } else { Split::Train },
                        captions,
                        seed,
                    },
                    png: raster::encode_png(&img)?,
                    rejected,
                    exceptions,
                });
            }
            rejected += 1;
            exceptions += report.exception as u64;
        }
        Err(DatasetError::RejectionBudgetExceeded {
            index,
            attempts: cfg.max_attempts,
        })
    }
}

/// Generates record `index` of `cfg` without touching the disk: the record
/// and its PNG bytes.
pub fn generate_record(cfg: &DatasetConfig, index: u64) -> Result<(DatasetRecord, Vec<u8>)> {
    let g = Generator::new(cfg)?.record(index)?;
    Ok((g.record, g.png))
}

/// Generates `cfg.count` verified records into `out`: PNGs under `images/`,
/// then `manifest.jsonl` in index order, `stats.json` and `config.toml`.
/// Runs on the current rayon pool; the bytes written do not depend on it.
pub fn generate_dataset(cfg: &DatasetConfig, out: &Path) -> Result<(Vec<DatasetRecord>, GenerationStats)> {
    let gen = Generator::new(cfg)?;
    let images = out.join(IMAGES_DIR);
    fs::create_dir_all(&images).map_err(io_err(&images))?;

    let results: Vec<(DatasetRecord, u64, u64)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let g = gen.record(i)?;
            let path = out.join(&g.record.image);
            fs::write(&path, &g.png).map_err(io_err(&path))?;
            Ok((g.record, g.rejected, g.exceptions))
        })
        .collect::<Result<_>>()?;

    let mut stats = GenerationStats::default();
    let mut hist: BTreeMap<(FigureClass, u32, String), u64> = BTreeMap::new();
    let mut records = Vec::with_capacity(results.len());
    for (r, rej, exc) in results {
        stats.accepted += 1;
        stats.rejected += rej;
        stats.exceptions += exc;
        *hist.entry((r.class, r.n, r.color.clone())).or_default() += 1;
        records.push(r);
    }
    stats.histogram = hist
        .into_iter()
        .map(|((class, n, color), count)| CellCount { class, n, color, count })
        .collect();

    write_manifest(&out.join(MANIFEST_FILE), &records)?;
    let summary = StatsFile {
        generation: Some(stats.clone()),
        dataset: dataset_stats(&records),
    };
    write_json(&out.join(STATS_FILE), &summary)?;
    let cfg_path = out.join(CONFIG_FILE);
    fs::write(&cfg_path, cfg.to_toml_string()?).map_err(io_err(&cfg_path))?;
    Ok((records, stats))
}

/// Contents of `stats.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationStats>,
    pub dataset: DatasetStats,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitCellCount {
    pub class: FigureClass,
    pub n: u32,
    pub color: String,
    pub split: Split,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: u64,
    pub train_records: u64,
    pub zeroshot_records: u64,
    pub cells: Vec<SplitCellCount>,
    pub distinct_train_texts: u64,
    pub distinct_zeroshot_texts: u64,
}

pub fn dataset_stats(records: &[DatasetRecord]) -> DatasetStats {
    let mut cells: BTreeMap<(FigureClass, u32, String, Split), u64> = BTreeMap::new();
    let mut train: HashSet<&str> = HashSet::new();
    let mut zeroshot: HashSet<&str> = HashSet::new();
    let mut split_counts = [0u64; 2];
    for r in records {
        *cells.entry((r.class, r.n, r.color.clone(), r.split)).or_default() += 1;
        let set = match r.split {
            Split::Train => {
                split_counts[0] += 1;
                &mut train
            }
            Split::Zeroshot => {
                split_counts[1] += 1;
                &mut zeroshot
            }
        };
        set.extend(r.captions.iter().map(String::as_str));
    }
    DatasetStats {
        records: records.len() as u64,
        train_records: split_counts[0],
        zeroshot_records: split_counts[1],
        cells: cells
            .into_iter()
            .map(|((class, n, color, split), count)| SplitCellCount { class, n, color, split, count })
            .collect(),
        distinct_train_texts: train.len() as u64,
        distinct_zeroshot_texts: zeroshot.len() as u64,
    }
}

/// One line of `reports.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportLine {
    pub id: String,
    pub detected_class: DetectedClass,
    pub detected_n: u32,
    pub dominant_rgb: Rgb,
    pub second_rgb: Rgb,
    pub color_match: bool,
    pub free_edges: u32,
    pub exception: bool,
    pub error: Option<String>,
}

impl ReportLine {
    pub fn from_report(id: &str, report: &EvalReport, rgb: Rgb, color_tol: f64) -> Self {
        ReportLine {
            id: id.to_string(),
            detected_class: report.detected_class,
            detected_n: report.detected_n,
            dominant_rgb: report.dominant_rgb,
            second_rgb: report.second_rgb,
            color_match: report.color_matches(rgb, color_tol),
            free_edges: report.free_edge_count,
            exception: report.exception,
            error: None,
        }
    }

    pub fn failed(id: &str, error: String) -> Self {
        ReportLine {
            id: id.to_string(),
            detected_class: DetectedClass::Unknown,
            detected_n: 0,
            dominant_rgb: [0, 0, 0],
            second_rgb: [0, 0, 0],
            color_match: false,
            free_edges: 0,
            exception: false,
            error: Some(error),
        }
    }
}

/// Evaluates the image of every record, looked up by file name in
/// `image_dir`. Unreadable or missing files become per-item errors
/// (`FileMissing: ...`, `Decode: ...`). Images flagged as exceptions are
/// copied to `exceptions_dir` when given.
pub fn evaluate_directory(
    image_dir: &Path,
    records: &[DatasetRecord],
    cfg: &EvalConfig,
    exceptions_dir: Option<&Path>,
) -> Result<Vec<ReportLine>> {
    if records.is_empty() {
        return Err(DatasetError::EmptyManifest);
    }
    if let Some(dir) = exceptions_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    records
        .par_iter()
        .map(|r| {
            let path = image_dir.join(r.file_name());
            let bytes = match fs::read(&path) {
                Ok(b) => b,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Ok(ReportLine::failed(&r.id, format!("FileMissing: {}", path.display())))
                }
                Err(e) => return Ok(ReportLine::failed(&r.id, format!("Io: {e}"))),
            };
            let img = match raster::decode_png(&bytes) {
                Ok(i) => i,
                Err(e) => return Ok(ReportLine::failed(&r.id, format!("Decode: {e}"))),
            };
            let report = match evaluator::analyze_image(&img, cfg) {
                Ok(rep) => rep,
                Err(e) => return Ok(ReportLine::failed(&r.id, format!("Eval: {e}"))),
            };
            if report.exception {
                if let Some(dir) = exceptions_dir {
                    let dest = dir.join(r.file_name());
                    fs::write(&dest, &bytes).map_err(io_err(&dest))?;
                }
            }
            Ok(ReportLine::from_report(&r.id, &report, r.rgb, cfg.color_linf_tol))
        })
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let f = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| DatasetError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_manifest(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    write_jsonl(path, records)
}

pub fn read_manifest(path: &Path) -> Result<Vec<DatasetRecord>> {
    read_jsonl(path)
}

pub fn write_reports(path: &Path, reports: &[ReportLine]) -> Result<()> {
    write_jsonl(path, reports)
}

pub fn read_reports(path: &Path) -> Result<Vec<ReportLine>> {
    read_jsonl(path)
}

/// Distinct caption strings of `records`, split by record split.
pub fn caption_sets(records: &[DatasetRecord]) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut train = BTreeSet::new();
    let mut zeroshot = BTreeSet::new();
    for r in records {
        let set = if r.split == Split::Train { &mut train } else { &mut zeroshot };
        set.extend(r.captions.iter().cloned());
    }
    (train, zeroshot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(count: u64, seed: u64) -> DatasetConfig {
        DatasetConfig {
            count,
            master_seed: seed,
            ..DatasetConfig::default()
        }
    }

    #[test]
    fn ten_records() {
        let dir = tempfile::tempdir().unwrap();
        let (records, stats) = generate_dataset(&small(10, 1), dir.path()).unwrap();
        assert_eq!(records.len(), 10);
        assert_eq!(stats.accepted, 10);
        assert_eq!(read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap(), records);
        for r in &records {
            assert!(dir.path().join(&r.image).is_file());
            assert_eq!(r.captions.len(), 7);
            assert_eq!(r.split, Split::Train);
        }
        assert_eq!(dataset_stats(&records).zeroshot_records, 0);
    }

    #[test]
    fn record_matches_standalone_generation() {
        let cfg = small(5, 9);
        let dir = tempfile::tempdir().unwrap();
        let (records, _) = generate_dataset(&cfg, dir.path()).unwrap();
        let (r3, png) = generate_record(&cfg, 3).unwrap();
        assert_eq!(r3, records[3]);
        assert_eq!(png, fs::read(dir.path().join(&r3.image)).unwrap());
    }

    #[test]
    fn holdout_parsing() {
        let h = parse_holdout("regular:9, irregular:9,lines:9").unwrap();
        assert_eq!(
            h,
            vec![
                (FigureClass::RegularPolygon, 9),
                (FigureClass::IrregularPolygon, 9),
                (FigureClass::ParallelLines, 9)
            ]
        );
        assert!(parse_holdout("regular").is_err());
        assert!(parse_holdout("hexagon:6").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DatasetConfig { n_min: 2, ..small(1, 0) }.validate().is_err());
        assert!(DatasetConfig { count: 0, ..small(1, 0) }.validate().is_err());
        let zero = ClassMix { parallel_lines: 0.0, regular_polygon: 0.0, irregular_polygon: 0.0 };
        assert!(DatasetConfig { class_mix: zero, ..small(1, 0) }.validate().is_err());
        assert!(DatasetConfig { holdout: vec![(FigureClass::RegularPolygon, 12)], ..small(1, 0) }.validate().is_err());
        DatasetConfig::three_nine_world().validate().unwrap();
    }

    #[test]
    fn infeasible_canvas_is_reported() {
        let cfg = DatasetConfig { n_max: 20, image_size: 16, n_min: 10, ..small(1, 0) };
        assert!(matches!(generate_record(&cfg, 0), Err(DatasetError::InfeasibleConfig(_))));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = DatasetConfig::three_nine_world();
        let back = DatasetConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
        let partial = DatasetConfig::from_toml_str("count = 5\nholdout = [[\"regular_polygon\", 9]]\n").unwrap();
        assert_eq!(partial.count, 5);
        assert_eq!(partial.holdout, vec![(FigureClass::RegularPolygon, 9)]);
        assert_eq!(partial.n_max, 9);
    }

    #[test]
    fn seeds_are_index_local() {
        assert_ne!(record_seed(1, 0), record_seed(1, 1));
        assert_ne!(record_seed(1, 0), record_seed(2, 0));
        assert_ne!(attempt_seed(5, 0), attempt_seed(5, 1));
    }
}
