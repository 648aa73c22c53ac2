//! Command-line front end: `generate`, `evaluate`, `score`, `stats`, `render`.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset::{self, DatasetConfig, DatasetError};
use crate::evaluator::EvalConfig;
use crate::geometry::{self, FigureClass};
use crate::raster;
use crate::scoring;

#[derive(Debug, Parser)]
#[command(name = "infinite-world", version, about = "Geometric figure benchmark: generate, evaluate, score")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a verified dataset directory.
    Generate(GenerateArgs),
    /// Run the evaluator over a directory of images named as in a manifest.
    Evaluate(EvaluateArgs),
    /// Compute psi scores from evaluation reports.
    Score(ScoreArgs),
    /// Count records and distinct caption texts in a manifest.
    Stats(StatsArgs),
    /// Render a single figure to a PNG file.
    Render(RenderArgs),
}

/// Dataset knobs shared by the subcommands that build a config.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML file with dataset config keys; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset (3-9-world).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    count: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Image side in pixels.
    #[arg(long)]
    size: Option<u32>,
    #[arg(long = "n-min")]
    n_min: Option<u32>,
    #[arg(long = "n-max")]
    n_max: Option<u32>,
    /// Held-out combinations, e.g. "regular:9,irregular:9,lines:9".
    #[arg(long, value_parser = parse_holdout_arg)]
    holdout: Option<HoldoutArg>,
}

#[derive(Debug, Clone)]
struct HoldoutArg(Vec<(FigureClass, u32)>);

fn parse_holdout_arg(s: &str) -> Result<HoldoutArg, String> {
    dataset::parse_holdout(s).map(HoldoutArg).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory holding the images.
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Report file to write; exceptions are copied next to it.
    #[arg(long)]
    out: PathBuf,
    /// TOML file whose evaluator settings to use.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Image side the evaluator defaults are scaled for.
    #[arg(long)]
    size: Option<u32>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    reports: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Score file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// JSON file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long, value_parser = parse_class_arg)]
    class: FigureClass,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    color: String,
    /// Geometry seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    size: u32,
    /// PNG file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_class_arg(s: &str) -> Result<FigureClass, String> {
    FigureClass::parse(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::InvalidConfig(m) => Failure::Usage(format!("invalid config: {m}")),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn build_config(a: &ConfigArgs) -> Result<DatasetConfig, Failure> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), _) => DatasetConfig::load(path)?,
        (None, Some(p)) => DatasetConfig::preset(p)?,
        (None, None) => DatasetConfig::default(),
    };
    if let (Some(_), Some(p)) = (&a.config, &a.preset) {
        let base = DatasetConfig::preset(p)?;
        let text = std::fs::read_to_string(a.config.as_ref().unwrap()).map_err(runtime)?;
        cfg = overlay_toml(&base, &text)?;
    }
    if let Some(v) = a.count {
        cfg.count = v;
    }
    if let Some(v) = a.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = a.size {
        cfg.image_size = v;
    }
    if let Some(v) = a.n_min {
        cfg.n_min = v;
    }
    if let Some(v) = a.n_max {
        cfg.n_max = v;
    }
    if let Some(h) = &a.holdout {
        cfg.holdout = h.0.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Applies the keys present in `text` on top of `base`.
fn overlay_toml(base: &DatasetConfig, text: &str) -> Result<DatasetConfig, Failure> {
    let mut merged: toml::Table = toml::from_str(&base.to_toml_string()?).map_err(runtime)?;
    let over: toml::Table = toml::from_str(text).map_err(|e| Failure::Runtime(format!("config file: {e}")))?;
    merged.extend(over);
    let text = toml::to_string(&merged).map_err(runtime)?;
    Ok(DatasetConfig::from_toml_str(&text)?)
}

fn eval_config(config: Option<&Path>, size: Option<u32>) -> Result<EvalConfig, Failure> {
    let mut cfg = match config {
        Some(p) => DatasetConfig::load(p)?,
        None => DatasetConfig::default(),
    };
    if let Some(s) = size {
        cfg.image_size = s;
    }
    Ok(cfg.eval_config())
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = build_config(&a.cfg)?;
    let (records, stats) = dataset::generate_dataset(&cfg, &a.out)?;
    let ds = dataset::dataset_stats(&records);
    writeln!(
        out,
        "generated {} images in {} ({} rejected candidates, {} of them exceptions)",
        stats.accepted,
        a.out.display(),
        stats.rejected,
        stats.exceptions
    )
    .map_err(runtime)?;
    writeln!(
        out,
        "train records {} / zero-shot records {}; distinct texts train {} / zero-shot {}",
        ds.train_records, ds.zeroshot_records, ds.distinct_train_texts, ds.distinct_zeroshot_texts
    )
    .map_err(runtime)?;
    Ok(())
}

fn evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = eval_config(a.config.as_deref(), a.size)?;
    let records = dataset::read_manifest(&a.manifest)?;
    let parent = a.out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(runtime)?;
    let exceptions = parent.join(dataset::EXCEPTIONS_DIR);
    let reports = dataset::evaluate_directory(&a.images, &records, &cfg, Some(&exceptions))?;
    dataset::write_reports(&a.out, &reports)?;
    let matched = reports
        .iter()
        .zip(&records)
        .filter(|(r, rec)| {
            r.error.is_none()
                && !r.exception
                && r.color_match
                && r.detected_class.figure_class() == Some(rec.class)
                && r.detected_n == rec.n
        })
        .count();
    let errors = reports.iter().filter(|r| r.error.is_some()).count();
    let exc = reports.iter().filter(|r| r.exception).count();
    writeln!(
        out,
        "evaluated {} images: {matched} exact matches, {exc} exceptions, {errors} errors -> {}",
        reports.len(),
        a.out.display()
    )
    .map_err(runtime)?;
    Ok(())
}

fn score(a: &ScoreArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let tol = eval_config(a.config.as_deref(), None)?.color_linf_tol;
    let records = dataset::read_manifest(&a.manifest)?;
    let reports = dataset::read_reports(&a.reports)?;
    let s = scoring::score_reports(&records, &reports, tol).map_err(runtime)?;
    if let Some(p) = &a.out {
        dataset::write_json(p, &s)?;
    }
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    writeln!(
        out,
        "psi lines {} regular {} irregular {} overall {:.2} (class mean {:.2}); {} items, {} excluded",
        fmt(s.psi_parallel_lines),
        fmt(s.psi_regular_polygon),
        fmt(s.psi_irregular_polygon),
        s.psi_overall,
        s.psi_class_mean,
        s.items_total,
        s.items_excluded
    )
    .map_err(runtime)?;
    Ok(())
}

fn stats(a: &StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let records = dataset::read_manifest(&a.manifest)?;
    let s = dataset::dataset_stats(&records);
    if let Some(p) = &a.out {
        dataset::write_json(p, &s)?;
    }
    writeln!(
        out,
        "{} records ({} train, {} zero-shot); distinct texts train {} / zero-shot {}",
        s.records, s.train_records, s.zeroshot_records, s.distinct_train_texts, s.distinct_zeroshot_texts
    )
    .map_err(runtime)?;
    for c in &s.cells {
        writeln!(
            out,
            "  {:<18} n={:<3} {:<8} {:<9} {}",
            c.class.as_str(),
            c.n,
            c.color,
            format!("{:?}", c.split).to_lowercase(),
            c.count
        )
        .map_err(runtime)?;
    }
    Ok(())
}

fn render(a: &RenderArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(p) => DatasetConfig::load(p)?,
        None => DatasetConfig::default(),
    };
    cfg.image_size = a.size;
    let color = cfg
        .palette
        .get(&a.color)
        .cloned()
        .ok_or_else(|| Failure::Usage(format!("color '{}' is not in the palette", a.color)))?;
    let geom = geometry::synth_figure(a.class, a.n, a.size, a.seed, &cfg.geometry_params()).map_err(|e| match e {
        geometry::GeometryError::TooFewElements(_) => Failure::Usage(e.to_string()),
        other => runtime(other),
    })?;
    let img = raster::rasterize_figure(&geom, &color, a.size, &cfg.raster_config()).map_err(runtime)?;
    raster::save_png(&img, &a.out).map_err(runtime)?;
    let spec = geometry::FigureSpec::new(a.class, a.n, color.name.clone(), a.size);
    writeln!(out, "{}", serde_json::to_string(&spec).map_err(runtime)?).map_err(runtime)?;
    Ok(())
}

/// Parses `argv` (program name first) and runs the subcommand, writing the
/// human-readable summary to `out` and diagnostics to `err`.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Score(a) => score(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Render(a) => render(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
