//! Scores a stand-in "model" that miscounts some figures and draws some in
//! the wrong color, then prints the psi breakdown.
//!
//! cargo run --example score_model

use infinite_world::dataset::{self, generate_dataset, DatasetConfig, Split, IMAGES_DIR};
use infinite_world::geometry::synth_figure;
use infinite_world::raster::{rasterize_figure, save_png};
use infinite_world::scoring::score_reports;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("infinite-world-score");
    let mut cfg = DatasetConfig::preset("3-9-world")?;
    cfg.count = 300;
    let (records, _) = generate_dataset(&cfg, &dir.join("prompts"))?;
    let prompts: Vec<_> = records.into_iter().filter(|r| r.split == Split::Zeroshot).collect();

    // The fake model gets the count off by one on every third prompt and
    // uses the wrong color on every fifth.
    let out = dir.join("model").join(IMAGES_DIR);
    std::fs::create_dir_all(&out)?;
    for (i, r) in prompts.iter().enumerate() {
        let n = if i % 3 == 0 { r.n - 1 } else { r.n };
        let color = if i % 5 == 0 { &cfg.palette.colors()[0] } else { cfg.palette.get(&r.color).unwrap() };
        let geom = synth_figure(r.class, n.max(3), cfg.image_size, r.seed ^ 1, &cfg.geometry_params())?;
        let img = rasterize_figure(&geom, color, cfg.image_size, &cfg.raster_config())?;
        save_png(&img, &out.join(r.file_name()))?;
    }

    let ecfg = cfg.eval_config();
    let reports = dataset::evaluate_directory(&out, &prompts, &ecfg, Some(&dir.join("model").join("exceptions")))?;
    let score = score_reports(&prompts, &reports, ecfg.color_linf_tol)?;
    println!("{} zero-shot prompts", prompts.len());
    println!("{}", serde_json::to_string_pretty(&score)?);
    Ok(())
}
