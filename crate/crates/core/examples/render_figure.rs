//! Renders one figure of each class and saves them as PNGs.
//!
//! cargo run --example render_figure -- [out_dir]

use std::path::PathBuf;

use infinite_world::geometry::{synth_figure, FigureClass, GeometryParams, Palette};
use infinite_world::raster::{rasterize_figure, save_png, RasterConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;
    let size = 128;
    let params = GeometryParams::for_canvas(size);
    let raster = RasterConfig::for_canvas(size);
    let palette = Palette::default();
    for (i, class) in FigureClass::ALL.into_iter().enumerate() {
        let geom = synth_figure(class, 5 + i as u32, size, 7, &params)?;
        let img = rasterize_figure(&geom, &palette.colors()[i], size, &raster)?;
        let path = out.join(format!("{}.png", class.as_str()));
        save_png(&img, &path)?;
        println!("{} with {} edges -> {}", class.as_str(), geom.arity(), path.display());
    }
    Ok(())
}
