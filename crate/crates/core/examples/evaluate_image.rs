//! Runs the rule-based evaluator on a few figures, including two that are
//! flagged as exceptions.
//!
//! cargo run --example evaluate_image -- [image.png]

use infinite_world::evaluator::{analyze_image, EvalConfig};
use infinite_world::geometry::{regular_polygon_vertices, synth_figure, FigureClass, GeometryParams, Palette, Point, Segment};
use infinite_world::raster::{load_png, rasterize_figure, rasterize_segments, RasterConfig, RasterImage};

fn show(name: &str, img: &RasterImage, cfg: &EvalConfig) -> Result<(), Box<dyn std::error::Error>> {
    let r = analyze_image(img, cfg)?;
    println!(
        "{name:<18} {:<18} n={} regular={} color={:?} exception={} free_edges={}",
        r.detected_class.as_str(),
        r.detected_n,
        r.regular,
        r.second_rgb,
        r.exception,
        r.free_edge_count
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EvalConfig::default();
    if let Some(path) = std::env::args().nth(1) {
        let img = load_png(path.as_ref())?;
        return show(&path, &img, &EvalConfig::for_canvas(img.width()));
    }
    let params = GeometryParams::default();
    let raster = RasterConfig::default();
    let palette = Palette::default();
    for (class, n) in [(FigureClass::ParallelLines, 4), (FigureClass::RegularPolygon, 6), (FigureClass::IrregularPolygon, 7)] {
        let geom = synth_figure(class, n, 64, 11, &params)?;
        let img = rasterize_figure(&geom, &palette.colors()[1], 64, &raster)?;
        show(class.as_str(), &img, &cfg)?;
    }

    let v = regular_polygon_vertices(5, Point::new(32.0, 32.0), 24.0, 0.3);
    let star: Vec<Segment> = (0..5).map(|i| Segment::new(v[i], v[(i + 2) % 5])).collect();
    show("pentagram", &rasterize_segments(&star, [255, 0, 0], 64, &raster)?, &cfg)?;
    let pts = [(10.0, 12.0), (52.0, 10.0), (50.0, 52.0), (12.0, 50.0)].map(|(x, y)| Point::new(x, y));
    let chain: Vec<Segment> = pts.windows(2).map(|w| Segment::new(w[0], w[1])).collect();
    show("open chain", &rasterize_segments(&chain, [0, 0, 255], 64, &raster)?, &cfg)?;
    Ok(())
}
