//! Independent re-computations checked against the library.

use std::collections::BTreeSet;
use std::fs;

use infinite_world::captions::{build_text_splits, default_pool, render_caption};
use infinite_world::dataset::{self, dataset_stats, generate_dataset, DatasetConfig, IMAGES_DIR};
use infinite_world::evaluator::blur::{blur_gray, gaussian_kernel, GrayImage};
use infinite_world::evaluator::{analyze_image, EvalConfig};
use infinite_world::geometry::{
    polygon_edges, synth_figure, FigureClass, FigureGeometry, FigureSpec, GeometryParams, Palette, Point, Segment,
};
use infinite_world::proactive::{run_lfzsl, LfzslConfig, ToyTask, ToyTaskConfig};
use infinite_world::raster::{bresenham, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn separable_blur_matches_direct_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (w, h) = (rng.gen_range(1..30u32), rng.gen_range(1..30u32));
        let mut g = GrayImage::new(w, h, 0);
        for p in g.pixels.iter_mut() {
            *p = rng.gen();
        }
        let sigma = rng.gen_range(0.5..2.5);
        let ksize = [3, 5, 7][rng.gen_range(0..3)];
        let k = gaussian_kernel(sigma, ksize).unwrap();
        let half = (ksize / 2) as i64;
        let blurred = blur_gray(&g, sigma, ksize).unwrap();
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let mut acc = 0.0;
                for (j, ky) in k.iter().enumerate() {
                    for (i, kx) in k.iter().enumerate() {
                        acc += kx * ky * g.get_clamped(x + i as i64 - half, y + j as i64 - half) as f64;
                    }
                }
                // The separable pass keeps its intermediate in f64, so only
                // the final rounding can differ.
                let got = blurred.get(x as u32, y as u32) as f64;
                assert!((got - acc).abs() <= 0.5 + 1e-6, "({x},{y}): {got} vs {acc}");
            }
        }
    }
}

fn proper_crossing(a: &Segment, b: &Segment) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let d1 = orient(a.start, a.end, b.start);
    let d2 = orient(a.start, a.end, b.end);
    let d3 = orient(b.start, b.end, a.start);
    let d4 = orient(b.start, b.end, a.end);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

#[test]
fn irregular_polygons_are_simple() {
    let params = GeometryParams::default();
    for seed in 0..300 {
        let n = 3 + seed as u32 % 7;
        let FigureGeometry::Polygon(v) = synth_figure(FigureClass::IrregularPolygon, n, 64, seed, &params).unwrap() else {
            panic!("polygon expected");
        };
        let edges = polygon_edges(&v);
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let adjacent = j == i + 1 || (i == 0 && j == edges.len() - 1);
                assert!(adjacent || !proper_crossing(&edges[i], &edges[j]), "seed {seed}: edges {i} and {j} cross");
            }
        }
    }
}

#[test]
fn parallel_lines_never_touch() {
    let params = GeometryParams::default();
    for seed in 0..200 {
        let n = 3 + seed as u32 % 7;
        let FigureGeometry::Lines(s) = synth_figure(FigureClass::ParallelLines, n, 64, seed, &params).unwrap() else {
            panic!("lines expected");
        };
        let pixels: Vec<BTreeSet<(i64, i64)>> = s
            .iter()
            .map(|l| {
                bresenham(
                    (l.start.x.round() as i64, l.start.y.round() as i64),
                    (l.end.x.round() as i64, l.end.y.round() as i64),
                )
                .into_iter()
                .collect()
            })
            .collect();
        for i in 0..pixels.len() {
            for j in i + 1..pixels.len() {
                for &(x, y) in &pixels[i] {
                    for dx in -1..=1 {
                        for dy in -1..=1 {
                            assert!(!pixels[j].contains(&(x + dx, y + dy)), "seed {seed}: lines {i} and {j} touch");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn text_splits_match_enumeration() {
    let pool = default_pool();
    let palette = Palette::default();
    let holdout = [(FigureClass::RegularPolygon, 9), (FigureClass::ParallelLines, 4)];
    let split = build_text_splits(&pool, (3, 9), &palette, &holdout).unwrap();
    let mut all_train = BTreeSet::new();
    let mut all_zero = BTreeSet::new();
    for class in FigureClass::ALL {
        for n in 3..=9 {
            for c in palette.colors() {
                let spec = FigureSpec::new(class, n, c.name.clone(), 64);
                for t in pool.iter().filter(|t| t.applies_to(class)) {
                    let text = render_caption(t, &spec).unwrap().text;
                    if holdout.contains(&(class, n)) {
                        all_zero.insert(text);
                    } else {
                        all_train.insert(text);
                    }
                }
            }
        }
    }
    let train: BTreeSet<String> = all_train.difference(&all_zero).cloned().collect();
    assert_eq!(split.train_texts, train);
    assert_eq!(split.zeroshot_texts, all_zero);
}

#[test]
fn dataset_stats_match_brute_force() {
    let mut cfg = DatasetConfig::three_nine_world();
    cfg.count = 120;
    cfg.master_seed = 3;
    let dir = tempfile::tempdir().unwrap();
    let (records, gen) = generate_dataset(&cfg, dir.path()).unwrap();
    let s = dataset_stats(&records);
    let mut train = Vec::new();
    let mut zero = Vec::new();
    for r in &records {
        for c in &r.captions {
            if r.split == dataset::Split::Train {
                if !train.contains(c) {
                    train.push(c.clone());
                }
            } else if !zero.contains(c) {
                zero.push(c.clone());
            }
        }
    }
    assert_eq!(s.distinct_train_texts as usize, train.len());
    assert_eq!(s.distinct_zeroshot_texts as usize, zero.len());
    assert_eq!(s.records, 120);
    assert_eq!(s.cells.iter().map(|c| c.count).sum::<u64>(), 120);
    assert_eq!(gen.histogram.iter().map(|c| c.count).sum::<u64>(), 120);
    for r in &records {
        assert_eq!(r.captions.len(), cfg.captions_per_image);
    }
}

#[test]
fn noise_images_never_panic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = EvalConfig::default();
    for t in 0..60 {
        let (w, h) = (rng.gen_range(16..48), rng.gen_range(16..48));
        let mut img = RasterImage::new(w, h, [0, 0, 0]);
        let palette = [[0, 0, 0], [255, 0, 0], [0, 255, 0], [rng.gen(), rng.gen(), rng.gen()]];
        let density = rng.gen_range(0.0..0.6);
        for y in 0..h {
            for x in 0..w {
                if rng.gen_bool(density) {
                    let c = if t % 2 == 0 { palette[rng.gen_range(1..4)] } else { [rng.gen(), rng.gen(), rng.gen()] };
                    img.set(x, y, c);
                }
            }
        }
        let r = analyze_image(&img, &cfg).unwrap();
        assert!(r.detected_n == 0 || r.detected_class != infinite_world::evaluator::DetectedClass::Unknown);
    }
}

#[test]
fn missing_image_is_reported_per_item() {
    let mut cfg = DatasetConfig::three_nine_world();
    cfg.count = 5;
    let dir = tempfile::tempdir().unwrap();
    let (records, _) = generate_dataset(&cfg, dir.path()).unwrap();
    let images = dir.path().join(IMAGES_DIR);
    fs::remove_file(images.join(records[2].file_name())).unwrap();
    let reports = dataset::evaluate_directory(&images, &records, &cfg.eval_config(), None).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports[2].error.as_deref().unwrap().starts_with("FileMissing"));
    assert!(reports.iter().enumerate().all(|(i, r)| (i == 2) == r.error.is_some()));
}

#[test]
fn seen_rows_unaffected_by_proactive_steps() {
    let task = ToyTask::constructed(&ToyTaskConfig::default());
    let on = run_lfzsl(&task, &LfzslConfig::default()).unwrap();
    let off = run_lfzsl(
        &task,
        &LfzslConfig {
            proactive: false,
            budget: on.trajectory.len(),
            ..LfzslConfig::default()
        },
    )
    .unwrap();
    for row in task.seen_rows() {
        let a: Vec<u64> = on.w[row].iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = off.w[row].iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b, "row {row}");
    }
    let unseen = task.row(task.unseen).unwrap();
    assert!(off.w_star.iter().flatten().all(|v| *v == 0.0));
    assert!(on.w_star[unseen].iter().any(|v| *v != 0.0));
}
