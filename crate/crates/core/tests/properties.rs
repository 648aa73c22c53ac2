use infinite_world::captions::{default_pool, parse_caption, render_caption};
use infinite_world::dataset::{generate_record, DatasetConfig};
use infinite_world::evaluator::simplify::{dp_indices, max_deviation};
use infinite_world::evaluator::{simplify_dp, Contour, Pixel};
use infinite_world::geometry::{synth_figure, FigureClass, FigureSpec, GeometryParams, Palette, Point};
use infinite_world::raster::{rasterize_figure, RasterConfig};
use infinite_world::scoring::{aggregate_psi, attribute_score, ItemScore};
use proptest::prelude::*;

fn class_strategy() -> impl Strategy<Value = FigureClass> {
    prop_oneof![
        Just(FigureClass::ParallelLines),
        Just(FigureClass::RegularPolygon),
        Just(FigureClass::IrregularPolygon),
    ]
}

fn pick(points: &[Point], idx: &[usize]) -> Vec<Point> {
    idx.iter().map(|&i| points[i]).collect()
}

proptest! {
    #[test]
    fn open_simplification_is_idempotent(
        raw in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 2..80),
        eps in 0.5..5.0f64,
    ) {
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let once = pick(&pts, &dp_indices(&pts, eps));
        let twice = pick(&once, &dp_indices(&once, eps));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn closed_simplification_is_idempotent(
        radii in prop::collection::vec(10.0..30.0f64, 4..80),
        eps in 0.5..4.0f64,
    ) {
        let n = radii.len();
        let ring: Vec<Pixel> = radii
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Pixel::new((r * a.cos()).round() as i32, (r * a.sin()).round() as i32)
            })
            .collect();
        let c = Contour::closed(ring);
        let once = simplify_dp(&c, eps);
        prop_assert!(once.len() <= c.len());
        prop_assert!(max_deviation(&c.points, &once.points, true) <= eps);
        prop_assert_eq!(simplify_dp(&once, eps), once);
    }

    #[test]
    fn open_contour_simplification_is_idempotent(
        raw in prop::collection::vec((-50i32..50, -50i32..50), 2..60),
        eps in 0.5..5.0f64,
    ) {
        let c = Contour::open(raw.iter().map(|&(x, y)| Pixel::new(x, y)).collect());
        let once = simplify_dp(&c, eps);
        prop_assert_eq!(once.points.first(), c.points.first());
        prop_assert_eq!(once.points.last(), c.points.last());
        prop_assert_eq!(simplify_dp(&once, eps), once);
    }

    #[test]
    fn attribute_score_symmetric_and_banded(n in 0u32..60, k in 0u32..60, m in any::<bool>()) {
        let s = attribute_score(n, k, m);
        prop_assert_eq!(s, attribute_score(k, n, m));
        prop_assert!(s == 0.0 || s == 100.0 || (25.0..=75.0).contains(&s));
        prop_assert_eq!(s == 100.0, m && n == k);
    }

    #[test]
    fn aggregation_ignores_order(
        vals in prop::collection::vec((0usize..3, 0.0..100.0f64, any::<bool>()), 1..40),
        seed in any::<u64>(),
    ) {
        let items: Vec<_> = vals
            .iter()
            .map(|&(c, v, ex)| (FigureClass::ALL[c], ItemScore { value: v, shape_component: v, color_ok: true, excluded: ex }))
            .collect();
        let mut shuffled = items.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed % len as u64) as usize);
        shuffled.reverse();
        match (aggregate_psi(&items), aggregate_psi(&shuffled)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.overall - b.overall).abs() < 1e-9);
                prop_assert_eq!(a.counts, b.counts);
                for (c, v) in &a.per_class {
                    prop_assert!((v - b.per_class[c]).abs() < 1e-9);
                }
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "one ordering failed"),
        }
    }

    #[test]
    fn captions_round_trip(class in class_strategy(), n in 3u32..=20, color in 0usize..4, t in 0usize..100) {
        let palette = Palette::default();
        let pool: Vec<_> = default_pool().into_iter().filter(|p| p.applies_to(class)).collect();
        let template = &pool[t % pool.len()];
        let name = palette.colors()[color].name.clone();
        let spec = FigureSpec::new(class, n, name.clone(), 64);
        let text = render_caption(template, &spec).unwrap().text;
        prop_assert_eq!(parse_caption(&text, &palette), Some((class, n, name)));
    }

    #[test]
    fn integer_translation_shifts_raster(class in class_strategy(), n in 3u32..=9, seed in 0u64..500, dx in -3i32..=3, dy in -3i32..=3) {
        let params = GeometryParams::default();
        let geom = synth_figure(class, n, 64, seed, &params).unwrap();
        let moved = geom.translate(dx as f64, dy as f64);
        let palette = Palette::default();
        let color = &palette.colors()[0];
        let cfg = RasterConfig::default();
        let a = rasterize_figure(&geom, color, 64, &cfg).unwrap();
        let b = rasterize_figure(&moved, color, 64, &cfg).unwrap();
        for y in 0..64i32 {
            for x in 0..64i32 {
                let (sx, sy) = (x - dx, y - dy);
                if (0..64).contains(&sx) && (0..64).contains(&sy) {
                    prop_assert_eq!(b.get(x as u32, y as u32), a.get(sx as u32, sy as u32));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn records_are_deterministic(seed in any::<u64>(), index in 0u64..10_000) {
        let mut cfg = DatasetConfig::three_nine_world();
        cfg.master_seed = seed;
        cfg.count = index + 1;
        let a = generate_record(&cfg, index).unwrap();
        let b = generate_record(&cfg, index).unwrap();
        prop_assert_eq!(&a, &b);
        let geom = synth_figure(a.0.class, a.0.n, cfg.image_size, a.0.seed, &cfg.geometry_params()).unwrap();
        let color = cfg.palette.get(&a.0.color).unwrap();
        let img = rasterize_figure(&geom, color, cfg.image_size, &cfg.raster_config()).unwrap();
        prop_assert_eq!(infinite_world::raster::encode_png(&img).unwrap(), a.1);
    }
}
