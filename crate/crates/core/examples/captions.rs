//! Caption sampling and the train/zero-shot text split.
//!
//! cargo run --example captions

use infinite_world::captions::{build_text_splits, default_pool, parse_caption, sample_captions};
use infinite_world::geometry::{FigureClass, FigureSpec, Palette};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pool = default_pool();
    let palette = Palette::default();
    let spec = FigureSpec::new(FigureClass::IrregularPolygon, 7, "yellow", 64);
    for c in sample_captions(&spec, &pool, 1, 7)? {
        println!("[{}] {}  -> {:?}", c.template_id, c.text, parse_caption(&c.text, &palette));
    }

    let holdout = [(FigureClass::RegularPolygon, 9), (FigureClass::IrregularPolygon, 9), (FigureClass::ParallelLines, 9)];
    let split = build_text_splits(&pool, (3, 9), &palette, &holdout)?;
    println!("train texts: {}, zero-shot texts: {}", split.train_texts.len(), split.zeroshot_texts.len());
    for t in split.zeroshot_texts.iter().take(3) {
        println!("  zero-shot: {t}");
    }
    Ok(())
}
