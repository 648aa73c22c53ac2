//! Generates a small verified 3-9 World dataset.
//!
//! cargo run --example generate_dataset -- [out_dir] [count]

use std::path::PathBuf;

use infinite_world::dataset::{dataset_stats, generate_dataset, DatasetConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("three-nine-world"));
    let mut cfg = DatasetConfig::preset("3-9-world")?;
    cfg.count = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);

    let (records, gen) = generate_dataset(&cfg, &out)?;
    let stats = dataset_stats(&records);
    println!("wrote {} images to {}", gen.accepted, out.display());
    println!("rejected candidates: {} ({} exceptions)", gen.rejected, gen.exceptions);
    println!(
        "train/zero-shot records: {}/{}, distinct texts: {}/{}",
        stats.train_records, stats.zeroshot_records, stats.distinct_train_texts, stats.distinct_zeroshot_texts
    );
    for r in records.iter().take(3) {
        println!("{} {} n={} {}: {:?}", r.id, r.class.as_str(), r.n, r.color, r.captions[0]);
    }
    Ok(())
}
