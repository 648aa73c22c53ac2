//! Learning a never-seen class on the constructed linear task, with and
//! without proactive steps.
//!
//! cargo run --example proactive_toy

use infinite_world::proactive::{run_lfzsl, LfzslConfig, ToyTask, ToyTaskConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = ToyTask::constructed(&ToyTaskConfig::default());
    println!("seen classes {:?}, unseen class {}", &task.classes[..task.classes.len() - 1], task.unseen);
    for proactive in [true, false] {
        let cfg = LfzslConfig { proactive, ..LfzslConfig::default() };
        let out = run_lfzsl(&task, &cfg)?;
        let fired = out.trajectory.iter().filter(|s| s.proactive_fired).count();
        println!(
            "proactive={proactive:<5} {:?} after {} epochs, {fired} proactive steps, zero-shot accuracy {:.0}%",
            out.status,
            out.trajectory.len(),
            out.zero_shot_accuracy * 100.0
        );
        if let Some(last) = out.trajectory.last() {
            println!("  final L_train {:.4}  L_val {:.4}", last.l_train, last.l_val);
        }
    }
    Ok(())
}
