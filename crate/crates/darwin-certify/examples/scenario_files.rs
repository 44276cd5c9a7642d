//! Authoring a scenario file programmatically, validating it, and running the
//! same certification the CLI performs.
//!
//!     cargo run --example scenario_files

use darwin_certify::pipeline::{certify, RunConfig};
use darwin_certify::scenario::Scenario;

fn main() {
    let text = r#"{
  "name": "demo_noisy_broadcast",
  "seed": 42,
  "dynamics": { "kind": "broadcast", "d_a": 2, "t": 2, "noise": 0.2 },
  "preparations": { "random": 8 },
  "measurements": { "random_per_bob": 3 },
  "tolerances": { "certificate": 1e-6, "solver": 1e-9, "rank": 1e-8, "reproduction": 1e-10 }
}"#;
    println!("scenario file:\n{text}\n");

    let dir = std::env::temp_dir().join("darwin-certify-demo");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("demo.json");
    std::fs::write(&path, text).unwrap();

    let scenario = Scenario::load(&path).unwrap();
    println!("loaded and validated: {}", scenario.name);

    let out = dir.join("report.json");
    let report = certify(&scenario, &RunConfig::default(), Some(&out)).unwrap();
    println!(
        "verdict {} with process eta {:.9} against p_hat {:.9}",
        report.verdict, report.process_eta, report.cutoff.p_hat
    );
    println!("artifacts written next to {}:", out.display());
    for entry in std::fs::read_dir(&dir).unwrap() {
        println!("  {}", entry.unwrap().path().display());
    }
}
