//! Runs the built-in catalog and prints one line per entry.

use roughends::catalog::{run_catalog, Catalog};

fn main() {
    let report = run_catalog(&Catalog::default_catalog());
    for e in &report.entries {
        let v = &e.verdict;
        let ends: Vec<String> = v
            .ends
            .iter()
            .map(|p| p.estimate.as_ref().map_or("budget".to_string(), |est| format!("{:?}", est.verdict)))
            .collect();
        println!(
            "{:<22} ends {:<40} split {:<12} witness {:<5} ok {}",
            v.name,
            ends.join(", "),
            format!("{:?}", v.splitting),
            v.c,
            e.ok()
        );
    }
    println!("exit code {}", report.exit_code);
    let control = run_catalog(&Catalog::negative_control());
    println!("negative control flags {:?}, exit code {}", control.inconsistent, control.exit_code);
}
