//! Random pairs against the conjectured bounds, as the CLI `sweep` does.

use cq_combine::experiments::{summarize_sweep, sweep_rows, ExperimentConfig};
use cq_combine::{PriorMode, Result};

fn main() -> Result<()> {
    for prior in [PriorMode::Half, PriorMode::Uniform] {
        let cfg = ExperimentConfig { samples: 5_000, prior, seed: 1, ..Default::default() };
        let rows = sweep_rows(&cfg)?;
        let s = summarize_sweep(&cfg, &rows);
        println!(
            "{prior:?}: {} conjecture violations, {} proven faults, {} below the classical lower bound (min slack {:.3e})",
            s.conjecture_violations, s.proven_violations, s.classical_lower_violations, s.min_classical_lower_slack
        );
        if let Some(r) = rows.iter().find(|r| r.report.classical_lower_violation) {
            println!("  e.g. H = {:.5}: exact {:.6} < classical {:.6}", r.report.h1, r.report.exact, r.report.classical_lower);
        }
    }
    Ok(())
}
