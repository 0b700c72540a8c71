//! A small repeated experiment written to disk, then exported as a
//! best-so-far curve.

use wlasso_hpo::harness::{export_plotdata, load_runs, run_experiment, Axis, ExperimentManifest};

fn main() -> wlasso_hpo::Result<()> {
    let manifest: ExperimentManifest = serde_json::from_str(
        r#"{
            "benchmark": "synt_simple",
            "method": {"name": "cmaes"},
            "budget": 60,
            "repetitions": 3,
            "base_seed": 10
        }"#,
    )?;
    let out = std::env::temp_dir().join("wlhpo-example-run");
    let summary = run_experiment(&manifest, None, &out)?;
    println!(
        "{} on {}: mean {:.4} std {:.4} over {:?}",
        summary.method,
        summary.benchmark,
        summary.mean.unwrap(),
        summary.std.unwrap(),
        summary.best
    );
    let runs = load_runs(std::slice::from_ref(&out))?;
    let csv = export_plotdata(&runs, Axis::Cost)?;
    for line in csv.lines().take(5) {
        println!("{line}");
    }
    println!("... ({} rows, files in {})", csv.lines().count() - 1, out.display());
    Ok(())
}
