//! Build the synthetic presets, show their bounds and the scaled loss of
//! the ground truth, and round-trip a manifest.

use wlasso_hpo::benchgen::PRESET_NAMES;
use wlasso_hpo::{Benchmark, Fidelity};

fn main() -> wlasso_hpo::Result<()> {
    for name in PRESET_NAMES {
        let b = Benchmark::preset(name)?;
        let (lo, hi) = b.bounds();
        let truth = b.evaluate_fixed(b.beta_true().expect("synthetic"))?;
        println!(
            "{name:12} n={:4} d={:5} bounds=[{lo:.3}, {hi:.3}] reference mse={:.4} scaled={}",
            b.dataset().n(),
            b.d(),
            b.reference_loss()?,
            truth.objective()
        );
    }

    let b = Benchmark::preset("synt_simple_noisy")?;
    let at_default = b.evaluate_point(&b.default_init(), Fidelity::HIGHEST)?;
    println!("synt_simple_noisy at the default penalty: {:.3}", at_default.value.objective());

    let manifest = serde_json::to_string_pretty(&b.manifest())?;
    println!("{manifest}");
    let again = Benchmark::from_manifest(&serde_json::from_str(&manifest)?, None)?;
    assert_eq!(again.dataset().y(), b.dataset().y());
    Ok(())
}
