//! Hyperband over solver tolerances, reported in equivalent full-fidelity
//! evaluations.

use wlasso_hpo::harness::mean_highest_fidelity_cost;
use wlasso_hpo::optimizers::{hyperband, random_search, HyperbandPlan};
use wlasso_hpo::record::best_record;
use wlasso_hpo::{Benchmark, Fidelity};

fn main() -> wlasso_hpo::Result<()> {
    let plan = HyperbandPlan::default();
    for b in plan.brackets()? {
        println!("bracket s={}: {} configs from r={}", b.s, b.n, b.r);
    }

    let bench = Benchmark::preset("synt_high")?;
    let unit = mean_highest_fidelity_cost(&bench, 20, 0)?;
    let hb = hyperband(&bench, &plan, 0)?;
    let cost: u64 = hb.iter().map(|r| r.cost_units).sum();
    println!(
        "hyperband: {} evaluations, {:.1} equivalent full evaluations, best {:.3}",
        hb.len(),
        cost as f64 / unit,
        best_record(&hb).unwrap().loss
    );

    let n = (cost as f64 / unit).ceil() as usize;
    let rs = random_search(&bench, n.max(1), Fidelity::HIGHEST, 0)?;
    println!("random search with {n} evaluations: best {:.3}", best_record(&rs).unwrap().loss);
    Ok(())
}
