//! CMA-ES against random search, first on a sphere through the ask/tell
//! interface, then on a benchmark.

use wlasso_hpo::optimizers::{cmaes, minimize, random_search, CmaConfig, CmaState, RandomSearch};
use wlasso_hpo::record::best_record;
use wlasso_hpo::{Benchmark, Fidelity};

fn sphere(center: &[f64]) -> impl Fn(&[f64]) -> wlasso_hpo::Result<f64> + '_ {
    move |z| Ok(z.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum())
}

fn best(h: &[(Vec<f64>, f64)]) -> f64 {
    h.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
}

fn main() -> wlasso_hpo::Result<()> {
    let center: Vec<f64> = (0..20).map(|i| 0.5 * ((i as f64) * 0.7).sin()).collect();
    let mut cma = CmaState::new(&[0.0; 20], &CmaConfig::default(), 1)?;
    let h = minimize(&mut cma, 4000, sphere(&center))?;
    let r = minimize(&mut RandomSearch::new(20, 1), 4000, sphere(&center))?;
    println!("sphere d=20: cma-es {:.2e}, random {:.2e}", best(&h), best(&r));

    let bench = Benchmark::preset("synt_medium")?;
    let c = cmaes(&bench, 400, &CmaConfig::default(), 0)?;
    let r = random_search(&bench, 400, Fidelity::HIGHEST, 0)?;
    println!(
        "synt_medium, 400 evaluations: cma-es {:.3}, random {:.3}",
        best_record(&c).unwrap().loss,
        best_record(&r).unwrap().loss
    );
    Ok(())
}
