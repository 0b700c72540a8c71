//! How well cheap, loose-tolerance evaluations rank configurations compared
//! to the tightest tolerance.

use wlasso_hpo::harness::fidelity_correlation;
use wlasso_hpo::Benchmark;

fn main() -> wlasso_hpo::Result<()> {
    let bench = Benchmark::preset("synt_simple")?;
    let m = fidelity_correlation(&bench, 100, 0)?;
    print!("{:>8}", "");
    for t in &m.levels {
        print!("{t:>8}");
    }
    println!();
    for (t, row) in m.levels.iter().zip(&m.matrix) {
        print!("{t:>8}");
        for c in row {
            match c {
                Some(v) => print!("{v:>8.3}"),
                None => print!("{:>8}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
