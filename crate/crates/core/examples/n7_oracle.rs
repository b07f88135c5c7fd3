//! Reference value for the 7-point covering of the unit square: the best of
//! 50 long-budget mmc-pso restarts, scored on 10^6 evaluation points and on
//! the 10^4 generation candidates the designs were optimized on. The
//! acceptance suite freezes both best values.

use minimax_design::lds::{CandidateSet, RngSeed};
use minimax_design::metrics::minimax_criterion;
use minimax_design::pso::{mmc_pso, PsoConfig};
use minimax_design::region::Region;

fn main() {
    let region = Region::Hypercube(2);
    let eval = CandidateSet::generate(&region, 1_000_000, RngSeed(0)).unwrap();
    let mut best = (f64::INFINITY, 0);
    let mut best_cand = f64::INFINITY;
    for seed in 0..50 {
        let cfg = PsoConfig { t_mmc: 1000, t_pp: 2000, seed: RngSeed(1000 + seed), ..Default::default() };
        let run = mmc_pso(&region, 7, 10_000, &cfg).unwrap();
        let (h_eval, _) = minimax_criterion(&run.design, &eval).unwrap();
        if h_eval < best.0 {
            best = (h_eval, seed);
        }
        best_cand = best_cand.min(run.minimax);
        println!("restart {seed}: {:.6} on candidates, {h_eval:.6} on evaluation points", run.minimax);
    }
    println!("oracle {:.6} from restart {} (best on candidates {best_cand:.6})", best.0, best.1);
}
