//! Minimax clustering with particle swarm optimization.
//!
//! A swarm of `s` designs is evolved in two phases. In the clustering phase
//! every particle takes one minimax-clustering step, then drifts toward its
//! own best design and the swarm's best design under `h_q`. The design right
//! after the clustering step and the design after the move are both offered
//! to the bests; scoring only the moved design leaves the bests stuck at
//! designs that are not clustering fixed points. In the
//! post-processing phase the clustering step is dropped and the same swarm
//! update runs directly on the minimax criterion `h` over the candidates,
//! which lets points settle on the region boundary.
//!
//! Designs are unordered sets, but the velocity arithmetic subtracts them row
//! by row: row `i` of a particle keeps its identity for the whole run.

use log::{debug, info};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cqcenter::AgdConfig;
use crate::error::{Error, Result};
use crate::lds::{scrambled_points, CandidateSet, RngSeed};
use crate::metrics::minimax_below;
use crate::mmc::{assign_points, hq_from_assignment, update_centers, Assignment, CenterCache, CenterRule, Design};
use crate::par;
use crate::points::PointSet;
use crate::region::{clip_in_place, Region};

pub use crate::mmc::hq_objective;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    /// Number of particles.
    pub swarm: usize,
    /// Inertia.
    pub w: f64,
    /// Pull toward the particle's own best design.
    pub c1: f64,
    /// Pull toward the swarm's best design.
    pub c2: f64,
    pub t_mmc: usize,
    pub t_pp: usize,
    pub seed: RngSeed,
    pub agd: AgdConfig,
    /// Update particles concurrently against the previous iteration's global
    /// best instead of strictly one after another.
    pub parallel_particles: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm: 10,
            w: 0.72,
            c1: 1.49,
            c2: 1.49,
            t_mmc: 500,
            t_pp: 250,
            seed: RngSeed(0),
            agd: AgdConfig::default(),
            parallel_particles: false,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm == 0 {
            return Err(Error::InvalidConfig("swarm size must be at least 1".into()));
        }
        for (name, v) in [("w", self.w), ("c1", self.c1), ("c2", self.c2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        self.agd.validate()
    }
}

/// A design with its cached objective.
#[derive(Clone, Debug)]
pub struct Scored {
    pub points: PointSet,
    pub value: f64,
}

/// Complete swarm state.
#[derive(Clone, Debug)]
pub struct SwarmState {
    pub particles: Vec<PointSet>,
    pub velocities: Vec<Vec<f64>>,
    pub local_best: Vec<Scored>,
    pub global_best: Scored,
    rngs: Vec<ChaCha8Rng>,
    caches: Vec<CenterCache>,
    assignments: Vec<Option<Assignment>>,
}

impl SwarmState {
    /// Swarm of the given designs with zero velocities; bests are the
    /// designs themselves under `objective`.
    pub fn new(particles: Vec<PointSet>, seed: RngSeed, objective: impl Fn(&PointSet) -> f64) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidConfig("swarm size must be at least 1".into()));
        }
        let local_best: Vec<Scored> =
            particles.iter().map(|d| Scored { points: d.clone(), value: objective(d) }).collect();
        let global_best = best_of(&local_best).clone();
        let velocities = particles.iter().map(|d| vec![0.0; d.as_slice().len()]).collect();
        let rngs = (0..particles.len()).map(|k| seed.derive(1 << 20 | k as u64).rng()).collect();
        let s = particles.len();
        Ok(Self {
            particles,
            velocities,
            local_best,
            global_best,
            rngs,
            caches: vec![CenterCache::default(); s],
            assignments: vec![None; s],
        })
    }

    /// Draws `r1, r2 ~ U[0,1]^{np}` from particle `k`'s stream, updates its
    /// velocity and position, and clips every row into the region.
    pub fn velocity_update(&mut self, k: usize, cfg: &PsoConfig, candidates: &CandidateSet) {
        let len = self.velocities[k].len();
        let rng = &mut self.rngs[k];
        let r1: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
        let r2: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
        move_particle(
            self.particles[k].as_mut_slice(),
            &mut self.velocities[k],
            self.local_best[k].points.as_slice(),
            self.global_best.points.as_slice(),
            (cfg.w, cfg.c1, cfg.c2),
            &r1,
            &r2,
        );
        clip_rows(&mut self.particles[k], candidates);
        self.assignments[k] = None;
    }

    fn reset_velocities(&mut self) {
        self.velocities.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x = 0.0));
    }

    /// Offers particle `k`'s current design with objective `value` to its
    /// local best and to the global best.
    fn offer(&mut self, k: usize, value: f64) {
        if value < self.local_best[k].value || value < self.global_best.value {
            self.offer_design(k, Scored { points: self.particles[k].clone(), value });
        }
    }

    /// Offers an arbitrary scored design to particle `k`'s local best and to
    /// the global best.
    fn offer_design(&mut self, k: usize, design: Scored) {
        if design.value < self.global_best.value {
            self.global_best = design.clone();
        }
        if design.value < self.local_best[k].value {
            self.local_best[k] = design;
        }
    }
}

fn best_of(items: &[Scored]) -> &Scored {
    let mut best = &items[0];
    for s in &items[1..] {
        if s.value < best.value {
            best = s;
        }
    }
    best
}

/// `v <- w v + c1 r1 (L - D) + c2 r2 (G - D)`, then `D <- D + v`, all
/// elementwise.
pub fn move_particle(
    design: &mut [f64],
    velocity: &mut [f64],
    local: &[f64],
    global: &[f64],
    (w, c1, c2): (f64, f64, f64),
    r1: &[f64],
    r2: &[f64],
) {
    for e in 0..design.len() {
        let d = design[e];
        velocity[e] = w * velocity[e] + c1 * r1[e] * (local[e] - d) + c2 * r2[e] * (global[e] - d);
        design[e] = d + velocity[e];
    }
}

fn clip_rows(points: &mut PointSet, candidates: &CandidateSet) {
    let region = candidates.region();
    for row in points.rows_mut() {
        clip_in_place(region, row, candidates.points());
    }
}

/// Result of [`mmc_pso`].
#[derive(Clone, Debug)]
pub struct PsoRun {
    /// Final global best.
    pub design: Design,
    /// Its minimax criterion over the generation candidates.
    pub minimax: f64,
    /// Global best at the end of the clustering phase, before
    /// post-processing.
    pub clustering_best: Design,
    pub clustering_best_hq: f64,
    /// Global-best `h_q` after initialization and after each clustering
    /// iteration.
    pub hq_trace: Vec<f64>,
    /// Global-best `h` at the phase reset and after each post-processing
    /// iteration.
    pub h_trace: Vec<f64>,
}

/// Generates an `n`-point minimax design on `region` from `count` Sobol'
/// candidates.
pub fn mmc_pso(region: &Region, n: usize, count: usize, cfg: &PsoConfig) -> Result<PsoRun> {
    let candidates = CandidateSet::generate(region, count, cfg.seed)?;
    mmc_pso_on(&candidates, n, cfg)
}

/// Initial swarm: particle `k` is a scrambled Sobol' design seeded by
/// `cfg.seed.derive(k)`.
pub fn initial_swarm(candidates: &CandidateSet, n: usize, cfg: &PsoConfig) -> Result<Vec<PointSet>> {
    (0..cfg.swarm)
        .map(|k| {
            let mut d = scrambled_points(candidates.region(), n, cfg.seed.derive(k as u64))?;
            clip_rows(&mut d, candidates);
            Ok(d)
        })
        .collect()
}

/// [`mmc_pso`] on an existing candidate set.
pub fn mmc_pso_on(candidates: &CandidateSet, n: usize, cfg: &PsoConfig) -> Result<PsoRun> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("design size must be at least 1".into()));
    }
    if n > candidates.len() {
        return Err(Error::InvalidConfig(format!(
            "design size {n} exceeds the {} candidate points",
            candidates.len()
        )));
    }
    let q = cfg.agd.q;
    let cands = candidates.points();
    let particles = initial_swarm(candidates, n, cfg)?;
    let mut state = SwarmState::new(particles, cfg.seed, |d| hq_from_assignment(&assign_points(cands, d), q))?;
    let mut hq_trace = vec![state.global_best.value];

    for t in 0..cfg.t_mmc {
        if cfg.parallel_particles {
            clustering_round_parallel(&mut state, candidates, cfg)?;
        } else {
            for k in 0..cfg.swarm {
                let (clustered, moved) = clustering_move(&mut state, k, candidates, cfg)?;
                state.offer_design(k, clustered);
                state.offer(k, moved);
            }
        }
        hq_trace.push(state.global_best.value);
        if t % 50 == 0 {
            debug!("clustering iteration {t}: best h_q = {:.6e}", state.global_best.value);
        }
    }
    let clustering_best = state.global_best.clone();

    // Post-processing on the minimax criterion. Local bests are rescored and
    // refreshed with the current particles before the global best is reset.
    let scores = par::map_range(cfg.swarm, |k| {
        (
            minimax_below(cands, &state.particles[k], f64::INFINITY).unwrap_or(f64::INFINITY),
            minimax_below(cands, &state.local_best[k].points, f64::INFINITY).unwrap_or(f64::INFINITY),
        )
    });
    for (k, (hd, hl)) in scores.into_iter().enumerate() {
        state.local_best[k].value = hl;
        if hd < hl {
            state.local_best[k] = Scored { points: state.particles[k].clone(), value: hd };
        }
    }
    state.global_best = best_of(&state.local_best).clone();
    state.reset_velocities();
    let mut h_trace = vec![state.global_best.value];

    for t in 0..cfg.t_pp {
        if cfg.parallel_particles {
            let snapshot = state.clone();
            let moved = par::map_range(cfg.swarm, |k| {
                let mut local = snapshot.clone();
                local.velocity_update(k, cfg, candidates);
                let h = minimax_below(cands, &local.particles[k], local.local_best[k].value);
                (local.particles.swap_remove(k), local.velocities.swap_remove(k), local.rngs.swap_remove(k), h)
            });
            for (k, (d, v, rng, h)) in moved.into_iter().enumerate() {
                state.particles[k] = d;
                state.velocities[k] = v;
                state.rngs[k] = rng;
                if let Some(h) = h {
                    state.offer(k, h);
                }
            }
        } else {
            for k in 0..cfg.swarm {
                state.velocity_update(k, cfg, candidates);
                if let Some(h) = minimax_below(cands, &state.particles[k], state.local_best[k].value) {
                    state.offer(k, h);
                }
            }
        }
        h_trace.push(state.global_best.value);
        if t % 50 == 0 {
            debug!("post-processing iteration {t}: best h = {:.6}", state.global_best.value);
        }
    }
    info!(
        "mMc-PSO n = {n}: h_q = {:.4e} after clustering, h = {:.6} after post-processing",
        clustering_best.value, state.global_best.value
    );
    Ok(PsoRun {
        minimax: state.global_best.value,
        design: Design::new(state.global_best.points)?,
        clustering_best: Design::new(clustering_best.points)?,
        clustering_best_hq: clustering_best.value,
        hq_trace,
        h_trace,
    })
}

/// One clustering step and one swarm move for particle `k`. Returns the
/// scored design right after the clustering step and the `h_q` of the
/// particle after the move.
fn clustering_move(
    state: &mut SwarmState,
    k: usize,
    candidates: &CandidateSet,
    cfg: &PsoConfig,
) -> Result<(Scored, f64)> {
    let cands = candidates.points();
    let assignment = match state.assignments[k].take() {
        Some(a) => a,
        None => assign_points(cands, &state.particles[k]),
    };
    let (next, _) = update_centers(
        candidates,
        &state.particles[k],
        &assignment,
        CenterRule::Cq(cfg.agd),
        Some(&mut state.caches[k]),
    )?;
    let clustered = Scored { value: hq_from_assignment(&assign_points(cands, &next), cfg.agd.q), points: next.clone() };
    state.particles[k] = next;
    state.velocity_update(k, cfg, candidates);
    let fresh = assign_points(cands, &state.particles[k]);
    let hq = hq_from_assignment(&fresh, cfg.agd.q);
    state.assignments[k] = Some(fresh);
    Ok((clustered, hq))
}

fn clustering_round_parallel(state: &mut SwarmState, candidates: &CandidateSet, cfg: &PsoConfig) -> Result<()> {
    let snapshot = state.clone();
    let moved = par::map_range(cfg.swarm, |k| -> Result<_> {
        let mut local = snapshot.clone();
        let (clustered, hq) = clustering_move(&mut local, k, candidates, cfg)?;
        Ok((
            clustered,
            local.particles.swap_remove(k),
            local.velocities.swap_remove(k),
            local.rngs.swap_remove(k),
            local.caches.swap_remove(k),
            local.assignments.swap_remove(k),
            hq,
        ))
    });
    for (k, r) in moved.into_iter().enumerate() {
        let (clustered, d, v, rng, cache, assignment, hq) = r?;
        state.particles[k] = d;
        state.velocities[k] = v;
        state.rngs[k] = rng;
        state.caches[k] = cache;
        state.assignments[k] = assignment;
        state.offer_design(k, clustered);
        state.offer(k, hq);
    }
    Ok(())
}
