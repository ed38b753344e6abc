//! Labeled particle dynamics: each particle follows its own putative walk in
//! its inner time, which only runs while the particle is active.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{code, Configuration, Direction, ModelParams, SleepRate, Step, Volume};
use crate::rng::{derive_seed, site_key, stream};
use crate::trace::TimedEvent;

pub use super::ct::RunStatus;

/// Putative walks and sleep clocks for every particle of a configuration.
#[derive(Debug, Clone)]
pub struct LabeledSystem {
    pub params: ModelParams,
    pub seed: u64,
}

impl LabeledSystem {
    pub fn new(params: ModelParams, seed: u64) -> Self {
        LabeledSystem { params, seed }
    }

    /// Randomness of particle `(x, j)`, independent of every other particle.
    pub fn particle_stream(&self, coords: &[i64], j: u32) -> ChaCha8Rng {
        stream(derive_seed(self.seed, &[site_key(self.seed, coords), u64::from(j)]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    /// Birth site and label `j >= 1` among the particles born there.
    pub birth: Vec<i64>,
    pub label: u32,
    /// Current site, `None` once the particle has left the domain.
    pub site: Option<usize>,
    pub asleep: bool,
    /// Inner time `sigma`: total time spent active.
    pub inner_time: f64,
    /// Whether the particle ever stood outside the watched volume.
    pub left_watch: bool,
    pub jumps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRecord {
    pub particle: usize,
    pub t: f64,
    pub from: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone)]
pub struct PwRun {
    pub status: RunStatus,
    pub time: f64,
    pub particles: Vec<Particle>,
    pub exits: Vec<ExitRecord>,
    /// Unlabeled projection at the end.
    pub config: Configuration,
    pub events: Vec<TimedEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Due {
    t: f64,
    particle: usize,
    version: u64,
}

impl Eq for Due {}

impl Ord for Due {
    fn cmp(&self, o: &Self) -> Ordering {
        self.t.total_cmp(&o.t).then(self.particle.cmp(&o.particle)).then(self.version.cmp(&o.version))
    }
}

impl PartialOrd for Due {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct Clock {
    rng: ChaCha8Rng,
    next_jump: f64,
    next_sleep: f64,
    /// Real time at which `inner_time` was last brought up to date.
    since: f64,
    version: u64,
}

fn exp(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Runs the labeled dynamics until every particle sleeps or has left, or
/// until `t_max`. `watch` marks a volume whose leavers are flagged.
pub fn particlewise_run(
    cfg: &Configuration,
    system: &LabeledSystem,
    t_max: f64,
    watch: Option<&Volume>,
    record: bool,
) -> Result<PwRun> {
    let lambda = match system.params.lambda {
        SleepRate::Finite(l) => l,
        SleepRate::Infinite => return Err(Error::WrongModel("continuous time needs a finite sleep rate".into())),
    };
    let lattice = cfg.lattice().clone();
    if lattice.dim() != system.params.dim() {
        return Err(Error::InvalidSpec("lattice and kernel dimensions differ".into()));
    }
    let jumps = &system.params.jumps;
    let mut occupancy = vec![0u32; lattice.len()];
    let mut sleeper: Vec<Option<usize>> = vec![None; lattice.len()];
    let mut particles = Vec::new();
    let mut clocks = Vec::new();
    let mut heap = BinaryHeap::new();
    for i in lattice.interior() {
        let c = cfg.codes()[i];
        let coords = lattice.coords(i);
        for j in 1..=code::count(c) {
            let mut rng = system.particle_stream(&coords, j);
            let next_jump = exp(&mut rng, 1.0);
            let next_sleep = exp(&mut rng, lambda);
            let asleep = c == code::SLEEPING;
            let p = particles.len();
            if asleep {
                sleeper[i] = Some(p);
            } else {
                heap.push(Reverse(Due { t: next_jump.min(next_sleep), particle: p, version: 0 }));
            }
            particles.push(Particle {
                birth: coords.clone(),
                label: j,
                site: Some(i),
                asleep,
                inner_time: 0.0,
                left_watch: watch.is_some_and(|w| !w.contains(i)),
                jumps: 0,
            });
            clocks.push(Clock { rng, next_jump, next_sleep, since: 0.0, version: 0 });
            occupancy[i] += 1;
        }
    }
    let schedule = |heap: &mut BinaryHeap<Reverse<Due>>, p: usize, part: &Particle, c: &Clock| {
        let t = c.since + (c.next_jump.min(c.next_sleep) - part.inner_time);
        heap.push(Reverse(Due { t, particle: p, version: c.version }));
    };
    let id = |p: &Particle| {
        let mut v = p.birth.clone();
        v.push(i64::from(p.label));
        v
    };
    let mut exits = Vec::new();
    let mut events = Vec::new();
    let mut now = 0.0;
    let mut status = RunStatus::Absorbed;
    while let Some(Reverse(due)) = heap.pop() {
        let p = due.particle;
        if due.version != clocks[p].version || particles[p].asleep || particles[p].site.is_none() {
            continue;
        }
        if due.t > t_max {
            status = RunStatus::Unabsorbed;
            now = t_max;
            break;
        }
        now = due.t;
        let c = &mut clocks[p];
        let part = &mut particles[p];
        part.inner_time += now - c.since;
        c.since = now;
        let x = part.site.expect("on lattice");
        if c.next_jump <= c.next_sleep {
            let u: f64 = c.rng.random();
            let dir = jumps.sample_unit(u);
            c.next_jump += exp(&mut c.rng, 1.0);
            part.jumps += 1;
            occupancy[x] -= 1;
            if record {
                events.push(TimedEvent { t: now, kind: "jump", id: id(part), instruction: None });
            }
            match lattice.step(x, dir) {
                Step::Site(y) => {
                    part.site = Some(y);
                    occupancy[y] += 1;
                    if watch.is_some_and(|w| !w.contains(y)) {
                        part.left_watch = true;
                    }
                    schedule(&mut heap, p, part, c);
                    if let Some(q) = sleeper[y].take() {
                        let (qp, qc) = (&mut particles[q], &mut clocks[q]);
                        qp.asleep = false;
                        qc.since = now;
                        qc.version += 1;
                        schedule(&mut heap, q, qp, qc);
                        if record {
                            events.push(TimedEvent { t: now, kind: "wake", id: id(qp), instruction: None });
                        }
                    }
                }
                Step::Outside => {
                    part.site = None;
                    part.left_watch |= watch.is_some();
                    exits.push(ExitRecord { particle: p, t: now, from: x, direction: dir });
                    if record {
                        events.push(TimedEvent { t: now, kind: "exit", id: id(part), instruction: None });
                    }
                }
            }
        } else {
            c.next_sleep += exp(&mut c.rng, lambda);
            if occupancy[x] == 1 {
                part.asleep = true;
                sleeper[x] = Some(p);
                if record {
                    events.push(TimedEvent { t: now, kind: "sleep", id: id(part), instruction: None });
                }
            } else {
                schedule(&mut heap, p, part, c);
            }
        }
        debug_assert!(sleeper.iter().enumerate().all(|(s, q)| q.is_none() || occupancy[s] == 1));
    }
    if status == RunStatus::Unabsorbed {
        for (part, c) in particles.iter_mut().zip(&clocks) {
            if !part.asleep && part.site.is_some() {
                part.inner_time += now - c.since;
            }
        }
    }
    let config = project(cfg, &particles);
    Ok(PwRun { status, time: now, particles, exits, config, events })
}

/// Unlabeled configuration of a labeled state.
pub fn project(template: &Configuration, particles: &[Particle]) -> Configuration {
    let mut out = Configuration::empty(template.lattice().clone());
    let mut n = vec![0u32; out.lattice().len()];
    let mut asleep = vec![false; n.len()];
    for p in particles {
        if let Some(s) = p.site {
            n[s] += 1;
            asleep[s] |= p.asleep;
        }
    }
    for (i, (&k, &a)) in n.iter().zip(&asleep).enumerate() {
        if k > 0 {
            assert!(!a || k == 1, "sleeping particle shares a site");
            out.add_active(i, k);
            if a {
                out.set(i, crate::model::SiteState::Sleeping);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Boundary, JumpDistribution, Lattice, SiteState};

    fn system(seed: u64, d: usize) -> LabeledSystem {
        LabeledSystem::new(ModelParams::new(SleepRate::Finite(1.0), JumpDistribution::symmetric(d)), seed)
    }

    #[test]
    fn lone_particle_follows_its_putative_walk() {
        let l = Lattice::cube(1, 30, Boundary::Kill).unwrap();
        for seed in 0..20 {
            let mut cfg = Configuration::empty(l.clone());
            cfg.set_at(&[0], SiteState::Active(1)).unwrap();
            let sys = system(seed, 1);
            let r = particlewise_run(&cfg, &sys, 1e9, None, false).unwrap();
            // replay the stream: jumps before the first sleep ring
            let mut rng = sys.particle_stream(&[0], 1);
            let (mut nj, mut ns) = (exp(&mut rng, 1.0), exp(&mut rng, 1.0));
            let mut x = 0i64;
            let mut n = 0;
            while nj <= ns {
                let u: f64 = rng.random();
                x += sys.params.jumps.sample_unit(u).sign();
                nj += exp(&mut rng, 1.0);
                n += 1;
                if x.abs() > 30 {
                    break;
                }
            }
            let _ = &mut ns;
            let p = &r.particles[0];
            assert_eq!(p.jumps, n);
            if x.abs() <= 30 {
                assert!(p.asleep);
                assert_eq!(l.coords(p.site.unwrap()), vec![x]);
                assert!((p.inner_time - ns).abs() < 1e-9);
            } else {
                assert!(p.site.is_none());
            }
        }
    }

    #[test]
    fn closed_box_conserves_mass() {
        let l = Lattice::cube(2, 2, Boundary::Closed).unwrap();
        for seed in 0..30 {
            let cfg = crate::model::sample_initial(&crate::model::InitialState::poisson(0.4).unwrap(), &l, seed).unwrap();
            let r = particlewise_run(&cfg, &system(seed, 2), 1e4, None, true).unwrap();
            assert!(r.exits.is_empty());
            assert_eq!(r.config.total_particles(), cfg.total_particles());
            assert_eq!(r.particles.len() as u64, cfg.total_particles());
        }
    }

    #[test]
    fn watch_flags_leavers() {
        let l = Lattice::cube(1, 10, Boundary::Kill).unwrap();
        let mut cfg = Configuration::empty(l.clone());
        cfg.set_at(&[0], SiteState::Active(3)).unwrap();
        let w = Volume::cube(&l, 0).unwrap();
        let r = particlewise_run(&cfg, &system(4, 1), 1e9, Some(&w), false).unwrap();
        assert!(r.particles.iter().any(|p| p.left_watch));
    }
}
