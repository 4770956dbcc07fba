//! Seeded Vicsek swarm simulator on a periodic square box.
//!
//! Each step every particle adopts the mean heading of all particles within
//! the interaction radius (itself included, torus metric) plus a Gaussian
//! perturbation whose standard deviation follows a piecewise schedule over
//! the simulation steps; it then advances at constant speed along its
//! previous heading. Both updates read only the previous state, so the
//! sweep is synchronous.
//!
//! Reproducibility contract: a run draws 3 uniforms per particle for the
//! initial state (x, y, heading, in particle order) and then exactly one
//! Gaussian (two stream words) per particle per step, in particle order,
//! even when the scheduled noise is zero.

use alloc::format;
use alloc::vec::Vec;

use crate::math::{atan2, cos, sin};
use crate::rng::Rng;
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// One contiguous stretch of steps sharing a noise level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseBand {
    /// First step of the band, 1-based inclusive.
    pub start: usize,
    /// Last step of the band, inclusive.
    pub end: usize,
    /// Standard deviation of the Gaussian heading noise.
    pub sigma: f64,
}

/// Simulation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmConfig {
    pub particles: usize,
    pub steps: usize,
    /// Time-step size.
    pub delta: f64,
    /// Constant particle speed.
    pub speed: f64,
    /// Interaction radius (torus metric).
    pub radius: f64,
    /// Side of the periodic box; positions live in `[0, box_side)^2`.
    pub box_side: f64,
    /// Noise schedule; the bands must partition `[1, steps]`.
    pub schedule: Vec<NoiseBand>,
    pub seed: u64,
}

/// The four-band schedule used by the stock 200-step run: moderate noise,
/// high, near-zero, then high again, switching after steps 50, 99 and 149.
pub fn default_schedule() -> Vec<NoiseBand> {
    alloc::vec![
        NoiseBand {
            start: 1,
            end: 50,
            sigma: 0.25
        },
        NoiseBand {
            start: 51,
            end: 99,
            sigma: 1.0
        },
        NoiseBand {
            start: 100,
            end: 149,
            sigma: 0.05
        },
        NoiseBand {
            start: 150,
            end: 200,
            sigma: 0.75
        },
    ]
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            particles: 50,
            steps: 200,
            delta: 0.05,
            speed: 0.1,
            radius: 1.0,
            box_side: 5.0,
            schedule: default_schedule(),
            seed: 42,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 || self.steps == 0 {
            return Err(Error::InvalidParameter(
                "particle and step counts must be positive".into(),
            ));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("speed", self.speed),
            ("radius", self.radius),
            ("box_side", self.box_side),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.schedule.is_empty() {
            return Err(Error::InvalidParameter("empty noise schedule".into()));
        }
        let mut expect = 1;
        for band in &self.schedule {
            if band.start != expect || band.end < band.start {
                return Err(Error::InvalidParameter(format!(
                    "noise bands must partition [1, {}]: band {}..={} does not start at {expect}",
                    self.steps, band.start, band.end
                )));
            }
            if !(band.sigma >= 0.0) || !band.sigma.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "noise sigma must be non-negative, got {}",
                    band.sigma
                )));
            }
            expect = band.end + 1;
        }
        if expect != self.steps + 1 {
            return Err(Error::InvalidParameter(format!(
                "noise bands cover [1, {}] but steps = {}",
                expect - 1,
                self.steps
            )));
        }
        Ok(())
    }

    /// Noise level of a step (1-based).
    pub fn sigma_at(&self, step: usize) -> f64 {
        for band in &self.schedule {
            if step >= band.start && step <= band.end {
                return band.sigma;
            }
        }
        // Steps beyond the schedule (never produced by `simulate`) reuse
        // the last band.
        self.schedule.last().map(|b| b.sigma).unwrap_or(0.0)
    }
}

/// Positions and headings of every particle at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmState {
    /// 1-based step index.
    pub step: usize,
    pub positions: Vec<[f64; 2]>,
    /// Headings in `(-pi, pi]`.
    pub headings: Vec<f64>,
}

/// The full run: one state per step, `states[0].step == 1` holding the
/// initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmTrajectory {
    pub particles: usize,
    pub box_side: f64,
    pub states: Vec<SwarmState>,
}

/// Shortest distance on the `[0, L)^2` torus.
pub fn torus_distance(a: [f64; 2], b: [f64; 2], box_side: f64) -> f64 {
    let mut acc = 0.0;
    for axis in 0..2 {
        let d = (a[axis] - b[axis]).abs();
        let d = d.min(box_side - d);
        acc += d * d;
    }
    crate::math::sqrt(acc)
}

fn wrap_position(x: f64, box_side: f64) -> f64 {
    let mut r = x % box_side;
    if r < 0.0 {
        r += box_side;
    }
    if r >= box_side {
        r = 0.0;
    }
    r
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = atan2(sin(theta), cos(theta));
    if w <= -PI {
        PI
    } else {
        w
    }
}

/// Degenerate rule: an exactly cancelling mean heading vector keeps the
/// previous heading.
#[inline]
fn heading_from_mean(vx: f64, vy: f64, previous: f64) -> f64 {
    if vx == 0.0 && vy == 0.0 {
        previous
    } else {
        atan2(vy, vx)
    }
}

/// One synchronous update. Noise level comes from the schedule at the
/// source step, so advancing state n produces state n+1 with `sigma_at(n)`.
/// An exactly cancelling neighborhood (zero mean heading vector) keeps the
/// particle's previous heading.
pub fn step(state: &SwarmState, cfg: &SwarmConfig, rng: &mut Rng) -> SwarmState {
    let n = state.positions.len();
    let sigma = cfg.sigma_at(state.step);
    let mut headings = Vec::with_capacity(n);
    for i in 0..n {
        let mut vx = 0.0;
        let mut vy = 0.0;
        for j in 0..n {
            if torus_distance(state.positions[i], state.positions[j], cfg.box_side) <= cfg.radius {
                vx += cos(state.headings[j]);
                vy += sin(state.headings[j]);
            }
        }
        let noise = sigma * rng.normal();
        let base = heading_from_mean(vx, vy, state.headings[i]);
        headings.push(wrap_angle(base + noise));
    }
    let travel = cfg.speed * cfg.delta;
    let positions = state
        .positions
        .iter()
        .zip(state.headings.iter())
        .map(|(p, &theta)| {
            [
                wrap_position(p[0] + travel * cos(theta), cfg.box_side),
                wrap_position(p[1] + travel * sin(theta), cfg.box_side),
            ]
        })
        .collect();
    SwarmState {
        step: state.step + 1,
        positions,
        headings,
    }
}

/// Runs the configured number of steps from a seeded random initial state.
pub fn simulate(cfg: &SwarmConfig) -> Result<SwarmTrajectory> {
    cfg.validate()?;
    let mut rng = Rng::new(cfg.seed);
    let mut positions = Vec::with_capacity(cfg.particles);
    let mut headings = Vec::with_capacity(cfg.particles);
    for _ in 0..cfg.particles {
        let x = rng.uniform(0.0, cfg.box_side);
        let y = rng.uniform(0.0, cfg.box_side);
        let theta = PI - 2.0 * PI * rng.next_f64();
        positions.push([x, y]);
        headings.push(theta);
    }
    let mut states = Vec::with_capacity(cfg.steps);
    states.push(SwarmState {
        step: 1,
        positions,
        headings,
    });
    while states.last().unwrap().step < cfg.steps {
        let next = step(states.last().unwrap(), cfg, &mut rng);
        states.push(next);
    }
    Ok(SwarmTrajectory {
        particles: cfg.particles,
        box_side: cfg.box_side,
        states,
    })
}
