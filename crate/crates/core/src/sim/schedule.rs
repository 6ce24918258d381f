use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;

/// Piecewise-constant topology signal: `(start time, topology index)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    entries: Vec<(f64, usize)>,
}

impl Schedule {
    /// Times must start at 0 and strictly increase; indices must be below `topologies`.
    pub fn new(entries: Vec<(f64, usize)>, topologies: usize) -> Result<Self, SimError> {
        let bad = |m: String| Err(SimError::Schedule(m));
        match entries.first() {
            None => return bad("schedule is empty".into()),
            Some(&(t, _)) if t != 0.0 => return bad(format!("schedule must start at t = 0, starts at {t}")),
            _ => {}
        }
        for w in entries.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                return bad(format!("switch times must strictly increase ({} then {})", w[0].0, w[1].0));
            }
        }
        if let Some(&(_, k)) = entries.iter().find(|(_, k)| *k >= topologies) {
            return bad(format!("topology index {k} out of range for {topologies} topologies"));
        }
        Ok(Self { entries })
    }

    pub fn constant(topology: usize) -> Self {
        Self { entries: vec![(0.0, topology)] }
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    /// Index of the last entry starting at or before `t`.
    pub fn active(&self, t: f64) -> Result<usize, SimError> {
        active_topology(&self.entries, t)
    }

    /// Random switching signal: dwell times uniform in `[dwell_min, dwell_max]`, and each
    /// switch moves to a different topology.
    pub fn random<R: Rng>(topologies: usize, t_final: f64, dwell_min: f64, dwell_max: f64, rng: &mut R) -> Self {
        assert!(topologies > 0 && dwell_min > 0.0 && dwell_max >= dwell_min);
        let mut current = rng.random_range(0..topologies);
        let mut entries = vec![(0.0, current)];
        let mut t = 0.0;
        loop {
            t += rng.random_range(dwell_min..=dwell_max);
            if t >= t_final || topologies == 1 {
                break;
            }
            let mut next = rng.random_range(0..topologies - 1);
            if next >= current {
                next += 1;
            }
            current = next;
            entries.push((t, current));
        }
        Self { entries }
    }
}

pub fn active_topology(schedule: &[(f64, usize)], t: f64) -> Result<usize, SimError> {
    if !(t >= 0.0) {
        return Err(SimError::Schedule(format!("time must be non-negative, got {t}")));
    }
    let idx = schedule.partition_point(|(start, _)| *start <= t);
    idx.checked_sub(1)
        .map(|k| schedule[k].1)
        .ok_or_else(|| SimError::Schedule("schedule is empty".into()))
}
