use std::ops::{Add, AddAssign, Sub};

use serde::Serialize;

/// Elementary-operation counters.
///
/// One work unit is one adjacency-entry visit or one counter mutation.
/// Membership flips are tracked separately and are not work units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WorkMeter {
    pub adjacency_visits: u64,
    pub counter_mutations: u64,
    pub mis_flips: u64,
}

impl WorkMeter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn visit(&mut self, count: usize) {
        self.adjacency_visits += count as u64;
    }

    #[inline]
    pub fn mutate(&mut self, count: usize) {
        self.counter_mutations += count as u64;
    }

    #[inline]
    pub fn flip(&mut self) {
        self.mis_flips += 1;
    }

    pub fn work(&self) -> u64 {
        self.adjacency_visits + self.counter_mutations
    }

    /// Work done since `earlier`, a snapshot of this meter.
    pub fn since(&self, earlier: &WorkMeter) -> WorkMeter {
        *self - *earlier
    }
}

impl Add for WorkMeter {
    type Output = WorkMeter;

    fn add(self, rhs: Self) -> Self {
        WorkMeter {
            adjacency_visits: self.adjacency_visits + rhs.adjacency_visits,
            counter_mutations: self.counter_mutations + rhs.counter_mutations,
            mis_flips: self.mis_flips + rhs.mis_flips,
        }
    }
}

impl AddAssign for WorkMeter {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for WorkMeter {
    type Output = WorkMeter;

    fn sub(self, rhs: Self) -> Self {
        WorkMeter {
            adjacency_visits: self.adjacency_visits - rhs.adjacency_visits,
            counter_mutations: self.counter_mutations - rhs.counter_mutations,
            mis_flips: self.mis_flips - rhs.mis_flips,
        }
    }
}
