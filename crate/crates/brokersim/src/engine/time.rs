//! Integer simulation time.
//!
//! Time is measured in whole milliseconds since simulation start. Keeping it
//! integral makes event ordering and all derived metrics platform-independent
//! and bit-reproducible; every duration in the model (network transfer,
//! service time) is rounded up to the next millisecond where division occurs.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Add;

/// A point in simulation time, in milliseconds since simulation start.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms)
    }

    pub const fn as_millis(self) -> u64 {
        self.0
    }

    /// Milliseconds elapsed since `earlier`.
    ///
    /// # Panics
    ///
    /// Panics if `earlier` is later than `self`; timestamps taken along a
    /// cloudlet lifecycle are non-decreasing, so that would be a logic bug.
    pub fn since(self, earlier: SimTime) -> u64 {
        self.0
            .checked_sub(earlier.0)
            .expect("time went backwards: lifecycle timestamps must be non-decreasing")
    }
}

impl Add<u64> for SimTime {
    type Output = SimTime;

    fn add(self, delta_ms: u64) -> SimTime {
        SimTime(self.0 + delta_ms)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}
