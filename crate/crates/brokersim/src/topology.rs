//! World regions and internet characteristics.
//!
//! The world is divided into six regions (one per continent). Network
//! behavior between regions is described by two 6x6 matrices: one-way
//! latency in milliseconds and bandwidth in bytes per millisecond. Both are
//! scenario inputs; the shipped defaults are placeholder plumbing, not
//! measured data.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of world regions. Fixed: one region per continent.
pub const REGION_COUNT: usize = 6;

/// Identifier of one of the six world regions (`R0` through `R5`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RegionId(u8);

impl RegionId {
    /// Builds a region id, rejecting indices outside `[0, 5]`.
    pub fn new(index: u8) -> Result<Self, TopologyError> {
        if (index as usize) < REGION_COUNT {
            Ok(RegionId(index))
        } else {
            Err(TopologyError::RegionOutOfRange(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All six regions in index order.
    pub fn all() -> [RegionId; REGION_COUNT] {
        [
            RegionId(0),
            RegionId(1),
            RegionId(2),
            RegionId(3),
            RegionId(4),
            RegionId(5),
        ]
    }
}

impl TryFrom<u8> for RegionId {
    type Error = TopologyError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        RegionId::new(value)
    }
}

impl From<RegionId> for u8 {
    fn from(region: RegionId) -> u8 {
        region.0
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("region index {0} out of range (regions are R0..R5)")]
    RegionOutOfRange(u8),
    #[error("bandwidth must be positive, found 0 for {src} -> {dst}")]
    ZeroBandwidth { src: RegionId, dst: RegionId },
}

/// Latency and bandwidth between every pair of regions, diagonal included.
///
/// Latency is one-way: a request/response round trip costs two transfer
/// delays, one per leg.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InternetCharacteristics {
    latency_ms: [[u64; REGION_COUNT]; REGION_COUNT],
    bandwidth_bytes_per_ms: [[u64; REGION_COUNT]; REGION_COUNT],
}

impl InternetCharacteristics {
    /// Validates and wraps the two matrices. Every bandwidth entry must be
    /// positive; latency entries may be zero.
    pub fn new(
        latency_ms: [[u64; REGION_COUNT]; REGION_COUNT],
        bandwidth_bytes_per_ms: [[u64; REGION_COUNT]; REGION_COUNT],
    ) -> Result<Self, TopologyError> {
        for (i, row) in bandwidth_bytes_per_ms.iter().enumerate() {
            for (j, &bw) in row.iter().enumerate() {
                if bw == 0 {
                    return Err(TopologyError::ZeroBandwidth {
                        src: RegionId(i as u8),
                        dst: RegionId(j as u8),
                    });
                }
            }
        }
        Ok(Self {
            latency_ms,
            bandwidth_bytes_per_ms,
        })
    }

    /// Shipped default: a symmetric, distance-tiered latency matrix with
    /// small nonzero intra-region latency, and uniform bandwidth. These are
    /// plausible placeholder values, not measurements.
    pub fn continental_default() -> Self {
        let latency_ms = [
            [25, 100, 150, 250, 300, 200],
            [100, 25, 200, 300, 250, 250],
            [150, 200, 25, 150, 100, 300],
            [250, 300, 150, 25, 200, 150],
            [300, 250, 100, 200, 25, 350],
            [200, 250, 300, 150, 350, 25],
        ];
        let bandwidth_bytes_per_ms = [[1000; REGION_COUNT]; REGION_COUNT];
        Self {
            latency_ms,
            bandwidth_bytes_per_ms,
        }
    }

    pub fn latency_ms(&self, src: RegionId, dst: RegionId) -> u64 {
        self.latency_ms[src.index()][dst.index()]
    }

    pub fn bandwidth_bytes_per_ms(&self, src: RegionId, dst: RegionId) -> u64 {
        self.bandwidth_bytes_per_ms[src.index()][dst.index()]
    }

    /// One-way delay in milliseconds for moving `size_bytes` from `src` to
    /// `dst`: propagation latency plus transmission time, the latter rounded
    /// up to keep simulation time integral.
    pub fn transfer_delay_ms(&self, src: RegionId, dst: RegionId, size_bytes: u64) -> u64 {
        let latency = self.latency_ms[src.index()][dst.index()];
        let bandwidth = self.bandwidth_bytes_per_ms[src.index()][dst.index()];
        latency + size_bytes.div_ceil(bandwidth)
    }

    /// All six regions sorted by ascending latency from `src`, ties broken
    /// by ascending region index.
    pub fn proximity_order(&self, src: RegionId) -> [RegionId; REGION_COUNT] {
        let mut order = RegionId::all();
        order.sort_by_key(|r| (self.latency_ms[src.index()][r.index()], r.index()));
        order
    }
}
