//! Time-ordered event queue with deterministic tie-breaking.
//!
//! Events fire in non-decreasing time order; events scheduled for the same
//! instant fire in scheduling order, tracked by a monotone sequence counter.
//! This removes every source of nondeterminism from the event loop: the pop
//! order is a pure function of the schedule calls.

use super::time::SimTime;
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// An event queued for execution, together with its scheduling metadata.
#[derive(Debug)]
pub struct Scheduled<T> {
    pub fire_at: SimTime,
    /// Monotone tie-break counter; strictly increases in scheduling order.
    pub sequence: u64,
    pub payload: T,
}

impl<T> PartialEq for Scheduled<T> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.sequence == other.sequence
    }
}

impl<T> Eq for Scheduled<T> {}

impl<T> PartialOrd for Scheduled<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Scheduled<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.fire_at
            .cmp(&other.fire_at)
            .then_with(|| self.sequence.cmp(&other.sequence))
    }
}

/// Priority queue of scheduled events plus the simulation clock.
///
/// The clock advances to each popped event's fire time and never moves
/// backwards. Scheduling an event in the past panics: it signals a logic bug
/// in the caller, not a recoverable condition.
#[derive(Debug)]
pub struct EventQueue<T> {
    heap: BinaryHeap<Reverse<Scheduled<T>>>,
    clock: SimTime,
    next_sequence: u64,
}

impl<T> Default for EventQueue<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> EventQueue<T> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            clock: SimTime::ZERO,
            next_sequence: 0,
        }
    }

    /// Current simulation time: the fire time of the last popped event.
    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Queues `payload` to fire at `fire_at`.
    ///
    /// # Panics
    ///
    /// Panics if `fire_at` is earlier than the current clock.
    pub fn schedule(&mut self, fire_at: SimTime, payload: T) {
        assert!(
            fire_at >= self.clock,
            "scheduled event in the past: fire_at {} < clock {}",
            fire_at,
            self.clock
        );
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Reverse(Scheduled {
            fire_at,
            sequence,
            payload,
        }));
    }

    /// Pops the next event in (fire_at, sequence) order and advances the
    /// clock to its fire time.
    pub fn pop(&mut self) -> Option<Scheduled<T>> {
        let Reverse(event) = self.heap.pop()?;
        debug_assert!(event.fire_at >= self.clock);
        self.clock = event.fire_at;
        Some(event)
    }
}
