use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{ArrivalError, Result};
use crate::graph::{EdgeSlot, Parity};

/// Exact nonnegative count per edge slot, stored in slot order
/// (vertex 0 even, vertex 0 odd, vertex 1 even, ...).
///
/// Run profiles, run prefixes, switching flows, and candidate flows all use
/// this one shape. Arithmetic is checked; wraparound is reported as
/// [`ArrivalError::Overflow`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlowVector(Vec<u64>);

impl FlowVector {
    pub fn zeros(vertex_count: usize) -> Self {
        FlowVector(vec![0; 2 * vertex_count])
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        FlowVector(counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.0.len() / 2
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.0
    }

    pub fn get(&self, slot: EdgeSlot) -> u64 {
        self.0[slot.index()]
    }

    pub fn set(&mut self, slot: EdgeSlot, value: u64) {
        self.0[slot.index()] = value;
    }

    pub fn even(&self, v: usize) -> u64 {
        self.get(EdgeSlot::even(v))
    }

    pub fn odd(&self, v: usize) -> u64 {
        self.get(EdgeSlot::odd(v))
    }

    /// The parity the switch at `v` points to after this flow: the slot
    /// with the smaller count, ties going to even.
    pub fn next_parity(&self, v: usize) -> Parity {
        Parity::from_bit(self.even(v) > self.odd(v))
    }

    pub fn increment(&mut self, slot: EdgeSlot) -> Result<()> {
        let entry = &mut self.0[slot.index()];
        *entry = entry.checked_add(1).ok_or(ArrivalError::Overflow("flow entry"))?;
        Ok(())
    }

    pub fn checked_add(&self, other: &FlowVector) -> Result<FlowVector> {
        if self.len() != other.len() {
            return Err(ArrivalError::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(ArrivalError::Overflow("flow sum")))
            .collect::<Result<Vec<_>>>()
            .map(FlowVector)
    }

    /// Sum of all entries (the 1-norm).
    pub fn total(&self) -> Result<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or(ArrivalError::Overflow("flow total"))
    }

    pub fn max_entry(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeSlot, u64)> + '_ {
        self.0.iter().enumerate().map(|(i, &c)| (EdgeSlot::from_index(i), c))
    }

    /// True when every entry is at least the corresponding entry of `other`.
    pub fn dominates(&self, other: &FlowVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Index<EdgeSlot> for FlowVector {
    type Output = u64;

    fn index(&self, slot: EdgeSlot) -> &u64 {
        &self.0[slot.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_arithmetic() {
        let mut x = FlowVector::from_counts(vec![u64::MAX, 0]);
        assert!(x.increment(EdgeSlot::even(0)).is_err());
        x.increment(EdgeSlot::odd(0)).unwrap();
        assert_eq!(x.odd(0), 1);
        assert!(x.total().is_err());
        let y = FlowVector::zeros(2);
        assert!(matches!(x.checked_add(&y), Err(ArrivalError::DimensionMismatch { .. })));
    }

    #[test]
    fn next_parity_follows_the_count_difference() {
        let x = FlowVector::from_counts(vec![3, 3, 4, 3]);
        assert_eq!(x.next_parity(0), Parity::Even);
        assert_eq!(x.next_parity(1), Parity::Odd);
    }

    #[test]
    fn serializes_as_a_plain_array() {
        let x = FlowVector::from_counts(vec![1, 0, 2, 2]);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[1,0,2,2]");
    }
}
