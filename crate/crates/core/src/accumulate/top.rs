use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Number of largest observable values retained for trimming.
pub const B_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term(f64);

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The `capacity` largest values pushed so far, kept in a bounded min-heap.
#[derive(Debug, Clone)]
pub struct TopTerms {
    heap: BinaryHeap<Reverse<Term>>,
    capacity: usize,
}

impl TopTerms {
    pub fn new(capacity: usize) -> Self {
        TopTerms {
            heap: BinaryHeap::with_capacity(capacity + 1),
            capacity,
        }
    }

    #[inline]
    pub fn push(&mut self, value: f64) {
        if self.heap.len() < self.capacity {
            self.heap.push(Reverse(Term(value)));
        } else if let Some(mut smallest) = self.heap.peek_mut() {
            if value > smallest.0 .0 {
                *smallest = Reverse(Term(value));
            }
        }
    }

    /// Retained values, largest first.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.heap.iter().map(|r| r.0 .0).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}
