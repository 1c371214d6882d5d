//! Monotone priority queue keyed by `u64`: popped keys never decrease and no
//! key below the last popped one may be pushed. Entries with equal keys come
//! out in ascending order of their payload.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub(crate) struct RadixQueue<T: Ord> {
    last: u64,
    /// Bucket `i` holds keys whose highest bit differing from `last` is `i - 1`.
    buckets: Vec<Vec<(u64, T)>>,
    /// Entries whose key equals `last`.
    current: BinaryHeap<Reverse<T>>,
    len: usize,
}

impl<T: Ord> RadixQueue<T> {
    pub(crate) fn new() -> Self {
        RadixQueue {
            last: 0,
            buckets: (0..=64).map(|_| Vec::new()).collect(),
            current: BinaryHeap::new(),
            len: 0,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    fn bucket(&self, key: u64) -> usize {
        64 - (key ^ self.last).leading_zeros() as usize
    }

    pub(crate) fn push(&mut self, key: u64, item: T) {
        debug_assert!(key >= self.last, "key {key} below {}", self.last);
        self.len += 1;
        if key == self.last {
            self.current.push(Reverse(item));
        } else {
            let b = self.bucket(key);
            self.buckets[b].push((key, item));
        }
    }

    pub(crate) fn pop(&mut self) -> Option<(u64, T)> {
        if self.current.is_empty() {
            let i = (1..=64).find(|&i| !self.buckets[i].is_empty())?;
            let items = std::mem::take(&mut self.buckets[i]);
            self.last = items.iter().map(|(k, _)| *k).min().expect("bucket is non-empty");
            for (key, item) in items {
                if key == self.last {
                    self.current.push(Reverse(item));
                } else {
                    let b = self.bucket(key);
                    self.buckets[b].push((key, item));
                }
            }
        }
        let Reverse(item) = self.current.pop()?;
        self.len -= 1;
        Some((self.last, item))
    }

    /// Keeps only the entries for which `keep` holds.
    pub(crate) fn retain(&mut self, mut keep: impl FnMut(u64, &T) -> bool) {
        let last = self.last;
        for b in &mut self.buckets {
            b.retain(|(k, t)| keep(*k, t));
        }
        self.current.retain(|Reverse(t)| keep(last, t));
        self.len = self.current.len() + self.buckets.iter().map(Vec::len).sum::<usize>();
    }
}
