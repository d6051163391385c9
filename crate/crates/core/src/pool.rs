//! Priority-ordered element pools backing the binary-search exchange
//! finders and the shortest-path estimate queue.
//!
//! Iteration order is ascending `(key, id)`. Prefix and suffix views borrow
//! the pool's backing storage directly, so a probe over the first `j`
//! elements costs a single rank query without materializing a set per probe.
//!
//! Backed by a sorted vector: position lookup is a binary search
//! (`O(log n)` comparisons) and the contiguous storage is what makes the
//! zero-copy slice views possible. Inserts and removals shift elements,
//! which is cheap at the pool sizes the solver maintains.

use crate::matroid::Element;
use crate::Num;

/// Whether a pool presents its priorities smallest-first or largest-first.
///
/// Ties always break by ascending element id in both modes, so a `Max` pool
/// over priority `f` is ordered by `(-f, id)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Min,
    Max,
}

impl Objective {
    #[inline]
    pub fn key_for(self, priority: Num) -> Num {
        match self {
            Objective::Min => priority,
            Objective::Max => -priority,
        }
    }
}

/// A pool of elements ordered by ascending `(key, id)`.
#[derive(Clone, Debug, Default)]
pub struct OrderedPool {
    keys: Vec<Num>,
    ids: Vec<Element>,
}

impl OrderedPool {
    pub fn new() -> Self {
        OrderedPool {
            keys: Vec::new(),
            ids: Vec::new(),
        }
    }

    pub fn with_capacity(cap: usize) -> Self {
        OrderedPool {
            keys: Vec::with_capacity(cap),
            ids: Vec::with_capacity(cap),
        }
    }

    /// Builds a pool from `(id, priority)` pairs under the given objective.
    pub fn from_priorities<I>(objective: Objective, items: I) -> Self
    where
        I: IntoIterator<Item = (Element, Num)>,
    {
        let mut entries: Vec<(Num, Element)> = items
            .into_iter()
            .map(|(id, p)| (objective.key_for(p), id))
            .collect();
        entries.sort_unstable();
        OrderedPool {
            keys: entries.iter().map(|&(k, _)| k).collect(),
            ids: entries.iter().map(|&(_, id)| id).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn position_of(&self, key: Num, id: Element) -> Result<usize, usize> {
        self.keys
            .binary_search_by(|probe_key| probe_key.cmp(&key))
            .map_or_else(Err, |hit| {
                // narrow to the (key, id) position within the equal-key run
                let mut lo = hit;
                while lo > 0 && self.keys[lo - 1] == key {
                    lo -= 1;
                }
                let mut hi = hit + 1;
                while hi < self.keys.len() && self.keys[hi] == key {
                    hi += 1;
                }
                self.ids[lo..hi]
                    .binary_search(&id)
                    .map(|p| lo + p)
                    .map_err(|p| lo + p)
            })
    }

    /// Inserts `id` with the given key. Panics if `id` is already present
    /// with the same key.
    pub fn insert(&mut self, id: Element, key: Num) {
        let pos = match self.position_of(key, id) {
            Ok(_) => panic!("OrderedPool::insert: duplicate entry for element {id}"),
            Err(pos) => pos,
        };
        self.keys.insert(pos, key);
        self.ids.insert(pos, id);
    }

    /// Removes `id` (which must be present with `key`).
    pub fn remove(&mut self, id: Element, key: Num) {
        let pos = self
            .position_of(key, id)
            .unwrap_or_else(|_| panic!("OrderedPool::remove: element {id} not present"));
        self.keys.remove(pos);
        self.ids.remove(pos);
    }

    /// Re-keys an element (remove and reinsert).
    pub fn rekey(&mut self, id: Element, old_key: Num, new_key: Num) {
        self.remove(id, old_key);
        self.insert(id, new_key);
    }

    /// The k-th element in pool order (0-based).
    pub fn kth(&self, k: usize) -> Option<(Element, Num)> {
        (k < self.ids.len()).then(|| (self.ids[k], self.keys[k]))
    }

    pub fn first(&self) -> Option<(Element, Num)> {
        self.kth(0)
    }

    pub fn min_key(&self) -> Option<Num> {
        self.keys.first().copied()
    }

    /// Ids of the first `j` elements in pool order, borrowed in place for
    /// use inside a `SetExpr`.
    pub fn prefix(&self, j: usize) -> &[Element] {
        &self.ids[..j]
    }

    /// Ids from position `j` onward.
    pub fn suffix(&self, j: usize) -> &[Element] {
        &self.ids[j..]
    }

    pub fn ids(&self) -> &[Element] {
        &self.ids
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, Num)> + '_ {
        self.ids.iter().copied().zip(self.keys.iter().copied())
    }

    pub fn clear(&mut self) {
        self.keys.clear();
        self.ids.clear();
    }
}
