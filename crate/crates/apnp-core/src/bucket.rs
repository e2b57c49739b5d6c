//! Monotone bucket queue over weight codes. Keys only ever decrease and the
//! sweep visits codes in ascending order, so an indexed bucket per code with
//! swap-removal gives O(1) decrease and O(1) amortized drain, with no stale
//! entries left behind.

use alloc::vec::Vec;

const NOWHERE: u32 = u32::MAX;

#[derive(Debug)]
pub struct BucketQueue {
    buckets: Vec<Vec<u32>>,
    pos: Vec<u32>,
}

impl BucketQueue {
    pub fn new(num_codes: usize, num_items: usize) -> Self {
        BucketQueue {
            buckets: alloc::vec![Vec::new(); num_codes],
            pos: alloc::vec![NOWHERE; num_items],
        }
    }

    /// Moves `item` from bucket `old` to bucket `new`; `old == u32::MAX`
    /// means the item was not queued yet. The caller tracks keys, the queue
    /// only tracks positions.
    pub fn decrease(&mut self, item: u32, old: u32, new: u32) {
        debug_assert!(old == u32::MAX || new < old);
        if old != u32::MAX {
            let b = &mut self.buckets[old as usize];
            let p = self.pos[item as usize] as usize;
            debug_assert_eq!(b[p], item);
            let moved = *b.last().unwrap();
            b.swap_remove(p);
            if moved != item {
                self.pos[moved as usize] = p as u32;
            }
        }
        let b = &mut self.buckets[new as usize];
        self.pos[item as usize] = b.len() as u32;
        b.push(item);
    }

    /// Empties the bucket. Items handed out are being finalized; they must
    /// never be decreased again.
    pub fn drain(&mut self, code: u32) -> Vec<u32> {
        core::mem::take(&mut self.buckets[code as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decrease_moves_between_buckets() {
        let mut q = BucketQueue::new(8, 4);
        q.decrease(0, u32::MAX, 5);
        q.decrease(1, u32::MAX, 5);
        q.decrease(2, u32::MAX, 5);
        q.decrease(1, 5, 2);
        q.decrease(0, 5, 3);
        assert_eq!(q.drain(2), [1]);
        assert_eq!(q.drain(3), [0]);
        assert_eq!(q.drain(5), [2]);
        assert_eq!(q.drain(5), [] as [u32; 0]);
    }

    #[test]
    fn swap_removal_keeps_positions_straight() {
        let mut q = BucketQueue::new(4, 8);
        for item in 0..8 {
            q.decrease(item, u32::MAX, 3);
        }
        // Remove from the middle repeatedly; survivors must stay findable.
        q.decrease(2, 3, 1);
        q.decrease(7, 3, 1);
        q.decrease(0, 3, 2);
        q.decrease(5, 3, 0);
        let mut rest = q.drain(3);
        rest.sort_unstable();
        assert_eq!(rest, [1, 3, 4, 6]);
        assert_eq!(q.drain(1), [2, 7]);
        assert_eq!(q.drain(2), [0]);
        assert_eq!(q.drain(0), [5]);
    }
}
