//! Persistent bit strings with O(log n) concatenate, split, point update
//! and O(1) probabilistic equality. Handles share subtrees freely; every
//! operation path-copies, so old handles stay valid forever.
//!
//! Equality compares two independent polynomial fingerprints over the
//! Mersenne prime 2^61 - 1 with random bases, which is what makes the
//! mismatch search cheap: one counted equality plus two counted splits per
//! halving level. A family built with `new_verifying` re-checks every
//! positive equality bit by bit and panics on a fingerprint collision.

use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

const P: u64 = (1 << 61) - 1;

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn mulmod(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let mut s = (x & P as u128) as u64 + (x >> 61) as u64;
    s = (s & P) + (s >> 61);
    if s >= P {
        s - P
    } else {
        s
    }
}

struct Node {
    len: u64,
    prio: u64,
    bit: bool,
    left: Option<Rc<Node>>,
    right: Option<Rc<Node>>,
    /// Polynomial fingerprint of the subtree's bits, per track.
    fp: [u64; 2],
    /// Base raised to the subtree length, per track; memoized so a parent
    /// fingerprint combines in O(1).
    rpow: [u64; 2],
}

fn len_of(t: &Option<Rc<Node>>) -> u64 {
    t.as_ref().map_or(0, |n| n.len)
}

/// A persistent bit string tied to the family that built it.
#[derive(Clone)]
pub struct Str {
    root: Option<Rc<Node>>,
}

impl Str {
    pub fn len(&self) -> u64 {
        len_of(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    fn fp(&self) -> [u64; 2] {
        self.root.as_ref().map_or([0, 0], |n| n.fp)
    }
}

/// Counted calls since the last reset, one field per public operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub make: u64,
    pub concat: u64,
    pub split: u64,
    pub equal: u64,
    pub set_bit: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.make + self.concat + self.split + self.equal + self.set_bit
    }
}

/// Factory and operation context for one compatible set of strings. All
/// strings in a family share fingerprint bases, so only strings from the
/// same family may be compared.
pub struct StringFamily {
    r: [u64; 2],
    rng: RefCell<SplitMix64>,
    verify: bool,
    make_ops: Cell<u64>,
    concat_ops: Cell<u64>,
    split_ops: Cell<u64>,
    equal_ops: Cell<u64>,
    set_bit_ops: Cell<u64>,
}

impl StringFamily {
    pub fn new(seed: u64) -> Self {
        Self::build(seed, false)
    }

    /// Same family, but every fingerprint-positive equality is re-checked
    /// bit by bit; a collision panics instead of corrupting the caller.
    pub fn new_verifying(seed: u64) -> Self {
        Self::build(seed, true)
    }

    fn build(seed: u64, verify: bool) -> Self {
        let mut rng = SplitMix64::new(seed);
        let r = [2 + rng.next_below(P - 3), 2 + rng.next_below(P - 3)];
        StringFamily {
            r,
            rng: RefCell::new(rng),
            verify,
            make_ops: Cell::new(0),
            concat_ops: Cell::new(0),
            split_ops: Cell::new(0),
            equal_ops: Cell::new(0),
            set_bit_ops: Cell::new(0),
        }
    }

    pub fn op_counts(&self) -> OpCounts {
        OpCounts {
            make: self.make_ops.get(),
            concat: self.concat_ops.get(),
            split: self.split_ops.get(),
            equal: self.equal_ops.get(),
            set_bit: self.set_bit_ops.get(),
        }
    }

    pub fn reset_ops(&self) {
        self.make_ops.set(0);
        self.concat_ops.set(0);
        self.split_ops.set(0);
        self.equal_ops.set(0);
        self.set_bit_ops.set(0);
    }

    fn leaf(&self, bit: bool) -> Rc<Node> {
        let b = bit as u64;
        Rc::new(Node {
            len: 1,
            prio: self.rng.borrow_mut().next_u64(),
            bit,
            left: None,
            right: None,
            fp: [b, b],
            rpow: self.r,
        })
    }

    /// Rebuilds a node around existing children, refreshing the caches.
    fn join(&self, prio: u64, bit: bool, left: Option<Rc<Node>>, right: Option<Rc<Node>>) -> Rc<Node> {
        let mut fp = [0u64; 2];
        let mut rpow = [0u64; 2];
        let b = bit as u64;
        for track in 0..2 {
            let (lfp, lpow) = left.as_ref().map_or((0, 1), |n| (n.fp[track], n.rpow[track]));
            let (rfp, rpow_r) = right.as_ref().map_or((0, 1), |n| (n.fp[track], n.rpow[track]));
            let shift = mulmod(self.r[track], rpow_r);
            fp[track] = addmod(addmod(mulmod(lfp, shift), mulmod(b, rpow_r)), rfp);
            rpow[track] = mulmod(mulmod(lpow, self.r[track]), rpow_r);
        }
        Rc::new(Node {
            len: len_of(&left) + 1 + len_of(&right),
            prio,
            bit,
            left,
            right,
            fp,
            rpow,
        })
    }

    fn merge(&self, a: Option<Rc<Node>>, b: Option<Rc<Node>>) -> Option<Rc<Node>> {
        match (a, b) {
            (None, t) | (t, None) => t,
            (Some(a), Some(b)) => {
                // reuse priorities; >= keeps ties deterministic
                if a.prio >= b.prio {
                    let merged = self.merge(a.right.clone(), Some(b));
                    Some(self.join(a.prio, a.bit, a.left.clone(), merged))
                } else {
                    let merged = self.merge(Some(a), b.left.clone());
                    Some(self.join(b.prio, b.bit, merged, b.right.clone()))
                }
            }
        }
    }

    /// First `i` bits to the left part, rest to the right.
    fn cut(&self, t: Option<Rc<Node>>, i: u64) -> (Option<Rc<Node>>, Option<Rc<Node>>) {
        let Some(node) = t else {
            debug_assert_eq!(i, 0);
            return (None, None);
        };
        if i == 0 {
            return (None, Some(node));
        }
        if i == node.len {
            return (Some(node), None);
        }
        let llen = len_of(&node.left);
        if i <= llen {
            let (l1, l2) = self.cut(node.left.clone(), i);
            let right = self.join(node.prio, node.bit, l2, node.right.clone());
            (l1, Some(right))
        } else {
            let (r1, r2) = self.cut(node.right.clone(), i - llen - 1);
            let left = self.join(node.prio, node.bit, node.left.clone(), r1);
            (Some(left), r2)
        }
    }

    pub fn make(&self, bits: &[bool]) -> Str {
        self.make_ops.set(self.make_ops.get() + 1);
        Str { root: self.build_range(bits) }
    }

    fn build_range(&self, bits: &[bool]) -> Option<Rc<Node>> {
        match bits.len() {
            0 => None,
            1 => Some(self.leaf(bits[0])),
            n => {
                let left = self.build_range(&bits[..n / 2]);
                let right = self.build_range(&bits[n / 2..]);
                self.merge(left, right)
            }
        }
    }

    pub fn concat(&self, a: &Str, b: &Str) -> Str {
        self.concat_ops.set(self.concat_ops.get() + 1);
        Str { root: self.merge(a.root.clone(), b.root.clone()) }
    }

    /// Splits into the first `i` bits and the rest; both halves must be
    /// nonempty, so `i` ranges over 1..len.
    pub fn split(&self, s: &Str, i: u64) -> Result<(Str, Str)> {
        self.split_ops.set(self.split_ops.get() + 1);
        if i == 0 || i >= s.len() {
            return Err(Error::Position { pos: i as usize, len: s.len() as usize });
        }
        let (l, r) = self.cut(s.root.clone(), i);
        Ok((Str { root: l }, Str { root: r }))
    }

    pub fn equal(&self, a: &Str, b: &Str) -> bool {
        self.equal_ops.set(self.equal_ops.get() + 1);
        if a.len() != b.len() {
            return false;
        }
        let eq = a.fp() == b.fp();
        if eq && self.verify {
            assert_eq!(self.to_bits(a), self.to_bits(b), "fingerprint collision");
        }
        eq
    }

    pub fn set_bit(&self, s: &Str, pos: u64, bit: bool) -> Result<Str> {
        self.set_bit_ops.set(self.set_bit_ops.get() + 1);
        if pos >= s.len() {
            return Err(Error::Position { pos: pos as usize, len: s.len() as usize });
        }
        let root = self.rewrite(s.root.as_ref().expect("nonempty by the bound check"), pos, bit);
        Ok(Str { root: Some(root) })
    }

    fn rewrite(&self, node: &Rc<Node>, pos: u64, bit: bool) -> Rc<Node> {
        let llen = len_of(&node.left);
        if pos < llen {
            let left = self.rewrite(node.left.as_ref().unwrap(), pos, bit);
            self.join(node.prio, node.bit, Some(left), node.right.clone())
        } else if pos == llen {
            self.join(node.prio, bit, node.left.clone(), node.right.clone())
        } else {
            let right = self.rewrite(node.right.as_ref().unwrap(), pos - llen - 1, bit);
            self.join(node.prio, node.bit, node.left.clone(), Some(right))
        }
    }

    /// Index of the first differing bit, or None for equal strings. Costs
    /// one counted equality plus two counted splits per halving level:
    /// at most 2 * ceil(log2 len) + 1 counted operations.
    pub fn first_mismatch(&self, a: &Str, b: &Str) -> Result<Option<u64>> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { left: a.len() as usize, right: b.len() as usize });
        }
        if self.equal(a, b) {
            return Ok(None);
        }
        let mut ca = a.clone();
        let mut cb = b.clone();
        let mut offset = 0u64;
        while ca.len() > 1 {
            let mid = ca.len() / 2;
            let (a1, a2) = self.split(&ca, mid).expect("mid is interior");
            let (b1, b2) = self.split(&cb, mid).expect("equal lengths");
            // fingerprint reads are free; only the splits count
            if a1.fp() != b1.fp() {
                ca = a1;
                cb = b1;
            } else {
                offset += mid;
                ca = a2;
                cb = b2;
            }
        }
        if self.verify {
            assert_ne!(
                self.to_bits(&ca),
                self.to_bits(&cb),
                "mismatch descent landed on equal bits"
            );
        }
        Ok(Some(offset))
    }

    pub fn to_bits(&self, s: &Str) -> Vec<bool> {
        let mut out = Vec::with_capacity(s.len() as usize);
        let mut stack: Vec<(&Rc<Node>, bool)> = Vec::new();
        if let Some(root) = s.root.as_ref() {
            stack.push((root, false));
        }
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                out.push(node.bit);
                if let Some(r) = node.right.as_ref() {
                    stack.push((r, false));
                }
            } else {
                stack.push((node, true));
                if let Some(l) = node.left.as_ref() {
                    stack.push((l, false));
                }
            }
        }
        out
    }
}
