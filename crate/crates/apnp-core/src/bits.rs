//! Binary strings up to 63 bits, compared lexicographically. Weight ranks
//! are stored as fixed-width codes; partition nodes are identified by code
//! prefixes. Lexicographic order on equal-length strings matches integer
//! order, which is what lets a prefix stand for a contiguous code interval.

use core::cmp::Ordering;
use core::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    value: u64,
    len: u32,
}

impl BitString {
    pub const EMPTY: BitString = BitString { value: 0, len: 0 };

    /// `value` holds the bits right-aligned: `new(0b101, 3)` is "101".
    pub fn new(value: u64, len: u32) -> Self {
        assert!(len <= 63, "bit strings cap at 63 bits");
        assert!(len == 63 || value < (1u64 << len), "value wider than len");
        BitString { value, len }
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn value(self) -> u64 {
        self.value
    }

    /// Bit at position `i`, most significant first.
    pub fn bit(self, i: u32) -> bool {
        assert!(i < self.len);
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn push(self, bit: bool) -> Self {
        BitString::new((self.value << 1) | bit as u64, self.len + 1)
    }

    pub fn is_prefix_of(self, other: BitString) -> bool {
        self.len <= other.len && other.value >> (other.len - self.len) == self.value
    }
}

/// Longest common prefix.
pub fn lcp(a: BitString, b: BitString) -> BitString {
    let n = a.len().min(b.len());
    // Align both to n bits, then the first differing bit caps the answer.
    let av = a.value() >> (a.len() - n);
    let bv = b.value() >> (b.len() - n);
    let x = av ^ bv;
    let k = if x == 0 { n } else { n - 1 - (63 - x.leading_zeros()) };
    BitString::new(av >> (n - k), k)
}

/// Inclusive interval of `width`-bit codes that extend `prefix`.
pub fn code_interval(prefix: BitString, width: u32) -> (u64, u64) {
    assert!(width <= 63 && prefix.len() <= width);
    let shift = width - prefix.len();
    let lo = prefix.value() << shift;
    (lo, lo | ((1u64 << shift) - 1))
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.len.min(other.len);
        let a = if self.len > n { self.value >> (self.len - n) } else { self.value };
        let b = if other.len > n { other.value >> (other.len - n) } else { other.value };
        // Shared region first, then shorter-is-smaller (a proper prefix
        // precedes its extensions).
        a.cmp(&b).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
