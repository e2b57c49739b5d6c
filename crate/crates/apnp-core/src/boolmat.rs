//! Boolean matrices with a counting product: C[i][k] = |{j : A[i][j] and
//! B[j][k]}|. The solver needs counts, not just existence, because struct
//! maintenance decrements them as pairs retire.
//!
//! The product decomposes into square blocks sized by the smallest dimension
//! (rounded up to whole 64-bit words), so rectangular shapes reduce to a
//! square kernel. Two kernels: word-parallel popcount, and Strassen over i64
//! blocks for a subcubic exponent.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, stride, words: alloc::vec![0u64; rows * stride] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] |= 1u64 << (c % 64);
    }

    pub fn clear(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] &= !(1u64 << (c % 64));
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Square word-aligned block copy: `side` bits on a side, `side % 64 ==
    /// 0`, reading rows `r0..` and bit columns `c0..` with zero padding past
    /// either boundary. `c0` must be word aligned.
    fn block(&self, r0: usize, c0: usize, side: usize) -> BitMatrix {
        debug_assert!(side.is_multiple_of(64) && c0.is_multiple_of(64));
        let mut out = BitMatrix::new(side, side);
        let w0 = c0 / 64;
        let words = (side / 64).min(self.stride.saturating_sub(w0));
        for r in 0..side.min(self.rows.saturating_sub(r0)) {
            let src = &self.words[(r0 + r) * self.stride + w0..][..words];
            out.words[r * out.stride..][..words].copy_from_slice(src);
        }
        out
    }

    fn transposed(&self) -> BitMatrix {
        let mut out = BitMatrix::new(self.cols, self.rows);
        for r in 0..self.rows {
            for (w, &word) in self.row_words(r).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if c < self.cols {
                        out.set(c, r);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl CountMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        CountMatrix { rows, cols, data: alloc::vec![0u32; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn add(&mut self, r: usize, c: usize, delta: u32) {
        self.data[r * self.cols + c] += delta;
    }

    /// Underflow would mean a decrement without a matching product term,
    /// which is exactly the bug this type exists to surface, so it panics.
    pub fn sub(&mut self, r: usize, c: usize, delta: u32) {
        let v = &mut self.data[r * self.cols + c];
        *v = v.checked_sub(delta).expect("count decremented below zero");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulKernel {
    /// Word-parallel AND + popcount; cubic but with a 1/64 constant.
    Packed,
    /// Strassen recursion over i64 blocks, naive below 64 a side.
    Strassen,
}

impl MulKernel {
    /// Exponent the kernel effectively realizes; feeds the degree threshold.
    pub fn effective_exponent(self) -> f64 {
        match self {
            MulKernel::Packed => 3.0,
            // log2(7)
            MulKernel::Strassen => 2.807_354_922_057_604,
        }
    }
}

pub fn mul_count(a: &BitMatrix, b: &BitMatrix, kernel: MulKernel) -> CountMatrix {
    let side = a.rows.min(a.cols).min(b.cols).next_multiple_of(64).max(64);
    mul_count_blocked(a, b, kernel, side)
}

/// Same product with an explicit block side (any positive multiple of 64).
/// Results are identical for every legal block size; the default merely
/// picks the square closest to the smallest dimension.
pub fn mul_count_blocked(
    a: &BitMatrix,
    b: &BitMatrix,
    kernel: MulKernel,
    side: usize,
) -> CountMatrix {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    assert!(side > 0 && side.is_multiple_of(64), "block side must be a positive word multiple");
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut c = CountMatrix::new(m, p);
    if m == 0 || n == 0 || p == 0 {
        return c;
    }
    for i0 in (0..m).step_by(side) {
        for k0 in (0..p).step_by(side) {
            for j0 in (0..n).step_by(side) {
                let ab = a.block(i0, j0, side);
                let bb = b.block(j0, k0, side);
                let partial = square_kernel(&ab, &bb, kernel);
                for i in 0..side.min(m - i0) {
                    for k in 0..side.min(p - k0) {
                        let v = partial.get(i, k);
                        if v != 0 {
                            c.add(i0 + i, k0 + k, v);
                        }
                    }
                }
            }
        }
    }
    c
}

fn square_kernel(a: &BitMatrix, b: &BitMatrix, kernel: MulKernel) -> CountMatrix {
    debug_assert!(a.rows == a.cols && b.rows == b.cols && a.rows == b.rows);
    match kernel {
        MulKernel::Packed => packed_mul(a, b),
        MulKernel::Strassen => strassen_mul(a, b),
    }
}

fn packed_mul(a: &BitMatrix, b: &BitMatrix) -> CountMatrix {
    let s = a.rows;
    let bt = b.transposed();
    let mut c = CountMatrix::new(s, s);
    for i in 0..s {
        let ra = a.row_words(i);
        for k in 0..s {
            let rb = bt.row_words(k);
            let count: u32 = ra.iter().zip(rb).map(|(x, y)| (x & y).count_ones()).sum();
            if count != 0 {
                c.add(i, k, count);
            }
        }
    }
    c
}

fn strassen_mul(a: &BitMatrix, b: &BitMatrix) -> CountMatrix {
    let s = a.rows;
    let full = s.next_power_of_two();
    let to_dense = |m: &BitMatrix| {
        let mut d = alloc::vec![0i64; full * full];
        for r in 0..s {
            for (w, &word) in m.row_words(r).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    d[r * full + c] = 1;
                }
            }
        }
        d
    };
    let prod = strassen_rec(&to_dense(a), &to_dense(b), full);
    let mut c = CountMatrix::new(s, s);
    for r in 0..s {
        for k in 0..s {
            let v = prod[r * full + k];
            debug_assert!((0..=s as i64).contains(&v));
            if v != 0 {
                c.add(r, k, v as u32);
            }
        }
    }
    c
}

const STRASSEN_CUTOFF: usize = 64;

fn strassen_rec(a: &[i64], b: &[i64], s: usize) -> Vec<i64> {
    if s <= STRASSEN_CUTOFF {
        let mut c = alloc::vec![0i64; s * s];
        for i in 0..s {
            for j in 0..s {
                let av = a[i * s + j];
                if av != 0 {
                    for k in 0..s {
                        c[i * s + k] += av * b[j * s + k];
                    }
                }
            }
        }
        return c;
    }
    let h = s / 2;
    let quad = |m: &[i64], qr: usize, qc: usize| {
        let mut q = alloc::vec![0i64; h * h];
        for r in 0..h {
            let base = (qr * h + r) * s + qc * h;
            q[r * h..(r + 1) * h].copy_from_slice(&m[base..base + h]);
        }
        q
    };
    let add = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(u, v)| u + v).collect::<Vec<_>>();
    let sub = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(u, v)| u - v).collect::<Vec<_>>();

    let (a11, a12, a21, a22) = (quad(a, 0, 0), quad(a, 0, 1), quad(a, 1, 0), quad(a, 1, 1));
    let (b11, b12, b21, b22) = (quad(b, 0, 0), quad(b, 0, 1), quad(b, 1, 0), quad(b, 1, 1));

    let m1 = strassen_rec(&add(&a11, &a22), &add(&b11, &b22), h);
    let m2 = strassen_rec(&add(&a21, &a22), &b11, h);
    let m3 = strassen_rec(&a11, &sub(&b12, &b22), h);
    let m4 = strassen_rec(&a22, &sub(&b21, &b11), h);
    let m5 = strassen_rec(&add(&a11, &a12), &b22, h);
    let m6 = strassen_rec(&sub(&a21, &a11), &add(&b11, &b12), h);
    let m7 = strassen_rec(&sub(&a12, &a22), &add(&b21, &b22), h);

    let mut c = alloc::vec![0i64; s * s];
    for r in 0..h {
        for k in 0..h {
            let i = r * h + k;
            c[r * s + k] = m1[i] + m4[i] - m5[i] + m7[i];
            c[r * s + h + k] = m3[i] + m5[i];
            c[(h + r) * s + k] = m2[i] + m4[i];
            c[(h + r) * s + h + k] = m1[i] - m2[i] + m3[i] + m6[i];
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    pub fn ref_mul(a: &BitMatrix, b: &BitMatrix) -> CountMatrix {
        let mut c = CountMatrix::new(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a.get(i, j) {
                    for k in 0..b.cols() {
                        if b.get(j, k) {
                            c.add(i, k, 1);
                        }
                    }
                }
            }
        }
        c
    }

    fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, density_pct: u64) -> BitMatrix {
        let mut m = BitMatrix::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.next_below(100) < density_pct {
                    m.set(r, c);
                }
            }
        }
        m
    }

    #[test]
    fn two_by_two_by_hand() {
        // [1 0]   [1 1]   [1 1]
        // [1 1] x [0 1] = [1 2]
        let mut a = BitMatrix::new(2, 2);
        a.set(0, 0);
        a.set(1, 0);
        a.set(1, 1);
        let mut b = BitMatrix::new(2, 2);
        b.set(0, 0);
        b.set(0, 1);
        b.set(1, 1);
        for kernel in [MulKernel::Packed, MulKernel::Strassen] {
            let c = mul_count(&a, &b, kernel);
            assert_eq!(
                [c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1)],
                [1, 1, 1, 2],
                "{kernel:?}"
            );
        }
    }

    #[test]
    fn counts_are_counts_not_bools() {
        // All-ones 3x3 squared: every cell counts all 3 paths.
        let mut a = BitMatrix::new(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j);
            }
        }
        let c = mul_count(&a, &a, MulKernel::Packed);
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(c.get(i, k), 3);
            }
        }
    }

    #[test]
    fn rectangular_matches_reference() {
        let mut rng = SplitMix64::new(99);
        for (m, n, p) in [(1, 1, 1), (3, 5, 2), (70, 90, 40), (130, 65, 129)] {
            let a = random_matrix(&mut rng, m, n, 35);
            let b = random_matrix(&mut rng, n, p, 35);
            let want = ref_mul(&a, &b);
            for kernel in [MulKernel::Packed, MulKernel::Strassen] {
                assert_eq!(mul_count(&a, &b, kernel), want, "{m}x{n}x{p} {kernel:?}");
            }
        }
    }

    #[test]
    fn block_side_does_not_change_the_product() {
        let mut rng = SplitMix64::new(5);
        let a = random_matrix(&mut rng, 100, 70, 50);
        let b = random_matrix(&mut rng, 70, 131, 50);
        let want = ref_mul(&a, &b);
        for side in [64, 128, 192, 256] {
            for kernel in [MulKernel::Packed, MulKernel::Strassen] {
                assert_eq!(mul_count_blocked(&a, &b, kernel, side), want, "side {side}");
            }
        }
    }

    #[test]
    fn strassen_recursion_crosses_the_cutoff() {
        // 129 forces a 256-padded recursion, two levels above the cutoff.
        let mut rng = SplitMix64::new(17);
        let a = random_matrix(&mut rng, 129, 129, 20);
        let b = random_matrix(&mut rng, 129, 129, 20);
        assert_eq!(mul_count(&a, &b, MulKernel::Strassen), ref_mul(&a, &b));
    }

    #[test]
    fn empty_dimensions_yield_empty_products() {
        let a = BitMatrix::new(0, 0);
        let b = BitMatrix::new(0, 5);
        let c = mul_count(&a, &b, MulKernel::Packed);
        assert_eq!((c.rows(), c.cols()), (0, 5));
    }

    #[test]
    fn exponents() {
        assert_eq!(MulKernel::Packed.effective_exponent(), 3.0);
        let w = MulKernel::Strassen.effective_exponent();
        assert!((w - 7f64.log2()).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "below zero")]
    fn count_underflow_is_loud() {
        let mut c = CountMatrix::new(1, 1);
        c.add(0, 0, 1);
        c.sub(0, 0, 2);
    }
}
