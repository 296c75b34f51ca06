//! GF(2) linear algebra kernels: linear complexity and binary matrix rank.

/// Length of the shortest LFSR generating `bits` (0/1 values).
///
/// Bit-packed Berlekamp-Massey: the connection polynomial and a reversed window
/// of the sequence are held as word arrays, so each discrepancy is one masked
/// parity.
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    let n = bits.len();
    let words = (n + 1).div_ceil(64);
    let mut c = vec![0u64; words];
    let mut b = vec![0u64; words];
    let mut t = vec![0u64; words];
    // window bit i holds bits[k - i] while processing position k
    let mut window = vec![0u64; words];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut m: isize = -1;

    for k in 0..n {
        shift_left_one(&mut window);
        window[0] |= u64::from(bits[k] & 1);
        let d = c
            .iter()
            .zip(&window)
            .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
            & 1;
        if d == 1 {
            t.copy_from_slice(&c);
            xor_shifted(&mut c, &b, (k as isize - m) as usize);
            if 2 * l <= k {
                l = k + 1 - l;
                m = k as isize;
                std::mem::swap(&mut b, &mut t);
            }
        }
    }
    l
}

fn shift_left_one(words: &mut [u64]) {
    let mut carry = 0;
    for w in words.iter_mut() {
        let next = *w >> 63;
        *w = (*w << 1) | carry;
        carry = next;
    }
}

/// `dst ^= src << shift`, truncated to `dst.len()` words.
fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / 64;
    let bit_shift = shift % 64;
    for i in (word_shift..dst.len()).rev() {
        let j = i - word_shift;
        let mut v = src[j] << bit_shift;
        if bit_shift != 0 && j > 0 {
            v |= src[j - 1] >> (64 - bit_shift);
        }
        dst[i] ^= v;
    }
}

/// Rank over GF(2) of a 32x32 matrix given as row bitmasks.
pub fn gf2_rank(mut rows: [u32; 32]) -> usize {
    let mut rank = 0;
    for col in (0..32).rev() {
        let mask = 1u32 << col;
        let Some(pivot) = (rank..32).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for r in 0..32 {
            if r != rank && rows[r] & mask != 0 {
                rows[r] ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}

/// Probability that a uniformly random `rows x cols` binary matrix has rank `r`.
pub fn rank_probability(r: usize, rows: usize, cols: usize) -> f64 {
    if r > rows.min(cols) {
        return 0.0;
    }
    let (r_, m, q) = (r as f64, rows as f64, cols as f64);
    let mut prod = 1.0;
    for i in 0..r {
        let i = i as f64;
        prod *= (1.0 - 2f64.powf(i - q)) * (1.0 - 2f64.powf(i - m)) / (1.0 - 2f64.powf(i - r_));
    }
    2f64.powf(r_ * (q + m - r_) - m * q) * prod
}
