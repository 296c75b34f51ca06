//! Block-wise two-universal hashing.
//!
//! The input is cut into `n`-bit blocks and each block is compressed to `l` bits
//! by a seeded binary convolution over GF(2):
//!
//! ```text
//! out[j] = XOR_{i < n} seed[j + i] & block[i],   0 <= j < l
//! ```
//!
//! i.e. multiplication by the `l x n` Toeplitz matrix built from `n + l - 1` seed
//! bits. For any two distinct blocks the outputs collide for exactly a `2^-l`
//! fraction of seeds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::bitstream::BitStream;
use crate::error::{Error, Result};

/// Shortest stream accepted by [`min_entropy_estimate`].
pub const MIN_ENTROPY_SAMPLE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractorConfig {
    /// Input block length (bits).
    pub n: usize,
    /// Output block length (bits).
    pub l: usize,
    /// `n + l - 1` seed bits.
    pub seed: BitStream,
    /// Security parameter exponent: epsilon = 2^-k.
    pub epsilon_exponent: u32,
}

impl ExtractorConfig {
    pub fn new(n: usize, l: usize, seed: BitStream, epsilon_exponent: u32) -> Result<Self> {
        let cfg = Self {
            n,
            l,
            seed,
            epsilon_exponent,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l >= self.n {
            return Err(Error::param("extractor.l", "must satisfy 0 < l < n"));
        }
        if self.seed.len() != self.n + self.l - 1 {
            return Err(Error::param(
                "extractor.seed",
                format!(
                    "needs exactly n + l - 1 = {} bits, got {}",
                    self.n + self.l - 1,
                    self.seed.len()
                ),
            ));
        }
        Ok(())
    }

    /// Short hex digest identifying the seed.
    pub fn seed_fingerprint(&self) -> String {
        fingerprint(&self.seed)
    }
}

/// First 16 hex digits of SHA-256 over the bit count and packed bits.
pub fn fingerprint(bits: &BitStream) -> String {
    let mut h = Sha256::new();
    h.update((bits.len() as u64).to_le_bytes());
    h.update(bits.as_bytes());
    hex16(&h.finalize())
}

fn hex16(digest: &[u8]) -> String {
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Most-common-value min-entropy per bit, `-log2 max(p0, p1)`.
pub fn min_entropy_estimate(bits: &BitStream) -> Result<f64> {
    if bits.len() < MIN_ENTROPY_SAMPLE {
        return Err(Error::TooShort {
            needed: MIN_ENTROPY_SAMPLE,
            got: bits.len(),
        });
    }
    let ones = bits.count_ones() as f64;
    let n = bits.len() as f64;
    let p_max = (ones / n).max(1.0 - ones / n);
    Ok(-p_max.log2())
}

/// Output block length from the leftover-hash bound `l = floor(n h - 2k)`.
pub fn choose_block_params(h_min: f64, n: usize, epsilon_exponent: u32) -> Result<usize> {
    if !(h_min > 0.0 && h_min <= 1.0) {
        return Err(Error::InsufficientEntropy {
            h_min,
            n,
            k: epsilon_exponent,
        });
    }
    if n == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    // the nudge absorbs representation error such as 1000 * 0.394 = 393.999...
    let l = (n as f64 * h_min - 2.0 * epsilon_exponent as f64 + 1e-9).floor();
    if l <= 0.0 {
        return Err(Error::InsufficientEntropy {
            h_min,
            n,
            k: epsilon_exponent,
        });
    }
    Ok((l as usize).min(n - 1))
}

/// Hash a single `n`-bit block to `l` bits.
pub fn seeded_hash_block(seed: &BitStream, block: &BitStream, l: usize) -> Result<BitStream> {
    let n = block.len();
    if l == 0 || n == 0 || seed.len() != n + l - 1 {
        return Err(Error::domain(format!(
            "seed must hold n + l - 1 bits (n={n}, l={l}), got {}",
            seed.len()
        )));
    }
    let hasher = ToeplitzHasher::new(seed, n, l);
    let words = pack_words(block, 0, n);
    let mut out = BitStream::with_capacity(l);
    for j in 0..l {
        out.push(hasher.output_bit(j, &words));
    }
    Ok(out)
}

/// Hash every full block of `bits` with the same seed and concatenate.
pub fn extract(bits: &BitStream, cfg: &ExtractorConfig) -> Result<BitStream> {
    cfg.validate()?;
    if bits.len() < cfg.n {
        return Err(Error::TooShort {
            needed: cfg.n,
            got: bits.len(),
        });
    }
    let blocks = bits.len() / cfg.n;
    let hasher = ToeplitzHasher::new(&cfg.seed, cfg.n, cfg.l);
    let hash = |k: usize| -> Vec<bool> {
        let words = pack_words(bits, k * cfg.n, cfg.n);
        (0..cfg.l).map(|j| hasher.output_bit(j, &words)).collect()
    };
    #[cfg(feature = "parallel")]
    let hashed: Vec<Vec<bool>> = (0..blocks).into_par_iter().map(hash).collect();
    #[cfg(not(feature = "parallel"))]
    let hashed: Vec<Vec<bool>> = (0..blocks).map(hash).collect();

    let mut out = BitStream::with_capacity(blocks * cfg.l);
    out.extend(hashed.into_iter().flatten());
    Ok(out)
}

/// Derive `n + l - 1` seed bits from the first `10 (n + l)` bits of a raw stream
/// (or the whole stream when shorter) by SHA-256 in counter mode.
pub fn derive_seed(raw: &BitStream, n: usize, l: usize) -> Result<BitStream> {
    if raw.is_empty() {
        return Err(Error::domain("cannot derive a seed from an empty stream"));
    }
    let prefix = raw.slice(0, raw.len().min(10 * (n + l)))?;
    let want = n + l - 1;
    let mut seed = BitStream::with_capacity(want);
    let mut counter: u32 = 0;
    while seed.len() < want {
        let mut h = Sha256::new();
        h.update(b"rtd-trng extractor seed");
        h.update((prefix.len() as u64).to_le_bytes());
        h.update(prefix.as_bytes());
        h.update(counter.to_be_bytes());
        let block = h.finalize();
        for byte in block.iter() {
            for shift in (0..8).rev() {
                if seed.len() < want {
                    seed.push(byte >> shift & 1 == 1);
                }
            }
        }
        counter += 1;
    }
    Ok(seed)
}

/// Packs bits `[start, start + len)` into little-endian words: bit `i` of the
/// range lands in word `i / 64` at position `i % 64`.
fn pack_words(bits: &BitStream, start: usize, len: usize) -> Vec<u64> {
    let mut words = vec![0u64; len.div_ceil(64)];
    let bytes = bits.as_bytes();
    for i in 0..len {
        let src = start + i;
        if bytes[src / 8] >> (7 - src % 8) & 1 == 1 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

/// Row `j` of the Toeplitz matrix is seed bits `[j, j + n)`; rows are packed
/// once so each output bit is a masked popcount.
struct ToeplitzHasher {
    rows: Vec<u64>,
    words: usize,
}

impl ToeplitzHasher {
    fn new(seed: &BitStream, n: usize, l: usize) -> Self {
        let words = n.div_ceil(64);
        let mut rows = Vec::with_capacity(l * words);
        for j in 0..l {
            rows.extend(pack_words(seed, j, n));
        }
        Self { rows, words }
    }

    #[inline]
    fn output_bit(&self, j: usize, block: &[u64]) -> bool {
        let row = &self.rows[j * self.words..(j + 1) * self.words];
        row.iter()
            .zip(block)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_rng;
    use proptest::prelude::*;
    use rand::Rng;

    /// Direct double loop, kept independent of the packed implementation.
    fn convolve(seed: &[u8], block: &[u8], l: usize) -> Vec<u8> {
        (0..l)
            .map(|j| {
                let mut acc = 0;
                for i in 0..block.len() {
                    acc ^= seed[j + i] & block[i];
                }
                acc
            })
            .collect()
    }

    fn random_bits(rng: &mut impl Rng, len: usize) -> BitStream {
        (0..len).map(|_| rng.random::<bool>()).collect()
    }

    #[test]
    fn small_convolution_by_hand() {
        // seed 10110, block 1101:
        // j=0: 1&1 ^ 0&1 ^ 1&0 ^ 1&1 = 0
        // j=1: 0&1 ^ 1&1 ^ 1&0 ^ 0&1 = 1
        let seed = BitStream::from_ascii("10110");
        let block = BitStream::from_ascii("1101");
        let out = seeded_hash_block(&seed, &block, 2).unwrap();
        assert_eq!(out.to_bits(), vec![0, 1]);
        assert_eq!(out.to_bits(), convolve(&seed.to_bits(), &block.to_bits(), 2));
    }

    #[test]
    fn zero_block_hashes_to_zero() {
        let mut rng = sim_rng(1);
        let seed = random_bits(&mut rng, 100 + 30 - 1);
        let zeros = BitStream::from_bits(&[0; 100]);
        assert_eq!(seeded_hash_block(&seed, &zeros, 30).unwrap().count_ones(), 0);
    }

    #[test]
    fn hash_is_linear() {
        let mut rng = sim_rng(2);
        let (n, l) = (200, 70);
        let seed = random_bits(&mut rng, n + l - 1);
        for _ in 0..100 {
            let x = random_bits(&mut rng, n);
            let y = random_bits(&mut rng, n);
            let xy: BitStream = x.iter().zip(y.iter()).map(|(a, b)| a ^ b).collect();
            let hx = seeded_hash_block(&seed, &x, l).unwrap();
            let hy = seeded_hash_block(&seed, &y, l).unwrap();
            let hxy = seeded_hash_block(&seed, &xy, l).unwrap();
            let sum: BitStream = hx.iter().zip(hy.iter()).map(|(a, b)| a ^ b).collect();
            assert_eq!(hxy, sum);
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let seed = BitStream::from_ascii("1011");
        let block = BitStream::from_ascii("1101");
        assert!(seeded_hash_block(&seed, &block, 2).is_err());
        assert!(ExtractorConfig::new(4, 4, BitStream::from_ascii("1111111"), 1).is_err());
        assert!(ExtractorConfig::new(4, 2, seed, 1).is_err());
    }

    #[test]
    fn extract_lengths() {
        let mut rng = sim_rng(3);
        let (n, l) = (64, 20);
        let cfg = ExtractorConfig::new(n, l, random_bits(&mut rng, n + l - 1), 4).unwrap();
        let one = random_bits(&mut rng, n);
        assert_eq!(extract(&one, &cfg).unwrap().len(), l);
        let more = random_bits(&mut rng, 2 * n + 3);
        let out = extract(&more, &cfg).unwrap();
        assert_eq!(out.len(), 2 * l);
        assert_eq!(out, extract(&more.slice(0, 2 * n).unwrap(), &cfg).unwrap());
        assert!(extract(&random_bits(&mut rng, n - 1), &cfg).is_err());
    }

    #[test]
    fn entropy_estimates() {
        let zeros = BitStream::from_bits(&[0; 2000]);
        assert_eq!(min_entropy_estimate(&zeros).unwrap(), 0.0);
        let balanced: BitStream = (0..2000).map(|i| i % 2 == 0).collect();
        assert_eq!(min_entropy_estimate(&balanced).unwrap(), 1.0);
        let skewed: BitStream = (0..2000).map(|i| i % 4 == 0).collect();
        assert!((min_entropy_estimate(&skewed).unwrap() - 0.415_037_499).abs() < 1e-8);
        assert!(min_entropy_estimate(&BitStream::from_bits(&[1; 999])).is_err());
    }

    #[test]
    fn block_sizing() {
        assert_eq!(choose_block_params(1.0, 1000, 64).unwrap(), 872);
        assert_eq!(choose_block_params(0.394, 1000, 32).unwrap(), 330);
        assert!(matches!(
            choose_block_params(0.05, 1000, 32),
            Err(Error::InsufficientEntropy { .. })
        ));
        assert!(choose_block_params(0.0, 1000, 32).is_err());
    }

    #[test]
    fn derived_seed_is_deterministic() {
        let mut rng = sim_rng(4);
        let raw = random_bits(&mut rng, 50_000);
        let a = derive_seed(&raw, 1000, 330).unwrap();
        assert_eq!(a.len(), 1329);
        assert_eq!(a, derive_seed(&raw, 1000, 330).unwrap());
        // bits past the prefix do not influence the seed
        let mut longer = raw.clone();
        longer.append(&random_bits(&mut rng, 100));
        assert_eq!(a, derive_seed(&longer, 1000, 330).unwrap());
        assert_eq!(fingerprint(&a).len(), 16);
    }

    proptest! {
        #[test]
        fn packed_hash_matches_double_loop(
            n in 1usize..150,
            l in 1usize..80,
            salt in any::<u64>(),
        ) {
            let mut rng = sim_rng(salt);
            let seed = random_bits(&mut rng, n + l - 1);
            let block = random_bits(&mut rng, n);
            let fast = seeded_hash_block(&seed, &block, l).unwrap().to_bits();
            prop_assert_eq!(fast, convolve(&seed.to_bits(), &block.to_bits(), l));
        }
    }
}
