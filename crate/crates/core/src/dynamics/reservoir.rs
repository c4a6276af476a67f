use rand::RngCore;
use rand_chacha::ChaCha8Rng;

/// Minimum number of binary digits held ahead of the read position.
pub const RESERVOIR_LOOKAHEAD: u32 = 128;

/// Exact binary expansion of a point in `[0, 1]`, most significant digit first.
///
/// Three 64-bit words are buffered, so at least 129 digits are always available
/// past the read position. When the front word is exhausted the tail is refilled
/// from the PRNG; a reservoir built with [`BitReservoir::from_words`] has an
/// all-zero tail instead, which makes it represent a dyadic rational exactly.
///
/// Tent-map complements are applied lazily through `flip`: the represented digit
/// at any position is the stored digit XOR `flip`. Complementing fresh PRNG bits
/// does not change their distribution, so the flag is never materialized.
#[derive(Debug, Clone)]
pub struct BitReservoir {
    words: [u64; 3],
    offset: u32,
    flip: bool,
    source: Option<ChaCha8Rng>,
}

impl BitReservoir {
    /// A Lebesgue-random point whose expansion is drawn from `rng`.
    pub fn from_rng(mut rng: ChaCha8Rng) -> Self {
        let words = [rng.next_u64(), rng.next_u64(), rng.next_u64()];
        BitReservoir {
            words,
            offset: 0,
            flip: false,
            source: Some(rng),
        }
    }

    /// A point with up to three given leading words and an all-zero tail.
    pub fn from_words(leading: &[u64]) -> Self {
        assert!(leading.len() <= 3, "at most three leading words");
        let mut words = [0u64; 3];
        for (dst, src) in words.iter_mut().zip(leading) {
            *dst = *src;
        }
        BitReservoir {
            words,
            offset: 0,
            flip: false,
            source: None,
        }
    }

    /// The dyadic rational `numerator / 2^64` with an all-zero tail.
    pub fn from_fraction(numerator: u64) -> Self {
        Self::from_words(&[numerator])
    }

    #[inline]
    fn raw_head(&self) -> u64 {
        if self.offset == 0 {
            self.words[0]
        } else {
            (self.words[0] << self.offset) | (self.words[1] >> (64 - self.offset))
        }
    }

    /// The leading 64 represented digits as a fraction of `2^64`.
    #[inline]
    pub fn head(&self) -> u64 {
        if self.flip {
            !self.raw_head()
        } else {
            self.raw_head()
        }
    }

    /// Whether every represented digit past the buffer is complemented.
    pub fn is_complemented(&self) -> bool {
        self.flip
    }

    /// Represented value rounded to `f64`.
    #[inline]
    pub fn value(&self) -> f64 {
        self.head() as f64 * (1.0 / 18_446_744_073_709_551_616.0)
    }

    /// Digits currently available past the read position.
    pub fn lookahead(&self) -> u32 {
        192 - self.offset
    }

    #[inline]
    fn leading_digit(&self) -> bool {
        ((self.words[0] << self.offset) >> 63 == 1) ^ self.flip
    }

    #[inline]
    fn shift(&mut self) {
        self.offset += 1;
        if self.offset == 64 {
            self.words[0] = self.words[1];
            self.words[1] = self.words[2];
            self.words[2] = self.next_word();
            self.offset = 0;
        }
    }

    fn next_word(&mut self) -> u64 {
        self.source.as_mut().map_or(0, |rng| rng.next_u64())
    }

    /// `x ↦ 2x mod 1`: drop the leading digit.
    #[inline]
    pub fn doubling_step(&mut self) {
        self.shift();
    }

    /// Tent map: drop the leading digit, and complement the remainder if it was 1.
    #[inline]
    pub fn tent_step(&mut self) {
        let lead = self.leading_digit();
        self.shift();
        if lead {
            self.flip = !self.flip;
        }
    }
}
