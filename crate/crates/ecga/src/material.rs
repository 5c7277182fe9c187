//! Bit-level seed material: minimal binary encodings of point coordinates,
//! SHA-256 digests of the image and the curve parameters, three-way
//! interleaving, concatenation, and the keyed XOR mask stream.

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// An ordered sequence of bits with an explicit length. Bits are stored one
/// per byte (values 0 or 1); lengths here are a few thousand bits at most.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitString { bits }
    }

    /// Parses a string of '0'/'1' characters. Test and display helper.
    pub fn from_str01(s: &str) -> Self {
        BitString {
            bits: s
                .bytes()
                .map(|c| match c {
                    b'0' => 0,
                    b'1' => 1,
                    _ => panic!("bit strings may only contain '0' and '1'"),
                })
                .collect(),
        }
    }

    /// All bits of `bytes`, MSB first within each byte.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for i in (0..8).rev() {
                bits.push((byte >> i) & 1);
            }
        }
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn to_string01(&self) -> String {
        self.bits.iter().map(|&b| char::from(b'0' + b)).collect()
    }
}

/// A SHA-256 digest viewed as a 256-bit string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashDigest {
    bits: BitString,
}

impl HashDigest {
    fn from_digest(bytes: &[u8; 32]) -> Self {
        HashDigest {
            bits: BitString::from_bytes_msb(bytes),
        }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, chunk) in self.bits.as_slice().chunks(8).enumerate() {
            out[i] = chunk.iter().fold(0, |acc, &b| (acc << 1) | b);
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

/// Minimal MSB-first binary representation of `x`; zero encodes as the
/// single bit "0".
pub fn to_bits(x: &BigUint) -> BitString {
    if x.is_zero() {
        return BitString::from_bits(vec![0]);
    }
    let total = x.bits();
    let bits = (0..total).rev().map(|i| u8::from(x.bit(i))).collect();
    BitString::from_bits(bits)
}

/// Minimal big-endian byte encoding of `x`; zero encodes as one 0x00 byte.
pub fn int_to_bytes(x: &BigUint) -> Vec<u8> {
    if x.is_zero() {
        vec![0]
    } else {
        x.to_bytes_be()
    }
}

/// SHA-256 of the row-major raw pixel bytes. Container headers never enter
/// the hash, so identical pixels in different file formats seed identically.
pub fn hash_image(pixels: &[u8]) -> Result<HashDigest> {
    if pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    let digest = Sha256::digest(pixels);
    Ok(HashDigest::from_digest(&digest.into()))
}

/// SHA-256 of the minimal big-endian byte encoding of `x`.
pub fn hash_integer(x: &BigUint) -> HashDigest {
    let digest = Sha256::digest(int_to_bytes(x));
    HashDigest::from_digest(&digest.into())
}

/// Alternating three-way merge `h1_1, mid_1, h2_1, h1_2, mid_2, h2_2, ...`
/// truncated to the shortest input; output length is three times that.
pub fn interleave3(h1: &BitString, mid: &BitString, h2: &BitString) -> Result<BitString> {
    if h1.is_empty() || mid.is_empty() || h2.is_empty() {
        return Err(Error::EmptyBitString);
    }
    let l = h1.len().min(mid.len()).min(h2.len());
    let mut bits = Vec::with_capacity(3 * l);
    for i in 0..l {
        bits.push(h1.as_slice()[i]);
        bits.push(mid.as_slice()[i]);
        bits.push(h2.as_slice()[i]);
    }
    Ok(BitString::from_bits(bits))
}

/// `x` followed by `y`.
pub fn concat(x: &BitString, y: &BitString) -> BitString {
    let mut bits = Vec::with_capacity(x.len() + y.len());
    bits.extend_from_slice(x.as_slice());
    bits.extend_from_slice(y.as_slice());
    BitString::from_bits(bits)
}

/// Bitwise XOR of two equal-length bit strings.
pub fn xor_mask(x: &BitString, z: &BitString) -> Result<BitString> {
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    let bits = x
        .as_slice()
        .iter()
        .zip(z.as_slice())
        .map(|(a, b)| a ^ b)
        .collect();
    Ok(BitString::from_bits(bits))
}

/// Deterministic expansion of a key into an unbounded bit stream:
/// `SHA-256(seed || counter)` for counter = 0, 1, 2, ... with the counter as
/// eight big-endian bytes. Realizes the mask sequence consumed by
/// [`xor_mask`] across all points of a run.
#[derive(Clone, Debug)]
pub struct MaskExpander {
    seed: Vec<u8>,
    counter: u64,
    buffer: Vec<u8>,
    consumed: usize,
}

impl MaskExpander {
    /// The seed carries the key material and must hold at least 256 bits.
    pub fn new(seed: &[u8]) -> Result<Self> {
        if seed.len() < 32 {
            return Err(Error::SeedTooShort(seed.len()));
        }
        Ok(MaskExpander {
            seed: seed.to_vec(),
            counter: 0,
            buffer: Vec::new(),
            consumed: 0,
        })
    }

    /// Next `n` bits of the stream. Emitting n then n' bits equals emitting
    /// n + n' bits and splitting.
    pub fn mask_bits(&mut self, n: usize) -> BitString {
        while self.buffer.len() - self.consumed < n {
            let mut hasher = Sha256::new();
            hasher.update(&self.seed);
            hasher.update(self.counter.to_be_bytes());
            let block: [u8; 32] = hasher.finalize().into();
            self.counter += 1;
            self.buffer
                .extend_from_slice(BitString::from_bytes_msb(&block).as_slice());
            if self.consumed > 0 {
                self.buffer.drain(..self.consumed);
                self.consumed = 0;
            }
        }
        let bits = self.buffer[self.consumed..self.consumed + n].to_vec();
        self.consumed += n;
        BitString::from_bits(bits)
    }
}
