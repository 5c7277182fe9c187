//! Assembly of the initial image-dependent sequence: per-point binary
//! material is decimalized into symbols, accumulated across the point
//! stream, and passed through an affine sliding-window recurrence.

use crate::error::{Error, Result};
use crate::field_ec::{AffinePoint, CurveParams};
use crate::material::{
    concat, hash_image, hash_integer, interleave3, to_bits, BitString, HashDigest, MaskExpander,
};

/// A sequence of symbols in `[0, 2^m - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    symbols: Vec<u16>,
    m: u8,
}

impl Sequence {
    pub fn new(symbols: Vec<u16>, m: u8) -> Result<Self> {
        if m == 0 || m > 16 {
            return Err(Error::InvalidSymbolWidth(m));
        }
        if m < 16 {
            let limit = 1u32 << m;
            if let Some(&bad) = symbols.iter().find(|&&s| u32::from(s) >= limit) {
                return Err(Error::SymbolOutOfRange { symbol: bad, m });
            }
        }
        Ok(Sequence { symbols, m })
    }

    /// Interprets raw bytes as an 8-bit symbol sequence.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Sequence {
            symbols: bytes.iter().map(|&b| u16::from(b)).collect(),
            m: 8,
        }
    }

    /// One byte per symbol; only valid for m = 8.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.m != 8 {
            return Err(Error::InvalidSymbolWidth(self.m));
        }
        Ok(self.symbols.iter().map(|&s| s as u8).collect())
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of distinct symbol values, i.e. the alphabet size `2^m`.
    pub fn alphabet_size(&self) -> usize {
        1usize << self.m
    }
}

/// Everything that determines a generation run. All fields are key material
/// except `m` and `target_length`.
#[derive(Clone, Debug)]
pub struct GenerationConfig {
    pub image: Vec<u8>,
    pub curve: CurveParams,
    pub phi: u16,
    pub psi: u16,
    pub varphi: u16,
    pub bz_seed: Vec<u8>,
    pub m: u8,
    pub target_length: usize,
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.image.is_empty() {
            return Err(Error::EmptyImage);
        }
        if self.phi == 0 || self.psi == 0 || self.varphi == 0 {
            return Err(Error::InvalidTriplet);
        }
        if self.bz_seed.len() < 32 {
            return Err(Error::SeedTooShort(self.bz_seed.len()));
        }
        if self.m == 0 || self.m > 16 {
            return Err(Error::InvalidSymbolWidth(self.m));
        }
        // The optimizer's crossover needs room for the whole alphabet.
        if self.target_length < 1usize << self.m {
            return Err(Error::SequenceTooShort {
                len: self.target_length,
                min: 1usize << self.m,
            });
        }
        Ok(())
    }
}

/// Splits `b` into consecutive m-bit segments, MSB first within each
/// segment, and reads each as a symbol; trailing bits are discarded.
pub fn decimalize(b: &BitString, m: u8) -> Result<Sequence> {
    if m == 0 || m > 16 {
        return Err(Error::InvalidSymbolWidth(m));
    }
    let m_usize = usize::from(m);
    let t = b.len() / m_usize;
    let mut symbols = Vec::with_capacity(t);
    for chunk in b.as_slice().chunks_exact(m_usize) {
        symbols.push(chunk.iter().fold(0u16, |acc, &bit| (acc << 1) | u16::from(bit)));
    }
    Ok(Sequence { symbols, m })
}

/// Binary material of a single point: the x coordinate interleaved with the
/// digests of `a` and `b`, the y coordinate interleaved with the digests of
/// the image and `p`, concatenated and XORed with the next mask bits.
fn point_material(
    point: &AffinePoint,
    h_image: &HashDigest,
    h_a: &HashDigest,
    h_b: &HashDigest,
    h_p: &HashDigest,
    mask: &mut MaskExpander,
) -> Result<BitString> {
    let (x, y) = match point {
        AffinePoint::Finite { x, y } => (x, y),
        AffinePoint::Infinity => unreachable!("point stream never yields infinity"),
    };
    let bx = interleave3(h_a.bits(), &to_bits(x), h_b.bits())?;
    let by = interleave3(h_image.bits(), &to_bits(y), h_p.bits())?;
    let joined = concat(&bx, &by);
    let z = mask.mask_bits(joined.len());
    crate::material::xor_mask(&joined, &z)
}

/// Runs the per-point pipeline over as many points as needed to accumulate
/// `target_length + 1` symbols (the extra symbol feeds the sliding window of
/// [`affine_combine`]), then truncates to exactly that count.
pub fn assemble_delta(cfg: &GenerationConfig) -> Result<Sequence> {
    cfg.validate()?;
    let h_image = hash_image(&cfg.image)?;
    let h_a = hash_integer(cfg.curve.a());
    let h_b = hash_integer(cfg.curve.b());
    let h_p = hash_integer(cfg.curve.p());
    let mut mask = MaskExpander::new(&cfg.bz_seed)?;

    let needed = cfg.target_length + 1;
    let mut symbols: Vec<u16> = Vec::with_capacity(needed + 512);
    for point in cfg.curve.points() {
        let point = point?;
        let bits = point_material(&point, &h_image, &h_a, &h_b, &h_p, &mut mask)?;
        symbols.extend_from_slice(decimalize(&bits, cfg.m)?.symbols());
        if symbols.len() >= needed {
            break;
        }
    }
    symbols.truncate(needed);
    Ok(Sequence {
        symbols,
        m: cfg.m,
    })
}

/// The affine recurrence `out_i = (phi * d_i + psi * d_{i+1} + varphi)
/// mod 2^m`; output is one element shorter than the input.
pub fn affine_combine(d: &Sequence, phi: u16, psi: u16, varphi: u16) -> Result<Sequence> {
    if d.len() < 2 {
        return Err(Error::SequenceTooShort {
            len: d.len(),
            min: 2,
        });
    }
    let modulus = 1u64 << d.m;
    let (phi, psi, varphi) = (
        u64::from(phi) % modulus,
        u64::from(psi) % modulus,
        u64::from(varphi) % modulus,
    );
    let symbols = d
        .symbols
        .windows(2)
        .map(|w| ((phi * u64::from(w[0]) + psi * u64::from(w[1]) + varphi) % modulus) as u16)
        .collect();
    Ok(Sequence {
        symbols,
        m: d.m,
    })
}

/// The full stage-one pipeline; output length is exactly
/// `cfg.target_length`.
pub fn generate_initial(cfg: &GenerationConfig) -> Result<Sequence> {
    let delta = assemble_delta(cfg)?;
    affine_combine(&delta, cfg.phi, cfg.psi, cfg.varphi)
}
