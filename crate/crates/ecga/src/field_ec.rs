//! Prime-field arithmetic and the affine group law of short Weierstrass
//! curves `y^2 = x^3 + ax + b (mod p)`.
//!
//! Everything here is arbitrary precision (`BigUint`) and pure; nothing is
//! constant time. The module feeds the seed pipeline with the point stream
//! `G, 2G, 3G, ...` obtained by cumulative addition of the base point.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};

/// A canonical residue mod the ambient prime. Callers are responsible for
/// keeping values reduced; `CurveParams::new` reduces its inputs.
pub type FieldElement = BigUint;

/// A point of the curve in affine coordinates, or the group identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffinePoint {
    Finite { x: FieldElement, y: FieldElement },
    Infinity,
}

impl AffinePoint {
    pub fn finite(x: FieldElement, y: FieldElement) -> Self {
        AffinePoint::Finite { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, AffinePoint::Infinity)
    }
}

/// Parameters of a non-singular curve together with its base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveParams {
    p: BigUint,
    a: FieldElement,
    b: FieldElement,
    g: AffinePoint,
    name: String,
}

/// Multiplicative inverse of `x` mod the prime `p`, by the extended
/// Euclidean algorithm.
pub fn mod_inv(x: &BigUint, p: &BigUint) -> Result<BigUint> {
    let x = x % p;
    if x.is_zero() {
        return Err(Error::InverseOfZero);
    }
    let e = BigInt::from(x).extended_gcd(&BigInt::from(p.clone()));
    // x and a prime p are coprime, so e.gcd == 1 and e.x is the inverse.
    debug_assert!(e.gcd.is_one());
    Ok(e.x.mod_floor(&BigInt::from(p.clone())).to_biguint().unwrap())
}

impl CurveParams {
    /// Builds a curve, reducing `a` and `b` mod `p` and rejecting singular
    /// curves and base points that do not satisfy the curve equation.
    pub fn new(
        name: impl Into<String>,
        p: BigUint,
        a: BigUint,
        b: BigUint,
        gx: BigUint,
        gy: BigUint,
    ) -> Result<Self> {
        let name = name.into();
        let a = a % &p;
        let b = b % &p;
        // 4a^3 + 27b^2 != 0 (mod p)
        let disc = (4u32 * a.modpow(&BigUint::from(3u32), &p)
            + 27u32 * b.modpow(&BigUint::from(2u32), &p))
            % &p;
        if disc.is_zero() {
            return Err(Error::SingularCurve(name));
        }
        let g = AffinePoint::finite(gx % &p, gy % &p);
        let curve = CurveParams { p, a, b, g, name };
        if !curve.contains(&curve.g) {
            return Err(Error::BasePointOffCurve(curve.name));
        }
        Ok(curve)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    /// The base point `G`.
    pub fn base_point(&self) -> &AffinePoint {
        &self.g
    }

    /// Whether `pt` satisfies `y^2 = x^3 + ax + b (mod p)`. The point at
    /// infinity is on every curve.
    pub fn contains(&self, pt: &AffinePoint) -> bool {
        match pt {
            AffinePoint::Infinity => true,
            AffinePoint::Finite { x, y } => {
                let lhs = y.modpow(&BigUint::from(2u32), &self.p);
                let rhs = (x.modpow(&BigUint::from(3u32), &self.p) + &self.a * x + &self.b)
                    % &self.p;
                lhs == rhs
            }
        }
    }

    /// Group law `P +_g Q`: identity and inverse cases, tangent (doubling)
    /// case with slope `(3x^2 + a) / 2y`, chord case with slope
    /// `(y2 - y1) / (x2 - x1)`.
    pub fn point_add(&self, p: &AffinePoint, q: &AffinePoint) -> Result<AffinePoint> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::OffCurvePoint(self.name.clone()));
        }
        let (x1, y1) = match p {
            AffinePoint::Infinity => return Ok(q.clone()),
            AffinePoint::Finite { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            AffinePoint::Infinity => return Ok(p.clone()),
            AffinePoint::Finite { x, y } => (x, y),
        };
        let m = &self.p;
        let lambda = if x1 == x2 {
            if (y1 + y2) % m == BigUint::zero() {
                // Q = -P; also covers doubling a point with y = 0.
                return Ok(AffinePoint::Infinity);
            }
            let num = (3u32 * x1.modpow(&BigUint::from(2u32), m) + &self.a) % m;
            (num * mod_inv(&((2u32 * y1) % m), m)?) % m
        } else {
            let num = (m + y2 - y1) % m;
            let den = (m + x2 - x1) % m;
            (num * mod_inv(&den, m)?) % m
        };
        let x3 = (lambda.modpow(&BigUint::from(2u32), m) + 2u32 * m - x1 - x2) % m;
        let y3 = (&lambda * ((m + x1 - &x3) % m) + m - y1) % m;
        Ok(AffinePoint::finite(x3, y3))
    }

    /// Iterator over `G, 2G, 3G, ...` by cumulative addition. Yields an
    /// `OrderExhausted` error and stops if a multiple hits infinity.
    pub fn points(&self) -> PointStream<'_> {
        PointStream {
            curve: self,
            current: AffinePoint::Infinity,
            k: 0,
            done: false,
        }
    }

    /// The first `n` scalar multiples `[G, 2G, ..., nG]` of the base point.
    pub fn point_stream(&self, n: usize) -> Result<Vec<AffinePoint>> {
        self.points().take(n).collect()
    }
}

pub struct PointStream<'a> {
    curve: &'a CurveParams,
    current: AffinePoint,
    k: u64,
    done: bool,
}

impl Iterator for PointStream<'_> {
    type Item = Result<AffinePoint>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let next = match self.curve.point_add(&self.current, self.curve.base_point()) {
            Ok(pt) => pt,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        self.k += 1;
        if next.is_infinity() {
            self.done = true;
            return Some(Err(Error::OrderExhausted(self.k)));
        }
        self.current = next.clone();
        Some(Ok(next))
    }
}

// NIST P-256 parameters, decimal.
const P256: [&str; 5] = [
    "115792089210356248762697446949407573530086143415290314195533631308867097853951",
    "115792089210356248762697446949407573530086143415290314195533631308867097853948",
    "41058363725152142129326129780047268409114441015993725554835256314039467401291",
    "48439561293906451759052585252797914202762949526041747995844080717082404635286",
    "36134250956749795798585127919587881956611106672985015071877198253568414405109",
];

// NIST P-521 parameters, decimal.
const P521: [&str; 5] = [
    "6864797660130609714981900799081393217269435300143305409394463459185543183397656052122559640661454554977296311391480858037121987999716643812574028291115057151",
    "6864797660130609714981900799081393217269435300143305409394463459185543183397656052122559640661454554977296311391480858037121987999716643812574028291115057148",
    "1093849038073734274511112390766805569936207598951683748994586394495953116150735016013708737573759623248592132296706313309438452531591012912142327488478985984",
    "2661740802050217063228768716723360960729859168756973147706671368418802944996427808491545080627771902352094241225065558662157113545570916814161637315895999846",
    "3757180025770020463545507224491183603594455134769762486694567779615544477440556316691234405012945539562144444537289428522585666729196580810124344277578376784",
];

fn dec(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 10).expect("valid decimal constant")
}

/// Looks up one of the built-in curves: `"p256"` or `"p521"`.
pub fn by_name(name: &str) -> Result<CurveParams> {
    let c = match name {
        "p256" => P256,
        "p521" => P521,
        _ => return Err(Error::UnknownCurve(name.to_string())),
    };
    CurveParams::new(name, dec(c[0]), dec(c[1]), dec(c[2]), dec(c[3]), dec(c[4]))
}

#[derive(Deserialize)]
struct CurveFile {
    name: Option<String>,
    p: String,
    a: String,
    b: String,
    gx: String,
    gy: String,
}

fn parse_big(s: &str) -> Result<BigUint> {
    let s = s.trim();
    let (digits, radix) = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => (h, 16),
        None => (s, 10),
    };
    BigUint::parse_bytes(digits.as_bytes(), radix)
        .ok_or_else(|| Error::InvalidCurveFile(format!("not a base-{radix} integer: {s}")))
}

/// Loads a custom curve from a TOML file with string fields `p`, `a`, `b`,
/// `gx`, `gy` (decimal, or hexadecimal with a `0x` prefix) and an optional
/// `name`.
pub fn from_file(path: &Path) -> Result<CurveParams> {
    let text = std::fs::read_to_string(path)?;
    let f: CurveFile =
        toml::from_str(&text).map_err(|e| Error::InvalidCurveFile(e.to_string()))?;
    let name = f.name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_string())
    });
    CurveParams::new(
        name,
        parse_big(&f.p)?,
        parse_big(&f.a)?,
        parse_big(&f.b)?,
        parse_big(&f.gx)?,
        parse_big(&f.gy)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf23() -> CurveParams {
        // y^2 = x^3 + x + 1 over GF(23), base point (3, 10); 28 points total.
        CurveParams::new(
            "gf23",
            BigUint::from(23u32),
            BigUint::from(1u32),
            BigUint::from(1u32),
            BigUint::from(3u32),
            BigUint::from(10u32),
        )
        .unwrap()
    }

    #[test]
    fn mod_inv_identity_and_self_inverse() {
        let p = BigUint::from(23u32);
        assert_eq!(mod_inv(&BigUint::one(), &p).unwrap(), BigUint::one());
        // (p-1)^2 = 1
        let pm1 = &p - 1u32;
        assert_eq!(mod_inv(&pm1, &p).unwrap(), pm1);
    }

    #[test]
    fn mod_inv_matches_brute_force() {
        let p = BigUint::from(23u32);
        let x = BigUint::from(3u32);
        let expected = (1u32..23)
            .find(|z| (3 * z) % 23 == 1)
            .map(BigUint::from)
            .unwrap();
        assert_eq!(expected, BigUint::from(8u32));
        assert_eq!(mod_inv(&x, &p).unwrap(), expected);
    }

    #[test]
    fn mod_inv_zero_rejected() {
        let p = BigUint::from(23u32);
        assert!(matches!(
            mod_inv(&BigUint::zero(), &p),
            Err(Error::InverseOfZero)
        ));
    }

    #[test]
    fn mod_inv_random_roundtrip() {
        use rand::Rng;
        let mut rng = rand_pcg::Pcg64::new(7, 0);
        for curve in [by_name("p256").unwrap(), by_name("p521").unwrap()] {
            let p = curve.p();
            let bits = p.bits();
            for _ in 0..500 {
                let bytes: Vec<u8> = (0..(bits / 8 + 1)).map(|_| rng.gen()).collect();
                let x = BigUint::from_bytes_be(&bytes) % p;
                if x.is_zero() {
                    continue;
                }
                let inv = mod_inv(&x, p).unwrap();
                assert!((x * inv) % p == BigUint::one());
            }
        }
    }

    /// Every affine point of the GF(23) toy curve, by exhaustive search.
    fn gf23_points() -> Vec<AffinePoint> {
        let mut pts = Vec::new();
        for x in 0u32..23 {
            for y in 0u32..23 {
                if (y * y) % 23 == (x * x * x + x + 1) % 23 {
                    pts.push(AffinePoint::finite(BigUint::from(x), BigUint::from(y)));
                }
            }
        }
        pts
    }

    #[test]
    fn toy_curve_has_27_affine_points() {
        // 28 points including infinity.
        assert_eq!(gf23_points().len(), 27);
    }

    #[test]
    fn point_add_identity_and_inverse() {
        let c = gf23();
        let p = c.base_point().clone();
        assert_eq!(c.point_add(&p, &AffinePoint::Infinity).unwrap(), p);
        assert_eq!(c.point_add(&AffinePoint::Infinity, &p).unwrap(), p);
        let neg = AffinePoint::finite(BigUint::from(3u32), BigUint::from(13u32));
        assert_eq!(c.point_add(&p, &neg).unwrap(), AffinePoint::Infinity);
    }

    #[test]
    fn point_add_worked_example() {
        let c = gf23();
        let p = AffinePoint::finite(BigUint::from(3u32), BigUint::from(10u32));
        let q = AffinePoint::finite(BigUint::from(9u32), BigUint::from(7u32));
        let r = c.point_add(&p, &q).unwrap();
        assert_eq!(
            r,
            AffinePoint::finite(BigUint::from(17u32), BigUint::from(20u32))
        );
        assert!(c.contains(&r));
    }

    #[test]
    fn point_add_rejects_off_curve_input() {
        let c = gf23();
        let bogus = AffinePoint::finite(BigUint::from(1u32), BigUint::from(1u32));
        assert!(matches!(
            c.point_add(&bogus, c.base_point()),
            Err(Error::OffCurvePoint(_))
        ));
    }

    #[test]
    fn point_add_closed_commutative_associative() {
        let c = gf23();
        let pts = gf23_points();
        for p in &pts {
            for q in &pts {
                let pq = c.point_add(p, q).unwrap();
                assert!(c.contains(&pq));
                assert_eq!(pq, c.point_add(q, p).unwrap());
            }
        }
        // Associativity over sampled triples.
        for (i, p) in pts.iter().enumerate() {
            let q = &pts[(i * 7 + 3) % pts.len()];
            let r = &pts[(i * 11 + 5) % pts.len()];
            let left = c.point_add(&c.point_add(p, q).unwrap(), r).unwrap();
            let right = c.point_add(p, &c.point_add(q, r).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn singular_curve_rejected() {
        // y^2 = x^3 has a cusp at the origin.
        let r = CurveParams::new(
            "cusp",
            BigUint::from(23u32),
            BigUint::zero(),
            BigUint::zero(),
            BigUint::from(1u32),
            BigUint::from(1u32),
        );
        assert!(matches!(r, Err(Error::SingularCurve(_))));
    }

    #[test]
    fn off_curve_base_point_rejected() {
        let r = CurveParams::new(
            "bad",
            BigUint::from(23u32),
            BigUint::from(1u32),
            BigUint::from(1u32),
            BigUint::from(2u32),
            BigUint::from(2u32),
        );
        assert!(matches!(r, Err(Error::BasePointOffCurve(_))));
    }

    /// Double-and-add scalar multiplication, independent of the cumulative
    /// addition used by `point_stream`.
    pub(crate) fn double_and_add(c: &CurveParams, mut k: u64) -> AffinePoint {
        let mut acc = AffinePoint::Infinity;
        let mut base = c.base_point().clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = c.point_add(&acc, &base).unwrap();
            }
            base = c.point_add(&base, &base).unwrap();
            k >>= 1;
        }
        acc
    }

    #[test]
    fn point_stream_starts_at_base_point() {
        let c = gf23();
        let s = c.point_stream(1).unwrap();
        assert_eq!(s, vec![c.base_point().clone()]);
    }

    #[test]
    fn point_stream_matches_double_and_add_on_toy_curve() {
        let c = gf23();
        // The subgroup of (3, 10) has some order d <= 28; stay below it.
        let stream = c.point_stream(6).unwrap();
        for (i, pt) in stream.iter().enumerate() {
            assert!(c.contains(pt));
            assert_eq!(*pt, double_and_add(&c, i as u64 + 1));
        }
    }

    #[test]
    fn point_stream_reports_order_exhaustion() {
        let c = gf23();
        // Walk until the stream ends; the last item must be OrderExhausted.
        let all: Vec<_> = c.points().collect();
        assert!(matches!(all.last(), Some(Err(Error::OrderExhausted(_)))));
        let order = all.len() as u64;
        assert!(c.point_stream(order as usize - 1).is_ok());
        assert!(c.point_stream(order as usize).is_err());
    }

    #[test]
    fn registry_curves_are_valid_and_distinct() {
        let c256 = by_name("p256").unwrap();
        let c521 = by_name("p521").unwrap();
        assert_eq!(c256.p().bits(), 256);
        assert_eq!(c521.p().bits(), 521);
        assert!(c256.contains(c256.base_point()));
        assert!(c521.contains(c521.base_point()));
        assert!(by_name("p128").is_err());
    }

    #[test]
    fn curve_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.toml");
        std::fs::write(
            &path,
            "name = \"toy\"\np = \"23\"\na = \"0x1\"\nb = \"1\"\ngx = \"3\"\ngy = \"10\"\n",
        )
        .unwrap();
        let c = from_file(&path).unwrap();
        assert_eq!(c.name(), "toy");
        assert_eq!(c.p(), &BigUint::from(23u32));
        assert!(c.contains(c.base_point()));
    }
}
