//! Exact arithmetic in ℚ(ζ_c).
//!
//! A [`CycNum`] is a vector of φ(c) rationals: the coordinates in the power
//! basis {ζ_c^i : 0 ≤ i < φ(c)} of ℚ[x]/Φ_c. That basis spans the full ring
//! of integers of the field, which is what makes the p-integrality test
//! honest: an element is integral at every place over p exactly when all of
//! its coordinate denominators are coprime to p — no prime splitting needed.
//!
//! Half-integral valuation thresholds (the G^k normalizations have
//! v(G) = 1/2) reduce to integral ones by multiplying through by the
//! quadratic Gauss sum once, since G² = ±p makes v(G) = 1/2 exact at every
//! place over p.
//!
//! Conductor coercion only travels along divisibility, ζ_c ↦ ζ_{c'}^{c'/c};
//! the fields in play are ℚ(ζ_p), ℚ(ζ_m) and ℚ(ζ_{pm}), so lcm-lifting two
//! operands is always available when it is meaningful.

mod poly;

pub use poly::{divides_unity_pow, poly_gcd, squarefree_part, CycPoly};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, euler_phi, BigRat};
use crate::error::{Error, Result};

fn phi_poly(c: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(c)
        .or_insert_with(|| Arc::new(arith::cyclotomic_poly(c)))
        .clone()
}

// ---------------------------------------------------------------------------
// dense rational polynomials (ascending coefficients), private helpers
// ---------------------------------------------------------------------------

fn rp_trim(v: &mut Vec<BigRat>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn rp_mul(a: &[BigRat], b: &[BigRat]) -> Vec<BigRat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    rp_trim(&mut out);
    out
}

/// Euclidean division; divisor must be non-zero (trimmed, non-empty).
fn rp_divmod(num: &[BigRat], den: &[BigRat]) -> (Vec<BigRat>, Vec<BigRat>) {
    let dd = den.len() - 1;
    let lead = &den[dd];
    let mut rem: Vec<BigRat> = num.to_vec();
    rp_trim(&mut rem);
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRat::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        if rem[i + dd].is_zero() {
            continue;
        }
        let c = &rem[i + dd] / lead;
        for j in 0..=dd {
            let t = &c * &den[j];
            rem[i + j] -= t;
        }
        quot[i] = c;
    }
    rp_trim(&mut rem);
    rp_trim(&mut quot);
    (quot, rem)
}

/// Extended Euclid modulo m: returns (g, u) with u·a ≡ g (mod m), g = gcd(a, m).
fn rp_ext_gcd(a: &[BigRat], m: &[BigRat]) -> (Vec<BigRat>, Vec<BigRat>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rp_trim(&mut r0);
    rp_trim(&mut r1);
    let mut u0: Vec<BigRat> = Vec::new();
    let mut u1: Vec<BigRat> = vec![BigRat::one()];
    while !r1.is_empty() {
        let (q, r2) = rp_divmod(&r0, &r1);
        let qu1 = rp_mul(&q, &u1);
        let mut u2 = u0.clone();
        if u2.len() < qu1.len() {
            u2.resize(qu1.len(), BigRat::zero());
        }
        for (i, x) in qu1.iter().enumerate() {
            u2[i] -= x;
        }
        rp_trim(&mut u2);
        r0 = std::mem::replace(&mut r1, r2);
        u0 = std::mem::replace(&mut u1, u2);
    }
    (r0, u0)
}

// ---------------------------------------------------------------------------
// CycNum
// ---------------------------------------------------------------------------

/// An element of ℚ(ζ_c), stored as exact coordinates in the power basis
/// {ζ_c^i : 0 ≤ i < φ(c)}. The representation is the unique normal form
/// (fully reduced mod Φ_c), so `Eq` is field equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycNum {
    conductor: u64,
    coords: Vec<BigRat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl CycNum {
    pub fn zero(c: u64) -> CycNum {
        assert!(c >= 1, "conductor must be positive");
        CycNum {
            conductor: c,
            coords: vec![BigRat::zero(); euler_phi(c) as usize],
        }
    }

    pub fn one(c: u64) -> CycNum {
        Self::from_rat(c, BigRat::one())
    }

    pub fn from_rat(c: u64, r: BigRat) -> CycNum {
        let mut z = Self::zero(c);
        z.coords[0] = r;
        z
    }

    pub fn from_int(c: u64, n: i64) -> CycNum {
        Self::from_rat(c, BigRat::from(BigInt::from(n)))
    }

    /// ζ_c^j (j taken mod c), reduced to the power basis.
    pub fn root_of_unity(c: u64, j: u64) -> CycNum {
        let j = (j % c) as usize;
        let mut counts = vec![BigInt::zero(); j + 1];
        counts[j] = BigInt::one();
        Self::from_exponent_counts(c, &counts)
    }

    /// Σ_j counts[j]·ζ_c^j, reduced mod Φ_c. The reduction stays in integer
    /// arithmetic (Φ_c is monic over ℤ); this is the workhorse behind every
    /// character sum, which accumulates integer counts per exponent first.
    pub fn from_exponent_counts(c: u64, counts: &[BigInt]) -> CycNum {
        assert!(c >= 1, "conductor must be positive");
        let modulus = phi_poly(c);
        let deg = modulus.len() - 1;
        let mut rem: Vec<BigInt> = counts.to_vec();
        if rem.len() > deg {
            for i in (deg..rem.len()).rev() {
                if rem[i].is_zero() {
                    continue;
                }
                let lead = std::mem::take(&mut rem[i]);
                for j in 0..deg {
                    let t = &lead * &modulus[j];
                    rem[i - deg + j] -= t;
                }
            }
        }
        rem.resize(deg, BigInt::zero());
        CycNum {
            conductor: c,
            coords: rem.into_iter().map(BigRat::from).collect(),
        }
    }

    /// Reduce an arbitrary coefficient vector (powers of ζ_c beyond the
    /// basis allowed) into normal form.
    pub fn from_coeff_poly(c: u64, coeffs: Vec<BigRat>) -> CycNum {
        assert!(c >= 1, "conductor must be positive");
        let modulus = phi_poly(c);
        let m_rat: Vec<BigRat> = modulus.iter().cloned().map(BigRat::from).collect();
        let mut v = coeffs;
        rp_trim(&mut v);
        let deg = m_rat.len() - 1;
        let rem = if v.len() > deg {
            rp_divmod(&v, &m_rat).1
        } else {
            v
        };
        let mut coords = rem;
        coords.resize(deg, BigRat::zero());
        CycNum {
            conductor: c,
            coords,
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coordinates in the power basis; length euler_phi(conductor).
    pub fn coords(&self) -> &[BigRat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRat> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check_same(&self, other: &CycNum) -> Result<()> {
        if self.conductor == other.conductor {
            Ok(())
        } else {
            Err(Error::ConductorMismatch {
                left: self.conductor,
                right: other.conductor,
            })
        }
    }

    pub fn add(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum {
            conductor: self.conductor,
            coords,
        })
    }

    pub fn sub(&self, other: &CycNum) -> Result<CycNum> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, r: &BigRat) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coords: self.coords.iter().map(|a| a * r).collect(),
        }
    }

    pub fn mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same(other)?;
        let prod = rp_mul(&self.coords, &other.coords);
        Ok(Self::from_coeff_poly(self.conductor, prod))
    }

    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero {
                conductor: self.conductor,
            });
        }
        let modulus = phi_poly(self.conductor);
        let m_rat: Vec<BigRat> = modulus.iter().cloned().map(BigRat::from).collect();
        let (g, u) = rp_ext_gcd(&self.coords, &m_rat);
        // Φ_c is irreducible over ℚ, so the gcd with any non-zero residue
        // is a non-zero constant.
        debug_assert_eq!(g.len(), 1);
        let ginv = BigRat::one() / g[0].clone();
        let inv: Vec<BigRat> = u.iter().map(|x| x * &ginv).collect();
        Ok(Self::from_coeff_poly(self.conductor, inv))
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: u64) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one(self.conductor);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same conductor");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same conductor");
            }
        }
        acc
    }

    /// Lift along ζ_c ↦ ζ_{c'}^{c'/c}; only defined when c | c'.
    pub fn lift_to(&self, target: u64) -> Result<CycNum> {
        if target == self.conductor {
            return Ok(self.clone());
        }
        if target == 0 || target % self.conductor != 0 {
            return Err(Error::BadLift {
                from: self.conductor,
                target,
            });
        }
        let stride = (target / self.conductor) as usize;
        let mut coeffs = vec![BigRat::zero(); (self.coords.len() - 1) * stride + 1];
        for (i, c) in self.coords.iter().enumerate() {
            coeffs[i * stride] = c.clone();
        }
        Ok(Self::from_coeff_poly(target, coeffs))
    }

    /// Coordinates as "num/den" strings (the JSON wire format).
    pub fn coord_strings(&self) -> Vec<String> {
        self.coords
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "conductor": self.conductor,
            "coords": self.coord_strings(),
        })
    }
}

pub fn cyc_arith(a: &CycNum, b: &CycNum, op: CycOp) -> Result<CycNum> {
    match op {
        CycOp::Add => a.add(b),
        CycOp::Sub => a.sub(b),
        CycOp::Mul => a.mul(b),
        CycOp::Div => a.div(b),
    }
}

/// Lift both operands to the lcm of their conductors (each lift runs along
/// divisibility, which is the only coercion the representation supports).
pub fn unify_conductors(a: &CycNum, b: &CycNum) -> Result<(CycNum, CycNum)> {
    let l = num_integer::lcm(a.conductor(), b.conductor());
    Ok((a.lift_to(l)?, b.lift_to(l)?))
}

/// True iff `a` is integral at every place over p: all power-basis
/// denominators coprime to p. Sound because ℤ[ζ_c] is the full ring of
/// integers, so the p-local ring is exactly ℤ_(p)-span of the basis.
pub fn p_integral_everywhere(a: &CycNum, p: u64) -> bool {
    let p = BigInt::from(p);
    a.coords.iter().all(|c| (c.denom() % &p) != BigInt::zero())
}

/// G = −Σ_{x∈𝔽_p} ζ_p^{x²}, conductor p. Satisfies G² = (−1)^{(p−1)/2}·p.
pub fn quadratic_gauss_sum(p: u64) -> Result<CycNum> {
    if p == 2 {
        return Err(Error::UnsupportedCharacteristic {
            p,
            context: "the quadratic Gauss sum normalization degenerates at p = 2",
        });
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let mut counts = vec![BigInt::zero(); p as usize];
    for x in 0..p {
        counts[((x * x) % p) as usize] -= 1; // the leading minus sign
    }
    Ok(CycNum::from_exponent_counts(p, &counts))
}

/// Decide v_𝔭(a) ≥ k/2 at every place 𝔭 over p (v normalized by v(p) = 1).
///
/// Even k: equivalent to a/p^{k/2} being p-integral. Odd k: multiply by G
/// first — v(G) = 1/2 exactly because G² = ±p — which needs ζ_p in the
/// field, i.e. p | conductor(a).
pub fn check_valuation_ge(a: &CycNum, p: u64, half_units: u64) -> Result<bool> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let k = half_units;
    if k % 2 == 0 {
        let scale = BigRat::new(BigInt::one(), arith::big_pow(p, k / 2));
        Ok(p_integral_everywhere(&a.scale(&scale), p))
    } else {
        if a.conductor() % p != 0 {
            return Err(Error::OddValuationConductor {
                p,
                conductor: a.conductor(),
            });
        }
        let g = quadratic_gauss_sum(p)?.lift_to(a.conductor())?;
        let scale = BigRat::new(BigInt::one(), arith::big_pow(p, (k + 1) / 2));
        let shifted = a.mul(&g)?.scale(&scale);
        Ok(p_integral_everywhere(&shifted, p))
    }
}

/// One complex value per embedding ζ_c ↦ exp(2πi·j/c), gcd(j, c) = 1,
/// ascending j. Errors if the requested precision cannot be guaranteed
/// from f64 evaluation (coordinate magnitudes decide what is available).
pub fn complex_embeddings(a: &CycNum, digits: u32) -> Result<Vec<Complex64>> {
    let c = a.conductor;
    // conservative error bound: each term contributes |coord|·(conversion +
    // sin/cos + product) rounding, plus the accumulation
    let coord_sum: f64 = a
        .coords
        .iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::MAX))
        .sum();
    let eps = f64::EPSILON;
    let bound = coord_sum * eps * (a.coords.len() as f64 + 4.0) + f64::MIN_POSITIVE;
    let available = (-bound.log10()).floor() as i64 - 1;
    if (digits as i64) > available {
        return Err(Error::Precision {
            requested: digits,
            available,
        });
    }
    let tau = std::f64::consts::TAU;
    let mut out = Vec::new();
    for j in 1..=c {
        if num_integer::gcd(j, c) != 1 {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, coord) in a.coords.iter().enumerate() {
            if coord.is_zero() {
                continue;
            }
            let angle = tau * ((i as u64 * j) % c) as f64 / c as f64;
            let (s, cs) = angle.sin_cos();
            acc += Complex64::new(cs, s) * coord.to_f64().unwrap();
        }
        out.push(acc);
    }
    Ok(out)
}
