//! Dense polynomials over ℚ(ζ_c): exact Euclidean division, gcd,
//! squarefree parts, and the root-of-unity divisibility test that decides
//! the eigenvalue criterion without any numerics.

use super::CycNum;
use crate::error::{Error, Result};

/// Polynomial with CycNum coefficients, ascending degree, trailing zeros
/// trimmed (empty vector = zero polynomial).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    conductor: u64,
    coeffs: Vec<CycNum>,
}

impl CycPoly {
    pub fn new(conductor: u64, coeffs: Vec<CycNum>) -> Result<CycPoly> {
        for c in &coeffs {
            if c.conductor() != conductor {
                return Err(Error::ConductorMismatch {
                    left: conductor,
                    right: c.conductor(),
                });
            }
        }
        let mut p = CycPoly { conductor, coeffs };
        p.trim();
        Ok(p)
    }

    pub fn zero(conductor: u64) -> CycPoly {
        CycPoly {
            conductor,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(value: CycNum) -> CycPoly {
        let conductor = value.conductor();
        CycPoly::new(conductor, vec![value]).expect("single coefficient")
    }

    /// x − α
    pub fn x_minus(alpha: &CycNum) -> CycPoly {
        let c = alpha.conductor();
        CycPoly::new(c, vec![alpha.neg(), CycNum::one(c)]).expect("degree 1")
    }

    /// ∏ (x − αᵢ); all roots must share a conductor.
    pub fn from_roots(conductor: u64, roots: &[CycNum]) -> Result<CycPoly> {
        let mut acc = CycPoly::new(conductor, vec![CycNum::one(conductor)])?;
        for r in roots {
            acc = acc.mul(&CycPoly::x_minus(r))?;
        }
        Ok(acc)
    }

    /// x^m − 1 over ℚ(ζ_c).
    pub fn unity(conductor: u64, m: u64) -> CycPoly {
        let mut coeffs = vec![CycNum::zero(conductor); m as usize + 1];
        coeffs[0] = CycNum::from_int(conductor, -1);
        coeffs[m as usize] = CycNum::one(conductor);
        CycPoly { conductor, coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(CycNum::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&CycNum> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(CycNum::is_one)
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> CycNum {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CycNum::zero(self.conductor))
    }

    fn check_same(&self, other: &CycPoly) -> Result<()> {
        if self.conductor == other.conductor {
            Ok(())
        } else {
            Err(Error::ConductorMismatch {
                left: self.conductor,
                right: other.conductor,
            })
        }
    }

    pub fn add(&self, other: &CycPoly) -> Result<CycPoly> {
        self.check_same(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i))?);
        }
        let mut p = CycPoly {
            conductor: self.conductor,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn sub(&self, other: &CycPoly) -> Result<CycPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycPoly {
        CycPoly {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(CycNum::neg).collect(),
        }
    }

    pub fn mul(&self, other: &CycPoly) -> Result<CycPoly> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(CycPoly::zero(self.conductor));
        }
        let mut coeffs =
            vec![CycNum::zero(self.conductor); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
                }
            }
        }
        let mut p = CycPoly {
            conductor: self.conductor,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    /// Exact Euclidean division: self = q·div + r with deg r < deg div.
    pub fn divmod(&self, div: &CycPoly) -> Result<(CycPoly, CycPoly)> {
        self.check_same(div)?;
        if div.is_zero() {
            return Err(Error::DivisionByZero {
                conductor: self.conductor,
            });
        }
        let dd = div.degree().unwrap();
        let lead_inv = div.leading().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((
                CycPoly::zero(self.conductor),
                CycPoly {
                    conductor: self.conductor,
                    coeffs: rem,
                },
            ));
        }
        let mut quot = vec![CycNum::zero(self.conductor); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            if rem[i + dd].is_zero() {
                continue;
            }
            let c = rem[i + dd].mul(&lead_inv)?;
            for j in 0..=dd {
                rem[i + j] = rem[i + j].sub(&c.mul(&div.coeffs[j])?)?;
            }
            quot[i] = c;
        }
        let mut q = CycPoly {
            conductor: self.conductor,
            coeffs: quot,
        };
        let mut r = CycPoly {
            conductor: self.conductor,
            coeffs: rem,
        };
        q.trim();
        r.trim();
        Ok((q, r))
    }

    pub fn derivative(&self) -> CycPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&crate::arith::rat(k as i64, 1)))
            .collect();
        let mut p = CycPoly {
            conductor: self.conductor,
            coeffs,
        };
        p.trim();
        p
    }

    /// Scale so the leading coefficient becomes 1.
    pub fn monic(&self) -> Result<CycPoly> {
        let lead = self.leading().ok_or(Error::DivisionByZero {
            conductor: self.conductor,
        })?;
        if lead.is_one() {
            return Ok(self.clone());
        }
        let inv = lead.inv()?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mul(&inv))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycPoly {
            conductor: self.conductor,
            coeffs,
        })
    }

    pub fn eval(&self, x: &CycNum) -> Result<CycNum> {
        let mut acc = CycNum::zero(self.conductor);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "conductor": self.conductor,
            "coeffs": self.coeffs.iter().map(CycNum::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Monic gcd in ℚ(ζ_c)[x] by the Euclidean algorithm; deterministic because
/// every remainder step is exact and the result is normalized monic.
pub fn poly_gcd(f: &CycPoly, g: &CycPoly) -> Result<CycPoly> {
    f.check_same(g)?;
    if f.is_zero() && g.is_zero() {
        return Err(Error::GcdOfZero);
    }
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let (_, r) = a.divmod(&b)?;
        a = std::mem::replace(&mut b, r);
    }
    a.monic()
}

/// f / gcd(f, f′), monic: same roots, multiplicity one. Characteristic zero,
/// so the gcd catches exactly the repeated part.
pub fn squarefree_part(f: &CycPoly) -> Result<CycPoly> {
    if f.is_zero() {
        return Err(Error::Param {
            name: "poly",
            reason: "squarefree part of the zero polynomial".into(),
        });
    }
    if f.degree() == Some(0) {
        return f.monic();
    }
    let g = poly_gcd(f, &f.derivative())?;
    let (q, r) = f.divmod(&g)?;
    debug_assert!(r.is_zero());
    q.monic()
}

/// True iff every root of f is a root of unity of order dividing M,
/// decided exactly: squarefree_part(f) must divide x^M − 1.
pub fn divides_unity_pow(f: &CycPoly, m: u64) -> Result<bool> {
    let sf = squarefree_part(f)?;
    if sf.degree() == Some(0) {
        return Ok(true); // constant: no roots
    }
    let (_, r) = CycPoly::unity(f.conductor(), m).divmod(&sf)?;
    Ok(r.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zeta(c: u64, j: u64) -> CycNum {
        CycNum::root_of_unity(c, j)
    }

    fn qpoly(c: u64, coeffs: &[i64]) -> CycPoly {
        CycPoly::new(
            c,
            coeffs.iter().map(|&k| CycNum::from_int(c, k)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn test_poly_gcd_examples() {
        // (x²−1, x−1) → x−1
        let g = poly_gcd(&qpoly(1, &[-1, 0, 1]), &qpoly(1, &[-1, 1])).unwrap();
        assert_eq!(g, qpoly(1, &[-1, 1]));
        // (f, 0) → monic multiple of f
        let f = qpoly(1, &[2, 4]);
        let g = poly_gcd(&f, &CycPoly::zero(1)).unwrap();
        assert_eq!(g, qpoly(1, &[0, 1]).add(&CycPoly::constant(CycNum::from_rat(1, rat(1, 2)))).unwrap());
        assert!(g.is_monic());
        // ((x−ζ₃)², (x−ζ₃)(x−1)) → x−ζ₃
        let z = zeta(3, 1);
        let a = CycPoly::from_roots(3, &[z.clone(), z.clone()]).unwrap();
        let b = CycPoly::from_roots(3, &[z.clone(), CycNum::one(3)]).unwrap();
        assert_eq!(poly_gcd(&a, &b).unwrap(), CycPoly::x_minus(&z));
        assert!(matches!(
            poly_gcd(&CycPoly::zero(3), &CycPoly::zero(3)),
            Err(Error::GcdOfZero)
        ));
    }

    #[test]
    fn test_squarefree_part_examples() {
        let one = CycNum::one(1);
        let cube = CycPoly::from_roots(1, &[one.clone(), one.clone(), one.clone()]).unwrap();
        assert_eq!(squarefree_part(&cube).unwrap(), CycPoly::x_minus(&one));
        let phi12_like = qpoly(1, &[1, -1, 1]); // x² − x + 1
        assert_eq!(squarefree_part(&phi12_like).unwrap(), phi12_like);
        // (x²−1)(x−1) → x²−1
        let f = qpoly(1, &[-1, 0, 1]).mul(&qpoly(1, &[-1, 1])).unwrap();
        assert_eq!(squarefree_part(&f).unwrap(), qpoly(1, &[-1, 0, 1]));
    }

    #[test]
    fn test_divides_unity_pow_examples() {
        assert!(divides_unity_pow(&qpoly(1, &[1, -1, 1]), 12).unwrap());
        let one = CycNum::one(1);
        let f = CycPoly::from_roots(1, &[one.clone(), one.clone(), one.clone(), one.clone(), one]).unwrap();
        assert!(divides_unity_pow(&f, 1).unwrap());
        for m in 1..=64u64 {
            assert!(!divides_unity_pow(&qpoly(1, &[-2, 1]), m).unwrap());
        }
        // order must divide M, not just be finite
        let z = zeta(12, 1);
        let f = CycPoly::x_minus(&z);
        assert!(divides_unity_pow(&f, 12).unwrap());
        assert!(divides_unity_pow(&f, 24).unwrap());
        assert!(!divides_unity_pow(&f, 8).unwrap());
    }

    #[test]
    fn test_divmod_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x77);
        for _ in 0..200 {
            let c = 12u64;
            let mk = |rng: &mut ChaCha8Rng, d: usize| {
                let coeffs = (0..=d)
                    .map(|_| {
                        let mut x = CycNum::zero(c);
                        x = x
                            .add(&zeta(c, rng.gen_range(0..c)).scale(&rat(rng.gen_range(-3i64..=3), 1)))
                            .unwrap();
                        x
                    })
                    .collect();
                CycPoly::new(c, coeffs).unwrap()
            };
            let df = rng.gen_range(0..6);
            let f = mk(&mut rng, df);
            let dg = rng.gen_range(0..4);
            let g = mk(&mut rng, dg);
            if g.is_zero() {
                continue;
            }
            let (q, r) = f.divmod(&g).unwrap();
            assert!(r.degree().map_or(true, |dr| dr < g.degree().unwrap()));
            let back = q.mul(&g).unwrap().add(&r).unwrap();
            assert_eq!(back, f);
        }
    }

    // -- numeric cross-check of divides_unity_pow ---------------------------

    fn eval_c(coeffs: &[Complex64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Durand–Kerner; good enough for squarefree degree ≤ 8 test inputs.
    fn roots_numeric(poly: &CycPoly) -> Vec<Complex64> {
        let coeffs: Vec<Complex64> = poly
            .coeffs()
            .iter()
            .map(|c| crate::cyclotomic::complex_embeddings(c, 6).unwrap()[0])
            .collect();
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let monic: Vec<Complex64> = coeffs.iter().map(|z| z / lead).collect();
        let seed = Complex64::new(0.4, 0.9);
        let mut zs: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
        for _ in 0..800 {
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if j != i {
                        denom *= zs[i] - zs[j];
                    }
                }
                let zi = zs[i];
                zs[i] = zi - eval_c(&monic, zi) / denom;
            }
        }
        zs
    }

    #[test]
    fn test_divides_unity_agrees_with_numeric_roots() {
        let c = 12u64;
        let m = 12u64;
        let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
        // factor pool: cyclotomic (orders dividing or not dividing 12) and
        // clearly-non-unity linear factors
        for _ in 0..60 {
            let mut f = CycPoly::new(c, vec![CycNum::one(c)]).unwrap();
            let mut used = std::collections::HashSet::new();
            let n_factors = rng.gen_range(1..=3);
            for _ in 0..n_factors {
                let pick = rng.gen_range(0..6);
                if !used.insert(pick) {
                    continue; // keep the product squarefree for the root finder
                }
                let factor = match pick {
                    0 => CycPoly::x_minus(&zeta(c, 1)),             // order 12
                    1 => CycPoly::x_minus(&zeta(c, 4)),             // order 3
                    2 => CycPoly::x_minus(&zeta(c, 6)),             // order 2
                    3 => CycPoly::x_minus(&CycNum::from_int(c, 2)), // not unity
                    4 => CycPoly::x_minus(&CycNum::from_rat(c, rat(3, 2))),
                    _ => {
                        // x² − ζ₁₂: roots are 24th roots of unity, order ∤ 12
                        CycPoly::new(
                            c,
                            vec![zeta(c, 1).neg(), CycNum::zero(c), CycNum::one(c)],
                        )
                        .unwrap()
                    }
                };
                f = f.mul(&factor).unwrap();
            }
            if f.degree() == Some(0) {
                continue;
            }
            let exact = divides_unity_pow(&f, m).unwrap();
            let numeric = roots_numeric(&f).iter().all(|z| {
                (0..m).any(|k| {
                    let angle = std::f64::consts::TAU * k as f64 / m as f64;
                    (z - Complex64::new(angle.cos(), angle.sin())).norm() < 1e-8
                })
            });
            assert_eq!(exact, numeric, "degree {:?}", f.degree());
        }
    }
}
