//! Characteristic polynomials of Frobenius, rebuilt from trace power sums,
//! and the two finiteness predicates: trace integrality and
//! eigenvalues-are-roots-of-unity.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::BigRat;
use crate::cyclotomic::{
    check_valuation_ge, divides_unity_pow, p_integral_everywhere, CycNum, CycPoly,
};
use crate::error::{Error, Result};
use crate::sheaftrace::{NormalizedTrace, TraceEngine};

/// Everything the scan records about one Frobenius conjugacy class:
/// the power sums p_k = Φ(mk, t), the characteristic polynomial they
/// determine, and the two predicate outcomes.
#[derive(Debug, Clone)]
pub struct FrobData {
    pub m: u64,
    pub point: u64,
    pub power_sums: Vec<NormalizedTrace>,
    pub char_poly: CycPoly,
    pub trace_integral: bool,
    pub eigen_unity: bool,
    pub failure: Option<String>,
}

impl FrobData {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "point": self.point,
            "char_poly": self.char_poly.to_json(),
            "trace_integral": self.trace_integral,
            "eigen_unity": self.eigen_unity,
            "failure": self.failure,
        })
    }
}

/// Lift a list of cyclotomic numbers to their common (lcm) conductor.
fn to_common_conductor(values: &[CycNum]) -> Result<Vec<CycNum>> {
    let c = values
        .iter()
        .fold(1u64, |acc, v| acc.lcm(&v.conductor()));
    values.iter().map(|v| v.lift_to(c)).collect()
}

/// Monic polynomial of degree r whose roots have the given first r power
/// sums, by Newton's identities k·e_k = Σ_{i=1..k} (−1)^{i−1} e_{k−i} p_i.
pub fn newton_char_poly(power_sums: &[CycNum]) -> Result<CycPoly> {
    let r = power_sums.len();
    if r == 0 {
        return Ok(CycPoly::constant(CycNum::one(1)));
    }
    let ps = to_common_conductor(power_sums)?;
    let c = ps[0].conductor();
    let mut e = Vec::with_capacity(r + 1);
    e.push(CycNum::one(c));
    for k in 1..=r {
        let mut acc = CycNum::zero(c);
        for i in 1..=k {
            let term = e[k - i].mul(&ps[i - 1])?;
            acc = if i % 2 == 1 {
                acc.add(&term)?
            } else {
                acc.sub(&term)?
            };
        }
        e.push(acc.scale(&BigRat::new(BigInt::from(1), BigInt::from(k as i64))));
    }
    // coefficient of x^{r−k} is (−1)^k e_k
    let mut coeffs = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let k = r - j;
        let a = e[k].clone();
        coeffs.push(if k % 2 == 1 { a.neg() } else { a });
    }
    CycPoly::new(c, coeffs)
}

/// v_𝔭(numerator) ≥ gauss_exponent/2 at every place over p: exactly the
/// condition for the normalized trace to be an algebraic integer.
pub fn check_trace_integral(tr: &NormalizedTrace, p: u64) -> Result<bool> {
    check_valuation_ge(&tr.numerator, p, tr.gauss_exponent)
}

/// All eigenvalues are roots of unity of order dividing `m_order`:
/// coefficients integral over p (denominators away from p never occur in
/// Gauss-normalized values) and f | x^{m_order} − 1 up to multiplicity.
pub fn check_eigen_unity(f: &CycPoly, p: u64, m_order: u64) -> Result<bool> {
    for c in f.coeffs() {
        if !p_integral_everywhere(c, p) {
            return Ok(false);
        }
    }
    divides_unity_pow(f, m_order)
}

/// Assemble the Frobenius characteristic polynomial at the point with the
/// given index in degree m, using the trace at t embedded into the degree-k
/// relative extensions (k = 1..rank) as power sums.
///
/// `levels[k−1]` must hold the degree-k extension over the degree-m level
/// (see [`prepare_point_levels`]); this keeps the hot path shareable across
/// threads.  A failed Gauss-normalization divisibility is recorded as a
/// trace-integrality counterexample in `failure`, not an error.
pub fn frobenius_char_poly(
    eng: &TraceEngine,
    levels: &[usize],
    m: u64,
    point: u64,
    unity_order: u64,
) -> Result<FrobData> {
    let r = eng.metadata().rank as usize;
    let p = eng.metadata().p;
    if levels.len() != r {
        return Err(Error::Param {
            name: "levels",
            reason: format!("need one level per eigenvalue: {} for rank {r}", levels.len()),
        });
    }
    let t = eng.point_by_index(levels[0], point);
    let mut power_sums = Vec::with_capacity(r);
    let mut values = Vec::with_capacity(r);
    let mut trace_integral = true;
    let mut failure = None;
    for (k, &lvl) in levels.iter().enumerate() {
        let tk = eng.tower().embed(&t, lvl)?;
        let tr = eng.trace(&tk)?;
        if !check_trace_integral(&tr, p)? {
            trace_integral = false;
            if failure.is_none() {
                failure = Some(format!(
                    "power sum {}: G^{} does not divide the numerator — the trace at the \
                     degree-{} point is not an algebraic integer",
                    k + 1,
                    tr.gauss_exponent,
                    m * (k as u64 + 1),
                ));
            }
        }
        values.push(tr.value(p)?);
        power_sums.push(tr);
    }
    let char_poly = newton_char_poly(&values)?;
    let eigen_unity = check_eigen_unity(&char_poly, p, unity_order)?;
    Ok(FrobData {
        m,
        point,
        power_sums,
        char_poly,
        trace_integral,
        eigen_unity,
        failure,
    })
}

/// Build (mutating phase) the extension levels `frobenius_char_poly` needs
/// for points of degree m: the degree-k extensions over the degree-m field
/// for k = 1..rank.
pub fn prepare_point_levels(eng: &mut TraceEngine, m: u64) -> Result<Vec<usize>> {
    let r = eng.metadata().rank;
    let base = eng.level_for_degree(m)?;
    let mut levels = Vec::with_capacity(r as usize);
    for k in 1..=r {
        levels.push(eng.extension_over(base, k)?);
    }
    Ok(levels)
}

// ---------------------------------------------------------------------------
// the power-sum integrality oracle
// ---------------------------------------------------------------------------

/// One sampled multiset that shows n_bound − 1 power sums do not decide
/// integrality: all leading sums up to n_bound − 1 are integral while some
/// α is not.
#[derive(Debug, Clone)]
pub struct OracleWitness {
    pub alphas: Vec<CycNum>,
    pub integral_prefix: u64,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub r: u64,
    pub e_ram: u64,
    pub p: u64,
    pub n_bound: u64,
    pub trials: u64,
    pub implication_failures: u64,
    pub witness: Option<OracleWitness>,
    pub note: Option<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.implication_failures == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "e_ram": self.e_ram,
            "p": self.p,
            "n_bound": self.n_bound,
            "trials": self.trials,
            "implication_failures": self.implication_failures,
            "witness": self.witness.as_ref().map(|w| serde_json::json!({
                "alphas": w.alphas.iter().map(|a| a.coord_strings()).collect::<Vec<_>>(),
                "integral_prefix": w.integral_prefix,
            })),
            "note": self.note,
        })
    }
}

fn sample_alpha(rng: &mut ChaCha8Rng, conductor: u64, p: u64) -> CycNum {
    let phi = crate::arith::euler_phi(conductor) as usize;
    match rng.gen_range(0..4u32) {
        // plain integer
        0 => CycNum::from_int(conductor, rng.gen_range(-3i64..=3)),
        // rational with a p in the denominator
        1 => {
            let u = rng.gen_range(1..p) as i64 * if rng.gen_bool(0.5) { 1 } else { -1 };
            CycNum::from_rat(conductor, BigRat::new(BigInt::from(u), BigInt::from(p)))
        }
        // cyclotomic with mixed denominators (valuation can be fractional)
        2 => {
            let coords: Vec<BigRat> = (0..phi)
                .map(|_| {
                    let num = rng.gen_range(-2i64..=2);
                    let den = if rng.gen_bool(0.5) { 1 } else { p as i64 };
                    BigRat::new(BigInt::from(num), BigInt::from(den))
                })
                .collect();
            CycNum::from_coeff_poly(conductor, coords)
        }
        // integral cyclotomic
        _ => {
            let coords: Vec<BigRat> = (0..phi)
                .map(|_| BigRat::from(BigInt::from(rng.gen_range(-2i64..=2))))
                .collect();
            CycNum::from_coeff_poly(conductor, coords)
        }
    }
}

/// Randomized check of the power-sum criterion: integrality of the first
/// n_power_sums(r, e_ram, p) power sums of r sampled elements must imply
/// integrality of every element.  Also hunts for a witness that one fewer
/// sum does not suffice; the first trial plants {1/p, −1/p, 0, …} (or the
/// 1/(1−ζ_p) analogue in the ramified case), which settles r = 2.
pub fn power_sum_integrality_oracle(
    r: u64,
    e_ram: u64,
    p: u64,
    trials: u64,
) -> Result<OracleReport> {
    if r == 0 || r > 4 {
        return Err(Error::Param {
            name: "r",
            reason: "the oracle is desk-scale: 1 <= r <= 4".into(),
        });
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let conductor = if e_ram > 1 { p } else { 1 };
    let n_bound = crate::bounds::n_power_sums(r, e_ram, p);
    let mut rng = ChaCha8Rng::seed_from_u64(
        0x9e37_79b9_7f4a_7c15 ^ (r << 32) ^ (e_ram << 16) ^ p,
    );
    let mut implication_failures = 0u64;
    let mut witness: Option<OracleWitness> = None;

    let planted: Vec<CycNum> = {
        let mut v = Vec::with_capacity(r as usize);
        if r >= 2 {
            let bad = if e_ram > 1 {
                // 1/(1 − ζ_p): valuation −1/(p−1) < 0
                CycNum::one(p)
                    .sub(&CycNum::root_of_unity(p, 1))?
                    .inv()?
            } else {
                CycNum::from_rat(1, BigRat::new(BigInt::one(), BigInt::from(p)))
            };
            v.push(bad.clone());
            v.push(bad.neg());
            for _ in 2..r {
                v.push(CycNum::zero(conductor));
            }
        } else {
            v.push(CycNum::from_rat(
                conductor,
                BigRat::new(BigInt::one(), BigInt::from(p)),
            ));
        }
        v
    };
    use num_traits::One;

    for trial in 0..trials {
        let alphas: Vec<CycNum> = if trial == 0 {
            planted.clone()
        } else {
            (0..r).map(|_| sample_alpha(&mut rng, conductor, p)).collect()
        };
        let all_alpha_int = alphas.iter().all(|a| p_integral_everywhere(a, p));
        // leading power sums, stopping at the first non-integral one
        let mut integral_prefix = 0u64;
        let mut all_sums_int = true;
        for k in 1..=n_bound {
            let mut s = CycNum::zero(conductor);
            for a in &alphas {
                s = s.add(&a.pow(k))?;
            }
            if p_integral_everywhere(&s, p) {
                if all_sums_int {
                    integral_prefix = k;
                }
            } else {
                all_sums_int = false;
                break;
            }
        }
        if all_sums_int && !all_alpha_int {
            implication_failures += 1;
        }
        if witness.is_none() && !all_alpha_int && integral_prefix + 1 >= n_bound {
            witness = Some(OracleWitness {
                alphas,
                integral_prefix,
            });
        }
    }
    let note = if witness.is_none() {
        Some(
            "no insufficiency witness found; the bound need not be tight for these parameters"
                .to_string(),
        )
    } else {
        None
    };
    Ok(OracleReport {
        r,
        e_ram,
        p,
        n_bound,
        trials,
        implication_failures,
        witness,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::bounds::m_lcm;
    use crate::cyclotomic::complex_embeddings;
    use crate::sheaftrace::SheafFamily;

    #[test]
    fn test_newton_examples() {
        // r = 1: x − c
        let c = CycNum::from_int(1, 7);
        let f = newton_char_poly(&[c.clone()]).unwrap();
        assert_eq!(f, CycPoly::x_minus(&c));

        // r = 2: p1 = 0, p2 = −2 → x² + 1
        let f = newton_char_poly(&[CycNum::zero(1), CycNum::from_int(1, -2)]).unwrap();
        let expect = CycPoly::new(
            1,
            vec![CycNum::one(1), CycNum::zero(1), CycNum::one(1)],
        )
        .unwrap();
        assert_eq!(f, expect);

        // triple root 1
        let three = CycNum::from_int(1, 3);
        let f = newton_char_poly(&[three.clone(), three.clone(), three]).unwrap();
        let one = CycNum::one(1);
        let expect = CycPoly::from_roots(1, &[one.clone(), one.clone(), one]).unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn test_newton_round_trip_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let r = rng.gen_range(1..=4usize);
            let roots: Vec<CycNum> = (0..r)
                .map(|_| CycNum::root_of_unity(12, rng.gen_range(0..12u64)))
                .collect();
            let sums: Vec<CycNum> = (1..=r as u64)
                .map(|k| {
                    roots.iter().fold(CycNum::zero(12), |acc, z| {
                        acc.add(&z.pow(k)).unwrap()
                    })
                })
                .collect();
            let f = newton_char_poly(&sums).unwrap();
            assert_eq!(f, CycPoly::from_roots(12, &roots).unwrap());
            // all roots of unity → determinant is one too, and its minimal
            // relation divides x^12 − 1
            let det = f.coeff(0);
            let det = if r % 2 == 1 { det.neg() } else { det };
            assert!(divides_unity_pow(&CycPoly::x_minus(&det), 12).unwrap());
            assert!(check_eigen_unity(&f, 3, 12).unwrap());
        }
    }

    #[test]
    fn test_frobenius_char_poly_as_rank1() {
        let mut eng = TraceEngine::new(SheafFamily::ArtinSchreier { p: 3, n: 2 }).unwrap();
        let levels = prepare_point_levels(&mut eng, 1).unwrap();
        let m_ord = m_lcm(3, 1); // 6

        // t = 0 → x − 1
        let d0 = frobenius_char_poly(&eng, &levels, 1, 0, m_ord).unwrap();
        assert_eq!(d0.char_poly, CycPoly::x_minus(&CycNum::one(3)));
        assert!(d0.trace_integral && d0.eigen_unity);
        assert!(d0.failure.is_none());

        // t = 1 → x − ζ₃²
        let d1 = frobenius_char_poly(&eng, &levels, 1, 1, m_ord).unwrap();
        assert_eq!(
            d1.char_poly,
            CycPoly::x_minus(&CycNum::root_of_unity(3, 2))
        );
        assert!(d1.trace_integral && d1.eigen_unity);
    }

    #[test]
    fn test_frobenius_char_poly_rank2_structure() {
        // p = 5, n = 3: rank 2; char polys are monic of degree 2 with
        // weight-0 determinant (modulus 1 at every embedding)
        let mut eng = TraceEngine::new(SheafFamily::ArtinSchreier { p: 5, n: 3 }).unwrap();
        let levels = prepare_point_levels(&mut eng, 1).unwrap();
        let m_ord = m_lcm(5, 2);
        for point in 0..5 {
            let d = frobenius_char_poly(&eng, &levels, 1, point, m_ord).unwrap();
            assert!(d.char_poly.is_monic());
            assert_eq!(d.char_poly.degree(), Some(2));
            let det = d.char_poly.coeff(0); // (−1)² e₂
            for z in complex_embeddings(&det, 8).unwrap() {
                assert!((z.norm() - 1.0).abs() < 1e-8, "point {point}");
            }
        }
    }

    #[test]
    fn test_check_trace_integral_examples() {
        let g = crate::cyclotomic::quadratic_gauss_sum(3).unwrap();

        // AS p=3, n=2, m=1, t=1: value ζ₃², a unit
        let mut eng = TraceEngine::new(SheafFamily::ArtinSchreier { p: 3, n: 2 }).unwrap();
        let l = eng.level_for_degree(1).unwrap();
        let t = eng.point_by_index(l, 1);
        let tr = eng.trace(&t).unwrap();
        assert!(check_trace_integral(&tr, 3).unwrap());

        // numerator 1, exponent 1: v(1) = 0 < 1/2
        let bad = NormalizedTrace {
            numerator: CycNum::one(3),
            gauss_exponent: 1,
        };
        assert!(!check_trace_integral(&bad, 3).unwrap());

        // G·ζ₃, exponent 1: exact unit multiple
        let good = NormalizedTrace {
            numerator: g.mul(&CycNum::root_of_unity(3, 1)).unwrap(),
            gauss_exponent: 1,
        };
        assert!(check_trace_integral(&good, 3).unwrap());
    }

    #[test]
    fn test_check_trace_integral_unit_invariance() {
        let g = crate::cyclotomic::quadratic_gauss_sum(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let coords: Vec<BigRat> = (0..4)
                .map(|_| rat(rng.gen_range(-5i64..=5), if rng.gen_bool(0.3) { 5 } else { 1 }))
                .collect();
            let num = CycNum::from_coeff_poly(5, coords);
            let exp = rng.gen_range(0..4u64);
            let base = check_trace_integral(
                &NormalizedTrace {
                    numerator: num.clone(),
                    gauss_exponent: exp,
                },
                5,
            )
            .unwrap();
            let twisted = num.mul(&CycNum::root_of_unity(5, rng.gen_range(1..5u64)))
                .unwrap();
            let tw = check_trace_integral(
                &NormalizedTrace {
                    numerator: twisted,
                    gauss_exponent: exp,
                },
                5,
            )
            .unwrap();
            assert_eq!(base, tw);
            let _ = &g;
        }
    }

    #[test]
    fn test_check_eigen_unity_examples() {
        // x − ζ₃²: order 3 divides 12
        let f = CycPoly::x_minus(&CycNum::root_of_unity(3, 2));
        assert!(check_eigen_unity(&f, 3, 12).unwrap());

        // x − 2: not a root of unity
        let f = CycPoly::x_minus(&CycNum::from_int(1, 2));
        assert!(!check_eigen_unity(&f, 3, 12).unwrap());

        // (x² − x + 1)²: squarefree part Φ₁₂
        let phi12 = CycPoly::new(
            1,
            vec![CycNum::one(1), CycNum::from_int(1, -1), CycNum::one(1)],
        )
        .unwrap();
        let f = phi12.mul(&phi12).unwrap();
        assert!(check_eigen_unity(&f, 3, 12).unwrap());

        // non-integral coefficient fails regardless of divisibility
        let f = CycPoly::x_minus(&CycNum::from_rat(1, rat(1, 3)));
        assert!(!check_eigen_unity(&f, 3, 12).unwrap());
    }

    #[test]
    fn test_oracle_r2_unramified() {
        let rep = power_sum_integrality_oracle(2, 1, 3, 500).unwrap();
        assert_eq!(rep.n_bound, 2);
        assert_eq!(rep.implication_failures, 0);
        let w = rep.witness.expect("planted {1/3, -1/3} is a witness");
        // p₁ = 0 is integral; the elements are not
        assert_eq!(w.integral_prefix, 1);
        assert_eq!(w.alphas[0], CycNum::from_rat(1, rat(1, 3)));
    }

    #[test]
    fn test_oracle_r2_ramified() {
        let rep = power_sum_integrality_oracle(2, 2, 3, 500).unwrap();
        assert_eq!(rep.n_bound, 2);
        assert_eq!(rep.implication_failures, 0);
        let w = rep.witness.expect("planted ±1/(1−ζ₃) is a witness");
        assert_eq!(w.integral_prefix, 1);
    }

    #[test]
    fn test_oracle_r1_and_loose_bound() {
        // r = 1: p₁ = α decides exactly; witness is any non-integral α
        let rep = power_sum_integrality_oracle(1, 1, 5, 200).unwrap();
        assert_eq!(rep.n_bound, 1);
        assert_eq!(rep.implication_failures, 0);
        assert!(rep.witness.is_some());

        // r = 3, p = 2, e = 1: N = 3, but two integral sums already force
        // integrality (parity obstruction), so no witness exists
        let rep = power_sum_integrality_oracle(3, 1, 2, 2000).unwrap();
        assert_eq!(rep.n_bound, 3);
        assert_eq!(rep.implication_failures, 0);
        assert!(rep.witness.is_none());
        assert!(rep.note.is_some());
    }

    #[test]
    fn test_oracle_rejects_bad_params() {
        assert!(power_sum_integrality_oracle(0, 1, 3, 10).is_err());
        assert!(power_sum_integrality_oracle(5, 1, 3, 10).is_err());
        assert!(power_sum_integrality_oracle(2, 1, 4, 10).is_err());
    }
}
