//! Trace-function engines for the two exponential-sum families and for
//! user-supplied trace tables.
//!
//! Values come out as [`NormalizedTrace`]: an exact cyclotomic numerator
//! together with the power of the quadratic Gauss sum that normalizes the
//! family to weight zero.  The division is deliberately *not* performed
//! here — integrality checks need the numerator intact.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::arith::{rat, BigRat};
use crate::bounds::CurveParams;
use crate::cyclotomic::{quadratic_gauss_sum, unify_conductors, CycNum};
use crate::error::{Error, Result};
use crate::finitefield::{DlogTable, FFElem, FieldTower};

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

/// A family of sheaves over the parameter space: Artin–Schreier sums
/// x^n + t·x over 𝔸¹, hypergeometric sums over 𝔾_m, or a table of values
/// computed elsewhere.
#[derive(Debug, Clone)]
pub enum SheafFamily {
    ArtinSchreier {
        p: u64,
        n: u64,
    },
    Hypergeometric {
        p: u64,
        f_deg: u64,
        a: u64,
        b: u64,
        /// Character order m; all χ and ρ are powers of a fixed order-m
        /// character.
        m_char: u64,
        /// Exponents j of the a forward characters χ_i = χ^j.
        chi_indices: Vec<u64>,
        /// Exponents of the b backward characters ρ_j.
        rho_indices: Vec<u64>,
    },
    Table(TraceTable),
}

/// Bound inputs derived from the family.
#[derive(Debug, Clone)]
pub struct FamilyMeta {
    pub rank: u64,
    pub cond_e: u64,
    pub b1: u64,
    pub e_breaks: BigRat,
    pub q: u64,
    pub p: u64,
    pub f_deg: u64,
}

impl FamilyMeta {
    /// Ramification index of p in ℚ(ζ_cond): φ of the p-part.
    pub fn f_ram(&self) -> u64 {
        let vp = crate::arith::valuation_u64(self.cond_e, self.p);
        crate::arith::euler_phi(self.p.pow(vp)).max(1)
    }

    pub fn curve_params(&self) -> CurveParams {
        CurveParams {
            r: self.rank,
            q: BigInt::from(self.q),
            p: self.p,
            cond_e: self.cond_e,
            f_ram: self.f_ram(),
            b1: self.b1,
            e_breaks: self.e_breaks.clone(),
        }
    }
}

pub fn family_metadata(fam: &SheafFamily) -> Result<FamilyMeta> {
    match fam {
        SheafFamily::ArtinSchreier { p, n } => {
            if *n < 2 {
                return Err(Error::Param {
                    name: "nvar",
                    reason: "the family needs n >= 2".into(),
                });
            }
            Ok(FamilyMeta {
                rank: n - 1,
                cond_e: *p,
                b1: 0,
                e_breaks: BigRat::new(BigInt::one(), BigInt::from(n - 1)),
                q: *p,
                p: *p,
                f_deg: 1,
            })
        }
        SheafFamily::Hypergeometric {
            p,
            f_deg,
            a,
            b,
            m_char,
            ..
        } => {
            if *a == 0 || b >= a {
                return Err(Error::Param {
                    name: "a",
                    reason: "the family needs a > b >= 0".into(),
                });
            }
            let q = p
                .checked_pow((*f_deg).try_into().map_err(|_| Error::Param {
                    name: "f-deg",
                    reason: "field degree too large".into(),
                })?)
                .ok_or(Error::Param {
                    name: "f-deg",
                    reason: format!("q = {p}^{f_deg} overflows"),
                })?;
            Ok(FamilyMeta {
                rank: *a,
                cond_e: m_char * p,
                b1: 1,
                e_breaks: BigRat::new(BigInt::one(), BigInt::from(a - b)),
                q,
                p: *p,
                f_deg: *f_deg,
            })
        }
        SheafFamily::Table(t) => Ok(FamilyMeta {
            rank: t.rank,
            cond_e: t.cond_e,
            b1: t.b1,
            e_breaks: t.e_breaks.clone(),
            q: t.q,
            p: t.gauss_p,
            f_deg: 1,
        }),
    }
}

// ---------------------------------------------------------------------------
// normalized traces
// ---------------------------------------------------------------------------

/// Exact trace value numerator / G^{gauss_exponent}, with
/// G = −Σ_{x∈𝔽_p} ζ_p^{x²} the weight-normalizing Gauss sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedTrace {
    pub numerator: CycNum,
    pub gauss_exponent: u64,
}

impl NormalizedTrace {
    /// Divide out the normalization exactly (leaves ℤ[ζ] in general; used
    /// by checks that want the literal value).
    pub fn value(&self, p: u64) -> Result<CycNum> {
        if self.gauss_exponent == 0 {
            return Ok(self.numerator.clone());
        }
        let g = quadratic_gauss_sum(p)?;
        let (num, g) = unify_conductors(&self.numerator, &g)?;
        num.div(&g.pow(self.gauss_exponent))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self.numerator.to_json(),
            "gauss_exponent": self.gauss_exponent,
        })
    }
}

/// Complex embeddings of the normalized value numerator / G^k, one per
/// embedding of the compositum ℚ(ζ_lcm(cond, p)).
pub fn trace_embeddings(tr: &NormalizedTrace, p: u64, digits: u32) -> Result<Vec<Complex64>> {
    if tr.gauss_exponent == 0 {
        return crate::cyclotomic::complex_embeddings(&tr.numerator, digits);
    }
    let g = quadratic_gauss_sum(p)?;
    let (num, g) = unify_conductors(&tr.numerator, &g)?;
    let nv = crate::cyclotomic::complex_embeddings(&num, digits)?;
    let gv = crate::cyclotomic::complex_embeddings(&g, digits)?;
    Ok(nv
        .iter()
        .zip(&gv)
        .map(|(n, g)| n / g.powu(tr.gauss_exponent as u32))
        .collect())
}

// ---------------------------------------------------------------------------
// trace tables
// ---------------------------------------------------------------------------

/// Trace values computed elsewhere, keyed by (degree, point id).
///
/// File format, line oriented:
/// ```text
/// conductor=<c> gauss_p=<p> [rank=<r>] [q=<q>] [cond_e=<c>] [b1=<b>] [e_num=<n>] [e_den=<d>]
/// <degree> <point_id> <gauss_exponent> <coord_0> <coord_1> ...
/// ```
/// with exactly φ(c) coordinates per row, each a `num/den` pair of decimal
/// integers.  `#`-lines are comments.  The writer emits a canonical form
/// (full header, rows sorted by key) that round-trips byte for byte.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub conductor: u64,
    pub gauss_p: u64,
    pub rank: u64,
    pub q: u64,
    pub cond_e: u64,
    pub b1: u64,
    pub e_breaks: BigRat,
    entries: BTreeMap<(u64, u64), NormalizedTrace>,
}

impl TraceTable {
    pub fn new(conductor: u64, gauss_p: u64) -> TraceTable {
        TraceTable {
            conductor,
            gauss_p,
            rank: 1,
            q: gauss_p,
            cond_e: conductor,
            b1: 0,
            e_breaks: rat(1, 1),
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, degree: u64, point: u64, tr: NormalizedTrace) {
        assert_eq!(tr.numerator.conductor(), self.conductor);
        self.entries.insert((degree, point), tr);
    }

    pub fn get(&self, degree: u64, point: u64) -> Result<&NormalizedTrace> {
        self.entries
            .get(&(degree, point))
            .ok_or(Error::IncompleteTable { degree, point })
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut ds: Vec<u64> = self.entries.keys().map(|&(d, _)| d).collect();
        ds.dedup();
        ds
    }

    pub fn points_at(&self, degree: u64) -> Vec<u64> {
        self.entries
            .range((degree, 0)..=(degree, u64::MAX))
            .map(|(&(_, pt), _)| pt)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parse(text: &str) -> Result<TraceTable> {
        let mut table: Option<TraceTable> = None;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match &mut table {
                None => {
                    let mut kv = HashMap::new();
                    for tok in &toks {
                        let (k, v) = tok.split_once('=').ok_or(Error::TableFormat {
                            line: lineno,
                            reason: format!("header token `{tok}` is not key=value"),
                        })?;
                        if kv.insert(k.to_string(), v.to_string()).is_some() {
                            return Err(Error::TableFormat {
                                line: lineno,
                                reason: format!("duplicate header key `{k}`"),
                            });
                        }
                    }
                    let get_u64 = |kv: &HashMap<String, String>, k: &str| -> Result<Option<u64>> {
                        match kv.get(k) {
                            None => Ok(None),
                            Some(v) => v.parse::<u64>().map(Some).map_err(|_| {
                                Error::TableFormat {
                                    line: lineno,
                                    reason: format!("bad integer for `{k}`: {v}"),
                                }
                            }),
                        }
                    };
                    let conductor = get_u64(&kv, "conductor")?.ok_or(Error::TableFormat {
                        line: lineno,
                        reason: "header is missing conductor=".into(),
                    })?;
                    let gauss_p = get_u64(&kv, "gauss_p")?.ok_or(Error::TableFormat {
                        line: lineno,
                        reason: "header is missing gauss_p=".into(),
                    })?;
                    if conductor == 0 || !crate::arith::is_prime(gauss_p) {
                        return Err(Error::TableFormat {
                            line: lineno,
                            reason: "conductor must be positive and gauss_p prime".into(),
                        });
                    }
                    let mut t = TraceTable::new(conductor, gauss_p);
                    if let Some(r) = get_u64(&kv, "rank")? {
                        t.rank = r;
                    }
                    if let Some(q) = get_u64(&kv, "q")? {
                        t.q = q;
                    }
                    if let Some(c) = get_u64(&kv, "cond_e")? {
                        t.cond_e = c;
                    }
                    if let Some(b) = get_u64(&kv, "b1")? {
                        t.b1 = b;
                    }
                    let en = get_u64(&kv, "e_num")?.unwrap_or(1);
                    let ed = get_u64(&kv, "e_den")?.unwrap_or(1);
                    if ed == 0 || en == 0 {
                        return Err(Error::TableFormat {
                            line: lineno,
                            reason: "e_num/e_den must be positive".into(),
                        });
                    }
                    t.e_breaks = BigRat::new(BigInt::from(en), BigInt::from(ed));
                    for k in kv.keys() {
                        if !matches!(
                            k.as_str(),
                            "conductor" | "gauss_p" | "rank" | "q" | "cond_e" | "b1" | "e_num"
                                | "e_den"
                        ) {
                            return Err(Error::TableFormat {
                                line: lineno,
                                reason: format!("unknown header key `{k}`"),
                            });
                        }
                    }
                    table = Some(t);
                }
                Some(t) => {
                    let phi = crate::arith::euler_phi(t.conductor) as usize;
                    if toks.len() != 3 + phi {
                        return Err(Error::TableFormat {
                            line: lineno,
                            reason: format!(
                                "expected degree, point, exponent and {phi} coordinates, got {} tokens",
                                toks.len()
                            ),
                        });
                    }
                    let parse_u64 = |s: &str, what: &str| -> Result<u64> {
                        s.parse::<u64>().map_err(|_| Error::TableFormat {
                            line: lineno,
                            reason: format!("bad {what}: {s}"),
                        })
                    };
                    let degree = parse_u64(toks[0], "degree")?;
                    let point = parse_u64(toks[1], "point id")?;
                    let exponent = parse_u64(toks[2], "exponent")?;
                    if degree == 0 {
                        return Err(Error::TableFormat {
                            line: lineno,
                            reason: "degree must be at least 1".into(),
                        });
                    }
                    let mut coords = Vec::with_capacity(phi);
                    for tok in &toks[3..] {
                        let (ns, ds) = tok.split_once('/').ok_or(Error::TableFormat {
                            line: lineno,
                            reason: format!("coordinate `{tok}` is not num/den"),
                        })?;
                        let n: BigInt = ns.parse().map_err(|_| Error::TableFormat {
                            line: lineno,
                            reason: format!("bad numerator in `{tok}`"),
                        })?;
                        let d: BigInt = ds.parse().map_err(|_| Error::TableFormat {
                            line: lineno,
                            reason: format!("bad denominator in `{tok}`"),
                        })?;
                        if d.is_zero() {
                            return Err(Error::TableFormat {
                                line: lineno,
                                reason: "zero denominator".into(),
                            });
                        }
                        coords.push(BigRat::new(n, d));
                    }
                    let numerator = CycNum::from_coeff_poly(t.conductor, coords);
                    if t.entries
                        .insert(
                            (degree, point),
                            NormalizedTrace {
                                numerator,
                                gauss_exponent: exponent,
                            },
                        )
                        .is_some()
                    {
                        return Err(Error::TableFormat {
                            line: lineno,
                            reason: format!("duplicate entry for degree {degree} point {point}"),
                        });
                    }
                }
            }
        }
        table.ok_or(Error::TableFormat {
            line: 0,
            reason: "empty table: no header line".into(),
        })
    }

    /// Canonical text form: full header, rows sorted by (degree, point).
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "conductor={} gauss_p={} rank={} q={} cond_e={} b1={} e_num={} e_den={}\n",
            self.conductor,
            self.gauss_p,
            self.rank,
            self.q,
            self.cond_e,
            self.b1,
            self.e_breaks.numer(),
            self.e_breaks.denom()
        );
        for (&(deg, pt), tr) in &self.entries {
            out.push_str(&format!("{deg} {pt} {}", tr.gauss_exponent));
            for c in tr.numerator.coord_strings() {
                out.push(' ');
                out.push_str(&c);
            }
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// the engine
// ---------------------------------------------------------------------------

/// Per-level precomputation for hypergeometric sums: discrete logs, the
/// trace of every generator power, and the norm twist that turns base-field
/// characters into level characters.
struct HypLevelCache {
    table: Arc<DlogTable>,
    /// tr_of_pow[e] = absolute trace of g^e.
    tr_of_pow: Vec<u64>,
    /// u with N_{L/𝔽_q}(g) = g_base^u, so χ_j(N(g^d)) = ζ_m^{j·u·d}.
    norm_dlog: u64,
}

/// Evaluates the family trace at points of extension fields.  Build the
/// levels you need first (`level_for_degree`, `extension_over`), then share
/// `&self` freely across worker threads.
pub struct TraceEngine {
    fam: SheafFamily,
    meta: FamilyMeta,
    tower: FieldTower,
    /// Level of 𝔽_q (0 unless f_deg > 1).
    level_q: usize,
    max_enum: u64,
    degree_level: HashMap<u64, usize>,
    ext_level: HashMap<(usize, u64), usize>,
    hyp_cache: Mutex<HashMap<usize, Arc<HypLevelCache>>>,
}

impl TraceEngine {
    pub fn new(fam: SheafFamily) -> Result<TraceEngine> {
        TraceEngine::with_budgets(
            fam,
            crate::finitefield::DEFAULT_ENUM_BUDGET,
            crate::finitefield::DEFAULT_DLOG_BUDGET,
        )
    }

    pub fn with_budgets(fam: SheafFamily, max_enum: u64, max_dlog: u64) -> Result<TraceEngine> {
        let meta = family_metadata(&fam)?;
        match &fam {
            SheafFamily::ArtinSchreier { p, n } => {
                if *p == 2 {
                    return Err(Error::UnsupportedCharacteristic {
                        p: 2,
                        context: "the Gauss-sum normalization needs an odd characteristic",
                    });
                }
                if !crate::arith::is_prime(*p) {
                    return Err(Error::NotPrime { n: *p });
                }
                if n % p == 0 {
                    return Err(Error::Param {
                        name: "nvar",
                        reason: format!(
                            "x^{n} + t·x is additive in characteristic {p}; the rank-{} \
                             local system needs p ∤ n",
                            n - 1
                        ),
                    });
                }
            }
            SheafFamily::Hypergeometric {
                p,
                a,
                b,
                m_char,
                chi_indices,
                rho_indices,
                ..
            } => {
                if !crate::arith::is_prime(*p) {
                    return Err(Error::NotPrime { n: *p });
                }
                if *p == 2 && a + b > 1 {
                    return Err(Error::UnsupportedCharacteristic {
                        p: 2,
                        context: "the Gauss-sum normalization needs an odd characteristic",
                    });
                }
                if chi_indices.len() != *a as usize || rho_indices.len() != *b as usize {
                    return Err(Error::Param {
                        name: "chi",
                        reason: format!(
                            "need {a} chi indices and {b} rho indices, got {} and {}",
                            chi_indices.len(),
                            rho_indices.len()
                        ),
                    });
                }
                if *m_char == 0 || (meta.q - 1) % m_char != 0 {
                    return Err(Error::CharOrder {
                        m: *m_char,
                        group_order: (meta.q - 1).to_string(),
                    });
                }
                for c in chi_indices {
                    if rho_indices.iter().any(|r| r % m_char == c % m_char) {
                        return Err(Error::Param {
                            name: "rho",
                            reason: format!(
                                "character sets must be disjoint; index {c} appears in both"
                            ),
                        });
                    }
                }
            }
            SheafFamily::Table(t) => {
                if !crate::arith::is_prime(t.gauss_p) {
                    return Err(Error::NotPrime { n: t.gauss_p });
                }
            }
        }
        let mut tower = FieldTower::with_budgets(meta.p, max_enum, max_dlog)?;
        let level_q = if meta.f_deg > 1 {
            tower.build_extension(0, meta.f_deg)?
        } else {
            0
        };
        Ok(TraceEngine {
            fam,
            meta,
            tower,
            level_q,
            max_enum,
            degree_level: HashMap::new(),
            ext_level: HashMap::new(),
            hyp_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn family(&self) -> &SheafFamily {
        &self.fam
    }

    pub fn metadata(&self) -> &FamilyMeta {
        &self.meta
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    /// Level holding 𝔽_{q^m}, built once over the 𝔽_q level.
    pub fn level_for_degree(&mut self, m: u64) -> Result<usize> {
        if m == 0 {
            return Err(Error::Param {
                name: "degree",
                reason: "degree must be at least 1".into(),
            });
        }
        if m == 1 {
            return Ok(self.level_q);
        }
        if let Some(&l) = self.degree_level.get(&m) {
            return Ok(l);
        }
        let l = self.tower.build_extension(self.level_q, m)?;
        self.degree_level.insert(m, l);
        Ok(l)
    }

    /// Degree-k extension over an existing level (for Φ(mk, t) with t
    /// embedded), cached per (base, k).
    pub fn extension_over(&mut self, base: usize, k: u64) -> Result<usize> {
        if k == 1 {
            return Ok(base);
        }
        if let Some(&l) = self.ext_level.get(&(base, k)) {
            return Ok(l);
        }
        let l = self.tower.build_extension(base, k)?;
        self.ext_level.insert((base, k), l);
        Ok(l)
    }

    /// Number of parameter points at a level: the whole field for the
    /// Artin–Schreier family (X = 𝔸¹), non-zero elements for the
    /// hypergeometric one (X = 𝔾_m).
    pub fn point_count(&self, level: usize) -> u128 {
        match self.fam {
            SheafFamily::ArtinSchreier { .. } => self.tower.size(level),
            SheafFamily::Hypergeometric { .. } => self.tower.size(level) - 1,
            SheafFamily::Table(_) => 0,
        }
    }

    /// The idx-th point at a level, in the fixed enumeration order used by
    /// reports and witnesses.
    pub fn point_by_index(&self, level: usize, idx: u64) -> FFElem {
        match self.fam {
            SheafFamily::ArtinSchreier { .. } => self.tower.from_rank(level, idx),
            SheafFamily::Hypergeometric { .. } => self.tower.from_rank(level, idx + 1),
            SheafFamily::Table(_) => unreachable!("table points are ids, not field elements"),
        }
    }

    /// Φ(deg, t) for the family, deg read off t's level.
    pub fn trace(&self, t: &FFElem) -> Result<NormalizedTrace> {
        match &self.fam {
            SheafFamily::ArtinSchreier { p, n } => self.trace_as(*p, *n, t),
            SheafFamily::Hypergeometric { .. } => self.trace_hyp(t),
            SheafFamily::Table(_) => Err(Error::Param {
                name: "family",
                reason: "table families store traces; use trace_table".into(),
            }),
        }
    }

    /// −Σ_{x∈𝔽_{p^m}} ψ(Tr(x^n + t·x)), exponent m.
    fn trace_as(&self, p: u64, n: u64, t: &FFElem) -> Result<NormalizedTrace> {
        let level = t.level();
        let mdeg = self.tower.abs_degree(level);
        let mut counts = vec![0i64; p as usize];
        for x in self.tower.enumerate(level)? {
            let xn = self.tower.pow(&x, n as u128);
            let tx = self.tower.mul(t, &x);
            let arg = self.tower.add(&xn, &tx);
            counts[self.tower.absolute_trace(&arg) as usize] += 1;
        }
        let big: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
        Ok(NormalizedTrace {
            numerator: CycNum::from_exponent_counts(p, &big).neg(),
            gauss_exponent: mdeg,
        })
    }

    fn hyp_level_cache(&self, level: usize) -> Result<Arc<HypLevelCache>> {
        let mut cache = self.hyp_cache.lock().unwrap();
        if let Some(c) = cache.get(&level) {
            return Ok(c.clone());
        }
        let table = self.tower.dlog_table(level)?;
        let group = table.group_order();
        let mut tr_of_pow = Vec::with_capacity(group as usize);
        let g = table.generator().clone();
        let mut cur = self.tower.one(level);
        for _ in 0..group {
            tr_of_pow.push(self.tower.absolute_trace(&cur));
            cur = self.tower.mul(&cur, &g);
        }
        // norm of the generator down to F_q, as a power of the base generator
        let norm_dlog = if level == self.level_q {
            1
        } else {
            let base_table = self.tower.dlog_table(self.level_q)?;
            let c = (self.tower.size(level) - 1) / (self.meta.q as u128 - 1);
            let nrm = self.tower.pow(&g, c);
            let down = self.tower.descend(&nrm, self.level_q)?;
            self.tower
                .dlog(&base_table, &down)
                .expect("norm of a generator is non-zero")
        };
        let entry = Arc::new(HypLevelCache {
            table,
            tr_of_pow,
            norm_dlog,
        });
        cache.insert(level, entry.clone());
        Ok(entry)
    }

    /// Hypergeometric sum at t ≠ 0: sign · Σ over (a+b−1)-tuples of the
    /// torus, with the last forward variable eliminated by
    /// x₁⋯x_a = t·y₁⋯y_b; everything runs in discrete-log space.
    fn trace_hyp(&self, t: &FFElem) -> Result<NormalizedTrace> {
        let (a, b, m_char, chi, rho) = match &self.fam {
            SheafFamily::Hypergeometric {
                a,
                b,
                m_char,
                chi_indices,
                rho_indices,
                ..
            } => (*a, *b, *m_char, chi_indices, rho_indices),
            _ => unreachable!(),
        };
        if self.tower.is_zero(t) {
            return Err(Error::Param {
                name: "t",
                reason: "hypergeometric points live on the torus; t must be non-zero".into(),
            });
        }
        let level = t.level();
        let abs = self.tower.abs_degree(level);
        let gauss_exponent = abs * (a + b - 1);
        let p = self.meta.p;
        let cond = p * m_char;

        let cache = self.hyp_level_cache(level)?;
        let group = cache.table.group_order();
        let free = (a + b - 1) as usize;
        // budget: group^free tuples
        let work = (0..free).try_fold(1u128, |acc, _| acc.checked_mul(group as u128));
        match work {
            Some(w) if w <= self.max_enum as u128 => {}
            _ => {
                return Err(Error::Budget {
                    what: "hypergeometric tuple count",
                    have: format!("{group}^{free}"),
                    cap: self.max_enum.to_string(),
                });
            }
        }
        let d_t = self
            .tower
            .dlog(&cache.table, t)
            .expect("non-zero point has a dlog");
        let u = cache.norm_dlog % group;

        // character exponent of variable with dlog d and character index j:
        // ζ_m^{j·u·d}; additive exponent from tr_of_pow
        let mut counts = vec![0i64; cond as usize];
        let mut dl = vec![0u64; free];
        loop {
            // dlogs: first a−1 forward variables, then the b backward ones
            let mut s_add: u64 = 0; // Σ tr(x_i) − Σ tr(y_j) mod p
            let mut s_chr: u64 = 0; // character exponent mod m
            let mut d_last = d_t % group; // dlog of the eliminated x_a
            for (i, &d) in dl.iter().enumerate() {
                if i < (a - 1) as usize {
                    s_add = (s_add + cache.tr_of_pow[d as usize]) % p;
                    s_chr = (s_chr + chi[i] % m_char * (u * d % group % m_char)) % m_char;
                    d_last = (d_last + group - d % group) % group;
                } else {
                    let j = i - (a - 1) as usize;
                    s_add = (s_add + p - cache.tr_of_pow[d as usize] % p) % p;
                    // conjugate character: negated exponent
                    s_chr = (s_chr + m_char - rho[j] % m_char * (u * d % group % m_char) % m_char)
                        % m_char;
                    d_last = (d_last + d) % group;
                }
            }
            s_add = (s_add + cache.tr_of_pow[d_last as usize]) % p;
            s_chr = (s_chr + chi[(a - 1) as usize] % m_char * (u * d_last % group % m_char))
                % m_char;
            // ζ_p^τ · ζ_m^σ = ζ_{pm}^{τ·m + σ·p}
            let e = (s_add * m_char + s_chr * p) % cond;
            counts[e as usize] += 1;

            // odometer
            let mut i = 0;
            loop {
                if i == free {
                    break;
                }
                dl[i] += 1;
                if dl[i] < group {
                    break;
                }
                dl[i] = 0;
                i += 1;
            }
            if i == free {
                break;
            }
        }
        let big: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
        let mut numerator = CycNum::from_exponent_counts(cond, &big);
        if (a + b - 1) % 2 == 1 {
            numerator = numerator.neg();
        }
        Ok(NormalizedTrace {
            numerator,
            gauss_exponent,
        })
    }

    /// Stored trace for a table family.
    pub fn trace_table(&self, degree: u64, point: u64) -> Result<NormalizedTrace> {
        match &self.fam {
            SheafFamily::Table(t) => t.get(degree, point).cloned(),
            _ => Err(Error::Param {
                name: "family",
                reason: "not a table family".into(),
            }),
        }
    }
}
