//! Explicit finite fields 𝔽_{p^f} and relative extensions, with
//! deterministic construction, enumeration, traces, discrete logs, and
//! character evaluation into [`crate::cyclotomic::CycNum`].
//!
//! A [`FieldTower`] is a forest of levels rooted at the prime field.  Each
//! level is a quotient of the polynomial ring over its base level by a
//! deterministically chosen irreducible, so the inclusion of a level into an
//! extension built over it is the literal coordinate map `x ↦ (x, 0, …, 0)`;
//! no minimal-polynomial root matching anywhere.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};

/// Element coordinates, relative to the tower: a prime-field residue at the
/// root, or a coordinate vector over the base level (length = relative
/// degree, ascending powers of the level generator).
#[derive(Debug, Clone, PartialEq, Eq)]
enum Rep {
    P(u64),
    E(Vec<Rep>),
}

/// Element of some level of a [`FieldTower`].  Only meaningful together
/// with the tower that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFElem {
    level: usize,
    rep: Rep,
}

impl FFElem {
    pub fn level(&self) -> usize {
        self.level
    }
}

struct LevelData {
    /// `None` for the prime field at level 0.
    base: Option<usize>,
    /// Relative degree over the base (1 for the prime field).
    degree: u64,
    abs_degree: u64,
    size: u128,
    /// Non-leading coefficients of the monic defining polynomial, ascending,
    /// as base-level reps.  Empty for the prime field.
    modulus: Vec<Rep>,
}

/// Precomputed discrete logarithms for one level: `log[rank(x)]` is the
/// exponent of the fixed generator giving `x`, with a sentinel at rank 0.
pub struct DlogTable {
    level: usize,
    group_order: u64,
    generator: FFElem,
    log: Vec<u64>,
}

const NO_LOG: u64 = u64::MAX;

impl DlogTable {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn generator(&self) -> &FFElem {
        &self.generator
    }
}

pub const DEFAULT_ENUM_BUDGET: u64 = 100_000_000;
pub const DEFAULT_DLOG_BUDGET: u64 = 1_000_000;

/// Prime field plus every extension built so far.  Immutable once the
/// needed levels exist; all evaluation methods take `&self` and the dlog
/// cache is internally synchronized, so scans can share one tower across
/// threads.
pub struct FieldTower {
    p: u64,
    levels: Vec<LevelData>,
    max_enumerate: u64,
    max_dlog: u64,
    dlog_cache: Mutex<HashMap<usize, Arc<DlogTable>>>,
}

impl FieldTower {
    /// Tower over 𝔽_p; level 0 is the prime field.
    pub fn new(p: u64) -> Result<FieldTower> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime { n: p });
        }
        Ok(FieldTower {
            p,
            levels: vec![LevelData {
                base: None,
                degree: 1,
                abs_degree: 1,
                size: p as u128,
                modulus: Vec::new(),
            }],
            max_enumerate: DEFAULT_ENUM_BUDGET,
            max_dlog: DEFAULT_DLOG_BUDGET,
            dlog_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_budgets(p: u64, max_enumerate: u64, max_dlog: u64) -> Result<FieldTower> {
        let mut t = FieldTower::new(p)?;
        t.max_enumerate = max_enumerate;
        t.max_dlog = max_dlog;
        Ok(t)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn size(&self, level: usize) -> u128 {
        self.levels[level].size
    }

    pub fn abs_degree(&self, level: usize) -> u64 {
        self.levels[level].abs_degree
    }

    pub fn base_of(&self, level: usize) -> Option<usize> {
        self.levels[level].base
    }

    /// Degree-k extension of `base`, with the lexicographically smallest
    /// monic irreducible of degree k over the base as defining polynomial
    /// (coefficients compared by enumeration rank, high degree first), so
    /// repeated builds agree bit for bit.
    pub fn build_extension(&mut self, base: usize, k: u64) -> Result<usize> {
        if base >= self.levels.len() {
            return Err(Error::Param {
                name: "level",
                reason: format!("no level {base} in this tower"),
            });
        }
        if k < 1 {
            return Err(Error::Param {
                name: "degree",
                reason: "extension degree must be at least 1".into(),
            });
        }
        let abs_degree = self.levels[base].abs_degree.checked_mul(k).ok_or(Error::Budget {
            what: "extension degree",
            have: format!("{} * {}", self.levels[base].abs_degree, k),
            cap: u64::MAX.to_string(),
        })?;
        let size = (self.p as u128)
            .checked_pow(abs_degree.try_into().map_err(|_| Error::Budget {
                what: "extension degree",
                have: abs_degree.to_string(),
                cap: u32::MAX.to_string(),
            })?)
            .ok_or(Error::Budget {
                what: "field size",
                have: format!("{}^{}", self.p, abs_degree),
                cap: u128::MAX.to_string(),
            })?;
        let modulus = self.smallest_irreducible(base, k);
        self.levels.push(LevelData {
            base: Some(base),
            degree: k,
            abs_degree,
            size,
            modulus,
        });
        Ok(self.levels.len() - 1)
    }

    /// First monic polynomial of degree k over `base` with no monic factor
    /// of degree ≤ k/2, scanning candidates in lexicographic order.
    fn smallest_irreducible(&self, base: usize, k: u64) -> Vec<Rep> {
        let k = k as usize;
        if k == 1 {
            // x itself: first candidate, always irreducible.
            return vec![self.rep_zero(base)];
        }
        let q = self.levels[base].size as u64;
        let mut digits = vec![0u64; k]; // digits[i] = rank of coeff of x^i
        loop {
            let coeffs: Vec<Rep> = digits
                .iter()
                .map(|&r| self.from_rank(base, r).rep)
                .collect();
            if self.is_irreducible(base, &coeffs) {
                return coeffs;
            }
            // odometer, constant term fastest
            let mut i = 0;
            loop {
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                i += 1;
                assert!(i < k, "no irreducible of degree {k} found");
            }
        }
    }

    /// Exhaustive factor search: reducible iff some monic divisor of degree
    /// 1..=k/2 divides.  Desk scale only.
    fn is_irreducible(&self, base: usize, non_leading: &[Rep]) -> bool {
        let k = non_leading.len();
        let q = self.levels[base].size as u64;
        let mut f: Vec<Rep> = non_leading.to_vec();
        f.push(self.rep_one(base));
        for d in 1..=(k / 2) {
            let mut digits = vec![0u64; d];
            loop {
                let mut g: Vec<Rep> = digits
                    .iter()
                    .map(|&r| self.from_rank(base, r).rep)
                    .collect();
                g.push(self.rep_one(base));
                let rem = self.fpoly_rem(base, &f, &g);
                if rem.iter().all(|c| self.rep_is_zero(c)) {
                    return false;
                }
                let mut i = 0;
                loop {
                    digits[i] += 1;
                    if digits[i] < q {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                    if i == d {
                        break;
                    }
                }
                if i == d {
                    break;
                }
            }
        }
        true
    }

    /// Remainder of `num` modulo monic `den`, coefficients at `level`.
    fn fpoly_rem(&self, level: usize, num: &[Rep], den: &[Rep]) -> Vec<Rep> {
        let dd = den.len() - 1;
        let mut rem = num.to_vec();
        while rem.len() > dd {
            let top = rem.pop().unwrap();
            if !self.rep_is_zero(&top) {
                let off = rem.len() - dd;
                for j in 0..dd {
                    let t = self.rep_mul(level, &top, &den[j]);
                    rem[off + j] = self.rep_sub(level, &rem[off + j], &t);
                }
            }
        }
        rem
    }

    // -- element constructors -----------------------------------------------

    pub fn zero(&self, level: usize) -> FFElem {
        FFElem {
            level,
            rep: self.rep_zero(level),
        }
    }

    pub fn one(&self, level: usize) -> FFElem {
        FFElem {
            level,
            rep: self.rep_one(level),
        }
    }

    /// Image of the integer v under ℤ → 𝔽_p ⊆ level.
    pub fn from_int(&self, level: usize, v: i64) -> FFElem {
        let r = v.rem_euclid(self.p as i64) as u64;
        FFElem {
            level,
            rep: self.rep_from_prime(level, r),
        }
    }

    /// Class of the level's defining generator (the image of x).
    pub fn generator_elem(&self, level: usize) -> FFElem {
        let lv = &self.levels[level];
        match lv.base {
            None => self.from_int(level, 0),
            Some(b) => {
                let mut coords = vec![self.rep_zero(b); lv.degree as usize];
                if lv.degree >= 2 {
                    coords[1] = self.rep_one(b);
                } else {
                    // degree-1 modulus is x + c, so the generator is −c
                    coords[0] = self.rep_neg(b, &lv.modulus[0]);
                }
                FFElem {
                    level,
                    rep: Rep::E(coords),
                }
            }
        }
    }

    // -- rep-level arithmetic -----------------------------------------------

    fn rep_zero(&self, level: usize) -> Rep {
        match self.levels[level].base {
            None => Rep::P(0),
            Some(b) => Rep::E(vec![self.rep_zero(b); self.levels[level].degree as usize]),
        }
    }

    fn rep_one(&self, level: usize) -> Rep {
        match self.levels[level].base {
            None => Rep::P(1),
            Some(b) => {
                let mut coords = vec![self.rep_zero(b); self.levels[level].degree as usize];
                coords[0] = self.rep_one(b);
                Rep::E(coords)
            }
        }
    }

    fn rep_from_prime(&self, level: usize, v: u64) -> Rep {
        match self.levels[level].base {
            None => Rep::P(v % self.p),
            Some(b) => {
                let mut coords = vec![self.rep_zero(b); self.levels[level].degree as usize];
                coords[0] = self.rep_from_prime(b, v);
                Rep::E(coords)
            }
        }
    }

    fn rep_is_zero(&self, a: &Rep) -> bool {
        match a {
            Rep::P(v) => *v == 0,
            Rep::E(coords) => coords.iter().all(|c| self.rep_is_zero(c)),
        }
    }

    fn rep_add(&self, level: usize, a: &Rep, b: &Rep) -> Rep {
        match (a, b) {
            (Rep::P(x), Rep::P(y)) => Rep::P((x + y) % self.p),
            (Rep::E(xs), Rep::E(ys)) => {
                let base = self.levels[level].base.unwrap();
                Rep::E(
                    xs.iter()
                        .zip(ys)
                        .map(|(x, y)| self.rep_add(base, x, y))
                        .collect(),
                )
            }
            _ => unreachable!("mismatched reps at level {level}"),
        }
    }

    fn rep_neg(&self, level: usize, a: &Rep) -> Rep {
        match a {
            Rep::P(x) => Rep::P((self.p - x) % self.p),
            Rep::E(xs) => {
                let base = self.levels[level].base.unwrap();
                Rep::E(xs.iter().map(|x| self.rep_neg(base, x)).collect())
            }
        }
    }

    fn rep_sub(&self, level: usize, a: &Rep, b: &Rep) -> Rep {
        self.rep_add(level, a, &self.rep_neg(level, b))
    }

    fn rep_mul(&self, level: usize, a: &Rep, b: &Rep) -> Rep {
        match (a, b) {
            (Rep::P(x), Rep::P(y)) => Rep::P(x * y % self.p),
            (Rep::E(xs), Rep::E(ys)) => {
                let lv = &self.levels[level];
                let base = lv.base.unwrap();
                let k = lv.degree as usize;
                let mut prod = vec![self.rep_zero(base); 2 * k - 1];
                for (i, x) in xs.iter().enumerate() {
                    if self.rep_is_zero(x) {
                        continue;
                    }
                    for (j, y) in ys.iter().enumerate() {
                        if !self.rep_is_zero(y) {
                            let t = self.rep_mul(base, x, y);
                            prod[i + j] = self.rep_add(base, &prod[i + j], &t);
                        }
                    }
                }
                // reduce modulo the monic defining polynomial
                for i in (k..prod.len()).rev() {
                    if self.rep_is_zero(&prod[i]) {
                        continue;
                    }
                    let top = prod[i].clone();
                    for j in 0..k {
                        let t = self.rep_mul(base, &top, &lv.modulus[j]);
                        prod[i - k + j] = self.rep_sub(base, &prod[i - k + j], &t);
                    }
                }
                prod.truncate(k);
                Rep::E(prod)
            }
            _ => unreachable!("mismatched reps at level {level}"),
        }
    }

    // -- public element arithmetic ------------------------------------------

    fn check_level(&self, a: &FFElem, b: &FFElem) {
        assert_eq!(a.level, b.level, "elements from different levels");
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.check_level(a, b);
        FFElem {
            level: a.level,
            rep: self.rep_add(a.level, &a.rep, &b.rep),
        }
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.check_level(a, b);
        FFElem {
            level: a.level,
            rep: self.rep_sub(a.level, &a.rep, &b.rep),
        }
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        FFElem {
            level: a.level,
            rep: self.rep_neg(a.level, &a.rep),
        }
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.check_level(a, b);
        FFElem {
            level: a.level,
            rep: self.rep_mul(a.level, &a.rep, &b.rep),
        }
    }

    pub fn is_zero(&self, a: &FFElem) -> bool {
        self.rep_is_zero(&a.rep)
    }

    pub fn pow(&self, a: &FFElem, mut e: u128) -> FFElem {
        let mut acc = self.one(a.level);
        let mut sq = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Inverse of a non-zero element, as a^{q−2}.
    pub fn inv(&self, a: &FFElem) -> Result<FFElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero { conductor: self.p });
        }
        Ok(self.pow(a, self.levels[a.level].size - 2))
    }

    // -- enumeration ----------------------------------------------------------

    /// Enumeration rank: mixed-radix value of the coordinates, first
    /// coordinate most significant, recursively down the tower.
    pub fn rank(&self, x: &FFElem) -> u128 {
        self.rep_rank(x.level, &x.rep)
    }

    fn rep_rank(&self, level: usize, a: &Rep) -> u128 {
        match a {
            Rep::P(v) => *v as u128,
            Rep::E(coords) => {
                let base = self.levels[level].base.unwrap();
                let qb = self.levels[base].size;
                coords
                    .iter()
                    .fold(0u128, |acc, c| acc * qb + self.rep_rank(base, c))
            }
        }
    }

    pub fn from_rank(&self, level: usize, rank: u64) -> FFElem {
        FFElem {
            level,
            rep: self.rep_from_rank(level, rank as u128),
        }
    }

    fn rep_from_rank(&self, level: usize, mut rank: u128) -> Rep {
        match self.levels[level].base {
            None => Rep::P(rank as u64 % self.p),
            Some(b) => {
                let k = self.levels[level].degree as usize;
                let qb = self.levels[b].size;
                let mut coords = vec![self.rep_zero(b); k];
                for i in (0..k).rev() {
                    coords[i] = self.rep_from_rank(b, rank % qb);
                    rank /= qb;
                }
                Rep::E(coords)
            }
        }
    }

    /// All elements of the level, each exactly once, in rank order
    /// (lexicographic in coordinates).
    pub fn enumerate(&self, level: usize) -> Result<impl Iterator<Item = FFElem> + '_> {
        let size = self.levels[level].size;
        if size > self.max_enumerate as u128 {
            return Err(Error::Budget {
                what: "field enumeration size",
                have: size.to_string(),
                cap: self.max_enumerate.to_string(),
            });
        }
        Ok((0..size as u64).map(move |r| self.from_rank(level, r)))
    }

    // -- embeddings and traces -------------------------------------------------

    /// Canonical inclusion of `x` into `target`, which must sit above
    /// `x.level` in the tower (any number of hops).
    pub fn embed(&self, x: &FFElem, target: usize) -> Result<FFElem> {
        if x.level == target {
            return Ok(x.clone());
        }
        // collect the chain target → … → x.level
        let mut hops = Vec::new();
        let mut cur = target;
        while cur != x.level {
            match self.levels[cur].base {
                Some(b) => {
                    hops.push(cur);
                    cur = b;
                }
                None => {
                    return Err(Error::UnrelatedLevels {
                        level: target,
                        base: x.level,
                    })
                }
            }
        }
        let mut rep = x.rep.clone();
        for &lv in hops.iter().rev() {
            let base = self.levels[lv].base.unwrap();
            let mut coords = vec![self.rep_zero(base); self.levels[lv].degree as usize];
            coords[0] = rep;
            rep = Rep::E(coords);
        }
        Ok(FFElem { level: target, rep })
    }

    /// Inverse of [`embed`](Self::embed) for elements that lie in the image:
    /// peels coordinate layers down to `base`, failing if any layer has a
    /// non-zero coordinate above the constant one.
    pub fn descend(&self, x: &FFElem, base: usize) -> Result<FFElem> {
        // verify base is an ancestor first so we report the right error
        let mut cur = x.level;
        while cur != base {
            cur = self.levels[cur].base.ok_or(Error::UnrelatedLevels {
                level: x.level,
                base,
            })?;
        }
        let mut elem = x.clone();
        while elem.level != base {
            let lower = self.levels[elem.level].base.unwrap();
            match elem.rep {
                Rep::E(mut coords) => {
                    for extra in &coords[1..] {
                        if !self.rep_is_zero(extra) {
                            return Err(Error::Param {
                                name: "element",
                                reason: "does not lie in the requested subfield".into(),
                            });
                        }
                    }
                    elem = FFElem {
                        level: lower,
                        rep: coords.swap_remove(0),
                    };
                }
                Rep::P(_) => unreachable!("extension levels use coordinate reps"),
            }
        }
        Ok(elem)
    }

    /// Tr_{L/B}(x) = Σ_{i<k} x^{|B|^i}, landing in the base level.
    fn relative_trace(&self, x: &FFElem) -> FFElem {
        let lv = &self.levels[x.level];
        let base = lv.base.expect("relative trace above the prime field");
        let qb = self.levels[base].size;
        let mut acc = x.clone();
        let mut fr = x.clone();
        for _ in 1..lv.degree {
            fr = self.pow(&fr, qb);
            acc = self.add(&acc, &fr);
        }
        match acc.rep {
            Rep::E(mut coords) => {
                for extra in &coords[1..] {
                    assert!(
                        self.rep_is_zero(extra),
                        "relative trace did not land in the base level"
                    );
                }
                FFElem {
                    level: base,
                    rep: coords.swap_remove(0),
                }
            }
            Rep::P(_) => unreachable!(),
        }
    }

    /// Absolute trace down to 𝔽_p, composed transitively through the tower;
    /// returns the residue in 0..p.
    pub fn absolute_trace(&self, x: &FFElem) -> u64 {
        let mut cur = x.clone();
        while cur.level != 0 || matches!(cur.rep, Rep::E(_)) {
            if self.levels[cur.level].base.is_none() {
                break;
            }
            cur = self.relative_trace(&cur);
        }
        match cur.rep {
            Rep::P(v) => v,
            Rep::E(_) => unreachable!(),
        }
    }

    // -- discrete logs and characters -------------------------------------------

    /// Full dlog table for the level, cached.  The generator is the first
    /// element in enumeration order with multiplicative order q−1.
    pub fn dlog_table(&self, level: usize) -> Result<Arc<DlogTable>> {
        if let Some(t) = self.dlog_cache.lock().unwrap().get(&level) {
            return Ok(t.clone());
        }
        let size = self.levels[level].size;
        if size > self.max_dlog as u128 {
            return Err(Error::Budget {
                what: "dlog table size",
                have: size.to_string(),
                cap: self.max_dlog.to_string(),
            });
        }
        let size = size as u64;
        let n = size - 1;
        let prime_cofactors: Vec<u128> = crate::arith::factorize(n)
            .iter()
            .map(|&(l, _)| (n / l) as u128)
            .collect();
        let mut generator = None;
        for r in 1..size {
            let x = self.from_rank(level, r);
            if self.is_zero(&x) {
                continue;
            }
            let primitive = prime_cofactors
                .iter()
                .all(|&e| self.pow(&x, e) != self.one(level));
            if primitive {
                generator = Some(x);
                break;
            }
        }
        let generator = generator.expect("cyclic group has a generator");
        let mut log = vec![NO_LOG; size as usize];
        let mut cur = self.one(level);
        for e in 0..n {
            let r = self.rank(&cur) as usize;
            debug_assert_eq!(log[r], NO_LOG);
            log[r] = e;
            cur = self.mul(&cur, &generator);
        }
        let table = Arc::new(DlogTable {
            level,
            group_order: n,
            generator,
            log,
        });
        self.dlog_cache
            .lock()
            .unwrap()
            .insert(level, table.clone());
        Ok(table)
    }

    /// Exponent e with g^e = x, or None for x = 0.
    pub fn dlog(&self, table: &DlogTable, x: &FFElem) -> Option<u64> {
        assert_eq!(table.level, x.level, "dlog table from a different level");
        let e = table.log[self.rank(x) as usize];
        if e == NO_LOG {
            None
        } else {
            Some(e)
        }
    }

    /// ψ(x) = ζ_p^{Tr(x)}, the fixed non-trivial additive character.
    pub fn additive_char(&self, x: &FFElem) -> CycNum {
        CycNum::root_of_unity(self.p, self.absolute_trace(x))
    }

    /// χ_j(x) = ζ_m^{j·dlog(x)}, normalized so χ_j(g) = ζ_m^j; requires
    /// m | q−1 and x ≠ 0.
    pub fn mult_char(&self, table: &DlogTable, j: u64, m: u64, x: &FFElem) -> Result<CycNum> {
        if m == 0 || table.group_order % m != 0 {
            return Err(Error::CharOrder {
                m,
                group_order: table.group_order.to_string(),
            });
        }
        let e = self.dlog(table, x).ok_or(Error::Param {
            name: "x",
            reason: "multiplicative character of zero".into(),
        })?;
        Ok(CycNum::root_of_unity(m, (e % m) * (j % m) % m))
    }

    /// Level description for reports: defining polynomials as coefficient
    /// rank lists (non-leading, ascending), innermost first.
    pub fn describe(&self, level: usize) -> serde_json::Value {
        let mut chain = Vec::new();
        let mut cur = level;
        while let Some(b) = self.levels[cur].base {
            let ranks: Vec<u64> = self.levels[cur]
                .modulus
                .iter()
                .map(|c| self.rep_rank(b, c) as u64)
                .collect();
            chain.push(serde_json::json!({
                "degree": self.levels[cur].degree,
                "modulus": ranks,
            }));
            cur = b;
        }
        chain.reverse();
        serde_json::json!({ "p": self.p, "chain": chain })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{cyc_arith, CycNum, CycOp};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_build_extension_examples() {
        let mut t = FieldTower::new(2).unwrap();
        let l = t.build_extension(0, 1).unwrap();
        assert_eq!(t.size(l), 2);

        let mut t = FieldTower::new(3).unwrap();
        let l9 = t.build_extension(0, 2).unwrap();
        assert_eq!(t.size(l9), 9);
        assert_eq!(t.size(l9) - 1, 8);
        let l729 = t.build_extension(l9, 3).unwrap();
        assert_eq!(t.size(l729), 3u128.pow(6));
        assert_eq!(t.abs_degree(l729), 6);
    }

    #[test]
    fn test_defining_polys_deterministic_and_irreducible() {
        // F_9 gets x^2 + 1 (x^2 and x^2-th candidates before it are reducible)
        let mut t = FieldTower::new(3).unwrap();
        let l9 = t.build_extension(0, 2).unwrap();
        let desc = t.describe(l9);
        assert_eq!(desc["chain"][0]["modulus"], serde_json::json!([1, 0]));

        // rebuilding gives the identical description
        let mut t2 = FieldTower::new(3).unwrap();
        let l9b = t2.build_extension(0, 2).unwrap();
        assert_eq!(t2.describe(l9b), desc);

        // spot-check irreducibility exhaustively for a few shapes
        for (p, k) in [(2u64, 4u64), (3, 3), (5, 3), (2, 6)] {
            let mut t = FieldTower::new(p).unwrap();
            let l = t.build_extension(0, k).unwrap();
            // no element of the level of size p^d for d | k, d < k is a root
            // of x^{p^k} = x only when it lies in a proper subfield; instead
            // verify directly: the generator has degree exactly k, i.e. its
            // Frobenius orbit has length k.
            let g = t.generator_elem(l);
            let mut orbit = 1;
            let mut fr = t.pow(&g, p as u128);
            while fr != g {
                fr = t.pow(&fr, p as u128);
                orbit += 1;
            }
            assert_eq!(orbit, k, "generator orbit for p={p}, k={k}");
        }
    }

    #[test]
    fn test_absolute_trace_examples() {
        let mut t = FieldTower::new(3).unwrap();
        let l = t.build_extension(0, 4).unwrap();
        assert_eq!(t.absolute_trace(&t.zero(l)), 0);
        assert_eq!(t.absolute_trace(&t.one(l)), 4 % 3);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, k) in [(2u64, 6u64), (5, 2), (7, 2)] {
            let mut t = FieldTower::new(p).unwrap();
            let l = t.build_extension(0, k).unwrap();
            let size = t.size(l) as u64;
            for _ in 0..20 {
                let x = t.from_rank(l, rng.gen_range(0..size));
                let xp = t.pow(&x, p as u128);
                assert_eq!(t.absolute_trace(&x), t.absolute_trace(&xp));
            }
        }
    }

    #[test]
    fn test_trace_transitivity() {
        // composed relative traces equal the direct sum over p-power
        // Frobenius, for towers of total degree <= 12
        let chains: &[&[u64]] = &[&[12], &[2, 6], &[2, 2, 3], &[3, 2, 2], &[4, 3]];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in &[2u64, 3, 5] {
            for chain in chains {
                let mut t = FieldTower::new(p).unwrap();
                let mut lv = 0;
                for &k in *chain {
                    lv = t.build_extension(lv, k).unwrap();
                }
                let d = t.abs_degree(lv);
                assert_eq!(d, 12);
                for _ in 0..8 {
                    let x = t.from_rank(lv, rng.gen_range(0..u32::MAX as u64) % 9973);
                    // direct: sum of x^{p^i} over i < d
                    let mut s = x.clone();
                    let mut fr = x.clone();
                    for _ in 1..d {
                        fr = t.pow(&fr, p as u128);
                        s = t.add(&s, &fr);
                    }
                    let tr = t.absolute_trace(&x);
                    assert_eq!(s, t.embed(&t.from_int(0, tr as i64), lv).unwrap());
                }
            }
        }
    }

    #[test]
    fn test_enumerate_counts_and_budget() {
        let mut t = FieldTower::new(3).unwrap();
        let l9 = t.build_extension(0, 2).unwrap();
        assert_eq!(t.enumerate(0).unwrap().count(), 3);
        assert_eq!(t.enumerate(l9).unwrap().count(), 9);

        let mut t = FieldTower::new(2).unwrap();
        let l32 = t.build_extension(0, 5).unwrap();
        let all: Vec<FFElem> = t.enumerate(l32).unwrap().collect();
        assert_eq!(all.len(), 32);
        for (i, x) in all.iter().enumerate() {
            assert_eq!(t.rank(x), i as u128);
        }

        let mut t = FieldTower::with_budgets(2, 10, 10).unwrap();
        let l16 = t.build_extension(0, 4).unwrap();
        assert!(matches!(t.enumerate(l16), Err(Error::Budget { .. })));
    }

    #[test]
    fn test_embed() {
        let mut t = FieldTower::new(2).unwrap();
        let l4 = t.build_extension(0, 2).unwrap();
        let l64 = t.build_extension(l4, 3).unwrap();
        let sibling = t.build_extension(0, 3).unwrap();

        let x = t.from_rank(l4, 3);
        assert_eq!(t.embed(&x, l4).unwrap(), x);

        let y = t.embed(&x, l64).unwrap();
        assert_eq!(y.level(), l64);
        // image is one of the enumerated elements
        assert!(t.rank(&y) < t.size(l64));
        // trace relation: Tr_{L'/p}(embed x) = ([L':L] mod p) * Tr_{L/p}(x)
        let k = t.abs_degree(l64) / t.abs_degree(l4);
        assert_eq!(
            t.absolute_trace(&y),
            (k % 2) * t.absolute_trace(&x) % 2
        );
        // Frobenius orbit of the image divides the absolute degree
        let mut orbit = 1;
        let mut fr = t.pow(&y, 2);
        while fr != y {
            fr = t.pow(&fr, 2);
            orbit += 1;
        }
        assert_eq!(t.abs_degree(l64) % orbit, 0);

        // multi-hop: prime field into the top level
        let one = t.from_int(0, 1);
        assert_eq!(t.embed(&one, l64).unwrap(), t.one(l64));
        // siblings are unrelated
        assert!(matches!(
            t.embed(&x, sibling),
            Err(Error::UnrelatedLevels { .. })
        ));
    }

    #[test]
    fn test_dlog_table() {
        // F_7: 3 is the smallest generator
        let t = FieldTower::new(7).unwrap();
        let table = t.dlog_table(0).unwrap();
        assert_eq!(t.rank(table.generator()), 3);
        assert_eq!(t.dlog(&table, &t.one(0)), Some(0));
        assert_eq!(t.dlog(&table, table.generator()), Some(1));
        assert_eq!(t.dlog(&table, &t.zero(0)), None);
        let mut seen: Vec<u64> = t
            .enumerate(0)
            .unwrap()
            .filter_map(|x| t.dlog(&table, &x))
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);

        // F_9 = F_3[x]/(x^2+1): x has order 4, 1+x is the first generator
        let mut t = FieldTower::new(3).unwrap();
        let l9 = t.build_extension(0, 2).unwrap();
        let table = t.dlog_table(l9).unwrap();
        assert_eq!(t.rank(table.generator()), 4);
        assert_eq!(table.group_order(), 8);

        // budget
        let mut t = FieldTower::with_budgets(2, 1 << 20, 10).unwrap();
        let l16 = t.build_extension(0, 4).unwrap();
        assert!(matches!(t.dlog_table(l16), Err(Error::Budget { .. })));
    }

    #[test]
    fn test_additive_char() {
        let t = FieldTower::new(5).unwrap();
        assert!(t.additive_char(&t.zero(0)).is_one());
        let mut sum = CycNum::zero(5);
        for x in t.enumerate(0).unwrap() {
            sum = cyc_arith(&sum, &t.additive_char(&x), CycOp::Add).unwrap();
        }
        assert!(sum.is_zero());

        let mut t = FieldTower::new(7).unwrap();
        let l49 = t.build_extension(0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = t.from_rank(l49, rng.gen_range(0..49));
            let y = t.from_rank(l49, rng.gen_range(0..49));
            let lhs = t.additive_char(&t.add(&x, &y));
            let rhs = cyc_arith(
                &t.additive_char(&x),
                &t.additive_char(&y),
                CycOp::Mul,
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn test_mult_char() {
        let t = FieldTower::new(7).unwrap();
        let table = t.dlog_table(0).unwrap();
        assert!(t.mult_char(&table, 1, 3, &t.one(0)).unwrap().is_one());

        // order-2 character is the quadratic residue symbol (Euler's criterion)
        for r in 1..7u64 {
            let x = t.from_rank(0, r);
            let chi = t.mult_char(&table, 1, 2, &x).unwrap();
            let euler = t.pow(&x, 3); // x^{(7-1)/2}
            if euler == t.one(0) {
                assert!(chi.is_one(), "x = {r} is a QR");
            } else {
                assert_eq!(chi, CycNum::from_int(2, -1), "x = {r} is a non-QR");
            }
        }

        // full character sum vanishes for non-trivial characters
        let mut sum = CycNum::zero(3);
        for r in 1..7 {
            let chi = t.mult_char(&table, 1, 3, &t.from_rank(0, r)).unwrap();
            sum = cyc_arith(&sum, &chi, CycOp::Add).unwrap();
        }
        assert!(sum.is_zero());

        let mut t9 = FieldTower::new(3).unwrap();
        let l9 = t9.build_extension(0, 2).unwrap();
        let table9 = t9.dlog_table(l9).unwrap();
        let mut sum = CycNum::zero(8);
        for x in t9.enumerate(l9).unwrap() {
            if t9.is_zero(&x) {
                continue;
            }
            let chi = t9.mult_char(&table9, 1, 8, &x).unwrap();
            sum = cyc_arith(&sum, &chi, CycOp::Add).unwrap();
        }
        assert!(sum.is_zero());

        // m must divide the group order
        assert!(matches!(
            t.mult_char(&table, 1, 5, &t.one(0)),
            Err(Error::CharOrder { m: 5, .. })
        ));
        // zero is rejected
        assert!(matches!(
            t.mult_char(&table, 1, 2, &t.zero(0)),
            Err(Error::Param { name: "x", .. })
        ));
    }

    #[test]
    fn test_inv_and_pow() {
        let mut t = FieldTower::new(5).unwrap();
        let l25 = t.build_extension(0, 2).unwrap();
        for r in 1..25 {
            let x = t.from_rank(l25, r);
            let xi = t.inv(&x).unwrap();
            assert_eq!(t.mul(&x, &xi), t.one(l25));
        }
        assert!(t.inv(&t.zero(l25)).is_err());
        assert_eq!(t.pow(&t.from_int(0, 2), 0), t.one(0));
    }
}
