//! `finmono` — effective finiteness bounds for monodromy of exponential-sum
//! families, plus Frobenius trace/eigenvalue scans at desk scale.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use finmono::bounds::{self, NBound, DEFAULT_DIGIT_BUDGET};
use finmono::cyclotomic::{quadratic_gauss_sum, CycNum};
use finmono::finitefield::FieldTower;
use finmono::frobcheck::{newton_char_poly, power_sum_integrality_oracle};
use finmono::pipeline::{self, BoundChoice, Criterion, ScanBudget, VerdictKind};
use finmono::sheaftrace::{SheafFamily, TraceEngine, TraceTable};

#[derive(Parser)]
#[command(
    name = "finmono",
    version,
    about = "Effective bounds and Frobenius scans for finiteness of monodromy"
)]
struct Cli {
    /// Defaults file with plain `key = value` lines (flags win on conflict).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the effective degree bounds for a family or raw parameters.
    Bound(BoundArgs),
    /// Scan all points of all extension degrees against a criterion.
    Scan(ScanArgs),
    /// Run the identity and randomized cross-check suites.
    Oracle(OracleArgs),
    /// Quick end-to-end smoke test of every module.
    Selftest,
}

#[derive(Args, Default)]
struct BoundArgs {
    /// `as` (Artin–Schreier x^n + t·x) or `hyp` (hypergeometric).
    #[arg(long)]
    family: Option<String>,
    /// Raw curve-theorem parameters (r, q, b1, e-breaks, …).
    #[arg(long)]
    curve: bool,
    /// Raw general-theorem parameters (r, q, C, ambient-n, c-x, …).
    #[arg(long)]
    general: bool,
    /// Which bound to surface as N: eigen | trace | traces.
    #[arg(long)]
    criterion: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    /// Artin–Schreier exponent n.
    #[arg(long)]
    nvar: Option<u64>,
    /// Hypergeometric character order m.
    #[arg(long)]
    m: Option<u64>,
    /// Field degree f with q = p^f (default: smallest f with m | p^f − 1).
    #[arg(long)]
    f_deg: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    q: Option<String>,
    /// Complexity bound C (general theorem).
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    ambient_n: Option<u64>,
    /// Complexity c_u(X) of the parameter variety.
    #[arg(long)]
    c_x: Option<String>,
    /// Conductor of the coefficient field E.
    #[arg(long)]
    cond_e: Option<u64>,
    /// Ramification index of p in E.
    #[arg(long)]
    f_ram: Option<u64>,
    #[arg(long)]
    b1: Option<u64>,
    /// Break sum Σe_x as a rational, e.g. `1` or `3/2`.
    #[arg(long)]
    e_breaks: Option<String>,
    /// Degree of E over its p-local base (general theorem).
    #[arg(long)]
    d_ext: Option<u64>,
    /// Decimal-digit cap before N is reported as a magnitude only.
    #[arg(long)]
    digit_budget: Option<u64>,
}

#[derive(Args, Default)]
struct ScanArgs {
    /// `as` or `hyp`; or use `--table FILE`.
    #[arg(long)]
    family: Option<String>,
    /// Trace-table file to scan instead of an engine family.
    #[arg(long)]
    table: Option<PathBuf>,
    /// eigen | trace.
    #[arg(long)]
    criterion: Option<String>,
    /// Coverage target: auto | eigen | trace | traces.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    nvar: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    f_deg: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    /// Comma-separated forward character exponents, e.g. `0,1`.
    #[arg(long)]
    chi: Option<String>,
    /// Comma-separated backward character exponents.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    max_degree: Option<u64>,
    #[arg(long)]
    max_field_size: Option<String>,
    #[arg(long)]
    max_points: Option<String>,
    /// Worker threads (the report is identical for any value).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-point trace rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Default)]
struct OracleArgs {
    /// all | mlcm | adams | lemma33 | hasse.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    rmax: Option<u64>,
    #[arg(long)]
    mmax: Option<u64>,
    #[arg(long)]
    pmax: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
}

// ---------------------------------------------------------------------------
// config files and environment
// ---------------------------------------------------------------------------

fn load_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn fill<T: FromStr>(slot: &mut Option<T>, cfg: &HashMap<String, String>, key: &str) -> Result<()> {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(
                v.parse()
                    .map_err(|_| anyhow!("config key `{key}`: cannot parse `{v}`"))?,
            );
        }
    }
    Ok(())
}

fn fill_flag(slot: &mut bool, cfg: &HashMap<String, String>, key: &str) -> Result<()> {
    if !*slot {
        if let Some(v) = cfg.get(key) {
            *slot = v
                .parse()
                .map_err(|_| anyhow!("config key `{key}`: expected true/false, got `{v}`"))?;
        }
    }
    Ok(())
}

/// FINMONO_MAX_MEMORY (bytes) caps the largest field level (≈16 bytes per
/// element across the dlog tables) and the bound-report digit budget.
struct EnvCaps {
    field_cap: Option<BigInt>,
    digit_budget: Option<u64>,
}

fn env_caps() -> Result<EnvCaps> {
    match std::env::var("FINMONO_MAX_MEMORY") {
        Err(_) => Ok(EnvCaps {
            field_cap: None,
            digit_budget: None,
        }),
        Ok(s) => {
            let bytes: u64 = s
                .parse()
                .map_err(|_| anyhow!("FINMONO_MAX_MEMORY: expected bytes, got `{s}`"))?;
            Ok(EnvCaps {
                field_cap: Some(BigInt::from((bytes / 16).max(2))),
                digit_budget: Some((bytes / 1000).clamp(60, DEFAULT_DIGIT_BUDGET)),
            })
        }
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad rational `{s}`"))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad rational `{s}`"))?;
    if d == BigInt::from(0) {
        bail!("bad rational `{s}`: zero denominator");
    }
    Ok(BigRational::new(n, d))
}

fn parse_bigint(s: &str, flag: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| anyhow!("--{flag}: expected an integer, got `{s}`"))
}

fn parse_index_list(s: &str, flag: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| anyhow!("--{flag}: bad index `{t}`"))
        })
        .collect()
}

fn minimal_f_deg(p: u64, m: u64) -> Result<u64> {
    if m == 1 {
        return Ok(1);
    }
    if m % p == 0 {
        bail!("--m: character order {m} cannot be divisible by p = {p}");
    }
    let mut q = 1u128;
    for f in 1..=63u64 {
        q *= p as u128;
        if (q - 1) % m as u128 == 0 {
            return Ok(f);
        }
    }
    bail!("--m: no field of characteristic {p} of degree <= 63 has order-{m} characters")
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("missing required flag --{flag}"))
}

fn cmd_bound(mut args: BoundArgs, cfg: &HashMap<String, String>) -> Result<u8> {
    fill(&mut args.family, cfg, "family")?;
    fill_flag(&mut args.curve, cfg, "curve")?;
    fill_flag(&mut args.general, cfg, "general")?;
    fill(&mut args.criterion, cfg, "criterion")?;
    fill(&mut args.p, cfg, "p")?;
    fill(&mut args.nvar, cfg, "nvar")?;
    fill(&mut args.m, cfg, "m")?;
    fill(&mut args.f_deg, cfg, "f-deg")?;
    fill(&mut args.a, cfg, "a")?;
    fill(&mut args.b, cfg, "b")?;
    fill(&mut args.r, cfg, "r")?;
    fill(&mut args.q, cfg, "q")?;
    fill(&mut args.c, cfg, "c")?;
    fill(&mut args.ambient_n, cfg, "ambient-n")?;
    fill(&mut args.c_x, cfg, "c-x")?;
    fill(&mut args.cond_e, cfg, "cond-e")?;
    fill(&mut args.f_ram, cfg, "f-ram")?;
    fill(&mut args.b1, cfg, "b1")?;
    fill(&mut args.e_breaks, cfg, "e-breaks")?;
    fill(&mut args.d_ext, cfg, "d-ext")?;
    fill(&mut args.digit_budget, cfg, "digit-budget")?;

    let criterion = args.criterion.as_deref().unwrap_or("eigen");
    if !matches!(criterion, "eigen" | "trace" | "traces") {
        bail!("--criterion: expected eigen, trace or traces, got `{criterion}`");
    }
    let env = env_caps()?;
    let digit_budget = args
        .digit_budget
        .or(env.digit_budget)
        .unwrap_or(DEFAULT_DIGIT_BUDGET);

    let modes = args.family.is_some() as u8 + args.curve as u8 + args.general as u8;
    if modes != 1 {
        bail!("choose exactly one of --family, --curve or --general");
    }

    let report = if let Some(fam) = args.family.as_deref() {
        match fam {
            "as" => {
                let p = require(args.p, "p")?;
                let n = require(args.nvar, "nvar")?;
                let e_override = args.e_breaks.as_deref().map(parse_rat).transpose()?;
                bounds::example_bounds_artin_schreier_with(p, n, e_override)?
            }
            "hyp" => {
                let p = require(args.p, "p")?;
                let m = require(args.m, "m")?;
                let a = require(args.a, "a")?;
                let b = require(args.b, "b")?;
                // Bounds only need (r, q, b1, e); default to the prime field.
                // (`scan` defaults f-deg to the smallest f with m | p^f - 1,
                // which the trace engine needs for its characters.)
                bounds::example_bounds_hypergeometric(p, args.f_deg.unwrap_or(1), m, a, b)?
            }
            other => bail!("--family: expected `as` or `hyp`, got `{other}`"),
        }
    } else if args.curve {
        let q = parse_bigint(&require(args.q, "q")?, "q")?;
        let p = match args.p {
            Some(p) => p,
            None => smallest_prime_factor(&q)?,
        };
        let params = bounds::CurveParams {
            r: require(args.r, "r")?,
            q,
            p,
            cond_e: args.cond_e.unwrap_or(1),
            f_ram: args.f_ram.unwrap_or(1),
            b1: require(args.b1, "b1")?,
            e_breaks: parse_rat(&require(args.e_breaks, "e-breaks")?)?,
        };
        params.validate()?;
        bounds::report_curve(&params)?
    } else {
        let params = bounds::GeneralParams {
            r: require(args.r, "r")?,
            q: parse_bigint(&require(args.q, "q")?, "q")?,
            p: require(args.p, "p")?,
            ambient_n: require(args.ambient_n, "ambient-n")?,
            c_bound: parse_bigint(&require(args.c, "c")?, "c")?,
            c_x: parse_bigint(&require(args.c_x, "c-x")?, "c-x")?,
            cond_e: args.cond_e.unwrap_or(1),
            f_ram: args.f_ram.unwrap_or(1),
            d_ext: args.d_ext.unwrap_or(1),
        };
        params.validate()?;
        bounds::report_general(&params, digit_budget)?
    };

    let selected = report
        .bound(criterion)
        .ok_or_else(|| anyhow!("--criterion: no `{criterion}` bound for these parameters"))?
        .clone();
    let mut out = report.to_json();
    let all = out["N"].take();
    let obj = out.as_object_mut().unwrap();
    obj.insert("bounds".into(), all);
    obj.insert("criterion".into(), serde_json::json!(criterion));
    obj.insert("N".into(), selected.to_json());
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(0)
}

fn smallest_prime_factor(q: &BigInt) -> Result<u64> {
    use num_traits::ToPrimitive;
    let q = q
        .to_u64()
        .ok_or_else(|| anyhow!("--p is required when q does not fit in 64 bits"))?;
    finmono::arith::factorize(q)
        .first()
        .map(|&(p, _)| p)
        .ok_or_else(|| anyhow!("--q must be at least 2"))
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

fn cmd_scan(mut args: ScanArgs, cfg: &HashMap<String, String>) -> Result<u8> {
    fill(&mut args.family, cfg, "family")?;
    fill(&mut args.table, cfg, "table")?;
    fill(&mut args.criterion, cfg, "criterion")?;
    fill(&mut args.bound, cfg, "bound")?;
    fill(&mut args.p, cfg, "p")?;
    fill(&mut args.nvar, cfg, "nvar")?;
    fill(&mut args.m, cfg, "m")?;
    fill(&mut args.f_deg, cfg, "f-deg")?;
    fill(&mut args.a, cfg, "a")?;
    fill(&mut args.b, cfg, "b")?;
    fill(&mut args.chi, cfg, "chi")?;
    fill(&mut args.rho, cfg, "rho")?;
    fill(&mut args.max_degree, cfg, "max-degree")?;
    fill(&mut args.max_field_size, cfg, "max-field-size")?;
    fill(&mut args.max_points, cfg, "max-points")?;
    fill(&mut args.jobs, cfg, "jobs")?;
    fill(&mut args.out, cfg, "out")?;
    fill(&mut args.csv, cfg, "csv")?;

    let criterion = match args.criterion.as_deref().unwrap_or("eigen") {
        "eigen" => Criterion::Eigen,
        "trace" => Criterion::Trace,
        other => bail!("--criterion: expected eigen or trace, got `{other}`"),
    };
    let bound_choice = match args.bound.as_deref().unwrap_or("auto") {
        "auto" => BoundChoice::Auto,
        "eigen" => BoundChoice::Eigen,
        "trace" => BoundChoice::Trace,
        "traces" => BoundChoice::Traces,
        other => bail!("--bound: expected auto, eigen, trace or traces, got `{other}`"),
    };

    let fam = if let Some(path) = &args.table {
        if args.family.is_some() {
            bail!("--table and --family are mutually exclusive");
        }
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read table {}", path.display()))?;
        SheafFamily::Table(TraceTable::parse(&text)?)
    } else {
        match args.family.as_deref() {
            Some("as") => SheafFamily::ArtinSchreier {
                p: require(args.p, "p")?,
                n: require(args.nvar, "nvar")?,
            },
            Some("hyp") => {
                let p = require(args.p, "p")?;
                let m_char = require(args.m, "m")?;
                let a = require(args.a, "a")?;
                let b = require(args.b, "b")?;
                let f_deg = match args.f_deg {
                    Some(f) => f,
                    None => minimal_f_deg(p, m_char)?,
                };
                SheafFamily::Hypergeometric {
                    p,
                    f_deg,
                    a,
                    b,
                    m_char,
                    chi_indices: parse_index_list(&require(args.chi, "chi")?, "chi")?,
                    rho_indices: match args.rho.as_deref() {
                        Some(s) if !s.is_empty() => parse_index_list(s, "rho")?,
                        _ if b == 0 => Vec::new(),
                        _ => bail!("missing required flag --rho"),
                    },
                }
            }
            Some(other) => bail!("--family: expected `as` or `hyp`, got `{other}`"),
            None => bail!("scan needs --family or --table"),
        }
    };

    let env = env_caps()?;
    let mut budget = ScanBudget::default();
    if let Some(d) = args.max_degree {
        budget.max_degree = d;
    }
    if let Some(s) = &args.max_field_size {
        budget.max_field_size = parse_bigint(s, "max-field-size")?;
    }
    if let Some(s) = &args.max_points {
        budget.max_points = parse_bigint(s, "max-points")?;
    }
    if let Some(j) = args.jobs {
        budget.worker_count = j;
    }
    if let Some(cap) = env.field_cap {
        if cap < budget.max_field_size {
            budget.max_field_size = cap;
        }
    }

    let report = pipeline::scan(&fam, criterion, &budget, bound_choice, args.csv.is_some())?;
    let json = serde_json::to_string_pretty(&report.to_json())?;
    match &args.out {
        Some(path) => std::fs::write(path, json + "\n")
            .with_context(|| format!("cannot write report {}", path.display()))?,
        None => println!("{json}"),
    }
    if let (Some(path), Some(csv)) = (&args.csv, &report.csv) {
        std::fs::write(path, csv)
            .with_context(|| format!("cannot write csv {}", path.display()))?;
    }
    let code = match &report.verdict.kind {
        VerdictKind::Finite => 0,
        VerdictKind::Infinite { witness } => {
            eprintln!(
                "infinite: violation at degree {} point {} ({})",
                witness.m, witness.point, witness.predicate
            );
            10
        }
        VerdictKind::Inconclusive { checked_up_to } => {
            eprintln!("inconclusive: checked degrees 1..={checked_up_to}");
            11
        }
    };
    Ok(code)
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct SuiteLog {
    failed: Option<String>,
}

impl SuiteLog {
    fn new() -> SuiteLog {
        SuiteLog { failed: None }
    }
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("ok   {name}: {detail}");
        } else {
            println!("FAIL {name}: {detail}");
            if self.failed.is_none() {
                self.failed = Some(name.to_string());
            }
        }
    }
}

fn suite_mlcm(log: &mut SuiteLog, rmax: u64) {
    let mut vals = Vec::new();
    let mut ok = true;
    for r in 1..=rmax {
        let lcm = bounds::m_lcm(1, r);
        let closed = bounds::m_closed_form_q(r);
        vals.push(lcm);
        if lcm != closed {
            ok = false;
            log.check(
                "mlcm",
                false,
                format!("r={r}: m_lcm = {lcm} but closed form = {closed}"),
            );
        }
    }
    if ok {
        log.check(
            "mlcm",
            true,
            format!("m_closed_form_Q == m_lcm(1,·) on 1..={rmax}: {vals:?}"),
        );
    }
}

fn suite_adams(log: &mut SuiteLog, rmax: u64, mmax: u64) {
    for r in 1..=rmax {
        for m in 1..=mmax {
            let mut total = BigInt::from(0);
            for i in 0..m {
                let term = bounds::adams_component_rank(r, m, i);
                if i % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            if total != BigInt::from(r) {
                log.check(
                    "adams",
                    false,
                    format!("r={r} M={m}: alternating rank sum {total} != {r}"),
                );
                return;
            }
        }
    }
    log.check(
        "adams",
        true,
        format!("alternating Adams rank sum equals r for r<={rmax}, M<={mmax}"),
    );
}

fn suite_lemma33(log: &mut SuiteLog, trials: u64) {
    for (r, e, p) in [(2u64, 1u64, 3u64), (2, 2, 3), (3, 1, 2), (4, 3, 2)] {
        match power_sum_integrality_oracle(r, e, p, trials) {
            Err(err) => log.check("lemma33", false, format!("(r={r},e={e},p={p}): {err}")),
            Ok(rep) => {
                let mut ok = rep.implication_failures == 0;
                let mut detail = format!(
                    "(r={r},e={e},p={p}): N={} holds on {trials} samples",
                    rep.n_bound
                );
                if r == 2 && e == 1 && p == 3 {
                    match &rep.witness {
                        Some(w) if w.integral_prefix == 1 => {
                            detail.push_str("; witness {1/3, -1/3} shows k=1 alone fails");
                        }
                        _ => {
                            ok = false;
                            detail.push_str("; expected the {1/3, -1/3} witness");
                        }
                    }
                }
                log.check("lemma33", ok, detail);
            }
        }
    }
}

fn suite_hasse(log: &mut SuiteLog, pmax: u64) {
    // G² = (−1)^{(p−1)/2} p
    for p in finmono::arith::primes_up_to(pmax) {
        if p == 2 {
            continue;
        }
        let g = match quadratic_gauss_sum(p) {
            Ok(g) => g,
            Err(e) => {
                log.check("hasse", false, format!("p={p}: {e}"));
                return;
            }
        };
        let sign = if (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
        let expect = CycNum::from_int(p, sign * p as i64);
        if g.pow(2) != expect {
            log.check("hasse", false, format!("p={p}: G^2 != ({sign})*{p}"));
            return;
        }
    }
    log.check(
        "hasse",
        true,
        format!("G^2 = (-1)^((p-1)/2) p for odd p <= {pmax}"),
    );

    // Hasse–Davenport: G^m = −G_m by brute force
    for p in [3u64, 5] {
        let g = quadratic_gauss_sum(p).expect("odd p");
        let mut tower = FieldTower::new(p).expect("prime p");
        for m in 1..=5u64 {
            let level = if m == 1 {
                0
            } else {
                match tower.build_extension(0, m) {
                    Ok(l) => l,
                    Err(e) => {
                        log.check("hasse", false, format!("p={p} m={m}: {e}"));
                        return;
                    }
                }
            };
            let mut counts = vec![0i64; p as usize];
            for x in tower.enumerate(level).expect("small field") {
                let sq = tower.mul(&x, &x);
                counts[tower.absolute_trace(&sq) as usize] += 1;
            }
            let big: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
            let g_m = CycNum::from_exponent_counts(p, &big);
            if g.pow(m) != g_m.neg() {
                log.check(
                    "hasse",
                    false,
                    format!("p={p} m={m}: G^m != -(sum psi(Tr x^2))"),
                );
                return;
            }
        }
    }
    log.check(
        "hasse",
        true,
        "Hasse-Davenport G^m = -G_m for p in {3,5}, m <= 5".into(),
    );
}

fn cmd_oracle(mut args: OracleArgs, cfg: &HashMap<String, String>) -> Result<u8> {
    fill(&mut args.suite, cfg, "suite")?;
    fill(&mut args.rmax, cfg, "rmax")?;
    fill(&mut args.mmax, cfg, "mmax")?;
    fill(&mut args.pmax, cfg, "pmax")?;
    fill(&mut args.trials, cfg, "trials")?;

    let suite = args.suite.as_deref().unwrap_or("all");
    let mut log = SuiteLog::new();
    match suite {
        "all" => {
            suite_mlcm(&mut log, args.rmax.unwrap_or(12));
            suite_adams(&mut log, args.rmax.unwrap_or(8).min(8), args.mmax.unwrap_or(40));
            suite_lemma33(&mut log, args.trials.unwrap_or(1000));
            suite_hasse(&mut log, args.pmax.unwrap_or(23));
        }
        "mlcm" => suite_mlcm(&mut log, args.rmax.unwrap_or(12)),
        "adams" => suite_adams(&mut log, args.rmax.unwrap_or(8), args.mmax.unwrap_or(40)),
        "lemma33" => suite_lemma33(&mut log, args.trials.unwrap_or(1000)),
        "hasse" => suite_hasse(&mut log, args.pmax.unwrap_or(23)),
        other => bail!("--suite: expected all, mlcm, adams, lemma33 or hasse, got `{other}`"),
    }
    match log.failed {
        None => Ok(0),
        Some(name) => {
            eprintln!("oracle suite failed at: {name}");
            Ok(1)
        }
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn cmd_selftest() -> Result<u8> {
    let mut log = SuiteLog::new();

    let phi12 = finmono::arith::cyclotomic_poly(12);
    log.check(
        "arith",
        phi12 == vec![1, 0, -1, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>(),
        "cyclotomic_poly(12) = x^4 - x^2 + 1".into(),
    );

    let g = quadratic_gauss_sum(3)?;
    log.check(
        "cyclotomic",
        g.pow(2) == CycNum::from_int(3, -3),
        "G(3)^2 = -3".into(),
    );

    let mut tower = FieldTower::new(3)?;
    let l = tower.build_extension(0, 4)?;
    let mut sum = CycNum::zero(3);
    for x in tower.enumerate(l)? {
        sum = sum.add(&tower.additive_char(&x))?;
    }
    log.check(
        "finitefield",
        sum.is_zero(),
        "additive character sums to 0 over F_81".into(),
    );

    let rep = bounds::example_bounds_artin_schreier(2, 3)?;
    log.check(
        "bounds",
        rep.bound("eigen") == Some(&NBound::Exact(BigInt::from(40)))
            && rep.bound("trace") == Some(&NBound::Exact(BigInt::from(160))),
        "AS(2,3): N_eigen = 40, N_trace = 160".into(),
    );

    let mut eng = TraceEngine::new(SheafFamily::ArtinSchreier { p: 3, n: 2 })?;
    let l1 = eng.level_for_degree(1)?;
    let t1 = eng.point_by_index(l1, 1);
    let v = eng.trace(&t1)?.value(3)?;
    log.check(
        "sheaftrace",
        v == CycNum::root_of_unity(3, 2),
        "AS(3,2) value at t=1 is zeta_3^2".into(),
    );

    let f = newton_char_poly(&[CycNum::zero(1), CycNum::from_int(1, -2)])?;
    log.check(
        "frobcheck",
        f.coeff(0).is_one() && f.coeff(1).is_zero() && f.is_monic(),
        "newton({0,-2}) = x^2 + 1".into(),
    );

    let budget = ScanBudget {
        max_degree: 3,
        ..ScanBudget::default()
    };
    let rep = pipeline::scan(
        &SheafFamily::ArtinSchreier { p: 3, n: 2 },
        Criterion::Eigen,
        &budget,
        BoundChoice::Auto,
        false,
    )?;
    log.check(
        "pipeline",
        matches!(rep.verdict.kind, VerdictKind::Finite)
            && rep.degrees.iter().all(|d| d.violations == 0),
        "AS(3,2) eigen scan covers N = 3 with zero violations".into(),
    );

    let mut table = TraceTable::new(3, 3);
    table.insert(
        1,
        0,
        finmono::sheaftrace::NormalizedTrace {
            numerator: quadratic_gauss_sum(3)?,
            gauss_exponent: 1,
        },
    );
    let round = TraceTable::parse(&table.to_text())?;
    log.check(
        "table",
        round == table && round.to_text() == table.to_text(),
        "trace-table text round trip is exact".into(),
    );

    match log.failed {
        None => {
            println!("selftest: all modules ok");
            Ok(0)
        }
        Some(name) => {
            eprintln!("selftest failed at: {name}");
            Ok(1)
        }
    }
}

// ---------------------------------------------------------------------------
// entry
// ---------------------------------------------------------------------------

fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<finmono::Error>() {
        Some(finmono::Error::TableFormat { .. }) | Some(finmono::Error::IncompleteTable { .. }) => {
            3
        }
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(map) => map,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => HashMap::new(),
    };
    let result = match cli.cmd {
        Cmd::Bound(args) => cmd_bound(args, &cfg),
        Cmd::Scan(args) => cmd_scan(args, &cfg),
        Cmd::Oracle(args) => cmd_oracle(args, &cfg),
        Cmd::Selftest => cmd_selftest(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
