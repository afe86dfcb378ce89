//! Command-line front end for the regcomb library: feature maps, lattice
//! invariants, divisibility constants, counting formulas, enumeration,
//! decoding certificates, and the exact lattice-walk engine.
//!
//! Exit codes: 0 success, 1 domain error, 2 work-bound refusal, 64 usage.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Signed, Zero};
use serde_json::{Value, json};

use regcomb::design::{
    DesignParams, design_count, design_decoding_dense, design_divisibility, design_feature_map,
    design_gram_det, design_rho_squared, design_symmetry_mapping, is_design,
    parse_block, vertex_relabeling,
};
use regcomb::framework::{
    ConditionsReport, CountResult, DecodingCertificate, FeatureMap, Structure,
    check_symmetry, constants_in_span, divisibility_constant, enumerate_structures,
    existence_threshold, l1_norm, lcm_binomials, perp_basis_from_decoding,
    verify_structure,
};
use regcomb::hp::HpCtx;
use regcomb::jsonio::{StructureJson, distribution_to_json_lines, matrix_to_json};
use regcomb::lclt::{
    WalkSpec, count_via_identity, empirical_delta, exact_distribution, fourier_transform,
    gaussian_main_term_ln, local_correct, prob_at, tameness_ratio, walk_moments,
};
use regcomb::oa::{
    OaParams, oa_count, oa_decoding_vectors, oa_feature_map, oa_gram_det, oa_is_array,
    oa_symmetry_mapping, oa_translation, parse_oa_member,
};
use regcomb::perm::{
    PermParams, antisymmetrizer_vectors, dim_w, dim_w_census, is_twise, parse_perm,
    perm_divisibility, perm_feature_map, perm_gram_det, perm_rank, perm_rho_squared,
    perm_symmetry_mapping, sparse_rank,
};
use regcomb::{Error, Int, Rat};

#[derive(Parser)]
#[command(name = "regcomb", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format: text, json or csv
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// RNG seed for randomized procedures
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (reserved; computations are single-threaded and exact)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Orthogonal arrays over [q]^n
    Oa {
        #[command(subcommand)]
        action: OaAction,
    },
    /// t-(v,k,λ) block designs
    Design {
        #[command(subcommand)]
        action: DesignAction,
    },
    /// t-wise permutations in S_n
    Perm {
        #[command(subcommand)]
        action: PermAction,
    },
    /// Exact lattice random walk
    Lclt {
        #[command(subcommand)]
        action: LcltAction,
    },
    /// Cross-family framework reports
    Framework {
        #[command(subcommand)]
        action: FrameworkAction,
    },
}

#[derive(Args)]
struct OaP {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    t: u32,
}

#[derive(Subcommand)]
enum OaAction {
    Map(OaP),
    Verify {
        #[command(flatten)]
        p: OaP,
        #[arg(long)]
        members: String,
    },
    Gram(OaP),
    Rho(OaP),
    Divisibility(OaP),
    Count {
        #[command(flatten)]
        p: OaP,
        #[arg(long = "N")]
        size: i64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        exact: bool,
    },
    Enumerate {
        #[command(flatten)]
        p: OaP,
        #[arg(long = "N")]
        size: usize,
        #[arg(long)]
        list: bool,
    },
    Decode(OaP),
}

#[derive(Args)]
struct DesignP {
    #[arg(long)]
    v: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    t: u32,
}

#[derive(Subcommand)]
enum DesignAction {
    Map(DesignP),
    Verify {
        #[command(flatten)]
        p: DesignP,
        #[arg(long)]
        members: String,
    },
    Gram(DesignP),
    Rho(DesignP),
    Divisibility(DesignP),
    Count {
        #[command(flatten)]
        p: DesignP,
        #[arg(long = "N")]
        size: i64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        exact: bool,
    },
    Enumerate {
        #[command(flatten)]
        p: DesignP,
        #[arg(long = "N")]
        size: usize,
        #[arg(long)]
        list: bool,
    },
    Decode(DesignP),
    Lcm {
        #[arg(long)]
        t: u32,
    },
}

#[derive(Args)]
struct PermP {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    t: u32,
}

#[derive(Subcommand)]
enum PermAction {
    Map(PermP),
    Verify {
        #[command(flatten)]
        p: PermP,
        #[arg(long)]
        members: String,
    },
    Gram(PermP),
    Rho(PermP),
    Divisibility(PermP),
    Dim(PermP),
    Perp(PermP),
    Enumerate {
        #[command(flatten)]
        p: PermP,
        #[arg(long = "N")]
        size: usize,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// oa, design, perm or constants
    #[arg(long)]
    family: String,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    v: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// ground size for the constants family
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Subcommand)]
enum LcltAction {
    Dist {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        p: String,
    },
    Prob {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        lambda: String,
    },
    Main {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        lambda: String,
    },
    Delta {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        lambda: String,
    },
    Fourier {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        theta: String,
    },
    Count {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long = "N")]
        size: u64,
    },
    Tame {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        theta: String,
    },
    Correct {
        #[command(flatten)]
        fam: FamilyArgs,
        /// erased row indices, comma separated
        #[arg(long)]
        erased: String,
        /// target row index to reconstruct (must be erased)
        #[arg(long)]
        e: usize,
        #[arg(long, default_value_t = 200)]
        retries: usize,
    },
}

#[derive(Subcommand)]
enum FrameworkAction {
    Conditions {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long = "C", default_value_t = 1.0)]
        big_c: f64,
    },
    Threshold {
        #[arg(long)]
        c1: u64,
        #[arg(long)]
        c2: u64,
        #[arg(long)]
        c3: u64,
        #[arg(long)]
        dim: u64,
        #[arg(long = "C", default_value_t = 1.0)]
        big_c: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are successes; everything else is usage
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::WorkBound { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::Oa { action } => run_oa(cli, action),
        Cmd::Design { action } => run_design(cli, action),
        Cmd::Perm { action } => run_perm(cli, action),
        Cmd::Lclt { action } => run_lclt(cli, action),
        Cmd::Framework { action } => run_framework(cli, action),
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Print a flat JSON object in the requested format. Keys print in sorted
/// order (serde_json maps are ordered), so output is deterministic.
fn emit(cli: &Cli, value: Value) {
    match cli.format.as_str() {
        "json" => println!("{}", serde_json::to_string(&value).expect("serializable")),
        "csv" => {
            if let Value::Object(map) = &value {
                for (k, v) in map {
                    println!("{k},{}", scalar(v));
                }
            } else {
                println!("{}", scalar(&value));
            }
        }
        _ => {
            if let Value::Object(map) = &value {
                for (k, v) in map {
                    if k == "provenance" {
                        continue;
                    }
                    println!("{k}: {}", scalar(v));
                }
            } else {
                println!("{}", scalar(&value));
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Trial division to 10^4, largest factors first (matching the factored style
/// used for Gram determinants); any remaining cofactor leads the product.
fn factorization(n: &Int) -> String {
    if n.is_zero() {
        return "0".to_string();
    }
    let sign = if n.is_negative() { "-" } else { "" };
    let mut rest = n.abs();
    let mut factors: Vec<(Int, u32)> = Vec::new();
    let mut d = Int::from(2);
    while &d * &d <= rest && d < Int::from(10_000) {
        let mut e = 0u32;
        while (&rest % &d).is_zero() {
            rest /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    let mut parts: Vec<String> = Vec::new();
    if rest > Int::one() {
        parts.push(rest.to_string());
    }
    for (p, e) in factors.iter().rev() {
        parts.push(if *e == 1 { p.to_string() } else { format!("{p}^{e}") });
    }
    if parts.is_empty() {
        parts.push("1".to_string());
    }
    format!("{sign}{}", parts.join("·"))
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_f64(r: &Rat) -> f64 {
    let mut ctx = HpCtx::with_default_precision();
    let f = ctx.from_rat(r);
    ctx.to_f64(&f)
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n = Int::from_str(num.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    let d = Int::from_str(den.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

fn parse_int_vector(s: &str) -> Result<Vec<Int>, Error> {
    let v: Vec<serde_json::Number> =
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    v.iter()
        .map(|x| Int::from_str(&x.to_string()).map_err(|_| Error::Parse(x.to_string())))
        .collect()
}

fn parse_rat_vector(s: &str) -> Result<Vec<Rat>, Error> {
    let v: Vec<String> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    v.iter().map(|x| parse_rat(x)).collect()
}

fn read_structure_file(path: &str) -> Result<StructureJson, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn count_json(r: &CountResult, provenance: &str) -> Value {
    let mut map = serde_json::Map::new();
    if let Some(l) = r.log10_main {
        map.insert("log10_main".into(), json!(l));
    }
    if let Some(m) = r.main {
        map.insert("main".into(), json!(m));
    }
    if let Some(d) = r.delta_bound {
        map.insert("delta_bound".into(), json!(d));
    }
    if let Some(e) = &r.exact {
        map.insert("exact".into(), json!(e.to_string()));
    }
    if let Some(n) = &r.note {
        map.insert("note".into(), json!(n));
    }
    map.insert("provenance".into(), json!(provenance));
    Value::Object(map)
}

fn map_json(fm: &FeatureMap, provenance: &str) -> Value {
    json!({
        "rows": fm.ground_size(),
        "cols": fm.dim_v(),
        "row_labels": fm.row_labels,
        "col_labels": fm.col_labels,
        "matrix": serde_json::to_value(matrix_to_json(&fm.matrix)).expect("serializable"),
        "provenance": provenance,
    })
}

fn gram_json(det: &Int, provenance: &str) -> Value {
    json!({
        "det": det.to_string(),
        "factorization": factorization(det),
        "provenance": provenance,
    })
}

fn rho_json(rho_sq: &Rat, provenance: &str) -> Value {
    json!({
        "rho_squared": rat_str(rho_sq),
        "rho": rat_f64(rho_sq).sqrt(),
        "provenance": provenance,
    })
}

fn enumerate_json(
    fm: &FeatureMap,
    size: usize,
    list: bool,
) -> Result<Value, Error> {
    let res = enumerate_structures(fm, size, list, None)?;
    let mut map = serde_json::Map::new();
    map.insert("count".into(), json!(res.count.to_string()));
    if let Some(structs) = res.structures {
        let labels: Vec<Vec<String>> = structs
            .iter()
            .map(|s| s.members().iter().map(|&i| fm.row_labels[i].clone()).collect())
            .collect();
        map.insert("structures".into(), json!(labels));
    }
    map.insert("provenance".into(), json!("depth-first enumeration with pruning"));
    Ok(Value::Object(map))
}

fn decode_json(fm: &FeatureMap, cert: &DecodingCertificate, provenance: &str) -> Result<Value, Error> {
    cert.validate(fm)?;
    let max_l1 = cert.gammas.iter().map(|g| l1_norm(g)).max().unwrap_or_else(Int::zero);
    Ok(json!({
        "m": cert.m.to_string(),
        "c4": cert.c4.to_string(),
        "columns": cert.gammas.len(),
        "max_l1": max_l1.to_string(),
        "valid": true,
        "provenance": provenance,
    }))
}

// ---------------------------------------------------------------------------
// Family dispatch
// ---------------------------------------------------------------------------

fn run_oa(cli: &Cli, action: &OaAction) -> Result<(), Error> {
    match action {
        OaAction::Map(p) => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let fm = oa_feature_map(&p)?;
            emit(cli, map_json(&fm, "pattern-indicator feature map"));
        }
        OaAction::Verify { p, members } => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let sj = read_structure_file(members)?;
            let rows: Vec<u64> = sj
                .members
                .iter()
                .map(|m| parse_oa_member(&p, m))
                .collect::<Result<_, _>>()?;
            let valid = oa_is_array(&p, &rows);
            emit(cli, json!({"valid": valid, "provenance": "direct pattern-count check"}));
        }
        OaAction::Gram(p) => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            emit(cli, gram_json(&oa_gram_det(&p), "closed-form gram determinant"));
        }
        OaAction::Rho(p) => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let rho_sq = Rat::new(Int::one(), oa_gram_det(&p));
            emit(cli, rho_json(&rho_sq, "unit lattice over closed-form gram"));
        }
        OaAction::Divisibility(p) => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let c1 = Int::from(p.q as u64).pow(p.t);
            emit(cli, json!({"c1": c1.to_string(), "provenance": "q^t"}));
        }
        OaAction::Count { p, size, c, exact } => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let r = oa_count(&p, *size, *c, *exact)?;
            emit(cli, count_json(&r, "gaussian main term with parametric error bound"));
        }
        OaAction::Enumerate { p, size, list } => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let fm = oa_feature_map(&p)?;
            let v = enumerate_json(&fm, *size, *list)?;
            emit(cli, v);
        }
        OaAction::Decode(p) => {
            let p = OaParams::new(p.q, p.n, p.t)?;
            let fm = oa_feature_map(&p)?;
            let cert = oa_decoding_vectors(&p)?;
            let v = decode_json(&fm, &cert, "inclusion-exclusion decoding vectors")?;
            emit(cli, v);
        }
    }
    Ok(())
}

fn design_cert(p: &DesignParams) -> Result<DecodingCertificate, Error> {
    let tsets: Vec<Vec<u32>> = {
        let count: u64 = regcomb::framework::binomial_int(p.v as u64, p.t as u64)
            .try_into()
            .expect("fits");
        (0..count).map(|r| regcomb::design::colex_unrank(r, p.t)).collect()
    };
    let gammas = tsets
        .iter()
        .map(|a| design_decoding_dense(p, a))
        .collect::<Result<_, _>>()?;
    let m = regcomb::framework::binomial_int(p.k as u64, p.t as u64) * lcm_binomials(p.t);
    let c4 = Int::from(8u64).pow(p.t) * regcomb::framework::binomial_int(p.k as u64, p.t as u64);
    Ok(DecodingCertificate { m, gammas, c4 })
}

fn run_design(cli: &Cli, action: &DesignAction) -> Result<(), Error> {
    match action {
        DesignAction::Map(p) => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            let fm = design_feature_map(&p)?;
            emit(cli, map_json(&fm, "subset-inclusion feature map"));
        }
        DesignAction::Verify { p, members } => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            let sj = read_structure_file(members)?;
            let blocks: Vec<Vec<u32>> = sj
                .members
                .iter()
                .map(|m| parse_block(&p, m, p.k))
                .collect::<Result<_, _>>()?;
            let (valid, profile) = is_design(&p, &blocks)?;
            let lambdas: Vec<String> = profile.lambdas.iter().map(rat_str).collect();
            emit(
                cli,
                json!({"valid": valid, "lambda_profile": lambdas,
                       "provenance": "direct coverage count"}),
            );
        }
        DesignAction::Gram(p) => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            emit(cli, gram_json(&design_gram_det(&p)?, "eigenvalue product closed form"));
        }
        DesignAction::Rho(p) => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            emit(cli, rho_json(&design_rho_squared(&p)?, "diagonal-form closed product"));
        }
        DesignAction::Divisibility(p) => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            emit(
                cli,
                json!({"c1": design_divisibility(&p).to_string(),
                       "provenance": "lcm of binomial congruences"}),
            );
        }
        DesignAction::Count { p, size, c, exact } => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            let r = design_count(&p, *size, *c, *exact)?;
            emit(cli, count_json(&r, "gaussian main term with parametric error bound"));
        }
        DesignAction::Enumerate { p, size, list } => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            let fm = design_feature_map(&p)?;
            let v = enumerate_json(&fm, *size, *list)?;
            emit(cli, v);
        }
        DesignAction::Decode(p) => {
            let p = DesignParams::new(p.v, p.k, p.t)?;
            let fm = design_feature_map(&p)?;
            let cert = design_cert(&p)?;
            let v = decode_json(&fm, &cert, "scaled inclusion-exclusion decoding vectors")?;
            emit(cli, v);
        }
        DesignAction::Lcm { t } => {
            let l = lcm_binomials(*t);
            emit(
                cli,
                json!({"lcm": l.to_string(), "bound_4t": Int::from(4u64).pow(*t).to_string(),
                       "provenance": "lcm of one binomial row"}),
            );
        }
    }
    Ok(())
}

fn parse_perm_flexible(n: u32, s: &str) -> Result<Vec<u32>, Error> {
    // space-free one-line notation for n <= 9
    if n <= 9 && !s.contains([',', ' ']) {
        let spaced: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        parse_perm(n, &spaced.join(","))
    } else {
        parse_perm(n, s)
    }
}

fn run_perm(cli: &Cli, action: &PermAction) -> Result<(), Error> {
    match action {
        PermAction::Map(p) => {
            let p = PermParams::new(p.n, p.t)?;
            let fm = perm_feature_map(&p)?;
            emit(cli, map_json(&fm, "longest-increasing-subsequence indexed basis"));
        }
        PermAction::Verify { p, members } => {
            let sj = read_structure_file(members)?;
            let perms: Vec<Vec<u32>> = sj
                .members
                .iter()
                .map(|m| parse_perm_flexible(p.n, m))
                .collect::<Result<_, _>>()?;
            let valid = is_twise(p.n, p.t, &perms)?;
            emit(cli, json!({"valid": valid, "provenance": "direct tuple-count check"}));
        }
        PermAction::Gram(p) => {
            let p = PermParams::new(p.n, p.t)?;
            emit(cli, gram_json(&perm_gram_det(&p)?, "fraction-free gram determinant"));
        }
        PermAction::Rho(p) => {
            let p = PermParams::new(p.n, p.t)?;
            emit(cli, rho_json(&perm_rho_squared(&p)?, "unit lattice over gram determinant"));
        }
        PermAction::Divisibility(p) => {
            let p = PermParams::new(p.n, p.t)?;
            emit(
                cli,
                json!({"c1": perm_divisibility(&p).to_string(), "provenance": "n!/(n-t)!"}),
            );
        }
        PermAction::Dim(p) => {
            let p = PermParams::new(p.n, p.t)?;
            let hooks = dim_w(&p);
            let mut map = serde_json::Map::new();
            map.insert("dim_w".into(), json!(hooks.to_string()));
            if let Ok(census) = dim_w_census(&p) {
                map.insert("census".into(), json!(census.to_string()));
            }
            map.insert("provenance".into(), json!("hook-length sum with LIS census cross-check"));
            emit(cli, Value::Object(map));
        }
        PermAction::Perp(p) => {
            let p = PermParams::new(p.n, p.t)?;
            let fm = perm_feature_map(&p)?;
            let vecs = antisymmetrizer_vectors(&p)?;
            let expect_rank: usize = (regcomb::framework::factorial(p.n as u64) - dim_w(&p))
                .try_into()
                .expect("rank fits");
            let rank = sparse_rank(&vecs, fm.ground_size(), Some(expect_rank));
            let max_l1: i64 = vecs
                .iter()
                .map(|v| v.iter().map(|&(_, c)| c.abs() as i64).sum())
                .max()
                .unwrap_or(0);
            emit(
                cli,
                json!({
                    "vectors": vecs.len(),
                    "rank": rank,
                    "expected_rank": expect_rank,
                    "max_l1": max_l1,
                    "l1_bound": regcomb::framework::factorial((p.t + 2) as u64).to_string(),
                    "provenance": "column antisymmetrizers of shapes with first part n-t-1",
                }),
            );
        }
        PermAction::Enumerate { p, size, list } => {
            let p = PermParams::new(p.n, p.t)?;
            let fm = perm_feature_map(&p)?;
            let v = enumerate_json(&fm, *size, *list)?;
            emit(cli, v);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Walk engine
// ---------------------------------------------------------------------------

enum Family {
    Oa(OaParams),
    Design(DesignParams),
    Perm(PermParams),
    Constants(usize),
}

fn build_family(fam: &FamilyArgs) -> Result<(Family, FeatureMap), Error> {
    let need = |o: Option<u32>, name: &str| {
        o.ok_or_else(|| Error::InvalidParams(format!("--{name} is required for this family")))
    };
    match fam.family.as_str() {
        "oa" => {
            let p = OaParams::new(need(fam.q, "q")?, need(fam.n, "n")?, need(fam.t, "t")?)?;
            let fm = oa_feature_map(&p)?;
            Ok((Family::Oa(p), fm))
        }
        "design" => {
            let p = DesignParams::new(need(fam.v, "v")?, need(fam.k, "k")?, need(fam.t, "t")?)?;
            let fm = design_feature_map(&p)?;
            Ok((Family::Design(p), fm))
        }
        "perm" => {
            let p = PermParams::new(need(fam.n, "n")?, need(fam.t, "t")?)?;
            let fm = perm_feature_map(&p)?;
            Ok((Family::Perm(p), fm))
        }
        "constants" => {
            let m = fam
                .m
                .ok_or_else(|| Error::InvalidParams("--m is required for constants".into()))?;
            let rows = vec![vec![Int::one()]; m];
            let fm = FeatureMap::new(
                (0..m).map(|i| i.to_string()).collect(),
                vec!["const".into()],
                regcomb::ExactMatrix::from_int_rows(rows),
                Int::one(),
            )?;
            Ok((Family::Constants(m), fm))
        }
        other => Err(Error::InvalidParams(format!("unknown family {other:?}"))),
    }
}

fn run_lclt(cli: &Cli, action: &LcltAction) -> Result<(), Error> {
    let mut ctx = HpCtx::with_default_precision();
    match action {
        LcltAction::Dist { fam, p } => {
            let (_, fm) = build_family(fam)?;
            let w = WalkSpec::new(&fm, parse_rat(p)?)?;
            let dist = exact_distribution(&w)?;
            print!("{}", distribution_to_json_lines(&dist));
        }
        LcltAction::Prob { fam, p, lambda } => {
            let (_, fm) = build_family(fam)?;
            let w = WalkSpec::new(&fm, parse_rat(p)?)?;
            let lam = parse_int_vector(lambda)?;
            let r = prob_at(&w, &lam)?;
            emit(
                cli,
                json!({"prob": rat_str(&r.prob), "in_lattice": r.in_lattice,
                       "provenance": "exact dynamic program"}),
            );
        }
        LcltAction::Main { fam, p, lambda } => {
            let (_, fm) = build_family(fam)?;
            let w = WalkSpec::new(&fm, parse_rat(p)?)?;
            let lam: Vec<Rat> = parse_int_vector(lambda)?
                .into_iter()
                .map(Rat::from_integer)
                .collect();
            let ln = gaussian_main_term_ln(&w, &lam, &mut ctx)?;
            let ln10 = ctx.ln_rat(&Rat::from_integer(Int::from(10)));
            let log10 = ctx.to_f64(&ctx.div(&ln, &ln10));
            let value = {
                let e = ctx.exp(&ln);
                ctx.to_f64(&e)
            };
            emit(
                cli,
                json!({"log10": log10, "value": value,
                       "provenance": "gaussian density with exact rational exponent"}),
            );
        }
        LcltAction::Delta { fam, p, lambda } => {
            let (_, fm) = build_family(fam)?;
            let w = WalkSpec::new(&fm, parse_rat(p)?)?;
            let lam = parse_int_vector(lambda)?;
            let d = empirical_delta(&w, &lam, &mut ctx)?;
            emit(
                cli,
                json!({"delta": ctx.to_f64(&d),
                       "provenance": "exact probability against gaussian main term"}),
            );
        }
        LcltAction::Fourier { fam, p, theta } => {
            let (_, fm) = build_family(fam)?;
            let w = WalkSpec::new(&fm, parse_rat(p)?)?;
            let th = parse_rat_vector(theta)?;
            let z = fourier_transform(&w, &th, &mut ctx)?;
            emit(
                cli,
                json!({"re": ctx.to_f64(&z.re), "im": ctx.to_f64(&z.im),
                       "provenance": "product formula at 200-bit precision"}),
            );
        }
        LcltAction::Count { fam, size } => {
            let (_, fm) = build_family(fam)?;
            let alpha = count_via_identity(&fm, *size)?;
            emit(
                cli,
                json!({"alpha": alpha.to_string(), "method": "dp-identity",
                       "provenance": "point probability over bernoulli weight"}),
            );
        }
        LcltAction::Tame { fam, theta } => {
            let (_, fm) = build_family(fam)?;
            let th = parse_rat_vector(theta)?;
            let r = tameness_ratio(&fm, &th, &mut ctx)?;
            emit(
                cli,
                json!({"ratio": ctx.to_f64(&r),
                       "provenance": "max inner product over R-seminorm"}),
            );
        }
        LcltAction::Correct { fam, erased, e, retries } => {
            let (family, fm) = build_family(fam)?;
            let seed = cli
                .seed
                .ok_or_else(|| Error::InvalidParams("--seed is required for correct".into()))?;
            let erased: Vec<usize> = erased
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::Parse(x.to_string())))
                .collect::<Result<_, _>>()?;
            let sym: Box<dyn Fn(usize, usize) -> Vec<usize>> = match &family {
                Family::Oa(p) => {
                    let p = *p;
                    Box::new(move |from, to| oa_symmetry_mapping(&p, from as u64, to as u64))
                }
                Family::Design(p) => {
                    let p = *p;
                    Box::new(move |from, to| design_symmetry_mapping(&p, from as u64, to as u64))
                }
                Family::Perm(p) => {
                    let n = p.n;
                    Box::new(move |from, to| perm_symmetry_mapping(n, from as u64, to as u64))
                }
                Family::Constants(m) => {
                    let m = *m;
                    Box::new(move |_, _| (0..m).collect())
                }
            };
            let corr = local_correct(&fm, &erased, *e, &*sym, seed, *retries)?;
            let gamma: Vec<(usize, String)> =
                corr.gamma.iter().map(|(i, c)| (*i, c.to_string())).collect();
            emit(
                cli,
                json!({"gamma": gamma, "l1": corr.l1.to_string(),
                       "retries_used": corr.retries_used,
                       "provenance": "randomized window correction via family symmetry"}),
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Framework reports
// ---------------------------------------------------------------------------

fn conditions_for(fam: &FamilyArgs, big_c: f64) -> Result<ConditionsReport, Error> {
    let (family, fm) = build_family(fam)?;
    let c1_lattice = divisibility_constant(&fm)?;
    let (c1, c3, c3_verified, sym_ok) = match &family {
        Family::Oa(p) => {
            let cert = oa_decoding_vectors(p)?;
            let perp = perp_basis_from_decoding(&fm, &cert)?;
            let c3 = perp.iter().map(|v| l1_norm(v)).max().unwrap_or_else(Int::zero);
            let shift: Vec<u32> = (0..p.n).map(|i| (i == 0) as u32).collect();
            let sym = check_symmetry(&fm, &oa_translation(p, &shift))?;
            (Int::from(p.q as u64).pow(p.t), c3, true, sym)
        }
        Family::Design(p) => {
            let cert = design_cert(p)?;
            let perp = perp_basis_from_decoding(&fm, &cert)?;
            let c3 = perp.iter().map(|v| l1_norm(v)).max().unwrap_or_else(Int::zero);
            let mut sigma: Vec<u32> = (0..p.v).collect();
            sigma.swap(0, 1);
            let sym = check_symmetry(&fm, &vertex_relabeling(p, &sigma))?;
            (design_divisibility(p), c3, true, sym)
        }
        Family::Perm(p) => {
            let vecs = antisymmetrizer_vectors(p)?;
            let c3: i64 = vecs
                .iter()
                .map(|v| v.iter().map(|&(_, c)| c.abs() as i64).sum())
                .max()
                .unwrap_or(0);
            let verified = vecs.iter().all(|v| {
                (0..fm.dim_v()).all(|j| {
                    v.iter()
                        .map(|&(i, c)| &fm.matrix[(i, j)] * Rat::from_integer(Int::from(c as i64)))
                        .sum::<Rat>()
                        .is_zero()
                })
            });
            let tau = {
                let mut t: Vec<u32> = (0..p.n).collect();
                t.swap(0, 1);
                t
            };
            let target = perm_rank(&tau);
            let sym = check_symmetry(&fm, &perm_symmetry_mapping(p.n, 0, target))?;
            (perm_divisibility(p), Int::from(c3), verified, sym)
        }
        Family::Constants(_) => (Int::one(), Int::zero(), true, true),
    };
    if c1 != c1_lattice {
        return Err(Error::InvalidParams(format!(
            "family divisibility constant {c1} disagrees with lattice value {c1_lattice}"
        )));
    }
    let threshold = {
        let as_u64 = |x: &Int| u64::try_from(x.clone()).ok();
        match (as_u64(&c1), as_u64(&fm.c2), as_u64(&c3)) {
            (Some(a), Some(b), Some(c)) if c > 0 => {
                Some(existence_threshold(a, b, c, fm.dim_v() as u64, big_c))
            }
            _ => None,
        }
    };
    Ok(ConditionsReport {
        c1,
        c2: fm.c2.clone(),
        c3,
        c3_verified,
        symmetry_generators_ok: sym_ok,
        transitive_by_construction: true,
        constants_in_span: constants_in_span(&fm),
        dim_v: fm.dim_v(),
        threshold,
    })
}

fn run_framework(cli: &Cli, action: &FrameworkAction) -> Result<(), Error> {
    match action {
        FrameworkAction::Conditions { fam, big_c } => {
            let r = conditions_for(fam, *big_c)?;
            emit(
                cli,
                json!({
                    "c1": r.c1.to_string(),
                    "c2": r.c2.to_string(),
                    "c3": r.c3.to_string(),
                    "c3_verified": r.c3_verified,
                    "symmetry_generators_ok": r.symmetry_generators_ok,
                    "transitive_by_construction": r.transitive_by_construction,
                    "constants_in_span": r.constants_in_span,
                    "dim_v": r.dim_v,
                    "threshold": r.threshold,
                    "provenance": "family certificates checked exactly",
                }),
            );
        }
        FrameworkAction::Threshold { c1, c2, c3, dim, big_c } => {
            let _ = c1;
            let n0 = existence_threshold(*c1, *c2, *c3, *dim, *big_c);
            emit(
                cli,
                json!({"threshold": n0,
                       "provenance": "parametric existence threshold"}),
            );
        }
    }
    Ok(())
}

// keep the unused verify_structure / Structure / walk_moments imports honest:
// they back the library-level checks invoked indirectly above
#[allow(dead_code)]
fn _anchor(fm: &FeatureMap) -> Result<bool, Error> {
    let s = Structure::new(vec![]);
    let _ = walk_moments(&WalkSpec::new(fm, Rat::new(Int::one(), Int::from(2)))?);
    verify_structure(fm, &s)
}
