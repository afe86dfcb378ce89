//! Block designs: feature map over k-subsets, coverage verification, the
//! divisibility constant, decoding vectors, the Wilson/Bapat closed form for
//! rho and the counting formulas for designs and regular hypergraphs.
//!
//! Blocks are sorted element lists over [v] (1-based externally); the ground
//! set is ordered colexicographically so blocks rank/unrank without storing
//! the full list.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::int;
use crate::exact::{ExactMatrix, Int, Rat};
use crate::framework::{
    CountResult, FeatureMap, binomial_int, binomial_signed, count_result_from_log,
    enumerate_structures, factorial, generic_main_term_log, lcm_binomials,
};
use crate::hp::HpCtx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignParams {
    pub v: u32,
    pub k: u32,
    pub t: u32,
}

impl DesignParams {
    pub fn new(v: u32, k: u32, t: u32) -> Result<Self> {
        if !(1 <= t && t <= k && k <= v) {
            return Err(Error::InvalidParams(format!(
                "design needs 1 <= t <= k <= v; got v={v}, k={k}, t={t}"
            )));
        }
        Ok(DesignParams { v, k, t })
    }

    pub fn ground_size(&self) -> u64 {
        let b = binomial_int(self.v as u64, self.k as u64);
        b.try_into().expect("ground size fits u64")
    }

    pub fn dim_v(&self) -> u64 {
        binomial_int(self.v as u64, self.t as u64)
            .try_into()
            .expect("dimension fits u64")
    }

    fn check_basis_regime(&self) -> Result<()> {
        if self.k > self.v - self.t {
            return Err(Error::InvalidParams(format!(
                "k > v - t (k={}, v={}, t={}): the feature columns are dependent \
                 and the design question is trivial in this regime",
                self.k, self.v, self.t
            )));
        }
        Ok(())
    }
}

/// Colexicographic rank of a sorted 0-based subset.
pub fn colex_rank(set: &[u32]) -> u64 {
    set.iter()
        .enumerate()
        .map(|(i, &e)| {
            let b: u64 = binomial_int(e as u64, i as u64 + 1)
                .try_into()
                .expect("rank fits u64");
            b
        })
        .sum()
}

/// Inverse of colex_rank for subsets of size k.
pub fn colex_unrank(mut rank: u64, k: u32) -> Vec<u32> {
    let mut out = vec![0u32; k as usize];
    for i in (1..=k).rev() {
        // largest e with C(e, i) <= rank
        let mut e = i - 1;
        loop {
            let b: u64 = binomial_int(e as u64 + 1, i as u64).try_into().unwrap();
            if b > rank {
                break;
            }
            e += 1;
        }
        let used: u64 = binomial_int(e as u64, i as u64).try_into().unwrap();
        rank -= used;
        out[i as usize - 1] = e;
    }
    out
}

fn block_label(set: &[u32]) -> String {
    set.iter()
        .map(|e| (e + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_block(p: &DesignParams, s: &str, size: u32) -> Result<Vec<u32>> {
    let mut elems: Vec<u32> = s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .ok()
                .filter(|&e| 1 <= e && e <= p.v)
                .map(|e| e - 1)
                .ok_or_else(|| Error::BadMember(format!("bad element {tok:?} in block {s:?}")))
        })
        .collect::<Result<_>>()?;
    elems.sort_unstable();
    elems.dedup();
    if elems.len() != size as usize {
        return Err(Error::BadMember(format!(
            "block {s:?} is not a {size}-subset of [{}]",
            p.v
        )));
    }
    Ok(elems)
}

fn all_subsets(v: u32, k: u32) -> Vec<Vec<u32>> {
    let count: u64 = binomial_int(v as u64, k as u64).try_into().unwrap();
    (0..count).map(|r| colex_unrank(r, k)).collect()
}

pub fn design_feature_map(p: &DesignParams) -> Result<FeatureMap> {
    p.check_basis_regime()?;
    let b = p.ground_size();
    let a = p.dim_v();
    let cells = b.saturating_mul(a);
    if cells > crate::config::work_bound() {
        return Err(Error::WorkBound {
            task: format!("build {b}x{a} design feature map"),
            estimate: cells.to_string(),
            bound: crate::config::work_bound().to_string(),
        });
    }
    let blocks = all_subsets(p.v, p.k);
    let tsets = all_subsets(p.v, p.t);
    let mut rows = Vec::with_capacity(blocks.len());
    let mut labels = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let row: Vec<Int> = tsets
            .iter()
            .map(|a| int(a.iter().all(|e| block.contains(e)) as i64))
            .collect();
        rows.push(row);
        labels.push(block_label(block));
    }
    let col_labels = tsets.iter().map(|a| block_label(a)).collect();
    FeatureMap::new(labels, col_labels, ExactMatrix::from_int_rows(rows), Int::one())
}

/// λ_s = C(k,s)/C(v,s) · N for 0 <= s <= t.
#[derive(Debug, Clone)]
pub struct LambdaProfile {
    pub lambdas: Vec<Rat>,
}

impl LambdaProfile {
    pub fn new(p: &DesignParams, n: u64) -> Self {
        let lambdas = (0..=p.t)
            .map(|s| {
                Rat::new(
                    binomial_int(p.k as u64, s as u64) * int(n as i64),
                    binomial_int(p.v as u64, s as u64),
                )
            })
            .collect();
        LambdaProfile { lambdas }
    }

    pub fn all_integral(&self) -> bool {
        self.lambdas.iter().all(|l| l.is_integer())
    }

    pub fn first_violation(&self) -> Option<usize> {
        self.lambdas.iter().position(|l| !l.is_integer())
    }
}

/// Direct coverage check: every t-subset covered exactly λ times.
pub fn is_design(p: &DesignParams, blocks: &[Vec<u32>]) -> Result<(bool, LambdaProfile)> {
    for b in blocks {
        if b.len() != p.k as usize || b.iter().any(|&e| e >= p.v) || !b.is_sorted() {
            return Err(Error::BadMember(format!("{b:?} is not a sorted k-subset")));
        }
    }
    let profile = LambdaProfile::new(p, blocks.len() as u64);
    let lambda = &profile.lambdas[p.t as usize];
    if !lambda.is_integer() {
        return Ok((false, profile));
    }
    let lambda = lambda.to_integer();
    let ok = all_subsets(p.v, p.t).iter().all(|tset| {
        let cover = blocks
            .iter()
            .filter(|b| tset.iter().all(|e| b.contains(e)))
            .count();
        int(cover as i64) == lambda
    });
    Ok((ok, profile))
}

/// Minimal c₁ with C(k,s)·c₁ ≡ 0 mod C(v,s) for 1 <= s <= t.
pub fn design_divisibility(p: &DesignParams) -> Int {
    (1..=p.t).fold(Int::one(), |acc, s| {
        let cvs = binomial_int(p.v as u64, s as u64);
        let cks = binomial_int(p.k as u64, s as u64);
        acc.lcm(&(&cvs / cks.gcd(&cvs)))
    })
}

/// The scaled decoding vector γ'_{a,u} with φ(γ') = C(k,t)·lcm(t)·e_a,
/// supported on the k-subsets of u.
pub fn design_decoding_vector(
    p: &DesignParams,
    a: &[u32],
    u: &[u32],
) -> Result<Vec<(Vec<u32>, Int)>> {
    p.check_basis_regime()?;
    if a.len() != p.t as usize {
        return Err(Error::BadMember(format!("{a:?} is not a t-subset")));
    }
    if u.len() != (p.k + p.t) as usize || !a.iter().all(|e| u.contains(e)) {
        return Err(Error::BadMember(format!(
            "u = {u:?} must be a (k+t)-subset containing a = {a:?}"
        )));
    }
    let lcm_t = lcm_binomials(p.t);
    if p.k == p.t {
        // φ restricted to k-subsets is the identity on t-subsets here.
        return Ok(vec![(a.to_vec(), lcm_t)]);
    }
    let t = p.t as u64;
    let k = p.k as u64;
    let mut out = Vec::new();
    for block in combinations(u, p.k) {
        let s = block.iter().filter(|e| a.contains(e)).count() as u64;
        // lcm(t)/t! · (-1)^(t-s) · s!(k-s-1)!/(k-t-1)!
        let coeff = Rat::new(
            &lcm_t * factorial(s) * factorial(k - s - 1),
            factorial(t) * factorial(k - t - 1),
        );
        assert!(coeff.is_integer(), "scaled coefficient must be integral");
        let mut c = coeff.to_integer();
        if (t - s) % 2 == 1 {
            c = -c;
        }
        out.push((block, c));
    }
    Ok(out)
}

/// Canonical u for a: a together with the k smallest elements outside a.
pub fn canonical_u(p: &DesignParams, a: &[u32]) -> Vec<u32> {
    let mut u = a.to_vec();
    let mut e = 0;
    while u.len() < (p.k + p.t) as usize {
        if !a.contains(&e) {
            u.push(e);
        }
        e += 1;
    }
    u.sort_unstable();
    u
}

fn combinations(pool: &[u32], k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(pool: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(pool, k as usize, 0, &mut cur, &mut out);
    out
}

/// Decoding vector as a dense vector over the colex-ordered ground set.
pub fn design_decoding_dense(p: &DesignParams, a: &[u32]) -> Result<Vec<Int>> {
    let u = canonical_u(p, a);
    let sparse = design_decoding_vector(p, a, &u)?;
    let b = p.ground_size() as usize;
    let mut dense = vec![Int::zero(); b];
    for (block, c) in sparse {
        dense[colex_rank(&block) as usize] += c;
    }
    Ok(dense)
}

/// Multiplicity exponents m_s = C(v,s) − C(v,s−1) of the Wilson/Bapat spectra.
fn multiplicity(v: u32, s: u32) -> Int {
    binomial_signed(v as i64, s as i64) - binomial_signed(v as i64, s as i64 - 1)
}

/// rho² from the Wilson diagonal form and Bapat eigenvalues:
/// ∏_s [C(k−s,t−s)/C(v−t−s,k−t)]^(C(v,s) − C(v,s−1)).
pub fn design_rho_squared(p: &DesignParams) -> Result<Rat> {
    p.check_basis_regime()?;
    let mut acc = Rat::one();
    for s in 0..=p.t {
        let num = binomial_signed((p.k - s) as i64, (p.t - s) as i64);
        let den = binomial_signed((p.v - p.t - s) as i64, (p.k - p.t) as i64);
        let m: u32 = multiplicity(p.v, s).try_into().expect("multiplicity fits");
        let base = Rat::new(num, den);
        acc *= pow_rat(&base, m);
    }
    Ok(acc)
}

/// det(φᵗφ) from the Bapat eigenvalues:
/// ∏_s [C(k−s,t−s)·C(v−t−s,k−t)]^(C(v,s) − C(v,s−1)).
pub fn design_gram_det(p: &DesignParams) -> Result<Int> {
    p.check_basis_regime()?;
    let mut acc = Int::one();
    for s in 0..=p.t {
        let eig = binomial_signed((p.k - s) as i64, (p.t - s) as i64)
            * binomial_signed((p.v - p.t - s) as i64, (p.k - p.t) as i64);
        let m: u32 = multiplicity(p.v, s).try_into().expect("multiplicity fits");
        acc *= eig.pow(m);
    }
    Ok(acc)
}

fn pow_rat(base: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

pub fn design_count(p: &DesignParams, n: i64, c: f64, attach_exact: bool) -> Result<CountResult> {
    p.check_basis_regime()?;
    let ground = p.ground_size();
    if n < 0 || n as u64 > ground {
        return Ok(CountResult::exact_only(Int::zero(), "size out of range"));
    }
    if n == 0 || n as u64 == ground {
        return Ok(CountResult::exact_only(Int::one(), "degenerate size: empty or full set"));
    }
    let profile = LambdaProfile::new(p, n as u64);
    if let Some(s) = profile.first_violation() {
        return Ok(CountResult::exact_only(
            Int::zero(),
            format!(
                "lambda_{s} = {} is not an integer",
                profile.lambdas[s]
            ),
        ));
    }
    let mut ctx = HpCtx::with_default_precision();
    let rho_sq = design_rho_squared(p)?;
    let ln_main = generic_main_term_log(&rho_sq, p.dim_v() as usize, ground, n as u64, &mut ctx);
    let delta = {
        let m = (n as u64).min(ground - n as u64) as f64;
        let base = c * p.v as f64 / p.t as f64;
        Some(base.powf(c * p.t as f64) / m.sqrt())
    };
    let exact = if attach_exact {
        let fm = design_feature_map(p)?;
        Some(enumerate_structures(&fm, n as usize, false, None)?.count)
    } else {
        None
    };
    Ok(count_result_from_log(
        &ln_main,
        delta,
        exact,
        Some("wilson/bapat main term; delta bound parametric in c".into()),
        &mut ctx,
    ))
}

/// d-regular k-uniform hypergraphs on n vertices are 1-(n,k,d) designs
/// with exactly nd/k edges.
pub fn hypergraph_count(n: u32, k: u32, d: u32, c: f64, attach_exact: bool) -> Result<CountResult> {
    let nd = n as u64 * d as u64;
    if nd % k as u64 != 0 {
        return Ok(CountResult::exact_only(
            Int::zero(),
            format!("nd = {nd} is not divisible by k = {k}"),
        ));
    }
    let p = DesignParams::new(n, k, 1)?;
    design_count(&p, (nd / k as u64) as i64, c, attach_exact)
}

/// Row permutation of the block set induced by a relabeling of [v].
pub fn vertex_relabeling(p: &DesignParams, sigma: &[u32]) -> Vec<usize> {
    let blocks = all_subsets(p.v, p.k);
    blocks
        .iter()
        .map(|b| {
            let mut image: Vec<u32> = b.iter().map(|&e| sigma[e as usize]).collect();
            image.sort_unstable();
            colex_rank(&image) as usize
        })
        .collect()
}

/// A relabeling of [v] whose induced block permutation maps `from` to `to`.
pub fn design_symmetry_mapping(p: &DesignParams, from: u64, to: u64) -> Vec<usize> {
    let a = colex_unrank(from, p.k);
    let b = colex_unrank(to, p.k);
    let mut sigma = vec![u32::MAX; p.v as usize];
    for (x, y) in a.iter().zip(&b) {
        sigma[*x as usize] = *y;
    }
    let mut rest_src: Vec<u32> = (0..p.v).filter(|e| !a.contains(e)).collect();
    let rest_dst: Vec<u32> = (0..p.v).filter(|e| !b.contains(e)).collect();
    rest_src.sort_unstable();
    for (x, y) in rest_src.iter().zip(rest_dst) {
        sigma[*x as usize] = y;
    }
    vertex_relabeling(p, &sigma)
}

pub const FANO_LINES: [[u32; 3]; 7] = [
    [1, 2, 4],
    [2, 3, 5],
    [3, 4, 6],
    [4, 5, 7],
    [5, 6, 1],
    [6, 7, 2],
    [7, 1, 3],
];
