//! t-wise permutations: the LIS-indexed combinatorial basis over S_n,
//! hook-length dimension cross-checks, the divisibility constant, and
//! antisymmetrizer vectors spanning the orthogonal complement of the
//! feature span.
//!
//! Permutations are one-line notation, 0-based internally and 1-based in
//! labels, with the ground set S_n ordered lexicographically.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::int;
use crate::exact::{ExactMatrix, Int, Rat};
use crate::framework::{FeatureMap, factorial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermParams {
    pub n: u32,
    pub t: u32,
}

impl PermParams {
    pub fn new(n: u32, t: u32) -> Result<Self> {
        if n < 1 || t < 1 || t > n {
            return Err(Error::InvalidParams(format!(
                "t-wise permutations need 1 <= t <= n; got n={n}, t={t}"
            )));
        }
        Ok(PermParams { n, t })
    }

    pub fn ground_size(&self) -> u64 {
        (1..=self.n as u64).product()
    }

    fn check_bound(&self) -> Result<()> {
        let b = self.ground_size();
        if b > crate::config::work_bound() {
            return Err(Error::WorkBound {
                task: format!("enumerate S_{}", self.n),
                estimate: b.to_string(),
                bound: crate::config::work_bound().to_string(),
            });
        }
        Ok(())
    }
}

/// All of S_n in lexicographic one-line order.
pub fn all_perms(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next permutation in lexicographic order
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Lexicographic rank of a permutation (Lehmer code).
pub fn perm_rank(p: &[u32]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        let f: u64 = (1..=(n - 1 - i) as u64).product();
        rank += smaller * f;
    }
    rank
}

pub fn perm_unrank(mut rank: u64, n: u32) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n).collect();
    let mut out = Vec::with_capacity(n as usize);
    for i in (0..n as u64).rev() {
        let f: u64 = (1..=i).product();
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

pub fn perm_label(p: &[u32]) -> String {
    p.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_perm(n: u32, s: &str) -> Result<Vec<u32>> {
    let vals: Vec<u32> = s
        .split([',', ' '])
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<u32>()
                .ok()
                .filter(|&x| 1 <= x && x <= n)
                .map(|x| x - 1)
                .ok_or_else(|| Error::BadMember(format!("bad image {tok:?} in {s:?}")))
        })
        .collect::<Result<_>>()?;
    let mut seen = vec![false; n as usize];
    for &v in &vals {
        seen[v as usize] = true;
    }
    if vals.len() != n as usize || !seen.iter().all(|&b| b) {
        return Err(Error::BadMember(format!("{s:?} is not a permutation of [{n}]")));
    }
    Ok(vals)
}

fn perm_sign(p: &[u32]) -> i32 {
    let mut inv = 0usize;
    for i in 0..p.len() {
        inv += p[i + 1..].iter().filter(|&&x| x < p[i]).count();
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// Which maximal increasing subsequence to take as S(σ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LisPolicy {
    FirstByIndex,
    LastByIndex,
}

/// LIS length together with the index set of the chosen maximal increasing
/// subsequence; `FirstByIndex` takes the lexicographically first index
/// sequence among the maximal ones.
pub fn lis_with_policy(sigma: &[u32], policy: LisPolicy) -> (usize, Vec<usize>) {
    let n = sigma.len();
    if n == 0 {
        return (0, Vec::new());
    }
    match policy {
        LisPolicy::FirstByIndex => {
            // len_from[i]: longest increasing run starting at i
            let mut len_from = vec![1usize; n];
            for i in (0..n).rev() {
                for j in i + 1..n {
                    if sigma[j] > sigma[i] {
                        len_from[i] = len_from[i].max(1 + len_from[j]);
                    }
                }
            }
            let best = *len_from.iter().max().unwrap();
            let mut idx = Vec::with_capacity(best);
            let mut need = best;
            let mut last: Option<usize> = None;
            for i in 0..n {
                if len_from[i] == need && last.is_none_or(|l| sigma[i] > sigma[l]) {
                    idx.push(i);
                    last = Some(i);
                    need -= 1;
                    if need == 0 {
                        break;
                    }
                }
            }
            (best, idx)
        }
        LisPolicy::LastByIndex => {
            let mut len_to = vec![1usize; n];
            for i in 0..n {
                for j in 0..i {
                    if sigma[j] < sigma[i] {
                        len_to[i] = len_to[i].max(1 + len_to[j]);
                    }
                }
            }
            let best = *len_to.iter().max().unwrap();
            let mut idx = Vec::with_capacity(best);
            let mut need = best;
            let mut next: Option<usize> = None;
            for i in (0..n).rev() {
                if len_to[i] == need && next.is_none_or(|r| sigma[i] < sigma[r]) {
                    idx.push(i);
                    next = Some(i);
                    need -= 1;
                    if need == 0 {
                        break;
                    }
                }
            }
            idx.reverse();
            (best, idx)
        }
    }
}

pub fn lis(sigma: &[u32]) -> (usize, Vec<usize>) {
    lis_with_policy(sigma, LisPolicy::FirstByIndex)
}

/// The feature map over S_n: columns indexed by σ with LIS(σ) ≥ n−t, row
/// entry 1 iff π agrees with σ off the chosen maximal increasing
/// subsequence S(σ).
pub fn perm_feature_map(p: &PermParams) -> Result<FeatureMap> {
    perm_feature_map_with_policy(p, LisPolicy::FirstByIndex)
}

pub fn perm_feature_map_with_policy(p: &PermParams, policy: LisPolicy) -> Result<FeatureMap> {
    p.check_bound()?;
    let perms = all_perms(p.n);
    let need = (p.n - p.t) as usize;
    let mut cols: Vec<(&Vec<u32>, Vec<usize>)> = Vec::new();
    for sigma in &perms {
        let (len, s) = lis_with_policy(sigma, policy);
        if len >= need {
            let constrained: Vec<usize> =
                (0..p.n as usize).filter(|j| !s.contains(j)).collect();
            cols.push((sigma, constrained));
        }
    }
    let mut rows = Vec::with_capacity(perms.len());
    for pi in &perms {
        let row: Vec<Int> = cols
            .iter()
            .map(|(sigma, constrained)| {
                int(constrained.iter().all(|&j| pi[j] == sigma[j]) as i64)
            })
            .collect();
        rows.push(row);
    }
    let row_labels = perms.iter().map(|p| perm_label(p)).collect();
    let col_labels = cols.iter().map(|(s, _)| perm_label(s)).collect();
    FeatureMap::new(row_labels, col_labels, ExactMatrix::from_int_rows(rows), Int::one())
}

// ---------------------------------------------------------------------------
// Partitions, tableaux, hook lengths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty()
            || parts.iter().any(|&p| p == 0)
            || parts.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::InvalidParams(format!("{parts:?} is not a partition")));
        }
        Ok(Partition { parts })
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.parts[0];
        let parts = (0..cols)
            .map(|c| self.parts.iter().filter(|&&p| p > c).count() as u32)
            .collect();
        Partition { parts }
    }
}

/// All partitions of n, parts in weakly decreasing order.
pub fn partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// Dimension of the irreducible S_n representation of the given shape:
/// n! divided by the product of hook lengths.
pub fn hook_length_dim(lambda: &Partition) -> Int {
    let conj = lambda.conjugate();
    let mut prod = Int::one();
    for (r, &row_len) in lambda.parts.iter().enumerate() {
        for c in 0..row_len as usize {
            let hook = (row_len as usize - c) + (conj.parts[c] as usize - r) - 1;
            prod *= int(hook as i64);
        }
    }
    factorial(lambda.n() as u64) / prod
}

/// dim(W) = Σ dim(V_λ)² over shapes with λ₁ ≥ n−t; cross-checked against the
/// LIS census (the Robinson–Schensted correspondence) for small n.
pub fn dim_w(p: &PermParams) -> Int {
    let need = p.n.saturating_sub(p.t);
    let via_hooks: Int = partitions(p.n)
        .iter()
        .filter(|l| l.parts[0] >= need)
        .map(|l| {
            let d = hook_length_dim(l);
            &d * &d
        })
        .sum();
    if p.ground_size() <= 50_000 {
        let census = all_perms(p.n)
            .iter()
            .filter(|s| lis(s).0 >= need as usize)
            .count();
        debug_assert_eq!(via_hooks, int(census as i64), "hook sum vs LIS census");
    }
    via_hooks
}

pub fn dim_w_census(p: &PermParams) -> Result<Int> {
    p.check_bound()?;
    let need = (p.n - p.t) as usize;
    Ok(int(all_perms(p.n).iter().filter(|s| lis(s).0 >= need).count() as i64))
}

// ---------------------------------------------------------------------------
// Verification, invariants
// ---------------------------------------------------------------------------

/// Direct t-wise check: every pair of distinct t-tuples (I, J) is hit by
/// exactly |T|·(n−t)!/n! members.
pub fn is_twise(n: u32, t: u32, members: &[Vec<u32>]) -> Result<bool> {
    let p = PermParams::new(n, t)?;
    for m in members {
        if m.len() != n as usize {
            return Err(Error::BadMember(format!("{m:?} is not in S_{n}")));
        }
        let mut seen = vec![false; n as usize];
        for &v in m {
            if v >= n || seen[v as usize] {
                return Err(Error::BadMember(format!("{m:?} is not in S_{n}")));
            }
            seen[v as usize] = true;
        }
    }
    let orbit = perm_divisibility(&p); // n!/(n−t)!
    let count = int(members.len() as i64);
    if !(&count % &orbit).is_zero() {
        return Ok(false);
    }
    let expected = count / orbit;
    // iterate over ordered t-tuples of distinct positions
    let mut tuple: Vec<u32> = Vec::new();
    fn rec(
        n: u32,
        t: u32,
        tuple: &mut Vec<u32>,
        members: &[Vec<u32>],
        expected: &Int,
    ) -> bool {
        if tuple.len() == t as usize {
            let mut counts = std::collections::HashMap::new();
            for m in members {
                let image: Vec<u32> = tuple.iter().map(|&i| m[i as usize]).collect();
                *counts.entry(image).or_insert(0u64) += 1;
            }
            // every ordered tuple of distinct images must appear: there are
            // n(n−1)…(n−t+1) of them
            let total: u64 = (1..=n as u64).rev().take(t as usize).product();
            if counts.len() as u64 != total && !expected.is_zero() {
                return false;
            }
            return counts.values().all(|&c| int(c as i64) == *expected);
        }
        for i in 0..n {
            if !tuple.contains(&i) {
                tuple.push(i);
                if !rec(n, t, tuple, members, expected) {
                    tuple.pop();
                    return false;
                }
                tuple.pop();
            }
        }
        true
    }
    Ok(rec(n, t, &mut tuple, members, &expected))
}

pub fn perm_divisibility(p: &PermParams) -> Int {
    factorial(p.n as u64) / factorial((p.n - p.t) as u64)
}

pub fn perm_gram_det(p: &PermParams) -> Result<Int> {
    perm_gram_det_with_policy(p, LisPolicy::FirstByIndex)
}

pub fn perm_gram_det_with_policy(p: &PermParams, policy: LisPolicy) -> Result<Int> {
    let fm = perm_feature_map_with_policy(p, policy)?;
    crate::exact::gram_determinant(&fm.matrix)
}

/// rho² = 1/det(φᵗφ): the feature lattice is all of Z^A.
pub fn perm_rho_squared(p: &PermParams) -> Result<Rat> {
    Ok(Rat::new(Int::one(), perm_gram_det(p)?))
}

// ---------------------------------------------------------------------------
// Antisymmetrizers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Tableau {
    pub shape: Partition,
    /// filling[r][c] holds a value in 0..n, each exactly once
    pub filling: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(shape: Partition, filling: Vec<Vec<u32>>) -> Result<Self> {
        let n = shape.n();
        let mut seen = vec![false; n as usize];
        if filling.len() != shape.parts.len() {
            return Err(Error::InvalidParams("filling shape mismatch".into()));
        }
        for (row, &len) in filling.iter().zip(&shape.parts) {
            if row.len() != len as usize {
                return Err(Error::InvalidParams("filling shape mismatch".into()));
            }
            for &v in row {
                if v >= n || seen[v as usize] {
                    return Err(Error::InvalidParams("filling is not a bijection".into()));
                }
                seen[v as usize] = true;
            }
        }
        Ok(Tableau { shape, filling })
    }

    /// Values of column c, top to bottom.
    pub fn column(&self, c: usize) -> Vec<u32> {
        self.filling
            .iter()
            .filter_map(|row| row.get(c).copied())
            .collect()
    }
}

/// All |Q_T| = ∏λ′ᵢ! permutations of the values preserving each column,
/// with signs.
pub fn column_stabilizer(t: &Tableau) -> Vec<(Vec<u32>, i32)> {
    let n = t.shape.n() as usize;
    let columns: Vec<Vec<u32>> = (0..t.shape.parts[0] as usize).map(|c| t.column(c)).collect();
    let mut out = vec![((0..n as u32).collect::<Vec<u32>>(), 1i32)];
    for col in &columns {
        let arrangements = permutations_of(col);
        let mut next = Vec::with_capacity(out.len() * arrangements.len());
        for (base, bsign) in &out {
            for arr in &arrangements {
                let mut p = base.clone();
                for (src, dst) in col.iter().zip(arr) {
                    p[*src as usize] = *dst;
                }
                let s = block_sign(col, arr);
                next.push((p, bsign * s));
            }
        }
        out = next;
    }
    out
}

fn permutations_of(vals: &[u32]) -> Vec<Vec<u32>> {
    if vals.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        let mut rest = vals.to_vec();
        rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, v);
            out.push(tail);
        }
    }
    out
}

fn block_sign(src: &[u32], dst: &[u32]) -> i32 {
    // sign of the permutation mapping src[i] -> dst[i]
    let idx: Vec<u32> = dst
        .iter()
        .map(|d| src.iter().position(|s| s == d).unwrap() as u32)
        .collect();
    perm_sign(&idx)
}

/// Set partitions of 0..n into unordered blocks of the given sizes; blocks
/// of equal size are generated once by requiring increasing minima.
fn block_partitions(n: u32, sizes: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    fn rec(
        remaining: &[u32],
        sizes: &[u32],
        prev: Option<(u32, u32)>, // (size, min) of the previous block
        blocks: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        let Some((&size, rest_sizes)) = sizes.split_first() else {
            out.push(blocks.clone());
            return;
        };
        for block in choose(remaining, size as usize) {
            if prev.is_some_and(|(ps, pm)| ps == size && block[0] < pm) {
                continue;
            }
            let next: Vec<u32> =
                remaining.iter().copied().filter(|e| !block.contains(e)).collect();
            let min = block[0];
            blocks.push(block);
            rec(&next, rest_sizes, Some((size, min)), blocks, out);
            blocks.pop();
        }
    }
    let all: Vec<u32> = (0..n).collect();
    rec(&all, sizes, None, &mut blocks, &mut out);
    out
}

fn choose(pool: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..pool.len() {
        for mut tail in choose(&pool[i + 1..], k - 1) {
            tail.insert(0, pool[i]);
            out.push(tail);
        }
    }
    out
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // (a ∘ b)(i) = a(b(i))
    b.iter().map(|&i| a[i as usize]).collect()
}

/// Sparse integer vectors over S_n spanning the orthogonal complement of the
/// feature span: for each shape with first part n−t−1, each partition of the
/// values into column sets, and each π, the vector with entry sign(σ) at
/// σ⁻¹π for σ in the stabilizer. Each has ℓ₁ norm ∏λ′ᵢ! ≤ (t+2)!.
pub fn antisymmetrizer_vectors(p: &PermParams) -> Result<Vec<Vec<(usize, i32)>>> {
    p.check_bound()?;
    if p.t + 1 >= p.n {
        return Ok(Vec::new());
    }
    let top = p.n - p.t - 1;
    let shapes: Vec<Partition> = partitions(p.n)
        .into_iter()
        .filter(|l| l.parts[0] == top)
        .collect();
    let perms = all_perms(p.n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for shape in &shapes {
        let sizes = shape.conjugate().parts;
        for blocks in block_partitions(p.n, &sizes) {
            // stabilizer of this value partition, built from a tableau whose
            // columns are exactly the blocks
            let tab = tableau_from_columns(shape, &blocks);
            let stab: Vec<(Vec<u32>, i32)> = column_stabilizer(&tab)
                .into_iter()
                .map(|(s, sign)| (invert(&s), sign))
                .collect();
            for pi in &perms {
                let mut entries: Vec<(usize, i32)> = stab
                    .iter()
                    .map(|(sinv, sign)| (perm_rank(&compose(sinv, pi)) as usize, *sign))
                    .collect();
                entries.sort_unstable();
                // sign-normalize so a vector and its negation dedupe together
                if entries.first().is_some_and(|e| e.1 < 0) {
                    for e in &mut entries {
                        e.1 = -e.1;
                    }
                }
                if seen.insert(entries.clone()) {
                    out.push(entries);
                }
            }
        }
    }
    Ok(out)
}

fn tableau_from_columns(shape: &Partition, blocks: &[Vec<u32>]) -> Tableau {
    let mut filling: Vec<Vec<u32>> =
        shape.parts.iter().map(|&l| vec![0; l as usize]).collect();
    for (c, block) in blocks.iter().enumerate() {
        for (r, &v) in block.iter().enumerate() {
            filling[r][c] = v;
        }
    }
    Tableau::new(shape.clone(), filling).expect("columns form a filling")
}

/// Rank of a sparse integer vector collection via incremental elimination.
pub fn sparse_rank(vectors: &[Vec<(usize, i32)>], dim: usize, stop_at: Option<usize>) -> usize {
    // basis rows in echelon form over the rationals
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in vectors {
        let mut row = vec![Rat::zero(); dim];
        for &(i, c) in v {
            row[i] = Rat::from_integer(int(c as i64));
        }
        for (b, &piv) in basis.iter().zip(&pivots) {
            if !row[piv].is_zero() {
                let f = row[piv].clone();
                for j in 0..dim {
                    let s = &f * &b[j];
                    row[j] -= s;
                }
            }
        }
        if let Some(piv) = row.iter().position(|x| !x.is_zero()) {
            let f = row[piv].clone();
            for x in &mut row {
                *x /= &f;
            }
            basis.push(row);
            pivots.push(piv);
            if stop_at.is_some_and(|s| basis.len() >= s) {
                break;
            }
        }
    }
    basis.len()
}

// ---------------------------------------------------------------------------
// Known families
// ---------------------------------------------------------------------------

/// Row permutation of S_n induced by left-composing every permutation with
/// τ = π_to ∘ π_from⁻¹; it maps `from` to `to` and preserves the feature
/// span (relabeling values sends pattern indicators to pattern indicators).
pub fn perm_symmetry_mapping(n: u32, from: u64, to: u64) -> Vec<usize> {
    let pf = perm_unrank(from, n);
    let pt = perm_unrank(to, n);
    let tau = compose(&pt, &invert(&pf));
    all_perms(n)
        .iter()
        .map(|p| perm_rank(&compose(&tau, p)) as usize)
        .collect()
}

/// The n cyclic shifts x ↦ x + a mod n: a sharply 1-wise family.
pub fn cyclic_family(n: u32) -> Vec<Vec<u32>> {
    (0..n).map(|a| (0..n).map(|x| (x + a) % n).collect()).collect()
}

/// The 20 invertible affine maps x ↦ ax + b over F₅: a sharply 2-wise family.
pub fn affine_family_f5() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a in 1..5u32 {
        for b in 0..5u32 {
            out.push((0..5).map(|x| (a * x + b) % 5).collect());
        }
    }
    out
}

/// All of S_n: t-wise for every t ≤ n.
pub fn symmetric_family(n: u32) -> Vec<Vec<u32>> {
    all_perms(n)
}
