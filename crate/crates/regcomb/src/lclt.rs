//! The lattice random walk X = Σ_b T_b·φ(b) with independent Bernoulli(p)
//! inclusions: exact distribution by dynamic programming, the Gaussian main
//! term, the counting identity relating Pr[X = E[X]] to the number of
//! structures, Fourier-side diagnostics, short null vectors, and the
//! randomized local-correction procedure.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::matrix::int;
use crate::exact::{ExactMatrix, Int, Rat, solve_spd};
use crate::framework::FeatureMap;
use crate::hp::{HpComplex, HpCtx};
use astro_float::BigFloat;

#[derive(Debug, Clone)]
pub struct WalkSpec<'a> {
    pub fm: &'a FeatureMap,
    pub p: Rat,
}

impl<'a> WalkSpec<'a> {
    pub fn new(fm: &'a FeatureMap, p: Rat) -> Result<Self> {
        if p <= Rat::zero() || p >= Rat::one() {
            return Err(Error::InvalidParams(format!(
                "inclusion probability must lie strictly in (0,1); got {p}"
            )));
        }
        Ok(WalkSpec { fm, p })
    }

    fn q(&self) -> Rat {
        Rat::one() - &self.p
    }

    /// Integer feature rows of the map.
    fn rows(&self) -> Vec<Vec<Int>> {
        (0..self.fm.ground_size())
            .map(|b| self.fm.row(b).iter().map(|x| x.to_integer()).collect())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct WalkMoments {
    pub mean: Vec<Rat>,
    pub covariance: ExactMatrix,
}

pub fn walk_moments(w: &WalkSpec) -> WalkMoments {
    let mean = w
        .fm
        .column_sums()
        .iter()
        .map(|s| &w.p * Rat::from_integer(s.clone()))
        .collect();
    let mut cov = w.fm.matrix.gram();
    let pq = &w.p * w.q();
    for e in cov.entries_mut() {
        *e *= &pq;
    }
    WalkMoments { mean, covariance: cov }
}

#[derive(Debug, Clone)]
pub struct ExactDistribution {
    /// Pr[X = λ] for every support point λ, in lexicographic key order.
    pub probs: BTreeMap<Vec<Int>, Rat>,
}

impl ExactDistribution {
    pub fn total_mass(&self) -> Rat {
        self.probs.values().sum()
    }

    pub fn mean(&self) -> Vec<Rat> {
        let dim = self.probs.keys().next().map_or(0, |k| k.len());
        let mut mean = vec![Rat::zero(); dim];
        for (lambda, pr) in &self.probs {
            for (m, l) in mean.iter_mut().zip(lambda) {
                *m += pr * Rat::from_integer(l.clone());
            }
        }
        mean
    }

    pub fn covariance(&self) -> ExactMatrix {
        let mean = self.mean();
        let dim = mean.len();
        let mut cov = ExactMatrix::zeros(dim, dim);
        for (lambda, pr) in &self.probs {
            let centered: Vec<Rat> = lambda
                .iter()
                .zip(&mean)
                .map(|(l, m)| Rat::from_integer(l.clone()) - m)
                .collect();
            for i in 0..dim {
                for j in 0..dim {
                    cov[(i, j)] += pr * &centered[i] * &centered[j];
                }
            }
        }
        cov
    }
}

/// Convolve the point masses {(0, 1−p), (φ(b), p)} over all b, scanning B in
/// row order. Exact rationals throughout; refuses if the state map grows past
/// the configured work bound.
pub fn exact_distribution(w: &WalkSpec) -> Result<ExactDistribution> {
    let dim = w.fm.dim_v();
    let bound = crate::config::work_bound();
    let q = w.q();
    let mut states: BTreeMap<Vec<Int>, Rat> = BTreeMap::new();
    states.insert(vec![Int::zero(); dim], Rat::one());
    for row in w.rows() {
        let mut next: BTreeMap<Vec<Int>, Rat> = BTreeMap::new();
        for (lambda, pr) in &states {
            let stay = next.entry(lambda.clone()).or_insert_with(Rat::zero);
            *stay += pr * &q;
            let shifted: Vec<Int> = lambda.iter().zip(&row).map(|(l, r)| l + r).collect();
            let step = next.entry(shifted).or_insert_with(Rat::zero);
            *step += pr * &w.p;
        }
        if next.len() as u64 > bound {
            return Err(Error::WorkBound {
                task: "walk distribution dynamic program".into(),
                estimate: next.len().to_string(),
                bound: bound.to_string(),
            });
        }
        states = next;
    }
    Ok(ExactDistribution { probs: states })
}

#[derive(Debug, Clone)]
pub struct ProbResult {
    pub prob: Rat,
    pub in_lattice: bool,
}

pub fn prob_at(w: &WalkSpec, lambda: &[Int]) -> Result<ProbResult> {
    if lambda.len() != w.fm.dim_v() {
        return Err(Error::Dimension(format!(
            "lambda has {} coordinates, expected {}",
            lambda.len(),
            w.fm.dim_v()
        )));
    }
    let lambda_rat: Vec<Rat> = lambda.iter().map(crate::exact::matrix::rat_int).collect();
    let in_lattice = w.fm.lattice()?.contains(&lambda_rat);
    if !in_lattice {
        return Ok(ProbResult { prob: Rat::zero(), in_lattice });
    }
    let dist = exact_distribution(w)?;
    let prob = dist.probs.get(lambda).cloned().unwrap_or_else(Rat::zero);
    Ok(ProbResult { prob, in_lattice })
}

/// α_N = Pr[X = E[X]] / (p^N (1−p)^(|B|−N)) with p = N/|B|: the exact number
/// of structures of size N, provided the constant function lies in the span
/// of the features.
pub fn count_via_identity(fm: &FeatureMap, n: u64) -> Result<Int> {
    let b = fm.ground_size() as u64;
    if n == 0 || n >= b {
        return Err(Error::InvalidParams(format!(
            "structure size must satisfy 0 < N < |B| = {b}; got {n}"
        )));
    }
    if !crate::framework::constants_in_span(fm) {
        return Err(Error::InvalidParams(
            "counting identity needs the constant function in the feature span".into(),
        ));
    }
    let p = Rat::new(int(n as i64), int(b as i64));
    let w = WalkSpec::new(fm, p.clone())?;
    let mean = walk_moments(&w).mean;
    if mean.iter().any(|m| !m.is_integer()) {
        return Ok(Int::zero());
    }
    let target: Vec<Int> = mean.iter().map(|m| m.to_integer()).collect();
    let dist = exact_distribution(&w)?;
    let prob = dist.probs.get(&target).cloned().unwrap_or_else(Rat::zero);
    let weight = p.pow(n as i32) * w.q().pow((b - n) as i32);
    let alpha = prob / weight;
    assert!(alpha.is_integer(), "counting identity must yield an integer");
    Ok(alpha.to_integer())
}

/// Exact ln of the Gaussian main term at λ:
/// ln det𝓛 − (|A|/2)·ln 2π − ½·ln detΣ − ½(λ−E[X])ᵗΣ⁻¹(λ−E[X]),
/// with the quadratic form evaluated as an exact rational first.
pub fn gaussian_main_term_ln(w: &WalkSpec, lambda: &[Rat], ctx: &mut HpCtx) -> Result<BigFloat> {
    let dim = w.fm.dim_v();
    if lambda.len() != dim {
        return Err(Error::Dimension(format!(
            "lambda has {} coordinates, expected {dim}",
            lambda.len()
        )));
    }
    let moments = walk_moments(w);
    let centered: Vec<Rat> = lambda.iter().zip(&moments.mean).map(|(l, m)| l - m).collect();
    let y = solve_spd(&moments.covariance, &centered)?;
    let quad: Rat = centered.iter().zip(&y).map(|(c, yi)| c * yi).sum();
    let det_l = w.fm.lattice()?.det();
    // detΣ = (p(1−p))^|A| · det(φᵗφ)
    let gram_det = crate::exact::gram_determinant(&w.fm.matrix)?;
    let pq = &w.p * w.q();
    let det_sigma = pow_rat(&pq, dim as u32) * Rat::from_integer(gram_det);
    let ln_det_l = ctx.ln_rat(&Rat::from_integer(det_l));
    let ln_2pi = {
        let pi = ctx.pi();
        let two = ctx.from_rat(&Rat::from_integer(int(2)));
        ctx.ln(&ctx.mul(&two, &pi))
    };
    let half_dim = ctx.from_rat(&Rat::new(int(dim as i64), int(2)));
    let ln_det_sigma = ctx.ln_rat(&det_sigma);
    let half = ctx.from_rat(&Rat::new(int(1), int(2)));
    let quad_f = ctx.from_rat(&quad);
    let exp_term = ctx.mul(&half, &quad_f);
    let mut acc = ln_det_l;
    acc = ctx.sub(&acc, &ctx.mul(&half_dim, &ln_2pi));
    acc = ctx.sub(&acc, &ctx.mul(&half, &ln_det_sigma));
    acc = ctx.sub(&acc, &exp_term);
    Ok(acc)
}

pub fn gaussian_main_term(w: &WalkSpec, lambda: &[Rat], ctx: &mut HpCtx) -> Result<BigFloat> {
    let ln = gaussian_main_term_ln(w, lambda, ctx)?;
    Ok(ctx.exp(&ln))
}

fn pow_rat(base: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// Pr[X=λ]/main(λ) − 1, computed in log space. Errors if the exact
/// probability at λ is zero (the ratio is then degenerate).
pub fn empirical_delta(w: &WalkSpec, lambda: &[Int], ctx: &mut HpCtx) -> Result<BigFloat> {
    let dist = exact_distribution(w)?;
    let prob = dist
        .probs
        .get(lambda)
        .cloned()
        .ok_or_else(|| Error::InvalidParams("exact probability at lambda is zero".into()))?;
    let lambda_rat: Vec<Rat> = lambda.iter().map(|l| Rat::from_integer(l.clone())).collect();
    let ln_main = gaussian_main_term_ln(w, &lambda_rat, ctx)?;
    let ln_prob = ctx.ln_rat(&prob);
    let ratio = ctx.exp(&ctx.sub(&ln_prob, &ln_main));
    Ok(ctx.sub(&ratio, &ctx.one()))
}

/// X̂(θ) = ∏_b (1−p + p·e^(2πi⟨φ(b),θ⟩)), the inner products taken exactly.
pub fn fourier_transform(w: &WalkSpec, theta: &[Rat], ctx: &mut HpCtx) -> Result<HpComplex> {
    if theta.len() != w.fm.dim_v() {
        return Err(Error::Dimension(format!(
            "theta has {} coordinates, expected {}",
            theta.len(),
            w.fm.dim_v()
        )));
    }
    let pf = ctx.from_rat(&w.p);
    let qc = HpComplex::real(&w.q(), ctx);
    let mut acc = HpComplex::one(ctx);
    for b in 0..w.fm.ground_size() {
        let ip: Rat = w.fm.row(b).iter().zip(theta).map(|(x, t)| x * t).sum();
        let wave = HpComplex::unit(&ip, ctx);
        let term = wave.scale(&pf, ctx).add(&qc, ctx);
        acc = acc.mul(&term, ctx);
    }
    Ok(acc)
}

/// Σ_λ Pr[X=λ]·e^(2πi⟨λ,θ⟩) from the exact distribution — an independent
/// evaluation of the transform used as a cross-check.
pub fn fourier_from_distribution(
    dist: &ExactDistribution,
    theta: &[Rat],
    ctx: &mut HpCtx,
) -> HpComplex {
    let mut acc = HpComplex::zero(ctx);
    for (lambda, pr) in &dist.probs {
        let ip: Rat = lambda.iter().zip(theta).map(|(l, t)| Rat::from_integer(l.clone()) * t).sum();
        let wave = HpComplex::unit(&ip, ctx);
        let prf = ctx.from_rat(pr);
        acc = acc.add(&wave.scale(&prf, ctx), ctx);
    }
    acc
}

/// max_b |⟨φ(b),θ⟩| / ‖θ‖_R with ‖θ‖²_R = (1/|B|)·θᵗ(φᵗφ)θ. The squared
/// ratio is exact; only the final square root is approximate.
pub fn tameness_ratio(fm: &FeatureMap, theta: &[Rat], ctx: &mut HpCtx) -> Result<BigFloat> {
    if theta.len() != fm.dim_v() {
        return Err(Error::Dimension(format!(
            "theta has {} coordinates, expected {}",
            theta.len(),
            fm.dim_v()
        )));
    }
    let r = fm.matrix.gram();
    let rt = r.mul_vec(theta);
    let norm_sq: Rat = theta.iter().zip(&rt).map(|(a, b)| a * b).sum::<Rat>()
        / Rat::from_integer(int(fm.ground_size() as i64));
    if norm_sq.is_zero() {
        return Err(Error::InvalidParams("theta has zero R-seminorm".into()));
    }
    let max_ip = (0..fm.ground_size())
        .map(|b| {
            fm.row(b)
                .iter()
                .zip(theta)
                .map(|(x, t)| x * t)
                .sum::<Rat>()
                .abs()
        })
        .max()
        .unwrap();
    let ratio_sq = &max_ip * &max_ip / norm_sq;
    let f = ctx.from_rat(&ratio_sq);
    Ok(ctx.sqrt(&f))
}

/// Diagnostic ε = sqrt(2|A|·log N / N) used to split the Fourier domain.
pub fn epsilon_diagnostic(dim_v: usize, n: u64) -> f64 {
    (2.0 * dim_v as f64 * (n as f64).ln() / n as f64).sqrt()
}

/// Exhaustive (meet-in-the-middle) search for γ ∈ {−1,0,1}^S with
/// Σ γ_b·φ(b) = 0 and at least |S|/4 nonzero entries. `None` is definitive
/// at this scale.
pub fn find_short_null_vector(fm: &FeatureMap, s: &[usize]) -> Result<Option<Vec<i8>>> {
    if s.len() > 30 {
        return Err(Error::WorkBound {
            task: "short null vector search".into(),
            estimate: format!("3^{}", s.len()),
            bound: "3^30".to_string(),
        });
    }
    for &b in s {
        if b >= fm.ground_size() {
            return Err(Error::IndexOutOfRange { index: b, size: fm.ground_size() });
        }
    }
    let rows: Vec<Vec<Int>> = s
        .iter()
        .map(|&b| fm.row(b).iter().map(|x| x.to_integer()).collect())
        .collect();
    let dim = fm.dim_v();
    let half = s.len() / 2;
    // enumerate all signings of one half, keeping the densest per sum
    let mut table: HashMap<Vec<Int>, Vec<i8>> = HashMap::new();
    enumerate_signings(&rows[..half], dim, &mut |sum, signs| {
        let e = table.entry(sum.to_vec()).or_insert_with(|| signs.to_vec());
        if nonzeros(signs) > nonzeros(e) {
            *e = signs.to_vec();
        }
    });
    let mut best: Option<Vec<i8>> = None;
    enumerate_signings(&rows[half..], dim, &mut |sum, signs| {
        let neg: Vec<Int> = sum.iter().map(|x| -x).collect();
        if let Some(left) = table.get(&neg) {
            let mut full = left.clone();
            full.extend_from_slice(signs);
            if best.as_ref().is_none_or(|b| nonzeros(&full) > nonzeros(b)) {
                best = Some(full);
            }
        }
    });
    Ok(best.filter(|g| 4 * nonzeros(g) >= s.len()))
}

fn nonzeros(signs: &[i8]) -> usize {
    signs.iter().filter(|&&x| x != 0).count()
}

fn enumerate_signings(rows: &[Vec<Int>], dim: usize, f: &mut impl FnMut(&[Int], &[i8])) {
    let mut signs = vec![0i8; rows.len()];
    let mut sum = vec![Int::zero(); dim];
    fn rec(
        rows: &[Vec<Int>],
        i: usize,
        signs: &mut Vec<i8>,
        sum: &mut Vec<Int>,
        f: &mut impl FnMut(&[Int], &[i8]),
    ) {
        if i == rows.len() {
            f(sum, signs);
            return;
        }
        for sgn in [0i8, 1, -1] {
            signs[i] = sgn;
            if sgn != 0 {
                for (s, r) in sum.iter_mut().zip(&rows[i]) {
                    if sgn == 1 {
                        *s += r;
                    } else {
                        *s -= r;
                    }
                }
            }
            rec(rows, i + 1, signs, sum, f);
            if sgn != 0 {
                for (s, r) in sum.iter_mut().zip(&rows[i]) {
                    if sgn == 1 {
                        *s -= r;
                    } else {
                        *s += r;
                    }
                }
            }
        }
        signs[i] = 0;
    }
    rec(rows, 0, &mut signs, &mut sum, f);
}

#[derive(Debug, Clone)]
pub struct Correction {
    /// sparse coefficients over B∖E with φ(e) = Σ γ_b·φ(b)
    pub gamma: Vec<(usize, Int)>,
    pub l1: Int,
    pub retries_used: usize,
}

/// Randomized local correction: sample a window S, find a short null vector
/// through a random pivot b₀, and transport it onto e with a symmetry
/// mapping b₀ to e. The symmetry oracle must return a row permutation π with
/// π(b₀) = e under which the feature span is invariant.
pub fn local_correct(
    fm: &FeatureMap,
    excluded: &[usize],
    e: usize,
    symmetry_to: &dyn Fn(usize, usize) -> Vec<usize>,
    seed: u64,
    max_retries: usize,
) -> Result<Correction> {
    if excluded.is_empty() || !excluded.contains(&e) {
        return Err(Error::InvalidParams(
            "the erased set must be nonempty and contain the target row".into(),
        ));
    }
    let b = fm.ground_size();
    let window = 12usize.min(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e_row: Vec<Int> = fm.row(e).iter().map(|x| x.to_integer()).collect();
    for retry in 0..max_retries {
        // sample a window of distinct rows
        let mut s: Vec<usize> = Vec::with_capacity(window);
        while s.len() < window {
            let cand = rng.random_range(0..b);
            if !s.contains(&cand) {
                s.push(cand);
            }
        }
        let Some(gamma) = find_short_null_vector(fm, &s)? else {
            continue;
        };
        let support: Vec<usize> = (0..s.len()).filter(|&i| gamma[i] != 0).collect();
        let pivot = support[rng.random_range(0..support.len())];
        let b0 = s[pivot];
        let pi = symmetry_to(b0, e);
        // γ is a null relation; its image under the symmetry is one too, and
        // solving it for the pivot term expresses φ(e) in other rows
        let mut coeffs: Vec<(usize, Int)> = Vec::new();
        let pivot_sign = gamma[pivot];
        let mut ok = true;
        for &i in &support {
            if i == pivot {
                continue;
            }
            let target = pi[s[i]];
            if excluded.contains(&target) {
                ok = false;
                break;
            }
            // move γ_b to the other side and divide by −γ_{b₀} ∈ {−1,1}
            let c = int(-(gamma[i] * pivot_sign) as i64);
            coeffs.push((target, c));
        }
        if !ok {
            continue;
        }
        // merge duplicate targets and verify the correction exactly
        let mut merged: BTreeMap<usize, Int> = BTreeMap::new();
        for (i, c) in coeffs {
            *merged.entry(i).or_insert_with(Int::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        let mut recon = vec![Int::zero(); fm.dim_v()];
        for (&i, c) in &merged {
            for (r, x) in recon.iter_mut().zip(fm.row(i)) {
                *r += c * &x.to_integer();
            }
        }
        if recon != e_row {
            continue;
        }
        let l1 = merged.values().map(|c| c.abs()).sum();
        return Ok(Correction {
            gamma: merged.into_iter().collect(),
            l1,
            retries_used: retry,
        });
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{DesignParams, design_feature_map, design_symmetry_mapping};
    use crate::framework::{binomial_int, enumerate_structures};
    use crate::oa::{OaParams, oa_feature_map, oa_symmetry_mapping};

    fn constants_map(m: usize) -> FeatureMap {
        let rows = vec![vec![Int::one()]; m];
        FeatureMap::new(
            (0..m).map(|i| i.to_string()).collect(),
            vec!["const".into()],
            ExactMatrix::from_int_rows(rows),
            Int::one(),
        )
        .unwrap()
    }

    fn half() -> Rat {
        Rat::new(int(1), int(2))
    }

    #[test]
    fn binomial_distribution() {
        let fm = constants_map(4);
        let w = WalkSpec::new(&fm, half()).unwrap();
        let dist = exact_distribution(&w).unwrap();
        assert_eq!(dist.total_mass(), Rat::one());
        for k in 0..=4u64 {
            let pr = dist.probs.get(&vec![int(k as i64)]).unwrap();
            let expect = Rat::new(binomial_int(4, k), int(16));
            assert_eq!(pr, &expect);
        }
    }

    #[test]
    fn oa_221_point_probability() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let w = WalkSpec::new(&fm, half()).unwrap();
        // the mean of the walk at p=1/2; exactly 2 of the 16 subsets hit it
        let mean: Vec<Int> = walk_moments(&w).mean.iter().map(|m| m.to_integer()).collect();
        let res = prob_at(&w, &mean).unwrap();
        assert!(res.in_lattice);
        assert_eq!(res.prob, Rat::new(int(2), int(16)));
    }

    #[test]
    fn off_lattice_point_is_zero() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let w = WalkSpec::new(&fm, half()).unwrap();
        // constant coordinate 1 forces the parity of the others here
        let mut lambda = vec![Int::zero(); fm.dim_v()];
        lambda[0] = int(1);
        lambda[1] = int(3);
        let res = prob_at(&w, &lambda).unwrap();
        assert!(res.prob.is_zero());
    }

    #[test]
    fn moments_match_distribution() {
        for p in [Rat::new(int(1), int(3)), half(), Rat::new(int(3), int(5))] {
            let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
            let w = WalkSpec::new(&fm, p).unwrap();
            let moments = walk_moments(&w);
            let dist = exact_distribution(&w).unwrap();
            assert_eq!(dist.mean(), moments.mean);
            let cov = dist.covariance();
            for i in 0..fm.dim_v() {
                for j in 0..fm.dim_v() {
                    assert_eq!(cov[(i, j)], moments.covariance[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn complementation_symmetry() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let p = Rat::new(int(2), int(7));
        let wp = WalkSpec::new(&fm, p.clone()).unwrap();
        let wq = WalkSpec::new(&fm, Rat::one() - &p).unwrap();
        let dp = exact_distribution(&wp).unwrap();
        let dq = exact_distribution(&wq).unwrap();
        let totals = fm.column_sums();
        for (lambda, pr) in &dp.probs {
            let mirror: Vec<Int> = totals.iter().zip(lambda).map(|(t, l)| t - l).collect();
            assert_eq!(dq.probs.get(&mirror), Some(pr));
        }
    }

    #[test]
    fn counting_identity_examples() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        assert_eq!(count_via_identity(&fm, 2).unwrap(), int(2));
        assert_eq!(count_via_identity(&fm, 1).unwrap(), Int::zero());
        let dm = design_feature_map(&DesignParams::new(4, 2, 1).unwrap()).unwrap();
        assert_eq!(count_via_identity(&dm, 2).unwrap(), int(3));
    }

    #[test]
    fn counting_identity_matches_enumeration() {
        let fm = oa_feature_map(&OaParams::new(2, 3, 1).unwrap()).unwrap();
        for n in 1..8u64 {
            let via_walk = count_via_identity(&fm, n).unwrap();
            let via_enum = enumerate_structures(&fm, n as usize, false, None).unwrap().count;
            assert_eq!(via_walk, via_enum, "N = {n}");
        }
    }

    #[test]
    fn gaussian_at_mean_binomial() {
        let fm = constants_map(16);
        let w = WalkSpec::new(&fm, half()).unwrap();
        let mut ctx = HpCtx::with_default_precision();
        let lambda = vec![Rat::from_integer(int(8))];
        let main = gaussian_main_term(&w, &lambda, &mut ctx).unwrap();
        let v = ctx.to_f64(&main);
        // 1/sqrt(2π·4) = 0.19947…
        assert!((v - 0.199471).abs() < 1e-5, "main term was {v}");
    }

    #[test]
    fn binomial_delta_small_and_shrinking() {
        let mut ctx = HpCtx::with_default_precision();
        let mut last = f64::INFINITY;
        for m in [16usize, 32, 64] {
            let fm = constants_map(m);
            let w = WalkSpec::new(&fm, half()).unwrap();
            let lambda = vec![int((m / 2) as i64)];
            let delta = empirical_delta(&w, &lambda, &mut ctx).unwrap();
            let d = ctx.to_f64(&delta);
            assert!(d.abs() < 0.02, "delta at m={m} was {d}");
            assert!(d.abs() < last, "delta not shrinking at m={m}");
            last = d.abs();
        }
    }

    #[test]
    fn fourier_at_zero_is_one() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let w = WalkSpec::new(&fm, half()).unwrap();
        let mut ctx = HpCtx::with_default_precision();
        let theta = vec![Rat::zero(); fm.dim_v()];
        let v = fourier_transform(&w, &theta, &mut ctx).unwrap();
        assert!((ctx.to_f64(&v.re) - 1.0).abs() < 1e-50);
        assert!(ctx.to_f64(&v.im).abs() < 1e-50);
    }

    #[test]
    fn fourier_product_matches_distribution() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let w = WalkSpec::new(&fm, Rat::new(int(1), int(3))).unwrap();
        let dist = exact_distribution(&w).unwrap();
        let mut ctx = HpCtx::with_default_precision();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let theta: Vec<Rat> = (0..fm.dim_v())
                .map(|_| Rat::new(int(rng.random_range(-50..50)), int(101)))
                .collect();
            let a = fourier_transform(&w, &theta, &mut ctx).unwrap();
            let b = fourier_from_distribution(&dist, &theta, &mut ctx);
            assert!(ctx.to_f64(&ctx.sub(&a.re, &b.re)).abs() < 1e-30);
            assert!(ctx.to_f64(&ctx.sub(&a.im, &b.im)).abs() < 1e-30);
        }
    }

    #[test]
    fn fourier_dual_lattice_periodicity() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let w = WalkSpec::new(&fm, Rat::new(int(2), int(5))).unwrap();
        let dual = fm.lattice().unwrap().dual_basis();
        let mut ctx = HpCtx::with_default_precision();
        let theta: Vec<Rat> = (0..fm.dim_v())
            .map(|i| Rat::new(int(i as i64 + 1), int(17)))
            .collect();
        let base = fourier_transform(&w, &theta, &mut ctx).unwrap();
        for r in 0..dual.rows {
            let alpha = dual.row(r);
            let shifted: Vec<Rat> = theta.iter().zip(alpha).map(|(t, a)| t + a).collect();
            let v = fourier_transform(&w, &shifted, &mut ctx).unwrap();
            assert!(ctx.to_f64(&ctx.sub(&v.re, &base.re)).abs() < 1e-30);
            assert!(ctx.to_f64(&ctx.sub(&v.im, &base.im)).abs() < 1e-30);
        }
    }

    #[test]
    fn tameness_constant_map() {
        let fm = constants_map(8);
        let mut ctx = HpCtx::with_default_precision();
        let theta = vec![Rat::new(int(3), int(7))];
        let r = tameness_ratio(&fm, &theta, &mut ctx).unwrap();
        assert!((ctx.to_f64(&r) - 1.0).abs() < 1e-40);
    }

    #[test]
    fn tameness_standard_direction() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let mut ctx = HpCtx::with_default_precision();
        let mut theta = vec![Rat::zero(); fm.dim_v()];
        theta[1] = Rat::one();
        let ratio = tameness_ratio(&fm, &theta, &mut ctx).unwrap();
        let r = ctx.to_f64(&ratio);
        assert!(r >= 1.0 && r.is_finite());
    }

    #[test]
    fn null_vector_on_duplicate_rows() {
        let fm = constants_map(4);
        let gamma = find_short_null_vector(&fm, &[0, 1]).unwrap().unwrap();
        assert_eq!(nonzeros(&gamma), 2);
        assert_eq!(gamma[0] + gamma[1], 0);
    }

    #[test]
    fn null_vector_single_row_absent() {
        let fm = constants_map(4);
        assert!(find_short_null_vector(&fm, &[0]).unwrap().is_none());
    }

    #[test]
    fn null_vector_oa231_window() {
        let fm = oa_feature_map(&OaParams::new(2, 3, 1).unwrap()).unwrap();
        let s = [0usize, 1, 2, 5, 6, 7];
        let gamma = find_short_null_vector(&fm, &s).unwrap().unwrap();
        let mut sum = vec![Int::zero(); fm.dim_v()];
        for (i, &b) in s.iter().enumerate() {
            for (acc, x) in sum.iter_mut().zip(fm.row(b)) {
                *acc += int(gamma[i] as i64) * x.to_integer();
            }
        }
        assert!(sum.iter().all(|x| x.is_zero()));
        assert!(4 * nonzeros(&gamma) >= s.len());
    }

    #[test]
    fn local_correct_oa() {
        let p = OaParams::new(2, 3, 1).unwrap();
        let fm = oa_feature_map(&p).unwrap();
        let corr = local_correct(
            &fm,
            &[3],
            3,
            &|from, to| oa_symmetry_mapping(&p, from as u64, to as u64),
            42,
            200,
        )
        .unwrap();
        assert!(!corr.gamma.is_empty());
        assert!(corr.l1 >= Int::one());
    }

    #[test]
    fn local_correct_design() {
        let p = DesignParams::new(5, 2, 1).unwrap();
        let fm = design_feature_map(&p).unwrap();
        let corr = local_correct(
            &fm,
            &[0],
            0,
            &|from, to| design_symmetry_mapping(&p, from as u64, to as u64),
            7,
            200,
        )
        .unwrap();
        assert!(!corr.gamma.is_empty());
    }

    #[test]
    fn local_correct_requires_erasure() {
        let fm = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).unwrap();
        let r = local_correct(&fm, &[], 0, &|_, _| vec![], 1, 1);
        assert!(r.is_err());
    }

    #[test]
    fn epsilon_value() {
        let e = epsilon_diagnostic(4, 100);
        assert!((e - (8.0 * 100f64.ln() / 100.0).sqrt()).abs() < 1e-12);
    }
}
