//! Orthogonal arrays: feature map over [q]^n, strength verification,
//! decoding vectors, closed-form Gram determinant and the counting formula.
//!
//! Alphabet symbols are 1..q internally with q the omitted symbol; external
//! strings use 0-based digits, mapped by the codec as d <-> d+1.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::int;
use crate::exact::{ExactMatrix, Int, Rat};
use crate::framework::{
    CountResult, DecodingCertificate, FeatureMap, Structure, binomial_int, count_result_from_log,
    enumerate_structures, generic_main_term_log,
};
use crate::hp::HpCtx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OaParams {
    pub q: u32,
    pub n: u32,
    pub t: u32,
}

impl OaParams {
    pub fn new(q: u32, n: u32, t: u32) -> Result<Self> {
        if q < 2 || n < 1 || t > n {
            return Err(Error::InvalidParams(format!(
                "orthogonal array needs q >= 2, n >= 1, 0 <= t <= n; got q={q}, n={n}, t={t}"
            )));
        }
        Ok(OaParams { q, n, t })
    }

    pub fn ground_size(&self) -> u64 {
        (self.q as u64).pow(self.n)
    }

    /// |A| = Σ_{i<=t} C(n,i)(q-1)^i.
    pub fn dim_v(&self) -> Int {
        let mut acc = Int::zero();
        for i in 0..=self.t {
            acc += binomial_int(self.n as u64, i as u64)
                * int(self.q as i64 - 1).pow(i);
        }
        acc
    }
}

/// Column index: positions I (0-based, sorted) with internal values in 1..q-1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OaIndex {
    pub positions: Vec<u32>,
    pub values: Vec<u32>,
}

impl OaIndex {
    fn label(&self) -> String {
        if self.positions.is_empty() {
            return "const".into();
        }
        self.positions
            .iter()
            .zip(&self.values)
            .map(|(i, v)| format!("{}={}", i + 1, v))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// All column indices ordered by (|I|, I lexicographic, v lexicographic).
pub fn oa_indices(p: &OaParams) -> Vec<OaIndex> {
    let mut out = vec![OaIndex {
        positions: vec![],
        values: vec![],
    }];
    for size in 1..=p.t {
        let mut subsets = Vec::new();
        subset_rec(p.n, size, 0, &mut Vec::new(), &mut subsets);
        for positions in subsets {
            // odometer over values in [1, q-1]^size, lexicographic
            let mut values = vec![1u32; size as usize];
            'vals: loop {
                out.push(OaIndex {
                    positions: positions.clone(),
                    values: values.clone(),
                });
                for i in (0..values.len()).rev() {
                    if values[i] < p.q - 1 {
                        values[i] += 1;
                        for v in values[i + 1..].iter_mut() {
                            *v = 1;
                        }
                        continue 'vals;
                    }
                }
                break;
            }
        }
    }
    out
}

fn subset_rec(n: u32, size: u32, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() as u32 == size {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subset_rec(n, size, i + 1, cur, out);
        cur.pop();
    }
}

/// Internal digits (1..q) of row index, most significant first.
pub fn row_digits(p: &OaParams, index: u64) -> Vec<u32> {
    let mut digits = vec![1u32; p.n as usize];
    let mut rem = index;
    for i in (0..p.n as usize).rev() {
        digits[i] = (rem % p.q as u64) as u32 + 1;
        rem /= p.q as u64;
    }
    digits
}

pub fn row_index_of(p: &OaParams, digits: &[u32]) -> u64 {
    digits
        .iter()
        .fold(0u64, |acc, &d| acc * p.q as u64 + (d as u64 - 1))
}

fn row_label(p: &OaParams, index: u64) -> String {
    row_digits(p, index)
        .iter()
        .map(|d| {
            std::char::from_digit(d - 1, 36).expect("alphabet fits base 36")
        })
        .collect()
}

pub fn parse_oa_member(p: &OaParams, s: &str) -> Result<u64> {
    let digits: Vec<u32> = s
        .chars()
        .map(|c| {
            c.to_digit(36)
                .filter(|&d| d < p.q)
                .map(|d| d + 1)
                .ok_or_else(|| Error::BadMember(format!("bad digit {c:?} in {s:?}")))
        })
        .collect::<Result<_>>()?;
    if digits.len() != p.n as usize {
        return Err(Error::BadMember(format!(
            "{s:?} has length {} but n={}",
            s.len(),
            p.n
        )));
    }
    Ok(row_index_of(p, &digits))
}

pub fn oa_feature_map(p: &OaParams) -> Result<FeatureMap> {
    let b = p.ground_size();
    let a = p.dim_v();
    let cells = Rat::from_integer(int(b as i64) * &a);
    let bound = Rat::from_integer(int(crate::config::work_bound() as i64));
    if cells > bound {
        return Err(Error::WorkBound {
            task: format!("build {}x{} orthogonal-array feature map", b, a),
            estimate: cells.to_integer().to_string(),
            bound: bound.to_integer().to_string(),
        });
    }
    let indices = oa_indices(p);
    let mut rows = Vec::with_capacity(b as usize);
    let mut labels = Vec::with_capacity(b as usize);
    for bi in 0..b {
        let digits = row_digits(p, bi);
        let row: Vec<Int> = indices
            .iter()
            .map(|ix| {
                let hit = ix
                    .positions
                    .iter()
                    .zip(&ix.values)
                    .all(|(&pos, &v)| digits[pos as usize] == v);
                int(hit as i64)
            })
            .collect();
        rows.push(row);
        labels.push(row_label(p, bi));
    }
    let col_labels = indices.iter().map(|ix| ix.label()).collect();
    FeatureMap::new(labels, col_labels, ExactMatrix::from_int_rows(rows), Int::one())
}

/// Direct strength test, independent of the feature map: every t-coordinate
/// restriction hits every pattern exactly |T|/q^t times.
pub fn oa_is_array(p: &OaParams, members: &[u64]) -> bool {
    if p.t == 0 {
        return true;
    }
    let qt = (p.q as u64).pow(p.t);
    if members.len() as u64 % qt != 0 {
        return false;
    }
    if members.is_empty() {
        return true; // vacuously an array with index zero
    }
    let expect = members.len() as u64 / qt;
    let mut subsets = Vec::new();
    subset_rec(p.n, p.t, 0, &mut Vec::new(), &mut subsets);
    let rows: Vec<Vec<u32>> = members.iter().map(|&m| row_digits(p, m)).collect();
    for positions in &subsets {
        let mut counts = std::collections::HashMap::new();
        for row in &rows {
            let pattern: Vec<u32> = positions.iter().map(|&i| row[i as usize]).collect();
            *counts.entry(pattern).or_insert(0u64) += 1;
        }
        let patterns = (p.q as u64).pow(p.t);
        if counts.len() as u64 != patterns || counts.values().any(|&c| c != expect) {
            return false;
        }
    }
    true
}

/// Decoding vectors with m = 1: for a = (I,v), support on the 2^|I| rows
/// b^(J, v|J) with signs (-1)^(|I|-|J|).
pub fn oa_decoding_vectors(p: &OaParams) -> Result<DecodingCertificate> {
    let b = p.ground_size() as usize;
    let indices = oa_indices(p);
    let mut gammas = Vec::with_capacity(indices.len());
    for ix in &indices {
        let mut gamma = vec![Int::zero(); b];
        let k = ix.positions.len();
        for mask in 0u32..(1 << k) {
            let mut digits = vec![p.q; p.n as usize];
            let mut jsize = 0;
            for bit in 0..k {
                if mask >> bit & 1 == 1 {
                    digits[ix.positions[bit] as usize] = ix.values[bit];
                    jsize += 1;
                }
            }
            let row = row_index_of(p, &digits) as usize;
            let sign = if (k - jsize) % 2 == 0 { 1 } else { -1 };
            gamma[row] += int(sign);
        }
        gammas.push(gamma);
    }
    Ok(DecodingCertificate {
        m: Int::one(),
        gammas,
        c4: int(2i64.pow(p.t)),
    })
}

/// Closed form det(φᵗφ) = q^(n·C(n-1,t)·(q-1)^t).
pub fn oa_gram_det(p: &OaParams) -> Int {
    let exponent: u32 = oa_gram_exponent_q(p.q, p.n, p.t)
        .try_into()
        .expect("exponent fits u32");
    int(p.q as i64).pow(exponent)
}

/// Exponent a_{n,t} = n·C(n-1,t)·(q-1)^t of the closed form, as a function
/// of (n,t) for fixed q — the quantity the recursion constrains.
pub fn oa_gram_exponent_q(q: u32, n: u32, t: u32) -> Int {
    if t > n {
        return Int::zero();
    }
    int(n as i64) * binomial_int(n as u64 - 1, t as u64) * int(q as i64 - 1).pow(t)
}

/// |A(n,t)| for fixed q.
pub fn oa_dim_q(q: u32, n: u32, t: u32) -> Int {
    let mut acc = Int::zero();
    for i in 0..=t.min(n) {
        acc += binomial_int(n as u64, i as u64) * int(q as i64 - 1).pow(i);
    }
    acc
}

/// Verifies the exponent recursion a_{n,t} = a_{n-1,t} + d_{n-1,t}
/// + (q-1)·a_{n-1,t-1} − d_{n-1,t-1} for all 0 < t < n ≤ n_max.
pub fn oa_check_recursion(q: u32, n_max: u32) -> bool {
    for n in 2..=n_max {
        for t in 1..n {
            let lhs = oa_gram_exponent_q(q, n, t);
            let rhs = oa_gram_exponent_q(q, n - 1, t) + oa_dim_q(q, n - 1, t)
                + int(q as i64 - 1) * oa_gram_exponent_q(q, n - 1, t - 1)
                - oa_dim_q(q, n - 1, t - 1);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Counting formula main term with the parametric error bound; for desk-scale
/// instances the exact count from the enumeration oracle is attached.
pub fn oa_count(p: &OaParams, n: i64, c: f64, attach_exact: bool) -> Result<CountResult> {
    let ground = p.ground_size();
    if n < 0 || n as u64 > ground {
        return Ok(CountResult::exact_only(Int::zero(), "size out of range"));
    }
    if n == 0 || n as u64 == ground {
        return Ok(CountResult::exact_only(Int::one(), "degenerate size: empty or full set"));
    }
    let qt = int(p.q as i64).pow(p.t);
    if !(int(n) % &qt).is_zero() {
        return Ok(CountResult::exact_only(
            Int::zero(),
            format!("size {n} is not a multiple of q^t = {qt}"),
        ));
    }
    let mut ctx = HpCtx::with_default_precision();
    // rho² = q^(-n·C(n-1,t)·(q-1)^t); lattice of the OA map is Z^A.
    let exponent: u32 = oa_gram_exponent_q(p.q, p.n, p.t)
        .try_into()
        .map_err(|_| Error::InvalidParams("gram exponent overflow".into()))?;
    let rho_sq = Rat::new(Int::one(), int(p.q as i64).pow(exponent));
    let dim: usize = p
        .dim_v()
        .try_into()
        .map_err(|_| Error::InvalidParams("dimension overflow".into()))?;
    let ln_main = generic_main_term_log(&rho_sq, dim, ground, n as u64, &mut ctx);
    let delta = {
        let m = (n as u64).min(ground - n as u64) as f64;
        let base = c * p.q as f64 * p.n as f64 / p.t.max(1) as f64;
        Some(base.powf(c * p.t as f64) / m.sqrt())
    };
    let exact = if attach_exact {
        let fm = oa_feature_map(p)?;
        Some(enumerate_structures(&fm, n as usize, false, None)?.count)
    } else {
        None
    };
    Ok(count_result_from_log(
        &ln_main,
        delta,
        exact,
        Some("gaussian main term; delta bound parametric in c".into()),
        &mut ctx,
    ))
}

/// Symmetry of the OA map: translation x -> x + shift (mod q), as a row
/// permutation. Used by the conditions report and local correction.
pub fn oa_translation(p: &OaParams, shift: &[u32]) -> Vec<usize> {
    assert_eq!(shift.len(), p.n as usize);
    let b = p.ground_size();
    (0..b)
        .map(|bi| {
            let digits = row_digits(p, bi);
            let translated: Vec<u32> = digits
                .iter()
                .zip(shift)
                .map(|(&d, &s)| ((d - 1 + s) % p.q) + 1)
                .collect();
            row_index_of(p, &translated) as usize
        })
        .collect()
}

/// Translation taking row `from` to row `to`.
pub fn oa_symmetry_mapping(p: &OaParams, from: u64, to: u64) -> Vec<usize> {
    let a = row_digits(p, from);
    let b = row_digits(p, to);
    let shift: Vec<u32> = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| (y + p.q - x) % p.q)
        .collect();
    oa_translation(p, &shift)
}

pub fn structure_from_labels(p: &OaParams, fm: &FeatureMap, labels: &[String]) -> Result<Structure> {
    let mut members = Vec::with_capacity(labels.len());
    for l in labels {
        parse_oa_member(p, l)?; // validates digits and length
        members.push(fm.row_index(l)?);
    }
    Ok(Structure::new(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gram_determinant;
    use crate::framework::{divisibility_constant, verify_structure};

    #[test]
    fn dims() {
        assert_eq!(OaParams::new(2, 2, 1).unwrap().dim_v(), int(3));
        assert_eq!(OaParams::new(3, 2, 1).unwrap().dim_v(), int(5));
        assert_eq!(OaParams::new(2, 3, 3).unwrap().dim_v(), int(8));
    }

    #[test]
    fn map_shapes_and_constant_column() {
        let p = OaParams::new(2, 2, 1).unwrap();
        let fm = oa_feature_map(&p).unwrap();
        assert_eq!(fm.ground_size(), 4);
        assert_eq!(fm.dim_v(), 3);
        assert!(
            (0..4).all(|i| fm.matrix[(i, 0)].is_one()),
            "first column must be the constant-one column"
        );
    }

    #[test]
    fn is_array_cases() {
        let p = OaParams::new(2, 2, 1).unwrap();
        let full: Vec<u64> = (0..4).collect();
        assert!(oa_is_array(&p, &full));
        let good = vec![
            parse_oa_member(&p, "00").unwrap(),
            parse_oa_member(&p, "11").unwrap(),
        ];
        assert!(oa_is_array(&p, &good));
        let p2 = OaParams::new(2, 2, 2).unwrap();
        assert!(!oa_is_array(&p2, &good));
    }

    #[test]
    fn agreement_with_feature_map_exhaustive() {
        for (q, n, t) in [(2u32, 2u32, 1u32), (2, 2, 2), (2, 3, 1), (2, 3, 2)] {
            let p = OaParams::new(q, n, t).unwrap();
            let fm = oa_feature_map(&p).unwrap();
            let b = p.ground_size();
            assert!(b <= 16);
            for mask in 0u32..(1 << b) {
                let members: Vec<u64> = (0..b).filter(|i| mask >> i & 1 == 1).collect();
                let st = Structure::new(members.iter().map(|&m| m as usize).collect());
                assert_eq!(
                    oa_is_array(&p, &members),
                    verify_structure(&fm, &st).unwrap(),
                    "disagreement at q={q} n={n} t={t} mask={mask}"
                );
            }
        }
    }

    #[test]
    fn decoding_vectors_exact() {
        for (q, n, t) in [(2u32, 2u32, 1u32), (2, 3, 2), (3, 2, 2)] {
            let p = OaParams::new(q, n, t).unwrap();
            let fm = oa_feature_map(&p).unwrap();
            let cert = oa_decoding_vectors(&p).unwrap();
            cert.validate(&fm).expect("certificate must verify exactly");
        }
    }

    #[test]
    fn decoding_vector_221_example() {
        let p = OaParams::new(2, 2, 1).unwrap();
        let cert = oa_decoding_vectors(&p).unwrap();
        // column order: const, 1=1, 2=1. Column "1=1": +1 on internal row (1,2)
        // = external "01"... external digit = internal - 1, so internal (1,2)
        // is external "01" and internal (2,2) is external "11".
        let gamma = &cert.gammas[1];
        let i_pos = row_index_of(&p, &[1, 2]) as usize;
        let i_neg = row_index_of(&p, &[2, 2]) as usize;
        assert_eq!(gamma[i_pos], int(1));
        assert_eq!(gamma[i_neg], int(-1));
        assert_eq!(crate::framework::l1_norm(gamma), int(2));
    }

    #[test]
    fn gram_det_closed_form_instances() {
        let p = OaParams::new(2, 3, 1).unwrap();
        assert_eq!(oa_gram_det(&p), int(64));
        let fm = oa_feature_map(&p).unwrap();
        assert_eq!(gram_determinant(&fm.matrix).unwrap(), int(64));
        // t = 0 gives q^n, t = n gives 1
        assert_eq!(oa_gram_det(&OaParams::new(3, 4, 0).unwrap()), int(81));
        assert_eq!(oa_gram_det(&OaParams::new(2, 3, 3).unwrap()), int(1));
    }

    #[test]
    fn recursion_holds() {
        assert!(oa_check_recursion(2, 8));
        assert!(oa_check_recursion(3, 8));
        assert!(oa_check_recursion(5, 8));
    }

    #[test]
    fn lattice_is_unimodular() {
        for (q, n, t) in [(2u32, 3u32, 1u32), (2, 3, 2), (3, 2, 1)] {
            let p = OaParams::new(q, n, t).unwrap();
            let fm = oa_feature_map(&p).unwrap();
            assert_eq!(fm.lattice().unwrap().det(), int(1));
        }
    }

    #[test]
    fn divisibility_is_q_to_t() {
        for (q, n, t) in [(2u32, 3u32, 1u32), (2, 3, 2), (3, 2, 1), (2, 2, 2)] {
            let p = OaParams::new(q, n, t).unwrap();
            let fm = oa_feature_map(&p).unwrap();
            assert_eq!(
                divisibility_constant(&fm).unwrap(),
                int(q as i64).pow(t),
                "divisibility constant mismatch at q={q} n={n} t={t}"
            );
        }
    }

    #[test]
    fn count_oa_221() {
        let p = OaParams::new(2, 2, 1).unwrap();
        let r = oa_count(&p, 2, 1.0, true).unwrap();
        assert_eq!(r.exact, Some(int(2)));
        let main = r.main.unwrap();
        assert!((main - 4.063).abs() < 5e-3, "main term was {main}");
        // not a multiple of q^t
        let r = oa_count(&p, 1, 1.0, false).unwrap();
        assert_eq!(r.exact, Some(int(0)));
    }

    #[test]
    fn translations_are_symmetries() {
        let p = OaParams::new(2, 2, 1).unwrap();
        let fm = oa_feature_map(&p).unwrap();
        for shift in [[0, 1], [1, 0], [1, 1]] {
            let pi = oa_translation(&p, &shift);
            assert!(crate::framework::check_symmetry(&fm, &pi).unwrap());
        }
    }
}
