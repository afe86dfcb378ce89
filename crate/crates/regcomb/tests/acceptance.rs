//! End-to-end acceptance suite. Each numbered criterion prints exactly one
//! PASS/FAIL line; the test fails if any criterion fails.

use num_traits::{One, Signed, Zero};

use regcomb::design::{
    DesignParams, FANO_LINES, colex_unrank, design_decoding_dense, design_feature_map,
    design_rho_squared, is_design,
};
use regcomb::exact::{ExactMatrix, gram_determinant};
use regcomb::framework::{
    DecodingCertificate, FeatureMap, binomial_int, divisibility_constant, enumerate_structures,
    factorial, lcm_binomials, rho_squared,
};
use regcomb::hp::HpCtx;
use regcomb::lclt::{WalkSpec, count_via_identity, empirical_delta, exact_distribution, walk_moments};
use regcomb::oa::{OaParams, oa_check_recursion, oa_decoding_vectors, oa_feature_map, oa_gram_det};
use regcomb::perm::{
    PermParams, affine_family_f5, antisymmetrizer_vectors, cyclic_family, dim_w, dim_w_census,
    is_twise, perm_divisibility, perm_feature_map, perm_gram_det, sparse_rank, symmetric_family,
};
use regcomb::{Int, Rat};

fn pow(base: u64, e: u32) -> Int {
    Int::from(base).pow(e)
}

fn constants_map(m: usize) -> FeatureMap {
    FeatureMap::new(
        (0..m).map(|i| i.to_string()).collect(),
        vec!["const".into()],
        ExactMatrix::from_int_rows(vec![vec![Int::one()]; m]),
        Int::one(),
    )
    .expect("constants map")
}

fn c1_gram_table() -> Result<(), String> {
    let table: [(u32, u32, Int); 9] = [
        (3, 1, Int::from(6)),
        (3, 2, Int::one()),
        (4, 1, Int::from(3) * pow(2, 18)),
        (4, 2, Int::from(3) * pow(2, 3)),
        (4, 3, Int::one()),
        (5, 1, pow(5, 9) * pow(3, 17) * pow(2, 19)),
        (5, 2, pow(5, 9) * pow(3, 2) * pow(2, 84)),
        (5, 3, Int::from(5) * Int::from(3) * pow(2, 3)),
        (6, 1, Int::from(5) * pow(3, 42) * pow(2, 94)),
    ];
    for (n, t, want) in table {
        let got = perm_gram_det(&PermParams::new(n, t).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("permutation gram ({n},{t}): got {got}, want {want}"));
        }
    }
    Ok(())
}

fn c2_oa_gram_closed_form() -> Result<(), String> {
    for q in [2u32, 3] {
        for n in 1..=4u32 {
            for t in 0..=n {
                let p = OaParams::new(q, n, t).map_err(|e| e.to_string())?;
                let fm = oa_feature_map(&p).map_err(|e| e.to_string())?;
                let direct = gram_determinant(&fm.matrix).map_err(|e| e.to_string())?;
                let closed = oa_gram_det(&p);
                if direct != closed {
                    return Err(format!(
                        "oa gram ({q},{n},{t}): direct {direct} vs closed form {closed}"
                    ));
                }
            }
        }
        if !oa_check_recursion(q, 4) {
            return Err(format!("oa gram exponent recursion fails for q={q}"));
        }
    }
    Ok(())
}

fn identity_matches_enumeration(fm: &FeatureMap, what: &str) -> Result<(), String> {
    // the identity needs a bias p = N/|B| strictly inside (0,1)
    for n in 1..fm.ground_size() {
        let via_dp = count_via_identity(fm, n as u64).map_err(|e| e.to_string())?;
        let direct = enumerate_structures(fm, n, false, None)
            .map_err(|e| e.to_string())?
            .count;
        if via_dp != direct {
            return Err(format!(
                "{what} at N={n}: identity {via_dp} vs enumeration {direct}"
            ));
        }
    }
    Ok(())
}

fn c3_counting_identity() -> Result<(), String> {
    for (q, n, t) in [(2, 2, 1), (2, 3, 1)] {
        let p = OaParams::new(q, n, t).map_err(|e| e.to_string())?;
        let fm = oa_feature_map(&p).map_err(|e| e.to_string())?;
        identity_matches_enumeration(&fm, &format!("oa ({q},{n},{t})"))?;
    }
    for (v, k, t) in [(4, 2, 1), (5, 2, 1)] {
        let p = DesignParams::new(v, k, t).map_err(|e| e.to_string())?;
        let fm = design_feature_map(&p).map_err(|e| e.to_string())?;
        identity_matches_enumeration(&fm, &format!("design ({v},{k},{t})"))?;
    }
    let p = PermParams::new(3, 1).map_err(|e| e.to_string())?;
    let fm = perm_feature_map(&p).map_err(|e| e.to_string())?;
    identity_matches_enumeration(&fm, "perm (3,1)")
}

fn c4_hand_counts() -> Result<(), String> {
    let count = |fm: &FeatureMap, n: usize| -> Result<Int, String> {
        Ok(enumerate_structures(fm, n, false, None)
            .map_err(|e| e.to_string())?
            .count)
    };
    let oa = oa_feature_map(&OaParams::new(2, 2, 1).unwrap()).map_err(|e| e.to_string())?;
    if count(&oa, 2)? != Int::from(2) {
        return Err("oa (2,2,1) at N=2 should have exactly 2 solutions".into());
    }
    let dm =
        design_feature_map(&DesignParams::new(4, 2, 1).unwrap()).map_err(|e| e.to_string())?;
    if count(&dm, 2)? != Int::from(3) {
        return Err("perfect matchings of K4 should number 3".into());
    }
    let pm = perm_feature_map(&PermParams::new(3, 1).unwrap()).map_err(|e| e.to_string())?;
    if count(&pm, 3)? != Int::from(2) {
        return Err("1-wise 3-subsets of S3 should number 2".into());
    }
    let fano = DesignParams::new(7, 3, 2).unwrap();
    let lines: Vec<Vec<u32>> = FANO_LINES
        .iter()
        .map(|l| {
            let mut b: Vec<u32> = l.iter().map(|&e| e - 1).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let (valid, profile) = is_design(&fano, &lines).map_err(|e| e.to_string())?;
    let lambda_t = profile.lambdas.last().expect("profile nonempty");
    if !valid || *lambda_t != Rat::one() {
        return Err(format!(
            "fano lines should be a 2-(7,3,1) design (valid={valid}, lambda={lambda_t})"
        ));
    }
    Ok(())
}

fn c5_design_rho_consistency() -> Result<(), String> {
    for (v, k, t) in [(3, 2, 1), (4, 2, 1), (5, 2, 1), (5, 3, 1), (6, 3, 2)] {
        let p = DesignParams::new(v, k, t).map_err(|e| e.to_string())?;
        let closed = design_rho_squared(&p).map_err(|e| e.to_string())?;
        let fm = design_feature_map(&p).map_err(|e| e.to_string())?;
        let direct = rho_squared(&fm).map_err(|e| e.to_string())?;
        if closed != direct {
            return Err(format!(
                "rho^2 ({v},{k},{t}): eigenvalue product {closed} vs lattice/gram {direct}"
            ));
        }
    }
    Ok(())
}

fn c6_decoding_certificates() -> Result<(), String> {
    for q in [2u32, 3] {
        for n in 1..=4u32 {
            for t in 0..=n {
                let p = OaParams::new(q, n, t).map_err(|e| e.to_string())?;
                let fm = oa_feature_map(&p).map_err(|e| e.to_string())?;
                let cert = oa_decoding_vectors(&p).map_err(|e| e.to_string())?;
                if cert.m != Int::one() || cert.c4 != pow(2, t) {
                    return Err(format!("oa ({q},{n},{t}): expected m=1, c4=2^t"));
                }
                cert.validate(&fm)
                    .map_err(|e| format!("oa ({q},{n},{t}) certificate: {e}"))?;
            }
        }
    }
    for v in 2u32..=7 {
        for k in 1..=v {
            for t in 1..=k.min(v - k) {
                if binomial_int(v as u64, k as u64) > Int::from(35) {
                    continue;
                }
                let p = DesignParams::new(v, k, t).map_err(|e| e.to_string())?;
                let fm = design_feature_map(&p).map_err(|e| e.to_string())?;
                let tsets: u64 = binomial_int(v as u64, t as u64).try_into().unwrap();
                let gammas = (0..tsets)
                    .map(|r| design_decoding_dense(&p, &colex_unrank(r, t)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                let cert = DecodingCertificate {
                    m: lcm_binomials(t) * binomial_int(k as u64, t as u64),
                    gammas,
                    c4: pow(8, t) * binomial_int(k as u64, t as u64),
                };
                cert.validate(&fm)
                    .map_err(|e| format!("design ({v},{k},{t}) certificate: {e}"))?;
            }
        }
    }
    Ok(())
}

fn c7_permutation_structure() -> Result<(), String> {
    for n in 1..=7u32 {
        for t in 1..=n {
            let p = PermParams::new(n, t).map_err(|e| e.to_string())?;
            let hooks = dim_w(&p);
            let census = dim_w_census(&p).map_err(|e| e.to_string())?;
            if hooks != census {
                return Err(format!(
                    "dim W ({n},{t}): hook sum {hooks} vs LIS census {census}"
                ));
            }
        }
    }
    for n in 2..=5u32 {
        for t in 1..n {
            let p = PermParams::new(n, t).map_err(|e| e.to_string())?;
            let fm = perm_feature_map(&p).map_err(|e| e.to_string())?;
            let vecs = antisymmetrizer_vectors(&p).map_err(|e| e.to_string())?;
            let expect: usize = (factorial(n as u64) - dim_w(&p)).try_into().unwrap();
            let rank = sparse_rank(&vecs, fm.ground_size(), Some(expect));
            if rank != expect {
                return Err(format!(
                    "antisymmetrizer rank ({n},{t}): {rank}, want n!-dim W = {expect}"
                ));
            }
            let bound: i64 = factorial((t + 2) as u64).try_into().unwrap();
            for v in &vecs {
                let l1: i64 = v.iter().map(|&(_, c)| c.abs() as i64).sum();
                if l1 > bound {
                    return Err(format!("antisymmetrizer l1 {l1} exceeds (t+2)! = {bound}"));
                }
                for j in 0..fm.dim_v() {
                    let dot: Rat = v
                        .iter()
                        .map(|&(i, c)| &fm.matrix[(i, j)] * Rat::from_integer(Int::from(c as i64)))
                        .sum();
                    if !dot.is_zero() {
                        return Err(format!("antisymmetrizer not orthogonal at ({n},{t})"));
                    }
                }
            }
            let closed = perm_divisibility(&p);
            let via_lattice = divisibility_constant(&fm).map_err(|e| e.to_string())?;
            if closed != via_lattice {
                return Err(format!(
                    "divisibility ({n},{t}): n!/(n-t)! = {closed} vs lattice {via_lattice}"
                ));
            }
        }
    }
    Ok(())
}

fn c8_lclt_quality() -> Result<(), String> {
    let mut ctx = HpCtx::with_default_precision();
    let half = Rat::new(Int::one(), Int::from(2));
    let mut last = f64::INFINITY;
    for m in [16usize, 32, 64] {
        let fm = constants_map(m);
        let w = WalkSpec::new(&fm, half.clone()).map_err(|e| e.to_string())?;
        let lam = vec![Int::from(m as i64 / 2)];
        let d = empirical_delta(&w, &lam, &mut ctx).map_err(|e| e.to_string())?;
        let d = ctx.to_f64(&d).abs();
        if m == 16 && d >= 0.02 {
            return Err(format!("binomial delta at |B|=16 is {d}, want < 0.02"));
        }
        if d >= last {
            return Err(format!("|delta| not decreasing at |B|={m}: {d} >= {last}"));
        }
        last = d;
    }
    let p = OaParams::new(2, 4, 1).map_err(|e| e.to_string())?;
    let fm = oa_feature_map(&p).map_err(|e| e.to_string())?;
    let w = WalkSpec::new(&fm, half).map_err(|e| e.to_string())?;
    let dist = exact_distribution(&w).map_err(|e| e.to_string())?;
    let moments = walk_moments(&w);
    if dist.mean() != moments.mean {
        return Err("oa (2,4,1): distribution mean disagrees with closed-form moments".into());
    }
    if dist.covariance() != moments.covariance {
        return Err("oa (2,4,1): distribution covariance disagrees with closed-form moments".into());
    }
    let lam: Vec<Int> = moments
        .mean
        .iter()
        .map(|r| {
            if !r.is_integer() {
                return Err("oa (2,4,1): mean is not an integer point".to_string());
            }
            Ok(r.to_integer())
        })
        .collect::<Result<_, _>>()?;
    let d = empirical_delta(&w, &lam, &mut ctx).map_err(|e| e.to_string())?;
    let d = ctx.to_f64(&d).abs();
    if d >= 1.0 {
        return Err(format!("oa (2,4,1) delta at the mean is {d}, want < 1"));
    }
    Ok(())
}

fn c9_known_families() -> Result<(), String> {
    for n in 1..=8u32 {
        if !is_twise(n, 1, &cyclic_family(n)).map_err(|e| e.to_string())? {
            return Err(format!("cyclic group in S_{n} should be 1-wise"));
        }
    }
    if !is_twise(5, 2, &affine_family_f5()).map_err(|e| e.to_string())? {
        return Err("affine group over F_5 should be 2-wise".into());
    }
    for n in 1..=5u32 {
        for t in 1..=n {
            if !is_twise(n, t, &symmetric_family(n)).map_err(|e| e.to_string())? {
                return Err(format!("S_{n} should be {t}-wise"));
            }
        }
    }
    Ok(())
}

fn c10_lcm_bound() -> Result<(), String> {
    for t in 1..=30u32 {
        let l = lcm_binomials(t);
        if l > pow(4, t) {
            return Err(format!("lcm({t}) = {l} exceeds 4^{t}"));
        }
    }
    if lcm_binomials(4) != Int::from(12) {
        return Err(format!("lcm(4) = {}, want 12", lcm_binomials(4)));
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("1 permutation gram determinant table", c1_gram_table),
        ("2 orthogonal array gram closed form + recursion", c2_oa_gram_closed_form),
        ("3 counting identity vs enumeration", c3_counting_identity),
        ("4 hand-verifiable counts", c4_hand_counts),
        ("5 design rho-squared consistency", c5_design_rho_consistency),
        ("6 decoding certificates", c6_decoding_certificates),
        ("7 permutation dimension / perp / divisibility", c7_permutation_structure),
        ("8 walk delta quality and exact moments", c8_lclt_quality),
        ("9 known t-wise permutation families", c9_known_families),
        ("10 lcm bound", c10_lcm_bound),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("PASS  criterion {name}"),
            Err(msg) => {
                println!("FAIL  criterion {name}: {msg}");
                failed += 1;
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
