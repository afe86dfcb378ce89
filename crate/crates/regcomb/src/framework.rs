//! The general feature-map framework: structure verification, divisibility
//! constant, the density parameter rho, symmetry and bounded-basis checks,
//! decoding certificates and the brute-force enumeration oracle.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::int;
use crate::exact::{ExactMatrix, Int, IntegerLattice, Rat, gram_determinant, solve_spd};

/// Integer matrix whose columns form a basis of the test-function space,
/// with a family-specific codec given by the row labels.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub matrix: ExactMatrix,
    pub c2: Int,
}

impl FeatureMap {
    /// Validates integrality, the declared entry bound and column independence.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        matrix: ExactMatrix,
        c2: Int,
    ) -> Result<Self> {
        if matrix.rows != row_labels.len() || matrix.cols != col_labels.len() {
            return Err(Error::Dimension(format!(
                "feature map {}x{} does not match {} row / {} column labels",
                matrix.rows,
                matrix.cols,
                row_labels.len(),
                col_labels.len()
            )));
        }
        if !matrix.is_integer() {
            return Err(Error::InvalidParams("feature map entries must be integers".into()));
        }
        if c2 < Int::one() || matrix.max_abs_int() > c2 {
            return Err(Error::InvalidParams(format!(
                "declared entry bound {} violated (max entry {})",
                c2,
                matrix.max_abs_int()
            )));
        }
        let rank = matrix.rank();
        if rank < matrix.cols {
            return Err(Error::RankDeficient {
                found: rank,
                expected: matrix.cols,
            });
        }
        Ok(FeatureMap {
            row_labels,
            col_labels,
            matrix,
            c2,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.matrix.rows
    }

    pub fn dim_v(&self) -> usize {
        self.matrix.cols
    }

    /// Feature row φ(b).
    pub fn row(&self, b: usize) -> &[Rat] {
        self.matrix.row(b)
    }

    pub fn row_index(&self, label: &str) -> Result<usize> {
        self.row_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::BadMember(label.to_string()))
    }

    /// Column sums: the vector sum of all feature rows.
    pub fn column_sums(&self) -> Vec<Int> {
        let mut sums = vec![Int::zero(); self.dim_v()];
        for b in 0..self.ground_size() {
            for (s, x) in sums.iter_mut().zip(self.matrix.row(b)) {
                *s += x.to_integer();
            }
        }
        sums
    }

    pub fn lattice(&self) -> Result<IntegerLattice> {
        IntegerLattice::from_generators(&self.matrix)
    }
}

/// A candidate structure: sorted duplicate-free row indices into the ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    members: Vec<usize>,
}

impl Structure {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Structure { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Exact test of the defining equation: |B|·Σ_{t∈T} φ(t) = N·Σ_{b∈B} φ(b),
/// compared componentwise in integers (no division).
pub fn verify_structure(fm: &FeatureMap, t: &Structure) -> Result<bool> {
    let b = fm.ground_size();
    for &i in t.members() {
        if i >= b {
            return Err(Error::IndexOutOfRange { index: i, size: b });
        }
    }
    let n = int(t.size() as i64);
    let b_int = int(b as i64);
    let total = fm.column_sums();
    let mut part = vec![Int::zero(); fm.dim_v()];
    for &i in t.members() {
        for (s, x) in part.iter_mut().zip(fm.matrix.row(i)) {
            *s += x.to_integer();
        }
    }
    Ok(part
        .iter()
        .zip(&total)
        .all(|(p, s)| p * &b_int == &n * s))
}

/// Minimal positive N with (N/|B|)·Σ φ(b) in the row lattice of φ.
pub fn divisibility_constant(fm: &FeatureMap) -> Result<Int> {
    let lat = fm.lattice()?;
    let b = int(fm.ground_size() as i64);
    let mean: Vec<Rat> = fm
        .column_sums()
        .iter()
        .map(|s| Rat::new(s.clone(), b.clone()))
        .collect();
    Ok(lat.minimal_multiplier(&mean))
}

/// Exact rho² = det(L(φ))² / det(φᵗφ).
pub fn rho_squared(fm: &FeatureMap) -> Result<Rat> {
    let lat = fm.lattice()?;
    let gram = gram_determinant(&fm.matrix)?;
    let d = lat.det();
    Ok(Rat::new(&d * &d, gram))
}

pub struct EnumerationResult {
    pub count: Int,
    pub structures: Option<Vec<Structure>>,
}

/// Brute-force oracle: count (and optionally list) all size-N subsets
/// satisfying the defining equation, in lexicographic order.
///
/// Prunes by partial-sum feasibility when all entries are nonnegative.
/// Refuses when C(|B|, N) exceeds the work bound, unless `cap` is set to
/// limit the number of visited nodes explicitly.
pub fn enumerate_structures(
    fm: &FeatureMap,
    n: usize,
    collect: bool,
    cap: Option<u64>,
) -> Result<EnumerationResult> {
    let b = fm.ground_size();
    if n > b {
        return Ok(EnumerationResult {
            count: Int::zero(),
            structures: collect.then(Vec::new),
        });
    }
    let bound = cap.unwrap_or_else(crate::config::work_bound);
    let est = binomial(b as u64, n as u64);
    if cap.is_none() && est > Rat::from_integer(int(bound as i64)) {
        return Err(Error::WorkBound {
            task: format!("enumerate size-{n} subsets of {b}"),
            estimate: est.to_integer().to_string(),
            bound: bound.to_string(),
        });
    }

    // Target for the partial sums: N · colsum / |B| must be an integer vector.
    let b_int = int(b as i64);
    let n_int = int(n as i64);
    let target: Vec<Rat> = fm
        .column_sums()
        .iter()
        .map(|s| Rat::new(&n_int * s, b_int.clone()))
        .collect();
    if target.iter().any(|t| !t.is_integer()) {
        return Ok(EnumerationResult {
            count: Int::zero(),
            structures: collect.then(Vec::new),
        });
    }
    let target: Vec<Int> = target.iter().map(|t| t.to_integer()).collect();
    let nonneg = (0..b).all(|i| fm.matrix.row(i).iter().all(|x| !x.is_negative()));

    let rows: Vec<Vec<Int>> = (0..b)
        .map(|i| fm.matrix.row(i).iter().map(|x| x.to_integer()).collect())
        .collect();

    struct Dfs<'a> {
        rows: &'a [Vec<Int>],
        target: &'a [Int],
        n: usize,
        b: usize,
        nonneg: bool,
        count: Int,
        chosen: Vec<usize>,
        out: Option<Vec<Structure>>,
        visited: u64,
        cap: u64,
    }

    impl Dfs<'_> {
        fn run(&mut self, next: usize, sum: &mut [Int]) -> Result<()> {
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::WorkBound {
                    task: "subset enumeration".into(),
                    estimate: format!("more than {} nodes", self.cap),
                    bound: self.cap.to_string(),
                });
            }
            if self.chosen.len() == self.n {
                if sum.iter().zip(self.target).all(|(a, t)| a == t) {
                    self.count += 1;
                    if let Some(out) = &mut self.out {
                        out.push(Structure::new(self.chosen.clone()));
                    }
                }
                return Ok(());
            }
            let need = self.n - self.chosen.len();
            for i in next..=self.b.saturating_sub(need) {
                for (s, x) in sum.iter_mut().zip(&self.rows[i]) {
                    *s += x;
                }
                let feasible = !self.nonneg || sum.iter().zip(self.target).all(|(a, t)| a <= t);
                if feasible {
                    self.chosen.push(i);
                    self.run(i + 1, sum)?;
                    self.chosen.pop();
                }
                for (s, x) in sum.iter_mut().zip(&self.rows[i]) {
                    *s -= x;
                }
            }
            Ok(())
        }
    }

    let mut dfs = Dfs {
        rows: &rows,
        target: &target,
        n,
        b,
        nonneg,
        count: Int::zero(),
        chosen: Vec::new(),
        out: collect.then(Vec::new),
        visited: 0,
        cap: bound,
    };
    let mut sum = vec![Int::zero(); fm.dim_v()];
    dfs.run(0, &mut sum)?;
    Ok(EnumerationResult {
        count: dfs.count,
        structures: dfs.out,
    })
}

fn binomial(n: u64, k: u64) -> Rat {
    let k = k.min(n.saturating_sub(k));
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= Rat::new(int((n - i) as i64), int((i + 1) as i64));
    }
    acc
}

/// Exact span test: π is a symmetry iff every permuted column stays in the
/// column span, i.e. rank([φ | Pφ]) = |A|.
pub fn check_symmetry(fm: &FeatureMap, pi: &[usize]) -> Result<bool> {
    let b = fm.ground_size();
    if pi.len() != b {
        return Err(Error::Dimension(format!(
            "permutation length {} vs ground size {b}",
            pi.len()
        )));
    }
    let mut seen = vec![false; b];
    for &x in pi {
        if x >= b || seen[x] {
            return Err(Error::InvalidParams("not a permutation of the ground set".into()));
        }
        seen[x] = true;
    }
    let a = fm.dim_v();
    let mut aug = ExactMatrix::zeros(b, 2 * a);
    for i in 0..b {
        for j in 0..a {
            aug[(i, j)] = fm.matrix[(i, j)].clone();
            // permuted column: (f ∘ π)(i) = f(π(i))
            aug[(i, a + j)] = fm.matrix[(pi[i], j)].clone();
        }
    }
    Ok(aug.rank() == a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    LInf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSpace {
    ColumnSpan,
    Perp,
}

pub fn l1_norm(v: &[Int]) -> Int {
    v.iter().map(|x| x.abs()).fold(Int::zero(), |a, b| a + b)
}

pub fn linf_norm(v: &[Int]) -> Int {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Int::zero)
}

/// True iff all vectors obey the norm bound and span the requested space.
pub fn verify_bounded_basis(
    fm: &FeatureMap,
    vectors: &[Vec<Int>],
    c: &Int,
    norm: Norm,
    target: TargetSpace,
) -> Result<bool> {
    let b = fm.ground_size();
    for v in vectors {
        if v.len() != b {
            return Err(Error::Dimension(format!(
                "vector length {} vs ground size {b}",
                v.len()
            )));
        }
        let nv = match norm {
            Norm::L1 => l1_norm(v),
            Norm::LInf => linf_norm(v),
        };
        if &nv > c {
            return Ok(false);
        }
    }
    let expected = match target {
        TargetSpace::ColumnSpan => fm.dim_v(),
        TargetSpace::Perp => b - fm.dim_v(),
    };
    if vectors.is_empty() {
        return Ok(expected == 0);
    }
    match target {
        TargetSpace::ColumnSpan => {
            // each vector inside the span, and jointly of full span rank
            let a = fm.dim_v();
            let vmat = ExactMatrix::from_int_rows(vectors.to_vec()).transpose();
            let mut aug = ExactMatrix::zeros(b, a + vectors.len());
            for i in 0..b {
                for j in 0..a {
                    aug[(i, j)] = fm.matrix[(i, j)].clone();
                }
                for j in 0..vectors.len() {
                    aug[(i, a + j)] = vmat[(i, j)].clone();
                }
            }
            let inside = aug.rank() == a;
            let spans = ExactMatrix::from_int_rows(vectors.to_vec()).rank() == expected;
            Ok(inside && spans)
        }
        TargetSpace::Perp => {
            for v in vectors {
                for j in 0..fm.dim_v() {
                    let mut s = Int::zero();
                    for i in 0..b {
                        s += &v[i] * &fm.matrix[(i, j)].to_integer();
                    }
                    if !s.is_zero() {
                        return Ok(false);
                    }
                }
            }
            Ok(ExactMatrix::from_int_rows(vectors.to_vec()).rank() == expected)
        }
    }
}

/// Local-decodability witness: φ(γᵃ) = m·eᵃ with ‖γᵃ‖₁ ≤ c₄ for every a.
#[derive(Debug, Clone)]
pub struct DecodingCertificate {
    pub m: Int,
    pub gammas: Vec<Vec<Int>>,
    pub c4: Int,
}

impl DecodingCertificate {
    pub fn validate(&self, fm: &FeatureMap) -> Result<()> {
        let a = fm.dim_v();
        let b = fm.ground_size();
        if self.gammas.len() != a {
            return Err(Error::Dimension(format!(
                "{} decoding vectors for {a} columns",
                self.gammas.len()
            )));
        }
        for (col, gamma) in self.gammas.iter().enumerate() {
            if gamma.len() != b {
                return Err(Error::Dimension(format!(
                    "decoding vector length {} vs ground size {b}",
                    gamma.len()
                )));
            }
            if l1_norm(gamma) > self.c4 {
                return Err(Error::BadCertificate { column: col });
            }
            for j in 0..a {
                let mut s = Int::zero();
                for i in 0..b {
                    s += &gamma[i] * &fm.matrix[(i, j)].to_integer();
                }
                let expect = if j == col { self.m.clone() } else { Int::zero() };
                if s != expect {
                    return Err(Error::BadCertificate { column: col });
                }
            }
        }
        Ok(())
    }
}

/// δᵇ := m·uᵇ − Σ_a φ(b)_a γᵃ, one vector per ground element; they span the
/// orthogonal complement of the column space with ‖δᵇ‖₁ ≤ 2c₂c₄|A|.
pub fn perp_basis_from_decoding(
    fm: &FeatureMap,
    cert: &DecodingCertificate,
) -> Result<Vec<Vec<Int>>> {
    cert.validate(fm)?;
    let b = fm.ground_size();
    let a = fm.dim_v();
    let mut out = Vec::with_capacity(b);
    for bi in 0..b {
        let mut delta = vec![Int::zero(); b];
        delta[bi] = cert.m.clone();
        for (col, gamma) in cert.gammas.iter().enumerate().take(a) {
            let coeff = fm.matrix[(bi, col)].to_integer();
            if coeff.is_zero() {
                continue;
            }
            for (d, g) in delta.iter_mut().zip(gamma) {
                *d -= &coeff * g;
            }
        }
        out.push(delta);
    }
    Ok(out)
}

/// Parametric size threshold ⌈C·c₂·c₃²·dimV⁶·ln(2c₃·dimV)⁶⌉.
pub fn existence_threshold(c1: u64, c2: u64, c3: u64, dim_v: u64, big_c: f64) -> u64 {
    let _ = c1; // the multiple-of-c1 requirement is reported separately
    let log = (2.0 * c3 as f64 * dim_v as f64).ln();
    let val = big_c * c2 as f64 * (c3 as f64).powi(2) * (dim_v as f64).powi(6) * log.powi(6);
    val.ceil().max(0.0) as u64
}

/// Exact squared length of the orthogonal projection of γ − p·1 onto the
/// column space: wᵗφ(φᵗφ)⁻¹φᵗw.
pub fn projection_norm_sq(fm: &FeatureMap, gamma: &[Rat], p: &Rat) -> Result<Rat> {
    let b = fm.ground_size();
    if gamma.len() != b {
        return Err(Error::Dimension(format!(
            "gamma length {} vs ground size {b}",
            gamma.len()
        )));
    }
    let w: Vec<Rat> = gamma.iter().map(|g| g - p).collect();
    let a = fm.dim_v();
    // x = φᵗ w
    let x: Vec<Rat> = (0..a)
        .map(|j| {
            (0..b)
                .map(|i| &fm.matrix[(i, j)] * &w[i])
                .fold(Rat::zero(), |acc, v| acc + v)
        })
        .collect();
    let gram = fm.matrix.gram();
    let y = solve_spd(&gram, &x)?;
    Ok(x.iter().zip(&y).map(|(a, b)| a * b).fold(Rat::zero(), |acc, v| acc + v))
}

/// Structured report of the five conditions of the existence theorem for a
/// built-in family.
#[derive(Debug, Clone)]
pub struct ConditionsReport {
    pub c1: Int,
    pub c2: Int,
    pub c3: Int,
    pub c3_verified: bool,
    pub symmetry_generators_ok: bool,
    pub transitive_by_construction: bool,
    pub constants_in_span: bool,
    pub dim_v: usize,
    pub threshold: Option<u64>,
}

/// Exact test that the all-ones vector over B lies in the column span.
pub fn constants_in_span(fm: &FeatureMap) -> bool {
    let b = fm.ground_size();
    let a = fm.dim_v();
    let mut aug = ExactMatrix::zeros(b, a + 1);
    for i in 0..b {
        for j in 0..a {
            aug[(i, j)] = fm.matrix[(i, j)].clone();
        }
        aug[(i, a)] = Rat::one();
    }
    aug.rank() == a
}

/// lcm of binomial coefficients C(t,s), 0 ≤ s ≤ t.
pub fn lcm_binomials(t: u32) -> Int {
    let mut acc = Int::one();
    let mut binom = Int::one();
    for s in 0..=t {
        if s > 0 {
            binom = &binom * int((t - s + 1) as i64) / int(s as i64);
        }
        acc = acc.lcm(&binom);
    }
    acc
}

pub fn binomial_int(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int((i + 1) as i64);
    }
    acc
}

/// C(n,k) with the convention C(n,-1) = 0, used by the design formulas.
pub fn binomial_signed(n: i64, k: i64) -> Int {
    if k < 0 || n < 0 || k > n {
        return Int::zero();
    }
    binomial_int(n as u64, k as u64)
}

pub fn factorial(n: u64) -> Int {
    (1..=n).fold(Int::one(), |acc, i| acc * int(i as i64))
}

/// Exact count result alongside the log-space main term and parametric error bound.
#[derive(Debug, Clone)]
pub struct CountResult {
    pub log10_main: Option<f64>,
    pub main: Option<f64>,
    pub delta_bound: Option<f64>,
    pub exact: Option<Int>,
    pub note: Option<String>,
}

impl CountResult {
    pub fn exact_only(v: Int, note: impl Into<String>) -> Self {
        CountResult {
            log10_main: None,
            main: None,
            delta_bound: None,
            exact: Some(v),
            note: Some(note.into()),
        }
    }
}

/// Shared main-term evaluation: ln(main) = ln(ρ) − (dim/2)·ln(2πp(1−p))
/// − N·ln p − (|B|−N)·ln(1−p), with ln(ρ) = ln(ρ²)/2 supplied exactly.
pub fn generic_main_term_log(
    rho_sq: &Rat,
    dim_v: usize,
    ground: u64,
    n: u64,
    ctx: &mut crate::hp::HpCtx,
) -> astro_float::BigFloat {
    assert!(n > 0 && n < ground);
    let p = Rat::new(int(n as i64), int(ground as i64));
    let q = Rat::one() - &p;
    let ln_rho = {
        let l = ctx.ln_rat(rho_sq);
        let half = ctx.from_rat(&Rat::new(int(1), int(2)));
        ctx.mul(&l, &half)
    };
    let two_pi_pq = {
        let pi = ctx.pi();
        let two = ctx.from_rat(&Rat::from_integer(int(2)));
        let pq = ctx.from_rat(&(&p * &q));
        ctx.mul(&ctx.mul(&two, &pi), &pq)
    };
    let ln_2pipq = ctx.ln(&two_pi_pq);
    let half_dim = ctx.from_rat(&Rat::new(int(dim_v as i64), int(2)));
    let ln_p = ctx.ln_rat(&p);
    let ln_q = ctx.ln_rat(&q);
    let nf = ctx.from_rat(&Rat::from_integer(int(n as i64)));
    let mf = ctx.from_rat(&Rat::from_integer(int((ground - n) as i64)));
    let mut acc = ln_rho;
    acc = ctx.sub(&acc, &ctx.mul(&half_dim, &ln_2pipq));
    acc = ctx.sub(&acc, &ctx.mul(&nf, &ln_p));
    acc = ctx.sub(&acc, &ctx.mul(&mf, &ln_q));
    acc
}

/// Packages a log-space main term into a CountResult.
pub fn count_result_from_log(
    ln_main: &astro_float::BigFloat,
    delta_bound: Option<f64>,
    exact: Option<Int>,
    note: Option<String>,
    ctx: &mut crate::hp::HpCtx,
) -> CountResult {
    let ln10 = ctx.ln_rat(&Rat::from_integer(int(10)));
    let log10 = ctx.to_f64(&ctx.div(ln_main, &ln10));
    let main = {
        let m = ctx.exp(ln_main);
        let v = ctx.to_f64(&m);
        v.is_finite().then_some(v)
    };
    CountResult {
        log10_main: Some(log10),
        main,
        delta_bound,
        exact,
        note,
    }
}
