//! Exact non-reachability probabilities on complete graphs.
//!
//! On `K_n` with a fixed sink `s`, `f(n, k)` is the probability that none of
//! `k` given vertices reaches `s`, and `g(n, k)` additionally requires that
//! `s` does not reach a further fixed vertex `b`. Both satisfy recursions
//! over `i`, the number of vertices reachable in one step from the `k`-set:
//!
//! ```text
//! f(n, k) = sum_{i=0}^{n-k-1} C(n-k-1, i) (2^k - 1)^i / 2^{k(n-k)} f(n-k, i)
//! g(n, k) = sum_{i=0}^{n-k-2} C(n-k-2, i) (2^k - 1)^i / 2^{k(n-k)} g(n-k, i)
//! ```
//!
//! with `f(n, 0) = 1` and `g(n, 0) = f(n, 1)`. `P(a -/-> s) = f(n, 1)` and
//! `P(a -/-> s, s -/-> b) = g(n, 1)`.
//!
//! The second half of the module evaluates the envelope bounds on those two
//! probabilities and the auxiliary sums `a(n)`, `b(n)` in exact rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dyadic::{binomial, format_decimal, ratio, rational_pow, DyadicProb, Sign};

/// Largest `n` accepted by [`table_row`].
pub const TABLE_MAX_N: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnError {
    #[error("f({n}, {k}) is undefined: need n >= k + 1 >= 1")]
    FOutOfRange { n: usize, k: usize },
    #[error("g({n}, {k}) is undefined: need n >= k + 2 >= 2")]
    GOutOfRange { n: usize, k: usize },
    #[error("n = {n} outside {min}..={max}")]
    NOutOfRange { n: usize, min: usize, max: usize },
}

/// Memo table holding every `f(n, k)` and `g(n, k)` for `n <= n_max`.
///
/// Built bottom-up in increasing `n`; read-only afterwards.
#[derive(Debug, Clone)]
pub struct FGTable {
    /// `f[n][k]` for `0 <= k < n`; `f[0]` is empty.
    f: Vec<Vec<DyadicProb>>,
    /// `g[n][k]` for `0 <= k <= n - 2`; `g[0]`, `g[1]` are empty.
    g: Vec<Vec<DyadicProb>>,
}

/// `sum_i C(top, i) (2^k - 1)^i / 2^{k(n-k)} * prev[i]` for `i in 0..=top`.
fn recursion_sum(n: usize, k: usize, top: usize, prev: &[DyadicProb]) -> DyadicProb {
    let max_exp = prev[..=top].iter().map(DyadicProb::exp).max().unwrap_or(0);
    let base = (BigUint::one() << k) - 1u32;
    let mut power = BigUint::one();
    let mut acc = BigUint::zero();
    for (i, p) in prev[..=top].iter().enumerate() {
        acc += binomial(top as u64, i as u64) * &power * p.num_over(max_exp);
        power *= &base;
    }
    DyadicProb::normalized(acc, max_exp + (k * (n - k)) as u32)
}

impl FGTable {
    pub fn up_to(n_max: usize) -> Self {
        let n_max = n_max.max(2);
        let mut f: Vec<Vec<DyadicProb>> = vec![Vec::new(); n_max + 1];
        let mut g: Vec<Vec<DyadicProb>> = vec![Vec::new(); n_max + 1];
        for n in 1..=n_max {
            let mut row = vec![DyadicProb::one()];
            for k in 1..n {
                let v = recursion_sum(n, k, n - k - 1, &f[n - k]);
                row.push(v);
            }
            f[n] = row;
            if n >= 2 {
                let mut row = vec![f[n][1].clone()];
                for k in 1..=n - 2 {
                    let v = recursion_sum(n, k, n - k - 2, &g[n - k]);
                    row.push(v);
                }
                g[n] = row;
            }
        }
        FGTable { f, g }
    }

    pub fn n_max(&self) -> usize {
        self.f.len() - 1
    }

    pub fn f(&self, n: usize, k: usize) -> Result<&DyadicProb, KnError> {
        self.f
            .get(n)
            .and_then(|row| row.get(k))
            .ok_or(KnError::FOutOfRange { n, k })
    }

    pub fn g(&self, n: usize, k: usize) -> Result<&DyadicProb, KnError> {
        self.g
            .get(n)
            .and_then(|row| row.get(k))
            .ok_or(KnError::GOutOfRange { n, k })
    }
}

/// `f(n, k)`: probability on `K_n` that no vertex of a fixed `k`-set reaches `s`.
pub fn f(n: usize, k: usize) -> Result<DyadicProb, KnError> {
    if n == 0 || k >= n {
        return Err(KnError::FOutOfRange { n, k });
    }
    FGTable::up_to(n).f(n, k).cloned()
}

/// `g(n, k)`: as `f(n, k)` with the extra requirement `s -/-> b`.
pub fn g(n: usize, k: usize) -> Result<DyadicProb, KnError> {
    if n < 2 || k + 2 > n {
        return Err(KnError::GOutOfRange { n, k });
    }
    FGTable::up_to(n).g(n, k).cloned()
}

/// One row of the complete-graph table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnRow {
    pub n: usize,
    /// `P(A) = f(n, 1)`.
    pub p_a: DyadicProb,
    /// `P(A ∩ B) = g(n, 1)`, absent for `n = 2`.
    pub p_ab: Option<DyadicProb>,
    /// `P(A) 2^{C(n,2)}`.
    pub scaled_a: BigUint,
    pub scaled_ab: Option<BigUint>,
    /// `(P(A ∩ B) - P(A)^2) / P(A ∩ B)`.
    pub rel_cov: Option<BigRational>,
}

impl KnRow {
    fn from_table(table: &FGTable, n: usize) -> Self {
        let e = (n * (n - 1) / 2) as u32;
        let p_a = table.f(n, 1).expect("n >= 2").clone();
        let p_ab = (n >= 3).then(|| table.g(n, 1).expect("n >= 3").clone());
        let scaled = |p: &DyadicProb| p.scaled_by_pow2(e).expect("K_n probabilities have exponent <= C(n,2)");
        let rel_cov = p_ab.as_ref().map(|pab| {
            let joint = pab.to_rational();
            (joint.clone() - p_a.mul(&p_a).to_rational()) / joint
        });
        KnRow {
            n,
            scaled_a: scaled(&p_a),
            scaled_ab: p_ab.as_ref().map(scaled),
            p_a,
            p_ab,
            rel_cov,
        }
    }

    /// Sign of `g(n,1) - f(n,1)^2`, the covariance of `A` and `B`.
    pub fn covariance_sign(&self) -> Option<Sign> {
        self.p_ab.as_ref().map(|pab| pab.minus(&self.p_a.mul(&self.p_a)).sign())
    }
}

pub fn table_row(n: usize) -> Result<KnRow, KnError> {
    if !(2..=TABLE_MAX_N).contains(&n) {
        return Err(KnError::NOutOfRange { n, min: 2, max: TABLE_MAX_N });
    }
    Ok(KnRow::from_table(&FGTable::up_to(n), n))
}

/// Rows `2..=n_max` from one shared memo table.
pub fn table_rows(n_max: usize) -> Result<Vec<KnRow>, KnError> {
    if !(2..=TABLE_MAX_N).contains(&n_max) {
        return Err(KnError::NOutOfRange { n: n_max, min: 2, max: TABLE_MAX_N });
    }
    let table = FGTable::up_to(n_max);
    Ok((2..=n_max).map(|n| KnRow::from_table(&table, n)).collect())
}

/// Plain-text table in the column order
/// `n | P(A)·2^C(n,2) | P(A) | P(A∩B)·2^C(n,2) | P(A∩B) | relative covariance`.
///
/// Probabilities are printed to 4 and 7 decimals, the relative covariance to
/// 6, all rounded half to even.
pub fn render_table(rows: &[KnRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                r.scaled_a.to_string(),
                format_decimal(&r.p_a.to_rational(), 4),
                r.scaled_ab.as_ref().map(ToString::to_string).unwrap_or_default(),
                r.p_ab.as_ref().map(|p| format_decimal(&p.to_rational(), 7)).unwrap_or_default(),
                r.rel_cov.as_ref().map(|x| format_decimal(x, 6)).unwrap_or_default(),
            ]
        })
        .collect();
    let header = ["n", "P(A)*2^C(n,2)", "P(A)", "P(A&B)*2^C(n,2)", "P(A&B)", "rel_cov"];
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cols: [&str; 6]| {
        let parts: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{c:>w$}")).collect();
        parts.join(" | ").trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&(rule.join("-|-") + "\n"));
    for row in &cells {
        out.push_str(&line(row.each_ref().map(String::as_str)));
    }
    out
}

/// Sign of the covariance of `{a -/-> s}` and `{s -/-> b}` on `K_n`, which is
/// also the sign for `{a -> s}` and `{s -> b}`.
pub fn covariance_sign_kn(n: usize) -> Result<Sign, KnError> {
    if n < 3 {
        return Err(KnError::NOutOfRange { n, min: 3, max: usize::MAX });
    }
    let table = FGTable::up_to(n);
    let fa = table.f(n, 1)?;
    Ok(table.g(n, 1)?.minus(&fa.mul(fa)).sign())
}

/// Accumulates `sum coef * 2^{-e}` exactly over a fixed ceiling exponent.
struct DyadicSum {
    ceiling: u32,
    acc: BigUint,
}

impl DyadicSum {
    fn new(ceiling: usize) -> Self {
        DyadicSum { ceiling: ceiling as u32, acc: BigUint::zero() }
    }

    fn add(&mut self, coef: BigUint, e: usize) {
        self.acc += coef << (self.ceiling - e as u32);
    }

    fn finish(self) -> BigRational {
        BigRational::new(BigInt::from(self.acc), BigInt::one() << self.ceiling)
    }
}

/// `a(n) = sum_{k=1}^{n-1} C(n,k) sum_{m=1}^{n-k} C(n-k,m) 2^{-km}`.
pub fn a_sum(n: usize) -> BigRational {
    let mut sum = DyadicSum::new(n * n);
    for k in 1..n {
        let outer = binomial(n as u64, k as u64);
        for m in 1..=n - k {
            sum.add(&outer * binomial((n - k) as u64, m as u64), k * m);
        }
    }
    sum.finish()
}

/// `b(n) = sum_{k=1}^{n-1} C(n,k) sum_{i=1}^{n-1-k} C(n-k,i) 2^{-ki}
///         sum_{m=1}^{k} C(k,m) 2^{-m(n-k-i)}`.
pub fn b_sum(n: usize) -> BigRational {
    let mut sum = DyadicSum::new(2 * n * n);
    for k in 1..n {
        let ck = binomial(n as u64, k as u64);
        for i in 1..n.saturating_sub(k) {
            let ci = &ck * binomial((n - k) as u64, i as u64);
            for m in 1..=k {
                sum.add(&ci * binomial(k as u64, m as u64), k * i + m * (n - k - i));
            }
        }
    }
    sum.finish()
}

fn half_pow(e: i64) -> BigRational {
    rational_pow(&ratio(1, 2), e)
}

/// Lower and upper envelope for `P(A) = f(n, 1)`, `n >= 2`.
pub fn p_a_envelope(n: usize) -> (BigRational, BigRational) {
    let n = n as i64;
    let scale = half_pow(n - 2);
    let lo = &scale * (BigRational::one() - half_pow(n - 1));
    let hi = &scale * (BigRational::one() + ratio(16, 5) * rational_pow(&ratio(7, 8), n - 1));
    (lo, hi)
}

/// Lower and upper envelope for `P(A ∩ B) = g(n, 1)`, `n >= 3`.
pub fn p_ab_envelope(n: usize) -> (BigRational, BigRational) {
    let n = n as i64;
    let scale = half_pow(2 * n - 3);
    let three = ratio(3, 1);
    let lo = &scale * (&three - ratio(2, 1) * half_pow(n - 3));
    let hi = &scale * (&three + ratio(104, 5) * rational_pow(&ratio(7, 8), n - 3));
    (lo, hi)
}

/// `c(n) = (1/2)^{n-5} + 6.4 (7/8)^{n-1} + 10.24 (49/64)^{n-1}`.
pub fn c_term(n: usize) -> BigRational {
    let n = n as i64;
    half_pow(n - 5)
        + ratio(32, 5) * rational_pow(&ratio(7, 8), n - 1)
        + ratio(256, 25) * rational_pow(&ratio(49, 64), n - 1)
}

/// Outcome of every envelope check at one `n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundRecord {
    pub n: usize,
    pub p_a_lower: bool,
    pub p_a_upper: bool,
    /// `None` for `n = 2`, where `P(A ∩ B)` is not defined.
    pub p_ab_lower: Option<bool>,
    pub p_ab_upper: Option<bool>,
    /// `a(n) <= 5.6 (7/4)^n`.
    pub a_bound: bool,
    /// `a(n) <= 13.6 (13/8)^n`.
    pub a_bound_sharp: bool,
    /// `b(n) <= 4 (7/4)^n`.
    pub b_bound: bool,
    /// `c(n + 1) < c(n)`.
    pub c_decreasing: bool,
    /// `2^{n-2} P(A)` as a float rendering.
    pub scaled_p_a: f64,
    /// `2^{2n-3} P(A ∩ B)` as a float rendering.
    pub scaled_p_ab: Option<f64>,
}

impl BoundRecord {
    pub fn all_hold(&self) -> bool {
        self.p_a_lower
            && self.p_a_upper
            && self.p_ab_lower.unwrap_or(true)
            && self.p_ab_upper.unwrap_or(true)
            && self.a_bound
            && self.a_bound_sharp
            && self.b_bound
            && self.c_decreasing
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundReport {
    pub records: Vec<BoundRecord>,
    /// `c(8) < 5`.
    pub c8_below_5: bool,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.c8_below_5 && self.records.iter().all(BoundRecord::all_hold)
    }
}

/// Evaluates every envelope and auxiliary bound for `n = 2..=n_max`.
pub fn bound_report(n_max: usize) -> Result<BoundReport, KnError> {
    if n_max < 3 {
        return Err(KnError::NOutOfRange { n: n_max, min: 3, max: usize::MAX });
    }
    let table = FGTable::up_to(n_max);
    let seven_quarters = ratio(7, 4);
    let records = (2..=n_max)
        .map(|n| {
            let ni = n as i64;
            let fa = table.f(n, 1).expect("n >= 2").to_rational();
            let (lo, hi) = p_a_envelope(n);
            let gab = (n >= 3).then(|| table.g(n, 1).expect("n >= 3").to_rational());
            let ab_env = gab.as_ref().map(|gab| {
                let (lo, hi) = p_ab_envelope(n);
                (lo <= *gab, *gab <= hi)
            });
            let a = a_sum(n);
            let b = b_sum(n);
            let to_f64 = |x: BigRational| num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN);
            BoundRecord {
                n,
                p_a_lower: lo <= fa,
                p_a_upper: fa <= hi,
                p_ab_lower: ab_env.map(|e| e.0),
                p_ab_upper: ab_env.map(|e| e.1),
                a_bound: a <= ratio(28, 5) * rational_pow(&seven_quarters, ni),
                a_bound_sharp: a <= ratio(68, 5) * rational_pow(&ratio(13, 8), ni),
                b_bound: b <= ratio(4, 1) * rational_pow(&seven_quarters, ni),
                c_decreasing: c_term(n + 1) < c_term(n),
                scaled_p_a: to_f64(&fa * rational_pow(&ratio(2, 1), ni - 2)),
                scaled_p_ab: gab.map(|gab| to_f64(gab * rational_pow(&ratio(2, 1), 2 * ni - 3))),
            }
        })
        .collect();
    Ok(BoundReport { records, c8_below_5: c_term(8) < ratio(5, 1) })
}

/// One text line per `n` with `ok`/`FAIL` per check.
pub fn render_bounds(report: &BoundReport) -> String {
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    let opt = |b: Option<bool>| b.map_or("-", mark);
    let mut out = String::from("n\tP(A)lo\tP(A)hi\tP(AB)lo\tP(AB)hi\ta(n)\ta(n)'\tb(n)\tc(n)dec\t2^(n-2)P(A)\t2^(2n-3)P(AB)\n");
    for r in &report.records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\n",
            r.n,
            mark(r.p_a_lower),
            mark(r.p_a_upper),
            opt(r.p_ab_lower),
            opt(r.p_ab_upper),
            mark(r.a_bound),
            mark(r.a_bound_sharp),
            mark(r.b_bound),
            mark(r.c_decreasing),
            r.scaled_p_a,
            r.scaled_p_ab.map_or("-".to_string(), |x| format!("{x:.6}")),
        ));
    }
    out.push_str(&format!("c(8) < 5: {}\nall checks hold: {}\n", mark(report.c8_below_5), report.all_hold()));
    out
}
