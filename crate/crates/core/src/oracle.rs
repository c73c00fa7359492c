//! Independent checks of the closed-form energies.
//!
//! * A brute-force evaluation of the exponentially regularized mode sum
//!   `(π/2) Σ r e^{-a r}`, r = |n|, over the positive (Dirichlet) or
//!   non-negative (Neumann) lattice, followed by a least-squares fit in
//!   powers of the cutoff `a` whose `a^0` coefficient is the Casimir energy.
//! * The exact-rational identity behind Neumann negativity: the inner
//!   k-sum equals a derivative of 1 + y + ... + y^(D-1) at y = 1/2.
//!
//! Lattice points are grouped into shells of equal |n|², so each cutoff
//! costs one pass over the distinct squared radii instead of the full
//! D-dimensional enumeration.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{factorial, falling_factorial, pi_digits, ExactRational, PrecisionContext, Real};
use crate::energy::BoundaryCondition;
use crate::error::{Error, Result};
use crate::specfun::binomial;

/// Smallest accepted truncation threshold `a·r`.
pub const MIN_THRESHOLD: f64 = 40.0;
/// Largest dimension the brute-force sum accepts.
pub const MAX_SUM_DIMENSION: u32 = 4;
/// Largest dimension `extract_constant` accepts.
pub const MAX_FIT_DIMENSION: u32 = 3;
/// Shell sets up to this size are summed at working precision.
pub const EXACT_SHELL_LIMIT: usize = 4096;
const MAX_NORM_SQ: u64 = 50_000_000;

/// Cutoff values `a` (strictly decreasing) and the truncation threshold `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffGrid {
    values: Vec<Real>,
    truncation_threshold: Real,
}

impl CutoffGrid {
    pub fn new(values: Vec<Real>, truncation_threshold: Real) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("cutoff grid is empty"));
        }
        if values.iter().any(|a| !a.is_positive()) {
            return Err(Error::invalid("cutoff values must be positive"));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("cutoff values must be strictly decreasing"));
        }
        if truncation_threshold.to_f64() < MIN_THRESHOLD {
            return Err(Error::invalid(format!(
                "truncation threshold must be at least {MIN_THRESHOLD}"
            )));
        }
        Ok(CutoffGrid {
            values,
            truncation_threshold,
        })
    }

    /// `points` values start, start·ratio, start·ratio², ...
    pub fn geometric(start: f64, ratio: f64, points: usize, threshold: f64, digits: u32) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid("grid ratio must lie in (0, 1)"));
        }
        let start = Real::from_f64(start, digits)?;
        let ratio = Real::from_f64(ratio, digits)?;
        let mut values = Vec::with_capacity(points);
        let mut a = start;
        for _ in 0..points {
            values.push(a.clone());
            a = a.mul_with(&ratio, digits);
        }
        Self::new(values, Real::from_f64(threshold, digits)?)
    }

    /// a = 0.4 · 0.8^i for i < 12, T = 45.
    pub fn default_grid(digits: u32) -> Self {
        Self::geometric(0.4, 0.8, 12, 45.0, digits).expect("default grid is valid")
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn truncation_threshold(&self) -> &Real {
        &self.truncation_threshold
    }

    fn largest(&self) -> &Real {
        &self.values[0]
    }

    fn smallest(&self) -> &Real {
        self.values.last().unwrap()
    }
}

/// Number of lattice points with each squared radius, `counts[m] = #{n : |n|² = m}`.
#[derive(Debug, Clone)]
pub struct ShellCounts {
    dimension: u32,
    bc: BoundaryCondition,
    counts: Vec<u64>,
}

impl ShellCounts {
    pub fn build(dimension: u32, bc: BoundaryCondition, max_norm_sq: u64) -> Result<Self> {
        if dimension == 0 || dimension > MAX_SUM_DIMENSION {
            return Err(Error::invalid(format!(
                "brute-force sum supports 1 <= D <= {MAX_SUM_DIMENSION}, got {dimension}"
            )));
        }
        if max_norm_sq > MAX_NORM_SQ {
            return Err(Error::invalid(format!(
                "cutoff too small: lattice radius² {max_norm_sq} exceeds {MAX_NORM_SQ}"
            )));
        }
        let m_max = max_norm_sq as usize;
        let first = match bc {
            BoundaryCondition::Dirichlet => 1usize,
            BoundaryCondition::Neumann => 0,
        };
        let squares: Vec<usize> = (first..).map(|n| n * n).take_while(|&s| s <= m_max).collect();
        let mut counts = vec![0u64; m_max + 1];
        for &s in &squares {
            counts[s] = 1;
        }
        for _ in 1..dimension {
            // Each output shell is independent, so the parallel gather is exact
            // and order-free.
            let prev = &counts;
            let next: Vec<u64> = (0..m_max + 1)
                .into_par_iter()
                .with_min_len(4096)
                .map(|m| squares.iter().take_while(|&&s| s <= m).map(|&s| prev[m - s]).sum())
                .collect();
            counts = next;
        }
        Ok(ShellCounts { dimension, bc, counts })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn max_norm_sq(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    pub fn count(&self, norm_sq: u64) -> u64 {
        self.counts.get(norm_sq as usize).copied().unwrap_or(0)
    }
}

fn shell_cache() -> &'static Mutex<HashMap<(u32, BoundaryCondition), Arc<ShellCounts>>> {
    type Table = Mutex<HashMap<(u32, BoundaryCondition), Arc<ShellCounts>>>;
    static CACHE: OnceLock<Table> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn shell_counts(dimension: u32, bc: BoundaryCondition, max_norm_sq: u64) -> Result<Arc<ShellCounts>> {
    let key = (dimension, bc);
    if let Some(c) = shell_cache().lock().unwrap().get(&key) {
        if c.max_norm_sq() >= max_norm_sq {
            return Ok(Arc::clone(c));
        }
    }
    let built = Arc::new(ShellCounts::build(dimension, bc, max_norm_sq)?);
    shell_cache().lock().unwrap().insert(key, Arc::clone(&built));
    Ok(built)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumKernel {
    /// Every shell evaluated and accumulated at working precision.
    WorkingPrecision,
    /// Shells evaluated in binary64 with compensated accumulation
    /// (about 15 significant digits).
    Binary64,
}

/// A truncated regularized mode sum with its truncation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedSum {
    pub value: Real,
    /// Estimated |dropped tail| / |value|.
    pub relative_tail_bound: f64,
    pub shells: usize,
    pub kernel: SumKernel,
}

fn max_norm_for(a: f64, threshold: f64) -> u64 {
    let r = threshold / a;
    (r * r).floor() as u64
}

/// Continuum estimate of Σ_{r > R} r e^{-a r} over the lattice: the shell
/// density of the positive orthant is S_{D-1} r^{D-1} / 2^D, doubled to
/// cover the boundary planes of the Neumann lattice.
fn tail_estimate(dimension: u32, a: f64, radius: f64) -> f64 {
    let d = dimension as f64;
    let half = d / 2.0;
    // Γ(D/2) for D <= 4
    let gamma_half = match dimension {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        3 => std::f64::consts::PI.sqrt() / 2.0,
        _ => 1.0,
    };
    let sphere = 2.0 * std::f64::consts::PI.powf(half) / gamma_half;
    let density = 2.0 * sphere / 2f64.powi(dimension as i32);
    // ∫_R^∞ r^D e^{-a r} dr = e^{-aR} Σ_j D!/(D-j)! R^(D-j) / a^(j+1)
    let mut integral = 0.0;
    let mut falling = 1.0;
    for j in 0..=dimension {
        if j > 0 {
            falling *= (dimension - j + 1) as f64;
        }
        integral += falling * radius.powi((dimension - j) as i32) / a.powi(j as i32 + 1);
    }
    density * integral * (-a * radius).exp() * std::f64::consts::FRAC_PI_2
}

fn sum_shells(counts: &ShellCounts, a: &Real, threshold: &Real, ctx: &PrecisionContext) -> Result<RegularizedSum> {
    let digits = ctx.working_digits();
    let a_f = a.to_f64();
    let t_f = threshold.to_f64();
    let m_max = max_norm_for(a_f, t_f);
    if m_max > counts.max_norm_sq() {
        return Err(Error::Numerical(
            "shell table smaller than the truncation radius".into(),
        ));
    }
    let shells: Vec<(u64, u64)> = (1..=m_max)
        .filter_map(|m| {
            let c = counts.count(m);
            (c > 0).then_some((m, c))
        })
        .collect();
    let n_shells = shells.len();
    let (value, kernel) = if n_shells <= EXACT_SHELL_LIMIT {
        let work = digits + 5;
        let a_w = a.with_digits(work);
        let mut sum = Real::zero(work);
        for &(m, c) in shells.iter().rev() {
            let r = Real::from_int(m as i64, work).sqrt()?;
            let weight = (-a_w.mul_with(&r, work)).exp()?;
            let term = Real::from_int(c as i64, work)
                .mul_with(&r, work)
                .mul_with(&weight, work);
            sum = sum.add_with(&term, work);
        }
        let half_pi = pi_digits(work).div_with(&Real::from_int(2, work), work)?;
        (sum.mul_with(&half_pi, digits), SumKernel::WorkingPrecision)
    } else {
        // Neumaier summation from the smallest shells inward.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &(m, c) in shells.iter().rev() {
            let r = (m as f64).sqrt();
            let term = c as f64 * r * (-a_f * r).exp();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        let total = (sum + comp) * std::f64::consts::FRAC_PI_2;
        (Real::from_f64(total, digits)?, SumKernel::Binary64)
    };
    let radius = ((m_max + 1) as f64).sqrt();
    let tail = tail_estimate(counts.dimension(), a_f, radius);
    let rel = if value.is_zero() {
        0.0
    } else {
        tail / value.to_f64().abs()
    };
    Ok(RegularizedSum {
        value,
        relative_tail_bound: rel,
        shells: n_shells,
        kernel,
    })
}

/// `(π/2) Σ r e^{-a r}` over the lattice, truncated where `a·r > threshold`.
pub fn regularized_sum(
    dimension: u32,
    bc: BoundaryCondition,
    a: &Real,
    threshold: &Real,
    ctx: &PrecisionContext,
) -> Result<RegularizedSum> {
    if dimension == 0 || dimension > MAX_SUM_DIMENSION {
        return Err(Error::invalid(format!(
            "brute-force sum supports 1 <= D <= {MAX_SUM_DIMENSION}, got {dimension}"
        )));
    }
    if !a.is_positive() {
        return Err(Error::invalid("cutoff a must be positive"));
    }
    if threshold.to_f64() < MIN_THRESHOLD {
        return Err(Error::invalid(format!(
            "truncation threshold must be at least {MIN_THRESHOLD}"
        )));
    }
    let m_max = max_norm_for(a.to_f64(), threshold.to_f64());
    let counts = shell_counts(dimension, bc, m_max)?;
    sum_shells(&counts, a, threshold, ctx)
}

/// Σ_{n>=1} n e^{-a n} = e^{-a} / (1 - e^{-a})².
pub fn closed_form_1d(a: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !a.is_positive() {
        return Err(Error::invalid("cutoff a must be positive"));
    }
    let digits = ctx.working_digits();
    let work = digits + 10;
    let q = (-a.with_digits(work)).exp()?;
    let one_minus = Real::one(work).add_with(&-&q, work);
    let denom = one_minus.mul_with(&one_minus, work);
    Ok(q.div_with(&denom, work)?.with_digits(digits))
}

/// Result of fitting E(a) ≈ Σ_j c_j a^j over a cutoff grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFit {
    pub dimension: u32,
    pub bc: BoundaryCondition,
    pub grid: CutoffGrid,
    pub basis_exponents: Vec<i32>,
    pub coefficients: Vec<Real>,
    /// The a⁰ coefficient, units of β.
    pub extracted_constant: Real,
    /// max_i |fit(a_i) - E(a_i)|.
    pub max_residual: Real,
    /// max_i |fit(a_i) - E(a_i)| / |E(a_i)|.
    pub max_relative_residual: f64,
    /// log10 of the 1-norm condition estimate of the scaled normal matrix.
    pub condition_log10: f64,
    pub samples: Vec<Real>,
}

/// Exponents -(D+1), ..., 2.
pub fn default_exponents(dimension: u32) -> Vec<i32> {
    (-(dimension as i32 + 1)..=2).collect()
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<Real>>, mut rhs: Vec<Real>, digits: u32) -> Result<Vec<Real>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().cmp(&m[j][col].abs())).unwrap();
        if m[pivot][col].is_zero() {
            return Err(Error::Numerical("singular normal matrix".into()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col].div_with(&m[col][col], digits)?;
            if factor.is_zero() {
                continue;
            }
            let (upper, lower) = m.split_at_mut(row);
            let pivot_row = &upper[col];
            for (target, p) in lower[0][col..].iter_mut().zip(&pivot_row[col..]) {
                *target = target.add_with(&-factor.mul_with(p, digits), digits);
            }
            rhs[row] = rhs[row].add_with(&-factor.mul_with(&rhs[col], digits), digits);
        }
    }
    let mut x = vec![Real::zero(digits); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = acc.add_with(&-m[row][k].mul_with(&x[k], digits), digits);
        }
        x[row] = acc.div_with(&m[row][row], digits)?;
    }
    Ok(x)
}

fn one_norm(m: &[Vec<Real>]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|j| m.iter().map(|row| row[j].to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Least-squares fit of `samples[i] ≈ Σ_j c_j grid[i]^exponents[j]`.
///
/// Columns are scaled by the geometric mid-point of the grid and the normal
/// equations are solved at working precision. Fails with `IllConditioned`
/// when the condition estimate leaves fewer than five working digits.
pub fn fit_constant(
    dimension: u32,
    bc: BoundaryCondition,
    grid: &CutoffGrid,
    samples: &[Real],
    exponents: &[i32],
    ctx: &PrecisionContext,
) -> Result<OracleFit> {
    let digits = ctx.working_digits();
    let work = digits + 10;
    let n = exponents.len();
    if !exponents.contains(&0) {
        return Err(Error::invalid("fit basis must contain the exponent 0"));
    }
    if samples.len() != grid.values().len() {
        return Err(Error::invalid("one sample per grid point is required"));
    }
    if samples.len() < n {
        return Err(Error::invalid(format!(
            "{} grid points cannot determine {n} coefficients",
            samples.len()
        )));
    }
    let mid = grid
        .largest()
        .with_digits(work)
        .mul_with(grid.smallest(), work)
        .sqrt()?;
    let design: Vec<Vec<Real>> = grid
        .values()
        .iter()
        .map(|a| {
            let u = a.with_digits(work).div_with(&mid, work)?;
            exponents.iter().map(|&j| u.powi(j as i64)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let y: Vec<Real> = samples.iter().map(|s| s.with_digits(work)).collect();

    let mut normal = vec![vec![Real::zero(work); n]; n];
    let mut rhs = vec![Real::zero(work); n];
    for (row, yi) in design.iter().zip(&y) {
        for j in 0..n {
            rhs[j] = rhs[j].add_with(&row[j].mul_with(yi, work), work);
            for k in 0..n {
                normal[j][k] = normal[j][k].add_with(&row[j].mul_with(&row[k], work), work);
            }
        }
    }

    // κ₁ = ‖G‖₁ ‖G⁻¹‖₁ with the inverse formed column by column.
    let mut inverse_cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Real> = (0..n)
            .map(|i| if i == j { Real::one(work) } else { Real::zero(work) })
            .collect();
        inverse_cols.push(solve(normal.clone(), e, work)?);
    }
    let inverse: Vec<Vec<Real>> = (0..n)
        .map(|i| (0..n).map(|j| inverse_cols[j][i].clone()).collect())
        .collect();
    let condition_log10 = (one_norm(&normal) * one_norm(&inverse)).log10();
    if condition_log10 > digits as f64 - 5.0 {
        return Err(Error::IllConditioned {
            condition_digits: condition_log10,
            budget: digits,
        });
    }

    let scaled = solve(normal, rhs, work)?;
    let coefficients: Vec<Real> = scaled
        .iter()
        .zip(exponents)
        .map(|(c, &j)| Ok(c.div_with(&mid.powi(j as i64)?, work)?.with_digits(digits)))
        .collect::<Result<_>>()?;

    let mut max_residual = Real::zero(digits);
    let mut max_relative: f64 = 0.0;
    for (row, yi) in design.iter().zip(&y) {
        let mut fit = Real::zero(work);
        for (u, c) in row.iter().zip(&scaled) {
            fit = fit.add_with(&u.mul_with(c, work), work);
        }
        let r = fit.add_with(&-yi, work).abs();
        if !yi.is_zero() && !r.is_zero() {
            max_relative = max_relative.max(10f64.powf(r.log10_abs() - yi.log10_abs()));
        }
        let r = r.with_digits(digits);
        if r > max_residual {
            max_residual = r;
        }
    }
    let zero_idx = exponents.iter().position(|&j| j == 0).unwrap();
    Ok(OracleFit {
        dimension,
        bc,
        grid: grid.clone(),
        basis_exponents: exponents.to_vec(),
        extracted_constant: coefficients[zero_idx].clone(),
        coefficients,
        max_residual,
        max_relative_residual: max_relative,
        condition_log10,
        samples: samples.iter().map(|s| s.with_digits(digits)).collect(),
    })
}

/// Fits the brute-force regularized sum over `grid` and returns the a⁰
/// coefficient, the oracle for the closed-form energy at D <= 3.
pub fn extract_constant(
    dimension: u32,
    bc: BoundaryCondition,
    grid: &CutoffGrid,
    ctx: &PrecisionContext,
) -> Result<OracleFit> {
    if dimension == 0 || dimension > MAX_FIT_DIMENSION {
        return Err(Error::invalid(format!(
            "oracle extraction is limited to 1 <= D <= {MAX_FIT_DIMENSION}, got {dimension}"
        )));
    }
    let exponents = default_exponents(dimension);
    let needed = dimension as usize + 5;
    if grid.values().len() < needed {
        return Err(Error::invalid(format!(
            "grid needs at least {needed} points for D={dimension}, got {}",
            grid.values().len()
        )));
    }
    let largest = grid.largest().to_f64();
    let smallest = grid.smallest().to_f64();
    if largest > 0.5 {
        return Err(Error::invalid("largest cutoff must not exceed 0.5"));
    }
    if largest / smallest < 4.0 {
        return Err(Error::invalid("grid must span at least a factor of 4 in a"));
    }
    let threshold = grid.truncation_threshold();
    let m_max = max_norm_for(smallest, threshold.to_f64());
    let counts = shell_counts(dimension, bc, m_max)?;
    let samples = grid
        .values()
        .iter()
        .map(|a| sum_shells(&counts, a, threshold, ctx).map(|s| s.value))
        .collect::<Result<Vec<_>>>()?;
    fit_constant(dimension, bc, grid, &samples, &exponents, ctx)
}

/// Fits (π/2)·e^{-a}/(1-e^{-a})² over `grid`; the constant term is the
/// one-dimensional Dirichlet energy, -π/24, with no truncation involved.
pub fn anchor_1d(grid: &CutoffGrid, ctx: &PrecisionContext) -> Result<OracleFit> {
    let digits = ctx.working_digits();
    let half_pi = pi_digits(digits).div_with(&Real::from_int(2, digits), digits)?;
    let samples = grid
        .values()
        .iter()
        .map(|a| Ok(closed_form_1d(a, ctx)?.mul_with(&half_pi, digits)))
        .collect::<Result<Vec<_>>>()?;
    fit_constant(
        1,
        BoundaryCondition::Dirichlet,
        grid,
        &samples,
        &default_exponents(1),
        ctx,
    )
}

fn check_appendix_args(dimension: u32, i: u32) -> Result<()> {
    if i < 1 || i > dimension {
        return Err(Error::invalid(format!(
            "appendix sum index i={i} outside [1, {dimension}]"
        )));
    }
    Ok(())
}

/// S(D, i) = Σ_{k=i}^{D} C(D,k) (k-1)(k-2)...(k-i+1) (-1/2)^(k-i).
pub fn appendix_b_sum(dimension: u32, i: u32) -> Result<ExactRational> {
    check_appendix_args(dimension, i)?;
    let mut acc = BigRational::zero();
    for k in i..=dimension {
        let falling = falling_factorial(k as i64 - 1, (i - 1) as u64);
        let power = (k - i) as usize;
        let mut term = BigRational::new(binomial(dimension as i64, k as i64)? * falling, BigInt::one() << power);
        if power % 2 == 1 {
            term = -term;
        }
        acc += term;
    }
    Ok(acc)
}

/// (d/dy)^(i-1) (1 + y + ... + y^(D-1)) at y = 1/2,
/// i.e. Σ_{j=i-1}^{D-1} j!/(j-i+1)! (1/2)^(j-i+1).
pub fn appendix_b_polynomial_form(dimension: u32, i: u32) -> Result<ExactRational> {
    check_appendix_args(dimension, i)?;
    let mut acc = BigRational::zero();
    for j in (i - 1)..dimension {
        let drop = j - (i - 1);
        let coeff = factorial(j as u64) / factorial(drop as u64);
        acc += BigRational::new(coeff, BigInt::one() << drop as usize);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    NotPositive,
    FormsDiffer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppendixViolation {
    pub dimension: u32,
    pub index: u32,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativityReport {
    pub max_dimension: u32,
    pub pairs_checked: u64,
    pub violations: Vec<AppendixViolation>,
}

impl NegativityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks positivity of S(D, i) and equality of both of its forms for every
/// 1 <= i <= D <= `max_dimension`, in exact arithmetic.
pub fn verify_neumann_negativity(max_dimension: u32) -> NegativityReport {
    let pairs: Vec<(u32, u32)> = (1..=max_dimension).flat_map(|d| (1..=d).map(move |i| (d, i))).collect();
    let violations: Vec<AppendixViolation> = pairs
        .par_iter()
        .map(|&(d, i)| {
            let mut found = Vec::new();
            let lhs = appendix_b_sum(d, i).expect("index in range");
            let rhs = appendix_b_polynomial_form(d, i).expect("index in range");
            if !lhs.is_positive() {
                found.push(AppendixViolation {
                    dimension: d,
                    index: i,
                    kind: ViolationKind::NotPositive,
                });
            }
            if lhs != rhs {
                found.push(AppendixViolation {
                    dimension: d,
                    index: i,
                    kind: ViolationKind::FormsDiffer,
                });
            }
            found
        })
        .flatten()
        .collect();
    NegativityReport {
        max_dimension,
        pairs_checked: pairs.len() as u64,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::const_pi;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn real(s: &str, d: u32) -> Real {
        Real::parse_with_digits(s, d).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let c = ctx(30);
        let ln2 = Real::from_int(2, 30).ln().unwrap();
        let v = closed_form_1d(&ln2, &c).unwrap();
        assert!((&v - &Real::from_int(2, 30)).abs() < real("1e-28", 30));
        let big = closed_form_1d(&Real::from_int(100, 30), &c).unwrap();
        let e100 = real("-100", 30).exp().unwrap();
        assert!((big.log10_abs() - e100.log10_abs()).abs() < 1e-12);
        assert!(closed_form_1d(&Real::zero(30), &c).is_err());
    }

    #[test]
    fn closed_form_matches_truncated_direct_sum() {
        let c = ctx(25);
        let a = real("0.7", 25);
        // N a > 60
        let mut direct = Real::zero(40);
        for n in (1..=90).rev() {
            let nr = Real::from_int(n, 40);
            let w = (-a.with_digits(40).mul_with(&nr, 40)).exp().unwrap();
            direct = direct.add_with(&nr.mul_with(&w, 40), 40);
        }
        let closed = closed_form_1d(&a, &c).unwrap();
        assert_eq!(closed, direct.with_digits(25));
    }

    #[test]
    fn one_dimensional_sum_matches_closed_form() {
        let c = ctx(20);
        let t = Real::from_int(45, 20);
        for a in ["0.4", "0.1", "0.05"] {
            let a = real(a, 20);
            let s = regularized_sum(1, BoundaryCondition::Dirichlet, &a, &t, &c).unwrap();
            assert_eq!(s.kernel, SumKernel::WorkingPrecision);
            let half_pi = const_pi(&c) / Real::from_int(2, 20);
            let expected = closed_form_1d(&a, &c).unwrap() * half_pi;
            let rel = (&s.value - &expected).abs().log10_abs() - expected.log10_abs();
            // truncation at a·n <= 45 drops ~e^-45 relative
            assert!(rel < -17.0, "a={a}: 1e{rel}");
            assert!(s.relative_tail_bound < 1e-15);
        }
    }

    #[test]
    fn shell_counts_match_enumeration() {
        let counts = ShellCounts::build(3, BoundaryCondition::Dirichlet, 200).unwrap();
        let neumann = ShellCounts::build(2, BoundaryCondition::Neumann, 200).unwrap();
        for m in 0..=200u64 {
            let mut brute = 0;
            let mut brute_n = 0;
            for x in 0..15u64 {
                for y in 0..15u64 {
                    if x * x + y * y == m {
                        brute_n += 1;
                    }
                    for z in 1..15u64 {
                        if x >= 1 && y >= 1 && x * x + y * y + z * z == m {
                            brute += 1;
                        }
                    }
                }
            }
            assert_eq!(counts.count(m), brute, "m={m}");
            assert_eq!(neumann.count(m), brute_n, "m={m}");
        }
    }

    #[test]
    fn argument_validation() {
        let c = ctx(20);
        let t = Real::from_int(45, 20);
        let a = real("0.3", 20);
        assert!(regularized_sum(5, BoundaryCondition::Dirichlet, &a, &t, &c).is_err());
        assert!(regularized_sum(1, BoundaryCondition::Dirichlet, &Real::zero(20), &t, &c).is_err());
        assert!(regularized_sum(1, BoundaryCondition::Dirichlet, &a, &Real::from_int(30, 20), &c).is_err());
        let grid = CutoffGrid::default_grid(20);
        assert!(extract_constant(4, BoundaryCondition::Dirichlet, &grid, &c).is_err());
        let short = CutoffGrid::geometric(0.4, 0.8, 5, 45.0, 20).unwrap();
        assert!(extract_constant(1, BoundaryCondition::Dirichlet, &short, &c).is_err());
        let narrow = CutoffGrid::geometric(0.4, 0.95, 12, 45.0, 20).unwrap();
        assert!(extract_constant(1, BoundaryCondition::Dirichlet, &narrow, &c).is_err());
        let coarse = CutoffGrid::geometric(0.8, 0.8, 12, 45.0, 20).unwrap();
        assert!(extract_constant(1, BoundaryCondition::Dirichlet, &coarse, &c).is_err());
        assert!(CutoffGrid::new(vec![real("0.1", 20), real("0.2", 20)], t.clone()).is_err());
        assert!(CutoffGrid::new(vec![real("0.1", 20)], Real::from_int(39, 20)).is_err());
    }

    /// D=1: (π/2)(1/a² - 1/12 + a²/240 - ...); the fit recovers -π/24.
    #[test]
    fn d1_extraction_matches_minus_pi_over_24() {
        let c = ctx(30);
        let fit = extract_constant(1, BoundaryCondition::Dirichlet, &CutoffGrid::default_grid(30), &c).unwrap();
        let target = -(const_pi(&c) / Real::from_int(24, 30));
        let err = (&fit.extracted_constant - &target).abs().to_f64();
        assert!(err < 1e-4, "error {err}");
        // leading coefficient of 1/a² is π/2
        let lead = fit.coefficients[0].to_f64();
        assert!((lead - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn appendix_sums() {
        assert_eq!(appendix_b_sum(1, 1).unwrap(), BigRational::one());
        assert!(appendix_b_sum(4, 2).unwrap().is_positive());
        assert_eq!(appendix_b_sum(4, 2).unwrap(), appendix_b_polynomial_form(4, 2).unwrap());
        assert_eq!(
            appendix_b_sum(10, 5).unwrap(),
            appendix_b_polynomial_form(10, 5).unwrap()
        );
        // D=4, i=2: d/dy (1+y+y²+y³) at 1/2 = 1 + 1 + 3/4
        assert_eq!(
            appendix_b_sum(4, 2).unwrap(),
            BigRational::new(BigInt::from(11), BigInt::from(4))
        );
        assert!(appendix_b_sum(3, 0).is_err());
        assert!(appendix_b_sum(3, 4).is_err());
    }

    #[test]
    fn negativity_check_small() {
        let r = verify_neumann_negativity(1);
        assert!(r.passed());
        assert_eq!(r.pairs_checked, 1);
        let r = verify_neumann_negativity(20);
        assert!(r.passed());
        assert_eq!(r.pairs_checked, 210);
    }
}
