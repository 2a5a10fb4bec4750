//! Evaluating identities on concrete vectors.
//!
//! Exact mode works over rational Euclidean space, where `‖v‖²` is the sum of
//! squared components and therefore rational. Float mode evaluates under an
//! arbitrary `ℓp` or `ℓ∞` norm and never assumes an inner product: every
//! `‖x_J − x_K‖` is computed from the difference vector itself.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::identity::PlainIdentity;
use crate::rational::Rational;
use crate::signed::SignedIdentity;
use crate::subset::Subset;

/// Relative residual below which a float evaluation counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;
/// Relative residual above which a float evaluation counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-6;
/// Relative bound on third differences for the quadratic-growth probe.
pub const QUADRATIC_TOLERANCE: f64 = 1e-8;

/// `n` vectors of a common dimension; index `i` of the identity reads
/// `vectors[i - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T> {
    dim: usize,
    vectors: Vec<Vec<T>>,
}

pub type ExactAssignment = Assignment<Rational>;
pub type FloatAssignment = Assignment<f64>;

impl<T> Assignment<T> {
    pub fn new(vectors: Vec<Vec<T>>) -> Result<Self, Error> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Dimension("no vectors supplied".into()))?;
        if dim == 0 {
            return Err(Error::Dimension("vectors must have at least one component".into()));
        }
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(Error::Dimension(format!(
                "vector {} has {} components, expected {dim}",
                i + 1,
                v.len()
            )));
        }
        Ok(Assignment { dim, vectors })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }
}

impl ExactAssignment {
    pub fn to_float(&self) -> FloatAssignment {
        Assignment {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(Rational::to_f64).collect())
                .collect(),
        }
    }
}

impl<T: Clone> Assignment<T> {
    /// Applies `f` to every component.
    pub fn map_components(&self, f: impl Fn(&T) -> T) -> Self {
        Assignment {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(&f).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    /// Euclidean norm; exact over rationals, `ℓ2` in float mode.
    EuclideanExact,
    Lp(f64),
    Linf,
}

impl NormSpec {
    pub const MAX_P: f64 = 64.0;

    pub fn lp(p: f64) -> Result<Self, Error> {
        if !(1.0..=Self::MAX_P).contains(&p) {
            return Err(Error::Norm(format!(
                "p must lie in [1, {}] (use linf for p = ∞), got {p}",
                Self::MAX_P
            )));
        }
        Ok(NormSpec::Lp(p))
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            NormSpec::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormSpec::EuclideanExact => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormSpec::Lp(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
            NormSpec::Lp(p) if p == 2.0 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormSpec::Lp(p) => v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    pub fn squared_norm(&self, v: &[f64]) -> f64 {
        match *self {
            NormSpec::EuclideanExact => v.iter().map(|x| x * x).sum(),
            NormSpec::Lp(p) if p == 2.0 => v.iter().map(|x| x * x).sum(),
            _ => self.norm(v).powi(2),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::EuclideanExact => f.write_str("euclidean"),
            NormSpec::Lp(p) => write!(f, "lp:{p}"),
            NormSpec::Linf => f.write_str("linf"),
        }
    }
}

/// Accepts `euclidean`, `l2`, `linf` and `lp:P`.
impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "euclidean" | "l2" => Ok(NormSpec::EuclideanExact),
            "linf" | "lp:inf" => Ok(NormSpec::Linf),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Norm(format!("unknown norm `{s}`; expected lp:P, linf or euclidean"))
                    })?;
                NormSpec::lp(p)
            }
        }
    }
}

/// A float evaluation together with its magnitude scale `Σ |c|·‖·‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.abs() <= ZERO_TOLERANCE * self.scale
    }

    pub fn is_violation(&self) -> bool {
        self.scale > 0.0 && self.value.abs() > VIOLATION_TOLERANCE * self.scale
    }
}

trait Component: Clone {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl Component for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Component for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Memoised partial sums `x_A`, built by peeling the top index off `A`.
struct SubsetSums<'a, T> {
    va: &'a Assignment<T>,
    cache: HashMap<u64, Vec<T>>,
}

impl<'a, T: Component> SubsetSums<'a, T> {
    fn new(va: &'a Assignment<T>) -> Self {
        SubsetSums {
            va,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, subset: Subset) -> Vec<T> {
        let word = subset.bits();
        if word == 0 {
            return vec![T::zero(); self.va.dim];
        }
        if let Some(v) = self.cache.get(&word) {
            return v.clone();
        }
        let top = subset.max_index();
        let rest = Subset::from_bits(word & !(1 << (top - 1)));
        let head = &self.va.vectors[top - 1];
        let sum = if rest.is_empty() {
            head.clone()
        } else {
            let prefix = self.get(rest);
            prefix.iter().zip(head).map(|(a, b)| a.add(b)).collect()
        };
        self.cache.insert(word, sum.clone());
        sum
    }

    fn difference(&mut self, plus: Subset, minus: Subset) -> Vec<T> {
        if minus.is_empty() {
            return self.get(plus);
        }
        let p = self.get(plus);
        let m = self.get(minus);
        p.iter().zip(&m).map(|(a, b)| a.sub(b)).collect()
    }
}

fn exact_square(v: &[Rational]) -> Rational {
    v.iter().map(|x| x * x).sum()
}

fn check_arity<T>(n: usize, va: &Assignment<T>) -> Result<(), Error> {
    if va.n() != n {
        return Err(Error::Dimension(format!(
            "identity has {n} indices but {} vectors were supplied",
            va.n()
        )));
    }
    Ok(())
}

/// Anything that can be evaluated as a sum of weighted squared norms.
pub trait Evaluate {
    fn ambient_n(&self) -> usize;

    /// Exact value under the Euclidean norm on rational vectors.
    fn eval_exact(&self, va: &ExactAssignment) -> Result<Rational, Error>;

    /// Float value under `norm`, with its magnitude scale.
    fn eval_float(&self, va: &FloatAssignment, norm: &NormSpec) -> Result<Residual, Error>;
}

impl Evaluate for PlainIdentity {
    fn ambient_n(&self) -> usize {
        self.n()
    }

    fn eval_exact(&self, va: &ExactAssignment) -> Result<Rational, Error> {
        check_arity(self.n(), va)?;
        let mut sums = SubsetSums::new(va);
        Ok(self
            .terms()
            .map(|(s, c)| c * exact_square(&sums.get(s)))
            .sum())
    }

    fn eval_float(&self, va: &FloatAssignment, norm: &NormSpec) -> Result<Residual, Error> {
        check_arity(self.n(), va)?;
        let mut sums = SubsetSums::new(va);
        let mut out = Residual { value: 0.0, scale: 0.0 };
        for (s, c) in self.terms() {
            let c = c.to_f64();
            let sq = norm.squared_norm(&sums.get(s));
            out.value += c * sq;
            out.scale += c.abs() * sq;
        }
        Ok(out)
    }
}

impl Evaluate for SignedIdentity {
    fn ambient_n(&self) -> usize {
        self.n()
    }

    fn eval_exact(&self, va: &ExactAssignment) -> Result<Rational, Error> {
        check_arity(self.n(), va)?;
        let mut sums = SubsetSums::new(va);
        Ok(self
            .terms()
            .iter()
            .map(|t| t.coeff() * exact_square(&sums.difference(t.plus(), t.minus())))
            .sum())
    }

    fn eval_float(&self, va: &FloatAssignment, norm: &NormSpec) -> Result<Residual, Error> {
        check_arity(self.n(), va)?;
        let mut sums = SubsetSums::new(va);
        let mut out = Residual { value: 0.0, scale: 0.0 };
        for t in self.terms() {
            let c = t.coeff().to_f64();
            let sq = norm.squared_norm(&sums.difference(t.plus(), t.minus()));
            out.value += c * sq;
            out.scale += c.abs() * sq;
        }
        Ok(out)
    }
}

/// Two-dimensional vectors tried before any random search, in this order.
pub const GRID_VECTORS: [[f64; 2]; 8] = [
    [1.0, 0.0],
    [0.0, 1.0],
    [-1.0, 0.0],
    [0.0, -1.0],
    [1.0, 1.0],
    [1.0, -1.0],
    [-1.0, 1.0],
    [-1.0, -1.0],
];

/// At most this many grid assignments are tried before random sampling.
pub const MAX_GRID_TRIALS: u64 = 4096;

pub const DEFAULT_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    /// Zero-based index of the trial that produced the hit.
    pub trial: u64,
    pub from_grid: bool,
    pub assignment: FloatAssignment,
    pub residual: Residual,
}

fn grid_assignment(n: usize, mut trial: u64) -> FloatAssignment {
    // The last index varies fastest.
    let mut vectors = vec![Vec::new(); n];
    for slot in vectors.iter_mut().rev() {
        *slot = GRID_VECTORS[(trial % GRID_VECTORS.len() as u64) as usize].to_vec();
        trial /= GRID_VECTORS.len() as u64;
    }
    Assignment { dim: 2, vectors }
}

fn grid_size(n: usize) -> u64 {
    (GRID_VECTORS.len() as u64)
        .checked_pow(n as u32)
        .map_or(MAX_GRID_TRIALS, |g| g.min(MAX_GRID_TRIALS))
}

/// Searches for vectors on which `id` visibly fails under `norm`.
///
/// The fixed grid over [`GRID_VECTORS`] is tried first, then seeded random
/// assignments of dimension 2..=4 with components in `[-2, 2]`. Every
/// assignment counts against `budget`. The result is the earliest hit, so
/// the same `(id, norm, budget, seed)` always gives the same answer.
pub fn find_counterexample<E: Evaluate + ?Sized>(
    id: &E,
    norm: &NormSpec,
    budget: u64,
    seed: u64,
) -> Result<Option<Counterexample>, Error> {
    if budget == 0 {
        return Err(Error::Parameter("search budget must be at least 1".into()));
    }
    let n = id.ambient_n();
    let grid = grid_size(n).min(budget);
    for trial in 0..grid {
        let va = grid_assignment(n, trial);
        let residual = id.eval_float(&va, norm)?;
        if residual.is_violation() {
            return Ok(Some(Counterexample {
                trial,
                from_grid: true,
                assignment: va,
                residual,
            }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in grid..budget {
        let dim = rng.gen_range(2..=4);
        let vectors = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..=2.0)).collect())
            .collect();
        let va = Assignment { dim, vectors };
        let residual = id.eval_float(&va, norm)?;
        if residual.is_violation() {
            return Ok(Some(Counterexample {
                trial,
                from_grid: false,
                assignment: va,
                residual,
            }));
        }
    }
    Ok(None)
}

/// Forward difference `Σ_k C(order,k) (-1)^{order-k} g(r + k·s)`.
pub fn finite_difference(g: impl Fn(f64) -> f64, r: f64, s: f64, order: u32) -> f64 {
    let mut coeff = 1.0f64;
    let mut total = 0.0;
    for k in 0..=order {
        let sign = if (order - k) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * coeff * g(r + k as f64 * s);
        coeff = coeff * (order - k) as f64 / (k + 1) as f64;
    }
    total
}

/// `r ∈ {-2,-1,0,1}` crossed with `s ∈ {1/4, 1/2, 1}`.
pub fn default_probe_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(12);
    for r in [-2.0, -1.0, 0.0, 1.0] {
        for s in [0.25, 0.5, 1.0] {
            grid.push((r, s));
        }
    }
    grid
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub max_abs_third_difference: f64,
    /// Grid point `(r, s)` where the largest difference occurred.
    pub worst_point: (f64, f64),
    pub is_quadratic_on_grid: bool,
}

/// Third differences of `g(t) = ‖x + t·y‖²` over `grid`.
///
/// In an inner-product space `g` is a quadratic polynomial, so every third
/// difference vanishes; a nonzero one shows the norm is not Euclidean-like
/// along the line through `x` in direction `y`.
pub fn degree_probe(
    x: &[f64],
    y: &[f64],
    norm: &NormSpec,
    grid: &[(f64, f64)],
) -> Result<ProbeReport, Error> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Dimension(format!(
            "x has {} components and y has {}",
            x.len(),
            y.len()
        )));
    }
    if y.iter().all(|c| *c == 0.0) {
        return Err(Error::Parameter("direction y must be nonzero".into()));
    }
    if grid.is_empty() {
        return Err(Error::Parameter("probe grid is empty".into()));
    }
    let g = |t: f64| {
        let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + t * b).collect();
        norm.squared_norm(&p)
    };
    let mut report = ProbeReport {
        max_abs_third_difference: 0.0,
        worst_point: grid[0],
        is_quadratic_on_grid: true,
    };
    for &(r, s) in grid {
        let delta = finite_difference(g, r, s, 3).abs();
        let scale = (0..=3).map(|k| g(r + k as f64 * s).abs()).fold(1.0, f64::max);
        if delta > QUADRATIC_TOLERANCE * scale {
            report.is_quadratic_on_grid = false;
        }
        if delta > report.max_abs_third_difference {
            report.max_abs_third_difference = delta;
            report.worst_point = (r, s);
        }
    }
    Ok(report)
}
