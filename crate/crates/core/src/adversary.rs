//! Attackers: f-tables, `U_f`, targeted regions and attack distributions.
//!
//! An f-opponent destroys, uniformly at random, one of the vulnerable regions
//! minimizing `U_f(T) = Σ f(|K|)` over the components `K` left after removing
//! `T`. The random attacker hits a uniformly random vulnerable node, which as
//! a region distribution means `P[T] = |T| / |U|`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::InducedNetwork;
use crate::graph::components_excluding;
use crate::rational::{int, Rational};

/// Values `f(0), …, f(n)`.
#[derive(Debug, Clone)]
pub struct FTable {
    values: Vec<Rational>,
    // f scaled to a common denominator, when every value fits comfortably
    scaled: Option<Vec<i64>>,
}

impl PartialEq for FTable {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for FTable {}

impl FTable {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        match values.first() {
            None => return Err(Error::InvalidFTable("table is empty".into())),
            Some(f0) if !f0.is_zero() => {
                return Err(Error::InvalidFTable(format!("f(0) = {f0}, expected 0")))
            }
            _ => {}
        }
        if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::InvalidFTable(format!("f({x}) = {v} is negative")));
        }
        let scaled = scale(&values);
        Ok(Self { values, scaled })
    }

    /// `x ↦ x^r` on `0..=n`.
    pub fn monomial(r: u32, n: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("monomial degree must be at least 1".into()));
        }
        Self::new((0..=n).map(|x| Rational::from_integer(BigInt::from(x).pow(r))).collect())
    }

    /// The non-monotone table of the low-welfare opponent: `f(1) = 2`,
    /// `f(7) = 3`, `f(8) = 5`, `f(9) = 4`, `f(10) = 7` and 0 elsewhere.
    pub fn tailored(n: usize) -> Result<Self> {
        if n < 10 {
            return Err(Error::InvalidParameter(format!("tailored table needs n >= 10, got {n}")));
        }
        let values = (0..=n)
            .map(|x| match x {
                1 => int(2),
                7 => int(3),
                8 => int(5),
                9 => int(4),
                10 => int(7),
                _ => int(0),
            })
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Largest size covered by the table.
    pub fn max_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, size: usize) -> Result<&Rational> {
        self.values.get(size).ok_or(Error::SizeOutOfRange {
            size,
            max: self.max_size(),
        })
    }

    /// True iff the table is `x ↦ x` (the maximum-carnage opponent).
    pub fn is_linear_identity(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(x, v)| *v == Rational::from_integer(BigInt::from(x)))
    }
}

fn scale(values: &[Rational]) -> Option<Vec<i64>> {
    let denom = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let limit = BigInt::from(i64::MAX >> 16);
    values
        .iter()
        .map(|v| {
            let s = v.numer() * (&denom / v.denom());
            if s > limit {
                None
            } else {
                s.to_i64()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttackerSpec {
    /// Uniformly random vulnerable node.
    Random,
    /// Uniform over the regions minimizing `U_f`.
    FOpponent(FTable),
}

impl AttackerSpec {
    pub fn table(&self) -> Option<&FTable> {
        match self {
            AttackerSpec::Random => None,
            AttackerSpec::FOpponent(f) => Some(f),
        }
    }

    /// Maximum carnage (`x ↦ x`) or random attack.
    pub fn is_carnage_or_random(&self) -> bool {
        match self {
            AttackerSpec::Random => true,
            AttackerSpec::FOpponent(f) => f.is_linear_identity(),
        }
    }

    pub fn is_sqd(&self) -> bool {
        self.table().is_some_and(|f| classify_sqd(f).is_sqd)
    }
}

/// `Σ f(size)` over a multiset of component sizes.
pub fn sum_f(f: &FTable, sizes: &[usize]) -> Result<Rational> {
    let mut total = Rational::zero();
    for &size in sizes {
        total += f.get(size)?;
    }
    Ok(total)
}

/// `U_f(T)`: `sum_f` over the component sizes after deleting region `region`.
pub fn u_f_of_attack(f: &FTable, net: &InducedNetwork, region: usize) -> Result<Rational> {
    let mask = net.removal_mask(region)?;
    sum_f(f, &components_excluding(net.graph(), &mask).sizes)
}

/// Exactly the regions attaining the minimum of `U_f`, in region order.
pub fn targeted_regions(f: &FTable, net: &InducedNetwork) -> Vec<usize> {
    let regions = net.vulnerable_regions().len();
    if regions == 0 {
        return Vec::new();
    }
    let sizes: Vec<Vec<usize>> = (0..regions)
        .map(|r| {
            let mask = net.removal_mask(r).expect("valid region");
            components_excluding(net.graph(), &mask).sizes
        })
        .collect();
    if let Some(scaled) = &f.scaled {
        let values: Vec<i128> = sizes
            .iter()
            .map(|s| s.iter().map(|&k| scaled[k] as i128).sum())
            .collect();
        argmin(&values)
    } else {
        let values: Vec<Rational> = sizes
            .iter()
            .map(|s| sum_f(f, s).expect("sizes bounded by n"))
            .collect();
        argmin(&values)
    }
}

fn argmin<T: Ord>(values: &[T]) -> Vec<usize> {
    let Some(best) = values.iter().min() else {
        return Vec::new();
    };
    (0..values.len()).filter(|&r| values[r] == *best).collect()
}

/// Probability distribution over vulnerable regions, stored as integer
/// weights over a common total.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttackDistribution {
    weights: Vec<(usize, u64)>,
    total: u64,
}

impl AttackDistribution {
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(region index, weight)` pairs in region order.
    pub fn weights(&self) -> &[(usize, u64)] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().map(|&(r, _)| r)
    }

    pub fn probability(&self, region: usize) -> Rational {
        self.weights
            .iter()
            .find(|&&(r, _)| r == region)
            .map(|&(_, w)| Rational::new(w.into(), self.total.into()))
            .unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> Vec<(usize, Rational)> {
        self.weights
            .iter()
            .map(|&(r, w)| (r, Rational::new(w.into(), self.total.into())))
            .collect()
    }
}

pub fn attack_distribution(spec: &AttackerSpec, net: &InducedNetwork) -> AttackDistribution {
    let weights: Vec<(usize, u64)> = match spec {
        AttackerSpec::Random => net
            .vulnerable_regions()
            .iter()
            .enumerate()
            .map(|(r, region)| (r, region.len() as u64))
            .collect(),
        AttackerSpec::FOpponent(f) => targeted_regions(f, net).into_iter().map(|r| (r, 1)).collect(),
    };
    let total = weights.iter().map(|&(_, w)| w).sum();
    AttackDistribution { weights, total }
}

pub fn monomial_f(r: u32, n: usize) -> Result<FTable> {
    FTable::monomial(r, n)
}

pub fn tailored_f(n: usize) -> Result<FTable> {
    FTable::tailored(n)
}

/// `f'(i) = f(i+1) - f(i)` for `i` in `0..n`; may be negative.
pub fn f_derivative(f: &FTable) -> Vec<Rational> {
    f.values.windows(2).map(|w| &w[1] - &w[0]).collect()
}

/// `g(x, y) = f(x+y) - f(x) - f(y)`.
pub fn g_value(f: &FTable, x: usize, y: usize) -> Result<Rational> {
    Ok(f.get(x + y)? - f.get(x)? - f.get(y)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqdReport {
    pub f0_is_zero: bool,
    pub strictly_convex: bool,
    /// `f(x)/x²` non-decreasing over `1..=n`.
    pub ratio_nondecreasing: bool,
    pub is_sqd: bool,
}

/// Super-quadratic-disruptor test: `f(0) = 0`, `f'` strictly increasing and
/// `f(x)/x²` non-decreasing.
pub fn classify_sqd(f: &FTable) -> SqdReport {
    let f0_is_zero = f.values[0].is_zero();
    let deriv = f_derivative(f);
    let strictly_convex = deriv.windows(2).all(|w| w[1] > w[0]);
    let ratios: Vec<Rational> = f
        .values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(x, v)| v / Rational::from_integer(BigInt::from(x * x)))
        .collect();
    let ratio_nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0]);
    SqdReport {
        f0_is_zero,
        strictly_convex,
        ratio_nondecreasing,
        is_sqd: f0_is_zero && strictly_convex && ratio_nondecreasing,
    }
}
