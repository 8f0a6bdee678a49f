//! Statistical validation of the generator: depth against the large-tree
//! limit, and chi-square tests of shape uniformity.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::{catalan_exact, enumerate_shapes, ShapeKey};
use crate::prng::{RngState, TrialSeeds};
use crate::shape::{self, ShapeSequence};
use crate::tree::internal_count;
use crate::Real;

fn lit<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("literal representable")
}

fn from_u64<F: Real>(v: u64) -> F {
    F::from_u64(v).expect("integer representable")
}

/// Predicted mean depth of a random tree of `size` nodes, `sqrt(2 pi size)`.
pub fn flajolet_depth_limit<F: Real>(size: u64) -> F {
    (F::TAU() * from_u64::<F>(size)).sqrt()
}

/// Leading term `2 sqrt(pi N)` of the mean height of a random binary tree
/// with `N` internal nodes.
pub fn expected_height_internal<F: Real>(internal: u64) -> F {
    lit::<F>(2.0) * (F::PI() * from_u64::<F>(internal)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthSummary<F> {
    pub size: u64,
    pub trials: u64,
    pub mean: F,
    /// Sample standard deviation (`trials - 1` denominator); 0 for one trial.
    pub std: F,
    pub min: u64,
    pub max: u64,
    pub predicted: F,
    pub rel_err: F,
}

impl<F: Real> DepthSummary<F> {
    /// Aggregates depths in the order given. Two-pass variance.
    pub fn from_depths(size: u64, depths: &[u64]) -> Result<Self> {
        if depths.is_empty() {
            return Err(Error::domain("at least one trial is required"));
        }
        let trials = depths.len() as u64;
        let total: u128 = depths.iter().map(|&d| d as u128).sum();
        let n = from_u64::<F>(trials);
        let mean = F::from_u128(total).expect("sum representable") / n;
        let std = if trials > 1 {
            let ss = depths.iter().fold(F::zero(), |acc, &d| {
                let dev = from_u64::<F>(d) - mean;
                acc + dev * dev
            });
            (ss / (n - F::one())).sqrt()
        } else {
            F::zero()
        };
        let predicted = flajolet_depth_limit::<F>(size);
        Ok(DepthSummary {
            size,
            trials,
            mean,
            std,
            min: *depths.iter().min().unwrap(),
            max: *depths.iter().max().unwrap(),
            predicted,
            rel_err: (mean - predicted).abs() / predicted,
        })
    }
}

/// Depth of each trial's shape, in trial order. Trial `i` is seeded from
/// [`TrialSeeds`]; shapes are not labeled.
pub fn sample_depth_values(size: u64, trials: u64, base_seed: u64) -> Result<Vec<u64>> {
    let n = internal_count(size)?;
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let seeds = TrialSeeds::new(base_seed, trials)?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngState::new(seeds.seed(i)?)?;
            let seq = shape::random_shape(n, &mut rng)?;
            Ok(shape::depth_from_lattice(&seq)? as u64)
        })
        .collect()
}

pub fn sample_depths<F: Real>(size: u64, trials: u64, base_seed: u64) -> Result<DepthSummary<F>> {
    let depths = sample_depth_values(size, trials, base_seed)?;
    DepthSummary::from_depths(size, &depths)
}

/// Supported significance levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alpha {
    P05,
    P01,
    P001,
}

impl Alpha {
    pub fn value(self) -> f64 {
        match self {
            Alpha::P05 => 0.05,
            Alpha::P01 => 0.01,
            Alpha::P001 => 0.001,
        }
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(v: f64) -> Result<Alpha> {
        [Alpha::P05, Alpha::P01, Alpha::P001]
            .into_iter()
            .find(|a| (a.value() - v).abs() < 1e-12)
            .ok_or_else(|| Error::domain(format!("alpha {v} not in {{0.05, 0.01, 0.001}}")))
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<F: Real>(x: F) -> F {
    let half = lit::<F>(0.5);
    if x < half {
        // Reflection keeps the series in its accurate range.
        let pi = F::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(F::one() - x);
    }
    let x = x - F::one();
    let mut acc = lit::<F>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<F>(c) / (x + from_u64::<F>(i as u64));
    }
    let t = x + lit::<F>(LANCZOS_G) + half;
    half * F::TAU().ln() + (x + half) * t.ln() - t + acc.ln()
}

/// Upper regularized incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn gamma_q<F: Real>(a: F, x: F) -> F {
    if x <= F::zero() {
        return F::one();
    }
    let eps = F::epsilon();
    let tiny = F::min_positive_value() / eps;
    let prefactor = (a * x.ln() - x - ln_gamma(a)).exp();
    if x < a + F::one() {
        // Series for P, then Q = 1 - P.
        let mut term = F::one() / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..100_000 {
            ap = ap + F::one();
            term = term * x / ap;
            sum = sum + term;
            if term.abs() < sum.abs() * eps {
                break;
            }
        }
        let p = sum * prefactor;
        (F::one() - p).max(F::zero())
    } else {
        // Modified Lentz continued fraction for Q.
        let two = lit::<F>(2.0);
        let mut b = x + F::one() - a;
        let mut c = F::one() / tiny;
        let mut d = F::one() / b;
        let mut h = d;
        for i in 1..100_000u64 {
            let fi = from_u64::<F>(i);
            let an = -fi * (fi - a);
            b = b + two;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = F::one() / d;
            let delta = d * c;
            h = h * delta;
            if (delta - F::one()).abs() < eps {
                break;
            }
        }
        (prefactor * h).min(F::one())
    }
}

/// Upper-tail survival function of the chi-square distribution.
pub fn chi_square_sf<F: Real>(dof: u64, statistic: F) -> F {
    let half = lit::<F>(0.5);
    gamma_q(from_u64::<F>(dof) * half, statistic * half)
}

/// Critical value `x` with `P(X > x) = alpha` for `X ~ chi-square(dof)`,
/// found by bisection on the survival function.
pub fn chi_square_critical<F: Real>(dof: u64, alpha: Alpha) -> Result<F> {
    if dof == 0 || dof > 10_000 {
        return Err(Error::domain(format!("dof {dof} outside [1, 10000]")));
    }
    let target = lit::<F>(alpha.value());
    let mut lo = F::zero();
    let mut hi = from_u64::<F>(dof.max(4));
    while chi_square_sf(dof, hi) > target {
        lo = hi;
        hi = hi + hi;
    }
    let tol = lit::<F>(1e-9).max(F::epsilon() * lit::<F>(4.0)) * (F::one() + hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * lit::<F>(0.5);
        if chi_square_sf(dof, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * lit::<F>(0.5))
}

/// How arrangements become shapes in [`chi_square_uniform_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    /// Shuffle, then rotate at the first lattice minimum.
    CycleLemma,
    /// Shuffle only. Deliberately biased control: most outputs are not
    /// valid trees at all.
    NoRotation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformityReport<F> {
    pub n: u64,
    pub trials: u64,
    pub statistic: F,
    pub dof: u64,
    pub critical: F,
    pub alpha: Alpha,
    /// Outcomes that were not valid shapes (only the control sampler
    /// produces these).
    pub invalid: u64,
    pub pass: bool,
}

pub fn chi_square_uniform<F: Real>(
    n: u64,
    trials: u64,
    base_seed: u64,
) -> Result<UniformityReport<F>> {
    chi_square_uniform_with(n, trials, base_seed, Alpha::P001, Sampler::CycleLemma)
}

/// Pearson test of the shape census against the uniform distribution over
/// all Catalan(n) shapes.
pub fn chi_square_uniform_with<F: Real>(
    n: u64,
    trials: u64,
    base_seed: u64,
    alpha: Alpha,
    sampler: Sampler,
) -> Result<UniformityReport<F>> {
    if !(2..=8).contains(&n) {
        return Err(Error::domain(format!("n = {n} outside [2, 8]")));
    }
    let catalan = catalan_exact(n)?;
    if trials < 10 * catalan {
        return Err(Error::TooFewTrials {
            trials,
            needed: 10 * catalan,
        });
    }
    let seeds = TrialSeeds::new(base_seed, trials)?;

    let keys: Vec<ShapeKey> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngState::new(seeds.seed(i)?)?;
            let seq: ShapeSequence = match sampler {
                Sampler::CycleLemma => shape::random_shape(n, &mut rng)?,
                Sampler::NoRotation => {
                    let mut s = shape::fill_alternating(n)?;
                    shape::knuth_shuffle(&mut s, &mut rng);
                    s
                }
            };
            Ok(ShapeKey::of(&seq))
        })
        .collect::<Result<_>>()?;

    let mut observed: HashMap<ShapeKey, u64> = enumerate_shapes(n)?
        .iter()
        .map(|s| (ShapeKey::of(s), 0))
        .collect();
    let mut invalid = 0;
    for key in keys {
        match observed.get_mut(&key) {
            Some(c) => *c += 1,
            None => invalid += 1,
        }
    }

    let expected = from_u64::<F>(trials) / from_u64::<F>(catalan);
    let mut counts: Vec<u64> = observed.into_values().collect();
    counts.sort_unstable();
    let statistic = counts.iter().fold(F::zero(), |acc, &o| {
        let diff = from_u64::<F>(o) - expected;
        acc + diff * diff / expected
    });
    let dof = catalan - 1;
    let critical = chi_square_critical::<F>(dof, alpha)?;
    Ok(UniformityReport {
        n,
        trials,
        statistic,
        dof,
        critical,
        alpha,
        invalid,
        pass: invalid == 0 && statistic < critical,
    })
}
