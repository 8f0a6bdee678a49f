//! Park-Miller "minimal standard" Lehmer generator.
//!
//! The state is a single integer in `[1, 2^31 - 2]` and advances as
//! `x <- 16807 * x mod (2^31 - 1)`. Raw outputs equal the new state.
//! Bounded integers are drawn by rejection so every residue is equally
//! likely.

use crate::error::{Error, Result};

/// The multiplier `a`.
pub const MULTIPLIER: u64 = 16807;
/// The prime modulus `m = 2^31 - 1`.
pub const MODULUS: u64 = 2_147_483_647;
/// Number of distinct raw outputs, `m - 1`.
pub const RAW_RANGE: u64 = MODULUS - 1;
/// Largest valid state.
pub const MAX_STATE: u32 = (MODULUS - 1) as u32;

/// A source of uniformly distributed bounded integers.
///
/// The shuffle and the labeler only need this much, which lets tests
/// drive them with scripted draws.
pub trait UniformSource {
    /// Returns a value in `[0, bound)`. `bound` must be at least 1.
    fn below(&mut self, bound: u64) -> u64;
}

/// Park-Miller generator state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngState(u32);

impl RngState {
    /// Seeds a generator. Seeds outside `[1, 2^31 - 2]` are rejected.
    pub fn new(seed: u64) -> Result<Self> {
        if seed == 0 || seed > MAX_STATE as u64 {
            return Err(Error::domain(format!(
                "seed {seed} outside [1, {MAX_STATE}]"
            )));
        }
        Ok(RngState(seed as u32))
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    /// Advances the state and returns the new value.
    #[inline]
    pub fn next_raw(&mut self) -> u32 {
        self.0 = ((self.0 as u64 * MULTIPLIER) % MODULUS) as u32;
        self.0
    }

    /// Uniform integer in `[0, bound)` for `1 <= bound <= 2^31 - 2`.
    pub fn uniform_below(&mut self, bound: u64) -> Result<u64> {
        if bound == 0 || bound > RAW_RANGE {
            return Err(Error::domain(format!(
                "bound {bound} outside [1, {RAW_RANGE}]"
            )));
        }
        Ok(self.below_narrow(bound))
    }

    #[inline]
    fn below_narrow(&mut self, bound: u64) -> u64 {
        debug_assert!((1..=RAW_RANGE).contains(&bound));
        let limit = RAW_RANGE - RAW_RANGE % bound;
        loop {
            let v = self.next_raw() as u64 - 1;
            if v < limit {
                return v % bound;
            }
        }
    }

    /// Bounds above `2^31 - 2` combine two raw draws into one value in
    /// `[0, R^2)` with `R = 2^31 - 2`, again with rejection.
    fn below_wide(&mut self, bound: u64) -> u64 {
        const SPAN: u64 = RAW_RANGE * RAW_RANGE;
        debug_assert!(bound > RAW_RANGE && bound <= SPAN);
        let limit = SPAN - SPAN % bound;
        loop {
            let hi = self.next_raw() as u64 - 1;
            let lo = self.next_raw() as u64 - 1;
            let v = hi * RAW_RANGE + lo;
            if v < limit {
                return v % bound;
            }
        }
    }
}

impl UniformSource for RngState {
    #[inline]
    fn below(&mut self, bound: u64) -> u64 {
        if bound <= RAW_RANGE {
            self.below_narrow(bound)
        } else {
            self.below_wide(bound)
        }
    }
}

impl Iterator for RngState {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        Some(self.next_raw())
    }
}

fn mul_mod(a: u64, b: u64) -> u64 {
    (a * b) % MODULUS
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= MODULUS;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Seed for trial `index`: the `(index + 1)`-th raw output of a seeding
/// generator started at `base`.
///
/// Computed as `base * a^(index+1) mod m`, which equals stepping the
/// seeding stream `index + 1` times.
pub fn derive_trial_seed(base: u64, index: u64) -> Result<u64> {
    let start = RngState::new(base)?;
    if index >= RAW_RANGE - 1 {
        return Err(Error::domain(format!(
            "trial index {index} must be below {}",
            RAW_RANGE - 1
        )));
    }
    Ok(mul_mod(
        start.value() as u64,
        pow_mod(MULTIPLIER, index + 1),
    ))
}

/// Seeds for a batch of `count` independent trials.
///
/// Every Park-Miller stream is a shift of the same cycle, so seeds taken
/// from consecutive indexes give trial streams that lag each other by one
/// draw and are strongly correlated. Trial `i` instead takes seeding-stream
/// index `i * spacing` with `spacing = (m - 2) / count`, which spreads the
/// trials evenly over the period.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialSeeds {
    base: u64,
    count: u64,
    spacing: u64,
}

impl TrialSeeds {
    pub fn new(base: u64, count: u64) -> Result<Self> {
        RngState::new(base)?;
        if count == 0 || count > RAW_RANGE - 1 {
            return Err(Error::domain(format!(
                "trial count {count} outside [1, {}]",
                RAW_RANGE - 1
            )));
        }
        Ok(TrialSeeds {
            base,
            count,
            spacing: (RAW_RANGE - 1) / count,
        })
    }

    pub fn spacing(&self) -> u64 {
        self.spacing
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn seed(&self, trial: u64) -> Result<u64> {
        if trial >= self.count {
            return Err(Error::domain(format!(
                "trial {trial} outside batch of {}",
                self.count
            )));
        }
        derive_trial_seed(self.base, trial * self.spacing)
    }
}

/// Seeds for trials `0..count`, produced by stepping the seeding stream.
pub fn trial_seeds(base: u64, count: u64) -> Result<impl Iterator<Item = u64>> {
    let start = RngState::new(base)?;
    if count > RAW_RANGE - 1 {
        return Err(Error::domain(format!(
            "{count} trials exceed the seed period"
        )));
    }
    Ok(start.take(count as usize).map(u64::from))
}
