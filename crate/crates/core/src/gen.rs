//! Seeded random instance generators.
//!
//! All randomness comes from xoshiro256** (Blackman and Vigna) seeded from a
//! single `u64` through SplitMix64, as implemented by `rand_xoshiro`. The
//! derived draws below are fixed here rather than delegated to a
//! distribution library, so a seed reproduces the same matrix bit for bit on
//! every platform:
//!
//! * uniform real: top 53 bits of `next_u64`, scaled by `2^-53`;
//! * Bernoulli(p): uniform real `< p` (so `p = 0` never and `p = 1` always fires);
//! * uniform integer below `b`: Lemire's widening multiply with rejection;
//! * entries are drawn row by row, left to right.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Deterministic generator used by every seeded routine in the crate.
#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256StarStar);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform integer in `0..bound`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next_u64() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Fisher-Yates shuffle, last position first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Uniformly random permutation of `0..len`.
pub fn random_permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..len).collect();
    SeededRng::new(seed).shuffle(&mut p);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// i.i.d. Bernoulli entries.
    ConstantDensity,
    /// Exactly `round(delta * n)` ones per row, rows independent.
    Karp,
    /// Four Bernoulli blocks around a split.
    Planted,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::ConstantDensity => "constant-density",
            Model::Karp => "karp",
            Model::Planted => "planted",
        }
    }
}

/// Target block densities and split position for planted instances.
/// `d1..d4` are the densities of the top-left, top-right, bottom-left and
/// bottom-right blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub mu: f64,
    pub nu: f64,
}

impl BlockParams {
    /// Dense diagonal `2δ − ε`, off-diagonal `ε`, even split.
    pub fn bordered(delta: f64, eps: f64) -> Self {
        let diag = 2.0 * delta - eps;
        BlockParams { d1: diag, d2: eps, d3: eps, d4: diag, mu: 0.0, nu: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub m: usize,
    pub n: usize,
    /// Target density for the constant-density and Karp models.
    #[serde(default)]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockParams>,
    pub seed: u64,
}

impl GenSpec {
    pub fn constant_density(m: usize, n: usize, delta: f64, seed: u64) -> Self {
        GenSpec { model: Model::ConstantDensity, m, n, delta, blocks: None, seed }
    }

    pub fn karp(m: usize, n: usize, delta: f64, seed: u64) -> Self {
        GenSpec { model: Model::Karp, m, n, delta, blocks: None, seed }
    }

    pub fn planted(m: usize, n: usize, blocks: BlockParams, seed: u64) -> Self {
        GenSpec { model: Model::Planted, m, n, delta: 0.0, blocks: Some(blocks), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::invalid(format!("dimensions must be positive, got {}x{}", self.m, self.n)));
        }
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} = {x} outside [0, 1]")))
            }
        };
        match self.model {
            Model::ConstantDensity | Model::Karp => unit("delta", self.delta),
            Model::Planted => {
                let b = self.blocks.ok_or_else(|| Error::invalid("planted model needs block parameters"))?;
                unit("d1", b.d1)?;
                unit("d2", b.d2)?;
                unit("d3", b.d3)?;
                unit("d4", b.d4)?;
                self.planted_split().map(|_| ())
            }
        }
    }

    /// Karp row weight `round_half_up(delta * n)`.
    pub fn karp_weight(&self) -> usize {
        ((self.delta * self.n as f64 + 0.5).floor() as usize).min(self.n)
    }

    /// `(r, c)` = `(round(m(1+μ)/2), round(n(1+ν)/2))`; both must leave two
    /// non-empty halves.
    pub fn planted_split(&self) -> Result<(usize, usize)> {
        let b = self.blocks.ok_or_else(|| Error::invalid("planted model needs block parameters"))?;
        if !(b.mu > -1.0 && b.mu < 1.0 && b.nu > -1.0 && b.nu < 1.0) {
            return Err(Error::invalid(format!("mu = {}, nu = {} must lie in (-1, 1)", b.mu, b.nu)));
        }
        let r = (self.m as f64 * (1.0 + b.mu) / 2.0 + 0.5).floor() as usize;
        let c = (self.n as f64 * (1.0 + b.nu) / 2.0 + 0.5).floor() as usize;
        if r == 0 || r >= self.m || c == 0 || c >= self.n {
            return Err(Error::invalid(format!(
                "degenerate split r = {r}, c = {c} for a {}x{} matrix",
                self.m, self.n
            )));
        }
        Ok((r, c))
    }

    pub fn generate(&self) -> Result<Generated> {
        match self.model {
            Model::ConstantDensity => Ok(Generated { matrix: gen_constant_density(self)?, split: None }),
            Model::Karp => Ok(Generated { matrix: gen_karp(self)?, split: None }),
            Model::Planted => gen_planted(self),
        }
    }
}

/// A generated instance; planted instances also carry their true split.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub matrix: BinaryMatrix,
    pub split: Option<(usize, usize)>,
}

fn expect_model(spec: &GenSpec, model: Model) -> Result<()> {
    if spec.model != model {
        return Err(Error::invalid(format!("expected model {}, got {}", model.name(), spec.model.name())));
    }
    spec.validate()
}

pub fn gen_constant_density(spec: &GenSpec) -> Result<BinaryMatrix> {
    expect_model(spec, Model::ConstantDensity)?;
    let mut rng = SeededRng::new(spec.seed);
    BinaryMatrix::from_fn(spec.m, spec.n, |_, _| rng.bernoulli(spec.delta))
}

pub fn gen_karp(spec: &GenSpec) -> Result<BinaryMatrix> {
    expect_model(spec, Model::Karp)?;
    let t = spec.karp_weight();
    let mut rng = SeededRng::new(spec.seed);
    let mut out = BinaryMatrix::zeros(spec.m, spec.n)?;
    let mut cols: Vec<usize> = (0..spec.n).collect();
    for i in 0..spec.m {
        // partial Fisher-Yates: positions 0..t become a uniform t-subset
        for p in 0..t {
            let q = p + rng.below((spec.n - p) as u64) as usize;
            cols.swap(p, q);
            out.set(i, cols[p]);
        }
    }
    Ok(out)
}

pub fn gen_planted(spec: &GenSpec) -> Result<Generated> {
    expect_model(spec, Model::Planted)?;
    let b = spec.blocks.expect("validated");
    let (r, c) = spec.planted_split()?;
    let mut rng = SeededRng::new(spec.seed);
    let matrix = BinaryMatrix::from_fn(spec.m, spec.n, |i, j| {
        let p = match (i < r, j < c) {
            (true, true) => b.d1,
            (true, false) => b.d2,
            (false, true) => b.d3,
            (false, false) => b.d4,
        };
        rng.bernoulli(p)
    })?;
    Ok(Generated { matrix, split: Some((r, c)) })
}
