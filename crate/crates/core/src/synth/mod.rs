//! Seeded synthetic templates.
//!
//! Every template is drawn from its own ChaCha8 stream keyed by
//! `(seed, kind, index)`, so outputs do not depend on generation order.

mod file;

use rand::seq::index::sample;
use rand::Rng;

use crate::bits::BinaryTemplate;
use crate::error::{check_len, Error, Result};
use crate::kv::KeyValues;
use crate::rng::{stream, RNG_NAME};

pub use file::{parse_templates, write_templates};

const REFERENCE: u64 = 1;
const GENUINE: u64 = 2;
const IMPOSTOR: u64 = 3;
const EXACT: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetSpec {
    pub n: usize,
    pub population: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Per-bit flip probability of a genuine capture.
    pub epsilon: f64,
    pub seed: u64,
}

impl DatasetSpec {
    /// Spec with the default noise level `0.8 * lambda_min / n`.
    pub fn new(
        n: usize,
        population: usize,
        lambda_min: f64,
        lambda_max: f64,
        seed: u64,
    ) -> Result<Self> {
        let epsilon = if n == 0 {
            0.0
        } else {
            0.8 * lambda_min / n as f64
        };
        Self::with_epsilon(n, population, lambda_min, lambda_max, epsilon, seed)
    }

    pub fn with_epsilon(
        n: usize,
        population: usize,
        lambda_min: f64,
        lambda_max: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        let spec = DatasetSpec {
            n,
            population,
            lambda_min,
            lambda_max,
            epsilon,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Thresholds `0.25 n` and `0.35 n`, as for 2048-bit iris codes.
    pub fn iris_like(n: usize, population: usize, seed: u64) -> Result<Self> {
        Self::new(n, population, 0.25 * n as f64, 0.35 * n as f64, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("template length must be positive"));
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::param(format!(
                "epsilon {} outside [0, 0.5]",
                self.epsilon
            )));
        }
        let half = self.n as f64 / 2.0;
        if !(0.0 <= self.lambda_min && self.lambda_min < self.lambda_max && self.lambda_max < half)
        {
            return Err(Error::param(format!(
                "need 0 <= lambda_min < lambda_max < n/2, got {} and {}",
                self.lambda_min, self.lambda_max
            )));
        }
        Ok(())
    }

    pub fn references(&self) -> Vec<BinaryTemplate> {
        (0..self.population as u64)
            .map(|k| uniform(self.n, stream(self.seed, REFERENCE, k)))
            .collect()
    }

    /// Noisy capture of `b`: each bit flips with probability `epsilon`.
    /// Distinct `draw` values give independent noise.
    pub fn genuine(&self, b: &BinaryTemplate, draw: u64) -> Result<BinaryTemplate> {
        check_len(self.n, b.len())?;
        let mut rng = stream(self.seed, GENUINE, draw);
        let mut out = b.clone();
        for i in 0..self.n {
            if rng.gen_bool(self.epsilon) {
                out.flip(i);
            }
        }
        Ok(out)
    }

    /// Fresh uniform template.
    pub fn impostor(&self, draw: u64) -> BinaryTemplate {
        uniform(self.n, stream(self.seed, IMPOSTOR, draw))
    }

    /// `b` with a uniformly chosen set of exactly `d` bits flipped.
    pub fn at_distance(&self, b: &BinaryTemplate, d: usize, draw: u64) -> Result<BinaryTemplate> {
        check_len(self.n, b.len())?;
        if d > self.n {
            return Err(Error::param(format!(
                "distance {d} exceeds length {}",
                self.n
            )));
        }
        let mut rng = stream(self.seed, EXACT, draw);
        let mut out = b.clone();
        for i in sample(&mut rng, self.n, d) {
            out.flip(i);
        }
        Ok(out)
    }

    pub fn manifest(&self) -> String {
        let mut kv = KeyValues::new();
        kv.push("n", self.n)
            .push("N", self.population)
            .push("lambda_min", self.lambda_min)
            .push("lambda_max", self.lambda_max)
            .push("epsilon", self.epsilon)
            .push("seed", self.seed)
            .push("rng", RNG_NAME);
        kv.to_text()
    }

    pub fn parse_manifest(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        kv.only(&[
            "n",
            "N",
            "lambda_min",
            "lambda_max",
            "epsilon",
            "seed",
            "rng",
        ])?;
        let rng: String = kv.require("rng")?;
        if rng != RNG_NAME {
            return Err(Error::Config(format!(
                "manifest generated with rng {rng:?}, this build uses {RNG_NAME:?}"
            )));
        }
        Self::with_epsilon(
            kv.require("n")?,
            kv.require("N")?,
            kv.require("lambda_min")?,
            kv.require("lambda_max")?,
            kv.require("epsilon")?,
            kv.require("seed")?,
        )
    }
}

fn uniform(n: usize, mut rng: crate::rng::Rng) -> BinaryTemplate {
    let mut b = BinaryTemplate::with_capacity(n);
    let mut left = n;
    while left > 0 {
        let take = left.min(64);
        b.push_uint(rng.gen::<u64>() >> (64 - take), take);
        left -= take;
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Condition1Report {
    /// Fraction of genuine pairs at distance at most `lambda_min`.
    pub genuine_within: f64,
    /// Fraction of impostor pairs at distance above `lambda_max`.
    pub impostor_beyond: f64,
    pub genuine_mean: f64,
    pub impostor_mean: f64,
}

impl Condition1Report {
    pub fn holds(&self, threshold: f64) -> bool {
        self.genuine_within >= threshold && self.impostor_beyond >= threshold
    }
}

type Pair = (BinaryTemplate, BinaryTemplate);

pub fn verify_condition1(
    genuine_pairs: &[Pair],
    impostor_pairs: &[Pair],
    lambda_min: f64,
    lambda_max: f64,
) -> Result<Condition1Report> {
    let distances = |pairs: &[Pair]| -> Result<Vec<f64>> {
        pairs
            .iter()
            .map(|(a, b)| a.hamming_distance(b).map(|d| d as f64))
            .collect()
    };
    let g = distances(genuine_pairs)?;
    let i = distances(impostor_pairs)?;
    let fraction = |xs: &[f64], pred: &dyn Fn(f64) -> bool| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().filter(|&&d| pred(d)).count() as f64 / xs.len() as f64
        }
    };
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    Ok(Condition1Report {
        genuine_within: fraction(&g, &|d| d <= lambda_min),
        impostor_beyond: fraction(&i, &|d| d > lambda_max),
        genuine_mean: mean(&g),
        impostor_mean: mean(&i),
    })
}
