//! Bit-sampling LSH over binary templates and order-m hash chains.
//!
//! Each of the `L` functions of a family restricts an n-bit template to a
//! fixed sequence of `w` coordinates. A hash chain of order `m` picks `m`
//! functions `j1 < ... < jm` and records their outputs; its bit encoding is
//!
//! ```text
//! j1 || ... || jm || h_j1(b) || ... || h_jm(b)
//! ```
//!
//! with each index written big-endian on `ceil(log2 L)` bits (0-based) and
//! each output on `w` bits.

pub mod combin;
mod file;
pub mod rates;

use rand::seq::index;

use crate::bits::BinaryTemplate;
use crate::error::{check_len, Error, Result};
use crate::rng::rng_from_seed;

pub use combin::{binomial, Combinations};
pub use file::{parse_family, write_family};
pub use rates::{collision_prob, far, frr, RateModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LshFamily {
    n: usize,
    width: usize,
    seed: u64,
    index_sets: Vec<Vec<usize>>,
}

impl LshFamily {
    /// Draws `count` functions of `width` coordinates each. Coordinates of
    /// one function are sampled without replacement and kept in sampled
    /// order; functions are drawn independently of each other.
    pub fn new(n: usize, count: usize, width: usize, seed: u64) -> Result<Self> {
        validate(n, count, width)?;
        let mut rng = rng_from_seed(seed);
        let index_sets = (0..count)
            .map(|_| index::sample(&mut rng, n, width).into_vec())
            .collect();
        Ok(LshFamily {
            n,
            width,
            seed,
            index_sets,
        })
    }

    /// A family with explicit index sets; `seed` is recorded but not used.
    pub fn from_index_sets(
        n: usize,
        width: usize,
        seed: u64,
        index_sets: Vec<Vec<usize>>,
    ) -> Result<Self> {
        validate(n, index_sets.len(), width)?;
        for (i, set) in index_sets.iter().enumerate() {
            if set.len() != width {
                return Err(Error::param(format!(
                    "function {i} has {} indices, expected {width}",
                    set.len()
                )));
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != width || sorted.last().is_some_and(|&x| x >= n) {
                return Err(Error::param(format!(
                    "function {i} needs {width} distinct indices below {n}"
                )));
            }
        }
        Ok(LshFamily {
            n,
            width,
            seed,
            index_sets,
        })
    }

    /// True iff the index sets are the ones `seed` generates.
    pub fn is_reproducible(&self) -> bool {
        LshFamily::new(self.n, self.count(), self.width, self.seed).is_ok_and(|f| f == *self)
    }

    /// Template length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of functions, `L`.
    pub fn count(&self) -> usize {
        self.index_sets.len()
    }

    /// Output width of each function, `w`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    /// Bits used to encode one function index: `ceil(log2 L)`.
    pub fn index_bits(&self) -> usize {
        index_bits(self.count())
    }

    /// Encoded length of an order-`m` chain.
    pub fn chain_length(&self, m: usize) -> usize {
        m * (self.index_bits() + self.width)
    }

    pub fn apply(&self, i: usize, b: &BinaryTemplate) -> Result<BinaryTemplate> {
        check_len(self.n, b.len())?;
        let set = self.index_sets.get(i).ok_or_else(|| {
            Error::param(format!(
                "function index {i} out of range for L = {}",
                self.count()
            ))
        })?;
        Ok(BinaryTemplate::from_bits(set.iter().map(|&c| b.get(c))))
    }

    /// Outputs of every function on `b`.
    pub fn project_all(&self, b: &BinaryTemplate) -> Result<Vec<BinaryTemplate>> {
        check_len(self.n, b.len())?;
        Ok(self
            .index_sets
            .iter()
            .map(|set| BinaryTemplate::from_bits(set.iter().map(|&c| b.get(c))))
            .collect())
    }

    /// Function indices on which `a` and `b` produce the same output.
    pub fn agreements(&self, a: &BinaryTemplate, b: &BinaryTemplate) -> Result<Vec<usize>> {
        check_len(self.n, a.len())?;
        check_len(self.n, b.len())?;
        Ok((0..self.count())
            .filter(|&i| self.index_sets[i].iter().all(|&c| a.get(c) == b.get(c)))
            .collect())
    }

    /// Streams all `C(L, m)` order-`m` chains of `b` in lexicographic order
    /// of their index combinations.
    pub fn chains(&self, m: usize, b: &BinaryTemplate) -> Result<ChainIter> {
        self.check_order(m)?;
        Ok(ChainIter {
            projections: self.project_all(b)?,
            combos: Combinations::new(self.count(), m),
        })
    }

    /// Streams the encoded chains of `b` together with their combinations.
    pub fn encoded_chains(&self, m: usize, b: &BinaryTemplate) -> Result<EncodedChains> {
        self.check_order(m)?;
        let projections = self.project_all(b)?;
        let index_bits = self.index_bits();
        let prefixes = (0..self.count())
            .map(|j| BinaryTemplate::from_uint(j as u64, index_bits))
            .collect();
        Ok(EncodedChains {
            prefixes,
            projections,
            combos: Combinations::new(self.count(), m),
            length: self.chain_length(m),
        })
    }

    pub fn check_order(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.count() {
            return Err(Error::param(format!(
                "chain order {m} outside [1, {}]",
                self.count()
            )));
        }
        Ok(())
    }

    pub fn encode_chain(&self, chain: &HashChain) -> Result<BinaryTemplate> {
        encode_chain(chain, self.count(), self.width)
    }

    pub fn decode_chain(&self, bits: &BinaryTemplate, m: usize) -> Result<HashChain> {
        decode_chain(bits, self.count(), self.width, m)
    }
}

fn validate(n: usize, count: usize, width: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::param("family needs at least one function"));
    }
    if width == 0 || width > n {
        return Err(Error::param(format!(
            "projection width {width} outside [1, {n}]"
        )));
    }
    Ok(())
}

/// `ceil(log2 count)`, with a single function needing no index bits.
pub fn index_bits(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

/// `m` strictly increasing function indices and their outputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashChain {
    pub indices: Vec<usize>,
    pub values: Vec<BinaryTemplate>,
}

impl HashChain {
    pub fn order(&self) -> usize {
        self.indices.len()
    }
}

pub fn encode_chain(chain: &HashChain, count: usize, width: usize) -> Result<BinaryTemplate> {
    let m = chain.order();
    if m == 0 || chain.values.len() != m {
        return Err(Error::param(
            "chain needs as many values as indices, at least one",
        ));
    }
    if chain.indices.windows(2).any(|w| w[0] >= w[1]) || chain.indices[m - 1] >= count {
        return Err(Error::param(format!(
            "chain indices must increase strictly below {count}"
        )));
    }
    let bits = index_bits(count);
    let mut out = BinaryTemplate::with_capacity(m * (bits + width));
    for &j in &chain.indices {
        out.push_uint(j as u64, bits);
    }
    for v in &chain.values {
        check_len(width, v.len())?;
        out.extend_from(v);
    }
    Ok(out)
}

pub fn decode_chain(
    bits: &BinaryTemplate,
    count: usize,
    width: usize,
    m: usize,
) -> Result<HashChain> {
    let ib = index_bits(count);
    check_len(m * (ib + width), bits.len())?;
    let indices: Vec<usize> = (0..m)
        .map(|t| bits.read_uint(t * ib, ib) as usize)
        .collect();
    let values = (0..m)
        .map(|t| bits.slice(m * ib + t * width, width))
        .collect();
    let chain = HashChain { indices, values };
    // re-encoding validates ordering and range
    encode_chain(&chain, count, width)?;
    Ok(chain)
}

pub struct ChainIter {
    projections: Vec<BinaryTemplate>,
    combos: Combinations,
}

impl Iterator for ChainIter {
    type Item = HashChain;

    fn next(&mut self) -> Option<HashChain> {
        let indices = self.combos.next()?;
        let values = indices
            .iter()
            .map(|&j| self.projections[j].clone())
            .collect();
        Some(HashChain { indices, values })
    }
}

/// Like [`ChainIter`] but yields `(combination, encoded chain)` directly.
pub struct EncodedChains {
    prefixes: Vec<BinaryTemplate>,
    projections: Vec<BinaryTemplate>,
    combos: Combinations,
    length: usize,
}

impl Iterator for EncodedChains {
    type Item = (Vec<usize>, BinaryTemplate);

    fn next(&mut self) -> Option<Self::Item> {
        let indices = self.combos.next()?;
        let mut z = BinaryTemplate::with_capacity(self.length);
        for &j in &indices {
            z.extend_from(&self.prefixes[j]);
        }
        for &j in &indices {
            z.extend_from(&self.projections[j]);
        }
        Some((indices, z))
    }
}
