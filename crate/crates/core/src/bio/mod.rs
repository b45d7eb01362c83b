//! Biometric negative databases.
//!
//! The positive set is `U`, every encoded order-`m` hash chain of every
//! enrolled template. A fresh capture is accepted when at least one of its
//! own chains lies in `U`, i.e. is NOT matched by any entry of the negative
//! database. That is the m-of-L rule: the capture agrees with some enrolled
//! template on all `m` functions of at least one combination.

mod auth;
mod predict;
mod sidecar;

use std::fmt;

use crate::bits::BinaryTemplate;
use crate::error::{check_len, Error, Result};
use crate::lsh::combin::{binomial, rank};
use crate::lsh::LshFamily;
use crate::ndb::{default_split_budget, NegativeDatabase};

pub use auth::AuthNdb;
pub use predict::{expansion_factor, log2_big, predicted_rates, size_bound, SystemRates};
pub use sidecar::Sidecar;

/// Default cap on the number of chains a build or enrollment may materialize.
pub const DEFAULT_CHAIN_BUDGET: u64 = 1_000_000;

/// Which negative-database construction to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Deterministic,
    Randomized,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Deterministic => "deterministic",
            Variant::Randomized => "randomized",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deterministic" => Ok(Variant::Deterministic),
            "randomized" => Ok(Variant::Randomized),
            other => Err(Error::param(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Largest number of chains one call may materialize.
    pub chain_budget: u64,
    /// Seed for the randomized builder.
    pub seed: u64,
    /// Random splits for the randomized builder; `None` uses
    /// [`default_split_budget`].
    pub split_budget: Option<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            chain_budget: DEFAULT_CHAIN_BUDGET,
            seed: 0,
            split_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BioNdbParams {
    family: LshFamily,
    order: usize,
}

impl BioNdbParams {
    pub fn new(family: LshFamily, order: usize) -> Result<Self> {
        family.check_order(order)?;
        Ok(BioNdbParams { family, order })
    }

    pub fn family(&self) -> &LshFamily {
        &self.family
    }

    /// Chain order `m`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Record length of the chain space, `m * (ceil(log2 L) + w)`.
    pub fn chain_length(&self) -> usize {
        self.family.chain_length(self.order)
    }

    /// `C(L, m)`.
    pub fn chains_per_template(&self) -> u128 {
        binomial(self.family.count(), self.order).unwrap_or(u128::MAX)
    }

    fn check_budget(&self, templates: usize, budget: u64) -> Result<()> {
        let chains = self.chains_per_template().saturating_mul(templates as u128);
        if chains > budget as u128 {
            return Err(Error::Budget { chains, budget });
        }
        Ok(())
    }

    /// Encoded chains of all `templates`, sorted and deduplicated.
    pub fn chain_set(&self, templates: &[BinaryTemplate]) -> Result<Vec<BinaryTemplate>> {
        let mut u = Vec::new();
        for b in templates {
            u.extend(self.family.encoded_chains(self.order, b)?.map(|(_, z)| z));
        }
        u.sort();
        u.dedup();
        Ok(u)
    }

    /// First combination, in lexicographic order, whose encoded chain for `b`
    /// satisfies `in_positive_set`.
    fn scan(
        &self,
        b: &BinaryTemplate,
        mut in_positive_set: impl FnMut(&BinaryTemplate) -> bool,
    ) -> Result<Decision> {
        check_len(self.family.n(), b.len())?;
        let mut tested = 0u128;
        for (combo, z) in self.family.encoded_chains(self.order, b)? {
            tested += 1;
            if in_positive_set(&z) {
                return Ok(Decision::accept(combo, tested));
            }
        }
        Ok(Decision::reject(tested))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

/// Outcome of a check, with the accepting combination when there is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<Vec<usize>>,
    pub combinations_tested: u128,
}

impl Decision {
    fn accept(witness: Vec<usize>, tested: u128) -> Self {
        Decision {
            verdict: Verdict::Accept,
            witness: Some(witness),
            combinations_tested: tested,
        }
    }

    fn reject(tested: u128) -> Self {
        Decision {
            verdict: Verdict::Reject,
            witness: None,
            combinations_tested: tested,
        }
    }

    pub fn is_accept(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

/// Line-oriented form: `ACCEPT j1,...,jm` or `REJECT`.
impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => {
                let w: Vec<String> = w.iter().map(ToString::to_string).collect();
                write!(f, "ACCEPT {}", w.join(","))
            }
            None => f.write_str("REJECT"),
        }
    }
}

/// Negative representation of the chain set of an enrolled population, for
/// anonymous authorization checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BioNdb {
    params: BioNdbParams,
    ndb: NegativeDatabase,
    enrolled_count: u64,
    variant: Variant,
}

impl BioNdb {
    pub fn build(
        params: BioNdbParams,
        templates: &[BinaryTemplate],
        variant: Variant,
        options: &BuildOptions,
    ) -> Result<Self> {
        params.check_budget(templates.len(), options.chain_budget)?;
        let u = params.chain_set(templates)?;
        let l = params.chain_length();
        let (ndb, _) = match variant {
            Variant::Deterministic => NegativeDatabase::build_prefix(&u, l)?,
            Variant::Randomized => {
                let splits = options
                    .split_budget
                    .unwrap_or_else(|| default_split_budget(l, u.len()));
                NegativeDatabase::build_randomized_prefix(&u, l, options.seed, splits)?
            }
        };
        Ok(BioNdb {
            params,
            ndb,
            enrolled_count: templates.len() as u64,
            variant,
        })
    }

    /// A database with nobody enrolled; it rejects every capture.
    pub fn empty(params: BioNdbParams, variant: Variant) -> Result<Self> {
        Self::build(params, &[], variant, &BuildOptions::default())
    }

    pub fn from_parts(
        params: BioNdbParams,
        ndb: NegativeDatabase,
        enrolled_count: u64,
        variant: Variant,
    ) -> Result<Self> {
        check_len(params.chain_length(), ndb.record_length())?;
        Ok(BioNdb {
            params,
            ndb,
            enrolled_count,
            variant,
        })
    }

    pub fn params(&self) -> &BioNdbParams {
        &self.params
    }

    pub fn ndb(&self) -> &NegativeDatabase {
        &self.ndb
    }

    /// Mutable access for maintenance passes (cleanup, morph) that keep the
    /// represented set unchanged.
    pub fn ndb_mut(&mut self) -> &mut NegativeDatabase {
        &mut self.ndb
    }

    pub fn enrolled_count(&self) -> u64 {
        self.enrolled_count
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar::describe(&self.params, self.variant, self.enrolled_count)
    }

    /// Accepts at the first combination whose chain is in the positive set.
    pub fn authorize(&self, b: &BinaryTemplate) -> Result<Decision> {
        self.params
            .scan(b, |z| !self.ndb.is_member(z).expect("chain length checked"))
    }

    /// Adds every chain of `b` to the positive set.
    pub fn enroll(&mut self, b: &BinaryTemplate, chain_budget: u64) -> Result<()> {
        self.params.check_budget(1, chain_budget)?;
        for (_, z) in self.params.family.encoded_chains(self.params.order, b)? {
            self.ndb.insert_positive(&z)?;
        }
        self.enrolled_count += 1;
        Ok(())
    }

    fn check_same_params(&self, other: &BioNdb) -> Result<()> {
        if self.params != other.params {
            return Err(Error::Config(
                "blacklist parameters differ from the main database".into(),
            ));
        }
        Ok(())
    }
}

/// Blacklists the chains of capture `b`.
pub fn revoke(blacklist: &mut BioNdb, b: &BinaryTemplate, chain_budget: u64) -> Result<()> {
    blacklist.enroll(b, chain_budget)
}

/// Accepts iff `main` accepts and `blacklist` rejects.
pub fn decide_with_blacklist(
    main: &BioNdb,
    blacklist: &BioNdb,
    b: &BinaryTemplate,
) -> Result<Decision> {
    main.check_same_params(blacklist)?;
    let granted = main.authorize(b)?;
    if !granted.is_accept() {
        return Ok(granted);
    }
    let banned = blacklist.authorize(b)?;
    if banned.is_accept() {
        return Ok(Decision::reject(
            granted.combinations_tested + banned.combinations_tested,
        ));
    }
    Ok(granted)
}

/// Direct m-of-L rule on the plain templates: accept iff some template
/// agrees with `b` on at least `m` functions. The reported witness and
/// combination count are those a lexicographic chain scan would produce.
pub fn oracle_authorize(
    templates: &[BinaryTemplate],
    family: &LshFamily,
    m: usize,
    b: &BinaryTemplate,
) -> Result<Decision> {
    family.check_order(m)?;
    check_len(family.n(), b.len())?;
    let mut best: Option<Vec<usize>> = None;
    for t in templates {
        let agree = family.agreements(t, b)?;
        if agree.len() >= m {
            let candidate = agree[..m].to_vec();
            if best.as_ref().is_none_or(|cur| candidate < *cur) {
                best = Some(candidate);
            }
        }
    }
    let l = family.count();
    Ok(match best {
        Some(w) => {
            let tested = rank(&w, l) + 1;
            Decision::accept(w, tested)
        }
        None => Decision::reject(binomial(l, m).unwrap_or(u128::MAX)),
    })
}
