use std::collections::BTreeMap;

use super::{BioNdbParams, BuildOptions, Decision, Variant};
use crate::bits::BinaryTemplate;
use crate::error::{check_len, Error, Result};
use crate::ndb::{default_split_budget, NegativeDatabase};
use crate::rng::derive_seed;

const USER_SEED_DOMAIN: u64 = 0x5553_4552;

/// One randomized negative database per enrolled user, keyed by a 0-based
/// user index. Authentication checks the claimed user only; identification
/// checks every user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthNdb {
    params: BioNdbParams,
    users: BTreeMap<u64, NegativeDatabase>,
}

impl AuthNdb {
    /// Enrolls `templates[k]` as user `k`.
    pub fn build(
        params: BioNdbParams,
        templates: &[BinaryTemplate],
        options: &BuildOptions,
    ) -> Result<Self> {
        let mut db = AuthNdb {
            params,
            users: BTreeMap::new(),
        };
        for b in templates {
            db.enroll(b, options)?;
        }
        Ok(db)
    }

    pub fn from_parts(
        params: BioNdbParams,
        users: BTreeMap<u64, NegativeDatabase>,
    ) -> Result<Self> {
        for ndb in users.values() {
            check_len(params.chain_length(), ndb.record_length())?;
        }
        Ok(AuthNdb { params, users })
    }

    pub fn params(&self) -> &BioNdbParams {
        &self.params
    }

    pub fn users(&self) -> &BTreeMap<u64, NegativeDatabase> {
        &self.users
    }

    pub fn users_mut(&mut self) -> impl Iterator<Item = (&u64, &mut NegativeDatabase)> {
        self.users.iter_mut()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn sidecar(&self) -> super::Sidecar {
        super::Sidecar::describe(&self.params, Variant::Randomized, self.users.len() as u64)
    }

    /// Adds `b` as a new user and returns its index. The user's database is
    /// built with the randomized construction, seeded from `options.seed`
    /// and the index.
    pub fn enroll(&mut self, b: &BinaryTemplate, options: &BuildOptions) -> Result<u64> {
        self.params.check_budget(1, options.chain_budget)?;
        let user = self.users.keys().next_back().map_or(0, |k| k + 1);
        let u = self.params.chain_set(std::slice::from_ref(b))?;
        let l = self.params.chain_length();
        let splits = options
            .split_budget
            .unwrap_or_else(|| default_split_budget(l, u.len()));
        let seed = derive_seed(options.seed, USER_SEED_DOMAIN, user);
        let (ndb, _) = NegativeDatabase::build_randomized_prefix(&u, l, seed, splits)?;
        self.users.insert(user, ndb);
        Ok(user)
    }

    pub fn authenticate(&self, b: &BinaryTemplate, claim: u64) -> Result<Decision> {
        let ndb = self.users.get(&claim).ok_or(Error::UnknownClaim(claim))?;
        self.params
            .scan(b, |z| !ndb.is_member(z).expect("chain length checked"))
    }

    /// Users whose database accepts `b`, ascending.
    pub fn identify(&self, b: &BinaryTemplate) -> Result<Vec<u64>> {
        let mut hits = Vec::new();
        for &user in self.users.keys() {
            if self.authenticate(b, user)?.is_accept() {
                hits.push(user);
            }
        }
        Ok(hits)
    }
}
