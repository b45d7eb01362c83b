//! Parameter sidecar stored next to a biometric negative database.
//!
//! ```text
//! n=<n>
//! L=<L>
//! w=<w>
//! seed=<seed>
//! m=<m>
//! variant=<deterministic|randomized>
//! enrolled_count=<N>
//! ```

use super::{BioNdbParams, Variant};
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::lsh::LshFamily;

const KEYS: [&str; 7] = ["n", "L", "w", "seed", "m", "variant", "enrolled_count"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sidecar {
    pub n: usize,
    pub l_count: usize,
    pub w: usize,
    pub seed: u64,
    pub m: usize,
    pub variant: Variant,
    pub enrolled_count: u64,
}

impl Sidecar {
    pub fn describe(params: &BioNdbParams, variant: Variant, enrolled_count: u64) -> Self {
        let f = params.family();
        Sidecar {
            n: f.n(),
            l_count: f.count(),
            w: f.width(),
            seed: f.seed(),
            m: params.order(),
            variant,
            enrolled_count,
        }
    }

    /// Regenerates the family from its seed.
    pub fn params(&self) -> Result<BioNdbParams> {
        BioNdbParams::new(
            LshFamily::new(self.n, self.l_count, self.w, self.seed)?,
            self.m,
        )
    }

    /// Fails if `params` was not generated by this sidecar's settings.
    pub fn check_params(&self, params: &BioNdbParams) -> Result<()> {
        let mine = Sidecar::describe(params, self.variant, self.enrolled_count);
        if mine != *self || !params.family().is_reproducible() {
            return Err(Error::Config(
                "family does not match the database parameters".into(),
            ));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut kv = KeyValues::new();
        kv.push("n", self.n)
            .push("L", self.l_count)
            .push("w", self.w)
            .push("seed", self.seed)
            .push("m", self.m)
            .push("variant", self.variant)
            .push("enrolled_count", self.enrolled_count);
        kv.to_text()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        kv.only(&KEYS)?;
        Ok(Sidecar {
            n: kv.require("n")?,
            l_count: kv.require("L")?,
            w: kv.require("w")?,
            seed: kv.require("seed")?,
            m: kv.require("m")?,
            variant: kv.require("variant")?,
            enrolled_count: kv.require("enrolled_count")?,
        })
    }
}
