//! Negative databases over `{0,1}^l`.
//!
//! A [`NegativeDatabase`] stores a set of [`TriPattern`] entries; the strings
//! it represents are the union of their covers, and the positive set it
//! stands for is everything else. A string `x` is in the positive set iff no
//! entry matches it.

mod file;
mod trie;

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::bits::{BinaryTemplate, Symbol, TriPattern};
use crate::error::{check_len, Error, Result};
use crate::rng::rng_from_seed;

pub use file::{parse_ndb, write_ndb, write_tagged_ndb, NdbDocument};
use trie::PatternTrie;

/// Largest record length [`NegativeDatabase::represented_complement`] will enumerate.
pub const ENUMERATION_LIMIT: usize = 24;

/// Size accounting for a built or maintained database.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildReport {
    pub entry_count: usize,
    /// `entry_count * record_length`
    pub symbol_count: usize,
    /// Two bits per tri-valued symbol.
    pub bit_size: usize,
    pub elapsed: Duration,
}

impl BuildReport {
    fn of(ndb: &NegativeDatabase, started: Instant) -> Self {
        let symbol_count = ndb.len() * ndb.record_length;
        BuildReport {
            entry_count: ndb.len(),
            symbol_count,
            bit_size: 2 * symbol_count,
            elapsed: started.elapsed(),
        }
    }
}

#[derive(Clone)]
pub struct NegativeDatabase {
    record_length: usize,
    entries: PatternTrie,
}

impl NegativeDatabase {
    /// The empty database of record length `l`; it represents nothing, so
    /// its positive set is all of `{0,1}^l`.
    pub fn new(record_length: usize) -> Result<Self> {
        if record_length == 0 {
            return Err(Error::param("record length must be positive"));
        }
        Ok(NegativeDatabase {
            record_length,
            entries: PatternTrie::new(record_length),
        })
    }

    pub fn from_patterns<I>(record_length: usize, patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = TriPattern>,
    {
        let mut ndb = Self::new(record_length)?;
        for p in patterns {
            check_len(record_length, p.len())?;
            ndb.entries.insert(&p);
        }
        Ok(ndb)
    }

    /// Negative representation of `db` by the prefix method: for every
    /// prefix `w` of some record and every bit `c` such that `w || c` is not
    /// a prefix of any record, emit `w || c` padded with wildcards.
    ///
    /// The round-0 prefix set is the empty prefix, so an empty `db` yields
    /// the two one-bit patterns `0*..*` and `1*..*`.
    pub fn build_prefix(
        db: &[BinaryTemplate],
        record_length: usize,
    ) -> Result<(Self, BuildReport)> {
        let started = Instant::now();
        let mut ndb = Self::new(record_length)?;
        for p in prefix_patterns(db, record_length)? {
            ndb.entries.insert(&p);
        }
        let report = BuildReport::of(&ndb, started);
        Ok((ndb, report))
    }

    /// Randomized prefix construction: positions are shuffled before the
    /// prefix method runs and restored afterwards, so wildcards land
    /// anywhere; then up to `split_budget` random wildcards are replaced by
    /// both of their values.
    pub fn build_randomized_prefix(
        db: &[BinaryTemplate],
        record_length: usize,
        seed: u64,
        split_budget: usize,
    ) -> Result<(Self, BuildReport)> {
        let started = Instant::now();
        if record_length == 0 {
            return Err(Error::param("record length must be positive"));
        }
        let mut rng = rng_from_seed(seed);
        let mut perm: Vec<usize> = (0..record_length).collect();
        perm.shuffle(&mut rng);

        let mut permuted = Vec::with_capacity(db.len());
        for x in db {
            check_len(record_length, x.len())?;
            permuted.push(x.permuted(&perm));
        }
        let base: Vec<TriPattern> = prefix_patterns(&permuted, record_length)?
            .into_iter()
            .map(|p| p.unpermuted(&perm))
            .collect();

        let (mut open, mut done): (Vec<_>, Vec<_>) = base.into_iter().partition(|p| !p.is_exact());
        for _ in 0..split_budget {
            if open.is_empty() {
                break;
            }
            let entry = open.swap_remove(rng.gen_range(0..open.len()));
            let wild: Vec<usize> = entry.wildcard_positions().collect();
            let pos = wild[rng.gen_range(0..wild.len())];
            let (zero, one) = entry.split(pos).expect("position is a wildcard");
            for child in [zero, one] {
                if child.is_exact() {
                    done.push(child);
                } else {
                    open.push(child);
                }
            }
        }
        let ndb = Self::from_patterns(record_length, open.into_iter().chain(done))?;
        let report = BuildReport::of(&ndb, started);
        Ok((ndb, report))
    }

    #[inline]
    pub fn record_length(&self) -> usize {
        self.record_length
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries in canonical order (`0 < 1 < *`, leftmost symbol first).
    pub fn entries(&self) -> Vec<TriPattern> {
        self.entries.patterns()
    }

    pub fn contains_entry(&self, p: &TriPattern) -> bool {
        p.len() == self.record_length && self.entries.contains(p)
    }

    pub fn report(&self) -> BuildReport {
        BuildReport::of(self, Instant::now())
    }

    /// True iff some entry matches `x`, i.e. `x` is NOT in the positive set.
    pub fn is_member(&self, x: &BinaryTemplate) -> Result<bool> {
        check_len(self.record_length, x.len())?;
        Ok(self.entries.any_match(x))
    }

    /// Reference implementation of [`Self::is_member`] by linear scan.
    pub fn is_member_linear(&self, x: &BinaryTemplate) -> Result<bool> {
        check_len(self.record_length, x.len())?;
        Ok(self.entries().iter().any(|p| p.matches_unchecked(x)))
    }

    /// Adds `x` to the positive set by carving it out of every entry that
    /// matches it. Each such entry `y` is replaced by the patterns that fix
    /// its wildcards `j1 < j2 < ...` one at a time: the t-th copies `x` on
    /// `j1..j(t-1)` and the complement of `x` on `jt`.
    ///
    /// Returns false when `x` was already positive.
    pub fn insert_positive(&mut self, x: &BinaryTemplate) -> Result<bool> {
        check_len(self.record_length, x.len())?;
        let hits = self.entries.matching(x);
        if hits.is_empty() {
            return Ok(false);
        }
        for y in &hits {
            self.entries.remove(y);
        }
        for y in hits {
            let mut prefix = y.clone();
            for j in y.wildcard_positions() {
                let mut piece = prefix.clone();
                piece.set(j, Symbol::from_bit(!x.get(j)));
                self.entries.insert(&piece);
                prefix.set(j, Symbol::from_bit(x.get(j)));
            }
        }
        Ok(true)
    }

    /// Removes `x` from the positive set by appending the exact pattern `x`.
    /// Returns false when `x` was already represented.
    pub fn delete_positive(&mut self, x: &BinaryTemplate) -> Result<bool> {
        if self.is_member(x)? {
            return Ok(false);
        }
        Ok(self.entries.insert(&TriPattern::exact(x)))
    }

    /// Drops every entry whose cover lies inside another entry's cover.
    pub fn cleanup(&mut self) -> BuildReport {
        let started = Instant::now();
        let redundant: Vec<TriPattern> = self
            .entries
            .patterns()
            .into_iter()
            .filter(|q| self.entries.generalizations(q).len() > 1)
            .collect();
        for q in &redundant {
            self.entries.remove(q);
        }
        self.entries = self.entries.compacted();
        BuildReport::of(self, started)
    }

    /// Applies `rounds` cover-preserving rewrites, each drawn uniformly
    /// among the applicable splits (one wildcard of one entry replaced by
    /// both values) and merges (two entries differing only by 0/1 at one
    /// position joined under a wildcard). Rounds with nothing applicable are
    /// no-ops. Returns the number of rewrites performed.
    pub fn morph(&mut self, seed: u64, rounds: usize) -> usize {
        let mut rng = rng_from_seed(seed);
        let mut work = WorkingSet::new(self.entries.patterns());
        let l = self.record_length;
        let mut applied = 0;
        for _ in 0..rounds {
            if work.items.is_empty() || (work.wildcards == 0 && !work.any_merge()) {
                continue;
            }
            loop {
                let i = rng.gen_range(0..work.items.len());
                let pos = rng.gen_range(0..l);
                let entry = work.items[i].clone();
                match entry.get(pos) {
                    Symbol::Wild => {
                        let (zero, one) = entry.split(pos).expect("wildcard");
                        work.remove(&entry);
                        work.insert(zero);
                        work.insert(one);
                        break;
                    }
                    Symbol::Zero => {
                        let mut sibling = entry.clone();
                        sibling.set(pos, Symbol::One);
                        if work.contains(&sibling) {
                            let merged = entry.merge(&sibling).expect("siblings merge");
                            work.remove(&entry);
                            work.remove(&sibling);
                            work.insert(merged);
                            break;
                        }
                    }
                    Symbol::One => {}
                }
            }
            applied += 1;
        }
        let mut trie = PatternTrie::new(l);
        for p in &work.items {
            trie.insert(p);
        }
        self.entries = trie;
        applied
    }

    /// The positive set, recovered by enumerating `{0,1}^l`.
    pub fn represented_complement(&self) -> Result<Vec<BinaryTemplate>> {
        if self.record_length > ENUMERATION_LIMIT {
            return Err(Error::Guardrail {
                record_length: self.record_length,
                limit: ENUMERATION_LIMIT,
            });
        }
        let l = self.record_length;
        Ok((0u64..1 << l)
            .map(|v| BinaryTemplate::from_uint(v, l))
            .filter(|x| !self.entries.any_match(x))
            .collect())
    }
}

impl PartialEq for NegativeDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.record_length == other.record_length && self.entries() == other.entries()
    }
}

impl Eq for NegativeDatabase {}

impl fmt::Debug for NegativeDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.entries().iter().map(ToString::to_string).collect();
        f.debug_struct("NegativeDatabase")
            .field("record_length", &self.record_length)
            .field("entries", &entries)
            .finish()
    }
}

/// Default number of random splits for the randomized builder: keeps the
/// entry count at most `records * l^2`.
pub fn default_split_budget(record_length: usize, records: usize) -> usize {
    record_length * records * record_length.saturating_sub(1)
}

fn prefix_patterns(db: &[BinaryTemplate], record_length: usize) -> Result<Vec<TriPattern>> {
    if record_length == 0 {
        return Err(Error::param("record length must be positive"));
    }
    for x in db {
        check_len(record_length, x.len())?;
    }
    let mut sorted = db.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(record_length);
    emit_prefixes(&sorted, record_length, &mut prefix, &mut out);
    Ok(out)
}

/// `records` is sorted and shares `prefix`; it is non-empty except at the root.
fn emit_prefixes(
    records: &[BinaryTemplate],
    l: usize,
    prefix: &mut Vec<bool>,
    out: &mut Vec<TriPattern>,
) {
    let depth = prefix.len();
    if depth == l {
        return;
    }
    let split = records.partition_point(|x| !x.get(depth));
    for (bit, part) in [(false, &records[..split]), (true, &records[split..])] {
        prefix.push(bit);
        if part.is_empty() {
            let w = BinaryTemplate::from_bits(prefix.iter().copied());
            out.push(TriPattern::padded_prefix(&w, l));
        } else {
            emit_prefixes(part, l, prefix, out);
        }
        prefix.pop();
    }
}

/// Entry set with O(1) random access, used while morphing.
struct WorkingSet {
    items: Vec<TriPattern>,
    slot: HashMap<TriPattern, usize>,
    wildcards: usize,
}

impl WorkingSet {
    fn new(items: Vec<TriPattern>) -> Self {
        let slot = items
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let wildcards = items.iter().map(TriPattern::wildcard_count).sum();
        WorkingSet {
            items,
            slot,
            wildcards,
        }
    }

    fn contains(&self, p: &TriPattern) -> bool {
        self.slot.contains_key(p)
    }

    fn insert(&mut self, p: TriPattern) {
        if self.slot.contains_key(&p) {
            return;
        }
        self.wildcards += p.wildcard_count();
        self.slot.insert(p.clone(), self.items.len());
        self.items.push(p);
    }

    fn remove(&mut self, p: &TriPattern) {
        let Some(i) = self.slot.remove(p) else { return };
        self.wildcards -= p.wildcard_count();
        self.items.swap_remove(i);
        if i < self.items.len() {
            self.slot.insert(self.items[i].clone(), i);
        }
    }

    fn any_merge(&self) -> bool {
        self.items.iter().any(|p| {
            (0..p.len()).any(|pos| {
                p.get(pos) == Symbol::Zero && {
                    let mut s = p.clone();
                    s.set(pos, Symbol::One);
                    self.contains(&s)
                }
            })
        })
    }
}
