//! `NDB v1` text format.
//!
//! ```text
//! NDB v1 l=<record_length> tagged=<0|1>
//! <pattern>[\t<tag>]
//! ...
//! ```
//!
//! One entry per line, LF-terminated. Entries are written in canonical
//! order; tagged files are grouped by ascending tag.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::NegativeDatabase;
use crate::bits::TriPattern;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NdbDocument {
    Untagged(NegativeDatabase),
    Tagged {
        record_length: usize,
        users: BTreeMap<u64, NegativeDatabase>,
    },
}

impl NdbDocument {
    pub fn record_length(&self) -> usize {
        match self {
            NdbDocument::Untagged(ndb) => ndb.record_length(),
            NdbDocument::Tagged { record_length, .. } => *record_length,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            NdbDocument::Untagged(ndb) => write_ndb(ndb),
            NdbDocument::Tagged {
                record_length,
                users,
            } => write_tagged_ndb(*record_length, users.iter().map(|(k, v)| (*k, v))),
        }
    }
}

pub fn write_ndb(ndb: &NegativeDatabase) -> String {
    let mut out = format!("NDB v1 l={} tagged=0\n", ndb.record_length());
    for p in ndb.entries() {
        let _ = writeln!(out, "{p}");
    }
    out
}

pub fn write_tagged_ndb<'a, I>(record_length: usize, users: I) -> String
where
    I: IntoIterator<Item = (u64, &'a NegativeDatabase)>,
{
    let mut users: Vec<_> = users.into_iter().collect();
    users.sort_by_key(|(k, _)| *k);
    let mut out = format!("NDB v1 l={record_length} tagged=1\n");
    for (tag, ndb) in users {
        for p in ndb.entries() {
            let _ = writeln!(out, "{p}\t{tag}");
        }
    }
    out
}

fn parse_header(line: &str) -> Result<(usize, bool)> {
    let bad = || {
        Error::parse(
            1,
            format!("expected `NDB v1 l=<l> tagged=<0|1>`, found {line:?}"),
        )
    };
    let rest = line.strip_prefix("NDB v1 l=").ok_or_else(bad)?;
    let (l, tagged) = rest.split_once(" tagged=").ok_or_else(bad)?;
    let l: usize = l.parse().map_err(|_| bad())?;
    if l == 0 {
        return Err(Error::parse(1, "record length must be positive"));
    }
    let tagged = match tagged {
        "0" => false,
        "1" => true,
        _ => return Err(bad()),
    };
    Ok((l, tagged))
}

pub fn parse_ndb(text: &str) -> Result<NdbDocument> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::parse(0, "file must end with a newline"))?;
    let mut lines = body.split('\n');
    let (l, tagged) = parse_header(lines.next().unwrap_or(""))?;

    let mut plain = Vec::new();
    let mut by_tag: BTreeMap<u64, Vec<TriPattern>> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let (pattern, tag) = match (tagged, line.split_once('\t')) {
            (false, None) => (line, None),
            (true, Some((p, t))) => {
                let tag = t
                    .parse::<u64>()
                    .ok()
                    .filter(|_| t.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| Error::parse(lineno, format!("invalid tag {t:?}")))?;
                (p, Some(tag))
            }
            (false, Some(_)) => return Err(Error::parse(lineno, "tag present in untagged file")),
            (true, None) => return Err(Error::parse(lineno, "missing tag")),
        };
        let p: TriPattern = pattern
            .parse()
            .map_err(|e| Error::parse(lineno, format!("{e}")))?;
        if p.len() != l {
            return Err(Error::parse(
                lineno,
                format!("entry has length {}, header says {l}", p.len()),
            ));
        }
        match tag {
            Some(k) => by_tag.entry(k).or_default().push(p),
            None => plain.push(p),
        }
    }

    if tagged {
        let users = by_tag
            .into_iter()
            .map(|(k, ps)| Ok((k, NegativeDatabase::from_patterns(l, ps)?)))
            .collect::<Result<_>>()?;
        Ok(NdbDocument::Tagged {
            record_length: l,
            users,
        })
    } else {
        Ok(NdbDocument::Untagged(NegativeDatabase::from_patterns(
            l, plain,
        )?))
    }
}
