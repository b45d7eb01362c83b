//! Fixed-length binary strings and tri-valued `{0, 1, *}` patterns.
//!
//! Both types are packed most-significant-bit first: position 0 is the
//! leftmost symbol of the textual form and lives in the top bit of the first
//! word. Numeric comparison of the packed words is therefore lexicographic
//! comparison of the strings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};

const WORD: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn mask_of(i: usize) -> u64 {
    1u64 << (WORD - 1 - i % WORD)
}

/// A fixed-length string of bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTemplate {
    len: usize,
    words: Vec<u64>,
}

impl BinaryTemplate {
    pub fn zeros(len: usize) -> Self {
        BinaryTemplate {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut t = Self::zeros(len);
        for i in 0..len {
            t.set(i, true);
        }
        t
    }

    /// An empty template, used as a growable buffer.
    pub fn with_capacity(bits: usize) -> Self {
        BinaryTemplate {
            len: 0,
            words: Vec::with_capacity(word_count(bits)),
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut t = Self::with_capacity(0);
        for b in bits {
            t.push(b);
        }
        t
    }

    /// Big-endian encoding of `value` on `width` bits. High bits of `value`
    /// beyond `width` are discarded.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let mut t = Self::with_capacity(width);
        t.push_uint(value, width);
        t
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] & mask_of(i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        if bit {
            self.words[i / WORD] |= mask_of(i);
        } else {
            self.words[i / WORD] &= !mask_of(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] ^= mask_of(i);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        if bit {
            self.words[(self.len - 1) / WORD] |= mask_of(self.len - 1);
        }
    }

    pub fn push_uint(&mut self, value: u64, width: usize) {
        for k in (0..width).rev() {
            self.push(k < 64 && (value >> k) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BinaryTemplate) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Reads `width` bits starting at `start` as a big-endian integer.
    pub fn read_uint(&self, start: usize, width: usize) -> u64 {
        assert!(width <= 64 && start + width <= self.len);
        (start..start + width).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    pub fn slice(&self, start: usize, width: usize) -> BinaryTemplate {
        assert!(start + width <= self.len);
        BinaryTemplate::from_bits((start..start + width).map(|i| self.get(i)))
    }

    /// Number of positions where the two templates differ.
    pub fn hamming_distance(&self, other: &BinaryTemplate) -> Result<usize> {
        check_len(self.len, other.len)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn complement(&self) -> BinaryTemplate {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `out[k] = self[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> BinaryTemplate {
        debug_assert_eq!(perm.len(), self.len);
        BinaryTemplate::from_bits(perm.iter().map(|&p| self.get(p)))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 << (WORD - rem);
            }
        }
    }
}

impl fmt::Display for BinaryTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTemplate({self})")
    }
}

impl FromStr for BinaryTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::param("empty binary string"));
        }
        let mut t = BinaryTemplate::with_capacity(s.len());
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => t.push(false),
                '1' => t.push(true),
                symbol => return Err(Error::InvalidSymbol { symbol, position }),
            }
        }
        Ok(t)
    }
}

/// One position of a [`TriPattern`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Wild,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Wild => '*',
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// A fixed-length string over `{0, 1, *}`.
///
/// Stored as a care mask (bit set where the symbol is fixed) and the fixed
/// values; value bits under a wildcard are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TriPattern {
    len: usize,
    care: Vec<u64>,
    value: Vec<u64>,
}

impl TriPattern {
    /// The all-wildcard pattern of length `len`.
    pub fn wildcards(len: usize) -> Self {
        TriPattern {
            len,
            care: vec![0; word_count(len)],
            value: vec![0; word_count(len)],
        }
    }

    /// The fully specified pattern matching exactly `x`.
    pub fn exact(x: &BinaryTemplate) -> Self {
        let mut care = vec![!0u64; word_count(x.len)];
        let rem = x.len % WORD;
        if rem != 0 {
            *care.last_mut().unwrap() = !0u64 << (WORD - rem);
        }
        TriPattern {
            len: x.len,
            care,
            value: x.words.clone(),
        }
    }

    /// `prefix` followed by wildcards up to `len`.
    pub fn padded_prefix(prefix: &BinaryTemplate, len: usize) -> Self {
        assert!(prefix.len() <= len);
        let mut p = Self::wildcards(len);
        for (i, b) in prefix.iter().enumerate() {
            p.set(i, Symbol::from_bit(b));
        }
        p
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        let mut p = Self::wildcards(symbols.len());
        for (i, s) in symbols.into_iter().enumerate() {
            p.set(i, s);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> Symbol {
        assert!(
            i < self.len,
            "symbol index {i} out of range for length {}",
            self.len
        );
        let m = mask_of(i);
        let w = i / WORD;
        if self.care[w] & m == 0 {
            Symbol::Wild
        } else if self.value[w] & m == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        assert!(
            i < self.len,
            "symbol index {i} out of range for length {}",
            self.len
        );
        let m = mask_of(i);
        let w = i / WORD;
        match s {
            Symbol::Wild => {
                self.care[w] &= !m;
                self.value[w] &= !m;
            }
            Symbol::Zero => {
                self.care[w] |= m;
                self.value[w] &= !m;
            }
            Symbol::One => {
                self.care[w] |= m;
                self.value[w] |= m;
            }
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn wildcard_count(&self) -> usize {
        self.len
            - self
                .care
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum::<usize>()
    }

    pub fn wildcard_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.care[i / WORD] & mask_of(i) == 0)
    }

    pub fn is_exact(&self) -> bool {
        self.wildcard_count() == 0
    }

    /// Number of binary strings matched: `2^(number of wildcards)`, or `None`
    /// when that does not fit in a `u128`.
    pub fn cover_size(&self) -> Option<u128> {
        1u128.checked_shl(self.wildcard_count() as u32)
    }

    /// True iff every position is a wildcard or equals the bit of `x`.
    pub fn matches(&self, x: &BinaryTemplate) -> Result<bool> {
        check_len(self.len, x.len())?;
        Ok(self.matches_unchecked(x))
    }

    #[inline]
    pub(crate) fn matches_unchecked(&self, x: &BinaryTemplate) -> bool {
        self.care
            .iter()
            .zip(&self.value)
            .zip(x.words())
            .all(|((c, v), b)| (v ^ b) & c == 0)
    }

    /// True iff the cover of `other` is contained in the cover of `self`.
    pub fn subsumes(&self, other: &TriPattern) -> Result<bool> {
        check_len(self.len, other.len)?;
        Ok(self
            .care
            .iter()
            .zip(&self.value)
            .zip(other.care.iter().zip(&other.value))
            .all(|((c, v), (oc, ov))| c & !oc == 0 && (v ^ ov) & c == 0))
    }

    /// Replaces the wildcard at `pos` by 0 and by 1. `None` if `pos` is fixed.
    pub fn split(&self, pos: usize) -> Option<(TriPattern, TriPattern)> {
        if self.get(pos) != Symbol::Wild {
            return None;
        }
        let mut zero = self.clone();
        zero.set(pos, Symbol::Zero);
        let mut one = self.clone();
        one.set(pos, Symbol::One);
        Some((zero, one))
    }

    /// The single pattern covering both `self` and `other`, when they are
    /// identical except at one position holding 0 in one and 1 in the other.
    pub fn merge(&self, other: &TriPattern) -> Option<TriPattern> {
        if self.len != other.len || self.care != other.care {
            return None;
        }
        let mut diff_pos = None;
        for (w, (a, b)) in self.value.iter().zip(&other.value).enumerate() {
            let d = a ^ b;
            match d.count_ones() {
                0 => {}
                1 if diff_pos.is_none() => diff_pos = Some(w * WORD + d.leading_zeros() as usize),
                _ => return None,
            }
        }
        let pos = diff_pos?;
        let mut merged = self.clone();
        merged.set(pos, Symbol::Wild);
        Some(merged)
    }

    /// Inverse of [`BinaryTemplate::permuted`]: `out[perm[k]] = self[k]`.
    pub fn unpermuted(&self, perm: &[usize]) -> TriPattern {
        debug_assert_eq!(perm.len(), self.len);
        let mut out = TriPattern::wildcards(self.len);
        for (k, &p) in perm.iter().enumerate() {
            out.set(p, self.get(k));
        }
        out
    }

    /// The binary string when the pattern has no wildcard.
    pub fn to_template(&self) -> Option<BinaryTemplate> {
        if self.is_exact() {
            Some(BinaryTemplate {
                len: self.len,
                words: self.value.clone(),
            })
        } else {
            None
        }
    }
}

/// Symbol-wise lexicographic order with `0 < 1 < *`.
impl Ord for TriPattern {
    fn cmp(&self, other: &Self) -> Ordering {
        let words = self.care.len().min(other.care.len());
        for w in 0..words {
            let (ca, va, cb, vb) = (self.care[w], self.value[w], other.care[w], other.value[w]);
            let diff = (ca ^ cb) | ((va ^ vb) & ca & cb);
            if diff != 0 {
                let i = w * WORD + diff.leading_zeros() as usize;
                if i < self.len.min(other.len) {
                    return self.get(i).cmp(&other.get(i));
                }
                break;
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for TriPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TriPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols().map(Symbol::as_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for TriPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriPattern({self})")
    }
}

impl FromStr for TriPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::param("empty pattern"));
        }
        let symbols = s
            .chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '*' => Ok(Symbol::Wild),
                symbol => Err(Error::InvalidSymbol { symbol, position }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TriPattern::from_symbols(symbols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> BinaryTemplate {
        s.parse().unwrap()
    }

    fn p(s: &str) -> TriPattern {
        s.parse().unwrap()
    }

    /// Brute-force expansion of a pattern into every string it stands for.
    fn expand(p: &TriPattern) -> Vec<BinaryTemplate> {
        let mut out = vec![BinaryTemplate::with_capacity(p.len())];
        for s in p.symbols() {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    let choices: &[bool] = match s {
                        Symbol::Zero => &[false],
                        Symbol::One => &[true],
                        Symbol::Wild => &[false, true],
                    };
                    choices.iter().map(move |&b| {
                        let mut x = prefix.clone();
                        x.push(b);
                        x
                    })
                })
                .collect();
        }
        out
    }

    fn all_strings(len: usize) -> impl Iterator<Item = BinaryTemplate> {
        (0u64..1 << len).map(move |v| BinaryTemplate::from_uint(v, len))
    }

    fn arb_symbol() -> impl Strategy<Value = Symbol> {
        prop_oneof![Just(Symbol::Zero), Just(Symbol::One), Just(Symbol::Wild)]
    }

    fn arb_pattern(max_len: usize) -> impl Strategy<Value = TriPattern> {
        prop::collection::vec(arb_symbol(), 1..=max_len).prop_map(TriPattern::from_symbols)
    }

    /// Two patterns of equal length, the second often a specialization of the first.
    fn arb_pair(max_len: usize) -> impl Strategy<Value = (TriPattern, TriPattern)> {
        (1..=max_len).prop_flat_map(|len| {
            (
                prop::collection::vec(arb_symbol(), len),
                prop::collection::vec(prop::option::weighted(0.7, arb_symbol()), len),
            )
                .prop_map(|(a, edits)| {
                    let b = a
                        .iter()
                        .zip(&edits)
                        .map(|(&s, e)| match (s, e) {
                            (Symbol::Wild, Some(e)) => *e,
                            (s, None) => s,
                            (_, Some(e)) => *e,
                        })
                        .collect::<Vec<_>>();
                    (TriPattern::from_symbols(a), TriPattern::from_symbols(b))
                })
        })
    }

    #[test]
    fn hamming_examples() {
        let a = t("0011");
        assert_eq!(a.hamming_distance(&a).unwrap(), 0);
        assert_eq!(a.hamming_distance(&a.complement()).unwrap(), 4);
        assert_eq!(t("0011").hamming_distance(&t("0101")).unwrap(), 2);
        assert_eq!(
            t("0011").hamming_distance(&t("011")),
            Err(Error::Dimension {
                expected: 4,
                found: 3
            })
        );
    }

    #[test]
    fn complement_clears_tail_bits() {
        let x = BinaryTemplate::zeros(70);
        let c = x.complement();
        assert_eq!(c.count_ones(), 70);
        assert_eq!(c, BinaryTemplate::ones(70));
    }

    #[test]
    fn matching_examples() {
        assert!(p("***").matches(&t("101")).unwrap());
        assert!(p("01*").matches(&t("011")).unwrap());
        assert!(!p("001").matches(&t("000")).unwrap());
        assert!(p("01*").matches(&t("0110")).is_err());
    }

    #[test]
    fn subsumption_examples() {
        assert!(p("1**").subsumes(&p("10*")).unwrap());
        assert!(!p("10*").subsumes(&p("1**")).unwrap());
        assert!(p("10*").subsumes(&p("10*")).unwrap());
        assert!(p("1*").subsumes(&p("1**")).is_err());
    }

    #[test]
    fn cover_size_examples() {
        assert_eq!(p("010").cover_size(), Some(1));
        assert_eq!(p("***").cover_size(), Some(8));
        assert_eq!(p("0*1*").cover_size(), Some(4));
        assert_eq!(TriPattern::wildcards(128).cover_size(), None);
    }

    #[test]
    fn parse_rejects_foreign_symbols() {
        assert_eq!(
            "01x".parse::<TriPattern>(),
            Err(Error::InvalidSymbol {
                symbol: 'x',
                position: 2
            })
        );
        assert!("01*".parse::<BinaryTemplate>().is_err());
        assert!("".parse::<TriPattern>().is_err());
    }

    #[test]
    fn split_and_merge_are_inverse() {
        let (a, b) = p("1**").split(1).unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("10*".into(), "11*".into()));
        assert_eq!(a.merge(&b), Some(p("1**")));
        assert_eq!(p("10*").merge(&p("01*")), None);
        assert!(p("1**").split(0).is_none());
    }

    #[test]
    fn ordering_puts_wildcard_last() {
        let mut v = [p("1**"), p("*00"), p("01*"), p("001"), p("0*1")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["001", "01*", "0*1", "1**", "*00"]);
    }

    #[test]
    fn cover_size_counts_matches_exhaustively() {
        // every pattern of length 6, matched against every string
        for code in 0..3usize.pow(6) {
            let pat = TriPattern::from_symbols((0..6).map(|i| match (code / 3usize.pow(i)) % 3 {
                0 => Symbol::Zero,
                1 => Symbol::One,
                _ => Symbol::Wild,
            }));
            let n = all_strings(6).filter(|x| pat.matches(x).unwrap()).count() as u128;
            assert_eq!(Some(n), pat.cover_size(), "{pat}");
        }
    }

    proptest! {
        #[test]
        fn matches_iff_in_expanded_cover(pat in arb_pattern(20), seed in any::<u64>()) {
            let cover = expand(&pat);
            prop_assert_eq!(cover.len() as u128, pat.cover_size().unwrap());
            for x in &cover {
                prop_assert!(pat.matches(x).unwrap());
            }
            // a random string matches iff it is one of the expansions
            let x = BinaryTemplate::from_bits((0..pat.len()).map(|i| (seed.rotate_left(i as u32 * 7) ^ (i as u64)) & 1 == 1));
            prop_assert_eq!(pat.matches(&x).unwrap(), cover.contains(&x));
        }

        #[test]
        fn cover_count_exhaustive_up_to_16(pat in arb_pattern(16)) {
            prop_assume!(pat.len() <= 12 || pat.wildcard_count() >= pat.len() - 4);
            let n = all_strings(pat.len()).filter(|x| pat.matches(x).unwrap()).count() as u128;
            prop_assert_eq!(Some(n), pat.cover_size());
        }

        #[test]
        fn subsumes_iff_cover_inclusion((a, b) in arb_pair(12)) {
            let implied = all_strings(a.len())
                .all(|x| !b.matches(&x).unwrap() || a.matches(&x).unwrap());
            prop_assert_eq!(a.subsumes(&b).unwrap(), implied);
        }

        #[test]
        fn hamming_triangle(a in prop::collection::vec(any::<bool>(), 100),
                            b in prop::collection::vec(any::<bool>(), 100),
                            c in prop::collection::vec(any::<bool>(), 100)) {
            let (a, b, c) = (BinaryTemplate::from_bits(a), BinaryTemplate::from_bits(b), BinaryTemplate::from_bits(c));
            let ab = a.hamming_distance(&b).unwrap();
            let bc = b.hamming_distance(&c).unwrap();
            let ac = a.hamming_distance(&c).unwrap();
            prop_assert!(ac <= ab + bc);
            prop_assert_eq!(ab, b.hamming_distance(&a).unwrap());
        }

        #[test]
        fn text_round_trip(pat in arb_pattern(150)) {
            let s = pat.to_string();
            prop_assert_eq!(s.parse::<TriPattern>().unwrap(), pat);
        }

        #[test]
        fn ord_matches_symbol_order(a in arb_pattern(70), b in arb_pattern(70)) {
            let by_symbols = a.symbols().cmp(b.symbols());
            prop_assert_eq!(a.cmp(&b), by_symbols);
        }
    }
}
