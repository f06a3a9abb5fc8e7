//! Permutations in one-line notation, their symmetries and sums, and
//! classical pattern containment.
//!
//! Positions and values are 1-based at every public boundary. A
//! [`Permutation`] may hold any set of distinct positive integers; most
//! operations that reason about plots expect a normalized one (entries
//! exactly `1..=n`).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A finite sequence of distinct positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Builds a permutation, rejecting zero or repeated entries.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let mut sorted = entries.clone();
        sorted.sort_unstable();
        if sorted.first() == Some(&0) {
            return Err(Error::ZeroEntry);
        }
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEntry(w[0]));
        }
        Ok(Self(entries))
    }

    /// Builds a normalized permutation, rejecting anything that is not a
    /// rearrangement of `1..=n`.
    pub fn normalized(entries: Vec<u32>) -> Result<Self> {
        let p = Self::new(entries)?;
        if !p.is_normalized() {
            return Err(Error::NotNormalized(p.to_string()));
        }
        Ok(p)
    }

    /// Wraps entries the caller already knows to be a rearrangement of `1..=n`.
    pub(crate) fn from_vec_unchecked(entries: Vec<u32>) -> Self {
        debug_assert!(Self::new(entries.clone()).is_ok());
        Self(entries)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `12...n`.
    pub fn identity(n: usize) -> Self {
        Self((1..=n as u32).collect())
    }

    /// `n(n-1)...1`.
    pub fn decreasing(n: usize) -> Self {
        Self((1..=n as u32).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.0
    }

    /// Entry at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> u32 {
        self.0[pos - 1]
    }

    /// 1-based position of the entry with value `value`, if present.
    pub fn position_of(&self, value: u32) -> Option<usize> {
        self.0.iter().position(|&v| v == value).map(|i| i + 1)
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n + 1];
        for &v in &self.0 {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.to_string()))
        }
    }

    /// Replaces the i-th smallest entry by i.
    pub fn normalize(&self) -> Self {
        Self(normalize_slice(&self.0))
    }

    /// Descents as 1-based indices `i` with `p_i > p_{i+1}`.
    pub fn descents(&self) -> Vec<usize> {
        self.0
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > w[1])
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn des(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] > w[1]).count()
    }

    pub fn is_descent(&self, i: usize) -> bool {
        i >= 1 && i < self.len() && self.0[i - 1] > self.0[i]
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_normalized()?;
        Ok(self.inverse_unchecked())
    }

    pub(crate) fn inverse_unchecked(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Self(inv)
    }

    /// Counterclockwise quarter turn of the plot; equals `reverse(inverse(p))`.
    pub fn rot(&self) -> Result<Self> {
        self.require_normalized()?;
        Ok(self.rot_unchecked())
    }

    pub(crate) fn rot_unchecked(&self) -> Self {
        self.inverse_unchecked().reverse()
    }

    /// Clockwise quarter turn of the plot; equals `inverse(reverse(p))`.
    pub fn rot_inverse(&self) -> Result<Self> {
        self.require_normalized()?;
        Ok(self.rot_inverse_unchecked())
    }

    pub(crate) fn rot_inverse_unchecked(&self) -> Self {
        self.reverse().inverse_unchecked()
    }

    pub fn symmetry(&self, which: Symmetry) -> Result<Self> {
        match which {
            Symmetry::Reverse => Ok(self.reverse()),
            Symmetry::Inverse => self.inverse(),
            Symmetry::Rot => self.rot(),
            Symmetry::RotInverse => self.rot_inverse(),
        }
    }

    /// `self ⊕ other`: the plot of `other` above and to the right.
    /// Operands are normalized first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let a = normalize_slice(&self.0);
        let shift = a.len() as u32;
        let mut out = a;
        out.extend(normalize_slice(&other.0).into_iter().map(|v| v + shift));
        Self(out)
    }

    /// `self ⊖ other`: the plot of `other` below and to the right.
    /// Operands are normalized first.
    pub fn skew_sum(&self, other: &Self) -> Self {
        let b = normalize_slice(&other.0);
        let shift = b.len() as u32;
        let mut out: Vec<u32> = normalize_slice(&self.0).into_iter().map(|v| v + shift).collect();
        out.extend(b);
        Self(out)
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        pattern.occurs_in(&self.0)
    }

    pub fn avoids(&self, pattern: &Pattern) -> bool {
        !self.contains(pattern)
    }

    pub fn avoids_all(&self, patterns: &[Pattern]) -> bool {
        patterns.iter().all(|p| self.avoids(p))
    }

    /// Left-to-right maxima as 1-based positions, left to right.
    pub fn left_to_right_maxima(&self) -> Vec<usize> {
        let mut best = 0;
        let mut out = Vec::new();
        for (i, &v) in self.0.iter().enumerate() {
            if v > best {
                best = v;
                out.push(i + 1);
            }
        }
        out
    }

    /// Maps the entries of a normalized permutation back onto the value set
    /// of `self`, so that `self.normalize().unnormalize_like(self) == self`.
    pub(crate) fn unnormalize_onto(normalized: &Self, template: &Self) -> Self {
        let mut values = template.0.clone();
        values.sort_unstable();
        Self(normalized.0.iter().map(|&v| values[v as usize - 1]).collect())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Comma-separated entries, e.g. `3,5,2,4,1`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Accepts `3,5,2,4,1` or, when every entry is a single digit, `35241`.
/// The empty string parses to the empty permutation.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_err = |reason: String| Error::Parse {
            what: "permutation",
            input: s.to_string(),
            reason,
        };
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let entries: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| parse_err(e.to_string())))
                .collect::<Result<_>>()?
        } else if s.chars().all(|c| c.is_ascii_digit()) {
            s.chars().map(|c| c.to_digit(10).unwrap()).collect()
        } else {
            return Err(parse_err("expected comma-separated integers".into()));
        };
        Self::new(entries)
    }
}

pub(crate) fn normalize_slice(entries: &[u32]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_unstable_by_key(|&i| entries[i]);
    let mut out = vec![0u32; entries.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    out
}

/// The four plot symmetries used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Reverse,
    Inverse,
    Rot,
    RotInverse,
}

impl FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reverse" | "rev" => Ok(Self::Reverse),
            "inverse" | "inv" => Ok(Self::Inverse),
            "rot" => Ok(Self::Rot),
            "rot_inverse" | "rot-inverse" | "rotinv" => Ok(Self::RotInverse),
            _ => Err(Error::Unknown {
                what: "symmetry",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumKind {
    Direct,
    Skew,
}

/// `mu ⊕ lam` or `mu ⊖ lam`; both operands must be normalized.
pub fn compose_sum(mu: &Permutation, lam: &Permutation, kind: SumKind) -> Result<Permutation> {
    mu.require_normalized()?;
    lam.require_normalized()?;
    Ok(match kind {
        SumKind::Direct => mu.direct_sum(lam),
        SumKind::Skew => mu.skew_sum(lam),
    })
}

/// A nonempty normalized permutation used as a containment target.
///
/// Matching runs left to right over pattern positions; for each position the
/// nearest already-placed pattern values just below and just above it give
/// the admissible value window, which is enough to keep the partial match
/// order-isomorphic to the pattern.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    perm: Permutation,
    below: Vec<Option<usize>>,
    above: Vec<Option<usize>>,
    max_pos: usize,
}

impl Pattern {
    pub fn new(perm: Permutation) -> Result<Self> {
        if perm.is_empty() {
            return Err(Error::EmptyPattern);
        }
        perm.require_normalized()?;
        let t = perm.entries();
        let m = t.len();
        let mut below = vec![None; m];
        let mut above = vec![None; m];
        for j in 0..m {
            for i in 0..j {
                if t[i] < t[j] && below[j].is_none_or(|b: usize| t[b] < t[i]) {
                    below[j] = Some(i);
                }
                if t[i] > t[j] && above[j].is_none_or(|a: usize| t[a] > t[i]) {
                    above[j] = Some(i);
                }
            }
        }
        let max_pos = t.iter().position(|&v| v as usize == m).unwrap();
        Ok(Self {
            perm,
            below,
            above,
            max_pos,
        })
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff some subsequence of `text` is order-isomorphic to the pattern.
    pub fn occurs_in(&self, text: &[u32]) -> bool {
        let mut idx = vec![0usize; self.len()];
        self.search(text, 0, 0, None, &mut idx)
    }

    /// 1-based positions of the first occurrence found, if any.
    pub fn find_in(&self, text: &[u32]) -> Option<Vec<usize>> {
        let mut idx = vec![0usize; self.len()];
        self.search(text, 0, 0, None, &mut idx)
            .then(|| idx.iter().map(|i| i + 1).collect())
    }

    /// True iff an occurrence uses the last entry of `text` as the pattern's
    /// last entry.
    pub fn occurs_ending_at_last(&self, text: &[u32]) -> bool {
        if text.is_empty() {
            return false;
        }
        let mut idx = vec![0usize; self.len()];
        self.search(text, 0, 0, Some((self.len() - 1, text.len() - 1)), &mut idx)
    }

    /// True iff an occurrence uses `text[at]` as the pattern's maximum.
    pub fn occurs_with_max_at(&self, text: &[u32], at: usize) -> bool {
        let mut idx = vec![0usize; self.len()];
        self.search(text, 0, 0, Some((self.max_pos, at)), &mut idx)
    }

    /// True iff an occurrence uses `text[at]` in pattern position `role`
    /// (0-based).
    #[cfg(test)]
    pub(crate) fn occurs_with_role(&self, text: &[u32], role: usize, at: usize) -> bool {
        let mut idx = vec![0usize; self.len()];
        self.search(text, 0, 0, Some((role, at)), &mut idx)
    }

    fn search(
        &self,
        text: &[u32],
        j: usize,
        start: usize,
        fixed: Option<(usize, usize)>,
        idx: &mut [usize],
    ) -> bool {
        let m = self.len();
        if j == m {
            return true;
        }
        let n = text.len();
        let lo = self.below[j].map(|b| text[idx[b]]);
        let hi = self.above[j].map(|a| text[idx[a]]);
        let fits = |v: u32| lo.is_none_or(|l| v > l) && hi.is_none_or(|h| v < h);
        let (first, last) = match fixed {
            Some((role, at)) if role == j => {
                if at < start {
                    return false;
                }
                (at, at)
            }
            Some((role, at)) if j < role => {
                // leave room for positions j+1..role before `at`
                let room = role - j;
                if at < room {
                    return false;
                }
                (start, at - room)
            }
            Some((_, at)) => (start.max(at + 1), n.saturating_sub(m - j)),
            None => (start, n.saturating_sub(m - j)),
        };
        if n < m - j {
            return false;
        }
        let mut i = first;
        while i <= last && i < n {
            if fits(text[i]) {
                idx[j] = i;
                if self.search(text, j + 1, i + 1, fixed, idx) {
                    return true;
                }
            }
            i += 1;
        }
        false
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({})", self.perm)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Parses a pattern set: patterns separated by `;`, each pattern in the
/// permutation text format. `231;4123` and `2,3,1;4,1,2,3` are equivalent.
/// The empty string is the empty set.
pub fn parse_patterns(s: &str) -> Result<Vec<Pattern>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Renders a pattern set in compact form, e.g. `231;4123`.
pub fn format_patterns(pats: &[Pattern]) -> String {
    pats.iter()
        .map(|p| {
            if p.len() <= 9 {
                p.perm().entries().iter().map(|v| v.to_string()).collect::<String>()
            } else {
                p.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Streams `Av_n(pats)` in lexicographic order of one-line notation.
///
/// Prefixes are extended one position at a time with unused values in
/// increasing order, and a prefix is abandoned as soon as its last entry
/// completes an occurrence of some pattern.
pub struct Avoiders {
    n: usize,
    pats: Vec<Pattern>,
    prefix: Vec<u32>,
    used: Vec<bool>,
    cursor: Vec<u32>,
    done: bool,
}

impl Avoiders {
    fn new(n: usize, pats: &[Pattern]) -> Self {
        Self {
            n,
            pats: pats.to_vec(),
            prefix: Vec::with_capacity(n),
            used: vec![false; n + 2],
            cursor: vec![1; n + 1],
            done: false,
        }
    }

    fn pop(&mut self) {
        if let Some(v) = self.prefix.pop() {
            self.used[v as usize] = false;
        }
    }
}

impl Iterator for Avoiders {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        loop {
            let depth = self.prefix.len();
            if depth == self.n {
                let out = Permutation(self.prefix.clone());
                if self.n == 0 {
                    self.done = true;
                } else {
                    self.pop();
                }
                return Some(out);
            }
            let mut v = self.cursor[depth];
            let mut advanced = false;
            while v as usize <= self.n {
                if !self.used[v as usize] {
                    self.prefix.push(v);
                    if self.pats.iter().any(|p| p.occurs_ending_at_last(&self.prefix)) {
                        self.prefix.pop();
                    } else {
                        self.used[v as usize] = true;
                        self.cursor[depth] = v + 1;
                        self.cursor[depth + 1] = 1;
                        advanced = true;
                        break;
                    }
                }
                v += 1;
            }
            if !advanced {
                if depth == 0 {
                    self.done = true;
                    return None;
                }
                self.cursor[depth] = 1;
                self.pop();
            }
        }
    }
}

/// `Av_n(pats)` as a deterministic lexicographic stream.
pub fn enumerate_avoiders(n: usize, pats: &[Pattern]) -> Avoiders {
    Avoiders::new(n, pats)
}

/// Counts elements of `Av_n(pats)` satisfying `pred`, in parallel.
///
/// Generation inserts the maximum into each slot of a shorter avoider, so
/// every node of the search is itself an avoider and there are no dead ends.
/// With `max_last`, the final insertion is restricted to the last slot, which
/// visits exactly the avoiders ending in `n`. Each worker owns a disjoint
/// subtree; the result is a commutative sum and does not depend on
/// scheduling.
pub fn par_count_avoiders<F>(n: usize, pats: &[Pattern], max_last: bool, pred: F) -> u64
where
    F: Fn(&[u32]) -> bool + Sync,
{
    if n == 0 {
        return pred(&[]) as u64;
    }
    // Seed level: deep enough to spread work, shallow enough to stay cheap.
    let seed_len = n.saturating_sub(1).min(7);
    let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
    for len in 0..seed_len {
        let mut next = Vec::new();
        for p in &frontier {
            for slot in 0..=len {
                if let Some(child) = insert_max(p, slot, pats) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    frontier
        .par_iter()
        .map(|p| count_from(p, n, pats, max_last, &pred))
        .sum()
}

fn insert_max(p: &[u32], slot: usize, pats: &[Pattern]) -> Option<Vec<u32>> {
    let mut child = Vec::with_capacity(p.len() + 1);
    child.extend_from_slice(&p[..slot]);
    child.push(p.len() as u32 + 1);
    child.extend_from_slice(&p[slot..]);
    if pats.iter().any(|pat| pat.occurs_with_max_at(&child, slot)) {
        None
    } else {
        Some(child)
    }
}

fn count_from<F>(p: &[u32], n: usize, pats: &[Pattern], max_last: bool, pred: &F) -> u64
where
    F: Fn(&[u32]) -> bool,
{
    let len = p.len();
    if len == n {
        return pred(p) as u64;
    }
    let slots = if max_last && len + 1 == n { len..=len } else { 0..=len };
    slots
        .filter_map(|slot| insert_max(p, slot, pats))
        .map(|child| count_from(&child, n, pats, max_last, pred))
        .sum()
}

/// Iterates all of `S_n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut current: Option<Vec<u32>> = Some((1..=n as u32).collect());
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        if next_permutation(&mut next) {
            current = Some(next);
        }
        Some(Permutation(out))
    })
}

/// Advances to the lexicographically next arrangement; false at the last one.
pub(crate) fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Lexicographic rank of a normalized permutation within `S_n`.
pub(crate) fn lex_rank(p: &[u32]) -> usize {
    let n = p.len();
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    let mut rank = 0;
    for i in 0..n {
        let smaller_after = p[i + 1..].iter().filter(|&&v| v < p[i]).count();
        rank += smaller_after * fact[n - 1 - i];
    }
    rank
}
