//! Dyck paths and the Stanley, Tamari, Pallo comb and antichain orders.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::{self, Limits};

/// Largest supported semilength; steps are packed into a `u64`.
pub const MAX_SEMILENGTH: usize = 32;

/// A Dyck path of semilength `k`. Step `i` (0-based) is bit `i` of the
/// word, set for `U`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyckPath {
    bits: u64,
    k: usize,
}

impl DyckPath {
    pub fn empty() -> Self {
        Self { bits: 0, k: 0 }
    }

    /// Validates a step word given as booleans (`true` = `U`).
    pub fn from_steps(steps: &[bool]) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            what: "Dyck path",
            input: steps.iter().map(|&u| if u { 'U' } else { 'D' }).collect(),
            reason: reason.into(),
        };
        if steps.len() % 2 == 1 {
            return Err(err("odd length"));
        }
        if steps.len() > 2 * MAX_SEMILENGTH {
            return Err(err("semilength too large"));
        }
        let mut height = 0i64;
        let mut bits = 0u64;
        for (i, &up) in steps.iter().enumerate() {
            height += if up { 1 } else { -1 };
            if height < 0 {
                return Err(err("a prefix has more D's than U's"));
            }
            if up {
                bits |= 1 << i;
            }
        }
        if height != 0 {
            return Err(err("unequal numbers of U's and D's"));
        }
        Ok(Self {
            bits,
            k: steps.len() / 2,
        })
    }

    /// `U D^{g_1} U D^{g_2} ... U D^{g_k}`.
    pub fn from_gamma(gamma: &[usize]) -> Result<Self> {
        let mut steps = Vec::with_capacity(2 * gamma.len());
        for &g in gamma {
            steps.push(true);
            steps.extend(std::iter::repeat_n(false, g));
        }
        Self::from_steps(&steps)
    }

    pub fn semilength(&self) -> usize {
        self.k
    }

    pub fn is_up(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn steps(&self) -> impl Iterator<Item = bool> + '_ {
        (0..2 * self.k).map(|i| self.is_up(i))
    }

    /// Number of `U`s among the first `i` steps.
    pub fn ups_before(&self, i: usize) -> usize {
        let mask = 1u64.checked_shl(i as u32).map_or(u64::MAX, |b| b - 1);
        (self.bits & mask).count_ones() as usize
    }

    /// The run lengths `(g_1, ..., g_k)` of `D`s following each `U`.
    pub fn gamma(&self) -> Vec<usize> {
        let mut g = Vec::with_capacity(self.k);
        for up in self.steps() {
            if up {
                g.push(0);
            } else {
                *g.last_mut().expect("path starts with U") += 1;
            }
        }
        g
    }

    /// `lon_j` is the least `t >= 0` with `g_j + ... + g_{j+t} > t`.
    pub fn longevity(&self) -> Vec<usize> {
        let g = self.gamma();
        (0..self.k)
            .map(|j| {
                let mut sum = 0;
                (0..self.k - j)
                    .find(|&t| {
                        sum += g[j + t];
                        sum > t
                    })
                    .expect("suffix of a Dyck path has enough D's")
            })
            .collect()
    }
}

impl Ord for DyckPath {
    /// Lexicographic on step words with `U < D`.
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.bits ^ other.bits;
        if diff == 0 {
            return self.k.cmp(&other.k);
        }
        let i = diff.trailing_zeros() as usize;
        let len = 2 * self.k.min(other.k);
        if i >= len {
            return self.k.cmp(&other.k);
        }
        if self.is_up(i) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for DyckPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for up in self.steps() {
            f.write_str(if up { "U" } else { "D" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyckPath({self})")
    }
}

/// Parses a step word such as `UUDUDD`; the empty string is the empty path.
impl FromStr for DyckPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let steps = s
            .chars()
            .map(|c| match c {
                'U' | 'u' => Ok(true),
                'D' | 'd' => Ok(false),
                _ => Err(Error::Parse {
                    what: "Dyck path",
                    input: s.into(),
                    reason: format!("unexpected character {c:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_steps(&steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosetKind {
    Stanley,
    Tamari,
    Pallo,
    Antichain,
}

impl PosetKind {
    pub const ALL: [PosetKind; 4] = [Self::Stanley, Self::Tamari, Self::Pallo, Self::Antichain];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Stanley => "stanley",
            Self::Tamari => "tamari",
            Self::Pallo => "pallo",
            Self::Antichain => "antichain",
        }
    }
}

impl FromStr for PosetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "poset",
                name: s.into(),
            })
    }
}

impl fmt::Display for PosetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn leq(a: &DyckPath, b: &DyckPath, kind: PosetKind) -> Result<bool> {
    if a.k != b.k {
        return Err(Error::SemilengthMismatch(a.k, b.k));
    }
    Ok(match kind {
        PosetKind::Stanley => stanley_leq(a, b),
        PosetKind::Tamari => pointwise_leq(&a.longevity(), &b.longevity()),
        PosetKind::Pallo => pallo_leq(&a.longevity(), &b.longevity()),
        PosetKind::Antichain => a == b,
    })
}

fn stanley_leq(a: &DyckPath, b: &DyckPath) -> bool {
    (1..=2 * a.k).all(|i| a.ups_before(i) <= b.ups_before(i))
}

fn pointwise_leq(la: &[usize], lb: &[usize]) -> bool {
    la.iter().zip(lb).all(|(x, y)| x <= y)
}

fn pallo_leq(la: &[usize], lb: &[usize]) -> bool {
    pointwise_leq(la, lb)
        && (0..la.len())
            .filter(|&j| la[j] < lb[j])
            // 0-based form of lon_l <= j - l - 1 for every l < j
            .all(|j| (0..j).all(|l| la[l] + l < j))
}

/// An ordered pair `lower <= upper` in one of the path orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyckInterval {
    pub lower: DyckPath,
    pub upper: DyckPath,
    pub kind: PosetKind,
}

impl DyckInterval {
    pub fn new(lower: DyckPath, upper: DyckPath, kind: PosetKind) -> Result<Self> {
        if !leq(&lower, &upper, kind)? {
            return Err(Error::NotAnInterval {
                lower: lower.to_string(),
                upper: upper.to_string(),
                kind: kind.name(),
            });
        }
        Ok(Self { lower, upper, kind })
    }

    pub fn semilength(&self) -> usize {
        self.lower.k
    }

    /// Parses `lower;upper`.
    pub fn parse(s: &str, kind: PosetKind) -> Result<Self> {
        let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse {
            what: "interval",
            input: s.into(),
            reason: "expected lower;upper".into(),
        })?;
        Self::new(a.parse()?, b.parse()?, kind)
    }
}

impl fmt::Display for DyckInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.lower, self.upper)
    }
}

/// All paths of semilength `k` in lexicographic order (`U < D`).
pub fn enumerate_paths(k: usize) -> impl Iterator<Item = DyckPath> {
    assert!(k <= MAX_SEMILENGTH, "semilength {k} exceeds {MAX_SEMILENGTH}");
    let mut out = Vec::new();
    extend_paths(k, 0, 0, 0, 0, &mut out);
    out.into_iter()
}

fn extend_paths(k: usize, step: usize, ups: usize, height: usize, bits: u64, out: &mut Vec<DyckPath>) {
    if step == 2 * k {
        out.push(DyckPath { bits, k });
        return;
    }
    if ups < k {
        extend_paths(k, step + 1, ups + 1, height + 1, bits | 1 << step, out);
    }
    if height > 0 {
        extend_paths(k, step + 1, ups, height - 1, bits, out);
    }
}

/// Counts intervals by testing every ordered pair, in parallel over the
/// lower element.
pub fn count_intervals(k: usize, kind: PosetKind, limits: &Limits) -> Result<u64> {
    limits.check("interval scan semilength", k, limits::INTERVAL_SCAN_MAX_K)?;
    let paths: Vec<DyckPath> = enumerate_paths(k).collect();
    let lons: Vec<Vec<usize>> = paths.iter().map(DyckPath::longevity).collect();
    let count = (0..paths.len())
        .into_par_iter()
        .map(|i| {
            (0..paths.len())
                .filter(|&j| match kind {
                    PosetKind::Stanley => stanley_leq(&paths[i], &paths[j]),
                    PosetKind::Tamari => pointwise_leq(&lons[i], &lons[j]),
                    PosetKind::Pallo => pallo_leq(&lons[i], &lons[j]),
                    PosetKind::Antichain => i == j,
                })
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Every interval of the given order at semilength `k`, lower element
/// major, both coordinates in lexicographic order.
pub fn enumerate_intervals(k: usize, kind: PosetKind, limits: &Limits) -> Result<Vec<DyckInterval>> {
    limits.check("interval scan semilength", k, limits::INTERVAL_SCAN_MAX_K)?;
    let paths: Vec<DyckPath> = enumerate_paths(k).collect();
    let mut out = Vec::new();
    for a in &paths {
        for b in &paths {
            if leq(a, b, kind)? {
                out.push(DyckInterval {
                    lower: *a,
                    upper: *b,
                    kind,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyckPath {
        s.parse().unwrap()
    }

    // Longevity straight from the definition, summing afresh for every t.
    fn lon_oracle(g: &[usize]) -> Vec<usize> {
        (0..g.len())
            .map(|j| (0..).find(|&t| g[j..=j + t].iter().sum::<usize>() > t).unwrap())
            .collect()
    }

    fn catalan(k: u64) -> u64 {
        (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(d("UUDUUDDDUD").gamma(), vec![0, 1, 0, 3, 1]);
        assert_eq!(d("UDUDUD").gamma(), vec![1, 1, 1]);
        assert_eq!(d("UUUDDD").gamma(), vec![0, 0, 3]);
        for k in 0..=6 {
            for p in enumerate_paths(k) {
                assert_eq!(DyckPath::from_gamma(&p.gamma()).unwrap(), p);
            }
        }
    }

    #[test]
    fn longevity_examples() {
        assert_eq!(d("UUDUUDDDUD").longevity(), vec![3, 0, 1, 0, 0]);
        assert_eq!(d("UDUDUDUD").longevity(), vec![0; 4]);
        assert_eq!(d("UUUDDD").longevity(), vec![2, 1, 0]);
        for k in 0..=7 {
            for p in enumerate_paths(k) {
                let lon = p.longevity();
                assert_eq!(lon, lon_oracle(&p.gamma()));
                for (j, &l) in lon.iter().enumerate() {
                    assert!(l < k - j);
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        assert!(leq(&d("UUDDUD"), &d("UUDUDD"), PosetKind::Stanley).unwrap());
        assert!(leq(&d("UUDDUD"), &d("UUUDDD"), PosetKind::Tamari).unwrap());
        assert!(!leq(&d("UUDDUD"), &d("UUUDDD"), PosetKind::Pallo).unwrap());
        for kind in PosetKind::ALL {
            for p in enumerate_paths(4) {
                assert!(leq(&p, &p, kind).unwrap());
            }
        }
        assert!(matches!(
            leq(&d("UD"), &d("UUDD"), PosetKind::Tamari),
            Err(Error::SemilengthMismatch(1, 2))
        ));
    }

    #[test]
    fn parse_rejects_invalid_words() {
        assert!("UDD".parse::<DyckPath>().is_err());
        assert!("DU".parse::<DyckPath>().is_err());
        assert!("UUD".parse::<DyckPath>().is_err());
        assert!("UXD".parse::<DyckPath>().is_err());
        assert_eq!("".parse::<DyckPath>().unwrap(), DyckPath::empty());
        assert_eq!(d("UUDUDD").to_string(), "UUDUDD");
    }

    #[test]
    fn enumeration_is_lexicographic_catalan() {
        for k in 0..=10 {
            let v: Vec<_> = enumerate_paths(k).collect();
            assert_eq!(v.len() as u64, catalan(k as u64));
            assert!(v.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(enumerate_paths(0).collect::<Vec<_>>(), vec![DyckPath::empty()]);
    }

    #[test]
    fn interval_counts_small() {
        let lim = Limits::default();
        assert_eq!(count_intervals(3, PosetKind::Stanley, &lim).unwrap(), 14);
        assert_eq!(count_intervals(3, PosetKind::Tamari, &lim).unwrap(), 13);
        for kind in PosetKind::ALL {
            assert_eq!(count_intervals(0, kind, &lim).unwrap(), 1);
            assert_eq!(
                count_intervals(4, kind, &lim).unwrap(),
                enumerate_intervals(4, kind, &lim).unwrap().len() as u64
            );
        }
        assert!(count_intervals(10, PosetKind::Tamari, &lim).is_err());
    }

    #[test]
    fn orders_extend_each_other() {
        for k in 0..=6 {
            let paths: Vec<_> = enumerate_paths(k).collect();
            for a in &paths {
                for b in &paths {
                    let s = leq(a, b, PosetKind::Stanley).unwrap();
                    let t = leq(a, b, PosetKind::Tamari).unwrap();
                    let p = leq(a, b, PosetKind::Pallo).unwrap();
                    assert!(!p || t);
                    assert!(!t || s);
                    if a == b {
                        assert!(p && leq(a, b, PosetKind::Antichain).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn orders_are_partial_orders() {
        for k in 0..=5 {
            let paths: Vec<_> = enumerate_paths(k).collect();
            for kind in PosetKind::ALL {
                let rel = |a: &DyckPath, b: &DyckPath| leq(a, b, kind).unwrap();
                for a in &paths {
                    assert!(rel(a, a));
                    for b in &paths {
                        if a != b && rel(a, b) {
                            assert!(!rel(b, a), "{kind} antisymmetry {a} {b}");
                        }
                        if !rel(a, b) {
                            continue;
                        }
                        for c in &paths {
                            if rel(b, c) {
                                assert!(rel(a, c), "{kind} transitivity {a} {b} {c}");
                            }
                        }
                    }
                }
            }
        }
    }
}
