//! Closed forms, class sequences, reference data, and the verification
//! suites that tie every module to its counting identities.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bijections::{self, AntichainMap, PalloDecomposition};
use crate::dyck::{self, DyckInterval, PosetKind};
use crate::error::{Error, Result};
use crate::gentree;
use crate::limits::{self, Limits};
use crate::noncross::{self, NCInterval};
use crate::perm::{self, format_patterns, parse_patterns, Pattern, Permutation};
use crate::series::{self, SeriesKind};
use crate::sliding::{slide, SlideOp};
use crate::stacksort::{self, canonical_hooks, is_sorted, is_uniquely_sorted};

/// Named closed-form counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    /// `C_k C_{k+2} - C_{k+1}^2`.
    Stanley,
    /// `2 binom(4k+1, k+1) / ((3k+1)(3k+2))`.
    Tamari,
    /// `binom(3k, k) / (2k+1)`.
    Kreweras,
    /// `[x^k] C(x C(x))`.
    Pallo,
    Catalan,
}

impl FormulaId {
    pub const ALL: [FormulaId; 5] = [
        Self::Stanley,
        Self::Tamari,
        Self::Kreweras,
        Self::Pallo,
        Self::Catalan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Stanley => "stanley",
            Self::Tamari => "tamari",
            Self::Kreweras => "kreweras",
            Self::Pallo => "pallo",
            Self::Catalan => "catalan",
        }
    }

    fn alias(&self) -> &'static str {
        match self {
            Self::Stanley => "eq1_stanley",
            Self::Tamari => "eq2_tamari",
            Self::Kreweras => "eq3_kreweras",
            Self::Pallo => "eq15_pallo_series",
            Self::Catalan => "catalan",
        }
    }
}

impl FromStr for FormulaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s || f.alias() == s)
            .ok_or_else(|| Error::Unknown {
                what: "formula",
                name: s.into(),
            })
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn exact_div(a: BigUint, b: BigUint) -> BigUint {
    let (q, r) = a.div_rem(&b);
    assert!(r.is_zero(), "inexact division in a closed form");
    q
}

pub fn catalan(k: u64) -> BigUint {
    exact_div(binomial(2 * k, k), BigUint::from(k + 1))
}

pub fn closed_form(tag: FormulaId, k: u64) -> BigUint {
    match tag {
        FormulaId::Catalan => catalan(k),
        FormulaId::Stanley => catalan(k) * catalan(k + 2) - catalan(k + 1).pow(2),
        FormulaId::Tamari => exact_div(
            BigUint::from(2u8) * binomial(4 * k + 1, k + 1),
            BigUint::from((3 * k + 1) * (3 * k + 2)),
        ),
        FormulaId::Kreweras => exact_div(binomial(3 * k, k), BigUint::from(2 * k + 1)),
        FormulaId::Pallo => series::series_coefficients(SeriesKind::CatalanOfXCatalan, k as usize)
            .pop()
            .expect("order k has k+1 coefficients"),
    }
}

/// The five interval families: four orders on Dyck paths and refinement
/// of noncrossing partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    Path(PosetKind),
    Kreweras,
}

impl Lattice {
    pub const ALL: [Lattice; 5] = [
        Self::Path(PosetKind::Stanley),
        Self::Path(PosetKind::Tamari),
        Self::Kreweras,
        Self::Path(PosetKind::Pallo),
        Self::Path(PosetKind::Antichain),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Path(kind) => kind.name(),
            Self::Kreweras => "kreweras",
        }
    }

    pub fn formula(&self) -> FormulaId {
        match self {
            Self::Path(PosetKind::Stanley) => FormulaId::Stanley,
            Self::Path(PosetKind::Tamari) => FormulaId::Tamari,
            Self::Path(PosetKind::Pallo) => FormulaId::Pallo,
            Self::Path(PosetKind::Antichain) => FormulaId::Catalan,
            Self::Kreweras => FormulaId::Kreweras,
        }
    }
}

impl FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "poset",
                name: s.into(),
            })
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Interval count by scanning every ordered pair.
pub fn count_lattice_intervals(lattice: Lattice, k: usize, limits: &Limits) -> Result<u64> {
    match lattice {
        Lattice::Path(kind) => dyck::count_intervals(k, kind, limits),
        Lattice::Kreweras => {
            limits.check("interval scan semilength", k, limits::INTERVAL_SCAN_MAX_K)?;
            let parts = noncross::enumerate_noncrossing(k);
            Ok(parts
                .par_iter()
                .map(|a| parts.iter().filter(|b| noncross::nc_leq(a, b).unwrap()).count() as u64)
                .sum())
        }
    }
}

/// One count of a pattern class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceRecord {
    pub class: String,
    pub k: usize,
    pub count: BigUint,
}

/// Largest default `k` for [`compute_sequence`] on this class.
pub fn sequence_guard(pats: &[Pattern]) -> usize {
    if pats.is_empty() {
        limits::UNRESTRICTED_UNIQUE_MAX_K
    } else if pats.iter().any(|p| p.len() <= 3) {
        limits::SEQUENCE_SMALL_PATTERN_MAX_K
    } else {
        limits::SEQUENCE_MAX_K
    }
}

/// `|U_{2k+1}(pats)|` for `k = 0..=max_k`.
pub fn compute_sequence(pats: &[Pattern], max_k: usize, limits: &Limits) -> Result<Vec<SequenceRecord>> {
    limits.check("sequence length k", max_k, sequence_guard(pats))?;
    let class = format_patterns(pats);
    Ok((0..=max_k)
        .map(|k| SequenceRecord {
            class: class.clone(),
            k,
            count: BigUint::from(stacksort::count_uniquely_sorted_unguarded(k, pats)),
        })
        .collect())
}

/// The eighteen two-pattern classes with conjectured sequences.
pub const TABLE_CLASSES: [&str; 18] = [
    "312;1432", "312;2431", "312;3421", "132;3412", "231;1423", "312;1243",
    "132;3421", "132;4312", "231;1243", "132;2341", "132;4123", "312;2341",
    "312;3241", "312;4321", "132;4231", "231;1432", "231;4312", "231;4321",
];

/// The class whose counts start `1,1,3,10,36,...`.
pub const PUBLISHED_CLASS: &str = "231;4123";
pub const PUBLISHED_COUNTS: [u64; 10] = [1, 1, 3, 10, 36, 138, 553, 2288, 9699, 41908];

const REFERENCE_CSV: &str = include_str!("../data/reference_sequences.csv");

/// A stored count with its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRow {
    pub class: String,
    pub k: usize,
    pub count: BigUint,
    pub provenance: String,
}

pub const CSV_HEADER: &str = "class,k,count,provenance";

pub fn parse_reference(text: &str) -> Result<Vec<ReferenceRow>> {
    let bad = |line: &str, reason: &str| Error::Parse {
        what: "reference row",
        input: line.into(),
        reason: reason.into(),
    };
    let mut rows = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') || line == CSV_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [class, k, count, provenance] = fields[..] else {
            return Err(bad(line, "expected four fields"));
        };
        rows.push(ReferenceRow {
            class: class.into(),
            k: k.parse().map_err(|_| bad(line, "bad k"))?,
            count: count.parse().map_err(|_| bad(line, "bad count"))?,
            provenance: provenance.into(),
        });
    }
    Ok(rows)
}

/// The bundled reference counts.
pub fn reference_rows() -> Vec<ReferenceRow> {
    parse_reference(REFERENCE_CSV).expect("bundled reference file parses")
}

/// Reference file text for the given records.
pub fn reference_csv(records: &[SequenceRecord], provenance: &str) -> String {
    let mut out = format!("# provenance: {provenance}\n{CSV_HEADER}\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}\n", r.class, r.k, r.count, provenance));
    }
    out
}

/// `2 1 4 3 ... (2k)(2k-1)(2k+1)`.
pub fn alternating_element(k: usize) -> Permutation {
    let mut e: Vec<u32> = (1..=k as u32).flat_map(|i| [2 * i, 2 * i - 1]).collect();
    e.push(2 * k as u32 + 1);
    Permutation::normalized(e).expect("valid by construction")
}

/// `(k+1) k ... 1 (k+2) ... (2k+1)`.
pub fn peak_element(k: usize) -> Permutation {
    Permutation::decreasing(k + 1).direct_sum(&Permutation::identity(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Lemmas,
    Posets,
    Bijections,
    Sequences,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Self::Lemmas,
        Self::Posets,
        Self::Bijections,
        Self::Sequences,
        Self::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lemmas => "lemmas",
            Self::Posets => "posets",
            Self::Bijections => "bijections",
            Self::Sequences => "sequences",
            Self::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "suite",
                name: s.into(),
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<10} {:<40} [{}] {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.anchor,
            self.detail,
            self.millis
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

type Outcome = std::result::Result<String, String>;

struct Check {
    suite: &'static str,
    name: &'static str,
    anchor: &'static str,
    run: Box<dyn Fn(usize) -> Outcome + Send + Sync>,
}

fn check(
    suite: &'static str,
    name: &'static str,
    anchor: &'static str,
    run: impl Fn(usize) -> Outcome + Send + Sync + 'static,
) -> Check {
    Check {
        suite,
        name,
        anchor,
        run: Box::new(run),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pats(s: &str) -> Vec<Pattern> {
    parse_patterns(s).expect("built-in pattern set")
}

fn class(k: usize, p: &str) -> Vec<Permutation> {
    stacksort::enumerate_uniquely_sorted(k, &pats(p), &Limits::unlimited())
        .expect("unguarded")
        .collect()
}

fn class_count(k: usize, p: &str) -> u64 {
    stacksort::count_uniquely_sorted_unguarded(k, &pats(p))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn lemma_checks() -> Vec<Check> {
    const S: &str = "lemmas";
    vec![
        check(S, "fertility characterization", "sorted iff hooks exist", |mk| {
            let top = (2 * mk + 1).min(8);
            for n in 1..=top {
                let census = stacksort::census(n);
                for q in perm::all_permutations(n) {
                    let f = census.fertility(&q);
                    ensure((f == 1) == is_uniquely_sorted(&q), || format!("{q}: fertility {f}"))?;
                    ensure((f >= 1) == is_sorted(&q), || format!("{q}: fertility {f}"))?;
                }
            }
            Ok(format!("n <= {top}"))
        }),
        check(S, "descent bottoms and northeast endpoints", "unique sortedness partition", |mk| {
            let top = mk.min(4);
            for k in 0..=top {
                for q in class(k, "") {
                    let h = canonical_hooks(&q).map_err(|_| format!("{q} unsorted"))?;
                    let mut pts: Vec<usize> = q.descents().iter().map(|d| d + 1).collect();
                    pts.extend(h.ne_endpoints());
                    pts.sort_unstable();
                    ensure(pts == (2..=q.len()).collect::<Vec<_>>(), || q.to_string())?;
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "left-to-right maxima of 312-avoiders", "first point and northeast endpoints", |mk| {
            let top = mk.min(5);
            for k in 0..=top {
                for q in class(k, "312") {
                    let mut want = vec![1];
                    let mut ne = canonical_hooks(&q).expect("sorted").ne_endpoints();
                    ne.sort_unstable();
                    want.extend(ne);
                    ensure(q.left_to_right_maxima() == want, || q.to_string())?;
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "sliding preserves descents and sortedness", "sliding operators", |mk| {
            let top = (2 * mk + 1).min(7);
            let (p132, p312) = (pats("132"), pats("312"));
            for n in 0..=top {
                for q in perm::all_permutations(n) {
                    for op in [SlideOp::Swu, SlideOp::Swd] {
                        let r = slide(&q, op);
                        ensure(r.descents() == q.descents(), || format!("{op}({q})"))?;
                        ensure(!is_sorted(&q) || is_sorted(&r), || format!("{op}({q})"))?;
                    }
                    if q.avoids_all(&p132) {
                        let r = slide(&q, SlideOp::Swl);
                        ensure(r.des() == q.des(), || format!("swl({q})"))?;
                        ensure(
                            stacksort::deficiency(&r) <= stacksort::deficiency(&q),
                            || format!("swl({q}) deficiency"),
                        )?;
                    }
                    if q.avoids_all(&p312) {
                        ensure(slide(&q, SlideOp::Swr).des() == q.des(), || format!("swr({q})"))?;
                    }
                }
            }
            Ok(format!("n <= {top}"))
        }),
        check(S, "sliding bijections between classes", "sliding operators", |mk| {
            let top = (2 * mk + 1).min(7);
            let cases = [
                ("231", "132", SlideOp::Swu, SlideOp::Swd),
                ("132", "312", SlideOp::Swl, SlideOp::Swr),
                ("231;312", "132;312", SlideOp::Swu, SlideOp::Swd),
                ("132;231", "231;312", SlideOp::Swl, SlideOp::Swr),
            ];
            for n in 0..=top {
                for (from, to, f, g) in cases {
                    let src: Vec<_> = perm::enumerate_avoiders(n, &pats(from)).collect();
                    let dst: HashSet<_> = perm::enumerate_avoiders(n, &pats(to)).collect();
                    let img: HashSet<_> = src.iter().map(|q| slide(q, f)).collect();
                    ensure(img.len() == src.len() && img == dst, || format!("{f}: Av_{n}({from})"))?;
                    for q in &src {
                        ensure(&slide(&slide(q, f), g) == q, || format!("{g}({f}({q}))"))?;
                    }
                }
            }
            Ok(format!("n <= {top}"))
        }),
        check(S, "cell matrices solve the margin problem", "unique cell matrix", |mk| {
            let top = mk.min(5);
            for k in 0..=top {
                for q in class(k, "312") {
                    let m = bijections::cell_matrix(&q).map_err(err)?;
                    let iv = bijections::dl_forward(&q).map_err(err)?;
                    let rev = |g: Vec<usize>| g.into_iter().rev().map(|x| x as u32).collect::<Vec<_>>();
                    let (a, b) = (rev(iv.upper.gamma()), rev(iv.lower.gamma()));
                    ensure(m.satisfies(&a, &b), || format!("{q}: {m}"))?;
                    let (solved, energies) = bijections::solve_margins_traced(&a, &b).map_err(err)?;
                    ensure(solved == m, || format!("{q}: solved {solved}, actual {m}"))?;
                    ensure(energies.windows(2).all(|w| w[1] < w[0]), || format!("{q}: energy"))?;
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "valley words of 132,231-avoiders", "Dyck path iff uniquely sorted", |mk| {
            let top = mk.min(5);
            for k in 0..=top {
                let mut dyck_words = 0u64;
                for q in perm::enumerate_avoiders(2 * k + 1, &pats("132;231")) {
                    let w = bijections::valley_word(&q).map_err(err)?;
                    let is_dyck = dyck::DyckPath::from_steps(&w).is_ok();
                    ensure(is_dyck == is_uniquely_sorted(&q), || q.to_string())?;
                    dyck_words += is_dyck as u64;
                }
                ensure(BigUint::from(dyck_words) == catalan(k as u64), || format!("k={k}"))?;
            }
            Ok(format!("k <= {top}"))
        }),
    ]
}

fn poset_checks() -> Vec<Check> {
    const S: &str = "posets";
    vec![
        check(S, "interval counts match closed forms", "five Catalan posets", |mk| {
            let top = mk.min(7);
            for lattice in Lattice::ALL {
                for k in 0..=top {
                    let got = count_lattice_intervals(lattice, k, &Limits::unlimited()).map_err(err)?;
                    let want = closed_form(lattice.formula(), k as u64);
                    ensure(BigUint::from(got) == want, || format!("{lattice} k={k}: {got} vs {want}"))?;
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "order extensions", "antichain < pallo < tamari < stanley", |mk| {
            let top = mk.min(6);
            for k in 0..=top {
                let paths: Vec<_> = dyck::enumerate_paths(k).collect();
                for a in &paths {
                    for b in &paths {
                        let le = |kind| dyck::leq(a, b, kind).expect("same semilength");
                        let chain = [
                            le(PosetKind::Antichain),
                            le(PosetKind::Pallo),
                            le(PosetKind::Tamari),
                            le(PosetKind::Stanley),
                        ];
                        ensure(chain.windows(2).all(|w| !w[0] || w[1]), || format!("{a} {b}"))?;
                    }
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "noncrossing generating tree", "level sizes", |mk| {
            let top = mk.min(6);
            for k in 1..=top {
                let level = noncross::tree_level(k);
                let set: HashSet<_> = level.iter().collect();
                ensure(set.len() == level.len(), || format!("duplicates at k={k}"))?;
                let want = closed_form(FormulaId::Kreweras, k as u64);
                ensure(BigUint::from(level.len()) == want, || format!("k={k}"))?;
            }
            Ok(format!("k <= {top}"))
        }),
    ]
}

fn bijection_checks() -> Vec<Check> {
    const S: &str = "bijections";
    vec![
        check(S, "DL roundtrip", "DL is a bijection onto Stanley intervals", |mk| {
            let top = mk.min(5);
            dl_bijection(top)?;
            Ok(format!("k <= {top}"))
        }),
        check(S, "Tamari intervals", "sorted after swr iff Tamari", |mk| {
            let top = mk.min(4);
            tamari_bijection(top)?;
            Ok(format!("k <= {top}"))
        }),
        check(S, "upsilon tree map", "isomorphic generating trees", |mk| {
            let top = mk.min(6);
            upsilon_bijection(top)?;
            Ok(format!("k <= {top}"))
        }),
        check(S, "upsilon direct map", "direct description agrees", |mk| {
            let top = mk.min(5);
            let bad = upsilon_disagreements(top);
            ensure(bad.is_empty(), || format!("{} disagreements, first {}", bad.len(), bad[0]))?;
            Ok(format!("k <= {top}"))
        }),
        check(S, "Pallo decomposition", "nice and split pieces", |mk| {
            let top = mk.min(5);
            for k in 1..=top {
                for q in class(k, "231;4132") {
                    let d = bijections::pallo_decompose(&q).map_err(err)?;
                    if let PalloDecomposition::Split { right, .. } = &d {
                        ensure(bijections::is_nice(right).map_err(err)?, || format!("{q}: {d}"))?;
                    }
                    ensure(bijections::pallo_recompose(&d).map_err(err)? == q, || format!("{q}: {d}"))?;
                }
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "antichain bijections", "parking functions and layered maps", |mk| {
            let top = mk.min(6);
            antichain_bijections(top)?;
            Ok(format!("k <= {top}"))
        }),
    ]
}

fn sequence_checks() -> Vec<Check> {
    const S: &str = "sequences";
    vec![
        check(S, "uniquely sorted census", "fertility one", |mk| {
            let top = mk.min(4);
            let mut got = Vec::new();
            for k in 0..=top {
                let n = 2 * k + 1;
                let census = stacksort::census(n).counts().iter().filter(|&&c| c == 1).count() as u64;
                let direct = class_count(k, "");
                ensure(census == direct, || format!("k={k}: census {census}, direct {direct}"))?;
                got.push(direct);
            }
            Ok(format!("{got:?}"))
        }),
        check(S, "312-avoiders", "Stanley interval count", |mk| {
            class_vs_formula("312", FormulaId::Stanley, mk.min(6))
        }),
        check(S, "132- and 231-avoiders", "Tamari interval count", |mk| {
            let top = mk.min(5);
            class_vs_formula("132", FormulaId::Tamari, top)?;
            class_vs_formula("231", FormulaId::Tamari, top)?;
            for k in 0..=top {
                let a = class(k, "231");
                let b: HashSet<_> = class(k, "132").into_iter().collect();
                let img: HashSet<_> = a.iter().map(|q| slide(q, SlideOp::Swu)).collect();
                ensure(img.len() == a.len() && img == b, || format!("swu at k={k}"))?;
                ensure(a.iter().all(|q| slide(&slide(q, SlideOp::Swu), SlideOp::Swd) == *q), || {
                    format!("swd inverse at k={k}")
                })?;
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "312,1342-avoiders", "noncrossing interval count", |mk| {
            let top = mk.min(6);
            class_vs_formula("312;1342", FormulaId::Kreweras, top)?;
            for k in 1..=top.min(5) {
                ensure(gentree::perm_tree_level(k).len() == noncross::tree_level(k).len(), || {
                    format!("tree levels at k={k}")
                })?;
            }
            Ok(format!("k <= {top}"))
        }),
        check(S, "231,4132-avoiders", "Pallo series", |mk| {
            class_vs_formula("231;4132", FormulaId::Pallo, mk.min(6))
        }),
        check(S, "nice split identity", "series residual", |_| {
            let r = series::nice_split_residual(13);
            ensure(r.iter().all(Zero::is_zero), || format!("{r:?}"))?;
            Ok("order 13".into())
        }),
        check(S, "singleton and empty classes", "explicit members", |mk| {
            let top = mk.min(5);
            singleton_classes(2..=top)?;
            Ok(format!("2 <= k <= {top}"))
        }),
        check(S, "empty length-3 classes", "123 and 213", |mk| {
            let top = mk.min(5);
            for k in 2..=top {
                ensure(class_count(k, "123") == 0 && class_count(k, "213") == 0, || format!("k={k}"))?;
            }
            Ok(format!("2 <= k <= {top}"))
        }),
        check(S, "published 231,4123 prefix", "printed values", |mk| {
            let top = mk.min(5);
            let got: Vec<u64> = (0..=top).map(|k| class_count(k, PUBLISHED_CLASS)).collect();
            ensure(got == PUBLISHED_COUNTS[..=top], || format!("{got:?}"))?;
            Ok(format!("{got:?}"))
        }),
        check(S, "two-pattern table against reference", "reference drift", |mk| {
            let top = mk.min(5);
            let drift = reference_drift(top);
            ensure(drift.is_empty(), || drift.join("; "))?;
            Ok(format!("{} classes, k <= {top}", TABLE_CLASSES.len()))
        }),
    ]
}

fn class_vs_formula(p: &str, f: FormulaId, top: usize) -> Outcome {
    let mut got = Vec::new();
    for k in 0..=top {
        let c = class_count(k, p);
        let want = closed_form(f, k as u64);
        ensure(BigUint::from(c) == want, || format!("k={k}: {c} vs {want}"))?;
        got.push(c);
    }
    Ok(format!("{got:?}"))
}

/// DL and its inverse agree with each other and with the interval count.
pub fn dl_bijection(top: usize) -> std::result::Result<(), String> {
    for k in 0..=top {
        let perms = class(k, "312");
        let ivs = dyck::enumerate_intervals(k, PosetKind::Stanley, &Limits::unlimited()).map_err(err)?;
        let image: HashSet<DyckInterval> = perms
            .par_iter()
            .map(|q| bijections::dl_forward(q).map_err(err))
            .collect::<std::result::Result<_, _>>()?;
        ensure(image.len() == perms.len(), || format!("not injective at k={k}"))?;
        ensure(image == ivs.iter().copied().collect(), || format!("image at k={k}"))?;
        for q in &perms {
            let iv = bijections::dl_forward(q).map_err(err)?;
            ensure(&bijections::dl_inverse(&iv.lower, &iv.upper).map_err(err)? == q, || q.to_string())?;
        }
        for iv in &ivs {
            let q = bijections::dl_inverse(&iv.lower, &iv.upper).map_err(err)?;
            ensure(bijections::dl_forward(&q).map_err(err)? == *iv, || iv.to_string())?;
        }
    }
    let pinned = bijections::dl_forward(&"3254167".parse().unwrap()).map_err(err)?;
    ensure(pinned.to_string() == "UUDDUD;UUDUDD", || pinned.to_string())
}

/// The sortable-after-swr part of DL's image is exactly the Tamari
/// intervals, and `DL ∘ swl` is a bijection from the 132-avoiders.
pub fn tamari_bijection(top: usize) -> std::result::Result<(), String> {
    for k in 0..=top {
        let tamari: HashSet<DyckInterval> = dyck::enumerate_intervals(k, PosetKind::Tamari, &Limits::unlimited())
            .map_err(err)?
            .into_iter()
            .map(|iv| DyckInterval { kind: PosetKind::Stanley, ..iv })
            .collect();
        let mut image = HashSet::new();
        for q in class(k, "312") {
            let iv = bijections::dl_forward(&q).map_err(err)?;
            let sortable = is_sorted(&slide(&q, SlideOp::Swr));
            ensure(sortable == tamari.contains(&iv), || format!("{q}"))?;
            if sortable {
                image.insert(iv);
            }
        }
        ensure(image == tamari, || format!("image at k={k}"))?;
        let want = closed_form(FormulaId::Tamari, k as u64);
        ensure(BigUint::from(tamari.len()) == want, || format!("count at k={k}"))?;
        let perms = class(k, "132");
        let direct: HashSet<DyckInterval> = perms
            .iter()
            .map(|q| bijections::tamari_forward(q).map(|iv| DyckInterval { kind: PosetKind::Stanley, ..iv }))
            .collect::<Result<_>>()
            .map_err(err)?;
        ensure(direct.len() == perms.len() && direct == tamari, || format!("DL∘swl at k={k}"))?;
    }
    let q = slide(&"2154367".parse().unwrap(), SlideOp::Swu);
    let iv = bijections::tamari_forward(&q).map_err(err)?;
    ensure(iv.to_string() == "UUDDUD;UUUDDD", || iv.to_string())?;
    let pallo = dyck::leq(&iv.lower, &iv.upper, PosetKind::Pallo).map_err(err)?;
    ensure(!pallo, || "pinned interval is a Pallo interval".into())
}

/// `Υ` is injective, its image is every interval, and labels correspond.
pub fn upsilon_bijection(top: usize) -> std::result::Result<(), String> {
    for k in 1..=top {
        let perms = class(k, "312;1342");
        let image: HashSet<NCInterval> = perms
            .par_iter()
            .map(|q| bijections::upsilon_tree(q).map_err(err))
            .collect::<std::result::Result<_, _>>()?;
        ensure(image.len() == perms.len(), || format!("not injective at k={k}"))?;
        let all: HashSet<NCInterval> = noncross::enumerate_nc_intervals(k).into_iter().collect();
        ensure(image == all, || format!("image at k={k}"))?;
        if k <= 4 {
            for q in &perms {
                let iv = bijections::upsilon_tree(q).map_err(err)?;
                ensure(gentree::perm_shape(q).map_err(err)? == iv.shape(), || q.to_string())?;
            }
        }
    }
    Ok(())
}

/// Members of `U_{2k+1}(312, 1342)`, `k <= top`, where the direct and
/// tree descriptions differ.
pub fn upsilon_disagreements(top: usize) -> Vec<String> {
    (0..=top)
        .flat_map(|k| class(k, "312;1342"))
        .filter_map(|q| {
            let a = bijections::upsilon_direct(&q);
            let b = bijections::upsilon_tree(&q);
            match (a, b) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => Some(format!("{q}: direct {a:?}, tree {b:?}")),
            }
        })
        .collect()
}

/// The four Catalan classes and their maps.
pub fn antichain_bijections(top: usize) -> std::result::Result<(), String> {
    for k in 0..=top {
        let cat = catalan(k as u64);
        let q321 = class(k, "321");
        ensure(BigUint::from(q321.len()) == cat, || format!("321 at k={k}"))?;
        let mut pfs = HashSet::new();
        for q in &q321 {
            let a = bijections::parking_forward(q).map_err(err)?;
            ensure(&bijections::parking_inverse(&a) == q, || q.to_string())?;
            pfs.insert(a);
        }
        ensure(pfs.len() == q321.len(), || format!("parking not injective at k={k}"))?;
        let paths: HashSet<_> = dyck::enumerate_paths(k).collect();
        for map in AntichainMap::ALL {
            let perms = class(k, &format_patterns(&map.domain()));
            ensure(BigUint::from(perms.len()) == cat, || format!("{map} at k={k}"))?;
            let mut image = HashSet::new();
            for q in &perms {
                let iv = map.forward(q).map_err(err)?;
                ensure(iv.lower == iv.upper, || format!("{map}({q})"))?;
                ensure(&map.inverse(&iv.lower).map_err(err)? == q, || format!("{map}({q})"))?;
                image.insert(iv.lower);
            }
            ensure(image == paths, || format!("{map} image at k={k}"))?;
        }
    }
    Ok(())
}

/// The four singleton classes and the empty one, over `ks`.
pub fn singleton_classes(ks: std::ops::RangeInclusive<usize>) -> std::result::Result<(), String> {
    for k in ks {
        let alt = alternating_element(k);
        for p in ["231;321", "312;321", "231;312;321"] {
            let got = class(k, p);
            ensure(got == [alt.clone()], || format!("{p} at k={k}: {got:?}"))?;
        }
        let got = class(k, "132;231;312");
        ensure(got == [peak_element(k)], || format!("132;231;312 at k={k}: {got:?}"))?;
        ensure(class_count(k, "132;321") == 0, || format!("132;321 at k={k}"))?;
    }
    Ok(())
}

/// Differences between fresh counts and the bundled reference file.
pub fn reference_drift(top: usize) -> Vec<String> {
    let rows = reference_rows();
    let mut drift = Vec::new();
    for class in TABLE_CLASSES {
        for k in 0..=top {
            let Some(row) = rows.iter().find(|r| r.class == class && r.k == k) else {
                drift.push(format!("{class} k={k}: no reference"));
                continue;
            };
            let got = BigUint::from(class_count(k, class));
            if got != row.count {
                drift.push(format!("{class} k={k}: {got} vs reference {}", row.count));
            }
        }
    }
    drift
}

fn suite_checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Lemmas => lemma_checks(),
        Suite::Posets => poset_checks(),
        Suite::Bijections => bijection_checks(),
        Suite::Sequences => sequence_checks(),
        Suite::All => [lemma_checks(), poset_checks(), bijection_checks(), sequence_checks()]
            .into_iter()
            .flatten()
            .collect(),
    }
}

/// Runs a suite with every size parameter capped at `max_k`. Checks run in
/// parallel; the report keeps suite order.
pub fn verify(suite: Suite, max_k: usize) -> Report {
    let checks = suite_checks(suite);
    let results = checks
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)(max_k);
            let millis = start.elapsed().as_millis();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                suite: c.suite,
                name: c.name,
                anchor: c.anchor,
                passed,
                detail,
                millis,
            }
        })
        .collect();
    Report { checks: results }
}
