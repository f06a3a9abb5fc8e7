//! The stack-sorting map, fertility, and canonical hook configurations.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::{self, Limits};
use crate::perm::{self, Pattern, Permutation};

/// One pass of a stack: push entries, popping every smaller entry first,
/// then flush. Equivalent to `s(LnR) = s(L) s(R) n`.
pub fn stack_sort(p: &Permutation) -> Permutation {
    let mut out = Vec::with_capacity(p.len());
    stack_sort_into(p.entries(), &mut Vec::with_capacity(p.len()), &mut out);
    Permutation::new(out).expect("stack sorting preserves distinctness")
}

fn stack_sort_into(input: &[u32], stack: &mut Vec<u32>, out: &mut Vec<u32>) {
    stack.clear();
    out.clear();
    for &x in input {
        while let Some(&top) = stack.last() {
            if top < x {
                out.push(top);
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(x);
    }
    out.extend(stack.drain(..).rev());
}

/// A hook from its southwest endpoint to its northeast endpoint, as 1-based
/// positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hook {
    pub sw: usize,
    pub ne: usize,
}

/// Canonical hooks, one per descent, listed in increasing descent order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HookConfiguration {
    pub hooks: Vec<Hook>,
}

impl HookConfiguration {
    pub fn len(&self) -> usize {
        self.hooks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hooks.is_empty()
    }

    pub fn ne_endpoints(&self) -> Vec<usize> {
        self.hooks.iter().map(|h| h.ne).collect()
    }

    pub fn with_sw(&self, sw: usize) -> Option<Hook> {
        self.hooks.iter().copied().find(|h| h.sw == sw)
    }

    pub fn with_ne(&self, ne: usize) -> Option<Hook> {
        self.hooks.iter().copied().find(|h| h.ne == ne)
    }
}

/// The construction stalled: the descent top at this position found no
/// northeast endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unsorted {
    pub descent_top: usize,
}

/// Builds the canonical hook configuration.
///
/// Descent tops are handled from right to left. Each takes as northeast
/// endpoint the leftmost point above and to its right that is not weakly
/// below an already placed hook. Only the relative order of entries is used.
pub fn canonical_hooks(p: &Permutation) -> std::result::Result<HookConfiguration, Unsorted> {
    let e = p.entries();
    let n = e.len();
    let descents = p.descents();
    let mut blocked = vec![false; n];
    let mut hooks = vec![Hook { sw: 0, ne: 0 }; descents.len()];
    for (slot, &d) in descents.iter().enumerate().rev() {
        let i = d - 1;
        let ne = (i + 1..n)
            .find(|&r| e[r] > e[i] && !blocked[r])
            .ok_or(Unsorted { descent_top: d })?;
        for r in i + 1..ne {
            if e[r] < e[ne] {
                blocked[r] = true;
            }
        }
        blocked[ne] = true;
        hooks[slot] = Hook { sw: d, ne: ne + 1 };
    }
    Ok(HookConfiguration { hooks })
}

/// Sorted means fertility at least one; equivalently a canonical hook
/// configuration exists.
pub fn is_sorted(p: &Permutation) -> bool {
    canonical_hooks(p).is_ok()
}

/// Fertility exactly one: sorted with `(n-1)/2` descents.
pub fn is_uniquely_sorted(p: &Permutation) -> bool {
    2 * p.des() + 1 == p.len() && is_sorted(p)
}

/// Least `l` such that `p ⊕ 12...l` is sorted.
pub fn deficiency(p: &Permutation) -> usize {
    let base = p.normalize().into_entries();
    let n = base.len() as u32;
    let mut ext = base;
    let mut l = 0;
    loop {
        if canonical_hooks(&Permutation::from_vec_unchecked(ext.clone())).is_ok() {
            return l;
        }
        l += 1;
        ext.push(n + l as u32);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FertilityMethod {
    Brute,
    #[default]
    Census,
}

impl FromStr for FertilityMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Self::Brute),
            "census" => Ok(Self::Census),
            _ => Err(Error::Unknown {
                what: "fertility method",
                name: s.into(),
            }),
        }
    }
}

impl fmt::Display for FertilityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Brute => "brute",
            Self::Census => "census",
        })
    }
}

/// `|s^{-1}(p)|` for a normalized `p`.
pub fn fertility(p: &Permutation, method: FertilityMethod, limits: &Limits) -> Result<u64> {
    p.require_normalized()?;
    match method {
        FertilityMethod::Brute => {
            limits.check("brute fertility length", p.len(), limits::BRUTE_FERTILITY_MAX_N)?;
            Ok(fertility_brute(p))
        }
        FertilityMethod::Census => {
            limits.check("census length", p.len(), limits::CENSUS_MAX_N)?;
            Ok(census(p.len()).fertility(p))
        }
    }
}

fn fertility_brute(p: &Permutation) -> u64 {
    let target = p.entries();
    let n = target.len();
    (1..=n.max(1) as u32)
        .into_par_iter()
        .map(|first| {
            if n == 0 {
                return 1;
            }
            let mut sigma = with_first(n, first);
            let (mut stack, mut out) = (Vec::with_capacity(n), Vec::with_capacity(n));
            let mut hits = 0u64;
            loop {
                stack_sort_into(&sigma, &mut stack, &mut out);
                hits += (out == target) as u64;
                if !perm::next_permutation(&mut sigma[1..]) {
                    return hits;
                }
            }
        })
        .sum()
}

/// Lexicographically first arrangement of `1..=n` starting with `first`.
fn with_first(n: usize, first: u32) -> Vec<u32> {
    std::iter::once(first)
        .chain((1..=n as u32).filter(|&v| v != first))
        .collect()
}

/// Multiplicity of every image of `s` on `S_n`, indexed by lexicographic
/// rank.
pub struct FertilityCensus {
    n: usize,
    counts: Vec<u32>,
}

impl FertilityCensus {
    pub fn build(n: usize) -> Self {
        let total: usize = (1..=n).product();
        let counts: Vec<AtomicU32> = (0..total).map(|_| AtomicU32::new(0)).collect();
        (1..=n.max(1) as u32).into_par_iter().for_each(|first| {
            if n == 0 {
                counts[0].fetch_add(1, Ordering::Relaxed);
                return;
            }
            let mut sigma = with_first(n, first);
            let (mut stack, mut out) = (Vec::with_capacity(n), Vec::with_capacity(n));
            loop {
                stack_sort_into(&sigma, &mut stack, &mut out);
                counts[perm::lex_rank(&out)].fetch_add(1, Ordering::Relaxed);
                if !perm::next_permutation(&mut sigma[1..]) {
                    break;
                }
            }
        });
        Self {
            n,
            counts: counts.into_iter().map(AtomicU32::into_inner).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fertility(&self, p: &Permutation) -> u64 {
        assert_eq!(p.len(), self.n, "census built for a different length");
        self.counts[perm::lex_rank(p.entries())] as u64
    }

    /// Fertilities of `S_n` in lexicographic order.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// Upper bound on the total number of cached census entries.
const CENSUS_CACHE_BUDGET: usize = 1 << 26;

fn census_cache() -> &'static Mutex<Vec<Arc<FertilityCensus>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<FertilityCensus>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// Shared census for `S_n`, built on first use. Older entries are evicted
/// once the cache would exceed its size budget.
pub fn census(n: usize) -> Arc<FertilityCensus> {
    if let Some(c) = census_cache().lock().unwrap().iter().find(|c| c.n == n) {
        return Arc::clone(c);
    }
    let built = Arc::new(FertilityCensus::build(n));
    let mut cache = census_cache().lock().unwrap();
    if let Some(c) = cache.iter().find(|c| c.n == n) {
        return Arc::clone(c);
    }
    let mut size: usize = cache.iter().map(|c| c.counts.len()).sum::<usize>() + built.counts.len();
    while size > CENSUS_CACHE_BUDGET && !cache.is_empty() {
        size -= cache.remove(0).counts.len();
    }
    cache.push(Arc::clone(&built));
    built
}

/// `U_{2k+1}(pats)` in lexicographic order.
pub fn enumerate_uniquely_sorted(
    k: usize,
    pats: &[Pattern],
    limits: &Limits,
) -> Result<impl Iterator<Item = Permutation>> {
    if pats.is_empty() {
        limits.check("k (unrestricted)", k, limits::UNRESTRICTED_UNIQUE_MAX_K)?;
    }
    let n = 2 * k + 1;
    Ok(perm::enumerate_avoiders(n, pats)
        .filter(move |p| p.entries()[n - 1] as usize == n && is_uniquely_sorted(p)))
}

/// `|U_{2k+1}(pats)|`, counted in parallel.
pub fn count_uniquely_sorted(k: usize, pats: &[Pattern], limits: &Limits) -> Result<u64> {
    if pats.is_empty() {
        limits.check("k (unrestricted)", k, limits::UNRESTRICTED_UNIQUE_MAX_K)?;
    }
    Ok(count_uniquely_sorted_unguarded(k, pats))
}

pub(crate) fn count_uniquely_sorted_unguarded(k: usize, pats: &[Pattern]) -> u64 {
    let n = 2 * k + 1;
    perm::par_count_avoiders(n, pats, true, |e| {
        let des = e.windows(2).filter(|w| w[0] > w[1]).count();
        des == k && is_sorted(&Permutation::from_vec_unchecked(e.to_vec()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    // Literal recursion s(LnR) = s(L) s(R) n.
    fn s_oracle(e: &[u32]) -> Vec<u32> {
        let Some((i, &m)) = e.iter().enumerate().max_by_key(|(_, &v)| v) else {
            return Vec::new();
        };
        let mut out = s_oracle(&e[..i]);
        out.extend(s_oracle(&e[i + 1..]));
        out.push(m);
        out
    }

    fn fertility_oracle(n: usize) -> std::collections::HashMap<Vec<u32>, u64> {
        let mut m = std::collections::HashMap::new();
        for q in all_permutations(n) {
            *m.entry(s_oracle(q.entries())).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn stack_sort_examples() {
        assert_eq!(stack_sort(&p("35241")), p("32145"));
        assert_eq!(stack_sort(&p("231")), p("213"));
        assert_eq!(stack_sort(&Permutation::identity(6)), Permutation::identity(6));
        assert_eq!(stack_sort(&Permutation::empty()), Permutation::empty());
    }

    #[test]
    fn repeated_sorting_reaches_identity() {
        for n in 1..=7 {
            for q in all_permutations(n) {
                let mut r = q.clone();
                for _ in 0..n - 1 {
                    r = stack_sort(&r);
                }
                assert_eq!(r, Permutation::identity(n), "{q}");
            }
        }
    }

    #[test]
    fn fertility_examples() {
        let lim = Limits::default();
        for (n, c) in [(1, 1), (2, 2), (3, 5), (4, 14), (5, 42), (6, 132)] {
            let id = Permutation::identity(n);
            assert_eq!(fertility(&id, FertilityMethod::Brute, &lim).unwrap(), c);
            assert_eq!(fertility(&id, FertilityMethod::Census, &lim).unwrap(), c);
        }
        assert_eq!(fertility(&p("213"), FertilityMethod::Brute, &lim).unwrap(), 1);
        assert_eq!(fertility(&p("21"), FertilityMethod::Brute, &lim).unwrap(), 0);
        let long = Permutation::identity(12);
        assert!(matches!(
            fertility(&long, FertilityMethod::Brute, &lim),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(fertility(&p("13"), FertilityMethod::Brute, &lim).is_err());
    }

    #[test]
    fn census_matches_recursion_oracle() {
        for n in 0..=7 {
            let oracle = fertility_oracle(n);
            let c = census(n);
            for q in all_permutations(n) {
                let want = oracle.get(q.entries()).copied().unwrap_or(0);
                assert_eq!(c.fertility(&q), want, "{q}");
            }
        }
    }

    #[test]
    fn hooks_of_figure_permutation() {
        let q = p("2,7,3,5,9,4,8,1,6,10,11,12");
        let h = canonical_hooks(&q).unwrap();
        assert!(h.hooks.contains(&Hook { sw: 5, ne: 11 }));
        assert_eq!(h.len(), q.des());
        assert!(canonical_hooks(&p("12345")).unwrap().is_empty());
    }

    #[test]
    fn unsorted_example() {
        let q = p("51427638");
        assert!(canonical_hooks(&q).is_err());
        assert!(!is_sorted(&q));
        assert_eq!(deficiency(&q), 2);
        assert_eq!(deficiency(&p("21")), 1);
        assert_eq!(deficiency(&Permutation::identity(4)), 0);
    }

    #[test]
    fn membership_examples() {
        assert!(is_sorted(&p("3254167")));
        assert!(is_uniquely_sorted(&p("2154367")));
        assert!(!is_uniquely_sorted(&p("12345")));
        assert!(!is_uniquely_sorted(&p("2143")));
    }

    #[test]
    fn sortedness_matches_fertility_oracle() {
        for n in 1..=7 {
            let oracle = fertility_oracle(n);
            for q in all_permutations(n) {
                let f = oracle.get(q.entries()).copied().unwrap_or(0);
                assert_eq!(is_sorted(&q), f >= 1, "{q}");
                assert_eq!(is_uniquely_sorted(&q), f == 1, "{q}");
            }
        }
    }

    #[test]
    fn hook_configuration_shape() {
        // Descent tops are the sw endpoints; hooks neither cross nor pass
        // below a point.
        for n in 1..=7 {
            for q in all_permutations(n) {
                let Ok(h) = canonical_hooks(&q) else { continue };
                let e = q.entries();
                let sws: Vec<usize> = h.hooks.iter().map(|x| x.sw).collect();
                assert_eq!(sws, q.descents());
                for x in &h.hooks {
                    assert!(x.sw < x.ne && e[x.sw - 1] < e[x.ne - 1]);
                    for r in x.sw + 1..x.ne {
                        assert!(e[r - 1] < e[x.ne - 1], "{q}: point {r} above hook");
                    }
                }
            }
        }
    }

    #[test]
    fn unique_descent_bottoms_and_ne_partition() {
        for k in 0..=4 {
            let n = 2 * k + 1;
            for q in enumerate_uniquely_sorted(k, &[], &Limits::default()).unwrap() {
                let h = canonical_hooks(&q).unwrap();
                let mut pts: Vec<usize> = q.descents().iter().map(|d| d + 1).collect();
                pts.extend(h.ne_endpoints());
                pts.sort();
                assert_eq!(pts, (2..=n).collect::<Vec<_>>(), "{q}");
            }
        }
    }

    #[test]
    fn ltr_maxima_of_312_avoiders_are_first_plus_ne() {
        let pats = [Pattern::from_str("312").unwrap()];
        for k in 0..=5 {
            for q in enumerate_uniquely_sorted(k, &pats, &Limits::default()).unwrap() {
                let mut want = vec![1];
                let mut ne = canonical_hooks(&q).unwrap().ne_endpoints();
                ne.sort();
                want.extend(ne);
                assert_eq!(q.left_to_right_maxima(), want, "{q}");
            }
        }
    }

    #[test]
    fn census_of_uniquely_sorted() {
        for k in 0..=3 {
            let oracle = fertility_oracle(2 * k + 1);
            let want = oracle.values().filter(|&&f| f == 1).count() as u64;
            assert_eq!(count_uniquely_sorted(k, &[], &Limits::default()).unwrap(), want);
        }
        assert!(count_uniquely_sorted(6, &[], &Limits::default()).is_err());
        let u1: Vec<_> = enumerate_uniquely_sorted(1, &[], &Limits::default()).unwrap().collect();
        assert_eq!(u1, vec![p("213")]);
    }

    #[test]
    fn first_entry_distribution_is_palindromic() {
        for k in 0..=3 {
            let n = 2 * k + 1;
            let mut by_first = vec![0u64; n];
            for q in enumerate_uniquely_sorted(k, &[], &Limits::default()).unwrap() {
                by_first[q.at(1) as usize - 1] += 1;
            }
            let mut rev = by_first.clone();
            rev.reverse();
            assert_eq!(by_first, rev);
        }
    }

    #[test]
    fn singleton_classes() {
        let pats = perm::parse_patterns("231;321").unwrap();
        let v: Vec<_> = enumerate_uniquely_sorted(2, &pats, &Limits::default()).unwrap().collect();
        assert_eq!(v, vec![p("21435")]);
        let pats = perm::parse_patterns("132;231;312").unwrap();
        let v: Vec<_> = enumerate_uniquely_sorted(2, &pats, &Limits::default()).unwrap().collect();
        assert_eq!(v, vec![p("32145")]);
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (0..=max)
            .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn simulation_agrees_with_recursion(q in arb_perm(40)) {
            prop_assert_eq!(stack_sort(&q).into_entries(), s_oracle(q.entries()));
        }

        #[test]
        fn sortedness_ignores_value_gaps(q in arb_perm(14), gap in 1u32..5) {
            let spread = Permutation::new(q.entries().iter().map(|v| v * gap + 7).collect()).unwrap();
            prop_assert_eq!(is_sorted(&spread), is_sorted(&q));
        }

        #[test]
        fn deficiency_zero_iff_sorted(q in arb_perm(12)) {
            prop_assert_eq!(deficiency(&q) == 0, is_sorted(&q));
        }
    }
}
