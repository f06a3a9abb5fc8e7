//! Randomized roundtrips at sizes past the exhaustive unit checks.

use proptest::prelude::*;
use std::sync::OnceLock;

use ussort_core::bijections::{self, ParkingFunction};
use ussort_core::dyck::{self, DyckPath, PosetKind};
use ussort_core::noncross::{self, NCInterval};
use ussort_core::perm::parse_patterns;
use ussort_core::sliding::{slide, SlideOp};
use ussort_core::stacksort::{self, is_sorted, is_uniquely_sorted, FertilityMethod};
use ussort_core::{Limits, Permutation};

/// Cycle lemma: a word with `k` ups and `k+1` downs has one rotation whose
/// proper prefixes all stay nonnegative; dropping its final down gives a
/// Dyck path.
fn path_from_word(word: &[bool]) -> DyckPath {
    let mut h = 0i32;
    let mut low = (0i32, 0usize);
    for (i, &up) in word.iter().enumerate() {
        h += if up { 1 } else { -1 };
        if h < low.0 {
            low = (h, i + 1);
        }
    }
    let rotated: Vec<bool> = word[low.1..].iter().chain(&word[..low.1]).copied().collect();
    DyckPath::from_steps(&rotated[..rotated.len() - 1]).unwrap()
}

fn dyck_path(k: usize) -> impl Strategy<Value = DyckPath> {
    Just((0..2 * k + 1).map(|i| i < k).collect::<Vec<bool>>())
        .prop_shuffle()
        .prop_map(|w| path_from_word(&w))
}

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|e| Permutation::new(e).unwrap())
}

fn nc_intervals_7() -> &'static [NCInterval] {
    static CELL: OnceLock<Vec<NCInterval>> = OnceLock::new();
    CELL.get_or_init(|| noncross::enumerate_nc_intervals(7))
}

fn pallo_class() -> &'static [Vec<Permutation>] {
    static CELL: OnceLock<Vec<Vec<Permutation>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let pats = parse_patterns("231;4132").unwrap();
        (0..=6)
            .map(|k| {
                stacksort::enumerate_uniquely_sorted(k, &pats, &Limits::default())
                    .unwrap()
                    .collect()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stack_sort_images_are_fertile(p in permutation(8)) {
        let s = stacksort::stack_sort(&p);
        prop_assert!(is_sorted(&s));
        let f = stacksort::fertility(&s, FertilityMethod::Census, &Limits::default()).unwrap();
        prop_assert!(f >= 1);
        let brute = stacksort::fertility(&s, FertilityMethod::Brute, &Limits::default()).unwrap();
        prop_assert_eq!(f, brute);
    }

    #[test]
    fn dl_inverse_lands_in_class(k in 1usize..=7, a in any::<u64>(), b in any::<u64>()) {
        let paths: Vec<DyckPath> = dyck::enumerate_paths(k).collect();
        let (x, y) = (paths[a as usize % paths.len()], paths[b as usize % paths.len()]);
        let (lo, hi) = if dyck::leq(&x, &y, PosetKind::Stanley).unwrap() { (x, y) } else { (y, x) };
        match bijections::dl_inverse(&lo, &hi) {
            Ok(p) => {
                prop_assert!(is_uniquely_sorted(&p));
                prop_assert!(p.avoids_all(&parse_patterns("312").unwrap()));
                let iv = bijections::dl_forward(&p).unwrap();
                prop_assert_eq!((iv.lower, iv.upper), (lo, hi));
            }
            Err(_) => prop_assert!(!dyck::leq(&lo, &hi, PosetKind::Stanley).unwrap()),
        }
    }

    #[test]
    fn dl_roundtrip_on_random_paths(lo in dyck_path(8), hi in dyck_path(8)) {
        if dyck::leq(&lo, &hi, PosetKind::Stanley).unwrap() {
            let p = bijections::dl_inverse(&lo, &hi).unwrap();
            let iv = bijections::dl_forward(&p).unwrap();
            prop_assert_eq!((iv.lower, iv.upper), (lo, hi));
            let cells = bijections::cell_matrix(&p).unwrap();
            prop_assert_eq!(bijections::permutation_from_cells(&cells), p);
        } else {
            prop_assert!(bijections::dl_inverse(&lo, &hi).is_err());
        }
    }

    #[test]
    fn tamari_roundtrip_on_random_paths(lo in dyck_path(7), hi in dyck_path(7)) {
        if dyck::leq(&lo, &hi, PosetKind::Tamari).unwrap() {
            let p = bijections::tamari_inverse(&lo, &hi).unwrap();
            prop_assert!(p.avoids_all(&parse_patterns("132").unwrap()));
            prop_assert!(is_uniquely_sorted(&p));
            let iv = bijections::tamari_forward(&p).unwrap();
            prop_assert_eq!((iv.lower, iv.upper), (lo, hi));
            prop_assert_eq!(slide(&slide(&p, SlideOp::Swd), SlideOp::Swu), p);
        }
    }

    #[test]
    fn upsilon_roundtrip_at_seven(i in any::<usize>()) {
        let all = nc_intervals_7();
        let iv = &all[i % all.len()];
        let p = bijections::upsilon_tree_inverse(iv).unwrap();
        prop_assert!(is_uniquely_sorted(&p));
        prop_assert!(p.avoids_all(&parse_patterns("312;1342").unwrap()));
        prop_assert_eq!(&bijections::upsilon_tree(&p).unwrap(), iv);
        prop_assert_eq!(&bijections::upsilon_direct(&p).unwrap(), iv);
    }

    #[test]
    fn parking_roundtrip(raw in (1usize..=10).prop_flat_map(|k| (1..=k).map(|i| 1..=i as u32).collect::<Vec<_>>())) {
        let mut v = raw;
        v.sort_unstable();
        let a = ParkingFunction::new(v).unwrap();
        let p = bijections::parking_inverse(&a);
        prop_assert!(is_uniquely_sorted(&p));
        prop_assert!(p.avoids_all(&parse_patterns("321").unwrap()));
        prop_assert_eq!(bijections::parking_forward(&p).unwrap(), a);
    }

    #[test]
    fn pallo_roundtrip_on_random_members(seed in any::<usize>(), k in 1usize..=6) {
        let members = &pallo_class()[k];
        let p = &members[seed % members.len()];
        let d = bijections::pallo_decompose(p).unwrap();
        prop_assert_eq!(&bijections::pallo_recompose(&d).unwrap(), p);
    }
}

#[test]
fn cycle_lemma_helper_hits_every_path() {
    use std::collections::HashSet;
    let k = 3;
    let mut seen = HashSet::new();
    for mask in 0u32..1 << (2 * k + 1) {
        if mask.count_ones() as usize == k {
            let w: Vec<bool> = (0..2 * k + 1).map(|i| mask >> i & 1 == 1).collect();
            seen.insert(path_from_word(&w));
        }
    }
    assert_eq!(seen.len(), 5);
}
