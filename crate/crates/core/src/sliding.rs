//! Sliding operators on permutation plots.
//!
//! `swu_i` slides the points below height `i` that sit to its right down to
//! the bottom, and those to its left up against it. The other three
//! operators are its conjugates under reversal and rotation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlideOp {
    Swu,
    Swd,
    Swl,
    Swr,
}

impl SlideOp {
    pub const ALL: [SlideOp; 4] = [Self::Swu, Self::Swd, Self::Swl, Self::Swr];
}

impl FromStr for SlideOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swu" => Ok(Self::Swu),
            "swd" => Ok(Self::Swd),
            "swl" => Ok(Self::Swl),
            "swr" => Ok(Self::Swr),
            _ => Err(Error::Unknown {
                what: "sliding operator",
                name: s.into(),
            }),
        }
    }
}

impl fmt::Display for SlideOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Swu => "swu",
            Self::Swd => "swd",
            Self::Swl => "swl",
            Self::Swr => "swr",
        })
    }
}

/// `swu_i` on normalized entries, in place.
fn swu_index(e: &mut [u32], i: u32) {
    let pos = e.iter().position(|&v| v == i).expect("value present");
    let mut right: Vec<usize> = (pos + 1..e.len()).filter(|&j| e[j] < i).collect();
    let mut left: Vec<usize> = (0..pos).filter(|&j| e[j] < i).collect();
    right.sort_unstable_by_key(|&j| e[j]);
    left.sort_unstable_by_key(|&j| std::cmp::Reverse(e[j]));
    for (m, &j) in right.iter().enumerate() {
        e[j] = m as u32 + 1;
    }
    for (m, &j) in left.iter().enumerate() {
        e[j] = i - (m as u32 + 1);
    }
}

fn indexed_normalized(p: &Permutation, op: SlideOp, i: usize) -> Permutation {
    let apply = |q: Permutation| {
        let mut e = q.into_entries();
        swu_index(&mut e, i as u32);
        Permutation::from_vec_unchecked(e)
    };
    match op {
        SlideOp::Swu => apply(p.clone()),
        SlideOp::Swd => apply(p.reverse()).reverse(),
        SlideOp::Swl => apply(p.rot_unchecked()).rot_inverse_unchecked(),
        SlideOp::Swr => apply(p.rot_unchecked().reverse()).reverse().rot_inverse_unchecked(),
    }
}

fn composite_normalized(p: &Permutation, op: SlideOp) -> Permutation {
    let n = p.len();
    let all_swu = |q: Permutation| {
        let mut e = q.into_entries();
        for i in (1..=n as u32).rev() {
            swu_index(&mut e, i);
        }
        Permutation::from_vec_unchecked(e)
    };
    match op {
        SlideOp::Swu => all_swu(p.clone()),
        SlideOp::Swd => all_swu(p.reverse()).reverse(),
        SlideOp::Swl => all_swu(p.rot_unchecked()).rot_inverse_unchecked(),
        SlideOp::Swr => all_swu(p.rot_unchecked().reverse()).reverse().rot_inverse_unchecked(),
    }
}

fn through_normalization(p: &Permutation, f: impl FnOnce(&Permutation) -> Permutation) -> Permutation {
    if p.is_normalized() {
        f(p)
    } else {
        Permutation::unnormalize_onto(&f(&p.normalize()), p)
    }
}

/// One indexed operator, e.g. `swu_4`. Non-normalized input is normalized,
/// processed, and mapped back onto its original values.
pub fn slide_indexed(p: &Permutation, op: SlideOp, i: usize) -> Result<Permutation> {
    if i == 0 || i > p.len() {
        return Err(Error::IndexOutOfRange { index: i, len: p.len() });
    }
    Ok(through_normalization(p, |q| indexed_normalized(q, op, i)))
}

/// The composite `op_1 ∘ op_2 ∘ ... ∘ op_n`, applying index `n` first.
pub fn slide(p: &Permutation, op: SlideOp) -> Permutation {
    through_normalization(p, |q| composite_normalized(q, op))
}
