//! The generating tree of uniquely sorted permutations avoiding 312 and
//! 1342: skylines, conjoined points, labels and the child operations.

use crate::error::{Error, Result};
use crate::perm::{Pattern, Permutation};
use crate::stacksort::{canonical_hooks, is_uniquely_sorted, Hook};

fn class_patterns() -> [Pattern; 2] {
    ["312".parse().unwrap(), "1342".parse().unwrap()]
}

/// Checks membership in `U_{2k+1}(312, 1342)`.
pub fn require_class(p: &Permutation) -> Result<()> {
    p.require_normalized()?;
    let fail = |reason: String| {
        Err(Error::Precondition {
            perm: p.to_string(),
            reason,
        })
    };
    if !is_uniquely_sorted(p) {
        return fail("not uniquely sorted".into());
    }
    for pat in class_patterns() {
        if p.contains(&pat) {
            return fail(format!("contains {pat}"));
        }
    }
    Ok(())
}

/// The chain of canonical hooks from position 1 to the last position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skyline {
    /// Positions on the chain, left to right, starting at 1.
    pub points: Vec<usize>,
    /// Hooks joining consecutive points, left to right.
    pub hooks: Vec<Hook>,
}

pub fn skyline(p: &Permutation) -> Result<Skyline> {
    require_class(p)?;
    skyline_unchecked(p)
}

fn skyline_unchecked(p: &Permutation) -> Result<Skyline> {
    let config = canonical_hooks(p).map_err(|u| Error::BrokenChain(format!(
        "{p} has no canonical hook configuration (descent top {})",
        u.descent_top
    )))?;
    let n = p.len();
    let mut points = vec![1];
    let mut hooks = Vec::new();
    let mut at = 1;
    while at < n {
        let h = config
            .with_sw(at)
            .ok_or_else(|| Error::BrokenChain(format!("{p}: no hook leaves position {at}")))?;
        hooks.push(h);
        points.push(h.ne);
        at = h.ne;
    }
    Ok(Skyline { points, hooks })
}

/// `p_q = p_{q+1} + 1`; the last position is never conjoined.
pub fn is_conjoined(p: &Permutation, q: usize) -> bool {
    q >= 1 && q < p.len() && p.at(q) == p.at(q + 1) + 1
}

/// Skyline hooks grouped for the label: group `i` starts at the `i`-th
/// nonconjoined hook from the right and runs leftward up to the next one.
fn hook_groups(p: &Permutation, sky: &Skyline) -> Vec<Vec<Hook>> {
    let mut groups: Vec<Vec<Hook>> = Vec::new();
    for &h in sky.hooks.iter().rev() {
        if !is_conjoined(p, h.ne) || groups.is_empty() {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(h);
    }
    groups
}

/// `(m_1, ..., m_t)` for the label `1 + t + sum m_i`.
pub fn perm_shape(p: &Permutation) -> Result<Vec<usize>> {
    let sky = skyline(p)?;
    Ok(hook_groups(p, &sky).iter().map(Vec::len).collect())
}

/// `b(p) = 1 + |F_1| + |F_2|`, defined for `k >= 1`.
pub fn perm_label(p: &Permutation) -> Result<usize> {
    if p.len() < 3 {
        return Err(Error::Precondition {
            perm: p.to_string(),
            reason: "label needs length at least 3".into(),
        });
    }
    let shape = perm_shape(p)?;
    Ok(1 + shape.len() + shape.iter().sum::<usize>())
}

/// Splits the point at `pos` into two, the new one immediately below and
/// immediately to the right of the old one.
pub fn split_point(p: &Permutation, pos: usize) -> Result<Permutation> {
    if pos == 0 || pos > p.len() {
        return Err(Error::IndexOutOfRange {
            index: pos,
            len: p.len(),
        });
    }
    p.require_normalized()?;
    let v = p.at(pos);
    let mut e: Vec<u32> = p.entries().iter().map(|&x| if x >= v { x + 1 } else { x }).collect();
    e.insert(pos, v);
    Ok(Permutation::from_vec_unchecked(e))
}

/// Children in the order `u'; v'_1..v'_t; w'_{1,1}..w'_{t,m_t}`.
pub fn generate_children_perm(p: &Permutation) -> Result<Vec<Permutation>> {
    let sky = skyline(p)?;
    let groups = hook_groups(p, &sky);
    let one = Permutation::identity(1);
    let mut out = Vec::new();
    out.push(p.skew_sum(&one).direct_sum(&one));
    for g in &groups {
        out.push(split_point(p, g[0].ne)?.direct_sum(&one));
    }
    for g in &groups {
        for h in g {
            out.push(split_point(p, h.sw + 1)?.direct_sum(&one));
        }
    }
    Ok(out)
}

/// Deletes the last point and its partner, then normalizes.
pub fn parent_perm(p: &Permutation) -> Result<Permutation> {
    require_class(p)?;
    let n = p.len();
    if n < 3 {
        return Err(Error::Precondition {
            perm: p.to_string(),
            reason: "the root has no parent".into(),
        });
    }
    let config = canonical_hooks(p).expect("class members are sorted");
    let hook = config
        .with_ne(n)
        .ok_or_else(|| Error::BrokenChain(format!("{p}: no hook ends at the last point")))?;
    let partner = hook.sw + 1;
    let kept: Vec<u32> = (1..n).filter(|&i| i != partner).map(|i| p.at(i)).collect();
    Ok(Permutation::new(kept)?.normalize())
}

/// Index of `p` among the children of its parent.
pub fn child_index(p: &Permutation) -> Result<(Permutation, usize)> {
    let parent = parent_perm(p)?;
    let idx = generate_children_perm(&parent)?
        .iter()
        .position(|c| c == p)
        .ok_or_else(|| Error::BrokenChain(format!("{p} is not a child of {parent}")))?;
    Ok((parent, idx))
}

/// Level `k >= 1` of the tree, depth-first in child order.
pub fn perm_tree_level(k: usize) -> Vec<Permutation> {
    assert!(k >= 1, "the tree starts at k = 1");
    let mut level = vec![Permutation::from_vec_unchecked(vec![2, 1, 3])];
    for _ in 1..k {
        level = level
            .iter()
            .flat_map(|p| generate_children_perm(p).expect("tree nodes stay in class"))
            .collect();
    }
    level
}
