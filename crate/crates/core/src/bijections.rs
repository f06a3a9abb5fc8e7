//! Bijections between classes of uniquely sorted permutations and intervals
//! of Catalan posets.

use std::fmt;
use std::str::FromStr;

use crate::dyck::{leq, DyckInterval, DyckPath, PosetKind};
use crate::error::{Error, Result};
use crate::gentree;
use crate::noncross::{NCInterval, NoncrossingPartition};
use crate::perm::{parse_patterns, Pattern, Permutation};
use crate::sliding::{slide, SlideOp};
use crate::stacksort::{canonical_hooks, is_uniquely_sorted};

fn precondition(p: &Permutation, reason: impl Into<String>) -> Error {
    Error::Precondition {
        perm: p.to_string(),
        reason: reason.into(),
    }
}

/// Checks `p ∈ U_n(pats)`. A pattern violation names one occurrence.
pub fn require_uniquely_sorted(p: &Permutation, pats: &[Pattern]) -> Result<()> {
    p.require_normalized()?;
    if !is_uniquely_sorted(p) {
        return Err(precondition(p, "not uniquely sorted"));
    }
    for pat in pats {
        if let Some(occ) = pat.find_in(p.entries()) {
            let at: Vec<String> = occ.iter().map(|i| i.to_string()).collect();
            return Err(precondition(
                p,
                format!("contains {pat} at positions {}", at.join(",")),
            ));
        }
    }
    Ok(())
}

fn patterns(s: &str) -> Vec<Pattern> {
    parse_patterns(s).expect("built-in pattern set")
}

fn semilength_of(p: &Permutation) -> usize {
    (p.len() - 1) / 2
}

/// `DL_k(p) = (Λ, Λ')` for `p ∈ U_{2k+1}(312)`.
pub fn dl_forward(p: &Permutation) -> Result<DyckInterval> {
    require_uniquely_sorted(p, &patterns("312"))?;
    let (lower, upper) = dl_words(p);
    DyckInterval::new(lower, upper, PosetKind::Stanley)
}

fn dl_words(p: &Permutation) -> (DyckPath, DyckPath) {
    let n = p.len();
    let rot = p.rot_unchecked();
    let lower: Vec<bool> = (1..n).map(|i| !p.is_descent(n - i)).collect();
    let upper: Vec<bool> = (1..n).map(|i| rot.is_descent(i)).collect();
    (
        DyckPath::from_steps(&lower).expect("uniquely sorted gives a Dyck path"),
        DyckPath::from_steps(&upper).expect("uniquely sorted gives a Dyck path"),
    )
}

/// A square matrix of point counts, indexed from 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellMatrix {
    k: usize,
    cells: Vec<u32>,
}

impl CellMatrix {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            cells: vec![0; k * k],
        }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let k = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::SizeMismatch(k, bad.len()));
        }
        Ok(Self {
            k,
            cells: rows.concat(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells[(i - 1) * self.k + j - 1]
    }

    fn cell(&mut self, i: usize, j: usize) -> &mut u32 {
        &mut self.cells[(i - 1) * self.k + j - 1]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.k.max(1)).take(self.k).map(<[u32]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        (1..=self.k).map(|i| (1..=self.k).map(|j| self.get(i, j)).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        (1..=self.k).map(|j| (1..=self.k).map(|i| self.get(i, j)).sum()).collect()
    }

    /// `2^{k-1} · Σ 2^{i-j} m_ij`, scaled to an integer.
    pub fn energy(&self) -> u128 {
        let k = self.k;
        let mut e = 0u128;
        for i in 1..=k {
            for j in 1..=k {
                e += (self.get(i, j) as u128) << (i + k - 1 - j);
            }
        }
        e
    }

    /// The lower 2×2 submatrix `(r, r', c, c')` with both off-diagonal
    /// entries positive, least by `(r', c, r, c')`.
    pub fn lower_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let k = self.k;
        for rp in 1..=k {
            for c in 1..=k {
                if self.get(rp, c) == 0 {
                    continue;
                }
                for r in (k + 1 - c).max(1)..rp {
                    for cp in c + 1..=k {
                        if self.get(r, cp) > 0 {
                            return Some((r, rp, c, cp));
                        }
                    }
                }
            }
        }
        None
    }

    /// Properties (i) to (iv) for the margins `a`, `b`.
    pub fn satisfies(&self, a: &[u32], b: &[u32]) -> bool {
        let k = self.k;
        if a.len() != k || b.len() != k {
            return false;
        }
        let zero_above = (1..=k).all(|i| (1..=k - i).all(|j| self.get(i, j) == 0));
        let rows = self.row_sums();
        zero_above
            && self.col_sums() == b
            && (1..=k).all(|i| rows[i - 1] == a[k - i])
            && self.lower_violation().is_none()
    }

    fn apply_move(&mut self, (r, rp, c, cp): (usize, usize, usize, usize)) {
        *self.cell(r, c) += 1;
        *self.cell(r, cp) -= 1;
        *self.cell(rp, c) -= 1;
        *self.cell(rp, cp) += 1;
    }
}

impl fmt::Display for CellMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl fmt::Debug for CellMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellMatrix{self}")
    }
}

/// The left-to-right maxima of `p` split the plot into a `k × k` grid;
/// `m_ij` counts the points in column `j`, row `i`.
pub fn cell_matrix(p: &Permutation) -> Result<CellMatrix> {
    require_uniquely_sorted(p, &patterns("312"))?;
    let k = semilength_of(p);
    let ltr = p.left_to_right_maxima();
    if ltr.len() != k + 1 {
        return Err(Error::BrokenChain(format!(
            "{p} has {} left-to-right maxima, expected {}",
            ltr.len(),
            k + 1
        )));
    }
    let heights: Vec<u32> = ltr.iter().map(|&x| p.at(x)).collect();
    let mut m = CellMatrix::zeros(k);
    for x in 1..=p.len() {
        if ltr.binary_search(&x).is_ok() {
            continue;
        }
        let v = p.at(x);
        let col = ltr.partition_point(|&q| q < x);
        let row = heights.iter().filter(|&&h| h > v).count() - 1;
        *m.cell(row, col) += 1;
    }
    Ok(m)
}

fn check_margins(a: &[u32], b: &[u32]) -> Result<()> {
    let k = a.len();
    if b.len() != k {
        return Err(Error::Hypothesis(format!(
            "a has length {k} but b has length {}",
            b.len()
        )));
    }
    if k > 64 {
        return Err(Error::Hypothesis(format!("k = {k} exceeds 64")));
    }
    let (sa, sb): (u64, u64) = (
        a.iter().map(|&x| x as u64).sum(),
        b.iter().map(|&x| x as u64).sum(),
    );
    if sa != sb {
        return Err(Error::Hypothesis(format!("sum of a is {sa} but sum of b is {sb}")));
    }
    let (mut ta, mut tb) = (0u64, 0u64);
    for i in 1..=k {
        ta += a[k - i] as u64;
        tb += b[k - i] as u64;
        if ta > tb {
            return Err(Error::Hypothesis(format!(
                "a_{}+...+a_{k} = {ta} exceeds b_{}+...+b_{k} = {tb} (i = {i})",
                k - i + 1,
                k - i + 1
            )));
        }
    }
    Ok(())
}

/// A matrix with properties (i) to (iii), by induction on `k` and the total.
fn induction_matrix(a: &[u32], b: &[u32]) -> CellMatrix {
    let k = a.len();
    let total: u32 = a.iter().sum();
    if k == 0 || total == 0 {
        return CellMatrix::zeros(k);
    }
    if k == 1 {
        return CellMatrix {
            k,
            cells: vec![a[0]],
        };
    }
    if b[k - 1] == 0 {
        let sub = induction_matrix(&a[..k - 1], &b[..k - 1]);
        let mut m = CellMatrix::zeros(k);
        for i in 2..=k {
            for j in 1..k {
                *m.cell(i, j) = sub.get(i - 1, j);
            }
        }
        return m;
    }
    let l = (1..=k).find(|&l| a[k - l] >= 1).expect("positive total");
    let (mut a2, mut b2) = (a.to_vec(), b.to_vec());
    a2[k - l] -= 1;
    b2[k - 1] -= 1;
    let mut m = induction_matrix(&a2, &b2);
    *m.cell(l, k) += 1;
    m
}

/// The unique matrix with properties (i) to (iv), together with the energy
/// before and after every move.
pub fn solve_margins_traced(a: &[u32], b: &[u32]) -> Result<(CellMatrix, Vec<u128>)> {
    check_margins(a, b)?;
    let mut m = induction_matrix(a, b);
    let mut energies = vec![m.energy()];
    while let Some(q) = m.lower_violation() {
        m.apply_move(q);
        energies.push(m.energy());
    }
    Ok((m, energies))
}

pub fn solve_margins(a: &[u32], b: &[u32]) -> Result<CellMatrix> {
    solve_margins_traced(a, b).map(|(m, _)| m)
}

/// Rebuilds the permutation whose cell matrix is `m`: within every row and
/// every column the points decrease from left to right.
pub fn permutation_from_cells(m: &CellMatrix) -> Permutation {
    let k = m.k();
    let n = 2 * k + 1;
    let mut height = vec![vec![Vec::new(); k + 1]; k + 1];
    // Heights from the top: R_0, R_1, row 1, R_2, row 2, ..., R_k, row k.
    let mut ltr_height = vec![0u32; k + 1];
    let mut next = n as u32;
    ltr_height[0] = next;
    next -= 1;
    for i in 1..=k {
        ltr_height[i] = next;
        next -= 1;
        for (j, cell) in height[i].iter_mut().enumerate().skip(1) {
            for _ in 0..m.get(i, j) {
                cell.push(next);
                next -= 1;
            }
        }
    }
    // Positions from the left: R_k, column 1, R_{k-1}, ..., column k, R_0.
    let mut e = Vec::with_capacity(n);
    e.push(ltr_height[k]);
    for j in 1..=k {
        for row in height.iter().skip(1) {
            e.extend(&row[j]);
        }
        e.push(ltr_height[k - j]);
    }
    Permutation::from_vec_unchecked(e)
}

/// `DL_k^{-1}` on a Stanley interval.
pub fn dl_inverse(lower: &DyckPath, upper: &DyckPath) -> Result<Permutation> {
    if lower.semilength() != upper.semilength() {
        return Err(Error::SemilengthMismatch(lower.semilength(), upper.semilength()));
    }
    if !leq(lower, upper, PosetKind::Stanley)? {
        return Err(Error::NotAnInterval {
            lower: lower.to_string(),
            upper: upper.to_string(),
            kind: PosetKind::Stanley.name(),
        });
    }
    let rev = |g: Vec<usize>| g.into_iter().rev().map(|x| x as u32).collect::<Vec<_>>();
    let a = rev(upper.gamma());
    let b = rev(lower.gamma());
    Ok(permutation_from_cells(&solve_margins(&a, &b)?))
}

/// `DL_k ∘ swl` on `U_{2k+1}(132)`, landing in the Tamari intervals.
pub fn tamari_forward(p: &Permutation) -> Result<DyckInterval> {
    require_uniquely_sorted(p, &patterns("132"))?;
    let iv = dl_forward(&slide(p, SlideOp::Swl))?;
    DyckInterval::new(iv.lower, iv.upper, PosetKind::Tamari)
}

pub fn tamari_inverse(lower: &DyckPath, upper: &DyckPath) -> Result<Permutation> {
    DyckInterval::new(*lower, *upper, PosetKind::Tamari)?;
    Ok(slide(&dl_inverse(lower, upper)?, SlideOp::Swr))
}

fn empty_nc_interval() -> NCInterval {
    NCInterval {
        rho: NoncrossingPartition::singletons(0),
        kappa: NoncrossingPartition::singletons(0),
    }
}

/// Child indices leading from `213` down to `p` in the permutation tree.
pub fn generation_path(p: &Permutation) -> Result<Vec<usize>> {
    gentree::require_class(p)?;
    let mut path = Vec::new();
    let mut cur = p.clone();
    while cur.len() > 3 {
        let (parent, idx) = gentree::child_index(&cur)?;
        path.push(idx);
        cur = parent;
    }
    path.reverse();
    Ok(path)
}

/// `Υ_k`: replays the generation path of `p` in the interval tree.
pub fn upsilon_tree(p: &Permutation) -> Result<NCInterval> {
    let path = generation_path(p)?;
    if p.len() == 1 {
        return Ok(empty_nc_interval());
    }
    Ok(path.into_iter().fold(NCInterval::root(), |node, idx| {
        node.children().swap_remove(idx)
    }))
}

/// `Υ_k^{-1}`.
pub fn upsilon_tree_inverse(iv: &NCInterval) -> Result<Permutation> {
    if iv.k() == 0 {
        return Ok(Permutation::identity(1));
    }
    let mut path = Vec::new();
    let mut cur = iv.clone();
    while cur.k() > 1 {
        let parent = cur.parent();
        let idx = parent
            .children()
            .iter()
            .position(|c| *c == cur)
            .ok_or_else(|| Error::BrokenChain(format!("{cur} is not a child of {parent}")))?;
        path.push(idx);
        cur = parent;
    }
    let mut p = Permutation::from_vec_unchecked(vec![2, 1, 3]);
    for idx in path.into_iter().rev() {
        p = gentree::generate_children_perm(&p)?.swap_remove(idx);
    }
    Ok(p)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let up = parent[y];
        parent[y] = r;
        y = up;
    }
    r
}

fn union(parent: &mut [usize], x: usize, y: usize) {
    let (rx, ry) = (find(parent, x), find(parent, y));
    parent[rx.max(ry)] = rx.min(ry);
}

fn partition_of(parent: &mut [usize]) -> Vec<Vec<usize>> {
    let k = parent.len();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for x in 0..k {
        let r = find(parent, x);
        blocks[r].push(x + 1);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

/// `Υ'_k`, read off adjacencies between northeast endpoints and partners.
pub fn upsilon_direct(p: &Permutation) -> Result<NCInterval> {
    gentree::require_class(p)?;
    let k = semilength_of(p);
    if k == 0 {
        return Ok(empty_nc_interval());
    }
    let mut hooks = canonical_hooks(p).expect("class members are sorted").hooks;
    hooks.sort_by_key(|h| p.at(h.ne));
    let w: Vec<usize> = hooks.iter().map(|h| h.ne).collect();
    let v: Vec<usize> = hooks.iter().map(|h| h.sw + 1).collect();
    // x sits immediately above and immediately left of y
    let nw_of = |x: usize, y: usize| x + 1 == y && p.at(x) == p.at(y) + 1;
    let mut rho = (0..k).collect::<Vec<_>>();
    let mut kappa = rho.clone();
    for l in 0..k {
        for m in 0..k {
            if nw_of(v[l], v[m]) {
                union(&mut rho, l, m);
                union(&mut kappa, l, m);
            }
            if nw_of(w[l], v[m]) {
                union(&mut kappa, l, m);
            }
        }
    }
    let rho = NoncrossingPartition::new(k, partition_of(&mut rho))?;
    let kappa = NoncrossingPartition::new(k, partition_of(&mut kappa))?;
    NCInterval::new(rho, kappa)
}

/// The two ways a member of `U(231, 4132)` of length at least 3 splits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PalloDecomposition {
    /// The hook into the last point starts at position 1. `rest` is the
    /// normalized `π_1 L R μ` and `tau ∈ U(132, 231)`.
    Nice { rest: Permutation, tau: Permutation },
    /// `π = σ ⊕ σ'` where `left = σ i` normalized and `right = σ'` is nice.
    Split { left: Permutation, right: Permutation },
}

impl fmt::Display for PalloDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nice { rest, tau } => write!(f, "nice({rest} | {tau})"),
            Self::Split { left, right } => write!(f, "split({left} | {right})"),
        }
    }
}

fn pallo_class() -> Vec<Pattern> {
    patterns("231;4132")
}

/// True iff the hook ending at the last point starts at position 1.
pub fn is_nice(p: &Permutation) -> Result<bool> {
    require_uniquely_sorted(p, &pallo_class())?;
    Ok(last_hook_start(p) == Some(1))
}

fn last_hook_start(p: &Permutation) -> Option<usize> {
    canonical_hooks(p).ok()?.with_ne(p.len()).map(|h| h.sw)
}

pub fn pallo_decompose(p: &Permutation) -> Result<PalloDecomposition> {
    require_uniquely_sorted(p, &pallo_class())?;
    let n = p.len();
    if n < 3 {
        return Err(precondition(p, "decomposition needs length at least 3"));
    }
    let i = last_hook_start(p).expect("uniquely sorted");
    let e = p.entries();
    if i > 1 {
        let left = Permutation::new(e[..i].to_vec())?.normalize();
        let right = Permutation::new(e[i - 1..].to_vec())?.normalize();
        return Ok(PalloDecomposition::Split { left, right });
    }
    let first = e[0] as usize;
    let lambda = &e[1..first];
    if lambda.iter().any(|&x| x as usize >= first) {
        return Err(Error::BrokenChain(format!("{p}: entries after the first do not start with 1..{}", first - 1)));
    }
    let tau_class = patterns("132;231");
    let (m, start) = (0..=(first - 2) / 2)
        .rev()
        .find_map(|m| {
            let top = 2 * m as u32 + 1;
            let start = lambda.iter().position(|&x| x <= top)?;
            let block = &lambda[start..start + 2 * m + 1];
            (block.iter().all(|&x| x <= top)
                && require_uniquely_sorted(&Permutation::from_vec_unchecked(block.to_vec()), &tau_class).is_ok())
            .then_some((m, start))
        })
        .expect("the entry 1 alone qualifies");
    let tau = Permutation::from_vec_unchecked(lambda[start..start + 2 * m + 1].to_vec());
    let mut rest = vec![e[0]];
    rest.extend(&lambda[..start]);
    rest.extend(&lambda[start + 2 * m + 1..]);
    rest.extend(&e[first..n - 1]);
    let rest = Permutation::new(rest)?.normalize();
    Ok(PalloDecomposition::Nice { rest, tau })
}

pub fn pallo_recompose(d: &PalloDecomposition) -> Result<Permutation> {
    let out = match d {
        PalloDecomposition::Nice { rest, tau } => {
            require_uniquely_sorted(rest, &pallo_class())?;
            require_uniquely_sorted(tau, &patterns("132;231"))?;
            let shift = tau.len() as u32;
            let mut e: Vec<u32> = rest.entries().iter().map(|x| x + shift).collect();
            let at = e.iter().position(|&x| x == shift + 1).expect("nonempty") + 1;
            e.splice(at..at, tau.entries().iter().copied());
            e.push(e.len() as u32 + 1);
            Permutation::from_vec_unchecked(e)
        }
        PalloDecomposition::Split { left, right } => {
            require_uniquely_sorted(left, &pallo_class())?;
            if !is_nice(right)? {
                return Err(precondition(right, "second piece is not nice"));
            }
            let sigma = Permutation::from_vec_unchecked(left.entries()[..left.len() - 1].to_vec());
            sigma.direct_sum(right)
        }
    };
    require_uniquely_sorted(&out, &pallo_class())?;
    Ok(out)
}

/// A nondecreasing parking function `a_1 <= ... <= a_k`, `a_i <= i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParkingFunction(Vec<u32>);

impl ParkingFunction {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let bad = |reason: String| Error::Parse {
            what: "nondecreasing parking function",
            input: format!("{values:?}"),
            reason,
        };
        for (i, &a) in values.iter().enumerate() {
            if a == 0 || a as usize > i + 1 {
                return Err(bad(format!("a_{} = {a} is outside 1..={}", i + 1, i + 1)));
            }
            if i > 0 && values[i - 1] > a {
                return Err(bad(format!("a_{} > a_{}", i, i + 1)));
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ParkingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", v.join(","))
    }
}

impl FromStr for ParkingFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Self::new(Vec::new());
        }
        let values = body
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|e| Error::Parse {
                    what: "nondecreasing parking function",
                    input: s.into(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// `a_i = π_{2i} - i + 1` on `U_{2k+1}(321)`.
pub fn parking_forward(p: &Permutation) -> Result<ParkingFunction> {
    require_uniquely_sorted(p, &patterns("321"))?;
    let k = semilength_of(p);
    ParkingFunction::new((1..=k).map(|i| p.at(2 * i) + 1 - i as u32).collect())
}

pub fn parking_inverse(a: &ParkingFunction) -> Permutation {
    let k = a.len();
    let n = 2 * k + 1;
    let mut e = vec![0u32; n];
    let mut used = vec![false; n + 1];
    for (i, &x) in a.values().iter().enumerate() {
        let v = x + i as u32;
        e[2 * i + 1] = v;
        used[v as usize] = true;
    }
    let mut free = (1..=n as u32).filter(|&v| !used[v as usize]);
    for slot in e.iter_mut().step_by(2) {
        *slot = free.next().expect("k + 1 values remain");
    }
    Permutation::from_vec_unchecked(e)
}

/// The restrictions of `DL_k` onto antichain intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AntichainMap {
    /// `DL_k` on `U(231, 312)`, the layered permutations.
    Layered,
    /// `DL_k ∘ swl` on `U(132, 231)`.
    Swl,
    /// `DL_k ∘ swd` on `U(132, 312)`.
    Swd,
}

impl AntichainMap {
    pub const ALL: [AntichainMap; 3] = [Self::Layered, Self::Swl, Self::Swd];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Layered => "layered_312_231",
            Self::Swl => "swl_132_231",
            Self::Swd => "swd_132_312",
        }
    }

    pub fn domain(&self) -> Vec<Pattern> {
        patterns(match self {
            Self::Layered => "231;312",
            Self::Swl => "132;231",
            Self::Swd => "132;312",
        })
    }

    pub fn forward(&self, p: &Permutation) -> Result<DyckInterval> {
        require_uniquely_sorted(p, &self.domain())?;
        let q = match self {
            Self::Layered => p.clone(),
            Self::Swl => slide(p, SlideOp::Swl),
            Self::Swd => slide(p, SlideOp::Swd),
        };
        let iv = dl_forward(&q)?;
        DyckInterval::new(iv.lower, iv.upper, PosetKind::Antichain)
    }

    pub fn inverse(&self, path: &DyckPath) -> Result<Permutation> {
        let q = dl_inverse(path, path)?;
        Ok(match self {
            Self::Layered => q,
            Self::Swl => slide(&q, SlideOp::Swr),
            Self::Swd => slide(&q, SlideOp::Swu),
        })
    }
}

impl FromStr for AntichainMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "antichain map",
                name: s.into(),
            })
    }
}

impl fmt::Display for AntichainMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// For `p = L 1 R` avoiding 132 and 231 with odd length `2k+1`:
/// `w_l = U` iff `2k+2-l` lies in `R`. Returns `true` for `U`.
pub fn valley_word(p: &Permutation) -> Result<Vec<bool>> {
    p.require_normalized()?;
    if p.len().is_multiple_of(2) {
        return Err(precondition(p, "length must be odd"));
    }
    for pat in patterns("132;231") {
        if p.contains(&pat) {
            return Err(precondition(p, format!("contains {pat}")));
        }
    }
    let n = p.len();
    let one = p.position_of(1).expect("normalized and nonempty");
    let mut in_right = vec![false; n + 1];
    for x in one + 1..=n {
        in_right[p.at(x) as usize] = true;
    }
    Ok((1..n).map(|l| in_right[n + 1 - l]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyck::{enumerate_intervals, enumerate_paths};
    use crate::noncross::enumerate_nc_intervals;
    use crate::stacksort::{enumerate_uniquely_sorted, is_sorted};
    use crate::Limits;
    use std::collections::HashSet;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn path(s: &str) -> DyckPath {
        s.parse().unwrap()
    }

    fn class(k: usize, pats: &str) -> Vec<Permutation> {
        enumerate_uniquely_sorted(k, &patterns(pats), &Limits::default())
            .unwrap()
            .collect()
    }

    fn catalan(k: usize) -> usize {
        (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    // Every nonnegative matrix with margins (a, b) satisfying (i)..(iv).
    fn brute_solutions(a: &[u32], b: &[u32]) -> Vec<CellMatrix> {
        let k = a.len();
        let total: u32 = a.iter().sum();
        let mut out = Vec::new();
        let mut cells = vec![0u32; k * k];
        fn rec(pos: usize, left: u32, cells: &mut Vec<u32>, k: usize, a: &[u32], b: &[u32], out: &mut Vec<CellMatrix>) {
            if pos == cells.len() {
                if left == 0 {
                    let m = CellMatrix { k, cells: cells.clone() };
                    if m.satisfies(a, b) {
                        out.push(m);
                    }
                }
                return;
            }
            for v in 0..=left {
                cells[pos] = v;
                rec(pos + 1, left - v, cells, k, a, b, out);
            }
            cells[pos] = 0;
        }
        rec(0, total, &mut cells, k, a, b, &mut out);
        out
    }

    fn compositions(k: usize, total: u32) -> Vec<Vec<u32>> {
        if k == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        (0..=total)
            .flat_map(|x| {
                compositions(k - 1, total - x).into_iter().map(move |mut v| {
                    v.insert(0, x);
                    v
                })
            })
            .collect()
    }

    #[test]
    fn dl_examples() {
        let iv = dl_forward(&p("3254167")).unwrap();
        assert_eq!((iv.lower, iv.upper), (path("UUDDUD"), path("UUDUDD")));
        let iv = dl_forward(&p("213")).unwrap();
        assert_eq!((iv.lower, iv.upper), (path("UD"), path("UD")));
        let iv = dl_forward(&p("21435")).unwrap();
        assert_eq!(iv.lower, iv.upper);
        let iv = dl_forward(&p("1")).unwrap();
        assert_eq!(iv.semilength(), 0);
        assert!(matches!(dl_forward(&p("2413")), Err(Error::Precondition { .. })));
        let err = dl_forward(&p("31425")).unwrap_err().to_string();
        assert!(err.contains("3,1,2 at positions 1,2,4"), "{err}");
    }

    #[test]
    fn figure_matrix() {
        let m = CellMatrix::from_rows(&[
            vec![0, 0, 0, 1],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
            vec![2, 0, 1, 0],
        ])
        .unwrap();
        let q = permutation_from_cells(&m);
        assert_eq!(cell_matrix(&q).unwrap(), m);
        let rows = m.row_sums();
        let a: Vec<u32> = rows.iter().rev().copied().collect();
        assert_eq!(solve_margins(&a, &m.col_sums()).unwrap(), m);
        // Flipped upside down, the matrix is upper triangular.
        for i in 1..=4 {
            for j in 1..=4 - i {
                assert_eq!(m.get(i, j), 0);
            }
        }
    }

    #[test]
    fn small_matrices() {
        assert_eq!(cell_matrix(&p("213")).unwrap(), CellMatrix::from_rows(&[vec![1]]).unwrap());
        assert_eq!(solve_margins(&[1], &[1]).unwrap().rows(), vec![vec![1]]);
        assert_eq!(solve_margins(&[], &[]).unwrap().k(), 0);
        assert!(matches!(solve_margins(&[0, 1], &[1, 0]), Err(Error::Hypothesis(_))));
        assert!(matches!(solve_margins(&[1], &[2]), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn cell_matrix_margins_match_paths() {
        for k in 0..=5 {
            for q in class(k, "312") {
                let m = cell_matrix(&q).unwrap();
                let iv = dl_forward(&q).unwrap();
                let g: Vec<u32> = iv.lower.gamma().iter().rev().map(|&x| x as u32).collect();
                let gp: Vec<u32> = iv.upper.gamma().iter().rev().map(|&x| x as u32).collect();
                assert_eq!(m.col_sums(), g, "{q}");
                assert!(m.satisfies(&gp, &g), "{q}: {m}");
                assert_eq!(permutation_from_cells(&m), q);
            }
        }
    }

    #[test]
    fn margin_solution_is_unique() {
        for k in 1..=4 {
            for total in 0..=4 {
                for a in compositions(k, total) {
                    for b in compositions(k, total) {
                        let brute = brute_solutions(&a, &b);
                        match solve_margins_traced(&a, &b) {
                            Ok((m, energies)) => {
                                assert_eq!(brute, vec![m.clone()], "a={a:?} b={b:?}");
                                assert!(energies.windows(2).all(|w| w[1] < w[0]));
                                assert!(energies.len() as u128 - 1 <= energies[0]);
                            }
                            Err(Error::Hypothesis(_)) => {
                                let dominated = (1..=k).all(|i| {
                                    a[k - i..].iter().sum::<u32>() <= b[k - i..].iter().sum::<u32>()
                                });
                                assert!(!dominated, "a={a:?} b={b:?}");
                            }
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dl_is_a_bijection() {
        for k in 0..=5 {
            let perms = class(k, "312");
            let ivs = enumerate_intervals(k, PosetKind::Stanley, &Limits::default()).unwrap();
            let image: HashSet<_> = perms.iter().map(|q| dl_forward(q).unwrap()).collect();
            assert_eq!(image.len(), perms.len());
            assert_eq!(image, ivs.iter().copied().collect::<HashSet<_>>());
            for q in &perms {
                let iv = dl_forward(q).unwrap();
                assert_eq!(&dl_inverse(&iv.lower, &iv.upper).unwrap(), q);
            }
            for iv in &ivs {
                assert_eq!(dl_forward(&dl_inverse(&iv.lower, &iv.upper).unwrap()).unwrap(), *iv);
            }
        }
        assert_eq!(dl_inverse(&path("UUDDUD"), &path("UUDUDD")).unwrap(), p("3254167"));
        assert!(dl_inverse(&path("UDUD"), &path("UUDD")).is_ok());
        assert!(matches!(
            dl_inverse(&path("UUDD"), &path("UDUD")),
            Err(Error::NotAnInterval { .. })
        ));
    }

    #[test]
    fn tamari_examples() {
        let q = slide(&p("2154367"), SlideOp::Swu);
        let iv = tamari_forward(&q).unwrap();
        assert_eq!((iv.lower, iv.upper), (path("UUDDUD"), path("UUUDDD")));
        assert!(!leq(&iv.lower, &iv.upper, PosetKind::Pallo).unwrap());
        assert_eq!(tamari_inverse(&iv.lower, &iv.upper).unwrap(), q);
        assert_eq!(tamari_forward(&p("1")).unwrap().semilength(), 0);
    }

    #[test]
    fn tamari_is_a_bijection() {
        for k in 0..=4 {
            let perms = class(k, "132");
            let ivs: HashSet<_> = enumerate_intervals(k, PosetKind::Tamari, &Limits::default())
                .unwrap()
                .into_iter()
                .collect();
            let image: HashSet<_> = perms.iter().map(|q| tamari_forward(q).unwrap()).collect();
            assert_eq!(image.len(), perms.len());
            assert_eq!(image, ivs);
            for iv in &ivs {
                let q = tamari_inverse(&iv.lower, &iv.upper).unwrap();
                assert_eq!(tamari_forward(&q).unwrap(), *iv);
            }
        }
        assert_eq!(class(3, "132").len(), 13);
    }

    #[test]
    fn sortable_after_swr_iff_tamari() {
        for k in 0..=4 {
            for q in class(k, "312") {
                let iv = dl_forward(&q).unwrap();
                assert_eq!(
                    is_sorted(&slide(&q, SlideOp::Swr)),
                    leq(&iv.lower, &iv.upper, PosetKind::Tamari).unwrap(),
                    "{q}"
                );
            }
        }
    }

    #[test]
    fn upsilon_examples() {
        let root = upsilon_tree(&p("213")).unwrap();
        assert_eq!(root, NCInterval::root());
        assert_eq!(upsilon_direct(&p("213")).unwrap(), root);
        assert_eq!(upsilon_tree(&p("1")).unwrap().k(), 0);
        assert_eq!(upsilon_direct(&p("1")).unwrap().k(), 0);
        assert!(upsilon_tree(&p("2413")).is_err());
    }

    #[test]
    fn upsilon_tree_is_a_bijection() {
        for k in 1..=5 {
            let perms = class(k, "312;1342");
            let image: HashSet<_> = perms.iter().map(|q| upsilon_tree(q).unwrap()).collect();
            assert_eq!(image.len(), perms.len());
            let all: HashSet<_> = enumerate_nc_intervals(k).into_iter().collect();
            assert_eq!(image, all);
            for q in &perms {
                assert_eq!(&upsilon_tree_inverse(&upsilon_tree(q).unwrap()).unwrap(), q);
            }
        }
    }

    #[test]
    fn upsilon_preserves_labels() {
        for k in 1..=4 {
            for q in class(k, "312;1342") {
                let iv = upsilon_tree(&q).unwrap();
                assert_eq!(gentree::perm_shape(&q).unwrap(), iv.shape(), "{q}");
                assert_eq!(gentree::perm_label(&q).unwrap(), iv.label());
                let kids: Vec<usize> = gentree::generate_children_perm(&q)
                    .unwrap()
                    .iter()
                    .map(|c| gentree::perm_label(c).unwrap())
                    .collect();
                let nc_kids: Vec<usize> = iv.children().iter().map(NCInterval::label).collect();
                assert_eq!(kids, nc_kids, "{q}");
            }
        }
    }

    #[test]
    fn upsilon_direct_agrees_with_tree() {
        for k in 0..=5 {
            for q in class(k, "312;1342") {
                assert_eq!(upsilon_direct(&q).unwrap(), upsilon_tree(&q).unwrap(), "{q}");
            }
        }
    }

    #[test]
    fn pallo_examples() {
        let q = p("2154367");
        let d = pallo_decompose(&q).unwrap();
        assert_eq!(pallo_recompose(&d).unwrap(), q);
        assert_eq!(
            pallo_decompose(&p("213")).unwrap(),
            PalloDecomposition::Nice {
                rest: p("1"),
                tau: p("1")
            }
        );
        assert!(pallo_decompose(&p("1")).is_err());
        assert!(pallo_decompose(&p("2413")).is_err());
    }

    #[test]
    fn pallo_decomposition_roundtrip() {
        let counts: Vec<usize> = (0..=5).map(|k| class(k, "231;4132").len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 11, 44, 185]);
        for k in 1..=5 {
            for q in class(k, "231;4132") {
                let d = pallo_decompose(&q).unwrap();
                match &d {
                    PalloDecomposition::Nice { rest, tau } => {
                        assert_eq!(rest.len() + tau.len() + 1, q.len());
                        assert!(is_nice(&q).unwrap());
                    }
                    PalloDecomposition::Split { left, right } => {
                        assert_eq!(left.len() + right.len() - 1, q.len());
                        assert!(!is_nice(&q).unwrap());
                        assert!(is_nice(right).unwrap());
                    }
                }
                assert_eq!(pallo_recompose(&d).unwrap(), q, "{d}");
            }
        }
    }

    #[test]
    fn parking_examples() {
        assert_eq!(parking_forward(&p("213")).unwrap().values(), &[1]);
        let ones = ParkingFunction::new(vec![1, 1]).unwrap();
        assert_eq!(parking_inverse(&ones), p("31425"));
        assert!(ParkingFunction::new(vec![2]).is_err());
        assert!(ParkingFunction::new(vec![1, 2, 1]).is_err());
        assert_eq!("(1,1,3)".parse::<ParkingFunction>().unwrap().values(), &[1, 1, 3]);
        assert_eq!(ones.to_string(), "(1,1)");
    }

    fn parking_functions(k: usize) -> Vec<ParkingFunction> {
        let mut out = Vec::new();
        fn rec(i: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<ParkingFunction>) {
            if i == k {
                out.push(ParkingFunction::new(cur.clone()).unwrap());
                return;
            }
            let lo = cur.last().copied().unwrap_or(1);
            for a in lo..=i as u32 + 1 {
                cur.push(a);
                rec(i + 1, k, cur, out);
                cur.pop();
            }
        }
        rec(0, k, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn parking_is_a_bijection() {
        for k in 0..=6 {
            let perms = class(k, "321");
            assert_eq!(perms.len(), catalan(k));
            let odd: Vec<usize> = (1..=k).map(|i| 2 * i - 1).collect();
            for q in &perms {
                assert_eq!(q.descents(), odd);
                assert_eq!(&parking_inverse(&parking_forward(q).unwrap()), q);
            }
            let pfs = parking_functions(k);
            assert_eq!(pfs.len(), catalan(k));
            for a in &pfs {
                assert_eq!(&parking_forward(&parking_inverse(a)).unwrap(), a);
            }
        }
    }

    #[test]
    fn antichain_maps_are_bijections() {
        for k in 0..=5 {
            let paths: HashSet<DyckPath> = enumerate_paths(k).collect();
            for map in AntichainMap::ALL {
                let pats = crate::perm::format_patterns(&map.domain());
                let perms = class(k, &pats);
                assert_eq!(perms.len(), catalan(k), "{map}");
                let image: HashSet<DyckPath> = perms
                    .iter()
                    .map(|q| {
                        let iv = map.forward(q).unwrap();
                        assert_eq!(iv.lower, iv.upper);
                        iv.lower
                    })
                    .collect();
                assert_eq!(image, paths, "{map} k={k}");
                for d in &paths {
                    let q = map.inverse(d).unwrap();
                    assert_eq!(map.forward(&q).unwrap().lower, *d, "{map}");
                }
            }
        }
        assert_eq!("swl_132_231".parse::<AntichainMap>().unwrap(), AntichainMap::Swl);
    }

    #[test]
    fn layered_iff_antichain_image() {
        let layered = patterns("231;312");
        for k in 0..=5 {
            for q in class(k, "312") {
                let iv = dl_forward(&q).unwrap();
                assert_eq!(q.avoids_all(&layered), iv.lower == iv.upper, "{q}");
            }
        }
    }

    #[test]
    fn valley_word_detects_unique_sortedness() {
        let pats = patterns("132;231");
        for k in 0..=5 {
            let n = 2 * k + 1;
            let mut words = HashSet::new();
            let mut dyck = 0;
            for q in crate::perm::enumerate_avoiders(n, &pats) {
                let w = valley_word(&q).unwrap();
                assert_eq!(w.iter().filter(|&&u| !u).count() == k, q.des() == k);
                let is_dyck = DyckPath::from_steps(&w).is_ok();
                assert_eq!(is_dyck, is_uniquely_sorted(&q), "{q}");
                dyck += is_dyck as usize;
                words.insert(w);
            }
            assert_eq!(words.len(), 1 << (2 * k));
            assert_eq!(dyck, catalan(k));
        }
    }
}
