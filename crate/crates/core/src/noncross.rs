//! Noncrossing partitions, the refinement order, and the generating tree of
//! refinement intervals.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A noncrossing set partition of `[k]`, blocks sorted by minimum and
/// elements ascending, so structural equality is partition equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

fn canonicalize(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    blocks
}

fn check_partition(k: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let err = |reason: String| Error::NotAPartition { k, reason };
    let mut seen = vec![false; k + 1];
    for b in blocks {
        if b.is_empty() {
            return Err(err("empty block".into()));
        }
        for &x in b {
            if x == 0 || x > k {
                return Err(err(format!("element {x} outside 1..={k}")));
            }
            if seen[x] {
                return Err(err(format!("element {x} repeated")));
            }
            seen[x] = true;
        }
    }
    if let Some(x) = (1..=k).find(|&x| !seen[x]) {
        return Err(err(format!("element {x} missing")));
    }
    Ok(())
}

fn arcs(blocks: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (id, b) in blocks.iter().enumerate() {
        for w in b.windows(2) {
            out.push((w[0], w[1], id));
        }
    }
    out
}

/// Crossing test over all pairs of blocks. Errors if `blocks` is not a set
/// partition of `[k]`.
pub fn is_noncrossing(k: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    check_partition(k, blocks)?;
    let blocks = canonicalize(blocks.to_vec());
    // Two blocks cross iff some arc between consecutive elements of one
    // interleaves with such an arc of the other.
    let arcs = arcs(&blocks);
    for (i, &(a, c, x)) in arcs.iter().enumerate() {
        for &(b, d, y) in &arcs[i + 1..] {
            if x != y && ((a < b && b < c && c < d) || (b < a && a < d && d < c)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl NoncrossingPartition {
    pub fn new(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if !is_noncrossing(k, &blocks)? {
            return Err(Error::Crossing);
        }
        Ok(Self {
            k,
            blocks: canonicalize(blocks),
        })
    }

    /// The minimum of `NC_k`.
    pub fn singletons(k: usize) -> Self {
        Self {
            k,
            blocks: (1..=k).map(|x| vec![x]).collect(),
        }
    }

    /// The maximum of `NC_k`.
    pub fn full(k: usize) -> Self {
        Self {
            k,
            blocks: if k == 0 { Vec::new() } else { vec![(1..=k).collect()] },
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.contains(&x)).map(Vec::as_slice)
    }

    /// Blocks with no block arching over them, ordered right to left.
    pub fn exposed_blocks(&self) -> Vec<&[usize]> {
        exposed(&self.blocks).into_iter().map(|i| self.blocks[i].as_slice()).collect()
    }

    fn with_singleton(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.push(vec![self.k + 1]);
        Self { k: self.k + 1, blocks }
    }

    fn with_new_max_in(&self, block: &[usize]) -> Self {
        let mut blocks = self.blocks.clone();
        let target = blocks.iter_mut().find(|b| b.as_slice() == block).expect("block present");
        target.push(self.k + 1);
        Self { k: self.k + 1, blocks }
    }

    /// Removes `k` from its block, dropping the block if it empties.
    pub fn without_max(&self) -> Self {
        let mut blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().filter(|&x| x != self.k).collect())
            .collect();
        blocks.retain(|b: &Vec<usize>| !b.is_empty());
        Self {
            k: self.k.saturating_sub(1),
            blocks,
        }
    }
}

/// Indices of exposed blocks, ordered right to left by maximum.
fn exposed(blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut out: Vec<usize> = (0..blocks.len())
        .filter(|&i| {
            let (lo, hi) = (blocks[i][0], *blocks[i].last().unwrap());
            !blocks.iter().any(|b| b[0] < lo && hi < *b.last().unwrap())
        })
        .collect();
    out.sort_unstable_by_key(|&i| std::cmp::Reverse(*blocks[i].last().unwrap()));
    out
}

/// Blocks in canonical order, e.g. `{1,3}{2}`. The empty partition is `{}`.
impl fmt::Display for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("{}");
        }
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NC({self})")
    }
}

/// Parses `{1,3}{2}`; `k` is the largest element.
impl FromStr for NoncrossingPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = |reason: &str| Error::Parse {
            what: "noncrossing partition",
            input: s.into(),
            reason: reason.into(),
        };
        if s == "{}" || s.is_empty() {
            return Ok(Self::singletons(0));
        }
        let mut blocks = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('{').ok_or_else(|| err("expected '{'"))?;
            let close = inner.find('}').ok_or_else(|| err("unclosed block"))?;
            let block = inner[..close]
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| err("bad element")))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
            rest = inner[close + 1..].trim_start();
        }
        let k = blocks.iter().flatten().copied().max().unwrap_or(0);
        Self::new(k, blocks)
    }
}

/// Every block of `a` lies inside a block of `b`.
pub fn nc_leq(a: &NoncrossingPartition, b: &NoncrossingPartition) -> Result<bool> {
    if a.k != b.k {
        return Err(Error::SizeMismatch(a.k, b.k));
    }
    let mut owner = vec![0usize; b.k + 1];
    for (i, blk) in b.blocks.iter().enumerate() {
        for &x in blk {
            owner[x] = i;
        }
    }
    Ok(a.blocks.iter().all(|blk| blk.iter().all(|&x| owner[x] == owner[blk[0]])))
}

/// `NC_k` in restricted-growth-string order.
pub fn enumerate_noncrossing(k: usize) -> Vec<NoncrossingPartition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    grow(k, 0, 0, &mut rgs, &mut out);
    out
}

fn grow(k: usize, i: usize, used: usize, rgs: &mut [usize], out: &mut Vec<NoncrossingPartition>) {
    if i == k {
        let mut blocks = vec![Vec::new(); used];
        for (x, &b) in rgs.iter().enumerate() {
            blocks[b].push(x + 1);
        }
        if is_noncrossing(k, &blocks).unwrap() {
            out.push(NoncrossingPartition { k, blocks });
        }
        return;
    }
    for b in 0..=used {
        rgs[i] = b;
        grow(k, i + 1, used.max(b + 1), rgs, out);
    }
}

/// A refinement interval `rho <= kappa` in `NC_k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCInterval {
    pub rho: NoncrossingPartition,
    pub kappa: NoncrossingPartition,
}

/// The shape `(m_1, ..., m_t)` behind a label: `t` exposed blocks of kappa,
/// the `i`-th containing `m_i` exposed blocks of rho.
pub type LabelShape = Vec<usize>;

impl NCInterval {
    pub fn new(rho: NoncrossingPartition, kappa: NoncrossingPartition) -> Result<Self> {
        if !nc_leq(&rho, &kappa)? {
            return Err(Error::NotAnInterval {
                lower: rho.to_string(),
                upper: kappa.to_string(),
                kind: "noncrossing refinement",
            });
        }
        Ok(Self { rho, kappa })
    }

    /// The unique interval of `NC_1`, root of the generating tree.
    pub fn root() -> Self {
        Self {
            rho: NoncrossingPartition::singletons(1),
            kappa: NoncrossingPartition::singletons(1),
        }
    }

    pub fn k(&self) -> usize {
        self.rho.k
    }

    /// Exposed blocks of kappa paired with the exposed blocks of rho they
    /// contain, all ordered right to left.
    fn exposed_structure(&self) -> Vec<(&[usize], Vec<&[usize]>)> {
        let rho_exposed = self.rho.exposed_blocks();
        self.kappa
            .exposed_blocks()
            .into_iter()
            .map(|big| {
                let inside = rho_exposed
                    .iter()
                    .copied()
                    .filter(|small| small.iter().all(|x| big.contains(x)))
                    .collect();
                (big, inside)
            })
            .collect()
    }

    pub fn shape(&self) -> LabelShape {
        self.exposed_structure().iter().map(|(_, inside)| inside.len()).collect()
    }

    /// `1 + t + (m_1 + ... + m_t)`.
    pub fn label(&self) -> usize {
        let shape = self.shape();
        1 + shape.len() + shape.iter().sum::<usize>()
    }

    /// Children over `[k+1]` in the order `u; v_1..v_t; w_{1,1}..w_{t,m_t}`.
    pub fn children(&self) -> Vec<NCInterval> {
        let structure = self.exposed_structure();
        let mut out = Vec::with_capacity(self.label());
        out.push(Self {
            rho: self.rho.with_singleton(),
            kappa: self.kappa.with_singleton(),
        });
        for (big, _) in &structure {
            out.push(Self {
                rho: self.rho.with_singleton(),
                kappa: self.kappa.with_new_max_in(big),
            });
        }
        for (big, inside) in &structure {
            for small in inside {
                out.push(Self {
                    rho: self.rho.with_new_max_in(small),
                    kappa: self.kappa.with_new_max_in(big),
                });
            }
        }
        out
    }

    /// The interval this one was generated from.
    pub fn parent(&self) -> Self {
        Self {
            rho: self.rho.without_max(),
            kappa: self.kappa.without_max(),
        }
    }

    /// Parses `rho|kappa`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('|').ok_or_else(|| Error::Parse {
            what: "noncrossing interval",
            input: s.into(),
            reason: "expected rho|kappa".into(),
        })?;
        let (rho, kappa): (NoncrossingPartition, NoncrossingPartition) = (a.parse()?, b.parse()?);
        Self::new(rho, kappa)
    }
}

impl fmt::Display for NCInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.rho, self.kappa)
    }
}

impl fmt::Debug for NCInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCInterval({self})")
    }
}

/// `Int(NC_k)` by testing every pair.
pub fn enumerate_nc_intervals(k: usize) -> Vec<NCInterval> {
    let parts = enumerate_noncrossing(k);
    let mut out = Vec::new();
    for a in &parts {
        for b in &parts {
            if nc_leq(a, b).unwrap() {
                out.push(NCInterval {
                    rho: a.clone(),
                    kappa: b.clone(),
                });
            }
        }
    }
    out
}

/// Level `k >= 1` of the generating tree, in depth-first child order.
pub fn tree_level(k: usize) -> Vec<NCInterval> {
    assert!(k >= 1, "the tree starts at k = 1");
    let mut level = vec![NCInterval::root()];
    for _ in 1..k {
        level = level.iter().flat_map(NCInterval::children).collect();
    }
    level
}
