//! Uniformly random binary tree shapes.
//!
//! A shape with `n` internal nodes is stored as a preorder buffer of
//! `2n + 1` one-byte tags. Generation lays out `n + 1` leaves and `n`
//! functions alternately, shuffles them, finds the first minimum of the
//! lattice walk (function `+1`, leaf `-1`) and rotates the buffer so that
//! position comes first. Exactly one rotation of any arrangement is a
//! valid preorder sequence, and the first minimum picks it, so every shape
//! is hit by exactly `2n + 1` arrangements.

use std::fmt;

use crate::error::{Error, Result};
use crate::prng::UniformSource;

/// Node kind in an unlabeled shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Tag {
    Leaf = 0,
    Func2 = 1,
}

impl Tag {
    #[inline]
    pub fn from_byte(b: u8) -> Option<Tag> {
        match b {
            0 => Some(Tag::Leaf),
            1 => Some(Tag::Func2),
            _ => None,
        }
    }

    /// Change in open child slots when this tag is read.
    #[inline]
    pub fn step(self) -> i64 {
        match self {
            Tag::Leaf => -1,
            Tag::Func2 => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Tag::Leaf => 'L',
            Tag::Func2 => 'F',
        }
    }
}

/// Preorder tag buffer. May hold an arrangement that is not yet a valid
/// tree (between shuffle and rotation).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ShapeSequence {
    tags: Vec<u8>,
}

impl ShapeSequence {
    pub fn from_tags(tags: &[Tag]) -> Self {
        ShapeSequence {
            tags: tags.iter().map(|&t| t as u8).collect(),
        }
    }

    /// Parses a string of `F` and `L` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let tags = s
            .chars()
            .map(|c| match c {
                'F' | 'f' => Ok(Tag::Func2 as u8),
                'L' | 'l' => Ok(Tag::Leaf as u8),
                other => Err(Error::shape(format!("unexpected tag character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(ShapeSequence { tags })
    }

    pub(crate) fn from_raw(tags: Vec<u8>) -> Self {
        debug_assert!(tags.iter().all(|&b| b <= 1));
        ShapeSequence { tags }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.tags.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    #[inline]
    pub fn tag(&self, i: usize) -> Tag {
        if self.tags[i] == 0 {
            Tag::Leaf
        } else {
            Tag::Func2
        }
    }

    pub fn tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.tags
            .iter()
            .map(|&b| if b == 0 { Tag::Leaf } else { Tag::Func2 })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.tags
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.tags
    }

    /// Number of function (internal) tags.
    pub fn internal_count(&self) -> usize {
        self.tags.iter().filter(|&&b| b != 0).count()
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.tags.swap(i, j);
    }
}

impl fmt::Display for ShapeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.tags() {
            write!(f, "{}", t.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ShapeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShapeSequence({self})")
    }
}

pub(crate) fn alloc_bytes(len: u64) -> Result<Vec<u8>> {
    let n = usize::try_from(len).map_err(|_| Error::Allocation { bytes: len })?;
    let mut buf = Vec::new();
    buf.try_reserve_exact(n)
        .map_err(|_| Error::Allocation { bytes: len })?;
    Ok(buf)
}

/// `n + 1` leaves and `n` functions, alternating, starting and ending with
/// a leaf.
pub fn fill_alternating(n: u64) -> Result<ShapeSequence> {
    let len = n
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .ok_or(Error::Allocation { bytes: u64::MAX })?;
    let mut buf = alloc_bytes(len)?;
    buf.extend((0..len).map(|i| (i & 1) as u8));
    Ok(ShapeSequence { tags: buf })
}

/// Forward Fisher-Yates: position `i` swaps with `i + below(len - i)`.
pub fn knuth_shuffle<S: UniformSource>(seq: &mut ShapeSequence, rng: &mut S) {
    let tags = &mut seq.tags[..];
    let len = tags.len();
    if len < 2 {
        return;
    }
    for i in 0..len - 1 {
        let j = i + rng.below((len - i) as u64) as usize;
        tags.swap(i, j);
    }
}

/// Smallest `k` in `[1, len]` whose prefix sum `p_k` equals the minimum of
/// `p_1..p_len`. Returns 0 for an empty sequence.
pub fn first_min_index(seq: &ShapeSequence) -> usize {
    let mut sum: i64 = 0;
    let mut min = i64::MAX;
    let mut at = 0;
    for (i, &b) in seq.tags.iter().enumerate() {
        sum += 2 * b as i64 - 1;
        if sum < min {
            min = sum;
            at = i + 1;
        }
    }
    at
}

/// Rotates left by `k` in place using three reversals; the element at
/// index `k` ends up first.
pub fn rotate_left(seq: &mut ShapeSequence, k: usize) -> Result<()> {
    let len = seq.tags.len();
    if k > len {
        return Err(Error::domain(format!("rotation {k} exceeds length {len}")));
    }
    if k == 0 || k == len {
        return Ok(());
    }
    let tags = &mut seq.tags[..];
    tags[..k].reverse();
    tags[k..].reverse();
    tags.reverse();
    Ok(())
}

/// True iff the open-slot counter (start 1, leaf -1, function +1) stays
/// positive until the last tag and is zero after it.
pub fn is_valid_preorder(seq: &ShapeSequence) -> bool {
    valid_bytes(seq.tags.iter().copied())
}

pub(crate) fn valid_bytes(bytes: impl Iterator<Item = u8>) -> bool {
    let mut open: i64 = 1;
    for b in bytes {
        if open <= 0 {
            return false;
        }
        open += 2 * b as i64 - 1;
    }
    open == 0
}

/// Stack of pending child counts along the current root-to-node path.
///
/// Shared by the depth pass, the fused label pass and the text renderers.
#[derive(Default)]
pub(crate) struct PathStack {
    pending: Vec<u8>,
}

impl PathStack {
    /// Depth (in nodes) of the node about to be visited.
    #[inline]
    pub fn next_depth(&self) -> usize {
        self.pending.len() + 1
    }

    #[inline]
    pub fn open(&mut self) {
        self.pending.push(2);
    }

    /// A leaf or whole subtree finished. Returns how many function nodes
    /// closed as a result.
    #[inline]
    pub fn close(&mut self) -> usize {
        let mut closed = 0;
        while let Some(top) = self.pending.last_mut() {
            *top -= 1;
            if *top > 0 {
                break;
            }
            self.pending.pop();
            closed += 1;
        }
        closed
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

/// Tracks the shape walk for one pass, reporting the depth of each node
/// and rejecting sequences that are not a single complete tree.
pub(crate) struct DepthWalker {
    stack: PathStack,
    done: bool,
    pub max_depth: usize,
}

impl DepthWalker {
    pub fn new() -> Self {
        DepthWalker {
            stack: PathStack::default(),
            done: false,
            max_depth: 0,
        }
    }

    #[inline]
    pub fn visit(&mut self, is_func: bool, pos: usize) -> Result<()> {
        if self.done {
            return Err(Error::shape(format!(
                "tree complete before position {pos}, input remains"
            )));
        }
        let depth = self.stack.next_depth();
        if is_func {
            self.stack.open();
        } else {
            if depth > self.max_depth {
                self.max_depth = depth;
            }
            self.stack.close();
            if self.stack.is_empty() {
                self.done = true;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<usize> {
        if !self.done {
            return Err(Error::shape("sequence ends with unfilled child slots"));
        }
        Ok(self.max_depth)
    }
}

/// Number of nodes on the deepest root-to-leaf path, computed in one pass
/// without recursion. Extra space is proportional to the depth.
pub fn depth_from_lattice(seq: &ShapeSequence) -> Result<usize> {
    let mut walker = DepthWalker::new();
    for (pos, &b) in seq.tags.iter().enumerate() {
        walker.visit(b != 0, pos)?;
    }
    walker.finish()
}

/// Cycle-lemma rotation: moves the first lattice minimum to the front.
pub fn rotate_to_valid(seq: &mut ShapeSequence) {
    let k = first_min_index(seq);
    rotate_left(seq, k).expect("first minimum lies within the sequence");
}

/// A uniformly random shape with `n` internal nodes.
pub fn random_shape<S: UniformSource>(n: u64, rng: &mut S) -> Result<ShapeSequence> {
    let mut seq = fill_alternating(n)?;
    knuth_shuffle(&mut seq, rng);
    rotate_to_valid(&mut seq);
    Ok(seq)
}
