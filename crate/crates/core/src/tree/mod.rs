//! Labeled program trees stored as flat preorder opcode buffers.

mod codec;
mod prims;
mod render;

use std::sync::Arc;

pub use codec::{read_opcode_file, read_opcodes, write_opcode_file, write_opcodes, MAGIC, VERSION};
pub use prims::{Arity, PrimitiveSet, MAX_PRIMITIVES};
pub use render::{to_dot, to_sexpr, DEFAULT_DOT_LIMIT};

use crate::error::{Error, Result};
use crate::prng::{RngState, UniformSource};
use crate::shape::{self, DepthWalker, ShapeSequence};

/// A labeled binary tree in preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    opcodes: Vec<u8>,
    depth: u64,
    seed: u64,
    primitives: Arc<PrimitiveSet>,
}

impl Tree {
    /// Builds a tree from an opcode buffer, checking that it is well formed
    /// and computing its depth.
    pub fn from_opcodes(
        opcodes: Vec<u8>,
        primitives: Arc<PrimitiveSet>,
        seed: u64,
    ) -> Result<Tree> {
        let depth = opcode_depth(&opcodes, &primitives)?;
        Ok(Tree {
            opcodes,
            depth: depth as u64,
            seed,
            primitives,
        })
    }

    pub fn opcodes(&self) -> &[u8] {
        &self.opcodes
    }

    pub fn size(&self) -> u64 {
        self.opcodes.len() as u64
    }

    /// Nodes on the deepest root-to-leaf path.
    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn primitives(&self) -> &Arc<PrimitiveSet> {
        &self.primitives
    }

    pub fn into_opcodes(self) -> Vec<u8> {
        self.opcodes
    }

    pub fn wellformed(&self) -> bool {
        wellformed(&self.opcodes, &self.primitives)
    }

    /// Maps opcodes back to their shape tags.
    pub fn shape(&self) -> ShapeSequence {
        let nt = self.primitives.terminals().len() as u8;
        ShapeSequence::from_raw(self.opcodes.iter().map(|&op| (op >= nt) as u8).collect())
    }
}

/// True iff every opcode is defined in `prims` and the arity sequence is a
/// single complete preorder tree.
pub fn wellformed(opcodes: &[u8], prims: &PrimitiveSet) -> bool {
    let total = prims.len();
    let nt = prims.terminals().len() as u8;
    if opcodes.iter().any(|&op| op as usize >= total) {
        return false;
    }
    shape::valid_bytes(opcodes.iter().map(|&op| (op >= nt) as u8))
}

fn opcode_depth(opcodes: &[u8], prims: &PrimitiveSet) -> Result<usize> {
    let total = prims.len();
    let nt = prims.terminals().len() as u8;
    let mut walker = DepthWalker::new();
    for (pos, &op) in opcodes.iter().enumerate() {
        if op as usize >= total {
            return Err(Error::shape(format!(
                "undefined opcode {op} at position {pos}"
            )));
        }
        walker.visit(op >= nt, pos)?;
    }
    walker.finish()
}

/// Overwrites each tag with a uniformly chosen opcode of matching arity.
///
/// Draws are skipped for a class with a single member. The buffer is
/// checked for validity while it is labeled.
pub fn label_in_place<S: UniformSource>(
    shape: ShapeSequence,
    prims: &PrimitiveSet,
    rng: &mut S,
) -> Result<Vec<u8>> {
    let mut buf = shape.into_bytes();
    let nt = prims.terminals().len() as u64;
    let nf = prims.functions().len() as u64;
    let mut open: i64 = 1;
    for (pos, slot) in buf.iter_mut().enumerate() {
        if open <= 0 {
            return Err(Error::shape(format!(
                "tree complete before position {pos}, input remains"
            )));
        }
        if *slot == 0 {
            open -= 1;
            *slot = pick(rng, nt) as u8;
        } else {
            open += 1;
            *slot = (nt + pick(rng, nf)) as u8;
        }
    }
    if open != 0 {
        return Err(Error::shape("sequence ends with unfilled child slots"));
    }
    Ok(buf)
}

#[inline]
fn pick<S: UniformSource>(rng: &mut S, class_size: u64) -> u64 {
    if class_size > 1 {
        rng.below(class_size)
    } else {
        0
    }
}

/// One pass that both labels and measures depth. Consumes the generator
/// exactly as [`label_in_place`] does, so the output is identical.
fn label_and_measure<S: UniformSource>(
    shape: ShapeSequence,
    prims: &PrimitiveSet,
    rng: &mut S,
) -> Result<(Vec<u8>, usize)> {
    let mut buf = shape.into_bytes();
    let nt = prims.terminals().len() as u64;
    let nf = prims.functions().len() as u64;
    let mut walker = DepthWalker::new();
    for (pos, slot) in buf.iter_mut().enumerate() {
        let is_func = *slot != 0;
        walker.visit(is_func, pos)?;
        *slot = if is_func {
            (nt + pick(rng, nf)) as u8
        } else {
            pick(rng, nt) as u8
        };
    }
    let depth = walker.finish()?;
    Ok((buf, depth))
}

/// Knobs for [`random_tree_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    /// Re-run the well-formedness check on the finished tree.
    pub check_wellformed: bool,
    /// Label and measure depth in a single pass instead of two.
    pub fuse_passes: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            check_wellformed: cfg!(debug_assertions),
            fuse_passes: false,
        }
    }
}

impl GenOptions {
    /// Settings for timing runs: no debug check.
    pub fn bench() -> Self {
        GenOptions {
            check_wellformed: false,
            fuse_passes: false,
        }
    }
}

/// Number of internal nodes for a tree of `size` nodes.
pub fn internal_count(size: u64) -> Result<u64> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(Error::InvalidSize(size));
    }
    Ok((size - 1) / 2)
}

/// Uniformly random labeled tree of exactly `size` nodes.
pub fn random_tree(size: u64, prims: &Arc<PrimitiveSet>, seed: u64) -> Result<Tree> {
    random_tree_with(size, prims, seed, GenOptions::default())
}

pub fn random_tree_with(
    size: u64,
    prims: &Arc<PrimitiveSet>,
    seed: u64,
    opts: GenOptions,
) -> Result<Tree> {
    let n = internal_count(size)?;
    let mut rng = RngState::new(seed)?;
    let shape = shape::random_shape(n, &mut rng)?;
    let (opcodes, depth) = if opts.fuse_passes {
        label_and_measure(shape, prims, &mut rng)?
    } else {
        let depth = shape::depth_from_lattice(&shape)?;
        (label_in_place(shape, prims, &mut rng)?, depth)
    };
    let tree = Tree {
        opcodes,
        depth: depth as u64,
        seed,
        primitives: Arc::clone(prims),
    };
    if opts.check_wellformed && !tree.wellformed() {
        return Err(Error::shape(
            "generated tree failed the well-formedness check",
        ));
    }
    Ok(tree)
}

/// Default recursion ceiling for [`depth_recursive_oracle`].
pub const DEFAULT_RECURSION_LIMIT: usize = 10_000;

/// Classic recursive depth. Test oracle for the lattice depth; the caller
/// must run it on a thread whose stack can hold `limit` frames.
pub fn depth_recursive_oracle(tree: &Tree, limit: usize) -> Result<u64> {
    fn go(ops: &[u8], nt: u8, pos: &mut usize, level: usize, limit: usize) -> Result<u64> {
        if level > limit {
            return Err(Error::RecursionLimit(limit));
        }
        let op = *ops
            .get(*pos)
            .ok_or_else(|| Error::shape("truncated opcode buffer"))?;
        *pos += 1;
        if op < nt {
            return Ok(1);
        }
        let left = go(ops, nt, pos, level + 1, limit)?;
        let right = go(ops, nt, pos, level + 1, limit)?;
        Ok(1 + left.max(right))
    }

    let nt = tree.primitives.terminals().len() as u8;
    let mut pos = 0;
    let depth = go(&tree.opcodes, nt, &mut pos, 1, limit)?;
    if pos != tree.opcodes.len() {
        return Err(Error::shape("trailing opcodes after a complete tree"));
    }
    Ok(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::tests::Scripted;
    use crate::shape::Tag::{Func2 as F, Leaf as L};

    fn xy_add() -> Arc<PrimitiveSet> {
        Arc::new(PrimitiveSet::new(["x", "y"], ["ADD"]).unwrap())
    }

    fn x_add() -> Arc<PrimitiveSet> {
        Arc::new(PrimitiveSet::new(["x"], ["ADD"]).unwrap())
    }

    #[test]
    fn singleton_classes_need_no_draws() {
        let shape = ShapeSequence::from_tags(&[F, L, L]);
        let ops = label_in_place(shape, &x_add(), &mut Scripted(vec![])).unwrap();
        assert_eq!(ops, [1, 0, 0]);
    }

    #[test]
    fn scripted_terminal_choice() {
        let shape = ShapeSequence::from_tags(&[L]);
        let ops = label_in_place(shape, &xy_add(), &mut Scripted(vec![1])).unwrap();
        assert_eq!(xy_add().name(ops[0]), Some("y"));
    }

    #[test]
    fn labeling_rejects_invalid_shapes() {
        let mut rng = RngState::new(1).unwrap();
        for bad in [&[L, F, L][..], &[F, L]] {
            let r = label_in_place(ShapeSequence::from_tags(bad), &xy_add(), &mut rng);
            assert!(matches!(r, Err(Error::InvalidShape(_))));
        }
    }

    #[test]
    fn small_sizes() {
        let prims = Arc::new(PrimitiveSet::default_set());
        let t = random_tree(1, &prims, 3).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(prims.arity(t.opcodes()[0]), Some(Arity::Terminal));

        let t = random_tree(3, &prims, 3).unwrap();
        assert_eq!(t.depth(), 2);
        let arities: Vec<_> = t
            .opcodes()
            .iter()
            .map(|&o| prims.arity(o).unwrap())
            .collect();
        assert_eq!(arities, [Arity::Binary, Arity::Terminal, Arity::Terminal]);

        assert!(matches!(
            random_tree(2, &prims, 3),
            Err(Error::InvalidSize(2))
        ));
        assert!(matches!(
            random_tree(0, &prims, 3),
            Err(Error::InvalidSize(0))
        ));
        assert!(matches!(random_tree(3, &prims, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn size_seven_golden() {
        // Seed 1 shuffles LFLFLFL into LFLLFLF; the first minimum is at 4.
        let t = random_tree(7, &x_add(), 1).unwrap();
        assert_eq!(t.opcodes(), GOLDEN_7);
        assert_eq!(t.depth(), 4);
        assert_eq!(to_sexpr(&t), "(ADD x (ADD x (ADD x x)))");
    }

    const GOLDEN_7: &[u8] = &[1, 0, 1, 0, 1, 0, 0];

    #[test]
    fn fused_pass_matches_two_passes() {
        let prims = Arc::new(PrimitiveSet::default_set());
        for seed in 1..40 {
            let size = 2 * (seed * 37 % 500) + 1;
            let a = random_tree_with(size, &prims, seed, GenOptions::default()).unwrap();
            let fused = GenOptions {
                fuse_passes: true,
                ..GenOptions::default()
            };
            let b = random_tree_with(size, &prims, seed, fused).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn wellformed_examples() {
        let prims = x_add();
        assert!(!wellformed(&[1, 0], &prims));
        assert!(!wellformed(&[0, 0], &prims));
        assert!(!wellformed(&[1, 0, 2], &prims));
        assert!(wellformed(&[1, 0, 0], &prims));
        assert!(random_tree(1001, &prims, 9).unwrap().wellformed());
    }

    #[test]
    fn recursive_oracle_examples() {
        let prims = x_add();
        let leaf = Tree::from_opcodes(vec![0], Arc::clone(&prims), 1).unwrap();
        assert_eq!(depth_recursive_oracle(&leaf, 10).unwrap(), 1);
        let t = Tree::from_opcodes(vec![1, 0, 1, 0, 0], Arc::clone(&prims), 1).unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(depth_recursive_oracle(&t, 10).unwrap(), 3);
        assert!(matches!(
            depth_recursive_oracle(&t, 2),
            Err(Error::RecursionLimit(2))
        ));
    }

    #[test]
    fn from_opcodes_rejects_malformed() {
        let prims = x_add();
        assert!(Tree::from_opcodes(vec![1, 0], Arc::clone(&prims), 1).is_err());
        assert!(Tree::from_opcodes(vec![5], Arc::clone(&prims), 1).is_err());
    }

    #[test]
    fn labeling_counts_follow_tags() {
        let prims = Arc::new(PrimitiveSet::default_set());
        let t = random_tree(2001, &prims, 77).unwrap();
        let terminals = t
            .opcodes()
            .iter()
            .filter(|&&o| prims.arity(o) == Some(Arity::Terminal))
            .count();
        assert_eq!(terminals, 1001);
    }
}
