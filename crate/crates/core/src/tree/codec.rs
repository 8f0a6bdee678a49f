//! `RBT1` binary tree files.
//!
//! Layout, all integers little-endian:
//!
//! | field            | bytes |
//! |------------------|-------|
//! | magic `RBT1`     | 4     |
//! | version `0x01`   | 1     |
//! | size             | 8     |
//! | depth            | 8     |
//! | seed             | 8     |
//! | primitive count  | 2     |
//! | per primitive: name length (1), name, arity (1) | |
//! | opcodes          | size  |

use std::io::{self, Read, Write};
use std::sync::Arc;

use super::{opcode_depth, Arity, PrimitiveSet, Tree};
use crate::error::{Error, Result};
use crate::shape::alloc_bytes;

pub const MAGIC: &[u8; 4] = b"RBT1";
pub const VERSION: u8 = 1;

pub fn write_opcodes<W: Write>(tree: &Tree, mut out: W) -> Result<()> {
    if !tree.wellformed() {
        return Err(Error::shape("refusing to write a malformed tree"));
    }
    let prims = tree.primitives();
    let mut header = Vec::with_capacity(64);
    header.extend_from_slice(MAGIC);
    header.push(VERSION);
    header.extend_from_slice(&tree.size().to_le_bytes());
    header.extend_from_slice(&tree.depth().to_le_bytes());
    header.extend_from_slice(&tree.seed().to_le_bytes());
    header.extend_from_slice(&(prims.len() as u16).to_le_bytes());
    for (name, arity) in prims.iter() {
        header.push(name.len() as u8);
        header.extend_from_slice(name.as_bytes());
        header.push(arity.value());
    }
    out.write_all(&header)?;
    out.write_all(tree.opcodes())?;
    out.flush()?;
    Ok(())
}

pub fn write_opcode_file(tree: &Tree, path: impl AsRef<std::path::Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_opcodes(tree, io::BufWriter::new(file))
}

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format("file truncated".into())
    } else {
        Error::Io(e)
    }
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf)
}

/// Reads a tree whose header must list exactly the primitives of `prims`,
/// in the same order.
pub fn read_opcodes<R: Read>(mut input: R, prims: &Arc<PrimitiveSet>) -> Result<Tree> {
    let magic: [u8; 4] = read_array(&mut input)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let [version] = read_array(&mut input)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let size = u64::from_le_bytes(read_array(&mut input)?);
    let depth = u64::from_le_bytes(read_array(&mut input)?);
    let seed = u64::from_le_bytes(read_array(&mut input)?);
    let count = u16::from_le_bytes(read_array(&mut input)?) as usize;

    let mut listed = Vec::with_capacity(count);
    for _ in 0..count {
        let [len] = read_array(&mut input)?;
        let mut name = vec![0u8; len as usize];
        input.read_exact(&mut name).map_err(truncated)?;
        let name = String::from_utf8(name)
            .map_err(|_| Error::Format("primitive name is not UTF-8".into()))?;
        let [arity] = read_array(&mut input)?;
        let arity = Arity::from_value(arity)
            .ok_or_else(|| Error::Format(format!("primitive `{name}` has arity {arity}")))?;
        listed.push((name, arity));
    }
    let expected: Vec<(&str, Arity)> = prims.iter().collect();
    let matches = listed.len() == expected.len()
        && listed
            .iter()
            .zip(&expected)
            .all(|((n, a), (en, ea))| n == en && a == ea);
    if !matches {
        let names: Vec<&str> = listed.iter().map(|(n, _)| n.as_str()).collect();
        return Err(Error::PrimitiveMismatch(format!(
            "file lists [{}], expected [{}]",
            names.join(", "),
            expected
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }

    if size == 0 || size % 2 == 0 {
        return Err(Error::Format(format!("invalid tree size {size}")));
    }
    let mut opcodes = alloc_bytes(size)?;
    (&mut input).take(size).read_to_end(&mut opcodes)?;
    if opcodes.len() as u64 != size {
        return Err(Error::Format("file truncated".into()));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after opcodes".into()));
    }
    let actual = opcode_depth(&opcodes, prims)
        .map_err(|e| Error::Format(format!("opcodes do not form a tree: {e}")))?;
    if actual as u64 != depth {
        return Err(Error::Format(format!(
            "header depth {depth} disagrees with tree depth {actual}"
        )));
    }
    Ok(Tree {
        opcodes,
        depth,
        seed,
        primitives: Arc::clone(prims),
    })
}

pub fn read_opcode_file(
    path: impl AsRef<std::path::Path>,
    prims: &Arc<PrimitiveSet>,
) -> Result<Tree> {
    let file = std::fs::File::open(path)?;
    read_opcodes(io::BufReader::new(file), prims)
}
