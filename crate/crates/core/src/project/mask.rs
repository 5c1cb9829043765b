use std::fmt;
use std::str::FromStr;

use crate::subtitle::{char_count, SegmentedText};

use super::ProjectionError;

/// One position of a block mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// A displayed character (line breaks count as one).
    C,
    /// A block boundary.
    B,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::C => 'C',
            Symbol::B => 'B',
        }
    }
}

/// A document rendered over `{C, B}`: one `C` per displayed character and one
/// `B` closing each block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockMask(Vec<Symbol>);

impl BlockMask {
    /// Checks the mask is non-empty and ends with `B`.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, ProjectionError> {
        if symbols.last() != Some(&Symbol::B) {
            return Err(ProjectionError::InvalidMask);
        }
        Ok(BlockMask(symbols))
    }

    /// Mask of blocks with the given character counts.
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self, ProjectionError> {
        let mut symbols = Vec::with_capacity(sizes.iter().sum::<usize>() + sizes.len());
        for &n in sizes {
            symbols.extend(std::iter::repeat_n(Symbol::C, n));
            symbols.push(Symbol::B);
        }
        Self::new(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::B).count()
    }

    /// Number of `C`s in each block.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.0
            .split(|&s| s == Symbol::B)
            .take(self.block_count())
            .map(<[Symbol]>::len)
            .collect()
    }
}

impl fmt::Display for BlockMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for BlockMask {
    type Err = ProjectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .chars()
            .map(|c| match c {
                'C' => Ok(Symbol::C),
                'B' => Ok(Symbol::B),
                _ => Err(ProjectionError::InvalidMask),
            })
            .collect::<Result<_, _>>()?;
        Self::new(symbols)
    }
}

/// Characters a block occupies in its mask: every line's characters plus one
/// per line break.
pub fn masked_block_len<S: AsRef<str>>(lines: &[S]) -> usize {
    lines.iter().map(|l| char_count(l.as_ref())).sum::<usize>() + lines.len().saturating_sub(1)
}

pub fn mask_blocks(seg: &SegmentedText) -> Result<BlockMask, ProjectionError> {
    if seg.is_empty() {
        return Err(ProjectionError::EmptyDocument);
    }
    let sizes: Vec<usize> = seg.blocks().iter().map(|b| masked_block_len(b)).collect();
    BlockMask::from_block_sizes(&sizes)
}
