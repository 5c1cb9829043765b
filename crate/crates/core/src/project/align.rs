//! Edit-distance alignment of two block masks.
//!
//! Matching identical symbols is free, inserting or deleting costs 1, and a
//! `C` is never substituted for a `B` (or vice versa). The final `B`s of the
//! two masks are always paired.

use super::mask::{BlockMask, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditStep {
    /// Identical symbols on both sides.
    Match(Symbol),
    /// Target-only symbol.
    Insert(Symbol),
    /// Source-only symbol.
    Delete(Symbol),
}

impl EditStep {
    pub fn cost(self) -> usize {
        match self {
            EditStep::Match(_) => 0,
            EditStep::Insert(_) | EditStep::Delete(_) => 1,
        }
    }

    fn source(self) -> Option<Symbol> {
        match self {
            EditStep::Match(s) | EditStep::Delete(s) => Some(s),
            EditStep::Insert(_) => None,
        }
    }

    fn target(self) -> Option<Symbol> {
        match self {
            EditStep::Match(s) | EditStep::Insert(s) => Some(s),
            EditStep::Delete(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentPath {
    steps: Vec<EditStep>,
}

impl AlignmentPath {
    pub fn steps(&self) -> &[EditStep] {
        &self.steps
    }

    pub fn cost(&self) -> usize {
        self.steps.iter().map(|s| s.cost()).sum()
    }

    pub fn source_symbols(&self) -> Vec<Symbol> {
        self.steps.iter().filter_map(|s| s.source()).collect()
    }

    pub fn target_symbols(&self) -> Vec<Symbol> {
        self.steps.iter().filter_map(|s| s.target()).collect()
    }
}

/// Minimal-cost alignment. Among equal-cost alternatives the backtrace
/// prefers a match, then a deletion, then an insertion.
pub fn levenshtein_align(src: &BlockMask, tgt: &BlockMask) -> AlignmentPath {
    // the closing Bs are paired outside the table
    let a = &src.symbols()[..src.len() - 1];
    let b = &tgt.symbols()[..tgt.len() - 1];
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for (j, cell) in d[..w].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        d[i * w] = i;
        for j in 1..=m {
            let mut best = d[(i - 1) * w + j].min(d[i * w + j - 1]) + 1;
            if a[i - 1] == b[j - 1] {
                best = best.min(d[(i - 1) * w + j - 1]);
            }
            d[i * w + j] = best;
        }
    }

    let mut steps = Vec::with_capacity(n + m + 1);
    steps.push(EditStep::Match(Symbol::B));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 && a[i - 1] == b[j - 1] && d[(i - 1) * w + j - 1] == here {
            steps.push(EditStep::Match(a[i - 1]));
            i -= 1;
            j -= 1;
        } else if i > 0 && d[(i - 1) * w + j] + 1 == here {
            steps.push(EditStep::Delete(a[i - 1]));
            i -= 1;
        } else {
            steps.push(EditStep::Insert(b[j - 1]));
            j -= 1;
        }
    }
    steps.reverse();
    AlignmentPath { steps }
}
