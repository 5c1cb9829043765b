//! Independent reference implementations and random generators used by the
//! integration and acceptance tests. Nothing here calls the code under test
//! except to build inputs.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use subtile::project::Symbol;
use subtile::{PosteriorMatrix, SegmentedText, SubtitleDocument, TimeMs};

pub type Rows = Vec<Vec<f64>>;

/// Random posteriors as log-softmax of uniform scores in [-3, 3].
pub fn random_matrix<R: Rng>(rng: &mut R, frames: usize, vocab: usize) -> PosteriorMatrix<f64> {
    let scores = (0..frames)
        .map(|_| (0..vocab).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let names = (0..vocab)
        .map(|i| {
            if i == 0 {
                "<blank>".to_string()
            } else {
                format!("t{i}")
            }
        })
        .collect();
    PosteriorMatrix::from_scores(scores, names, 0, 40.0).unwrap()
}

/// Best path score over every monotone stay/advance state sequence, and the
/// earliest frame at which it consumes the last token. Enumerates paths
/// explicitly; no dynamic programming.
pub fn brute_force_segment(p: &PosteriorMatrix<f64>, tokens: &[usize]) -> Option<(f64, usize)> {
    let len = tokens.len();
    let frames = p.frames();
    let blank = p.blank();
    let mut best: Option<(f64, usize)> = None;
    for end in 0..frames {
        // bit t of `moves` (t >= 1) says whether frame t advances
        let steps = end;
        let mut best_here = f64::NEG_INFINITY;
        for first in 0..=1usize {
            for moves in 0u32..(1u32 << steps) {
                let mut state = first;
                let mut score = if first == 0 {
                    p.log_prob(0, blank)
                } else {
                    p.log_prob(0, tokens[0])
                };
                let mut ok = state <= len;
                for t in 1..=end {
                    if !ok {
                        break;
                    }
                    let advance = moves >> (t - 1) & 1 == 1;
                    if advance {
                        state += 1;
                        if state > len {
                            ok = false;
                            break;
                        }
                        score += p.log_prob(t, tokens[state - 1]);
                    } else if state == 0 {
                        score += p.log_prob(t, blank);
                    } else {
                        score += p.log_prob(t, blank).max(p.log_prob(t, tokens[state - 1]));
                    }
                }
                if ok && state == len && score > best_here {
                    best_here = score;
                }
            }
        }
        if best_here > f64::NEG_INFINITY && best.is_none_or(|(s, _)| best_here > s) {
            best = Some((best_here, end));
        }
    }
    best
}

/// Collapses a frame path with the CTC rule.
pub fn collapse(path: &[usize], blank: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = None;
    for &s in path {
        if Some(s) != prev && s != blank {
            out.push(s);
        }
        prev = Some(s);
    }
    out
}

/// Probability of `label` by summing every frame path (V^T of them).
pub fn label_probability_by_paths(p: &PosteriorMatrix<f64>, label: &[usize]) -> f64 {
    let (frames, vocab) = (p.frames(), p.vocab_size());
    let mut total = 0.0;
    let mut path = vec![0usize; frames];
    loop {
        if collapse(&path, p.blank()) == label {
            total += (0..frames)
                .map(|t| p.log_prob(t, path[t]))
                .sum::<f64>()
                .exp();
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == frames {
                return total;
            }
            path[i] += 1;
            if path[i] < vocab {
                break;
            }
            path[i] = 0;
            i += 1;
        }
    }
}

/// Every label sequence over the non-blank tokens with length up to `max_len`,
/// in lexicographic order.
pub fn all_labelings(vocab: usize, blank: usize, max_len: usize) -> Vec<Vec<usize>> {
    let symbols: Vec<usize> = (0..vocab).filter(|&v| v != blank).collect();
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for &s in &symbols {
                let mut l: Vec<usize> = prefix.clone();
                l.push(s);
                next.push(l);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

/// Minimal edit cost (match 0, insert/delete 1, no substitution) as a
/// shortest path over the alignment graph, found with 0-1 BFS.
pub fn edit_cost_by_search(a: &[Symbol], b: &[Symbol]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut dist = vec![usize::MAX; (n + 1) * (m + 1)];
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let mut queue = VecDeque::new();
    dist[0] = 0;
    queue.push_back((0usize, 0usize));
    while let Some((i, j)) = queue.pop_front() {
        let d = dist[idx(i, j)];
        if i < n && j < m && a[i] == b[j] && d < dist[idx(i + 1, j + 1)] {
            dist[idx(i + 1, j + 1)] = d;
            queue.push_front((i + 1, j + 1));
        }
        for (ni, nj) in [(i + 1, j), (i, j + 1)] {
            if ni <= n && nj <= m && d + 1 < dist[idx(ni, nj)] {
                dist[idx(ni, nj)] = d + 1;
                queue.push_back((ni, nj));
            }
        }
    }
    dist[idx(n, m)]
}

fn is_subsequence(needle: &[Symbol], hay: &[Symbol]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|s| it.any(|h| h == s))
}

/// Minimal edit cost by enumerating subsequences of the shorter mask, largest
/// first: without substitutions the cost is `n + m - 2 * longest common
/// subsequence`.
pub fn edit_cost_by_enumeration(a: &[Symbol], b: &[Symbol]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let n = short.len();
    assert!(n <= 24);
    for size in (1..=n).rev() {
        // subsets of `size` elements in increasing order (Gosper's hack)
        let mut bits: u32 = (1 << size) - 1;
        while bits < 1 << n {
            let sub: Vec<Symbol> = (0..n)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| short[i])
                .collect();
            if is_subsequence(&sub, long) {
                return a.len() + b.len() - 2 * size;
            }
            let c = bits & bits.wrapping_neg();
            let r = bits + c;
            bits = (((r ^ bits) >> 2) / c) | r;
        }
    }
    a.len() + b.len()
}

pub fn random_mask<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Symbol> {
    let len = rng.gen_range(1..=max_len);
    let mut s: Vec<Symbol> = (0..len - 1)
        .map(|_| {
            if rng.gen_bool(0.25) {
                Symbol::B
            } else {
                Symbol::C
            }
        })
        .collect();
    s.push(Symbol::B);
    s
}

const WORDS: &[&str] = &[
    "a",
    "to",
    "the",
    "word",
    "block",
    "speech",
    "timing",
    "subtitle",
    "é",
    "Übersetzung",
    "naïve",
    "I",
    "sí",
    "caption",
];

fn random_line<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn random_segmented<R: Rng>(rng: &mut R, max_blocks: usize) -> SegmentedText {
    let blocks = rng.gen_range(1..=max_blocks);
    SegmentedText::new(
        (0..blocks)
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| random_line(rng))
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

/// Random caption with non-overlapping blocks, each lasting at least one
/// millisecond per masked character.
pub fn random_caption<R: Rng>(rng: &mut R, max_blocks: usize) -> SubtitleDocument {
    let seg = random_segmented(rng, max_blocks);
    let mut t = rng.gen_range(0..5_000u64);
    let cues: Vec<_> = seg
        .blocks()
        .iter()
        .map(|lines| {
            let chars = subtile::project::masked_block_len(lines) as u64;
            let start = t + rng.gen_range(0..800);
            let end = start + chars + rng.gen_range(0..4_000);
            t = end;
            (TimeMs(start), TimeMs(end), lines.clone())
        })
        .collect();
    SubtitleDocument::from_timed(cues).unwrap()
}

/// A peaked posterior matrix generated from a known alignment: `emit[i]` is
/// the single frame at which token `i` is emitted; every other frame is blank.
pub fn peaked_matrix(
    vocab: &[&str],
    tokens: &[usize],
    emit: &[usize],
    frames: usize,
    frame_ms: f64,
) -> PosteriorMatrix<f64> {
    let v = vocab.len();
    let other = 0.1 / (v - 1) as f64;
    let rows: Rows = (0..frames)
        .map(|t| {
            let hot = emit
                .iter()
                .position(|&f| f == t)
                .map(|i| tokens[i])
                .unwrap_or(0);
            (0..v)
                .map(|k| if k == hot { 0.9f64.ln() } else { other.ln() })
                .collect()
        })
        .collect();
    PosteriorMatrix::new(
        rows,
        vocab.iter().map(|s| s.to_string()).collect(),
        0,
        frame_ms,
    )
    .unwrap()
}
