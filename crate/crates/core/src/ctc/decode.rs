use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::scalar::{log_add, LogFloat};

use super::{CtcError, PosteriorMatrix};

/// A decoded label sequence and its log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis<F> {
    pub tokens: Vec<usize>,
    pub log_prob: F,
}

impl<F: LogFloat> Hypothesis<F> {
    pub fn text(&self, vocab: &[String]) -> String {
        self.tokens
            .iter()
            .map(|&t| vocab[t].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Higher probability first, then lexicographically smaller token ids.
fn rank<F: LogFloat>(a: (&[usize], F), b: (&[usize], F)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(b.0))
}

fn argmax<F: LogFloat>(row: &[F]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Best-path decoding: per-frame argmax, merge repeats, drop blanks.
pub fn greedy_decode<F: LogFloat>(p: &PosteriorMatrix<F>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = None;
    for t in 0..p.frames() {
        let best = argmax(p.row(t));
        if Some(best) != prev && best != p.blank() {
            out.push(best);
        }
        prev = Some(best);
    }
    out
}

/// Log of the total probability of `label` summed over all of its CTC
/// alignments (forward algorithm over the blank-interleaved label).
pub fn ctc_label_log_probability<F: LogFloat>(
    p: &PosteriorMatrix<F>,
    label: &[usize],
) -> Result<F, CtcError> {
    if let Some(pos) = label.iter().position(|&t| t == p.blank()) {
        return Err(CtcError::BlankToken(pos));
    }
    if let Some(&t) = label.iter().find(|&&t| t >= p.vocab_size()) {
        return Err(CtcError::UnknownToken(format!("#{t}")));
    }
    let blank = p.blank();
    let ext: Vec<usize> = std::iter::once(blank)
        .chain(label.iter().flat_map(|&t| [t, blank]))
        .collect();
    let s_len = ext.len();
    let neg = F::neg_infinity();

    let mut alpha = vec![neg; s_len];
    alpha[0] = p.log_prob(0, ext[0]);
    if s_len > 1 {
        alpha[1] = p.log_prob(0, ext[1]);
    }
    let mut next = vec![neg; s_len];
    for t in 1..p.frames() {
        for s in 0..s_len {
            let mut acc = alpha[s];
            if s >= 1 {
                acc = log_add(acc, alpha[s - 1]);
            }
            if s >= 2 && ext[s] != blank && ext[s] != ext[s - 2] {
                acc = log_add(acc, alpha[s - 2]);
            }
            next[s] = if acc == neg {
                neg
            } else {
                acc + p.log_prob(t, ext[s])
            };
        }
        std::mem::swap(&mut alpha, &mut next);
    }
    let last = alpha[s_len - 1];
    Ok(if s_len >= 2 {
        log_add(last, alpha[s_len - 2])
    } else {
        last
    })
}

/// Probability (not log) of `label`; zero when the label cannot fit the frames.
pub fn ctc_label_probability<F: LogFloat>(
    p: &PosteriorMatrix<F>,
    label: &[usize],
) -> Result<F, CtcError> {
    ctc_label_log_probability(p, label).map(F::exp)
}

#[derive(Clone, Copy)]
struct PrefixScore<F> {
    blank: F,
    non_blank: F,
}

impl<F: LogFloat> PrefixScore<F> {
    fn empty() -> Self {
        PrefixScore {
            blank: F::neg_infinity(),
            non_blank: F::neg_infinity(),
        }
    }

    fn total(&self) -> F {
        log_add(self.blank, self.non_blank)
    }
}

/// CTC prefix beam search.
///
/// Keeps the `beam_width` most probable prefixes after every frame, tracking
/// separately the mass of paths ending in blank and in the last token. The
/// surviving prefixes are rescored with [`ctc_label_log_probability`], so the
/// reported `log_prob` is the exact label probability rather than the mass
/// that happened to survive pruning. Results are sorted by probability, ties
/// broken toward the lexicographically smaller token sequence.
pub fn prefix_beam_search<F: LogFloat>(
    p: &PosteriorMatrix<F>,
    beam_width: usize,
) -> Vec<Hypothesis<F>> {
    let width = beam_width.max(1);
    let blank = p.blank();
    let mut beam: Vec<(Vec<usize>, PrefixScore<F>)> = vec![(
        Vec::new(),
        PrefixScore {
            blank: F::zero(),
            non_blank: F::neg_infinity(),
        },
    )];

    for t in 0..p.frames() {
        let row = p.row(t);
        let mut next: BTreeMap<Vec<usize>, PrefixScore<F>> = BTreeMap::new();
        for (prefix, score) in &beam {
            let total = score.total();
            let entry = next
                .entry(prefix.clone())
                .or_insert_with(PrefixScore::empty);
            entry.blank = log_add(entry.blank, total + row[blank]);

            for (tok, &lp) in row.iter().enumerate() {
                if tok == blank || lp == F::neg_infinity() {
                    continue;
                }
                let mut extended = prefix.clone();
                extended.push(tok);
                if prefix.last() == Some(&tok) {
                    // repeat without a blank in between collapses into the prefix
                    let same = next.get_mut(prefix).expect("inserted above");
                    same.non_blank = log_add(same.non_blank, score.non_blank + lp);
                    let e = next.entry(extended).or_insert_with(PrefixScore::empty);
                    e.non_blank = log_add(e.non_blank, score.blank + lp);
                } else {
                    let e = next.entry(extended).or_insert_with(PrefixScore::empty);
                    e.non_blank = log_add(e.non_blank, total + lp);
                }
            }
        }
        let mut ranked: Vec<_> = next
            .into_iter()
            .filter(|(_, s)| s.total() > F::neg_infinity())
            .collect();
        ranked.sort_by(|a, b| rank((&a.0, a.1.total()), (&b.0, b.1.total())));
        ranked.truncate(width);
        beam = ranked;
    }

    let mut out: Vec<Hypothesis<F>> = beam
        .into_iter()
        .map(|(tokens, _)| {
            let log_prob = ctc_label_log_probability(p, &tokens).expect("beam never emits blank");
            Hypothesis { tokens, log_prob }
        })
        .collect();
    out.sort_by(|a, b| rank((&a.tokens, a.log_prob), (&b.tokens, b.log_prob)));
    out
}
