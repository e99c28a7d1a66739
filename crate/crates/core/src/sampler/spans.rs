//! Span placement inside a single paragraph.

use std::ops::Range;

use rand::Rng;

use crate::corpus::Paragraph;

/// Longest span length the sampler ever draws for `b`.
pub const MAX_B_SENTENCES: usize = 3;

/// Draws a span length uniformly from `1..=3`, then clips it to `max_len`.
fn draw_len<R: Rng + ?Sized>(max_len: usize, rng: &mut R) -> usize {
    rng.random_range(1..=MAX_B_SENTENCES).min(max_len)
}

/// A uniformly placed span of clipped-uniform length inside `n` sentences.
/// `max_len` must be at least 1 and at most `n`.
pub(crate) fn draw_span<R: Rng + ?Sized>(n: usize, max_len: usize, rng: &mut R) -> Range<usize> {
    debug_assert!(max_len >= 1 && max_len <= n);
    let len = draw_len(max_len, rng);
    let start = rng.random_range(0..=n - len);
    start..start + len
}

/// Sentences left of and right of `a` that a span may occupy while keeping
/// `gap` sentences between itself and `a`.
fn room(n: usize, a: usize, gap: usize) -> (usize, usize) {
    (a.saturating_sub(gap), n.saturating_sub(a + 1 + gap))
}

/// Draws a single-sentence anchor `a` and a span `b` of 1–3 sentences that
/// does not overlap it and keeps at least `gap` sentences between the two.
///
/// `a` is uniform over the positions that admit some valid `b`; the length of
/// `b` is uniform in 1..=3, clipped to `max_b_len` and to the larger free run
/// beside `a`; its start is uniform over every valid placement on either side.
pub(crate) fn draw_pair<R: Rng + ?Sized>(
    n: usize,
    gap: usize,
    max_b_len: usize,
    rng: &mut R,
) -> Option<(usize, Range<usize>)> {
    if max_b_len == 0 {
        return None;
    }
    let anchors: Vec<usize> = (0..n)
        .filter(|&a| {
            let (l, r) = room(n, a, gap);
            l.max(r) >= 1
        })
        .collect();
    if anchors.is_empty() {
        return None;
    }
    let a = anchors[rng.random_range(0..anchors.len())];
    let (left, right) = room(n, a, gap);
    let len = draw_len(max_b_len.min(left.max(right)), rng);

    // Left placements: starts 0..=left-len; right placements: a+1+gap..=n-len.
    let left_count = if left >= len { left - len + 1 } else { 0 };
    let right_count = if right >= len { right - len + 1 } else { 0 };
    let pick = rng.random_range(0..left_count + right_count);
    let start = if pick < left_count {
        pick
    } else {
        a + 1 + gap + (pick - left_count)
    };
    Some((a, start..start + len))
}

/// Text of `range` within `paragraph`.
pub(crate) fn span_text(paragraph: &Paragraph, range: Range<usize>) -> String {
    paragraph.join(range)
}
