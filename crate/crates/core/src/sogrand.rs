//! Guess-ordered list decoding of one component-code line with block-wise
//! soft output.
//!
//! The decoder walks candidate sequences in (approximately) nonincreasing
//! prior probability, starting from the per-position hard decision. Each
//! candidate is syndrome-tested against the binary image of the component
//! code; hits are listed. Pattern order is driven by *exceedance distances*
//! `δ_i(μ) = log P_in,i(hd_i) − log P_in,i(μ)`: a candidate's log-probability
//! deficit against the hard decision is the sum of the δ's of its
//! substitutions, so enumerating patterns by nondecreasing δ-sum yields the
//! maximum-likelihood guess order.
//!
//! Enumeration uses a best-first frontier over substitution patterns. Each
//! pattern (at most one alternative per position) has exactly one parent
//! under three successor moves, so the lattice is generated without
//! duplicates:
//! - deepen: advance the last substitution to the next-more-costly
//!   alternative at the same position,
//! - extend: append the cheapest alternative of the next position,
//! - shift: move a cheapest-alternative substitution one position outward.
//!
//! All three moves can only increase the δ-sum, so a priority queue on the
//! frontier emits patterns in nondecreasing total cost. Ties prefer fewer
//! substitutions, then the lexicographically smaller candidate sequence.
//! (Within a run of exactly equal costs a pattern can only surface after its
//! parent, so equal-cost emission may deviate from the global tie order;
//! exact-tie inputs are degenerate and the order stays deterministic.)
//!
//! The `Oneline` mode replaces each δ by an integer surrogate from a
//! one-parameter fit: with the δ's sorted ascending and ranked from 1, the
//! slope `β̂ = Σ r·δ_r / Σ r²` is the least-squares line through the origin,
//! and the surrogate weight is `round(rank·β̂)`. Patterns are then emitted in
//! nondecreasing integer weight while true δ's still price the list.
//!
//! After the search stops, the unlisted mass is estimated as
//! `P(A) = (1 − Σ_guessed P_seq)·(2^{bK}−1)/(2^{bN}−1)` — the probability the
//! transmitted sequence was not yet guessed, thinned by the fraction of
//! unguessed sequences that are codewords — and each listed codeword gets
//! `APP(c) = P_seq(c) / (Σ_listed P_seq + P(A))`.

use crate::belief::CellBelief;
use crate::bits::BitMatrix;
use crate::codes::ComponentCode;
use crate::error::Error;
use crate::gf::GfElem;
use crate::real::Real;
use smallvec::SmallVec;

/// Pattern-ordering rule for the guess stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternMode {
    /// Best-first enumeration by true δ-sum.
    Exact,
    /// Integer weights from the one-parameter line fit of the sorted δ's.
    Oneline,
}

/// Knobs of one soft-input soft-output component decode.
#[derive(Debug, Clone)]
pub struct SisoParams<T> {
    /// Maximal list size.
    pub n_l: usize,
    /// Stop once the not-in-list probability falls below this.
    pub threshold: T,
    /// Hard cap on issued guesses.
    pub max_queries: usize,
    /// Pattern ordering rule.
    pub mode: PatternMode,
}

impl<T: Real> Default for SisoParams<T> {
    fn default() -> Self {
        SisoParams {
            n_l: 4,
            threshold: T::rc(1e-4),
            max_queries: 100_000,
            mode: PatternMode::Exact,
        }
    }
}

/// One listed codeword with its a-posteriori probability.
#[derive(Debug, Clone)]
pub struct ListEntry<T> {
    /// Symbols of the codeword, one cell value per position.
    pub word: Vec<GfElem>,
    /// APP mass assigned to this codeword.
    pub app: T,
}

/// Result of one component decode: the codeword list plus the mass kept for
/// codewords outside it.
#[derive(Debug, Clone)]
pub struct SoftOutput<T> {
    pub words: Vec<ListEntry<T>>,
    pub p_not_in_list: T,
    /// Number of candidate sequences tested.
    pub queries: usize,
}

impl<T: Real> SoftOutput<T> {
    pub fn best_word(&self) -> Option<&[GfElem]> {
        let mut best: Option<usize> = None;
        for (i, e) in self.words.iter().enumerate() {
            if best.map_or(true, |b| e.app > self.words[b].app) {
                best = Some(i);
            }
        }
        best.map(|i| self.words[i].word.as_slice())
    }
}

/// Per-position most probable value (ties toward the smaller value).
pub fn hard_decision<T: Real>(input: &[CellBelief<T>]) -> Result<Vec<GfElem>, Error> {
    if input.is_empty() {
        return Err(Error::param("input", "no positions"));
    }
    Ok(input.iter().map(|cb| cb.arg_max()).collect())
}

/// Exceedance distances per position: every retained value except the hard
/// decision, as `(value, δ)` with `δ = log P(hd) − log P(value) ≥ 0`, sorted
/// by ascending δ (ties toward smaller values).
pub fn exceedance_llrs<T: Real>(input: &[CellBelief<T>]) -> Vec<Vec<(GfElem, T)>> {
    input
        .iter()
        .map(|cb| {
            let hd = cb.arg_max();
            let lp_hd = cb.log_prob_of(hd).expect("argmax is in support");
            let mut alts: Vec<(GfElem, T)> = cb
                .iter()
                .filter(|&(v, lp)| v != hd && lp > T::neg_infinity())
                .map(|(v, lp)| (v, lp_hd - lp))
                .collect();
            alts.sort_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .expect("finite deltas")
                    .then(a.0.cmp(&b.0))
            });
            alts
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Alt<T> {
    value: GfElem,
    delta: T,
    weight: T,
}

#[derive(Debug, Clone)]
struct ActivePos<T> {
    orig: usize,
    alts: Vec<Alt<T>>,
}

/// Substitutions as (active-position rank, alternative rank), ascending in
/// the first component. Inline up to eight — deeper patterns are rare.
type Subs = SmallVec<[(u16, u16); 8]>;

#[derive(Debug, Clone)]
struct Node<T> {
    weight_sum: T,
    delta_sum: T,
    /// Parity syndrome of the realized sequence, maintained incrementally
    /// across moves (zero when the stream runs without a check).
    synd: u64,
    subs: Subs,
}

/// One emitted candidate.
#[derive(Debug, Clone)]
pub struct Candidate<T> {
    /// Full sequence, one value per original position.
    pub word: Vec<GfElem>,
    /// Total exceedance distance versus the hard decision.
    pub delta_sum: T,
    /// Number of substituted positions.
    pub substitutions: usize,
}

/// Best-first stream of candidate sequences, most probable first. The first
/// emission is always the hard decision.
pub struct PatternStream<T> {
    hd: Vec<GfElem>,
    positions: Vec<ActivePos<T>>,
    /// Per (active position, alternative): syndrome delta of substituting
    /// that alternative for the hard decision. Empty when no check is wired.
    contrib: Vec<Vec<u64>>,
    synd_hd: u64,
    heap: Vec<Node<T>>,
    emitted: usize,
    max_queries: usize,
}

impl<T: Real> PatternStream<T> {
    pub fn new(
        input: &[CellBelief<T>],
        mode: PatternMode,
        max_queries: usize,
    ) -> Result<Self, Error> {
        if max_queries == 0 {
            return Err(Error::param("max_queries", "must be positive"));
        }
        if input.len() > u16::MAX as usize {
            return Err(Error::param("input", "too many positions to enumerate"));
        }
        let hd = hard_decision(input)?;
        let deltas = exceedance_llrs(input);

        let mut positions: Vec<ActivePos<T>> = deltas
            .into_iter()
            .enumerate()
            .filter(|(_, alts)| !alts.is_empty())
            .map(|(orig, alts)| ActivePos {
                orig,
                alts: alts
                    .into_iter()
                    .map(|(value, delta)| Alt {
                        value,
                        delta,
                        weight: delta,
                    })
                    .collect(),
            })
            .collect();

        if mode == PatternMode::Oneline {
            assign_oneline_weights(&mut positions);
        }

        // Cheapest-first position order keeps every successor move
        // non-decreasing in weight.
        positions.sort_by(|a, b| {
            let (ka, kb) = (&a.alts[0], &b.alts[0]);
            ka.weight
                .partial_cmp(&kb.weight)
                .expect("finite weights")
                .then(ka.delta.partial_cmp(&kb.delta).expect("finite deltas"))
                .then(a.orig.cmp(&b.orig))
        });

        let root = Node {
            weight_sum: T::zero(),
            delta_sum: T::zero(),
            synd: 0,
            subs: Subs::new(),
        };
        Ok(PatternStream {
            hd,
            positions,
            contrib: Vec::new(),
            synd_hd: 0,
            heap: vec![root],
            emitted: 0,
            max_queries,
        })
    }

    /// Wires a parity check into the stream: every node then carries the
    /// syndrome of its realized sequence, updated by one or two XORs per
    /// move instead of a full recomputation.
    fn with_check(
        input: &[CellBelief<T>],
        mode: PatternMode,
        max_queries: usize,
        spec: &CheckSpec<'_>,
    ) -> Result<Self, Error> {
        let mut stream = Self::new(input, mode, max_queries)?;
        let b = spec.bits_per_pos as usize;
        stream.synd_hd = syndrome_of(spec, &stream.hd);
        stream.contrib = stream
            .positions
            .iter()
            .map(|pos| {
                pos.alts
                    .iter()
                    .map(|alt| {
                        let mut s = 0u64;
                        let mut bits = alt.value ^ stream.hd[pos.orig];
                        let mut t = 0usize;
                        while bits != 0 {
                            if bits & 1 == 1 {
                                s ^= spec.h.column_word(pos.orig * b + t);
                            }
                            bits >>= 1;
                            t += 1;
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        stream.heap[0].synd = stream.synd_hd;
        Ok(stream)
    }

    /// Hard-decision sequence the stream starts from.
    pub fn hard_decision_word(&self) -> &[GfElem] {
        &self.hd
    }

    fn check_delta(&self, p: u16, a: u16) -> u64 {
        if self.contrib.is_empty() {
            0
        } else {
            self.contrib[p as usize][a as usize]
        }
    }

    fn make_node(&self, subs: Subs, synd: u64) -> Node<T> {
        let mut weight_sum = T::zero();
        let mut delta_sum = T::zero();
        for &(p, a) in &subs {
            let alt = &self.positions[p as usize].alts[a as usize];
            weight_sum += alt.weight;
            delta_sum += alt.delta;
        }
        Node {
            weight_sum,
            delta_sum,
            synd,
            subs,
        }
    }

    fn tie_key(&self, node: &Node<T>) -> SmallVec<[(u16, GfElem); 8]> {
        let mut key: SmallVec<[(u16, GfElem); 8]> = node
            .subs
            .iter()
            .map(|&(p, a)| {
                let pos = &self.positions[p as usize];
                (pos.orig as u16, pos.alts[a as usize].value)
            })
            .collect();
        key.sort_unstable_by_key(|&(orig, _)| orig);
        key
    }

    /// Frontier priority: weight, then substitution count, then the
    /// lexicographically smaller candidate sequence.
    fn before(&self, a: &Node<T>, b: &Node<T>) -> bool {
        match a.weight_sum.partial_cmp(&b.weight_sum).expect("finite weights") {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        match a.subs.len().cmp(&b.subs.len()) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        // Merge-walk the two substitution keys in position order; at the
        // first divergent position compare the realized values (hard
        // decision where a node does not substitute).
        let ka = self.tie_key(a);
        let kb = self.tie_key(b);
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            match (ka.get(i), kb.get(j)) {
                (None, None) => return false,
                (Some(&(pa, va)), Some(&(pb, vb))) => {
                    if pa == pb {
                        match va.cmp(&vb) {
                            std::cmp::Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            ord => return ord == std::cmp::Ordering::Less,
                        }
                    } else if pa < pb {
                        let hd = self.hd[pa as usize];
                        match va.cmp(&hd) {
                            std::cmp::Ordering::Equal => i += 1,
                            ord => return ord == std::cmp::Ordering::Less,
                        }
                    } else {
                        let hd = self.hd[pb as usize];
                        match hd.cmp(&vb) {
                            std::cmp::Ordering::Equal => j += 1,
                            ord => return ord == std::cmp::Ordering::Less,
                        }
                    }
                }
                (Some(&(pa, va)), None) => {
                    let hd = self.hd[pa as usize];
                    match va.cmp(&hd) {
                        std::cmp::Ordering::Equal => i += 1,
                        ord => return ord == std::cmp::Ordering::Less,
                    }
                }
                (None, Some(&(pb, vb))) => {
                    let hd = self.hd[pb as usize];
                    match hd.cmp(&vb) {
                        std::cmp::Ordering::Equal => j += 1,
                        ord => return ord == std::cmp::Ordering::Less,
                    }
                }
            }
        }
    }

    fn heap_push(&mut self, node: Node<T>) {
        self.heap.push(node);
        let mut i = self.heap.len() - 1;
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.before(&self.heap[i], &self.heap[parent]) {
                self.heap.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn heap_pop(&mut self) -> Option<Node<T>> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.heap.swap(0, last);
        let top = self.heap.pop();
        let mut i = 0usize;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.before(&self.heap[l], &self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.before(&self.heap[r], &self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.heap.swap(i, best);
            i = best;
        }
        top
    }

    fn expand(&mut self, node: &Node<T>) {
        let npos = self.positions.len() as u16;
        match node.subs.last().copied() {
            None => {
                if npos > 0 {
                    let mut subs = Subs::new();
                    subs.push((0, 0));
                    let synd = node.synd ^ self.check_delta(0, 0);
                    let n = self.make_node(subs, synd);
                    self.heap_push(n);
                }
            }
            Some((p, a)) => {
                if (a as usize) + 1 < self.positions[p as usize].alts.len() {
                    let mut subs = node.subs.clone();
                    *subs.last_mut().unwrap() = (p, a + 1);
                    let synd = node.synd ^ self.check_delta(p, a) ^ self.check_delta(p, a + 1);
                    let n = self.make_node(subs, synd);
                    self.heap_push(n);
                }
                if p + 1 < npos {
                    let mut subs = node.subs.clone();
                    subs.push((p + 1, 0));
                    let synd = node.synd ^ self.check_delta(p + 1, 0);
                    let n = self.make_node(subs, synd);
                    self.heap_push(n);
                    if a == 0 {
                        let mut subs = node.subs.clone();
                        *subs.last_mut().unwrap() = (p + 1, 0);
                        let synd =
                            node.synd ^ self.check_delta(p, 0) ^ self.check_delta(p + 1, 0);
                        let n = self.make_node(subs, synd);
                        self.heap_push(n);
                    }
                }
            }
        }
    }

    /// Pops the cheapest pattern and seeds its successors; the sequence is
    /// materialized only on demand via [`Self::realize_into`].
    fn next_raw(&mut self) -> Option<Node<T>> {
        if self.emitted >= self.max_queries {
            return None;
        }
        let node = self.heap_pop()?;
        self.emitted += 1;
        self.expand(&node);
        Some(node)
    }

    fn realize_into(&self, node: &Node<T>, word: &mut Vec<GfElem>) {
        word.clear();
        word.extend_from_slice(&self.hd);
        for &(p, a) in &node.subs {
            let pos = &self.positions[p as usize];
            word[pos.orig] = pos.alts[a as usize].value;
        }
    }
}

impl<T: Real> Iterator for PatternStream<T> {
    type Item = Candidate<T>;

    fn next(&mut self) -> Option<Candidate<T>> {
        let node = self.next_raw()?;
        let mut word = Vec::new();
        self.realize_into(&node, &mut word);
        Some(Candidate {
            word,
            delta_sum: node.delta_sum,
            substitutions: node.subs.len(),
        })
    }
}

/// Replaces every δ by `round(rank·β̂)` where ranks run over the globally
/// sorted δ's and `β̂` is the least-squares slope through the origin.
fn assign_oneline_weights<T: Real>(positions: &mut [ActivePos<T>]) {
    let mut flat: Vec<(T, usize, GfElem, usize, usize)> = Vec::new();
    for (pi, pos) in positions.iter().enumerate() {
        for (ai, alt) in pos.alts.iter().enumerate() {
            flat.push((alt.delta, pos.orig, alt.value, pi, ai));
        }
    }
    if flat.is_empty() {
        return;
    }
    flat.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite deltas")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut num = T::zero();
    let mut den = T::zero();
    for (i, &(delta, ..)) in flat.iter().enumerate() {
        let r = T::rc((i + 1) as f64);
        num += r * delta;
        den += r * r;
    }
    let beta = num / den;
    for (i, &(_, _, _, pi, ai)) in flat.iter().enumerate() {
        let r = T::rc((i + 1) as f64);
        positions[pi].alts[ai].weight = (r * beta).round();
    }
    // Re-sorting inside each position keeps the deepen move monotone even
    // after rounding collapses neighboring weights.
    for pos in positions.iter_mut() {
        pos.alts.sort_by(|a, b| {
            a.weight
                .partial_cmp(&b.weight)
                .expect("finite weights")
                .then(a.delta.partial_cmp(&b.delta).expect("finite deltas"))
                .then(a.value.cmp(&b.value))
        });
    }
}

/// Syndrome machinery of one decode: a binary parity check plus the cell
/// width its columns are grouped by.
struct CheckSpec<'a> {
    h: &'a BitMatrix,
    bits_per_pos: u32,
    k_bits: usize,
    n_bits: usize,
}

/// XOR-packed syndrome of a candidate; zero means the candidate is a
/// codeword. Column `i·b + t` of the check covers bit `t` of position `i`.
fn syndrome_of(spec: &CheckSpec<'_>, word: &[GfElem]) -> u64 {
    let b = spec.bits_per_pos as usize;
    let mut s = 0u64;
    for (i, &v) in word.iter().enumerate() {
        let mut bits = v;
        let mut t = 0usize;
        while bits != 0 {
            if bits & 1 == 1 {
                s ^= spec.h.column_word(i * b + t);
            }
            bits >>= 1;
            t += 1;
        }
    }
    s
}

/// Decodes one line with symbol-sized cells: walks the guess stream, lists
/// syndrome-zero candidates, and prices them into APPs plus a not-in-list
/// mass.
///
/// Stops at `n_l` listed codewords, at `p_not_in_list < threshold`, when
/// `max_queries` candidates have been tested, or when the stream exhausts
/// every sequence in the support. If no codeword is found the output carries
/// an empty list and `p_not_in_list = 1`.
pub fn sogrand_decode<T: Real>(
    input: &[CellBelief<T>],
    code: &ComponentCode,
    params: &SisoParams<T>,
) -> Result<SoftOutput<T>, Error> {
    if input.len() != code.n() {
        return Err(Error::Length {
            what: "decoder input positions",
            expected: code.n(),
            got: input.len(),
        });
    }
    let spec = CheckSpec {
        h: code.h_bin(),
        bits_per_pos: code.field().b(),
        k_bits: code.k_bits(),
        n_bits: code.n_bits(),
    };
    decode_with_check(input, &spec, params)
}

/// Decodes one line of the code's *binary image*: the input carries one
/// 1-bit cell per codeword bit (length `n·b`). This is the bit-probability
/// SISO — identical machinery with cell size one.
pub fn sogrand_decode_bits<T: Real>(
    input: &[CellBelief<T>],
    code: &ComponentCode,
    params: &SisoParams<T>,
) -> Result<SoftOutput<T>, Error> {
    if input.len() != code.n_bits() {
        return Err(Error::Length {
            what: "decoder input bit positions",
            expected: code.n_bits(),
            got: input.len(),
        });
    }
    let spec = CheckSpec {
        h: code.h_bin(),
        bits_per_pos: 1,
        k_bits: code.k_bits(),
        n_bits: code.n_bits(),
    };
    decode_with_check(input, &spec, params)
}

fn decode_with_check<T: Real>(
    input: &[CellBelief<T>],
    spec: &CheckSpec<'_>,
    params: &SisoParams<T>,
) -> Result<SoftOutput<T>, Error> {
    if params.n_l < 1 {
        return Err(Error::param("n_l", "list needs at least one slot"));
    }
    if spec.h.nrows() > 64 {
        return Err(Error::param("code", "redundancy exceeds 64 bits"));
    }
    let cap = (1u32 << spec.bits_per_pos) as GfElem;
    for cb in input {
        if cb.values().last().copied().unwrap_or(0) >= cap {
            return Err(Error::param("input", "support value exceeds cell width"));
        }
    }

    let mut log_p_hd = T::zero();
    for cb in input {
        let hd = cb.arg_max();
        log_p_hd += cb.log_prob_of(hd).expect("argmax is in support");
    }
    let p_hd = log_p_hd.exp();

    // Fraction of the unguessed sequences that are codewords.
    let ratio = (T::rc(2.0).powi(spec.k_bits as i32) - T::one())
        / (T::rc(2.0).powi(spec.n_bits as i32) - T::one());

    let mut stream = PatternStream::with_check(input, params.mode, params.max_queries, spec)?;
    let mut listed: Vec<(Vec<GfElem>, T)> = Vec::new();
    let mut sum_listed = T::zero();
    let mut cum = T::zero();
    let mut queries = 0usize;
    let mut word_buf: Vec<GfElem> = Vec::new();

    while let Some(node) = stream.next_raw() {
        queries += 1;
        let p_seq = p_hd * (-node.delta_sum).exp();
        cum += p_seq;
        if node.synd == 0 {
            stream.realize_into(&node, &mut word_buf);
            listed.push((word_buf.clone(), p_seq));
            sum_listed += p_seq;
            if listed.len() == params.n_l {
                break;
            }
        }
        if !listed.is_empty() {
            let pa = ratio * (T::one() - cum).max(T::zero());
            let denom = sum_listed + pa;
            if denom > T::zero() && pa / denom < params.threshold {
                break;
            }
        }
    }

    let pa = ratio * (T::one() - cum).max(T::zero());
    let denom = sum_listed + pa;
    if listed.is_empty() || !(denom > T::zero()) {
        return Ok(SoftOutput {
            words: Vec::new(),
            p_not_in_list: T::one(),
            queries,
        });
    }
    let words = listed
        .into_iter()
        .map(|(word, p_seq)| ListEntry {
            word,
            app: p_seq / denom,
        })
        .collect();
    Ok(SoftOutput {
        words,
        p_not_in_list: pa / denom,
        queries,
    })
}

/// Folds the list back into per-position distributions over each input
/// support: listed mass goes to the symbols the codewords carry, and the
/// not-in-list mass falls back to the input belief. Probability domain,
/// aligned with `input[i].values()`.
pub fn marginalize_app<T: Real>(so: &SoftOutput<T>, input: &[CellBelief<T>]) -> Vec<Vec<T>> {
    input
        .iter()
        .enumerate()
        .map(|(i, cb)| {
            let mut dist: Vec<T> = cb
                .log_probs()
                .iter()
                .map(|&lp| so.p_not_in_list * lp.exp())
                .collect();
            for entry in &so.words {
                let v = entry.word[i];
                let idx = cb
                    .values()
                    .binary_search(&v)
                    .expect("listed symbols stay within the input support");
                dist[idx] += entry.app;
            }
            dist
        })
        .collect()
}
