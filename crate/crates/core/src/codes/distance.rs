//! Minimum distance engines.
//!
//! * Exhaustive: walks every nonzero message in reflected Gray-code order,
//!   updating the running codeword by one generator per step. Over GF(4)
//!   the message space is treated as GF(2)-span of `{g_i, ε g_i}`.
//! * Information sets (Brouwer–Zimmermann): systematic generators on a
//!   sequence of greedily disjoint information sets; all messages of weight
//!   `w` are enumerated per set while a lower bound accumulates from the
//!   fresh rank of each set. Stops when the lower bound meets the best
//!   weight found.
//!
//! Both engines split work across a rayon pool and merge by
//! `(weight, enumeration index)`, so the reported witness does not depend
//! on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use super::LinearCode;
use crate::error::{Error, Result};
use crate::field::{Field, Gf4};
use crate::matrix::{add_scaled_planes, words_for, Matrix, PackedVec};

pub const DEFAULT_EXHAUSTIVE_LIMIT_BITS: u32 = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    Exhaustive,
    InformationSet,
}

impl std::fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistanceMethod::Exhaustive => "exhaustive",
            DistanceMethod::InformationSet => "information-set",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Exhaustive,
    Isd,
}

#[derive(Debug, Clone)]
pub struct DistanceOptions {
    pub method: MethodChoice,
    /// 0 means the global rayon pool.
    pub workers: usize,
    /// Exhaustive search is allowed while `q^k <= 2^exhaustive_limit_bits`.
    pub exhaustive_limit_bits: u32,
    /// Abort (uncertified) as soon as a codeword lighter than this is found.
    pub stop_below: Option<usize>,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            workers: 0,
            exhaustive_limit_bits: DEFAULT_EXHAUSTIVE_LIMIT_BITS,
            stop_below: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    /// Exact when `certified`, otherwise an upper bound.
    pub d: usize,
    pub lower_bound: usize,
    pub witness: Vec<Gf4>,
    pub method: DistanceMethod,
    pub certified: bool,
    pub words_examined: u64,
}

impl DistanceResult {
    pub fn witness_string(&self) -> String {
        self.witness.iter().map(|a| a.symbol()).collect()
    }
}

fn message_bits(field: Field, k: usize) -> u64 {
    match field {
        Field::Gf2 => k as u64,
        Field::Gf4 => 2 * k as u64,
    }
}

/// Picks the engine according to `opts.method`.
pub fn min_weight(code: &LinearCode, opts: &DistanceOptions) -> Result<DistanceResult> {
    match opts.method {
        MethodChoice::Exhaustive => min_weight_exhaustive(code, opts),
        MethodChoice::Isd => min_weight_isd(code, opts),
        MethodChoice::Auto => {
            if message_bits(code.field(), code.k()) <= opts.exhaustive_limit_bits as u64 {
                min_weight_exhaustive(code, opts)
            } else {
                min_weight_isd(code, opts)
            }
        }
    }
}

pub(crate) fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Flat bit-sliced row storage.
#[derive(Debug, Clone)]
struct Planes {
    words: usize,
    lo: Vec<u64>,
    hi: Vec<u64>,
}

impl Planes {
    fn from_rows(field: Field, rows: &[PackedVec], cols: &[usize]) -> Self {
        let words = words_for(cols.len()).max(1);
        let gf4 = field == Field::Gf4;
        let mut lo = vec![0u64; rows.len() * words];
        let mut hi = if gf4 { vec![0u64; rows.len() * words] } else { Vec::new() };
        for (r, row) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let bits = row.get(c).bits() as u64;
                lo[r * words + j / 64] |= (bits & 1) << (j % 64);
                if gf4 {
                    hi[r * words + j / 64] |= ((bits >> 1) & 1) << (j % 64);
                }
            }
        }
        Self { words, lo, hi }
    }

    fn lo(&self, r: usize) -> &[u64] {
        &self.lo[r * self.words..(r + 1) * self.words]
    }

    fn hi(&self, r: usize) -> &[u64] {
        if self.hi.is_empty() {
            &[]
        } else {
            &self.hi[r * self.words..(r + 1) * self.words]
        }
    }
}

#[inline]
fn plane_weight(lo: &[u64], hi: &[u64]) -> usize {
    if hi.is_empty() {
        lo.iter().map(|w| w.count_ones() as usize).sum()
    } else {
        lo.iter().zip(hi).map(|(l, h)| (l | h).count_ones() as usize).sum()
    }
}

/// Weight of `(lo, hi) + c · (rlo, rhi)`.
#[inline]
fn combined_weight(lo: &[u64], hi: &[u64], rlo: &[u64], rhi: &[u64], c: Gf4) -> usize {
    let mut total = 0u32;
    if hi.is_empty() {
        for (a, b) in lo.iter().zip(rlo) {
            total += (a ^ b).count_ones();
        }
        return total as usize;
    }
    for w in 0..lo.len() {
        let (l, h) = (rlo[w], rhi[w]);
        let (sl, sh) = match c.bits() {
            1 => (l, h),
            2 => (h, h ^ l),
            _ => (h ^ l, l),
        };
        total += ((lo[w] ^ sl) | (hi[w] ^ sh)).count_ones();
    }
    total as usize
}

/// Exact minimum distance by enumerating all `q^k - 1` nonzero messages.
pub fn min_weight_exhaustive(code: &LinearCode, opts: &DistanceOptions) -> Result<DistanceResult> {
    let field = code.field();
    let k = code.k();
    let bits = message_bits(field, k);
    if bits > opts.exhaustive_limit_bits as u64 || bits >= 63 {
        return Err(Error::TooLarge {
            q: field.q(),
            k,
            limit_bits: opts.exhaustive_limit_bits,
        });
    }
    let n = code.n();
    let rows = code.generator().packed_rows();
    // generator list: g_i, and for GF(4) also ε g_i
    let mut gens: Vec<PackedVec> = Vec::with_capacity(bits as usize);
    for r in &rows {
        gens.push(r.clone());
        if field == Field::Gf4 {
            let mut e = PackedVec::zeros(field, n);
            e.add_scaled(r, Gf4::W);
            gens.push(e);
        }
    }
    let all_cols: Vec<usize> = (0..n).collect();
    let planes = Planes::from_rows(field, &gens, &all_cols);
    let total: u64 = 1u64 << bits;

    let workers = opts.workers;
    let (best_w, best_t) = with_workers(workers, || {
        let chunks = (rayon::current_num_threads() as u64 * 8).clamp(1, total.max(1));
        let step = total.div_ceil(chunks).max(1);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = (c * step).max(1);
                let end = ((c + 1) * step).min(total);
                if start >= end {
                    return (usize::MAX, u64::MAX);
                }
                let words = planes.words;
                let mut lo = vec![0u64; words];
                let mut hi = if planes.hi.is_empty() { Vec::new() } else { vec![0u64; words] };
                let state = (start - 1) ^ ((start - 1) >> 1);
                for b in 0..bits as usize {
                    if state >> b & 1 == 1 {
                        add_scaled_planes(&mut lo, &mut hi, planes.lo(b), planes.hi(b), Gf4::ONE);
                    }
                }
                let mut best = (usize::MAX, u64::MAX);
                for t in start..end {
                    let b = t.trailing_zeros() as usize;
                    add_scaled_planes(&mut lo, &mut hi, planes.lo(b), planes.hi(b), Gf4::ONE);
                    let w = plane_weight(&lo, &hi);
                    if w < best.0 {
                        best = (w, t);
                    }
                }
                best
            })
            .min()
            .unwrap_or((usize::MAX, u64::MAX))
    });

    if best_w == usize::MAX {
        return Err(Error::InvalidInput("code has no nonzero codewords".into()));
    }
    let gray = best_t ^ (best_t >> 1);
    let mut witness = PackedVec::zeros(field, n);
    for (b, g) in gens.iter().enumerate() {
        if gray >> b & 1 == 1 {
            witness.add_assign(g);
        }
    }
    Ok(DistanceResult {
        d: best_w,
        lower_bound: best_w,
        witness: witness.to_vec(),
        method: DistanceMethod::Exhaustive,
        certified: true,
        words_examined: total - 1,
    })
}

/// Reduced row echelon basis with pivot columns.
pub(crate) struct Systematic {
    pub rows: Vec<PackedVec>,
    pub pivots: Vec<usize>,
}

impl Systematic {
    /// Gauss–Jordan elimination choosing pivots among columns not marked in
    /// `used` first, then among the used ones.
    pub fn reduce(g: &Matrix, used: &[bool]) -> Systematic {
        let n = g.cols();
        let is_used = |c: usize| used.get(c).copied().unwrap_or(false);
        let order: Vec<usize> = (0..n)
            .filter(|&c| !is_used(c))
            .chain((0..n).filter(|&c| is_used(c)))
            .collect();
        Self::reduce_in_order(g, &order)
    }

    /// Gauss–Jordan elimination trying pivot columns in `order`.
    pub fn reduce_in_order(g: &Matrix, order: &[usize]) -> Systematic {
        let field = g.field();
        let mut rows = g.packed_rows();
        let k = rows.len();
        let n = g.cols();
        let mut pivots = Vec::with_capacity(k);
        for &col in order {
            let rank = pivots.len();
            if rank == k {
                break;
            }
            let Some(r) = (rank..k).find(|&r| !rows[r].get(col).is_zero()) else {
                continue;
            };
            rows.swap(rank, r);
            let inv = rows[rank].get(col).inv().expect("nonzero pivot");
            if inv != Gf4::ONE {
                let mut scaled = PackedVec::zeros(field, n);
                scaled.add_scaled(&rows[rank], inv);
                rows[rank] = scaled;
            }
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == rank {
                    continue;
                }
                let c = row.get(col);
                if !c.is_zero() {
                    row.add_scaled(&pivot_row, c);
                }
            }
            pivots.push(col);
        }
        rows.truncate(pivots.len());
        Systematic { rows, pivots }
    }
}

struct InfoSet {
    full: Vec<PackedVec>,
    redundancy: Planes,
    /// Pivots not covered by any earlier set.
    fresh_rank: usize,
}

struct InfoSets {
    sets: Vec<InfoSet>,
    /// Largest number of sets sharing one column.
    multiplicity: usize,
}

fn push_set(
    code: &LinearCode,
    order: &[usize],
    count: &mut [usize],
    sets: &mut Vec<InfoSet>,
) -> Result<()> {
    let n = code.n();
    let sys = Systematic::reduce_in_order(code.generator(), order);
    if sys.pivots.len() < code.k() {
        return Err(Error::RankDeficient);
    }
    let fresh_rank = sys.pivots.iter().filter(|&&c| count[c] == 0).count();
    let mut is_pivot = vec![false; n];
    for &c in &sys.pivots {
        is_pivot[c] = true;
        count[c] += 1;
    }
    let red_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    sets.push(InfoSet {
        redundancy: Planes::from_rows(code.field(), &sys.rows, &red_cols),
        full: sys.rows,
        fresh_rank,
    });
    Ok(())
}

/// Greedy disjoint sets first. If one of them has a rank deficit, further
/// sets are drawn from the least used columns until every column is covered
/// twice, which feeds the covering bound in [`lower_bound`].
fn information_sets(code: &LinearCode) -> Result<InfoSets> {
    let n = code.n();
    let k = code.k();
    let mut count = vec![0usize; n];
    let mut sets = Vec::new();
    while count.contains(&0) {
        let order: Vec<usize> = (0..n)
            .filter(|&c| count[c] == 0)
            .chain((0..n).filter(|&c| count[c] > 0))
            .collect();
        push_set(code, &order, &mut count, &mut sets)?;
        if sets.last().is_some_and(|s| s.fresh_rank == 0) {
            sets.pop();
            break;
        }
    }
    if sets.iter().any(|s| s.fresh_rank < k) {
        let cap = 2 * n.div_ceil(k) + 2;
        let mut shift = 0;
        while count.iter().any(|&c| c < 2) && sets.len() < cap {
            shift += k / 2 + 1;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&c| (count[c], (c + shift) % n));
            push_set(code, &order, &mut count, &mut sets)?;
            if let Some(last) = sets.last_mut() {
                last.fresh_rank = 0;
            }
        }
    }
    Ok(InfoSets {
        sets,
        multiplicity: count.iter().copied().max().unwrap_or(1).max(1),
    })
}

/// Best leaf in one enumeration task: `(weight, message)`.
type Leaf = (usize, Vec<(usize, Gf4)>);

struct Enumerator<'a> {
    set: &'a Planes,
    k: usize,
    w: usize,
    nonzero: &'static [Gf4],
    // per-depth partial sums
    lo: Vec<Vec<u64>>,
    hi: Vec<Vec<u64>>,
    msg: Vec<(usize, Gf4)>,
    best: Option<Leaf>,
    leaves: u64,
}

impl<'a> Enumerator<'a> {
    fn new(set: &'a Planes, field: Field, k: usize, w: usize) -> Self {
        let words = set.words;
        let gf4 = field == Field::Gf4;
        Self {
            set,
            k,
            w,
            nonzero: field.nonzero(),
            lo: vec![vec![0; words]; w + 1],
            hi: vec![if gf4 { vec![0; words] } else { Vec::new() }; w + 1],
            msg: Vec::with_capacity(w),
            best: None,
            leaves: 0,
        }
    }

    fn push(&mut self, depth: usize, pos: usize, c: Gf4) {
        let (lo_prev, lo_next) = self.lo.split_at_mut(depth + 1);
        let (hi_prev, hi_next) = self.hi.split_at_mut(depth + 1);
        lo_next[0].copy_from_slice(&lo_prev[depth]);
        hi_next[0].copy_from_slice(&hi_prev[depth]);
        add_scaled_planes(&mut lo_next[0], &mut hi_next[0], self.set.lo(pos), self.set.hi(pos), c);
        self.msg.push((pos, c));
    }

    fn leaf(&mut self, depth: usize) {
        self.leaves += 1;
        let weight = self.w + plane_weight(&self.lo[depth], &self.hi[depth]);
        if self.best.as_ref().is_none_or(|(b, _)| weight < *b) {
            self.best = Some((weight, self.msg.clone()));
        }
    }

    /// Last level without materializing the sums.
    fn last_level(&mut self, depth: usize, start: usize) {
        let (lo, hi) = (&self.lo[depth], &self.hi[depth]);
        let mut best: Option<(usize, usize, Gf4)> = None;
        for pos in start..self.k {
            let (rlo, rhi) = (self.set.lo(pos), self.set.hi(pos));
            for &c in self.nonzero {
                let weight = self.w + combined_weight(lo, hi, rlo, rhi, c);
                self.leaves += 1;
                let incumbent = self.best.as_ref().map_or(usize::MAX, |b| b.0);
                if weight < best.map_or(incumbent, |b| b.0) {
                    best = Some((weight, pos, c));
                }
            }
        }
        if let Some((weight, pos, c)) = best {
            let mut msg = self.msg.clone();
            msg.push((pos, c));
            self.best = Some((weight, msg));
        }
    }

    fn descend(&mut self, depth: usize, start: usize) {
        if depth == self.w {
            self.leaf(depth);
            return;
        }
        if depth + 1 == self.w {
            self.last_level(depth, start);
            return;
        }
        let remaining = self.w - depth;
        for pos in start..=(self.k - remaining) {
            for &c in self.nonzero {
                self.push(depth, pos, c);
                self.descend(depth + 1, pos + 1);
                self.msg.pop();
            }
        }
    }
}

/// All messages of weight `w` whose first nonzero coefficient is 1.
fn enumerate_weight(set: &InfoSet, field: Field, k: usize, w: usize) -> (Option<Leaf>, u64) {
    // tasks: prefixes of length min(w, 2)
    let mut tasks: Vec<Vec<(usize, Gf4)>> = Vec::new();
    for i0 in 0..=(k - w) {
        if w == 1 {
            tasks.push(vec![(i0, Gf4::ONE)]);
            continue;
        }
        for i1 in (i0 + 1)..=(k - w + 1) {
            for &c in field.nonzero() {
                tasks.push(vec![(i0, Gf4::ONE), (i1, c)]);
            }
        }
    }
    let results: Vec<(Option<Leaf>, u64)> = tasks
        .par_iter()
        .map(|prefix| {
            let mut e = Enumerator::new(&set.redundancy, field, k, w);
            for (depth, &(pos, c)) in prefix.iter().enumerate() {
                e.push(depth, pos, c);
            }
            let last = prefix.last().expect("nonempty prefix").0;
            e.descend(prefix.len(), last + 1);
            (e.best, e.leaves)
        })
        .collect();
    let mut best: Option<Leaf> = None;
    let mut leaves = 0;
    for (b, l) in results {
        leaves += l;
        if let Some(b) = b {
            if best.as_ref().is_none_or(|(bw, _)| b.0 < *bw) {
                best = Some(b);
            }
        }
    }
    (best, leaves)
}

/// Sound lower bound on the weight of any codeword not yet found, after
/// level `w` has been completed for sets `0..=done_upto`.
///
/// Such a codeword has weight at least `w_j + 1` on every information set
/// `I_j`, where `w_j` is the last completed level of set `j`. Counting it on
/// the fresh (disjoint) part of each set gives `Σ max(0, w_j + 1 - (k - r_j))`;
/// counting it on whole sets, each column at most `t` times, gives
/// `⌈Σ (w_j + 1) / t⌉`.
fn lower_bound(info: &InfoSets, k: usize, w: usize, done_upto: usize) -> usize {
    let level = |j: usize| if j <= done_upto { w + 1 } else { w };
    let disjoint: usize = info
        .sets
        .iter()
        .enumerate()
        .map(|(j, s)| level(j).saturating_sub(k - s.fresh_rank))
        .sum();
    let total: usize = (0..info.sets.len()).map(level).sum();
    disjoint.max(total.div_ceil(info.multiplicity))
}

/// Certified minimum distance by information-set enumeration.
pub fn min_weight_isd(code: &LinearCode, opts: &DistanceOptions) -> Result<DistanceResult> {
    let field = code.field();
    let k = code.k();
    let n = code.n();
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput("empty generator matrix".into()));
    }
    with_workers(opts.workers, || {
        let info = information_sets(code)?;
        let sets = &info.sets;
        let mut ub = usize::MAX;
        let mut witness: Option<(usize, Vec<(usize, Gf4)>)> = None;
        let mut examined = 0u64;
        let mut lb = 0usize;

        let finish = |ub: usize, lb: usize, witness: &Option<(usize, Vec<(usize, Gf4)>)>, certified: bool, examined: u64| {
            let (set_idx, msg) = witness.as_ref().expect("witness recorded with upper bound");
            let mut cw = PackedVec::zeros(field, n);
            for &(pos, c) in msg {
                cw.add_scaled(&sets[*set_idx].full[pos], c);
            }
            debug_assert_eq!(cw.weight(), ub);
            DistanceResult {
                d: ub,
                lower_bound: if certified { ub } else { lb },
                witness: cw.to_vec(),
                method: DistanceMethod::InformationSet,
                certified,
                words_examined: examined,
            }
        };

        for w in 1..=k {
            for (j, set) in sets.iter().enumerate() {
                let (best, leaves) = enumerate_weight(set, field, k, w);
                examined += leaves;
                if let Some((weight, msg)) = best {
                    if weight < ub {
                        ub = weight;
                        witness = Some((j, msg));
                    }
                }
                lb = lower_bound(&info, k, w, j);
                if lb >= ub {
                    return Ok(finish(ub, lb, &witness, true, examined));
                }
                if opts.stop_below.is_some_and(|s| ub < s) {
                    return Ok(finish(ub, lb, &witness, false, examined));
                }
            }
            // the first set has full fresh rank: at w = k every message was seen
            if w == k {
                return Ok(finish(ub, lb, &witness, true, examined));
            }
        }
        unreachable!("loop returns at w = k")
    })
}
