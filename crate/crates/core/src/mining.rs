//! Feature mining over symbolic series: random projections into a collision
//! matrix, examination of high-collision cells with confirmation on the
//! original data, pattern growing, and divisive synthesis of non-overlapping
//! tentative motifs.
//!
//! A large collision count is only a strong indicator of similarity, so every
//! candidate pair is confirmed back on the preprocessed series with the LCSS
//! distance before it is kept or grown.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distances::{lcss_distance_rows, LcssParams};
use crate::representation::SymbolicSeries;
use crate::schema::{Series, Span};
use crate::{Error, Result};

/// Random projection parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectionConfig {
    /// Window length in symbols.
    pub w: usize,
    /// Symbol positions masked out entirely per projection.
    pub w_mask: usize,
    /// Parameters masked per unmasked symbol position.
    pub p_mask: usize,
    /// Number of projection iterations.
    pub proj: usize,
    pub rng_seed: u64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            w: 4,
            w_mask: 1,
            p_mask: 1,
            proj: 100,
            rng_seed: 0,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self, dims: usize) -> Result<()> {
        if self.w == 0 || self.w_mask >= self.w {
            return Err(Error::InvalidConfig(format!(
                "w_mask {} must be below w {}",
                self.w_mask, self.w
            )));
        }
        if self.p_mask >= dims {
            return Err(Error::InvalidConfig(format!(
                "p_mask {} must be below the parameter count {dims}",
                self.p_mask
            )));
        }
        if self.proj == 0 {
            return Err(Error::InvalidConfig("proj must be >= 1".into()));
        }
        Ok(())
    }
}

/// Thresholds steering collision-matrix examination and motif synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MiningThresholds {
    /// Minimum "large enough" number of collisions.
    pub collision_threshold: u32,
    /// Maximum LCSS distance for two subsequences to count as similar.
    pub distance_threshold: f64,
    /// Chebyshev radius, in cells, of the close-collision and extension
    /// neighbourhoods.
    pub neighbourhood_radius: usize,
    /// Minimum duration of a tentative motif, in seconds.
    pub min_motif_duration: f64,
    /// Minimum number of symbols spanned by a tentative motif.
    pub min_symbols: usize,
    /// Open-list cap of the divisive search.
    pub beam_width: usize,
    /// Fraction of a group the divisive search may remove before a division
    /// stops counting as acceptable.
    pub acceptable_removal_rate: f64,
}

impl Default for MiningThresholds {
    fn default() -> Self {
        Self {
            collision_threshold: 30,
            distance_threshold: 0.25,
            neighbourhood_radius: 1,
            min_motif_duration: 1200.0,
            min_symbols: 4,
            beam_width: 8,
            acceptable_removal_rate: 0.5,
        }
    }
}

impl MiningThresholds {
    pub fn validate(&self, proj: usize) -> Result<()> {
        if self.collision_threshold as usize > proj {
            return Err(Error::InvalidConfig(format!(
                "collision_threshold {} exceeds proj {proj}",
                self.collision_threshold
            )));
        }
        if !(0.0 < self.distance_threshold && self.distance_threshold < 1.0) {
            return Err(Error::InvalidConfig(
                "distance_threshold must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Sparse symmetric collision counts between window indices, stored upper
/// triangular. Cells within the trivial-match exclusion band `|i-j| < w` are
/// never incremented.
#[derive(Debug, Clone)]
pub struct CollisionMatrix {
    pub n_windows: usize,
    pub exclusion: usize,
    counts: HashMap<(u32, u32), u32>,
}

impl CollisionMatrix {
    pub fn new(n_windows: usize, exclusion: usize) -> Self {
        Self {
            n_windows,
            exclusion,
            counts: HashMap::new(),
        }
    }

    fn key(i: u32, j: u32) -> (u32, u32) {
        if i <= j {
            (i, j)
        } else {
            (j, i)
        }
    }

    pub fn count(&self, i: u32, j: u32) -> u32 {
        self.counts.get(&Self::key(i, j)).copied().unwrap_or(0)
    }

    fn increment(&mut self, i: u32, j: u32) {
        debug_assert!(i.abs_diff(j) as usize >= self.exclusion);
        *self.counts.entry(Self::key(i, j)).or_insert(0) += 1;
    }

    pub fn nonzero(&self) -> usize {
        self.counts.len()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// Cells ordered by descending count, ties broken by position; the
    /// examination order.
    pub fn cells_desc(&self) -> Vec<(u32, u32, u32)> {
        let mut cells: Vec<(u32, u32, u32)> =
            self.counts.iter().map(|(&(i, j), &c)| (i, j, c)).collect();
        cells.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        cells
    }

    /// Sparse triplet dump, one `i,j,count` line per nonzero cell.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "count"])?;
        let mut cells: Vec<(u32, u32, u32)> =
            self.counts.iter().map(|(&(i, j), &c)| (i, j, c)).collect();
        cells.sort_unstable();
        for (i, j, c) in cells {
            w.write_record([i.to_string(), j.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One basic subsequence: a sliding window of `w` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub index: usize,
    /// Inclusive symbol range covered.
    pub symbol_span: (usize, usize),
    /// Samples of the preprocessed series the symbols map back to.
    pub span: Span,
}

/// All `N - w + 1` sliding windows of a symbolic series.
pub fn windows(sym: &SymbolicSeries, w: usize) -> Result<Vec<Window>> {
    if sym.len() < w {
        return Err(Error::InvalidConfig(format!(
            "{} symbols cannot host windows of size {w}",
            sym.len()
        )));
    }
    Ok((0..=sym.len() - w)
        .map(|i| Window {
            index: i,
            symbol_span: (i, i + w - 1),
            span: symbol_range_span(sym, i, i + w - 1),
        })
        .collect())
}

/// Preprocessed-sample span covered by the inclusive symbol range
/// `[first, last]`.
pub fn symbol_range_span(sym: &SymbolicSeries, first: usize, last: usize) -> Span {
    let a = &sym.source_spans[first];
    let b = &sym.source_spans[last];
    Span::new(a.start_index, b.end_index, a.start_time, b.end_time)
}

/// Projection mask for one iteration: masked symbol positions plus, per
/// unmasked position, the masked parameter indices.
#[derive(Debug, Clone)]
struct Mask {
    masked_symbol: Vec<bool>,
    masked_param: Vec<Vec<bool>>,
}

fn draw_mask(rng: &mut ChaCha8Rng, w: usize, p: usize, w_mask: usize, p_mask: usize) -> Mask {
    let mut masked_symbol = vec![false; w];
    for idx in rand::seq::index::sample(rng, w, w_mask) {
        masked_symbol[idx] = true;
    }
    let masked_param = (0..w)
        .map(|pos| {
            let mut m = vec![false; p];
            if !masked_symbol[pos] {
                for idx in rand::seq::index::sample(rng, p, p_mask) {
                    m[idx] = true;
                }
            }
            m
        })
        .collect();
    Mask {
        masked_symbol,
        masked_param,
    }
}

/// Stable 64-bit FNV-1a over the unmasked `(position, parameter, code)`
/// cells; the hash value is the bucket.
fn hash_window(sym: &SymbolicSeries, start: usize, mask: &Mask) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut mix = |x: u32| {
        for b in x.to_le_bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for (pos, masked) in mask.masked_symbol.iter().enumerate() {
        if *masked {
            continue;
        }
        let codes = &sym.symbols[start + pos].codes;
        for (param, &code) in codes.iter().enumerate() {
            if !mask.masked_param[pos][param] {
                mix(pos as u32);
                mix(param as u32);
                mix(code);
            }
        }
    }
    h
}

/// Runs one projection iteration: draws the mask from the iteration's own
/// RNG stream, hashes every window on its unmasked codes and increments the
/// collision count of every same-bucket pair outside the exclusion band.
pub fn project_iteration(
    sym: &SymbolicSeries,
    cfg: &ProjectionConfig,
    iteration: usize,
    matrix: &mut CollisionMatrix,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(iteration as u64 + 1);
    let p = sym.schema.len();
    let mask = draw_mask(&mut rng, cfg.w, p, cfg.w_mask, cfg.p_mask);
    let n_windows = sym.len() - cfg.w + 1;
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    for i in 0..n_windows {
        buckets
            .entry(hash_window(sym, i, &mask))
            .or_default()
            .push(i as u32);
    }
    for members in buckets.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if (j - i) as usize >= cfg.w {
                    matrix.increment(i, j);
                }
            }
        }
    }
}

/// Accumulates the full collision matrix over `proj` iterations. Iterations
/// draw from independent seed streams, so the result only depends on the
/// seed and the input.
pub fn project(sym: &SymbolicSeries, cfg: &ProjectionConfig) -> Result<CollisionMatrix> {
    cfg.validate(sym.schema.len())?;
    if sym.len() < cfg.w {
        return Err(Error::InvalidConfig(format!(
            "{} symbols cannot host windows of size {}",
            sym.len(),
            cfg.w
        )));
    }
    let n_windows = sym.len() - cfg.w + 1;
    let mut matrix = CollisionMatrix::new(n_windows, cfg.w);
    for it in 0..cfg.proj {
        project_iteration(sym, cfg, it, &mut matrix);
    }
    Ok(matrix)
}

/// Per-iteration collision counts between the windows of two distinct series
/// hashed under shared masks. Used by the projection-mask experiments.
pub fn cross_collision_counts(
    a: &SymbolicSeries,
    b: &SymbolicSeries,
    cfg: &ProjectionConfig,
) -> Result<Vec<Vec<u32>>> {
    cfg.validate(a.schema.len())?;
    if a.len() < cfg.w || b.len() < cfg.w {
        return Err(Error::InvalidConfig(
            "series too short for the window size".into(),
        ));
    }
    let (na, nb) = (a.len() - cfg.w + 1, b.len() - cfg.w + 1);
    let mut counts = vec![vec![0u32; nb]; na];
    let p = a.schema.len();
    for it in 0..cfg.proj {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(it as u64 + 1);
        let mask = draw_mask(&mut rng, cfg.w, p, cfg.w_mask, cfg.p_mask);
        let mut buckets: HashMap<u64, (Vec<u32>, Vec<u32>)> = HashMap::new();
        for i in 0..na {
            buckets
                .entry(hash_window(a, i, &mask))
                .or_default()
                .0
                .push(i as u32);
        }
        for j in 0..nb {
            buckets
                .entry(hash_window(b, j, &mask))
                .or_default()
                .1
                .push(j as u32);
        }
        for (from_a, from_b) in buckets.values() {
            for &i in from_a {
                for &j in from_b {
                    counts[i as usize][j as usize] += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// One grown subsequence: an inclusive window-index interval with its symbol
/// and preprocessed spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subsequence {
    pub symbol_start: usize,
    pub symbol_end: usize,
    pub span: Span,
}

impl Subsequence {
    fn from_symbols(sym: &SymbolicSeries, first: usize, last: usize) -> Self {
        Self {
            symbol_start: first,
            symbol_end: last,
            span: symbol_range_span(sym, first, last),
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_end - self.symbol_start + 1
    }
}

/// A matched, grown pair of subsequences confirmed on the original data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrownPair {
    pub a: Subsequence,
    pub b: Subsequence,
    /// LCSS distance between the grown originals.
    pub distance: f64,
    /// Cell the pair was seeded from and its collision count.
    pub seed: (u32, u32),
    pub collisions: u32,
}

struct Examiner<'a> {
    matrix: &'a CollisionMatrix,
    sym: &'a SymbolicSeries,
    pre: &'a Series,
    th: &'a MiningThresholds,
    lcss: &'a LcssParams,
}

impl<'a> Examiner<'a> {
    fn window_distance(&self, i: usize, j: usize) -> f64 {
        self.range_distance(i, i + self.w() - 1, j, j + self.w() - 1)
    }

    fn w(&self) -> usize {
        self.matrix.exclusion
    }

    /// LCSS distance between the originals under two symbol ranges.
    fn range_distance(&self, a_first: usize, a_last: usize, b_first: usize, b_last: usize) -> f64 {
        let a = symbol_range_span(self.sym, a_first, a_last);
        let b = symbol_range_span(self.sym, b_first, b_last);
        lcss_distance_rows(
            &self.pre.rows[a.start_index..=a.end_index],
            &self.pre.rows[b.start_index..=b.end_index],
            &self.pre.schema,
            self.lcss,
        )
    }

    /// Cells within the Chebyshev neighbourhood of `(i, j)` that are valid
    /// and meet the collision threshold, in deterministic order.
    fn neighbourhood(&self, i: i64, j: i64) -> Vec<(u32, u32)> {
        self.neighbourhood_cells(i, j, -(self.th.neighbourhood_radius as i64), self.th.neighbourhood_radius as i64)
    }

    /// Outward half of the extension neighbourhood: only cells at or beyond
    /// the candidate extension count as evidence, never the already grown
    /// interior.
    fn extension_neighbourhood(&self, i: i64, j: i64, leftward: bool) -> Vec<(u32, u32)> {
        let r = self.th.neighbourhood_radius as i64;
        if leftward {
            self.neighbourhood_cells(i, j, -r, 0)
        } else {
            self.neighbourhood_cells(i, j, 0, r)
        }
    }

    fn neighbourhood_cells(&self, i: i64, j: i64, d_lo: i64, d_hi: i64) -> Vec<(u32, u32)> {
        let n = self.matrix.n_windows as i64;
        let mut out = Vec::new();
        for di in d_lo..=d_hi {
            for dj in d_lo..=d_hi {
                let (ci, cj) = (i + di, j + dj);
                if ci < 0 || cj < 0 || ci >= n || cj >= n {
                    continue;
                }
                let (lo, hi) = (ci.min(cj) as u32, ci.max(cj) as u32);
                if ((hi - lo) as usize) < self.w() {
                    continue;
                }
                if self.matrix.count(lo, hi) >= self.th.collision_threshold {
                    out.push((lo, hi));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Grows a window pair left and right while the extension cells keep
    /// colliding and the extended originals stay similar.
    fn grow(&self, seed_i: usize, seed_j: usize) -> (Subsequence, Subsequence, f64) {
        let w = self.w();
        // Window-index intervals, inclusive.
        let (mut a_lo, mut a_hi) = (seed_i, seed_i);
        let (mut b_lo, mut b_hi) = (seed_j, seed_j);
        let mut distance = self.range_distance(a_lo, a_hi + w - 1, b_lo, b_hi + w - 1);
        loop {
            let mut extended = false;
            // Left: the candidate cell is the window pair starting one symbol
            // earlier.
            if a_lo > 0 && b_lo > 0 && a_hi + w - 1 < b_lo - 1 {
                let cell = (a_lo as i64 - 1, b_lo as i64 - 1);
                if !self.extension_neighbourhood(cell.0, cell.1, true).is_empty() {
                    let d = self.range_distance(a_lo - 1, a_hi + w - 1, b_lo - 1, b_hi + w - 1);
                    if d <= self.th.distance_threshold {
                        a_lo -= 1;
                        b_lo -= 1;
                        distance = d;
                        extended = true;
                    }
                }
            }
            // Right: one symbol later.
            if b_hi + w < self.sym.len() && a_hi + w < b_lo {
                let cell = (a_hi as i64 + 1, b_hi as i64 + 1);
                if !self.extension_neighbourhood(cell.0, cell.1, false).is_empty() {
                    let d = self.range_distance(a_lo, a_hi + w, b_lo, b_hi + w);
                    if d <= self.th.distance_threshold {
                        a_hi += 1;
                        b_hi += 1;
                        distance = d;
                        extended = true;
                    }
                }
            }
            if !extended {
                break;
            }
        }
        (
            Subsequence::from_symbols(self.sym, a_lo, a_hi + w - 1),
            Subsequence::from_symbols(self.sym, b_lo, b_hi + w - 1),
            distance,
        )
    }
}

/// Examines the collision matrix from its largest counts downward. Each hit
/// is refined within its close-collision neighbourhood, confirmed against
/// the distance threshold on the preprocessed originals, grown, and
/// recorded. Examination stops at the first unexamined cell outside already
/// reported spans that falls below the collision threshold.
pub fn examine(
    matrix: &CollisionMatrix,
    sym: &SymbolicSeries,
    pre: &Series,
    th: &MiningThresholds,
    lcss: &LcssParams,
) -> Result<Vec<GrownPair>> {
    th.validate(usize::MAX)?;
    let w = matrix.exclusion;
    let ex = Examiner {
        matrix,
        sym,
        pre,
        th,
        lcss,
    };
    let mut visited: HashSet<(u32, u32)> = HashSet::new();
    let mut reported: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();

    let covered = |reported: &[(usize, usize)], win: usize| -> bool {
        reported
            .iter()
            .any(|&(lo, hi)| lo <= win && win + w - 1 <= hi)
    };

    for (i, j, count) in matrix.cells_desc() {
        if visited.contains(&(i, j)) {
            continue;
        }
        let in_scope = covered(&reported, i as usize) && covered(&reported, j as usize);
        if count < th.collision_threshold {
            if in_scope {
                continue;
            }
            break;
        }
        if in_scope {
            visited.insert((i, j));
            continue;
        }
        // Refine within the close collision neighbourhood: keep the pair of
        // windows whose originals are the most similar, preferring the seed
        // cell on ties.
        let mut best: Option<(f64, u32, u32, u32)> = None;
        for (ci, cj) in ex.neighbourhood(i as i64, j as i64) {
            visited.insert((ci, cj));
            let d = ex.window_distance(ci as usize, cj as usize);
            let off = ci.abs_diff(i).max(cj.abs_diff(j));
            if best.map_or(true, |(bd, boff, _, _)| (d, off) < (bd, boff)) {
                best = Some((d, off, ci, cj));
            }
        }
        visited.insert((i, j));
        let Some((d, _, bi, bj)) = best else { continue };
        if d > th.distance_threshold {
            continue;
        }
        let (a, b, distance) = ex.grow(bi as usize, bj as usize);
        reported.push((a.symbol_start, a.symbol_end));
        reported.push((b.symbol_start, b.symbol_end));
        out.push(GrownPair {
            a,
            b,
            distance,
            seed: (i, j),
            collisions: count,
        });
    }
    Ok(out)
}

/// A candidate motif: the span of one group of mutually overlapping grown
/// subsequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TentativeMotif {
    pub span: Span,
    /// Inclusive symbol range of the motif.
    pub symbol_span: (usize, usize),
    /// Surviving subsequences of the group.
    pub support: Vec<Subsequence>,
}

impl TentativeMotif {
    pub fn duration(&self) -> f64 {
        self.span.duration()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_span.1 - self.symbol_span.0 + 1
    }
}

fn subsequences_overlap(a: &Subsequence, b: &Subsequence) -> bool {
    a.span.overlaps(&b.span)
}

/// Splits index set `members` (into `subs`) into connected components of the
/// time-overlap graph. Intervals make this a sweep over sorted starts.
fn overlap_components(subs: &[Subsequence], members: &[usize]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = members.to_vec();
    order.sort_by_key(|&k| (subs[k].span.start_index, subs[k].span.end_index));
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut reach = 0usize;
    for &k in &order {
        let s = &subs[k].span;
        match components.last_mut() {
            Some(current) if s.start_index <= reach => {
                current.push(k);
                reach = reach.max(s.end_index);
            }
            _ => {
                components.push(vec![k]);
                reach = s.end_index;
            }
        }
    }
    components
}

/// Every member overlaps every other: for intervals, the maximum start is at
/// or before the minimum end.
fn is_clique(subs: &[Subsequence], members: &[usize]) -> bool {
    let max_start = members
        .iter()
        .map(|&k| subs[k].span.start_index)
        .max()
        .unwrap();
    let min_end = members
        .iter()
        .map(|&k| subs[k].span.end_index)
        .min()
        .unwrap();
    max_start <= min_end
}

#[derive(Clone)]
struct DivisionState {
    pending: Vec<Vec<usize>>,
    done: Vec<Vec<usize>>,
    removed: usize,
}

/// Divides one overlap group into cliques, removing as few subsequences as
/// possible. Best-first search over the division moves, with the open list
/// capped at `beam_width`; divisions removing more than the acceptable rate
/// are only taken when nothing better remains.
fn divide_group(
    subs: &[Subsequence],
    group: Vec<usize>,
    beam_width: usize,
    acceptable_removal_rate: f64,
) -> Vec<Vec<usize>> {
    let total = group.len();
    let beam_width = beam_width.max(1);
    let max_removed = (acceptable_removal_rate * total as f64).ceil() as usize;
    let mut open = vec![DivisionState {
        pending: vec![group],
        done: Vec::new(),
        removed: 0,
    }];

    loop {
        let pos = {
        // Lowest removal count first; prefer states within the acceptable
        // rate when any exists.
            let acceptable = open.iter().any(|s| s.removed <= max_removed);
            open.iter()
                .enumerate()
                .filter(|(_, s)| !acceptable || s.removed <= max_removed)
                .min_by_key(|(idx, s)| (s.removed, *idx))
                .map(|(idx, _)| idx)
                .expect("division search always keeps at least one state")
        };
        let mut state = open.swap_remove(pos);
        // Settle pending groups that already satisfy the stop criterion.
        while let Some(g) = state.pending.pop() {
            if g.len() == 1 || is_clique(subs, &g) {
                state.done.push(g);
            } else {
                state.pending.push(g);
                break;
            }
        }
        let Some(group) = state.pending.pop() else {
            return state.done;
        };

        // First non-overlapping pair, in index order.
        let mut split = None;
        'outer: for (x, &k1) in group.iter().enumerate() {
            for &k2 in &group[x + 1..] {
                if !subsequences_overlap(&subs[k1], &subs[k2]) {
                    split = Some((k1, k2));
                    break 'outer;
                }
            }
        }
        let (k1, k2) = split.expect("non-clique group has a non-overlapping pair");

        if group.len() == 2 {
            // Two non-overlapping subsequences become two singleton classes.
            let mut next = state.clone();
            next.done.push(vec![k1]);
            next.done.push(vec![k2]);
            open.push(next);
        } else {
            let branches: [Vec<usize>; 4] = [
                vec![k1],
                vec![k2],
                vec![k1, k2],
                // Keep both: remove the subsequences bridging them.
                group
                    .iter()
                    .copied()
                    .filter(|&k| {
                        k != k1
                            && k != k2
                            && subsequences_overlap(&subs[k], &subs[k1])
                            && subsequences_overlap(&subs[k], &subs[k2])
                    })
                    .collect(),
            ];
            for removal in branches {
                if removal.is_empty() {
                    continue;
                }
                let remaining: Vec<usize> = group
                    .iter()
                    .copied()
                    .filter(|k| !removal.contains(k))
                    .collect();
                let mut next = state.clone();
                next.removed += removal.len();
                if !remaining.is_empty() {
                    next.pending.extend(overlap_components(subs, &remaining));
                }
                open.push(next);
            }
        }

        // Every expansion pushes at least one child with strictly fewer
        // pending members, so the search terminates with a completed state.
        if open.len() > beam_width {
            open.sort_by_key(|s| s.removed);
            open.truncate(beam_width);
        }
    }
}

/// Synthesizes non-overlapping tentative motifs from the grown pairs: each
/// final group of mutually overlapping subsequences becomes one motif
/// spanning from the earliest start to the latest end of its members. Groups
/// whose motif is shorter than the duration or symbol-count floor are
/// discarded.
pub fn extract_tentative_motifs(
    pairs: &[GrownPair],
    sym: &SymbolicSeries,
    th: &MiningThresholds,
) -> Vec<TentativeMotif> {
    let mut subs: Vec<Subsequence> = Vec::new();
    for p in pairs {
        subs.push(p.a.clone());
        subs.push(p.b.clone());
    }
    subs.sort_by_key(|s| (s.symbol_start, s.symbol_end));
    subs.dedup();

    let all: Vec<usize> = (0..subs.len()).collect();
    let mut motifs = Vec::new();
    for component in overlap_components(&subs, &all) {
        let groups = if is_clique(&subs, &component) {
            vec![component]
        } else {
            divide_group(&subs, component, th.beam_width, th.acceptable_removal_rate)
        };
        for group in groups {
            let first = group.iter().map(|&k| subs[k].symbol_start).min().unwrap();
            let last = group.iter().map(|&k| subs[k].symbol_end).max().unwrap();
            let span = symbol_range_span(sym, first, last);
            let motif = TentativeMotif {
                span,
                symbol_span: (first, last),
                support: group.iter().map(|&k| subs[k].clone()).collect(),
            };
            if motif.duration() >= th.min_motif_duration && motif.symbol_count() >= th.min_symbols
            {
                motifs.push(motif);
            }
        }
    }
    motifs.sort_by_key(|m| m.span.start_index);
    motifs
}
