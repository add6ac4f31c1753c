//! Synthetic telecare data: a simplified cascade generator for the four
//! monitored parameters (moves, postures, activity level, mean heart rate),
//! motif selection from habit-driven sequences, and noise-parameterized
//! injection of motif instances with exact ground-truth spans.
//!
//! The cascade runs room walk -> conditional posture -> posture-dependent
//! activity baseline -> affine heart rate, which keeps the joint variations
//! realistic: lying means low activity, and heart rate follows activity.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::evaluation::{GroundTruth, InjectedMotif};
use crate::representation::{aggregate, discretize, fit_all_breakpoints, preprocess, RepresentationConfig};
use crate::distances::build_symbol_tables;
use crate::schema::{ParameterSchema, Series, Span, Stage, Value};
use crate::{derive_seed, Error, Result};

/// Column order of the simulated series.
pub const MOVES: usize = 0;
pub const POSTURES: usize = 1;
pub const ACTIVITY: usize = 2;
pub const HEART_RATE: usize = 3;

/// Generator parameters. The conditional tables live here, not in code, so
/// other monitored populations can be described without rebuilding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub days: f64,
    /// Sampling period in seconds; one sample per minute by default.
    pub sampling_period: f64,
    /// Number of rooms (the unordered alphabet of the moves parameter).
    pub rooms: u32,
    pub activity_bounds: (f64, f64),
    pub heart_rate_bounds: (f64, f64),
    /// Room dwell-time range for the non-pattern walk, minutes.
    pub dwell_minutes: (f64, f64),
    /// Posture distribution per room: (lying, sitting, standing).
    pub posture_given_room: Vec<[f64; 3]>,
    /// Per-minute probability of re-drawing the posture within a room.
    pub posture_switch_prob: f64,
    /// Mean activity level per posture.
    pub activity_baseline: [f64; 3],
    pub activity_noise_sd: f64,
    /// Episode-level scaling of the activity baseline, redrawn whenever a
    /// room is entered: the same action is not performed with the same
    /// intensity twice.
    pub episode_factor: (f64, f64),
    /// AR(1) wander added to the activity level: phi and innovation sd.
    pub activity_drift_phi: f64,
    pub activity_drift_sd: f64,
    /// Short spontaneous activity bursts (turning over, reaching out):
    /// expected count per hour, duration range in minutes, raw amplitude
    /// range.
    pub burst_rate_per_hour: f64,
    pub burst_duration_minutes: (f64, f64),
    pub burst_amplitude: (f64, f64),
    /// Heart rate = intercept + slope * activity + wander + noise, clipped.
    pub hr_intercept: f64,
    pub hr_slope: f64,
    pub hr_noise_sd: f64,
    /// AR(1) wander of the heart-rate baseline.
    pub hr_wander_phi: f64,
    pub hr_wander_sd: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            days: 7.0,
            sampling_period: 60.0,
            rooms: 5,
            activity_bounds: (0.0, 10.0),
            heart_rate_bounds: (40.0, 140.0),
            dwell_minutes: (10.0, 90.0),
            posture_given_room: vec![
                [0.75, 0.15, 0.10], // bedroom
                [0.02, 0.18, 0.80], // bathroom
                [0.02, 0.38, 0.60], // kitchen
                [0.10, 0.70, 0.20], // living room
                [0.05, 0.75, 0.20], // office
            ],
            posture_switch_prob: 0.05,
            activity_baseline: [0.5, 2.5, 5.5],
            activity_noise_sd: 0.5,
            episode_factor: (0.6, 1.4),
            activity_drift_phi: 0.97,
            activity_drift_sd: 0.35,
            burst_rate_per_hour: 10.0,
            burst_duration_minutes: (1.0, 3.0),
            burst_amplitude: (1.5, 5.0),
            hr_intercept: 58.0,
            hr_slope: 7.0,
            hr_noise_sd: 2.5,
            hr_wander_phi: 0.99,
            hr_wander_sd: 0.5,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rooms < 2 {
            return Err(Error::InvalidConfig("at least two rooms required".into()));
        }
        if self.days <= 0.0 || self.sampling_period <= 0.0 {
            return Err(Error::InvalidConfig(
                "days and sampling_period must be positive".into(),
            ));
        }
        if self.activity_bounds.0 >= self.activity_bounds.1
            || self.heart_rate_bounds.0 >= self.heart_rate_bounds.1
        {
            return Err(Error::InvalidConfig("bounds must be increasing".into()));
        }
        Ok(())
    }

    /// Schema of the four monitored parameters.
    pub fn schema(&self) -> Vec<ParameterSchema> {
        let room_names = ["bedroom", "bathroom", "kitchen", "living_room", "office"];
        let labels: Vec<String> = (0..self.rooms as usize)
            .map(|r| {
                room_names
                    .get(r)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("room_{}", r + 1))
            })
            .collect();
        let mut moves = ParameterSchema::unordered("moves", self.rooms);
        moves.labels = labels;
        vec![
            moves,
            ParameterSchema::ordered("postures", 3).with_labels(&["lying", "sitting", "standing"]),
            ParameterSchema::quantitative("activity", self.activity_bounds.0, self.activity_bounds.1),
            ParameterSchema::quantitative(
                "heart_rate",
                self.heart_rate_bounds.0,
                self.heart_rate_bounds.1,
            ),
        ]
    }

    fn samples(&self) -> usize {
        (self.days * 86_400.0 / self.sampling_period).round() as usize
    }

    fn posture_table(&self, room: usize) -> [f64; 3] {
        self.posture_given_room
            .get(room % self.posture_given_room.len().max(1))
            .copied()
            .unwrap_or([1.0 / 3.0; 3])
    }
}

/// Standard normal draw (Box-Muller), deterministic under the caller's RNG.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn sample_categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        target -= w;
        if target <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Cascade state advanced one sample at a time.
struct Cascade<'c> {
    cfg: &'c SimConfig,
    room: usize,
    posture: usize,
    episode_factor: f64,
    drift: f64,
    hr_wander: f64,
    burst_left: usize,
    burst_amplitude: f64,
}

impl<'c> Cascade<'c> {
    fn new(cfg: &'c SimConfig, rng: &mut ChaCha8Rng) -> Self {
        let room = rng.random_range(0..cfg.rooms as usize);
        let posture = sample_categorical(rng, &cfg.posture_table(room));
        let (f_lo, f_hi) = cfg.episode_factor;
        Self {
            cfg,
            room,
            posture,
            episode_factor: f_lo + rng.random::<f64>() * (f_hi - f_lo),
            drift: 0.0,
            hr_wander: 0.0,
            burst_left: 0,
            burst_amplitude: 0.0,
        }
    }

    fn enter_room(&mut self, room: usize, rng: &mut ChaCha8Rng) {
        self.room = room;
        self.posture = sample_categorical(rng, &self.cfg.posture_table(room));
        let (f_lo, f_hi) = self.cfg.episode_factor;
        self.episode_factor = f_lo + rng.random::<f64>() * (f_hi - f_lo);
    }

    /// Produces one sample row from the current state.
    fn row(&mut self, rng: &mut ChaCha8Rng) -> Vec<Value> {
        let cfg = self.cfg;
        if rng.random::<f64>() < cfg.posture_switch_prob {
            self.posture = sample_categorical(rng, &cfg.posture_table(self.room));
        }
        self.drift = cfg.activity_drift_phi * self.drift + gauss(rng) * cfg.activity_drift_sd;
        self.hr_wander = cfg.hr_wander_phi * self.hr_wander + gauss(rng) * cfg.hr_wander_sd;
        let per_minute = cfg.sampling_period / 60.0;
        if self.burst_left == 0
            && rng.random::<f64>() < cfg.burst_rate_per_hour / 60.0 * per_minute
        {
            let (d_lo, d_hi) = cfg.burst_duration_minutes;
            let minutes = d_lo + rng.random::<f64>() * (d_hi - d_lo);
            self.burst_left = (minutes * 60.0 / cfg.sampling_period).round().max(1.0) as usize;
            let (a_lo, a_hi) = cfg.burst_amplitude;
            self.burst_amplitude = a_lo + rng.random::<f64>() * (a_hi - a_lo);
        }
        let burst = if self.burst_left > 0 {
            self.burst_left -= 1;
            self.burst_amplitude
        } else {
            0.0
        };
        let (a_lo, a_hi) = cfg.activity_bounds;
        let activity = (cfg.activity_baseline[self.posture] * self.episode_factor
            + self.drift
            + burst
            + gauss(rng) * cfg.activity_noise_sd)
            .clamp(a_lo, a_hi);
        let (h_lo, h_hi) = cfg.heart_rate_bounds;
        let hr = (cfg.hr_intercept
            + cfg.hr_slope * activity
            + self.hr_wander
            + gauss(rng) * cfg.hr_noise_sd)
            .clamp(h_lo, h_hi);
        vec![
            Value::Code(self.room as u32 + 1),
            Value::Code(self.posture as u32 + 1),
            Value::Real(activity),
            Value::Real(hr),
        ]
    }
}

/// Generates a behavioral sequence with random moves and random dwell times:
/// realistic joint variations, but no pattern of daily living to discover.
pub fn generate_nonpattern(cfg: &SimConfig, seed: u64) -> Result<Series> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.samples();
    let mut cascade = Cascade::new(cfg, &mut rng);
    let mut dwell_left = 0usize;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        if dwell_left == 0 {
            let next = random_other_room(&mut rng, cfg.rooms as usize, cascade.room);
            cascade.enter_room(next, &mut rng);
            let (lo, hi) = cfg.dwell_minutes;
            let minutes = lo + rng.random::<f64>() * (hi - lo);
            dwell_left = (minutes * 60.0 / cfg.sampling_period).round().max(1.0) as usize;
        }
        dwell_left -= 1;
        rows.push(cascade.row(&mut rng));
    }
    let series = Series::new(
        cfg.schema(),
        (0..n).map(|i| i as f64 * cfg.sampling_period).collect(),
        rows,
        Stage::Raw,
    );
    series.validate()?;
    Ok(series)
}

fn random_other_room(rng: &mut ChaCha8Rng, rooms: usize, current: usize) -> usize {
    let pick = rng.random_range(0..rooms - 1);
    if pick >= current {
        pick + 1
    } else {
        pick
    }
}

/// Fixed daily template of the habit generator: sleeping, washing up, three
/// meals, with jittered block boundaries; the gaps behave like the
/// non-pattern walk.
const HABIT_BLOCKS: [(f64, f64, usize, usize); 6] = [
    // (start minute, end minute, room, posture), rooms/postures 0-based
    (0.0, 420.0, 0, 0),      // sleep until 07:00, bedroom, lying
    (425.0, 455.0, 1, 2),    // washing up, bathroom, standing
    (465.0, 510.0, 2, 1),    // breakfast, kitchen, sitting
    (750.0, 800.0, 2, 1),    // lunch
    (1140.0, 1195.0, 2, 1),  // dinner
    (1350.0, 1440.0, 0, 0),  // sleep from 22:30, bedroom, lying
];

/// Generates a schedule-driven sequence containing daily living habits; used
/// as the pool typical-activity motifs are picked from.
pub fn generate_habit(cfg: &SimConfig, seed: u64) -> Result<Series> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.samples();
    let per_min = 60.0 / cfg.sampling_period;
    let mut cascade = Cascade::new(cfg, &mut rng);
    let mut dwell_left = 0usize;
    let mut rows = Vec::with_capacity(n);

    let days = (cfg.days.ceil() as usize).max(1);
    // Jitter block boundaries once per day.
    let mut day_blocks: Vec<Vec<(f64, f64, usize, usize)>> = Vec::with_capacity(days);
    for _ in 0..days {
        day_blocks.push(
            HABIT_BLOCKS
                .iter()
                .map(|&(s, e, room, posture)| {
                    let jitter = (rng.random::<f64>() - 0.5) * 30.0;
                    (s + jitter, e + jitter, room, posture)
                })
                .collect(),
        );
    }

    let mut in_block = false;
    for i in 0..n {
        let minute_of_day = (i as f64 / per_min) % 1440.0;
        let day = ((i as f64 / per_min) / 1440.0) as usize;
        let block = day_blocks[day.min(days - 1)]
            .iter()
            .find(|&&(s, e, _, _)| minute_of_day >= s && minute_of_day < e);
        match block {
            Some(&(_, _, room, posture)) => {
                if !in_block || cascade.room != room {
                    cascade.enter_room(room, &mut rng);
                }
                cascade.posture = posture;
                in_block = true;
                dwell_left = 0;
            }
            None => {
                if in_block || dwell_left == 0 {
                    let next = random_other_room(&mut rng, cfg.rooms as usize, cascade.room);
                    cascade.enter_room(next, &mut rng);
                    let (lo, hi) = cfg.dwell_minutes;
                    let minutes = lo + rng.random::<f64>() * (hi - lo);
                    dwell_left = (minutes * per_min).round().max(1.0) as usize;
                }
                in_block = false;
                dwell_left = dwell_left.saturating_sub(1);
            }
        }
        rows.push(cascade.row(&mut rng));
    }
    let series = Series::new(
        cfg.schema(),
        (0..n).map(|i| i as f64 * cfg.sampling_period).collect(),
        rows,
        Stage::Raw,
    );
    series.validate()?;
    Ok(series)
}

/// Picks a random subsequence of a habit-driven series that reads as one
/// typical activity: duration uniform in `[min, max]` seconds and a symbolic
/// representation of at least `min_symbols` symbols. Retries until the
/// constraint holds.
pub fn pick_motif(
    habit: &Series,
    rep_cfg: &RepresentationConfig,
    duration_bounds: (f64, f64),
    min_symbols: usize,
    seed: u64,
) -> Result<Series> {
    // The preprocessed series shares the raw indexing only without temporal
    // reduction; motif selection relies on that.
    if rep_cfg.reduction_factor != 1 {
        return Err(Error::InvalidConfig(
            "pick_motif requires reduction_factor 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pre = preprocess(habit, rep_cfg)?;
    let fitted = fit_all_breakpoints(&pre, rep_cfg.k_per_param, derive_seed(seed, "kmeans"))?;
    let tables = build_symbol_tables(&fitted)?;
    let period = habit.time_step();
    const MAX_RETRIES: usize = 200;
    for _ in 0..MAX_RETRIES {
        let duration =
            duration_bounds.0 + rng.random::<f64>() * (duration_bounds.1 - duration_bounds.0);
        let len = ((duration / period).round() as usize).clamp(2, habit.len());
        let start = rng.random_range(0..=habit.len() - len);
        let slice = pre.slice_indices(start, start + len - 1)?;
        let disc = discretize(&slice, &fitted)?;
        let sym = aggregate(&disc, &slice, &tables, rep_cfg.aggregation_threshold)?;
        if sym.len() >= min_symbols {
            return habit.slice_indices(start, start + len - 1);
        }
    }
    Err(Error::Simulation(format!(
        "no subsequence with >= {min_symbols} symbols found in {MAX_RETRIES} tries"
    )))
}

/// Noise applied to each injected instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// Per-parameter perturbation: amplitude in raw units for quantitative
    /// parameters, flip probability for qualitative ones.
    pub value_noise: Vec<f64>,
    /// Number of outlier bursts per instance and their maximum duration in
    /// seconds.
    pub interruption_count: usize,
    pub interruption_max_duration: f64,
    /// Duration scale factor range.
    pub stretch: (f64, f64),
    /// Abnormal-modification mode: scale one quantitative column by a factor
    /// drawn from the range (1 + rate), independent of the rest.
    pub column_scale: Option<ColumnScale>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub param: usize,
    pub factor: (f64, f64),
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            value_noise: Vec::new(),
            interruption_count: 0,
            interruption_max_duration: 0.0,
            stretch: (1.0, 1.0),
            column_scale: None,
        }
    }
}

impl NoiseSpec {
    /// No perturbation at all: instances are exact copies.
    pub fn none() -> Self {
        Self::default()
    }

    /// The moderate-noise setting of the recovery experiments: value noise
    /// on, stretch in [0.8, 1.25], one short interruption per instance.
    pub fn moderate() -> Self {
        Self {
            value_noise: vec![0.0, 0.02, 0.6, 3.0],
            interruption_count: 1,
            interruption_max_duration: 240.0,
            stretch: (0.8, 1.25),
            column_scale: None,
        }
    }
}

/// One batch of instances of one motif to inject.
#[derive(Debug, Clone)]
pub struct InjectionGroup<'a> {
    pub motif_id: String,
    pub motif: &'a Series,
    pub count: usize,
    pub noise: NoiseSpec,
}

/// Resamples a motif to `new_len` rows: linear interpolation for
/// quantitative columns, nearest neighbor for qualitative ones.
fn resample_rows(motif: &Series, new_len: usize) -> Vec<Vec<Value>> {
    let n = motif.len();
    (0..new_len)
        .map(|t| {
            let pos = if new_len == 1 {
                0.0
            } else {
                t as f64 * (n - 1) as f64 / (new_len - 1) as f64
            };
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            motif
                .schema
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if s.is_quantitative() {
                        let a = motif.rows[lo][c].as_f64();
                        let b = motif.rows[hi][c].as_f64();
                        Value::Real(a + (b - a) * frac)
                    } else if frac < 0.5 {
                        motif.rows[lo][c]
                    } else {
                        motif.rows[hi][c]
                    }
                })
                .collect()
        })
        .collect()
}

/// Builds one noisy instance of a motif: stretch, abnormal column scaling,
/// bounded value noise with qualitative flips, then interruption bursts of
/// locally generated non-pattern rows.
fn make_instance(
    motif: &Series,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<Value>>> {
    let (s_lo, s_hi) = noise.stretch;
    let factor = s_lo + rng.random::<f64>() * (s_hi - s_lo);
    let new_len = ((motif.len() as f64 * factor).round() as usize).max(2);
    let mut rows = resample_rows(motif, new_len);

    if let Some(scale) = &noise.column_scale {
        let f = scale.factor.0 + rng.random::<f64>() * (scale.factor.1 - scale.factor.0);
        let (lo, hi) = motif.schema[scale.param].bounds().ok_or_else(|| {
            Error::InvalidConfig("column_scale targets a qualitative parameter".into())
        })?;
        for row in &mut rows {
            let v = row[scale.param].as_f64() * f;
            row[scale.param] = Value::Real(v.clamp(lo, hi));
        }
    }

    for (c, schema) in motif.schema.iter().enumerate() {
        let amount = noise.value_noise.get(c).copied().unwrap_or(0.0);
        if amount <= 0.0 {
            continue;
        }
        for row in &mut rows {
            if schema.is_quantitative() {
                let (lo, hi) = schema.bounds().unwrap();
                let v = row[c].as_f64() + (rng.random::<f64>() * 2.0 - 1.0) * amount;
                row[c] = Value::Real(v.clamp(lo, hi));
            } else if rng.random::<f64>() < amount {
                let v = schema.cardinality().unwrap() as usize;
                let flipped = random_other_room(rng, v, row[c].as_code() as usize - 1);
                row[c] = Value::Code(flipped as u32 + 1);
            }
        }
    }

    if noise.interruption_count > 0 && noise.interruption_max_duration > 0.0 {
        let period = motif.time_step();
        let max_len = ((noise.interruption_max_duration / period) as usize)
            .min(new_len.saturating_sub(1))
            .max(1);
        for _ in 0..noise.interruption_count {
            let burst = rng.random_range(1..=max_len);
            let start = rng.random_range(0..=new_len - burst);
            let mut cascade = Cascade::new(cfg, rng);
            for row in rows.iter_mut().skip(start).take(burst) {
                *row = cascade.row(rng);
            }
        }
    }
    Ok(rows)
}

/// Injects instance groups into a base series at uniformly chosen
/// non-overlapping offsets, overwriting the base samples in place, and emits
/// the exact spliced spans as ground truth.
pub fn inject_groups(
    base: &Series,
    groups: &[InjectionGroup<'_>],
    cfg: &SimConfig,
    seed: u64,
) -> Result<(Series, GroundTruth)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = base.clone();
    let mut occupied: Vec<(usize, usize)> = Vec::new();
    let mut motifs = Vec::new();
    for group in groups {
        base.same_schema(group.motif)?;
        let mut instances = Vec::new();
        for _ in 0..group.count {
            let rows = make_instance(group.motif, &group.noise, cfg, &mut rng)?;
            let len = rows.len();
            let offset = place_uniformly(&mut rng, base.len(), len, &occupied)?;
            for (t, row) in rows.into_iter().enumerate() {
                out.rows[offset + t] = row;
            }
            occupied.push((offset, offset + len - 1));
            instances.push(Span::over(&out, offset, offset + len - 1)?);
        }
        motifs.push(InjectedMotif {
            motif_id: group.motif_id.clone(),
            instances,
        });
    }
    out.validate()?;
    let gt = GroundTruth {
        n_samples: base.len(),
        start_time: base.timestamps.first().copied().unwrap_or(0.0),
        period: base.time_step(),
        motifs,
    };
    Ok((out, gt))
}

/// Single-motif convenience wrapper around [`inject_groups`].
pub fn inject(
    base: &Series,
    motif: &Series,
    count: usize,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    seed: u64,
) -> Result<(Series, GroundTruth)> {
    inject_groups(
        base,
        &[InjectionGroup {
            motif_id: "motif_0".into(),
            motif,
            count,
            noise: noise.clone(),
        }],
        cfg,
        seed,
    )
}

/// Uniform draw over every placement offset that keeps `[o, o+len)` inside
/// the series and clear of occupied spans.
fn place_uniformly(
    rng: &mut ChaCha8Rng,
    n: usize,
    len: usize,
    occupied: &[(usize, usize)],
) -> Result<usize> {
    if len > n {
        return Err(Error::Simulation(format!(
            "instance of {len} samples exceeds the base series ({n})"
        )));
    }
    let mut blocked: Vec<(usize, usize)> = occupied.to_vec();
    blocked.sort_unstable();
    let mut free_runs: Vec<(usize, usize)> = Vec::new();
    let mut cursor = 0usize;
    for &(lo, hi) in &blocked {
        if lo > cursor {
            free_runs.push((cursor, lo - 1));
        }
        cursor = cursor.max(hi + 1);
    }
    if cursor < n {
        free_runs.push((cursor, n - 1));
    }
    let valid_per_run: Vec<usize> = free_runs
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1).saturating_sub(len - 1))
        .collect();
    let total: usize = valid_per_run.iter().sum();
    if total == 0 {
        return Err(Error::Simulation(
            "cannot place instance without overlap".into(),
        ));
    }
    let mut pick = rng.random_range(0..total);
    for (&(lo, _), &count) in free_runs.iter().zip(&valid_per_run) {
        if pick < count {
            return Ok(lo + pick);
        }
        pick -= count;
    }
    unreachable!("pick is bounded by the total valid offset count")
}

// ---------------------------------------------------------------------------
// Experimental fixture: one reference activity, noisy variants, and distinct
// or abnormal activities
// ---------------------------------------------------------------------------

/// The 19-sequence similarity fixture: sequence 0 is a reference activity;
/// 1..=8 are noisy variants of it (class 0); 9..=15 are different activities
/// and 16..=18 are the reference carried out in bad conditions — slowness,
/// long interruptions, raised heart rate (class 1).
#[derive(Debug, Clone)]
pub struct SimilarityFixture {
    pub sequences: Vec<Series>,
    /// Index of the first class-1 sequence.
    pub class_split: usize,
    /// Schema with breakpoints fitted on the habit series the activities
    /// were drawn from.
    pub fitted_schema: Vec<ParameterSchema>,
}

impl SimilarityFixture {
    pub fn reference(&self) -> &Series {
        &self.sequences[0]
    }

    pub fn class0(&self) -> &[Series] {
        &self.sequences[1..self.class_split]
    }

    pub fn class1(&self) -> &[Series] {
        &self.sequences[self.class_split..]
    }
}

/// Generates the similarity fixture from one seeded habit simulation.
pub fn similarity_fixture(
    cfg: &SimConfig,
    rep_cfg: &RepresentationConfig,
    seed: u64,
) -> Result<SimilarityFixture> {
    let habit = generate_habit(cfg, derive_seed(seed, "fixture-habit"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "fixture"));
    let period = cfg.sampling_period;
    let per_min = 60.0 / period;

    // Reference: getting ready in the morning — washing up through
    // breakfast, about an hour.
    let start = (420.0 * per_min) as usize;
    let len = (55.0 * per_min) as usize;
    let reference = habit.slice_indices(start, start + len - 1)?;

    let mut sequences = vec![reference.clone()];

    // Class 0: noisy variants of the reference.
    let class0_noise = NoiseSpec {
        value_noise: vec![0.0, 0.02, 0.5, 2.5],
        interruption_count: 1,
        interruption_max_duration: 150.0,
        stretch: (0.9, 1.12),
        column_scale: None,
    };
    for _ in 0..8 {
        let rows = make_instance(&reference, &class0_noise, cfg, &mut rng)?;
        sequences.push(rows_to_series(&habit, rows, period));
    }

    // Class 1, part one: other activities of the day — sleeping, meals,
    // free time.
    let other_offsets_min = [130.0, 320.0, 560.0, 760.0, 905.0, 1150.0, 1250.0];
    for &m in &other_offsets_min {
        let o = (m * per_min) as usize;
        let l = ((45.0 + rng.random::<f64>() * 20.0) * per_min) as usize;
        sequences.push(habit.slice_indices(o, (o + l - 1).min(habit.len() - 1))?);
    }

    // 16: the reference activity carried out slowly.
    let slow = NoiseSpec {
        value_noise: vec![0.0, 0.02, 0.3, 1.5],
        stretch: (1.9, 2.1),
        ..NoiseSpec::none()
    };
    sequences.push(rows_to_series(
        &habit,
        make_instance(&reference, &slow, cfg, &mut rng)?,
        period,
    ));

    // 17: long worrying interruptions.
    let interrupted = NoiseSpec {
        value_noise: vec![0.0, 0.02, 0.3, 1.5],
        interruption_count: 2,
        interruption_max_duration: 600.0,
        stretch: (1.0, 1.0),
        column_scale: None,
    };
    sequences.push(rows_to_series(
        &habit,
        make_instance(&reference, &interrupted, cfg, &mut rng)?,
        period,
    ));

    // 18: heart rate globally increased, independent of the activity.
    let raised_hr = NoiseSpec {
        value_noise: vec![0.0, 0.02, 0.3, 1.5],
        stretch: (1.0, 1.0),
        column_scale: Some(ColumnScale {
            param: HEART_RATE,
            factor: (1.3, 1.4),
        }),
        ..NoiseSpec::none()
    };
    sequences.push(rows_to_series(
        &habit,
        make_instance(&reference, &raised_hr, cfg, &mut rng)?,
        period,
    ));

    let pre = preprocess(&habit, rep_cfg)?;
    let fitted = fit_all_breakpoints(&pre, rep_cfg.k_per_param, derive_seed(seed, "fixture-kmeans"))?;

    Ok(SimilarityFixture {
        sequences,
        class_split: 9,
        fitted_schema: fitted,
    })
}

fn rows_to_series(template: &Series, rows: Vec<Vec<Value>>, period: f64) -> Series {
    Series::new(
        template.schema.clone(),
        (0..rows.len()).map(|i| i as f64 * period).collect(),
        rows,
        Stage::Raw,
    )
}
