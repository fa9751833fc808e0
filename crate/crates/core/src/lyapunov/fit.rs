use std::collections::BTreeMap;

use serde::Serialize;

use super::composite::CompositeLyapunov;
use super::model::{InputSignal, OdeTrajectory, SubsystemModel};
use crate::error::{Error, Result};

/// What the envelope bounds along each trajectory.
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    /// `‖x‖ = maxᵢ |xᵢ|` with the node norms.
    Norm(&'a [SubsystemModel]),
    Lyapunov(&'a CompositeLyapunov),
}

impl Measure<'_> {
    fn models(&self) -> &[SubsystemModel] {
        match self {
            Measure::Norm(m) => m,
            Measure::Lyapunov(v) => v.models(),
        }
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Measure::Norm(models) => {
                let mut off = 0;
                let mut out = 0.0_f64;
                for m in models.iter() {
                    out = out.max(m.lyapunov(&x[off..off + m.state_dim]));
                    off += m.state_dim;
                }
                Ok(out)
            }
            Measure::Lyapunov(v) => v.eval(x).map(|e| e.value),
        }
    }
}

/// Envelope `β̂(a, t) = a·shape(t)` for initial sizes `a ∈ [lo, hi)`;
/// `shape` is nonincreasing and sampled every `dt`, constant past its end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaBucket {
    pub lo: f64,
    pub hi: f64,
    pub dt: f64,
    pub shape: Vec<f64>,
    /// Log-linear decay rate of `shape` above the resolution floor.
    pub rate: f64,
}

impl BetaBucket {
    pub fn at(&self, t: f64) -> f64 {
        let k = (t / self.dt + 1e-9).floor() as usize;
        self.shape[k.min(self.shape.len() - 1)]
    }

    fn decreasing(&self) -> bool {
        let (first, last) = (self.shape[0], self.shape[self.shape.len() - 1]);
        first.is_finite() && last < first
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssFit {
    pub beta: Vec<BetaBucket>,
    /// `γ̂(s) = gain·s`.
    pub gain: f64,
    /// Fraction of validation samples above `β̂(‖x₀‖, t) + γ̂(‖u‖)`.
    pub exceedance: f64,
    pub validation_samples: usize,
    pub pass: bool,
}

const MAX_EXCEEDANCE: f64 = 0.01;
/// Relative level (of `‖x₀‖`) below which the envelope is not resolved.
const RESOLUTION: f64 = 1e-6;
/// Inflation of the raw training maxima, applied to both `β̂` and `γ̂`.
pub const FIT_MARGIN: f64 = 1.5;

struct Series {
    y: Vec<f64>,
    u: f64,
    dt: f64,
}

fn bucket_of(y0: f64) -> i32 {
    y0.log2().floor() as i32
}

/// Fits a separable ISS envelope on even-indexed trajectories and validates
/// on odd-indexed ones. The input gain is linear: the largest ratio of the
/// steady-state level (second half of the horizon) to `‖u‖∞`. For each
/// `log₂‖x₀‖` bucket, `β̂` is the running-from-the-right maximum of the
/// normalized excess `(y − g‖u‖)₊/‖x₀‖` over training trajectories in the
/// bucket and the two buckets on either side. Pass iff every bucket envelope decreases
/// and at most 1% of validation samples exceed `β̂ + γ̂`. Both the gain `g`
/// and the envelope are inflated by [`FIT_MARGIN`].
pub fn fit_iss_estimate(batch: &[(OdeTrajectory, InputSignal)], measure: Measure<'_>) -> Result<IssFit> {
    if batch.is_empty() {
        return Err(Error::Domain("empty trajectory batch".into()));
    }
    let mut series = Vec::with_capacity(batch.len());
    for (tr, u) in batch {
        let y = tr.states.iter().map(|x| measure.eval(x)).collect::<Result<Vec<_>>>()?;
        series.push(Series { y, u: u.sup_norm(measure.models()), dt: tr.dt });
    }
    if batch.iter().any(|(tr, _)| tr.blow_up) {
        return Ok(IssFit { beta: vec![], gain: f64::INFINITY, exceedance: 1.0, validation_samples: 0, pass: false });
    }
    let train: Vec<&Series> = series.iter().step_by(2).collect();
    let valid: Vec<&Series> = if series.len() > 1 { series.iter().skip(1).step_by(2).collect() } else { train.clone() };

    let mut gain = 0.0_f64;
    for s in &train {
        if s.u > 0.0 {
            let tail = s.y.len() / 2;
            gain = gain.max(s.y[tail..].iter().copied().fold(0.0, f64::max) / s.u);
        }
    }
    let raw_gain = gain;
    gain *= FIT_MARGIN;

    let mut groups: BTreeMap<i32, Vec<&Series>> = BTreeMap::new();
    for s in train.iter().filter(|s| s.y[0] > 0.0) {
        groups.entry(bucket_of(s.y[0])).or_default().push(s);
    }
    let dt = train[0].dt;
    let len = train.iter().map(|s| ((s.y.len() - 1) as f64 * s.dt / dt).round() as usize + 1).max().unwrap_or(1);
    let mut beta = Vec::new();
    for &b in groups.keys() {
        let mut shape = vec![0.0_f64; len];
        for s in (b - 2..=b + 2).filter_map(|c| groups.get(&c)).flatten() {
            for (idx, &y) in s.y.iter().enumerate() {
                let k = ((idx as f64 * s.dt / dt).round() as usize).min(len - 1);
                shape[k] = shape[k].max(FIT_MARGIN * (y - raw_gain * s.u).max(0.0) / s.y[0]);
            }
        }
        for k in (0..len - 1).rev() {
            shape[k] = shape[k].max(shape[k + 1]);
        }
        let rate = envelope_rate(&shape, dt);
        beta.push(BetaBucket { lo: 2f64.powi(b), hi: 2f64.powi(b + 1), dt, shape, rate });
    }

    let lookup = |y0: f64| -> Option<&BetaBucket> {
        let b = bucket_of(y0);
        beta.iter().min_by_key(|bk| (bucket_of(bk.lo) - b).abs())
    };
    let (mut total, mut over) = (0usize, 0usize);
    for s in &valid {
        let y0 = s.y[0];
        for (idx, &y) in s.y.iter().enumerate() {
            total += 1;
            let t = idx as f64 * s.dt;
            let bound = match lookup(y0) {
                Some(bk) if y0 > 0.0 => y0 * bk.at(t),
                _ => 0.0,
            } + gain * s.u;
            if y > bound * (1.0 + 1e-9) + RESOLUTION * y0 {
                over += 1;
            }
        }
    }
    let exceedance = if total == 0 { 0.0 } else { over as f64 / total as f64 };
    let pass = !beta.is_empty() && beta.iter().all(BetaBucket::decreasing) && exceedance <= MAX_EXCEEDANCE;
    Ok(IssFit { beta, gain, exceedance, validation_samples: total, pass })
}

/// Least-squares slope of `−log shape` over the samples above the resolution
/// floor; 0 when fewer than two such samples exist.
fn envelope_rate(shape: &[f64], dt: f64) -> f64 {
    let floor = RESOLUTION * shape[0];
    let pts: Vec<(f64, f64)> =
        shape.iter().enumerate().filter(|(_, &v)| v > floor).map(|(k, &v)| (k as f64 * dt, v.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt).powi(2)));
    if den == 0.0 {
        0.0
    } else {
        -num / den
    }
}
