//! Linear single-degree-of-freedom response spectra and the periods
//! derived from them and from peak ground motion values.
//!
//! The oscillator `ü + 2ζωu̇ + ω²u = −ẍ_g` is advanced with the exact
//! recurrence for a piecewise-linear excitation (Nigam & Jennings). When the
//! record step is coarse relative to the oscillator period the step is split
//! so that `dt_eff/T ≤ 0.1`; the linear interpolant of the record is
//! unchanged by the split, only the instants at which peaks are observed
//! become denser. Peak values are maxima over those instants.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Accelerogram, GroundMotionPeaks};

pub const DEFAULT_DAMPING: f64 = 0.05;

/// Width of the moving window applied to SV and SA before taking the
/// effective peak values, s.
pub const EFFECTIVE_PEAK_WINDOW: f64 = 0.4;

/// Ratio between the smoothed spectral maximum and the effective peak.
pub const EFFECTIVE_PEAK_AMPLIFICATION: f64 = 2.5;

/// Coefficient of the peak-ratio period `4.3·PGV/PGA`.
pub const HEIDEBRECHT_COEFFICIENT: f64 = 4.3;

/// Largest `dt/T` handled without splitting the step.
pub const MAX_STEP_RATIO: f64 = 0.1;

/// Beyond this `dt/T` the oscillator is rejected outright.
pub const MAX_UNDERSAMPLING: f64 = 10.0;

/// Period grid description, stored in run metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for PeriodGrid {
    fn default() -> Self {
        PeriodGrid {
            min: 0.02,
            max: 5.0,
            count: 200,
        }
    }
}

impl PeriodGrid {
    /// Log-spaced periods including both end points.
    pub fn periods(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max > self.min && self.count >= 2) {
            return Err(Error::InvalidArgument(format!(
                "period grid [{}, {}] with {} points",
                self.min, self.max, self.count
            )));
        }
        let ratio = (self.max / self.min).ln() / (self.count - 1) as f64;
        let mut out: Vec<f64> = (0..self.count)
            .map(|i| self.min * (ratio * i as f64).exp())
            .collect();
        out[self.count - 1] = self.max;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraConfig {
    pub damping: f64,
    pub periods: Vec<f64>,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        SpectraConfig {
            damping: DEFAULT_DAMPING,
            periods: PeriodGrid::default().periods().unwrap(),
        }
    }
}

impl SpectraConfig {
    pub fn new(damping: f64, periods: Vec<f64>) -> Result<Self> {
        check_damping(damping)?;
        if periods.is_empty() {
            return Err(Error::InvalidArgument("empty period grid".into()));
        }
        if periods.iter().any(|t| !(t.is_finite() && *t > 0.0))
            || periods.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidArgument(
                "period grid must be positive and strictly increasing".into(),
            ));
        }
        Ok(SpectraConfig { damping, periods })
    }

    pub fn from_grid(damping: f64, grid: PeriodGrid) -> Result<Self> {
        Self::new(damping, grid.periods()?)
    }
}

fn check_damping(damping: f64) -> Result<()> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    Ok(())
}

/// Peak response of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorPeaks {
    /// max |u|, m
    pub sd: f64,
    /// max |u̇|, m/s
    pub sv: f64,
    /// max |ü + ẍ_g|, m/s²
    pub sa: f64,
    /// relative input energy per unit mass at the end of the record, m²/s²
    pub ei: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSpectra {
    pub damping: f64,
    pub periods: Vec<f64>,
    pub sd: Vec<f64>,
    pub sv: Vec<f64>,
    pub sa: Vec<f64>,
    pub psv: Vec<f64>,
    pub psa: Vec<f64>,
    pub ei: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectivePeaks {
    /// m/s
    pub epv: f64,
    /// m/s²
    pub epa: f64,
    /// s
    pub window: f64,
}

/// Periods derived from response spectra and peak ground motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodParams {
    pub t_gsa: f64,
    pub t_gsv: f64,
    pub t_gei: f64,
    pub t1_star: f64,
    pub t_c: f64,
    pub t_43: f64,
}

/// Exact one-step map for a linearly varying ground acceleration:
/// `[u, v]_{i+1} = A·[u, v]_i + B·[a_i, a_{i+1}]`.
#[derive(Debug, Clone, Copy)]
struct StepMap {
    a: [[f64; 2]; 2],
    b: [[f64; 2]; 2],
}

impl StepMap {
    fn new(omega: f64, zeta: f64, h: f64) -> Self {
        let root = (1.0 - zeta * zeta).sqrt();
        let wd = omega * root;
        let e = (-zeta * omega * h).exp();
        let (s, c) = (wd * h).sin_cos();
        let r = zeta / root;
        let w2 = omega * omega;
        let k1 = (2.0 * zeta * zeta - 1.0) / (w2 * h);
        let k2 = 2.0 * zeta / (w2 * omega * h);
        let a = [
            [e * (r * s + c), e * s / wd],
            [-omega / root * e * s, e * (c - r * s)],
        ];
        let b = [
            [
                e * ((k1 + zeta / omega) * s / wd + (k2 + 1.0 / w2) * c) - k2,
                -e * (k1 * s / wd + k2 * c) - 1.0 / w2 + k2,
            ],
            [
                e * ((k1 + zeta / omega) * (c - r * s) - (k2 + 1.0 / w2) * (wd * s + zeta * omega * c))
                    + 1.0 / (w2 * h),
                -e * (k1 * (c - r * s) - k2 * (wd * s + zeta * omega * c)) - 1.0 / (w2 * h),
            ],
        ];
        StepMap { a, b }
    }

    #[inline]
    fn advance(&self, u: f64, v: f64, a0: f64, a1: f64) -> (f64, f64) {
        (
            self.a[0][0] * u + self.a[0][1] * v + self.b[0][0] * a0 + self.b[0][1] * a1,
            self.a[1][0] * u + self.a[1][1] * v + self.b[1][0] * a0 + self.b[1][1] * a1,
        )
    }
}

/// Number of sub-steps per record step for an oscillator of period `period`.
pub fn substeps(dt: f64, period: f64) -> usize {
    let ratio = dt / period;
    if ratio <= MAX_STEP_RATIO {
        1
    } else {
        (ratio / MAX_STEP_RATIO).ceil() as usize
    }
}

/// Drives a damped oscillator of natural period `period` with the record and
/// returns `(sd, sv, sa, ei)`.
///
/// The input energy `−∫ẍ_g·u̇ dt` uses Simpson's rule on each (sub)step with
/// the exact mid-step state.
pub fn sdof_response(acc: &Accelerogram, period: f64, damping: f64) -> Result<OscillatorPeaks> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidArgument(format!("period must be > 0, got {period}")));
    }
    check_damping(damping)?;
    let ratio = acc.dt() / period;
    if ratio > MAX_UNDERSAMPLING {
        return Err(Error::UndersampledOscillator { ratio });
    }
    let omega = 2.0 * PI / period;
    let m = substeps(acc.dt(), period);
    let h = acc.dt() / m as f64;
    let half = StepMap::new(omega, damping, 0.5 * h);
    let two_zeta_omega = 2.0 * damping * omega;
    let w2 = omega * omega;

    let (mut u, mut v) = (0.0_f64, 0.0_f64);
    let mut peaks = OscillatorPeaks {
        sd: 0.0,
        sv: 0.0,
        sa: 0.0,
        ei: 0.0,
    };
    let mut energy = 0.0;
    let xs = acc.samples();
    // Initial instant: at rest, absolute acceleration is zero.
    for pair in xs.windows(2) {
        let (g0, g1) = (pair[0], pair[1]);
        for k in 0..m {
            let a0 = g0 + (g1 - g0) * k as f64 / m as f64;
            let a1 = g0 + (g1 - g0) * (k + 1) as f64 / m as f64;
            let am = 0.5 * (a0 + a1);
            let (um, vm) = half.advance(u, v, a0, am);
            let (un, vn) = half.advance(um, vm, am, a1);
            energy -= h / 6.0 * (a0 * v + 4.0 * am * vm + a1 * vn);
            u = un;
            v = vn;
            peaks.sd = peaks.sd.max(u.abs());
            peaks.sv = peaks.sv.max(v.abs());
            peaks.sa = peaks.sa.max((two_zeta_omega * v + w2 * u).abs());
        }
    }
    peaks.ei = energy;
    Ok(peaks)
}

/// Absolute acceleration `−(2ζωu̇ + ω²u)` of an oscillator driven by the
/// samples `xs`, observed at the sample instants.
pub(crate) fn absolute_acceleration_history(xs: &[f64], dt: f64, omega: f64, zeta: f64) -> Vec<f64> {
    let m = substeps(dt, 2.0 * PI / omega);
    let map = StepMap::new(omega, zeta, dt / m as f64);
    let (mut u, mut v) = (0.0_f64, 0.0_f64);
    let mut out = Vec::with_capacity(xs.len());
    out.push(0.0);
    for pair in xs.windows(2) {
        let (g0, g1) = (pair[0], pair[1]);
        for k in 0..m {
            let a0 = g0 + (g1 - g0) * k as f64 / m as f64;
            let a1 = g0 + (g1 - g0) * (k + 1) as f64 / m as f64;
            (u, v) = map.advance(u, v, a0, a1);
        }
        out.push(-(2.0 * zeta * omega * v + omega * omega * u));
    }
    out
}

/// Response spectra over the configured period grid. Periods are processed
/// in parallel; each is independent so the result does not depend on the
/// thread count.
pub fn response_spectra(acc: &Accelerogram, cfg: &SpectraConfig) -> Result<ResponseSpectra> {
    check_damping(cfg.damping)?;
    let rows = cfg
        .periods
        .par_iter()
        .map(|&t| sdof_response(acc, t, cfg.damping))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let mut rs = ResponseSpectra {
        damping: cfg.damping,
        periods: cfg.periods.clone(),
        sd: Vec::with_capacity(n),
        sv: Vec::with_capacity(n),
        sa: Vec::with_capacity(n),
        psv: Vec::with_capacity(n),
        psa: Vec::with_capacity(n),
        ei: Vec::with_capacity(n),
    };
    for (t, p) in cfg.periods.iter().zip(rows) {
        let omega = 2.0 * PI / t;
        rs.sd.push(p.sd);
        rs.sv.push(p.sv);
        rs.sa.push(p.sa);
        rs.psv.push(omega * p.sd);
        rs.psa.push(omega * omega * p.sd);
        rs.ei.push(p.ei);
    }
    Ok(rs)
}

/// Period of the global maximum ordinate; ties go to the smallest period.
pub fn spectrum_peak_period(ordinates: &[f64], periods: &[f64]) -> Result<f64> {
    if ordinates.is_empty() || ordinates.len() != periods.len() {
        return Err(Error::InvalidArgument(format!(
            "{} ordinates for {} periods",
            ordinates.len(),
            periods.len()
        )));
    }
    let mut best: Option<(f64, f64)> = None;
    for (&y, &t) in ordinates.iter().zip(periods) {
        best = match best {
            Some((by, bt)) if by > y || (by == y && bt <= t) => Some((by, bt)),
            _ => Some((y, t)),
        };
    }
    match best {
        Some((y, t)) if y > 0.0 => Ok(t),
        _ => Err(Error::FlatSpectrum),
    }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// `2π·max(PSV)/max(PSA)`.
pub fn characteristic_period_t1star(rs: &ResponseSpectra) -> Result<f64> {
    let psa = max_of(&rs.psa);
    if !(psa > 0.0) {
        return Err(Error::Degenerate("pseudo-acceleration spectrum is zero".into()));
    }
    Ok(2.0 * PI * max_of(&rs.psv) / psa)
}

/// Mean of the piecewise-linear curve through `(xs, ys)` over
/// `[x − width/2, x + width/2]`, clipped to the curve's domain and divided by
/// the covered width.
pub fn window_average(xs: &[f64], ys: &[f64], width: f64) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("curve needs at least two points".into()));
    }
    let (lo_dom, hi_dom) = (xs[0], xs[xs.len() - 1]);
    if hi_dom - lo_dom < width {
        return Err(Error::InvalidArgument(format!(
            "grid width {} s is narrower than the {} s window",
            hi_dom - lo_dom,
            width
        )));
    }
    let mut cum = vec![0.0; xs.len()];
    for j in 1..xs.len() {
        cum[j] = cum[j - 1] + 0.5 * (xs[j] - xs[j - 1]) * (ys[j] + ys[j - 1]);
    }
    let primitive = |x: f64| -> f64 {
        let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1) - 1;
        let span = xs[j + 1] - xs[j];
        let y = ys[j] + (ys[j + 1] - ys[j]) * (x - xs[j]) / span;
        cum[j] + 0.5 * (x - xs[j]) * (ys[j] + y)
    };
    Ok(xs
        .iter()
        .map(|&x| {
            let lo = (x - 0.5 * width).max(lo_dom);
            let hi = (x + 0.5 * width).min(hi_dom);
            (primitive(hi) - primitive(lo)) / (hi - lo)
        })
        .collect())
}

/// EPV and EPA from the 0.4 s moving averages of SV and SA.
pub fn effective_peaks(rs: &ResponseSpectra) -> Result<EffectivePeaks> {
    let sv = window_average(&rs.periods, &rs.sv, EFFECTIVE_PEAK_WINDOW)?;
    let sa = window_average(&rs.periods, &rs.sa, EFFECTIVE_PEAK_WINDOW)?;
    Ok(EffectivePeaks {
        epv: max_of(&sv) / EFFECTIVE_PEAK_AMPLIFICATION,
        epa: max_of(&sa) / EFFECTIVE_PEAK_AMPLIFICATION,
        window: EFFECTIVE_PEAK_WINDOW,
    })
}

/// `2π·EPV/EPA`.
pub fn characteristic_period_tc(ep: &EffectivePeaks) -> Result<f64> {
    if !(ep.epa > 0.0) {
        return Err(Error::Degenerate("effective peak acceleration is zero".into()));
    }
    Ok(2.0 * PI * ep.epv / ep.epa)
}

/// `4.3·PGV/PGA`.
pub fn heidebrecht_period(pk: &GroundMotionPeaks) -> Result<f64> {
    if !(pk.pga > 0.0) {
        return Err(Error::Degenerate("peak ground acceleration is zero".into()));
    }
    Ok(HEIDEBRECHT_COEFFICIENT * pk.pgv / pk.pga)
}
