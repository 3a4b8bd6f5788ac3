//! Time-domain accelerograms: baseline handling, integration and peak
//! ground motion values.
//!
//! Internal values are always m/s². The baseline scheme used by [`peaks`]
//! is: remove the mean of the acceleration, integrate to velocity with the
//! trapezoidal rule, remove the least-squares line from the velocity,
//! integrate to displacement and remove its mean. This is a convention;
//! the records this toolkit targets carry no documented correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard gravity used for unit conversion, m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Declared unit of an acceleration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "m/s2")]
    MetersPerSecond2,
    #[serde(rename = "cm/s2")]
    CentimetersPerSecond2,
    #[serde(rename = "g")]
    Gravity,
}

impl Units {
    /// Multiplier taking a value in `self` to m/s².
    pub fn to_si(self) -> f64 {
        match self {
            Units::MetersPerSecond2 => 1.0,
            Units::CentimetersPerSecond2 => 0.01,
            Units::Gravity => STANDARD_GRAVITY,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Units::MetersPerSecond2 => "m/s2",
            Units::CentimetersPerSecond2 => "cm/s2",
            Units::Gravity => "g",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "m/s2" | "m/s^2" | "mps2" | "si" => Ok(Units::MetersPerSecond2),
            "cm/s2" | "cm/s^2" | "gal" => Ok(Units::CentimetersPerSecond2),
            "g" => Ok(Units::Gravity),
            other => Err(Error::InvalidArgument(format!("unknown units '{other}'"))),
        }
    }
}

impl std::fmt::Display for Units {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Uniformly sampled ground acceleration in m/s².
#[derive(Debug, Clone, PartialEq)]
pub struct Accelerogram {
    dt: f64,
    samples: Vec<f64>,
    units_in: Units,
    label: String,
}

impl Accelerogram {
    /// Builds a record from samples already expressed in m/s².
    pub fn new(dt: f64, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::from_units(dt, samples, Units::MetersPerSecond2, label)
    }

    /// Builds a record from samples in `units_in`, converting them to m/s².
    pub fn from_units(
        dt: f64,
        mut samples: Vec<f64>,
        units_in: Units,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::TooShort(samples.len()));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample {bad}")));
        }
        let k = units_in.to_si();
        if k != 1.0 {
            samples.iter_mut().for_each(|v| *v *= k);
        }
        Ok(Accelerogram {
            dt,
            samples,
            units_in,
            label: label.into(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn units_in(&self) -> Units {
        self.units_in
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Record length `(n - 1)·dt` in seconds.
    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    /// Copy with every sample multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Accelerogram {
            samples: self.samples.iter().map(|v| v * k).collect(),
            ..self.clone()
        }
    }

    /// Copy with the samples replaced, keeping dt and metadata.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        let mut out = Accelerogram::new(self.dt, samples, self.label.clone())?;
        out.units_in = self.units_in;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetrendMode {
    Mean,
    Linear,
}

/// Peak absolute ground acceleration, velocity and displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundMotionPeaks {
    /// m/s²
    pub pga: f64,
    /// m/s
    pub pgv: f64,
    /// m
    pub pgd: f64,
}

/// Removes the mean or the least-squares line from `acc`.
pub fn detrend(acc: &Accelerogram, mode: DetrendMode) -> Accelerogram {
    Accelerogram {
        samples: detrend_series(&acc.samples, mode),
        ..acc.clone()
    }
}

/// Slice version of [`detrend`]. The abscissa is the sample index, which
/// gives the same residual as fitting against `t = i·dt`.
pub fn detrend_series(xs: &[f64], mode: DetrendMode) -> Vec<f64> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    match mode {
        DetrendMode::Mean => xs.iter().map(|x| x - mean).collect(),
        DetrendMode::Linear => {
            // Centered abscissa keeps the normal equations diagonal.
            let c = (n as f64 - 1.0) / 2.0;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, x) in xs.iter().enumerate() {
                let u = i as f64 - c;
                sxy += u * (x - mean);
                sxx += u * u;
            }
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            xs.iter()
                .enumerate()
                .map(|(i, x)| x - mean - slope * (i as f64 - c))
                .collect()
        }
    }
}

/// Cumulative trapezoidal integral starting at zero; same length as input.
pub fn cumulative_trapezoid(xs: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    if let Some(&first) = xs.first() {
        out.push(0.0);
        let mut prev = first;
        for &x in &xs[1..] {
            acc += 0.5 * dt * (prev + x);
            out.push(acc);
            prev = x;
        }
    }
    out
}

/// Velocity series (m/s) by trapezoidal integration with v(0) = 0.
pub fn integrate(acc: &Accelerogram) -> Vec<f64> {
    cumulative_trapezoid(&acc.samples, acc.dt)
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Baseline-corrected velocity and displacement time histories.
pub fn velocity_and_displacement(acc: &Accelerogram) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a = detrend_series(&acc.samples, DetrendMode::Mean);
    let v = detrend_series(&cumulative_trapezoid(&a, acc.dt), DetrendMode::Linear);
    let d = detrend_series(&cumulative_trapezoid(&v, acc.dt), DetrendMode::Mean);
    (a, v, d)
}

/// Peak ground motion values after baseline correction.
pub fn peaks(acc: &Accelerogram) -> GroundMotionPeaks {
    let (a, v, d) = velocity_and_displacement(acc);
    GroundMotionPeaks {
        pga: max_abs(&a),
        pgv: max_abs(&v),
        pgd: max_abs(&d),
    }
}
