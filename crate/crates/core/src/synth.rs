//! Analytic test signals: sines, flat-band noise and second-order filtered
//! noise.
//!
//! Random draws come from SplitMix64 used as a counter-based generator:
//! draw `k` (0-based) of stream `seed` is
//!
//! ```text
//! z = seed + (k + 1)·0x9E3779B97F4A7C15        (wrapping)
//! z = (z ^ (z >> 30))·0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27))·0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! Uniforms are `(z >> 11)·2⁻⁵³` in [0, 1); normals use Box–Muller on two
//! consecutive uniforms and take only the cosine branch. Seed 0 yields
//! `0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, …`.
//!
//! Flat-band noise is built in the frequency domain: every DFT bin of the
//! record inside `[f_lo, f_hi]` gets unit magnitude and a random phase, all
//! other bins are zero, and the record is the real inverse transform scaled
//! to the requested RMS. Its own DFT has no mass outside the band. The
//! transform uses the scalar FFT planner so output does not depend on the
//! CPU's SIMD features.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlannerScalar};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::absolute_acceleration_history;
use crate::signal::Accelerogram;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output for draw `index` of stream `seed`.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sequential reader over one SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    seed: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let z = splitmix64(self.seed, self.counter);
        self.counter += 1;
        z
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    Sine {
        frequency: f64,
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    Multisine {
        frequencies: Vec<f64>,
        amplitudes: Vec<f64>,
    },
    BandNoise {
        f_lo: f64,
        f_hi: f64,
        rms: f64,
        seed: u64,
    },
    FilteredNoise {
        natural_frequency: f64,
        damping: f64,
        rms: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub dt: f64,
    pub duration: f64,
    #[serde(flatten)]
    pub kind: SynthKind,
}

impl SynthSpec {
    /// Number of samples, `round(duration/dt)`.
    pub fn sample_count(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Longest period the record must resolve: `1/f` of the lowest sine,
    /// `2/(f_lo + f_hi)` for band noise, `1/f_n` for filtered noise.
    pub fn characteristic_period(&self) -> f64 {
        match &self.kind {
            SynthKind::Sine { frequency, .. } => 1.0 / frequency,
            SynthKind::Multisine { frequencies, .. } => {
                1.0 / frequencies.iter().copied().fold(f64::INFINITY, f64::min)
            }
            SynthKind::BandNoise { f_lo, f_hi, .. } => 2.0 / (f_lo + f_hi),
            SynthKind::FilteredNoise { natural_frequency, .. } => 1.0 / natural_frequency,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        let nyquist = 0.5 / self.dt;
        let positive = |f: f64| f.is_finite() && f > 0.0;
        match &self.kind {
            SynthKind::Sine { frequency, amplitude, .. } => {
                if !positive(*frequency) || !amplitude.is_finite() {
                    return bad("sine needs a positive frequency".into());
                }
            }
            SynthKind::Multisine { frequencies, amplitudes } => {
                if frequencies.is_empty() || frequencies.len() != amplitudes.len() {
                    return bad("multisine needs one amplitude per frequency".into());
                }
                if !frequencies.iter().all(|f| positive(*f)) {
                    return bad("multisine frequencies must be positive".into());
                }
            }
            SynthKind::BandNoise { f_lo, f_hi, rms, .. } => {
                if !(*f_lo >= 0.0 && f_lo < f_hi) {
                    return bad(format!("invalid band [{f_lo}, {f_hi}]"));
                }
                if *f_hi > nyquist {
                    return bad(format!("band edge {f_hi} Hz above Nyquist {nyquist} Hz"));
                }
                if !positive(*rms) {
                    return bad("rms must be positive".into());
                }
            }
            SynthKind::FilteredNoise {
                natural_frequency,
                damping,
                rms,
                ..
            } => {
                if !positive(*natural_frequency) || *natural_frequency >= nyquist {
                    return bad(format!("natural frequency {natural_frequency} Hz"));
                }
                if !(*damping > 0.0 && *damping < 1.0) {
                    return bad(format!("damping {damping} outside (0, 1)"));
                }
                if !positive(*rms) {
                    return bad("rms must be positive".into());
                }
            }
        }
        let need = 10.0 * self.characteristic_period();
        if !(self.duration >= need) {
            return bad(format!(
                "duration {} s is shorter than 10 characteristic periods ({need} s)",
                self.duration
            ));
        }
        Ok(())
    }
}

fn scale_to_rms(xs: &mut [f64], rms: f64) {
    let current = (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
    if current > 0.0 {
        let k = rms / current;
        xs.iter_mut().for_each(|x| *x *= k);
    }
}

fn band_noise(n: usize, dt: f64, f_lo: f64, f_hi: f64, rng: &mut SplitMix64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * dt);
    let mut bins = vec![Complex::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let f = k as f64 * df;
        let phase = 2.0 * PI * rng.next_f64();
        if f < f_lo || f > f_hi {
            continue;
        }
        if k == 0 || 2 * k == n {
            // real bins: keep the sign of the random phase
            bins[k] = Complex::new(phase.cos().signum(), 0.0);
        } else {
            let c = Complex::from_polar(1.0, phase);
            bins[k] = c;
            bins[n - k] = c.conj();
        }
    }
    FftPlannerScalar::new().plan_fft_inverse(n).process(&mut bins);
    bins.into_iter().map(|c| c.re).collect()
}

/// Generates the record described by `spec`. Identical specs give
/// bit-identical samples.
pub fn generate(spec: &SynthSpec) -> Result<Accelerogram> {
    spec.validate()?;
    let n = spec.sample_count();
    let dt = spec.dt;
    let t = |i: usize| i as f64 * dt;
    let samples = match &spec.kind {
        SynthKind::Sine {
            frequency,
            amplitude,
            phase,
        } => (0..n)
            .map(|i| amplitude * (2.0 * PI * frequency * t(i) + phase).sin())
            .collect(),
        SynthKind::Multisine {
            frequencies,
            amplitudes,
        } => (0..n)
            .map(|i| {
                frequencies
                    .iter()
                    .zip(amplitudes)
                    .map(|(f, a)| a * (2.0 * PI * f * t(i)).sin())
                    .sum()
            })
            .collect(),
        SynthKind::BandNoise {
            f_lo,
            f_hi,
            rms,
            seed,
        } => {
            let mut xs = band_noise(n, dt, *f_lo, *f_hi, &mut SplitMix64::new(*seed));
            scale_to_rms(&mut xs, *rms);
            xs
        }
        SynthKind::FilteredNoise {
            natural_frequency,
            damping,
            rms,
            seed,
        } => {
            let mut rng = SplitMix64::new(*seed);
            let white: Vec<f64> = (0..n).map(|_| rng.next_gaussian()).collect();
            let mut xs = absolute_acceleration_history(&white, dt, 2.0 * PI * natural_frequency, *damping);
            scale_to_rms(&mut xs, *rms);
            xs
        }
    };
    Accelerogram::new(dt, samples, format!("synth-{}", kind_name(&spec.kind)))
}

pub fn kind_name(kind: &SynthKind) -> &'static str {
    match kind {
        SynthKind::Sine { .. } => "sine",
        SynthKind::Multisine { .. } => "multisine",
        SynthKind::BandNoise { .. } => "band_noise",
        SynthKind::FilteredNoise { .. } => "filtered_noise",
    }
}
