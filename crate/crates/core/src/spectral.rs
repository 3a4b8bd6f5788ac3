//! Frequency-domain parameters: Fourier amplitude spectrum, periodogram
//! PSD, spectral moments and the periods and bandwidth indices built from
//! them.
//!
//! Spectra are one-sided on the grid `f_i = i·df`, `i = 0..=N/2`, where `N`
//! is the zero-padded transform length. Every parameter here is a ratio of
//! spectral quantities, so the absolute scaling of the PSD is irrelevant;
//! the periodogram is normalized as `G_i = 2·|C_i|² / T` with `C_i = dt·X_i`
//! and `T` the unpadded record length.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Accelerogram;

/// Largest frequency step for which the mean-square period is stable, Hz.
pub const MAX_STABLE_DF: f64 = 0.05;

/// Frequency band of the mean-square period, Hz.
pub const TMS_BAND: (f64, f64) = (0.25, 20.0);

/// Default centered moving-average width applied before PSD peak picking.
pub const DEFAULT_PEAK_SMOOTHING: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    FourierAmplitude,
    Psd,
}

/// Taper applied to the record before the transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// One-sided spectrum with uniform frequency step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub df: f64,
    pub kind: SpectrumKind,
    pub ordinates: Vec<f64>,
    pub source_dt: f64,
}

impl Spectrum {
    /// Builds a spectrum from explicit ordinates, checking the invariants.
    pub fn new(df: f64, kind: SpectrumKind, ordinates: Vec<f64>, source_dt: f64) -> Result<Self> {
        if !(df.is_finite() && df > 0.0) {
            return Err(Error::InvalidArgument(format!("df must be > 0, got {df}")));
        }
        if ordinates.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument(
                "spectrum ordinates must be finite and non-negative".into(),
            ));
        }
        Ok(Spectrum {
            df,
            kind,
            ordinates,
            source_dt,
        })
    }

    pub fn frequency(&self, i: usize) -> f64 {
        i as f64 * self.df
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.ordinates.len()).map(|i| self.frequency(i))
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    fn expect_kind(&self, kind: SpectrumKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidArgument(format!(
                "expected a {kind:?} spectrum, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMoments {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda4: f64,
}

/// Moment-based and spectrum-based frequency content of one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub omega_central: f64,
    pub omega_mean: f64,
    pub t_cen: f64,
    pub t_mean: f64,
    pub q: f64,
    pub epsilon: f64,
    pub t_ms: f64,
    pub t1_dsp: Option<f64>,
    pub t2_dsp: Option<f64>,
    pub t3_dsp: Option<f64>,
    pub f10: f64,
    pub f50: f64,
    pub f90: f64,
}

/// Smallest power of two `N ≥ n` with `1/(N·dt) ≤ max_df`.
pub fn transform_length(n: usize, dt: f64, max_df: f64) -> usize {
    let needed = (1.0 / (max_df * dt)).ceil();
    let mut len = n.max(2).next_power_of_two();
    while (len as f64) < needed {
        len *= 2;
    }
    len
}

fn complex_spectrum(acc: &Accelerogram, max_df: f64, window: Window) -> Result<(Vec<Complex<f64>>, f64)> {
    if acc.len() < 2 {
        return Err(Error::TooShort(acc.len()));
    }
    if !(max_df.is_finite() && max_df > 0.0) {
        return Err(Error::InvalidArgument(format!("max_df must be > 0, got {max_df}")));
    }
    let n = acc.len();
    let len = transform_length(n, acc.dt(), max_df);
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (i, (slot, &x)) in buf.iter_mut().zip(acc.samples()).enumerate() {
        let w = match window {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos(),
        };
        slot.re = w * x;
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf.truncate(len / 2 + 1);
    Ok((buf, 1.0 / (len as f64 * acc.dt())))
}

/// One-sided Fourier amplitude spectrum `|C_i| = dt·|X_i|`, zero-padded so
/// that `df ≤ max_df`.
pub fn fourier_amplitude_spectrum(acc: &Accelerogram, max_df: f64) -> Result<Spectrum> {
    fourier_amplitude_spectrum_windowed(acc, max_df, Window::Rectangular)
}

pub fn fourier_amplitude_spectrum_windowed(
    acc: &Accelerogram,
    max_df: f64,
    window: Window,
) -> Result<Spectrum> {
    let (bins, df) = complex_spectrum(acc, max_df, window)?;
    let dt = acc.dt();
    Ok(Spectrum {
        df,
        kind: SpectrumKind::FourierAmplitude,
        ordinates: bins.iter().map(|c| c.norm() * dt).collect(),
        source_dt: dt,
    })
}

/// One-sided periodogram of the full record.
pub fn power_spectral_density(acc: &Accelerogram, max_df: f64) -> Result<Spectrum> {
    power_spectral_density_windowed(acc, max_df, Window::Rectangular)
}

pub fn power_spectral_density_windowed(
    acc: &Accelerogram,
    max_df: f64,
    window: Window,
) -> Result<Spectrum> {
    let fas = fourier_amplitude_spectrum_windowed(acc, max_df, window)?;
    Ok(psd_from_fas(&fas, acc.len() as f64 * acc.dt()))
}

/// Converts Fourier amplitudes into the periodogram of a record of
/// length `duration` seconds.
pub fn psd_from_fas(fas: &Spectrum, duration: f64) -> Spectrum {
    let last = fas.ordinates.len().saturating_sub(1);
    let ordinates = fas
        .ordinates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let fold = if i == 0 || i == last { 1.0 } else { 2.0 };
            fold * c * c / duration
        })
        .collect();
    Spectrum {
        df: fas.df,
        kind: SpectrumKind::Psd,
        ordinates,
        source_dt: fas.source_dt,
    }
}

/// Spectral moments of orders 0, 1, 2, 4 by trapezoidal integration over
/// the whole grid.
pub fn spectral_moments(psd: &Spectrum) -> Result<SpectralMoments> {
    spectral_moments_to(psd, None)
}

/// Spectral moments with an optional upper integration limit in Hz. The
/// default limit is the Nyquist frequency of the source record.
pub fn spectral_moments_to(psd: &Spectrum, cutoff_hz: Option<f64>) -> Result<SpectralMoments> {
    psd.expect_kind(SpectrumKind::Psd)?;
    let end = match cutoff_hz {
        Some(fc) if fc.is_finite() && fc > 0.0 => {
            ((fc / psd.df + 1e-9).floor() as usize + 1).min(psd.len())
        }
        Some(fc) => return Err(Error::InvalidArgument(format!("moment cutoff {fc} Hz"))),
        None => psd.len(),
    };
    let g = &psd.ordinates[..end];
    if g.len() < 2 || g.iter().all(|v| *v == 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let d_omega = 2.0 * PI * psd.df;
    let mut m = [0.0_f64; 4];
    for (i, pair) in g.windows(2).enumerate() {
        let w0 = 2.0 * PI * psd.frequency(i);
        let w1 = 2.0 * PI * psd.frequency(i + 1);
        let (a, b) = (pair[0], pair[1]);
        m[0] += 0.5 * d_omega * (a + b);
        m[1] += 0.5 * d_omega * (w0 * a + w1 * b);
        m[2] += 0.5 * d_omega * (w0.powi(2) * a + w1.powi(2) * b);
        m[3] += 0.5 * d_omega * (w0.powi(4) * a + w1.powi(4) * b);
    }
    Ok(SpectralMoments {
        lambda0: m[0],
        lambda1: m[1],
        lambda2: m[2],
        lambda4: m[3],
    })
}

/// Central and mean circular frequencies (rad/s) and the matching periods:
/// `(Ω, ω̄, T_cen, T_mean)`.
pub fn moment_periods(m: &SpectralMoments) -> Result<(f64, f64, f64, f64)> {
    if !(m.lambda0 > 0.0) {
        return Err(Error::Degenerate("zeroth spectral moment is zero".into()));
    }
    if !(m.lambda1 > 0.0 && m.lambda2 > 0.0) {
        return Err(Error::Degenerate("spectral mass only at zero frequency".into()));
    }
    let omega_central = (m.lambda2 / m.lambda0).sqrt();
    let omega_mean = m.lambda1 / m.lambda0;
    Ok((
        omega_central,
        omega_mean,
        2.0 * PI / omega_central,
        2.0 * PI / omega_mean,
    ))
}

fn bandwidth_radical(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::Degenerate("zero denominator in bandwidth index".into()));
    }
    let r = 1.0 - num / den;
    if r < -1e-12 {
        return Err(Error::Degenerate(format!("moment inequality violated ({r})")));
    }
    Ok(r.max(0.0).sqrt().min(1.0))
}

/// Shape factor `q` and the Cartwright–Longuet-Higgins `ε`.
pub fn bandwidth_indices(m: &SpectralMoments) -> Result<(f64, f64)> {
    let q = bandwidth_radical(m.lambda1 * m.lambda1, m.lambda0 * m.lambda2)?;
    let eps = bandwidth_radical(m.lambda2 * m.lambda2, m.lambda0 * m.lambda4)?;
    Ok((q, eps))
}

/// Fourier-amplitude-weighted mean of `1/f` over 0.25–20 Hz.
///
/// The quantity is usually called the mean square period, but the weighted
/// mean is what is evaluated; there is no outer square.
pub fn mean_square_period(fas: &Spectrum) -> Result<f64> {
    fas.expect_kind(SpectrumKind::FourierAmplitude)?;
    if fas.df > MAX_STABLE_DF * (1.0 + 1e-9) {
        return Err(Error::UnstableDf {
            df: fas.df,
            max: MAX_STABLE_DF,
        });
    }
    let (lo, hi) = TMS_BAND;
    let (mut num, mut den, mut any) = (0.0, 0.0, false);
    for (f, c) in fas.frequencies().zip(&fas.ordinates) {
        if f >= lo && f <= hi {
            any = true;
            let c2 = c * c;
            num += c2 / f;
            den += c2;
        }
    }
    if !any || den == 0.0 {
        return Err(Error::BandEmpty { lo, hi });
    }
    Ok(num / den)
}

/// Centered moving average with the window truncated at both ends.
pub fn moving_average(xs: &[f64], width: usize) -> Vec<f64> {
    if width <= 1 {
        return xs.to_vec();
    }
    let half = width / 2;
    (0..xs.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(xs.len());
            xs[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Indices of local maxima of `ys`, strongest first. A run of equal values
/// bounded by lower neighbors on both sides counts as one maximum placed at
/// its center. Equal heights are ordered by increasing index.
pub fn local_maxima(ys: &[f64]) -> Vec<usize> {
    let mut found = Vec::new();
    let mut i = 1;
    while i + 1 < ys.len() {
        let mut j = i + 1;
        while j < ys.len() && ys[j] == ys[i] {
            j += 1;
        }
        if j < ys.len() && ys[i - 1] < ys[i] && ys[j] < ys[i] {
            found.push(i + (j - 1 - i) / 2);
        }
        i = j;
    }
    found.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]).then(a.cmp(&b)));
    found
}

/// Periods (s) of the `k` strongest peaks of the smoothed PSD.
pub fn psd_peak_periods(psd: &Spectrum, k: usize, smoothing_bins: usize) -> Result<Vec<f64>> {
    psd.expect_kind(SpectrumKind::Psd)?;
    if psd.len() < 3 {
        return Err(Error::InsufficientData(
            "spectrum has no interior ordinates".into(),
        ));
    }
    let smooth = moving_average(&psd.ordinates, smoothing_bins);
    Ok(local_maxima(&smooth)
        .into_iter()
        .filter(|&i| i > 0)
        .take(k)
        .map(|i| 1.0 / psd.frequency(i))
        .collect())
}

/// Frequencies below which the given fractions of the cumulative PSD lie,
/// with linear interpolation of the cumulative curve inside the crossing
/// interval.
pub fn fractile_frequencies(psd: &Spectrum, levels: &[f64]) -> Result<Vec<f64>> {
    psd.expect_kind(SpectrumKind::Psd)?;
    if let Some(p) = levels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("fractile level {p}")));
    }
    let g = &psd.ordinates;
    let mut cum = Vec::with_capacity(g.len());
    cum.push(0.0);
    for pair in g.windows(2) {
        let last = *cum.last().unwrap();
        cum.push(last + 0.5 * psd.df * (pair[0] + pair[1]));
    }
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    Ok(levels
        .iter()
        .map(|&p| {
            let target = p * total;
            // first index whose cumulative value reaches the target
            let j = cum.partition_point(|&c| c < target);
            if j == 0 {
                return 0.0;
            }
            let j = j.min(cum.len() - 1);
            let (c0, c1) = (cum[j - 1], cum[j]);
            let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
            psd.frequency(j - 1) + frac * psd.df
        })
        .collect())
}

/// Options for [`spectral_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub max_df: f64,
    pub smoothing_bins: usize,
    pub moment_cutoff_hz: Option<f64>,
    pub window: Window,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            max_df: MAX_STABLE_DF,
            smoothing_bins: DEFAULT_PEAK_SMOOTHING,
            moment_cutoff_hz: None,
            window: Window::Rectangular,
        }
    }
}

/// Computes every field of [`SpectralParams`], failing on the first
/// degenerate quantity.
pub fn spectral_params(acc: &Accelerogram, cfg: &SpectralConfig) -> Result<SpectralParams> {
    let fas = fourier_amplitude_spectrum_windowed(acc, cfg.max_df, cfg.window)?;
    let psd = psd_from_fas(&fas, acc.len() as f64 * acc.dt());
    let m = spectral_moments_to(&psd, cfg.moment_cutoff_hz)?;
    let (omega_central, omega_mean, t_cen, t_mean) = moment_periods(&m)?;
    let (q, epsilon) = bandwidth_indices(&m)?;
    let t_ms = mean_square_period(&fas)?;
    let peaks = psd_peak_periods(&psd, 3, cfg.smoothing_bins)?;
    let fr = fractile_frequencies(&psd, &[0.1, 0.5, 0.9])?;
    Ok(SpectralParams {
        omega_central,
        omega_mean,
        t_cen,
        t_mean,
        q,
        epsilon,
        t_ms,
        t1_dsp: peaks.first().copied(),
        t2_dsp: peaks.get(1).copied(),
        t3_dsp: peaks.get(2).copied(),
        f10: fr[0],
        f50: fr[1],
        f90: fr[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(f0: f64, amp: f64, dt: f64, dur: f64) -> Accelerogram {
        let n = (dur / dt).round() as usize;
        let xs = (0..n)
            .map(|i| amp * (2.0 * PI * f0 * i as f64 * dt).sin())
            .collect();
        Accelerogram::new(dt, xs, "sine").unwrap()
    }

    fn psd(df: f64, ordinates: Vec<f64>) -> Spectrum {
        Spectrum::new(df, SpectrumKind::Psd, ordinates, 0.01).unwrap()
    }

    fn delta_psd(df: f64, f0: f64, len: usize) -> Spectrum {
        let mut g = vec![0.0; len];
        g[(f0 / df).round() as usize] = 1.0;
        psd(df, g)
    }

    #[test]
    fn transform_length_meets_df_bound() {
        for n in [2, 3, 100, 1000, 4097, 20000] {
            for dt in [0.005, 0.01, 0.02] {
                let len = transform_length(n, dt, 0.05);
                assert!(len.is_power_of_two() && len >= n);
                assert!(1.0 / (len as f64 * dt) <= 0.05);
                assert!(len == 2 || 1.0 / ((len / 2) as f64 * dt) > 0.05 || len / 2 < n);
            }
        }
    }

    #[test]
    fn fas_of_sine_is_concentrated() {
        let acc = sine(2.0, 1.0, 0.01, 40.0);
        let fas = fourier_amplitude_spectrum_windowed(&acc, 0.05, Window::Hann).unwrap();
        assert!(fas.df <= 0.05);
        let (imax, &peak) = fas
            .ordinates
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((fas.frequency(imax) - 2.0).abs() <= fas.df);
        for (i, c) in fas.ordinates.iter().enumerate() {
            if (i as isize - imax as isize).abs() > 3 {
                assert!(*c < 0.01 * peak, "bin {i}: {c} vs {peak}");
            }
        }
    }

    #[test]
    fn rectangular_leakage_decays_slowly() {
        // sidelobes of an untapered, padded tone stay near 1/(pi k)
        let acc = sine(2.0, 1.0, 0.01, 40.0);
        let fas = fourier_amplitude_spectrum(&acc, 0.05).unwrap();
        let e: Vec<f64> = fas.ordinates.iter().map(|c| c * c).collect();
        let imax = (0..e.len()).max_by(|a, b| e[*a].total_cmp(&e[*b])).unwrap();
        let total: f64 = e.iter().sum();
        let near: f64 = e[imax - 3..=imax + 3].iter().sum();
        assert!(near >= 0.95 * total, "{near} / {total}");
    }

    #[test]
    fn zero_record_gives_zero_spectrum() {
        let acc = Accelerogram::new(0.01, vec![0.0; 300], "").unwrap();
        let fas = fourier_amplitude_spectrum(&acc, 0.05).unwrap();
        assert!(fas.ordinates.iter().all(|c| *c == 0.0));
        let g = power_spectral_density(&acc, 0.05).unwrap();
        assert!(matches!(spectral_moments(&g), Err(Error::EmptySpectrum)));
        assert!(matches!(mean_square_period(&fas), Err(Error::BandEmpty { .. })));
        assert!(matches!(
            fractile_frequencies(&g, &[0.5]),
            Err(Error::EmptySpectrum)
        ));
    }

    #[test]
    fn psd_of_sine_mass_near_f0() {
        let acc = sine(1.5, 1.0, 0.01, 40.0);
        let g = power_spectral_density(&acc, 0.05).unwrap();
        let k0 = (1.5 / g.df).round() as usize;
        let total: f64 = g.ordinates.iter().sum();
        let near: f64 = g.ordinates[k0 - 3..=k0 + 3].iter().sum();
        assert!(near >= 0.95 * total, "{near} / {total}");
    }

    #[test]
    fn psd_scales_quadratically() {
        let acc = sine(1.0, 1.0, 0.01, 20.0);
        let g1 = power_spectral_density(&acc, 0.05).unwrap();
        let g3 = power_spectral_density(&acc.scaled(3.0), 0.05).unwrap();
        let top = g3.ordinates.iter().cloned().fold(0.0, f64::max);
        for (a, b) in g1.ordinates.iter().zip(&g3.ordinates) {
            assert!((b - 9.0 * a).abs() <= 1e-12 * top);
        }
    }

    #[test]
    fn two_sines_split_mass_evenly() {
        let dt = 0.01;
        let n = 6000;
        let xs = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                (2.0 * PI * t).sin() + (2.0 * PI * 4.0 * t).sin()
            })
            .collect();
        let acc = Accelerogram::new(dt, xs, "").unwrap();
        let g = power_spectral_density(&acc, 0.05).unwrap();
        let mass = |f: f64| {
            let k = (f / g.df).round() as usize;
            g.ordinates[k - 5..=k + 5].iter().sum::<f64>()
        };
        let (m1, m4) = (mass(1.0), mass(4.0));
        assert!((m1 - m4).abs() <= 0.02 * m1.max(m4), "{m1} vs {m4}");
    }

    #[test]
    fn flat_psd_moments_closed_form() {
        // Step sampled with the midpoint value at the discontinuity.
        let df: f64 = 0.01;
        let fb = 5.0;
        let kb = (fb / df).round() as usize;
        let mut g = vec![0.0; 2001];
        g[..kb].iter_mut().for_each(|v| *v = 1.0);
        g[kb] = 0.5;
        let m = spectral_moments(&psd(df, g)).unwrap();
        let wb = 2.0 * PI * fb;
        assert!((m.lambda0 / wb - 1.0).abs() < 1e-3);
        assert!((m.lambda1 / (wb * wb / 2.0) - 1.0).abs() < 1e-3);
        assert!((m.lambda2 / (wb.powi(3) / 3.0) - 1.0).abs() < 1e-3);
        assert!((m.lambda4 / (wb.powi(5) / 5.0) - 1.0).abs() < 1e-3);

        let (wc, wm, tc, tm) = moment_periods(&m).unwrap();
        assert!((wc / (wb / 3f64.sqrt()) - 1.0).abs() < 1e-3);
        assert!((wm / (wb / 2.0) - 1.0).abs() < 1e-3);
        assert!((tc / tm - 3f64.sqrt() / 2.0).abs() < 1e-3);

        let (q, eps) = bandwidth_indices(&m).unwrap();
        assert!((q - 0.5).abs() < 1e-3, "q {q}");
        assert!((eps - 2.0 / 3.0).abs() < 1e-3, "eps {eps}");
    }

    #[test]
    fn delta_psd_limits() {
        let g = delta_psd(0.05, 1.0, 200);
        let m = spectral_moments(&g).unwrap();
        let w0 = 2.0 * PI;
        assert!((m.lambda1 - w0 * m.lambda0).abs() < 1e-12 * m.lambda1);
        assert!((m.lambda2 - w0.powi(2) * m.lambda0).abs() < 1e-12 * m.lambda2);
        assert!((m.lambda4 - w0.powi(4) * m.lambda0).abs() < 1e-12 * m.lambda4);
        let (wc, wm, tc, tm) = moment_periods(&m).unwrap();
        assert!((wc - w0).abs() < 1e-9 && (wm - w0).abs() < 1e-9);
        assert!((tc - 1.0).abs() < 1e-9 && (tm - 1.0).abs() < 1e-9);
        let (q, eps) = bandwidth_indices(&m).unwrap();
        assert!(q < 1e-6 && eps < 1e-6, "q {q} eps {eps}");
        assert_eq!(psd_peak_periods(&g, 3, 5).unwrap(), vec![1.0]);
        let fr = fractile_frequencies(&g, &[0.1, 0.5, 0.9]).unwrap();
        assert!(fr.iter().all(|f| (f - 1.0).abs() <= g.df), "{fr:?}");
    }

    #[test]
    fn narrow_gaussian_bump() {
        let df = 0.001;
        let (f0, sigma) = (1.0, 0.02);
        let g: Vec<f64> = (0..5001)
            .map(|i| {
                let f = i as f64 * df;
                (-0.5 * ((f - f0) / sigma).powi(2)).exp()
            })
            .collect();
        let m = spectral_moments(&psd(df, g)).unwrap();
        let (q, eps) = bandwidth_indices(&m).unwrap();
        assert!(eps > 0.0);
        assert!(q < 0.05, "q {q}");
    }

    #[test]
    fn rejects_wrong_kind_and_bad_df() {
        let acc = sine(2.0, 1.0, 0.01, 10.0);
        let fas = fourier_amplitude_spectrum(&acc, 0.05).unwrap();
        assert!(spectral_moments(&fas).is_err());
        let coarse = fourier_amplitude_spectrum(&acc, 0.5).unwrap();
        assert!(coarse.df > 0.05);
        assert!(matches!(
            mean_square_period(&coarse),
            Err(Error::UnstableDf { .. })
        ));
    }

    #[test]
    fn tms_single_and_two_sines() {
        let acc = sine(2.0, 1.0, 0.01, 40.0);
        let fas = fourier_amplitude_spectrum_windowed(&acc, 0.05, Window::Hann).unwrap();
        let t = mean_square_period(&fas).unwrap();
        assert!((t - 0.5).abs() < 0.02 * 0.5, "t_ms {t}");

        let dt = 0.01;
        let xs = (0..6000)
            .map(|i| {
                let t = i as f64 * dt;
                (2.0 * PI * t).sin() + (2.0 * PI * 4.0 * t).sin()
            })
            .collect();
        let fas = fourier_amplitude_spectrum(&Accelerogram::new(dt, xs, "").unwrap(), 0.05).unwrap();
        let t = mean_square_period(&fas).unwrap();
        assert!((t - 0.625).abs() < 0.02 * 0.625, "t_ms {t}");
    }

    #[test]
    fn peak_periods_constructed() {
        let df = 0.01;
        let mut g = vec![0.0; 1000];
        g[50] = 5.0;
        g[200] = 3.0;
        g[500] = 1.0;
        let p = psd_peak_periods(&psd(df, g), 3, 5).unwrap();
        let expect = [2.0, 0.5, 0.2];
        assert_eq!(p.len(), 3);
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn monotone_psd_has_no_peaks() {
        let g: Vec<f64> = (0..100).map(|i| 100.0 - i as f64).collect();
        assert!(psd_peak_periods(&psd(0.1, g), 3, 5).unwrap().is_empty());
        assert!(psd_peak_periods(&psd(0.1, vec![1.0, 2.0]), 3, 5).is_err());
    }

    #[test]
    fn peak_ties_prefer_lower_frequency() {
        let mut g = vec![0.0; 100];
        g[60] = 2.0;
        g[20] = 2.0;
        let p = psd_peak_periods(&psd(0.1, g), 2, 1).unwrap();
        assert_eq!(p, vec![1.0 / 2.0, 1.0 / 6.0]);
    }

    #[test]
    fn fractiles_flat_and_triangular() {
        let df = 0.01;
        let g = vec![1.0; 1001];
        let fr = fractile_frequencies(&psd(df, g), &[0.1, 0.5, 0.9]).unwrap();
        for (f, e) in fr.iter().zip([1.0, 5.0, 9.0]) {
            assert!((f - e).abs() <= df, "{fr:?}");
        }
        let g: Vec<f64> = (0..=1000).map(|i| i as f64 * df).collect();
        let fr = fractile_frequencies(&psd(df, g), &[0.5]).unwrap();
        assert!((fr[0] - 10.0 / 2f64.sqrt()).abs() < 0.01 * 7.071, "{fr:?}");
    }

    #[test]
    fn moment_cutoff_truncates() {
        let df = 0.1;
        let g = vec![1.0; 101];
        let full = spectral_moments(&psd(df, g.clone())).unwrap();
        let cut = spectral_moments_to(&psd(df, g), Some(5.0)).unwrap();
        assert!((cut.lambda0 / full.lambda0 - 0.5).abs() < 1e-9);
    }
}
