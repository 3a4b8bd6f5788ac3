//! Per-record pipeline: computes the eleven tabulated parameters plus the
//! auxiliary quantities, isolating failures so that one degenerate quantity
//! leaves the others intact.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::Component;
use crate::error::{Error, Result};
use crate::response::{self, PeriodGrid, ResponseSpectra, SpectraConfig};
use crate::signal::{self, Accelerogram, GroundMotionPeaks};
use crate::spectral::{self, SpectralConfig, Window};
use crate::stats::{Param, ParameterSet};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings shared by every record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub damping: f64,
    pub period_grid: PeriodGrid,
    pub max_df: f64,
    pub smoothing_bins: usize,
    pub moment_cutoff_hz: Option<f64>,
    pub window: Window,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            damping: response::DEFAULT_DAMPING,
            period_grid: PeriodGrid::default(),
            max_df: spectral::MAX_STABLE_DF,
            smoothing_bins: spectral::DEFAULT_PEAK_SMOOTHING,
            moment_cutoff_hz: None,
            window: Window::Rectangular,
            output_dir: None,
            parallelism: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidArgument(format!("damping {}", self.damping)));
        }
        self.period_grid.periods()?;
        if !(self.max_df > 0.0) {
            return Err(Error::InvalidArgument(format!("max_df {}", self.max_df)));
        }
        if self.smoothing_bins == 0 {
            return Err(Error::InvalidArgument("smoothing bins must be >= 1".into()));
        }
        if self.moment_cutoff_hz.is_some_and(|f| !(f > 0.0)) {
            return Err(Error::InvalidArgument("moment cutoff must be > 0".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidArgument("parallelism must be >= 1".into()));
        }
        Ok(())
    }

    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig {
            max_df: self.max_df,
            smoothing_bins: self.smoothing_bins,
            moment_cutoff_hz: self.moment_cutoff_hz,
            window: self.window,
        }
    }

    pub fn spectra(&self) -> Result<SpectraConfig> {
        SpectraConfig::from_grid(self.damping, self.period_grid)
    }

    /// Metadata embedded in output files. Parallelism and the output
    /// directory are left out: they do not influence any value.
    pub fn metadata(&self, command: &str) -> Value {
        json!({
            "tool": "quakespec",
            "version": VERSION,
            "command": command,
            "config": self,
        })
    }
}

/// A parameter that could not be computed, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFailure {
    pub param: String,
    pub reason: String,
}

/// Quantities computed alongside the tabulated parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Auxiliary {
    pub pga: Option<f64>,
    pub pgv: Option<f64>,
    pub pgd: Option<f64>,
    pub omega_central: Option<f64>,
    pub omega_mean: Option<f64>,
    pub t2_dsp: Option<f64>,
    pub t3_dsp: Option<f64>,
    pub f10: Option<f64>,
    pub f50: Option<f64>,
    pub f90: Option<f64>,
    pub t1_star: Option<f64>,
    pub t_gsv_pseudo: Option<f64>,
    pub epv: Option<f64>,
    pub epa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordAnalysis {
    pub parameters: ParameterSet,
    pub auxiliary: Auxiliary,
    pub failures: Vec<ParamFailure>,
    #[serde(skip)]
    pub spectra: Option<ResponseSpectra>,
}

impl RecordAnalysis {
    pub fn computed_count(&self) -> usize {
        self.parameters.present_count()
    }
}

struct Collector {
    failures: Vec<ParamFailure>,
}

impl Collector {
    fn take<T>(&mut self, names: &[&str], r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let reason = e.to_string();
                for n in names {
                    self.failures.push(ParamFailure {
                        param: n.to_string(),
                        reason: reason.clone(),
                    });
                }
                None
            }
        }
    }
}

/// Runs the whole parameter suite on one record.
pub fn analyze_record(
    acc: &Accelerogram,
    cfg: &RunConfig,
    record_id: &str,
    event_id: &str,
    component: Component,
) -> Result<RecordAnalysis> {
    cfg.validate()?;
    let spectra_cfg = cfg.spectra()?;
    let mut set = ParameterSet::empty(record_id, event_id, component);
    let mut aux = Auxiliary::default();
    let mut c = Collector { failures: Vec::new() };

    // spectral family
    let spectral_names = ["t_ms", "t1_dsp", "t_mean", "t_cen", "q", "epsilon"];
    if let Some(fas) = c.take(
        &spectral_names,
        spectral::fourier_amplitude_spectrum_windowed(acc, cfg.max_df, cfg.window),
    ) {
        let psd = spectral::psd_from_fas(&fas, acc.len() as f64 * acc.dt());
        set.t_ms = c.take(&["t_ms"], spectral::mean_square_period(&fas));
        let moments = c.take(
            &["t_mean", "t_cen", "q", "epsilon"],
            spectral::spectral_moments_to(&psd, cfg.moment_cutoff_hz),
        );
        if let Some(m) = moments {
            if let Some((wc, wm, tc, tm)) = c.take(&["t_mean", "t_cen"], spectral::moment_periods(&m)) {
                aux.omega_central = Some(wc);
                aux.omega_mean = Some(wm);
                set.t_cen = Some(tc);
                set.t_mean = Some(tm);
            }
            if let Some((q, eps)) = c.take(&["q", "epsilon"], spectral::bandwidth_indices(&m)) {
                set.q = Some(q);
                set.epsilon = Some(eps);
            }
        }
        let peaks = spectral::psd_peak_periods(&psd, 3, cfg.smoothing_bins).and_then(|p| {
            if p.is_empty() {
                Err(Error::Degenerate("PSD has no local maximum".into()))
            } else {
                Ok(p)
            }
        });
        if let Some(p) = c.take(&["t1_dsp"], peaks) {
            set.t1_dsp = p.first().copied();
            aux.t2_dsp = p.get(1).copied();
            aux.t3_dsp = p.get(2).copied();
        }
        if let Ok(fr) = spectral::fractile_frequencies(&psd, &[0.1, 0.5, 0.9]) {
            aux.f10 = Some(fr[0]);
            aux.f50 = Some(fr[1]);
            aux.f90 = Some(fr[2]);
        }
    }

    // response-spectrum family
    let rs = c.take(
        &["t_gsa", "t_gsv", "t_gei", "t_c"],
        response::response_spectra(acc, &spectra_cfg),
    );
    if let Some(rs) = &rs {
        set.t_gsa = c.take(&["t_gsa"], response::spectrum_peak_period(&rs.sa, &rs.periods));
        set.t_gsv = c.take(&["t_gsv"], response::spectrum_peak_period(&rs.sv, &rs.periods));
        set.t_gei = c.take(&["t_gei"], response::spectrum_peak_period(&rs.ei, &rs.periods));
        aux.t_gsv_pseudo = response::spectrum_peak_period(&rs.psv, &rs.periods).ok();
        aux.t1_star = response::characteristic_period_t1star(rs).ok();
        if let Some(ep) = c.take(&["t_c"], response::effective_peaks(rs)) {
            aux.epv = Some(ep.epv);
            aux.epa = Some(ep.epa);
            set.t_c = c.take(&["t_c"], response::characteristic_period_tc(&ep));
        }
    }

    // peak-value family
    let pk: GroundMotionPeaks = signal::peaks(acc);
    aux.pga = Some(pk.pga);
    aux.pgv = Some(pk.pgv);
    aux.pgd = Some(pk.pgd);
    set.t_43 = c.take(&["t_43"], response::heidebrecht_period(&pk));

    debug_assert!(Param::ALL
        .iter()
        .all(|p| set.get(*p).is_some() || c.failures.iter().any(|f| f.param == p.name())));
    Ok(RecordAnalysis {
        parameters: set,
        auxiliary: aux,
        failures: c.failures,
        spectra: rs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthKind, SynthSpec};

    #[test]
    fn zero_record_fails_every_parameter() {
        let acc = Accelerogram::new(0.01, vec![0.0; 2000], "zero").unwrap();
        let a = analyze_record(&acc, &RunConfig::default(), "z", "e", Component::H1).unwrap();
        assert_eq!(a.computed_count(), 0);
        for p in Param::ALL {
            assert!(a.failures.iter().any(|f| f.param == p.name()), "{p}");
        }
    }

    #[test]
    fn sine_record_is_complete() {
        let acc = generate(&SynthSpec {
            dt: 0.01,
            duration: 60.0,
            kind: SynthKind::Sine { frequency: 1.0, amplitude: 1.0, phase: 0.0 },
        })
        .unwrap();
        let a = analyze_record(&acc, &RunConfig::default(), "s", "e", Component::H1).unwrap();
        assert!(a.failures.is_empty(), "{:?}", a.failures);
        let s = &a.parameters;
        for p in Param::PERIODS {
            let v = s.get(p).unwrap();
            assert!((0.4..=2.5).contains(&v), "{p} = {v}");
        }
        assert!(s.q.unwrap() < 0.1, "q {:?}", s.q);
        s.validate().unwrap();
        // untapered, the truncation edge leaks into lambda4
        assert!((0.0..=1.0).contains(&s.epsilon.unwrap()));

        let hann = RunConfig { window: Window::Hann, ..Default::default() };
        let h = analyze_record(&acc, &hann, "s", "e", Component::H1).unwrap();
        assert!(h.parameters.q.unwrap() < 0.1, "q {:?}", h.parameters.q);
        assert!(h.parameters.epsilon.unwrap() < 0.3, "eps {:?}", h.parameters.epsilon);
    }

    #[test]
    fn metadata_ignores_parallelism() {
        let a = RunConfig { parallelism: 1, ..Default::default() };
        let b = RunConfig { parallelism: 8, output_dir: Some("/x".into()), ..Default::default() };
        assert_eq!(a.metadata("batch"), b.metadata("batch"));
    }
}
