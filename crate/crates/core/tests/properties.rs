//! Property-based invariants across the modules.

mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use quakespec::catalog::{Catalog, Component, Event, RecordEntry, Station};
use quakespec::response::{self, sdof_response, SpectraConfig};
use quakespec::signal::{self, detrend_series, integrate, DetrendMode, Units};
use quakespec::spectral::{
    bandwidth_indices, fractile_frequencies, moment_periods, spectral_moments, spectral_params, SpectralConfig,
    Spectrum, SpectrumKind,
};
use quakespec::stats::{self, classify_r2, fit_affine, FitModel, GroupBy, Param, ParameterSet, Strength};
use quakespec::synth::{generate, SynthKind, SynthSpec};
use quakespec::Accelerogram;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn record() -> impl Strategy<Value = Accelerogram> {
    (prop::collection::vec(-5.0..5.0f64, 64..600), prop::sample::select(vec![0.005, 0.01, 0.02]))
        .prop_filter("non-constant", |(xs, _)| xs.iter().any(|x| (x - xs[0]).abs() > 1e-3))
        .prop_map(|(xs, dt)| Accelerogram::new(dt, xs, "p").unwrap())
}

fn psd() -> impl Strategy<Value = Spectrum> {
    (prop::collection::vec(0.0..1.0f64, 2..400), 0.001..0.2f64)
        .prop_filter("positive mass beyond DC", |(o, _)| o.iter().skip(1).any(|v| *v > 1e-6))
        .prop_map(|(o, df)| Spectrum::new(df, SpectrumKind::Psd, o.iter().map(|v| v * v * v).collect(), 0.01).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn peaks_are_linear(acc in record(), k in 0.01..100.0f64) {
        let a = signal::peaks(&acc);
        let b = signal::peaks(&acc.scaled(k));
        prop_assert!(close(b.pga, k * a.pga, 1e-12));
        prop_assert!(close(b.pgv, k * a.pgv, 1e-12));
        prop_assert!(close(b.pgd, k * a.pgd, 1e-12));
    }

    #[test]
    fn integrate_offset_adds_ramp(acc in record(), c in -3.0..3.0f64) {
        let shifted = acc.with_samples(acc.samples().iter().map(|x| x + c).collect()).unwrap();
        let base = integrate(&acc);
        for (i, (s, b)) in integrate(&shifted).iter().zip(&base).enumerate() {
            let want = b + c * i as f64 * acc.dt();
            prop_assert!((s - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn detrend_is_idempotent(acc in record()) {
        for mode in [DetrendMode::Mean, DetrendMode::Linear] {
            let once = detrend_series(acc.samples(), mode);
            let twice = detrend_series(&once, mode);
            let scale = once.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn bandwidth_bounds_and_period_order(g in psd()) {
        let m = spectral_moments(&g).unwrap();
        let (q, eps) = bandwidth_indices(&m).unwrap();
        prop_assert!((0.0..=1.0).contains(&q), "q {}", q);
        prop_assert!((0.0..=1.0).contains(&eps), "eps {}", eps);
        let (_, _, t_cen, t_mean) = moment_periods(&m).unwrap();
        prop_assert!(t_cen <= t_mean * (1.0 + 1e-12));
    }

    #[test]
    fn fractiles_are_ordered(g in psd()) {
        let f = fractile_frequencies(&g, &[0.1, 0.5, 0.9]).unwrap();
        let top = g.frequency(g.len() - 1);
        prop_assert!(0.0 <= f[0] && f[0] <= f[1] && f[1] <= f[2] && f[2] <= top, "{:?}", f);
    }

    #[test]
    fn spectral_params_scale_free(seed in 0u64..1000, k in 0.001..1000.0f64) {
        let acc = common::band_noise(0.2, 8.0, seed, 0.01, 20.0);
        let cfg = SpectralConfig::default();
        let a = spectral_params(&acc, &cfg).unwrap();
        let b = spectral_params(&acc.scaled(k), &cfg).unwrap();
        let pairs = [
            (a.t_cen, b.t_cen), (a.t_mean, b.t_mean), (a.q, b.q), (a.epsilon, b.epsilon),
            (a.t_ms, b.t_ms), (a.f10, b.f10), (a.f50, b.f50), (a.f90, b.f90),
            (a.omega_central, b.omega_central), (a.omega_mean, b.omega_mean),
        ];
        for (x, y) in pairs {
            prop_assert!(close(x, y, 1e-9), "{} vs {}", x, y);
        }
        prop_assert_eq!(a.t1_dsp, b.t1_dsp);
    }

    #[test]
    fn circular_shift_of_padded_record(seed in 0u64..1000, shift in 1usize..4096) {
        // 4096 samples, the last half zero: already padded to the transform length
        let burst = common::band_noise(0.5, 10.0, seed, 0.01, 20.48);
        let mut xs = burst.samples().to_vec();
        xs.resize(4096, 0.0);
        let a_rec = Accelerogram::new(0.01, xs.clone(), "a").unwrap();
        xs.rotate_right(shift);
        let b_rec = Accelerogram::new(0.01, xs, "b").unwrap();
        let cfg = SpectralConfig::default();
        let a = spectral_params(&a_rec, &cfg).unwrap();
        let b = spectral_params(&b_rec, &cfg).unwrap();
        for (x, y) in [(a.t_cen, b.t_cen), (a.t_mean, b.t_mean), (a.q, b.q), (a.epsilon, b.epsilon), (a.t_ms, b.t_ms)] {
            prop_assert!(close(x, y, 1e-6), "{} vs {}", x, y);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pseudo_spectra_identities(acc in record()) {
        let cfg = SpectraConfig::new(0.05, common::log_periods(0.05, 3.0, 25)).unwrap();
        let rs = response::response_spectra(&acc, &cfg).unwrap();
        for (i, t) in rs.periods.iter().enumerate() {
            let w = 2.0 * PI / t;
            prop_assert_eq!(rs.psv[i], w * rs.sd[i]);
            prop_assert_eq!(rs.psa[i], w * w * rs.sd[i]);
        }
    }

    #[test]
    fn input_energy_is_non_negative(acc in record(), t in 0.03..4.0f64, zeta in 0.01..0.3f64) {
        let p = sdof_response(&acc, t, zeta).unwrap();
        prop_assert!(p.ei >= 0.0, "ei {}", p.ei);
    }

    #[test]
    fn recurrence_matches_brute_force(seed in 0u64..10_000, t in 0.1..3.0f64) {
        let acc = common::band_noise(0.2, 10.0, seed, 0.01, 10.0);
        let nj = sdof_response(&acc, t, 0.05).unwrap();
        let cd = common::central_difference(&acc, t, 0.05, 0.005);
        prop_assert!(common::rel_err(nj.sd, cd.sd) < 0.005);
        prop_assert!(common::rel_err(nj.sv, cd.sv) < 0.005);
        prop_assert!(common::rel_err(nj.sa, cd.sa) < 0.005);
        prop_assert!(common::rel_err(nj.ei, cd.ei) < 0.005);
    }

    #[test]
    fn period_params_scale_free(seed in 0u64..1000, k in 0.01..100.0f64) {
        let acc = common::band_noise(0.3, 6.0, seed, 0.01, 15.0);
        let cfg = SpectraConfig::default();
        let a = response::response_spectra(&acc, &cfg).unwrap();
        let b = response::response_spectra(&acc.scaled(k), &cfg).unwrap();
        let tc = |rs| response::characteristic_period_tc(&response::effective_peaks(rs).unwrap()).unwrap();
        prop_assert!(close(tc(&a), tc(&b), 1e-9));
        prop_assert!(close(
            response::characteristic_period_t1star(&a).unwrap(),
            response::characteristic_period_t1star(&b).unwrap(),
            1e-9
        ));
        for (x, y) in [(&a.sa, &b.sa), (&a.sv, &b.sv), (&a.ei, &b.ei)] {
            prop_assert_eq!(
                response::spectrum_peak_period(x, &a.periods).unwrap(),
                response::spectrum_peak_period(y, &b.periods).unwrap()
            );
        }
    }
}

proptest! {
    #[test]
    fn affine_r2_is_symmetric(pts in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 3..60)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let (Ok(f), Ok(g)) = (fit_affine(&xs, &ys), fit_affine(&ys, &xs)) else { return Ok(()) };
        prop_assert!((f.r2 - g.r2).abs() <= 1e-12, "{} vs {}", f.r2, g.r2);
        prop_assert!((0.0..=1.0).contains(&f.r2));
    }

    #[test]
    fn affine_fit_recovers_line(
        xs in prop::collection::vec(-1.0..1.0f64, 3..50),
        a in -100.0..100.0f64,
        b in -100.0..100.0f64,
        scale_exp in -6i32..7,
    ) {
        let s = 10f64.powi(scale_exp);
        let xs: Vec<f64> = xs.iter().map(|x| x * s).collect();
        prop_assume!(xs.iter().any(|x| (x - xs[0]).abs() > 1e-3 * s));
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b * s).collect();
        let f = fit_affine(&xs, &ys).unwrap();
        prop_assert!((f.a - a).abs() <= 1e-9 * a.abs().max(1.0), "a {} vs {}", f.a, a);
        prop_assert!((f.b - b * s).abs() <= 1e-9 * (b * s).abs().max(s), "b {} vs {}", f.b, b * s);
    }

    #[test]
    fn classification_is_a_threshold(r2 in 0.0..=1.0f64) {
        let want = if r2 > 0.5 { Strength::Good } else if r2 < 0.1 { Strength::Weak } else { Strength::Moderate };
        prop_assert_eq!(classify_r2(r2), want);
    }

    #[test]
    fn grouped_counts_partition_pooled(
        rows in prop::collection::vec((0usize..3, prop::option::of(0.1..3.0f64), prop::option::of(0.1..3.0f64)), 3..40)
    ) {
        let sets: Vec<ParameterSet> = rows
            .iter()
            .enumerate()
            .map(|(i, (ev, a, b))| {
                let mut s = ParameterSet::empty(format!("r{i}"), format!("e{ev}"), Component::H1);
                s.t_ms = *a;
                s.t_c = *b;
                s
            })
            .collect();
        let params = [Param::TMs, Param::TC];
        let pooled = stats::correlation_matrix(&sets, &params, FitModel::Affine, GroupBy::All).unwrap();
        let groups = stats::correlation_matrix(&sets, &params, FitModel::Affine, GroupBy::Event).unwrap();
        let complete = rows.iter().filter(|(_, a, b)| a.is_some() && b.is_some()).count();
        if let Some(c) = pooled[0].cells[0][1] {
            prop_assert_eq!(c.n_points, complete);
        }
        let grouped: usize = groups.iter().filter_map(|g| g.cells[0][1]).map(|c| c.n_points).sum();
        let counted: usize = groups
            .iter()
            .filter(|g| g.cells[0][1].is_some())
            .map(|g| sets.iter().filter(|s| s.event_id == g.group && s.t_ms.is_some() && s.t_c.is_some()).count())
            .sum();
        prop_assert_eq!(grouped, counted);
        prop_assert!(grouped <= complete);
    }

    #[test]
    fn catalog_ignores_row_order(perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let events = vec![
            Event { id: "e1".into(), date: "1986-08-30".into(), mw: 7.1, depth_km: 133.0 },
            Event { id: "e2".into(), date: "1990-05-30".into(), mw: 6.9, depth_km: 91.0 },
        ];
        let stations = vec![
            Station { code: "A".into(), name: "a".into(), lat: 44.0, lon: 26.0 },
            Station { code: "B".into(), name: "b".into(), lat: 45.0, lon: 27.0 },
        ];
        let records: Vec<RecordEntry> = (0..6)
            .map(|i| RecordEntry {
                record_id: format!("r{i}"),
                event_id: format!("e{}", 1 + i % 2),
                station_code: ["A", "B"][i / 3].into(),
                component: Component::H1,
                path: format!("r{i}.txt"),
                units: Units::MetersPerSecond2,
            })
            .collect();
        let shuffled: Vec<RecordEntry> = perm.iter().map(|i| records[*i].clone()).collect();
        let mut ev_rev = events.clone();
        ev_rev.reverse();
        let a = Catalog::from_rows("root", events, stations.clone(), records).unwrap();
        let b = Catalog::from_rows("root", ev_rev, stations, shuffled).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn synth_is_bit_reproducible(seed in any::<u64>(), fn_hz in 0.5..5.0f64) {
        let spec = SynthSpec {
            dt: 0.01,
            duration: 20.0,
            kind: SynthKind::FilteredNoise { natural_frequency: fn_hz, damping: 0.2, rms: 1.0, seed },
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        prop_assert!(a.samples().iter().zip(b.samples()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
