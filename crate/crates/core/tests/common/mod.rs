//! Shared helpers for the integration suites: signal builders and an
//! independent brute-force SDOF integrator.

#![allow(dead_code)]

use std::f64::consts::PI;

use quakespec::response::substeps;
use quakespec::synth::{generate, SynthKind, SynthSpec};
use quakespec::Accelerogram;

pub fn sine(f0: f64, amplitude: f64, dt: f64, duration: f64) -> Accelerogram {
    let n = (duration / dt).round() as usize;
    let xs = (0..n)
        .map(|i| amplitude * (2.0 * PI * f0 * i as f64 * dt).sin())
        .collect();
    Accelerogram::new(dt, xs, format!("sine {f0} Hz")).unwrap()
}

pub fn band_noise(f_lo: f64, f_hi: f64, seed: u64, dt: f64, duration: f64) -> Accelerogram {
    generate(&SynthSpec {
        dt,
        duration,
        kind: SynthKind::BandNoise {
            f_lo,
            f_hi,
            rms: 1.0,
            seed,
        },
    })
    .unwrap()
}

/// Peak responses and final input energy from the explicit central-difference
/// scheme.
#[derive(Debug, Clone, Copy)]
pub struct OraclePeaks {
    pub sd: f64,
    pub sv: f64,
    pub sa: f64,
    pub ei: f64,
}

/// Brute-force SDOF integration of `ü + 2ζωu̇ + ω²u = −a_g` with the
/// central-difference scheme on a fine grid, the ground acceleration being
/// linearly interpolated between samples.
///
/// The fine step satisfies `h/T <= max_ratio`. Peaks are read at the same
/// evaluation instants the library uses (samples, or its sub-steps), so the
/// comparison measures integration error only, not peak sampling.
pub fn central_difference(acc: &Accelerogram, period: f64, zeta: f64, max_ratio: f64) -> OraclePeaks {
    let dt = acc.dt();
    let xs = acc.samples();
    let eval = substeps(dt, period);
    let per_eval = ((dt / eval as f64) / (max_ratio * period)).ceil().max(1.0) as usize;
    let fine = eval * per_eval;
    let h = dt / fine as f64;
    let w = 2.0 * PI / period;

    let ground = |k: usize| -> f64 {
        let i = k / fine;
        let r = (k % fine) as f64 / fine as f64;
        if i + 1 < xs.len() {
            xs[i] + (xs[i + 1] - xs[i]) * r
        } else {
            xs[xs.len() - 1]
        }
    };
    let total = (xs.len() - 1) * fine;

    // u_{-1} from the Taylor start with u0 = v0 = 0.
    let a0 = -ground(0);
    let mut u_prev = 0.5 * h * h * a0;
    let mut u = 0.0;
    let lhs = 1.0 / (h * h) + zeta * w / h;
    let c_prev = 1.0 / (h * h) - zeta * w / h;
    let c_cur = w * w - 2.0 / (h * h);

    let mut out = OraclePeaks {
        sd: 0.0,
        sv: 0.0,
        sa: 0.0,
        ei: 0.0,
    };
    let mut energy = 0.0;
    let mut v_last = 0.0;
    for k in 0..total {
        let u_next = (-ground(k) - c_cur * u - c_prev * u_prev) / lhs;
        let v = (u_next - u_prev) / (2.0 * h);
        if k > 0 {
            energy -= 0.5 * h * (ground(k - 1) * v_last + ground(k) * v);
            if k % per_eval == 0 {
                out.sd = out.sd.max(u.abs());
                out.sv = out.sv.max(v.abs());
                out.sa = out.sa.max((2.0 * zeta * w * v + w * w * u).abs());
            }
        }
        v_last = v;
        u_prev = u;
        u = u_next;
    }
    // the last instant needs one extra step for its central velocity
    let u_next = (-ground(total) - c_cur * u - c_prev * u_prev) / lhs;
    let v = (u_next - u_prev) / (2.0 * h);
    energy -= 0.5 * h * (ground(total - 1) * v_last + ground(total) * v);
    out.sd = out.sd.max(u.abs());
    out.sv = out.sv.max(v.abs());
    out.sa = out.sa.max((2.0 * zeta * w * v + w * w * u).abs());
    out.ei = energy.abs();
    out
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

pub fn log_periods(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (n - 1) as f64))
        .collect()
}
