//! Ground motions: synthetic records, baseline-corrected integration,
//! elastic response spectra, and the fixed 31-entry intensity-measure vector.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{FeatureAxis, FeatureTable};
use crate::linalg::Dense;
use crate::seed;
use crate::structsim::{sdof_peak_displacement, sdof_response};
use crate::{Error, Result};

/// Standard gravity, m/s^2.
pub const G: f64 = 9.80665;
/// Largest time step a record may carry.
pub const MAX_DT: f64 = 0.02;
/// Damping ratio for every spectral quantity.
pub const SPECTRAL_DAMPING: f64 = 0.05;
/// Number of modal periods the IM vector samples.
pub const MODAL_PERIODS: usize = 5;

/// Uniformly sampled ground acceleration, m/s^2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundMotionRecord {
    id: String,
    dt: f64,
    accel: Vec<f64>,
}

impl GroundMotionRecord {
    pub fn new(id: impl Into<String>, dt: f64, accel: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(Error::invalid(alloc::format!("record dt {dt} outside (0, {MAX_DT}]")));
        }
        if accel.len() < 2 {
            return Err(Error::invalid("a record needs at least two samples"));
        }
        if let Some(k) = accel.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 1 });
        }
        Ok(GroundMotionRecord { id: id.into(), dt, accel })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn accel(&self) -> &[f64] {
        &self.accel
    }

    pub fn len(&self) -> usize {
        self.accel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accel.is_empty()
    }

    pub fn duration(&self) -> f64 {
        (self.accel.len() - 1) as f64 * self.dt
    }

    pub fn pga(&self) -> f64 {
        self.accel.iter().fold(0.0, |m, a| m.max(libm::fabs(*a)))
    }

    /// Same record with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        GroundMotionRecord {
            id: self.id.clone(),
            dt: self.dt,
            accel: self.accel.iter().map(|a| a * factor).collect(),
        }
    }
}

/// Parameters of a filtered, enveloped white-noise record.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GmSynthParams {
    /// Record length, s.
    pub duration: f64,
    /// Envelope peak time as a fraction of `duration`, in (0, 1).
    pub peak_time_fraction: f64,
    /// Envelope shape exponent; larger values give a sharper build-up.
    pub envelope_shape: f64,
    /// Centre frequency of the band-pass filter, Hz.
    pub filter_frequency: f64,
    /// Filter damping ratio in (0, 1); bandwidth grows with it.
    pub filter_damping: f64,
    /// Peak ground acceleration after rescaling, m/s^2.
    pub target_pga: f64,
    pub dt: f64,
    pub seed: u64,
}

impl Default for GmSynthParams {
    fn default() -> Self {
        GmSynthParams {
            duration: 20.0,
            peak_time_fraction: 0.25,
            envelope_shape: 2.0,
            filter_frequency: 2.0,
            filter_damping: 0.4,
            target_pga: 2.0,
            dt: 0.01,
            seed: 0,
        }
    }
}

impl GmSynthParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.duration > 0.0
            && self.peak_time_fraction > 0.0
            && self.peak_time_fraction < 1.0
            && self.envelope_shape > 0.0
            && self.filter_frequency > 0.0
            && self.filter_damping > 0.0
            && self.filter_damping < 1.0
            && self.target_pga >= 0.0
            && self.target_pga.is_finite()
            && self.dt > 0.0
            && self.dt <= MAX_DT
            && self.filter_frequency < 0.5 / self.dt;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(alloc::format!("invalid synthesis parameters {self:?}")))
        }
    }
}

/// Seeded Gaussian white noise through a second-order band-pass filter,
/// shaped by `e(t) = (t/tp)^c exp(c (1 - t/tp))` (unit peak at `tp`), then
/// rescaled so the peak absolute value equals `target_pga`.
pub fn synth_record(id: impl Into<String>, params: &GmSynthParams) -> Result<GroundMotionRecord> {
    params.validate()?;
    let n = libm::round(params.duration / params.dt) as usize + 1;
    let mut rng = seed::rng(params.seed);
    let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();

    // Band-pass biquad (constant peak gain), bilinear transform.
    let w0 = 2.0 * PI * params.filter_frequency * params.dt;
    let alpha = libm::sin(w0) * params.filter_damping;
    let a0 = 1.0 + alpha;
    let (b0, b2) = (alpha / a0, -alpha / a0);
    let (a1, a2) = (-2.0 * libm::cos(w0) / a0, (1.0 - alpha) / a0);
    let mut filtered = vec![0.0; n];
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    for (k, &x) in noise.iter().enumerate() {
        let y = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
        filtered[k] = y;
        x2 = x1;
        x1 = x;
        y2 = y1;
        y1 = y;
    }

    let tp = params.peak_time_fraction * params.duration;
    let c = params.envelope_shape;
    for (k, a) in filtered.iter_mut().enumerate() {
        let r = k as f64 * params.dt / tp;
        *a *= libm::pow(r, c) * libm::exp(c * (1.0 - r));
    }
    let peak = filtered.iter().fold(0.0f64, |m, a| m.max(libm::fabs(*a)));
    let accel = if peak > 0.0 && params.target_pga > 0.0 {
        let s = params.target_pga / peak;
        filtered.iter().map(|a| a * s).collect()
    } else {
        vec![0.0; n]
    };
    GroundMotionRecord::new(id, params.dt, accel)
}

/// Mean-detrended acceleration and its trapezoidal integrals (velocity m/s,
/// displacement m) with zero initial conditions.
pub fn integrate_record(record: &GroundMotionRecord) -> (Vec<f64>, Vec<f64>) {
    let a = detrended(record);
    let v = cumulative_trapezoid(&a, record.dt());
    let d = cumulative_trapezoid(&v, record.dt());
    (v, d)
}

fn detrended(record: &GroundMotionRecord) -> Vec<f64> {
    let n = record.len() as f64;
    let mean = record.accel().iter().sum::<f64>() / n;
    record.accel().iter().map(|a| a - mean).collect()
}

fn cumulative_trapezoid(y: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in y.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn trapezoid(y: &[f64], dt: f64) -> f64 {
    y.windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum()
}

/// Spectral ordinates at one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOrdinate {
    pub period: f64,
    /// Pseudo-spectral acceleration, m/s^2.
    pub psa: f64,
    /// Pseudo-spectral velocity, m/s.
    pub psv: f64,
    /// Spectral displacement, m.
    pub sd: f64,
}

/// Elastic response spectrum by Newmark average acceleration.
pub fn response_spectrum(record: &GroundMotionRecord, periods: &[f64], damping: f64) -> Result<Vec<SpectralOrdinate>> {
    if !(0.0..=0.5).contains(&damping) {
        return Err(Error::invalid(alloc::format!("damping {damping} outside [0, 0.5]")));
    }
    periods
        .iter()
        .map(|&t| {
            if !(t >= 4.0 * record.dt()) {
                return Err(Error::invalid(alloc::format!(
                    "period {t} s is shorter than 4 dt = {} s",
                    4.0 * record.dt()
                )));
            }
            let sd = sdof_peak_displacement(record.accel(), record.dt(), t, damping);
            let w = 2.0 * PI / t;
            Ok(SpectralOrdinate {
                period: t,
                psa: w * w * sd,
                psv: w * sd,
                sd,
            })
        })
        .collect()
}

/// Relative displacement history of a linear oscillator under the record.
pub fn sdof_history(record: &GroundMotionRecord, period: f64, damping: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(record.len());
    sdof_response(record.accel(), record.dt(), period, damping, |u| out.push(u));
    out
}

/// Period band for acceleration spectrum intensity, s.
pub const ASI_BAND: (f64, f64) = (0.1, 0.5);
/// Period band for velocity and displacement spectrum intensity, s.
pub const VSI_BAND: (f64, f64) = (0.1, 2.5);
const ASI_STEP: f64 = 0.02;
const VSI_STEP: f64 = 0.05;
/// Band-mean spectral ordinate over this factor gives EPA and EPV.
const EFFECTIVE_PEAK_DIVISOR: f64 = 2.5;

/// Names of the intensity measures, in vector order.
pub const IM_NAMES: [&str; 31] = [
    "pga",
    "pgv",
    "pgd",
    "rms_accel",
    "rms_vel",
    "rms_disp",
    "arias_intensity",
    "significant_duration_5_95",
    "cav",
    "cad",
    "psa_t1",
    "psa_t2",
    "psa_t3",
    "psa_t4",
    "psa_t5",
    "psv_t1",
    "psv_t2",
    "psv_t3",
    "psv_t4",
    "psv_t5",
    "sd_t1",
    "sd_t2",
    "sd_t3",
    "sd_t4",
    "sd_t5",
    "asi",
    "vsi",
    "dsi",
    "epa",
    "epv",
    "mean_period_zero_crossing",
];

/// Index of each entry of [`IM_NAMES`].
pub mod im {
    pub const PGA: usize = 0;
    pub const PGV: usize = 1;
    pub const PGD: usize = 2;
    pub const RMS_ACCEL: usize = 3;
    pub const RMS_VEL: usize = 4;
    pub const RMS_DISP: usize = 5;
    pub const ARIAS: usize = 6;
    pub const D5_95: usize = 7;
    pub const CAV: usize = 8;
    pub const CAD: usize = 9;
    pub const PSA: usize = 10;
    pub const PSV: usize = 15;
    pub const SD: usize = 20;
    pub const ASI: usize = 25;
    pub const VSI: usize = 26;
    pub const DSI: usize = 27;
    pub const EPA: usize = 28;
    pub const EPV: usize = 29;
    pub const MEAN_PERIOD: usize = 30;
}

/// The 31 intensity measures of one record, ordered as [`IM_NAMES`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImVector(pub [f64; 31]);

impl ImVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }
}

fn period_grid(band: (f64, f64), step: f64) -> Vec<f64> {
    let n = libm::round((band.1 - band.0) / step) as usize;
    (0..=n).map(|k| band.0 + k as f64 * step).collect()
}

fn integrate_over_periods(grid: &[f64], values: impl Fn(&SpectralOrdinate) -> f64, spec: &[SpectralOrdinate]) -> f64 {
    grid.windows(2)
        .zip(spec.windows(2))
        .map(|(t, s)| 0.5 * (t[1] - t[0]) * (values(&s[0]) + values(&s[1])))
        .sum()
}

fn rms(y: &[f64]) -> f64 {
    libm::sqrt(y.iter().map(|x| x * x).sum::<f64>() / y.len() as f64)
}

fn peak(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
}

/// Time at which a non-decreasing cumulative curve first reaches `level`,
/// linearly interpolated between samples.
fn crossing_time(cum: &[f64], level: f64, dt: f64) -> f64 {
    for k in 1..cum.len() {
        if cum[k] >= level {
            let span = cum[k] - cum[k - 1];
            let frac = if span > 0.0 { (level - cum[k - 1]) / span } else { 0.0 };
            return (k as f64 - 1.0 + frac) * dt;
        }
    }
    (cum.len() - 1) as f64 * dt
}

/// Mean zero-crossing period: twice the mean interval between successive
/// sign changes of the detrended acceleration (0 with fewer than two).
fn mean_zero_crossing_period(a: &[f64], dt: f64) -> f64 {
    let mut first = None;
    let mut last = 0.0;
    let mut count = 0usize;
    for k in 1..a.len() {
        if a[k - 1] * a[k] < 0.0 {
            let t = (k as f64 - 1.0 + a[k - 1] / (a[k - 1] - a[k])) * dt;
            first.get_or_insert(t);
            last = t;
            count += 1;
        }
    }
    match first {
        Some(t0) if count >= 2 => 2.0 * (last - t0) / (count - 1) as f64,
        _ => 0.0,
    }
}

/// Computes the 31 intensity measures. Spectral triples use the five modal
/// periods at 5% damping; spectrum intensities integrate over the fixed
/// period bands [`ASI_BAND`] and [`VSI_BAND`].
pub fn extract_ims(record: &GroundMotionRecord, modal_periods: &[f64]) -> Result<ImVector> {
    if modal_periods.len() != MODAL_PERIODS || modal_periods.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid(alloc::format!(
            "expected {MODAL_PERIODS} positive modal periods, got {modal_periods:?}"
        )));
    }
    let dt = record.dt();
    let a = record.accel();
    let (vel, disp) = integrate_record(record);
    let mut out = [0.0; 31];

    out[im::PGA] = peak(a);
    out[im::PGV] = peak(&vel);
    out[im::PGD] = peak(&disp);
    out[im::RMS_ACCEL] = rms(a);
    out[im::RMS_VEL] = rms(&vel);
    out[im::RMS_DISP] = rms(&disp);

    let a2: Vec<f64> = a.iter().map(|x| x * x).collect();
    let cum = cumulative_trapezoid(&a2, dt);
    let total = *cum.last().expect("record has samples");
    out[im::ARIAS] = PI / (2.0 * G) * total;
    out[im::D5_95] = if total > 0.0 {
        (crossing_time(&cum, 0.95 * total, dt) - crossing_time(&cum, 0.05 * total, dt)).max(0.0)
    } else {
        0.0
    };
    let abs_a: Vec<f64> = a.iter().map(|x| libm::fabs(*x)).collect();
    out[im::CAV] = trapezoid(&abs_a, dt);
    let abs_v: Vec<f64> = vel.iter().map(|x| libm::fabs(*x)).collect();
    out[im::CAD] = trapezoid(&abs_v, dt);

    let modal = response_spectrum(record, modal_periods, SPECTRAL_DAMPING)?;
    for (k, s) in modal.iter().enumerate() {
        out[im::PSA + k] = s.psa;
        out[im::PSV + k] = s.psv;
        out[im::SD + k] = s.sd;
    }

    let asi_grid = period_grid(ASI_BAND, ASI_STEP);
    let asi_spec = response_spectrum(record, &asi_grid, SPECTRAL_DAMPING)?;
    let vsi_grid = period_grid(VSI_BAND, VSI_STEP);
    let vsi_spec = response_spectrum(record, &vsi_grid, SPECTRAL_DAMPING)?;
    out[im::ASI] = integrate_over_periods(&asi_grid, |s| s.psa, &asi_spec);
    out[im::VSI] = integrate_over_periods(&vsi_grid, |s| s.psv, &vsi_spec);
    out[im::DSI] = integrate_over_periods(&vsi_grid, |s| s.sd, &vsi_spec);
    out[im::EPA] = out[im::ASI] / (ASI_BAND.1 - ASI_BAND.0) / EFFECTIVE_PEAK_DIVISOR;
    out[im::EPV] = out[im::VSI] / (VSI_BAND.1 - VSI_BAND.0) / EFFECTIVE_PEAK_DIVISOR;

    out[im::MEAN_PERIOD] = mean_zero_crossing_period(&detrended(record), dt);
    Ok(ImVector(out))
}

/// Stacks IM vectors into an `N x 31` feature table keyed by record id.
pub fn im_table(records: &[GroundMotionRecord], ims: &[ImVector]) -> Result<FeatureTable> {
    if records.len() != ims.len() {
        return Err(Error::dims(alloc::format!("{} IM vectors", records.len()), alloc::format!("{}", ims.len())));
    }
    let values = Dense::from_fn(ims.len(), 31, |i, j| ims[i].0[j]);
    FeatureTable::new(
        FeatureAxis::GroundMotion,
        values,
        records.iter().map(|r| String::from(r.id())).collect(),
        IM_NAMES.iter().map(|s| String::from(*s)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pga: f64, seed: u64) -> GmSynthParams {
        GmSynthParams { target_pga: pga, seed, ..GmSynthParams::default() }
    }

    fn modal() -> [f64; 5] {
        [0.62, 0.22, 0.14, 0.11, 0.09]
    }

    #[test]
    fn zero_pga_gives_zero_record() {
        let r = synth_record("z", &params(0.0, 4)).unwrap();
        assert!(r.accel().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn synthesis_is_seeded() {
        let a = synth_record("a", &params(2.0, 7)).unwrap();
        assert_eq!(a, synth_record("a", &params(2.0, 7)).unwrap());
        assert_ne!(a.accel(), synth_record("a", &params(2.0, 8)).unwrap().accel());
    }

    #[test]
    fn synthesis_hits_target_pga() {
        let r = synth_record("p", &params(3.0, 1)).unwrap();
        assert!((r.pga() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn record_validation() {
        assert!(GroundMotionRecord::new("x", 0.05, vec![0.0; 10]).is_err());
        assert!(GroundMotionRecord::new("x", 0.01, vec![0.0]).is_err());
        assert!(GroundMotionRecord::new("x", 0.01, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn integration_of_zero_and_constant() {
        let z = GroundMotionRecord::new("z", 0.01, vec![0.0; 100]).unwrap();
        let (v, d) = integrate_record(&z);
        assert!(v.iter().chain(&d).all(|&x| x == 0.0));
        let c = GroundMotionRecord::new("c", 0.01, vec![1.7; 100]).unwrap();
        let (v, _) = integrate_record(&c);
        assert!(v.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn sine_integrates_to_closed_form() {
        let dt = 1e-3;
        let accel: Vec<f64> = (0..=1000).map(|k| libm::sin(2.0 * PI * k as f64 * dt)).collect();
        let r = GroundMotionRecord::new("s", dt, accel).unwrap();
        let (v, _) = integrate_record(&r);
        let err = v
            .iter()
            .enumerate()
            .map(|(k, v)| (v - (1.0 - libm::cos(2.0 * PI * k as f64 * dt)) / (2.0 * PI)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn zero_record_zero_spectrum_and_ims() {
        let z = GroundMotionRecord::new("z", 0.01, vec![0.0; 500]).unwrap();
        let s = response_spectrum(&z, &[0.2, 1.0], 0.05).unwrap();
        assert!(s.iter().all(|o| o.psa == 0.0 && o.psv == 0.0 && o.sd == 0.0));
        let ims = extract_ims(&z, &modal()).unwrap();
        for idx in [im::PGA, im::PGV, im::PGD, im::ARIAS, im::CAV] {
            assert_eq!(ims.get(idx), 0.0);
        }
    }

    #[test]
    fn short_period_rejected() {
        let r = GroundMotionRecord::new("z", 0.01, vec![0.0; 50]).unwrap();
        assert!(response_spectrum(&r, &[0.039], 0.05).is_err());
        assert!(response_spectrum(&r, &[0.04], 0.05).is_ok());
        assert!(response_spectrum(&r, &[1.0], 0.6).is_err());
    }

    #[test]
    fn resonant_amplification() {
        // a_g = A sin(w t) at the oscillator frequency: steady-state
        // amplitude is (A / w^2) / (2 zeta).
        let (t, zeta, amp, dt) = (1.0, 0.05, 1.0, 0.005);
        let w = 2.0 * PI / t;
        let accel: Vec<f64> = (0..=(60.0 / dt) as usize).map(|k| amp * libm::sin(w * k as f64 * dt)).collect();
        let r = GroundMotionRecord::new("h", dt, accel).unwrap();
        let sd = response_spectrum(&r, &[t], zeta).unwrap()[0].sd;
        let expected = amp / (w * w) / (2.0 * zeta);
        assert!((sd / expected - 1.0).abs() < 0.05, "{sd} vs {expected}");
    }

    #[test]
    fn rigid_oscillator_tracks_pga() {
        // Content between 1 and 4 Hz, far below the 100 Hz oscillator.
        let dt = 0.001;
        let accel: Vec<f64> = (0..10_000)
            .map(|k| {
                let t = k as f64 * dt;
                let env = libm::sin(PI * t / 10.0);
                env * (libm::sin(2.0 * PI * t) + 0.6 * libm::sin(2.0 * PI * 2.7 * t + 0.4) + 0.3 * libm::sin(2.0 * PI * 4.0 * t))
            })
            .collect();
        let r = GroundMotionRecord::new("r", dt, accel).unwrap();
        let s = response_spectrum(&r, &[0.01], 0.05).unwrap()[0];
        assert!((s.psa / r.pga() - 1.0).abs() < 0.02, "{} vs {}", s.psa, r.pga());
    }

    #[test]
    fn arias_and_cav_closed_form() {
        let n = 100;
        let dt = 1.0 / n as f64;
        let accel: Vec<f64> = (0..=n).map(|k| if k % 2 == 0 { G } else { -G }).collect();
        let r = GroundMotionRecord::new("g", dt, accel).unwrap();
        let ims = extract_ims(&r, &modal()).unwrap();
        let ia = PI * G / 2.0;
        assert!((ims.get(im::ARIAS) - ia).abs() < 1e-10 * ia);
        assert!((ims.get(im::CAV) - G).abs() < 1e-10 * G);
    }

    #[test]
    fn scaling_laws_and_duration_bounds() {
        let r = synth_record("s", &params(1.5, 11)).unwrap();
        let r2 = r.scaled(2.0);
        let a = extract_ims(&r, &modal()).unwrap();
        let b = extract_ims(&r2, &modal()).unwrap();
        for k in (im::PSA..im::PSA + 15).chain([im::CAV, im::PGA, im::ASI, im::VSI, im::DSI]) {
            assert!((b.get(k) - 2.0 * a.get(k)).abs() <= 1e-9 * a.get(k).abs().max(1e-300), "{}", IM_NAMES[k]);
        }
        assert!((b.get(im::ARIAS) - 4.0 * a.get(im::ARIAS)).abs() <= 1e-9 * a.get(im::ARIAS));
        assert!((b.get(im::D5_95) - a.get(im::D5_95)).abs() < 1e-9);
        let d = a.get(im::D5_95);
        assert!(d >= 0.0 && d <= r.duration());
        assert!(a.as_slice().iter().all(|x| x.is_finite() && *x >= 0.0));
        assert_eq!(a, extract_ims(&r, &modal()).unwrap());
    }

    #[test]
    fn mean_period_of_pure_tone() {
        let dt = 0.01;
        let accel: Vec<f64> = (0..2000).map(|k| libm::sin(2.0 * PI * 0.5 * k as f64 * dt + 0.3)).collect();
        let r = GroundMotionRecord::new("t", dt, accel).unwrap();
        let ims = extract_ims(&r, &modal()).unwrap();
        assert!((ims.get(im::MEAN_PERIOD) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn im_names_are_unique() {
        let mut names = IM_NAMES.to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 31);
    }
}
