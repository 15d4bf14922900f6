//! Embedding of 1-D periodic signals on the unit circle through the phase
//! of the analytic signal.
//!
//! The analytic signal is computed by the frequency-domain method: forward
//! FFT, zero the negative-frequency bins, double the positive ones (DC and,
//! for even lengths, Nyquist keep unit weight), inverse FFT. The input is
//! mean-centred first, since the phase of a signal riding on a large offset
//! carries no information.

pub mod gait;

use std::fs::File;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};

pub const MIN_SERIES_LEN: usize = 4;

/// Below this modulus the phase of `Z(t)` is considered undefined.
pub const PHASE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    /// Samples per cycle, when known (e.g. 101 for normalized gait cycles).
    pub cycle_length: Option<usize>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_SERIES_LEN {
            return Err(Error::SeriesTooShort { len: samples.len(), min: MIN_SERIES_LEN });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(TimeSeries { samples, cycle_length: None })
    }

    pub fn with_cycle_length(mut self, cycle_length: usize) -> Self {
        self.cycle_length = Some(cycle_length);
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn detrended(&self) -> Vec<f64> {
        let m = self.mean();
        self.samples.iter().map(|v| v - m).collect()
    }
}

/// `Z(t) = A(t) + i H(A)(t)` of the mean-centred series.
pub fn analytic_signal(series: &TimeSeries) -> Vec<Point> {
    let n = series.len();
    let mut buffer: Vec<Complex64> = series.detrended().into_iter().map(|v| Complex64::new(v, 0.0)).collect();

    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buffer);

    let half = n / 2;
    for (k, bin) in buffer.iter_mut().enumerate() {
        let weight = if k == 0 || (n % 2 == 0 && k == half) {
            1.0
        } else if k <= (n - 1) / 2 {
            2.0
        } else {
            0.0
        };
        *bin *= weight;
    }

    planner.plan_fft_inverse(n).process(&mut buffer);
    let scale = 1.0 / n as f64;
    buffer.into_iter().map(|z| Point::new(z.re * scale, z.im * scale)).collect()
}

/// `arg Z(t)` in `(−π, π]`.
pub fn instantaneous_phase(signal: &[Point]) -> Result<Vec<f64>> {
    signal
        .iter()
        .enumerate()
        .map(|(index, z)| {
            if z.norm() < PHASE_EPSILON {
                return Err(Error::DegeneratePhase { index });
            }
            let phase = z.arg();
            Ok(if phase <= -std::f64::consts::PI { std::f64::consts::PI } else { phase })
        })
        .collect()
}

/// `t ↦ exp(i φ(t))`: one unit-norm point per sample.
pub fn phase_embed(series: &TimeSeries) -> Result<PointCloud> {
    let phases = instantaneous_phase(&analytic_signal(series))?;
    PointCloud::new(phases.into_iter().map(|phi| Point::from_polar(1.0, phi)).collect())
}

/// Pointwise mean of equal-length series.
pub fn average_cycles(series: &[TimeSeries]) -> Result<TimeSeries> {
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidConfig("no series to average".into()))?;
    let len = first.len();
    let mut acc = vec![0.0; len];
    for s in series {
        if s.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: s.len() });
        }
        for (a, v) in acc.iter_mut().zip(s.samples()) {
            *a += v;
        }
    }
    let count = series.len() as f64;
    let mut out = TimeSeries::new(acc.into_iter().map(|a| a / count).collect())?;
    out.cycle_length = first.cycle_length;
    Ok(out)
}

/// A named column of a series CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub name: String,
    pub series: TimeSeries,
}

/// Reads a headed CSV whose every column is one series (a single `value`
/// column is the common case).
pub fn read_series_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<NamedSeries>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = r
        .headers()
        .map_err(|e| Error::parse(origin, 1, e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().any(str::is_empty) {
        return Err(Error::parse(origin, 1, "missing or empty column header"));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for record in r.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(origin, line, format!("bad number `{field}`")))?;
            if !v.is_finite() {
                return Err(Error::parse(origin, line, "non-finite sample"));
            }
            col.push(v);
        }
    }
    headers
        .iter()
        .zip(columns)
        .map(|(name, samples)| {
            let series = TimeSeries::new(samples).map_err(|e| Error::parse(origin, 1, format!("column `{name}`: {e}")))?;
            Ok(NamedSeries { name: name.to_string(), series })
        })
        .collect()
}

pub fn load_series_csv(path: impl AsRef<Path>) -> Result<Vec<NamedSeries>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_series_csv(std::io::BufReader::new(file), path)
}
