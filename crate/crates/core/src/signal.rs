//! Grid signals, Rayleigh-regularity geometry, the low-pass measurement
//! operator, and noise injection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wrap-around distance on the circle [0, 1).
pub fn wrap_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Nonnegative amplitudes on an even N-point grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSignal {
    n: usize,
    values: Vec<f64>,
}

impl GridSignal {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidArgument {
                name: "n",
                reason: format!("grid size must be even and positive, got {n}"),
            });
        }
        if values.len() != n {
            return Err(Error::LengthMismatch {
                name: "values",
                expected: n,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidArgument {
                name: "values",
                reason: format!("amplitudes must be nonnegative, found {v}"),
            });
        }
        Ok(Self { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Indices with positive amplitude, as a support set.
    pub fn support(&self) -> SupportSet {
        let points = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(m, _)| m)
            .collect();
        SupportSet {
            n: self.n,
            indices: points,
        }
    }
}

/// Sorted support on the N-grid, interpreted as positions m/N on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    n: usize,
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&m) = indices.iter().find(|&&m| m >= n) {
            return Err(Error::InvalidArgument {
                name: "indices",
                reason: format!("index {m} outside grid of size {n}"),
            });
        }
        Ok(Self { n, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Positions on the circle, sorted increasing.
    pub fn positions(&self) -> Vec<f64> {
        self.indices
            .iter()
            .map(|m| *m as f64 / self.n as f64)
            .collect()
    }

    /// Smallest pairwise wrap-around distance (None for fewer than 2 points).
    pub fn min_separation(&self) -> Option<f64> {
        let pos = self.positions();
        if pos.len() < 2 {
            return None;
        }
        let mut min = f64::INFINITY;
        for i in 0..pos.len() {
            let next = pos[(i + 1) % pos.len()];
            min = min.min(wrap_dist(pos[i], next));
        }
        Some(min)
    }
}

/// A Rayleigh-regularity query: window length `d` and multiplicity `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighQuery {
    pub d: f64,
    pub r: usize,
}

impl RayleighQuery {
    pub fn new(d: f64, r: usize) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidArgument {
                name: "d",
                reason: format!("window length must lie in (0, 1), got {d}"),
            });
        }
        if r == 0 {
            return Err(Error::InvalidArgument {
                name: "r",
                reason: "multiplicity must be at least 1".into(),
            });
        }
        Ok(Self { d, r })
    }
}

/// A wrap-around window that contains more than `r` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowViolation {
    pub start: f64,
    pub length: f64,
    pub count: usize,
}

/// Result of a Rayleigh-regularity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighReport {
    pub regular: bool,
    /// Round-robin partition (positions), present when the check succeeds.
    pub partition: Option<Vec<Vec<f64>>>,
    /// Witness window when the necessary window condition fails.
    pub window_violation: Option<WindowViolation>,
}

/// Checks that every subset of the round-robin partition (points taken r
/// apart in sorted order) has all cyclic gaps strictly larger than `d`.
fn round_robin_partition(positions: &[f64], d: f64, r: usize) -> Option<Vec<Vec<f64>>> {
    let mut partition: Vec<Vec<f64>> = vec![Vec::new(); r];
    for (i, p) in positions.iter().enumerate() {
        partition[i % r].push(*p);
    }
    for class in &partition {
        if class.len() < 2 {
            continue;
        }
        for i in 0..class.len() {
            let next = class[(i + 1) % class.len()];
            // A closed window of length d must not catch two points.
            if wrap_dist(class[i], next) <= d {
                return None;
            }
        }
    }
    Some(partition)
}

/// Decides membership in the Rayleigh class R(d, r).
///
/// The necessary window condition (every wrap-around interval of length d
/// holds at most r points) is reported with a witness on failure; membership
/// itself is decided by the constructive round-robin partition, which is the
/// partition all downstream constructions use.
pub fn check_rayleigh(supp: &SupportSet, q: RayleighQuery) -> RayleighReport {
    let positions = supp.positions();
    let s = positions.len();
    if s <= 1 {
        let mut partition = vec![Vec::new(); q.r];
        if s == 1 {
            partition[0].push(positions[0]);
        }
        return RayleighReport {
            regular: true,
            partition: Some(partition),
            window_violation: None,
        };
    }

    // Necessary condition: slide a closed window of length d starting at
    // each point and count members.
    for i in 0..s {
        let start = positions[i];
        let mut count = 0;
        for j in 0..s {
            let fwd = (positions[j] - start).rem_euclid(1.0);
            if fwd <= q.d {
                count += 1;
            }
        }
        if count > q.r {
            return RayleighReport {
                regular: false,
                partition: None,
                window_violation: Some(WindowViolation {
                    start,
                    length: q.d,
                    count,
                }),
            };
        }
    }

    match round_robin_partition(&positions, q.d, q.r) {
        Some(partition) => RayleighReport {
            regular: true,
            partition: Some(partition),
            window_violation: None,
        },
        None => RayleighReport {
            regular: false,
            partition: None,
            window_violation: None,
        },
    }
}

/// Ideal low-pass projection determined by (N, flo), applied via the DFT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowPassOperator {
    n: usize,
    flo: usize,
}

impl LowPassOperator {
    pub fn new(n: usize, flo: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidArgument {
                name: "n",
                reason: format!("grid size must be even and positive, got {n}"),
            });
        }
        if flo < 1 || 2 * flo >= n {
            return Err(Error::InvalidArgument {
                name: "flo",
                reason: format!("need 1 <= flo < n/2, got flo={flo}, n={n}"),
            });
        }
        Ok(Self { n, flo })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flo(&self) -> usize {
        self.flo
    }

    /// Native resolution 1/flo.
    pub fn lambda_lo(&self) -> f64 {
        1.0 / self.flo as f64
    }
}

/// Applies the projection: DFT, zero all bins with |k| > flo, inverse DFT.
pub fn apply_lowpass(op: &LowPassOperator, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != op.n {
        return Err(Error::LengthMismatch {
            name: "x",
            expected: op.n,
            got: x.len(),
        });
    }
    let mut workspace = LowPassWorkspace::new(op);
    Ok(workspace.apply(x))
}

/// Reusable FFT plan and buffer for repeated applications of Q.
pub struct LowPassWorkspace {
    n: usize,
    flo: usize,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buf: Vec<Complex64>,
}

impl LowPassWorkspace {
    pub fn new(op: &LowPassOperator) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n: op.n,
            flo: op.flo,
            fft: planner.plan_fft_forward(op.n),
            ifft: planner.plan_fft_inverse(op.n),
            buf: vec![Complex64::new(0.0, 0.0); op.n],
        }
    }

    pub fn apply(&mut self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        for (b, v) in self.buf.iter_mut().zip(x) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fft.process(&mut self.buf);
        for k in 0..self.n {
            let signed = if k <= self.n / 2 {
                k as i64
            } else {
                k as i64 - self.n as i64
            };
            if signed.unsigned_abs() as usize > self.flo {
                self.buf[k] = Complex64::new(0.0, 0.0);
            }
        }
        self.ifft.process(&mut self.buf);
        let scale = 1.0 / self.n as f64;
        self.buf.iter().map(|c| c.re * scale).collect()
    }
}

/// Super-resolution factor SRF = (1/flo) / lhi.
pub fn srf(flo: usize, lhi: f64) -> Result<f64> {
    let llo = 1.0 / flo as f64;
    if !(lhi > 0.0 && lhi < llo) {
        return Err(Error::InvalidArgument {
            name: "lhi",
            reason: format!("need 0 < lhi < 1/flo = {llo}, got {lhi}"),
        });
    }
    Ok(llo / lhi)
}

/// Discrete super-resolution factor DSRF = N / (2 flo).
pub fn dsrf(n: usize, flo: usize) -> f64 {
    n as f64 / (2.0 * flo as f64)
}

/// Validates the target-resolution window 1/N <= lhi < 1/flo of the theory.
pub fn validate_lhi(n: usize, flo: usize, lhi: f64) -> Result<()> {
    let llo = 1.0 / flo as f64;
    let min = 1.0 / n as f64;
    if lhi < min - 1e-15 || lhi >= llo {
        return Err(Error::InvalidArgument {
            name: "lhi",
            reason: format!("need 1/N = {min} <= lhi < 1/flo = {llo}, got {lhi}"),
        });
    }
    Ok(())
}

/// Noise models for the measurement y = Qx + z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Random direction scaled to an exact l1 norm.
    L1Budget { level: f64 },
    /// Independent centered Gaussian entries with standard deviation `level`.
    Gaussian { level: f64 },
}

/// Adds noise to a measurement; returns (y + z, z, ||z||_1).
pub fn add_noise(y: &[f64], model: NoiseModel, rng_seed: u64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let level = match model {
        NoiseModel::L1Budget { level } | NoiseModel::Gaussian { level } => level,
    };
    if level < 0.0 {
        return Err(Error::InvalidArgument {
            name: "level",
            reason: format!("noise level must be nonnegative, got {level}"),
        });
    }
    let n = y.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut z = vec![0.0; n];
    match model {
        NoiseModel::L1Budget { level } => {
            if level > 0.0 {
                for v in z.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let l1: f64 = z.iter().map(|v| v.abs()).sum();
                if l1 == 0.0 {
                    z[0] = level;
                } else {
                    let s = level / l1;
                    for v in z.iter_mut() {
                        *v *= s;
                    }
                }
            }
        }
        NoiseModel::Gaussian { level } => {
            // Box-Muller keeps the dependency surface small and the stream
            // reproducible byte for byte.
            let mut i = 0;
            while i < n {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
                z[i] = level * r * c;
                i += 1;
                if i < n {
                    z[i] = level * r * s;
                    i += 1;
                }
            }
        }
    }
    let z_l1: f64 = z.iter().map(|v| v.abs()).sum();
    let y_noisy = y.iter().zip(&z).map(|(a, b)| a + b).collect();
    Ok((y_noisy, z, z_l1))
}

/// Serializable record for signals and their supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub n: usize,
    pub flo: usize,
    pub support_indices: Vec<usize>,
    pub amplitudes: Vec<f64>,
}

impl SignalRecord {
    pub fn from_signal(signal: &GridSignal, flo: usize) -> Self {
        let support = signal.support();
        let amplitudes = support
            .indices()
            .iter()
            .map(|m| signal.values()[*m])
            .collect();
        Self {
            n: signal.n(),
            flo,
            support_indices: support.indices().to_vec(),
            amplitudes,
        }
    }

    pub fn to_signal(&self) -> Result<GridSignal> {
        let mut values = vec![0.0; self.n];
        if self.support_indices.len() != self.amplitudes.len() {
            return Err(Error::LengthMismatch {
                name: "amplitudes",
                expected: self.support_indices.len(),
                got: self.amplitudes.len(),
            });
        }
        for (m, a) in self.support_indices.iter().zip(&self.amplitudes) {
            if *m >= self.n {
                return Err(Error::InvalidArgument {
                    name: "support_indices",
                    reason: format!("index {m} outside grid of size {}", self.n),
                });
            }
            values[*m] = *a;
        }
        GridSignal::new(self.n, values)
    }
}

/// Draws a signal whose support lies in R(kappa_mult * llo * r, r) with
/// pairwise separation at least `min_sep_hi`, and uniform amplitudes.
///
/// Deterministic given the seed. Fails explicitly after 10 * spikes retries.
#[allow(clippy::too_many_arguments)]
pub fn generate_signal(
    rng_seed: u64,
    n: usize,
    flo: usize,
    r: usize,
    spikes: usize,
    kappa_mult: f64,
    min_sep_hi: f64,
    amplitude_range: (f64, f64),
) -> Result<(GridSignal, SupportSet)> {
    let op = LowPassOperator::new(n, flo)?;
    if spikes == 0 {
        return Ok((GridSignal::zeros(n)?, SupportSet::new(n, vec![])?));
    }
    let (lo, hi) = amplitude_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument {
            name: "amplitude_range",
            reason: format!("need 0 < lo <= hi, got ({lo}, {hi})"),
        });
    }
    let d = kappa_mult * op.lambda_lo() * r as f64;
    let query = RayleighQuery::new(d, r)?;
    let min_sep = min_sep_hi.max(1.0 / n as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let max_attempts = 10 * spikes;
    for _attempt in 1..=max_attempts {
        // Guided placement: draw indices one by one, keeping the necessary
        // window condition and the pairwise separation satisfiable.
        let mut chosen: Vec<usize> = Vec::with_capacity(spikes);
        let mut ok = true;
        'placing: for _ in 0..spikes {
            for _ in 0..64 {
                let cand = rng.gen_range(0..n);
                if chosen.contains(&cand) {
                    continue;
                }
                let pos = cand as f64 / n as f64;
                let sep_ok = chosen
                    .iter()
                    .all(|m| wrap_dist(*m as f64 / n as f64, pos) >= min_sep);
                if !sep_ok {
                    continue;
                }
                let mut trial = chosen.clone();
                trial.push(cand);
                let supp = SupportSet::new(n, trial)?;
                // Necessary window condition only; the full partition check
                // runs once at the end.
                let mut window_ok = true;
                let positions = supp.positions();
                for start in &positions {
                    let count = positions
                        .iter()
                        .filter(|p| (**p - *start).rem_euclid(1.0) <= d)
                        .count();
                    if count > r {
                        window_ok = false;
                        break;
                    }
                }
                if window_ok {
                    chosen.push(cand);
                    continue 'placing;
                }
            }
            ok = false;
            break;
        }
        if !ok {
            continue;
        }
        let supp = SupportSet::new(n, chosen.clone())?;
        if !check_rayleigh(&supp, query).regular {
            continue;
        }
        if let Some(sep) = supp.min_separation() {
            if sep < min_sep {
                continue;
            }
        }
        let mut values = vec![0.0; n];
        for m in supp.indices() {
            values[*m] = rng.gen_range(lo..=hi);
        }
        let signal = GridSignal::new(n, values)?;
        return Ok((signal, supp));
    }
    Err(Error::InfeasibleGeometry {
        attempts: max_attempts,
        detail: format!(
            "{spikes} spikes on an {n}-grid with window d={d:.4}, r={r}, min separation {min_sep:.4}"
        ),
    })
}
