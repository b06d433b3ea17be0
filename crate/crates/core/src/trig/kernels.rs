use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TrigPoly;
use crate::error::{Error, Result};

/// Kernel selector used by reports and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Fejer kernel of cutoff `fhi` normalized to unit sum on the `n`-grid.
    Fejer { fhi: usize, n: usize },
    /// Fourth power of the sine ratio, cutoff `fc`, normalized so K(0) = 1.
    Fejer4 { fc: usize },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Fejer { fhi, n } => {
                if fhi < 1 || 2 * fhi > n {
                    return Err(Error::InvalidArgument {
                        name: "fhi",
                        reason: format!("need 1 <= fhi <= n/2, got fhi={fhi}, n={n}"),
                    });
                }
            }
            KernelSpec::Fejer4 { fc } => {
                if fc % 2 != 0 || fc < 4 {
                    return Err(Error::InvalidArgument {
                        name: "fc",
                        reason: format!("need even fc >= 4, got {fc}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// g(t) = sin(pi n t) / (n sin(pi t)) together with g' and g''.
///
/// The ratio is evaluated in closed form away from integers; near integers
/// (where both sines vanish) it falls back to the exact finite cosine-sum
/// representation of g^2, which has no cancellation there.
pub(crate) fn sine_ratio_derivs(t: f64, n: usize) -> (f64, f64, f64) {
    let nf = n as f64;
    if n == 1 {
        return (1.0, 0.0, 0.0);
    }
    let m = t.round();
    let u = t - m;
    // g(t) = +/- g(u); the sign cancels in every even-power use and is
    // irrelevant for the kernels, but keep it for correctness.
    let sign = if (n % 2 == 0) && (m as i64 % 2 != 0) {
        -1.0
    } else {
        1.0
    };

    if (nf * u).abs() < 5e-3 {
        // F = g^2 as a cosine sum; stable where the sine ratio cancels.
        let mut f = 1.0;
        let mut f1 = 0.0;
        let mut f2 = 0.0;
        for k in 1..n {
            let kf = k as f64;
            let w = 1.0 - kf / nf;
            let (s, c) = (2.0 * PI * kf * u).sin_cos();
            f += 2.0 * w * c;
            f1 += kf * w * s;
            f2 += kf * kf * w * c;
        }
        f /= nf;
        f1 *= -4.0 * PI / nf;
        f2 *= -8.0 * PI * PI / nf;
        let g = f.sqrt();
        let g1 = f1 / (2.0 * g);
        let g2 = (f2 - 2.0 * g1 * g1) / (2.0 * g);
        return (sign * g, sign * g1, sign * g2);
    }

    let s = (PI * u).sin();
    let c = (PI * u).cos();
    let big_s = (PI * nf * u).sin();
    let big_c = (PI * nf * u).cos();
    let g = big_s / (nf * s);
    let n1 = nf * big_c * s - big_s * c;
    let g1 = PI * n1 / (nf * s * s);
    let g2 = PI * PI * ((1.0 - nf * nf) * big_s * s * s - 2.0 * c * n1) / (nf * s * s * s);
    (sign * g, sign * g1, sign * g2)
}

/// Fejer kernel on the `n`-point grid, as a trigonometric polynomial.
///
/// Coefficients are (1/n)(1 - |k|/(fhi+1)) for |k| <= fhi, so the samples on
/// the grid are nonnegative and sum to one.
pub fn fejer_kernel(fhi: usize, n: usize) -> Result<TrigPoly> {
    KernelSpec::Fejer { fhi, n }.validate()?;
    let fhi_i = fhi as i64;
    let coeffs = (-fhi_i..=fhi_i)
        .map(|k| {
            let w = (1.0 - k.unsigned_abs() as f64 / (fhi as f64 + 1.0)) / n as f64;
            Complex64::new(w, 0.0)
        })
        .collect();
    TrigPoly::new(fhi, coeffs)
}

/// Closed-form evaluator for the Fejer kernel and its first two derivatives.
///
/// khi(t) = (1/n) (1/(fhi+1)) [sin(pi (fhi+1) t) / sin(pi t)]^2.
#[derive(Debug, Clone, Copy)]
pub struct FejerKernel {
    fhi: usize,
    n: usize,
}

impl FejerKernel {
    pub fn new(fhi: usize, n: usize) -> Result<Self> {
        if fhi < 1 || fhi > n {
            return Err(Error::InvalidArgument {
                name: "fhi",
                reason: format!("need 1 <= fhi <= n, got fhi={fhi}, n={n}"),
            });
        }
        Ok(Self { fhi, n })
    }

    pub fn fhi(&self) -> usize {
        self.fhi
    }

    fn scale(&self) -> f64 {
        (self.fhi as f64 + 1.0) / self.n as f64
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (g, _, _) = sine_ratio_derivs(t, self.fhi + 1);
        self.scale() * g * g
    }

    pub fn d1(&self, t: f64) -> f64 {
        let (g, g1, _) = sine_ratio_derivs(t, self.fhi + 1);
        self.scale() * 2.0 * g * g1
    }

    pub fn d2(&self, t: f64) -> f64 {
        let (g, g1, g2) = sine_ratio_derivs(t, self.fhi + 1);
        self.scale() * 2.0 * (g1 * g1 + g * g2)
    }
}

/// The interpolation kernel K(t) = [sin(pi (fc/2+1) t) / ((fc/2+1) sin(pi t))]^4
/// with closed-form first and second derivatives.
///
/// K is frequency-limited to fc, even, and K(0) = 1.
#[derive(Debug, Clone, Copy)]
pub struct Fejer4Kernel {
    fc: usize,
    half_n: usize,
}

impl Fejer4Kernel {
    pub fn new(fc: usize) -> Result<Self> {
        KernelSpec::Fejer4 { fc }.validate()?;
        Ok(Self {
            fc,
            half_n: fc / 2 + 1,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.fc
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (g, _, _) = sine_ratio_derivs(t, self.half_n);
        let g2 = g * g;
        g2 * g2
    }

    pub fn d1(&self, t: f64) -> f64 {
        let (g, g1, _) = sine_ratio_derivs(t, self.half_n);
        4.0 * g * g * g * g1
    }

    pub fn d2(&self, t: f64) -> f64 {
        let (g, g1, g2) = sine_ratio_derivs(t, self.half_n);
        12.0 * g * g * g1 * g1 + 4.0 * g * g * g * g2
    }

    /// Fourier coefficients of K on |k| <= fc: the self-convolution of the
    /// triangular spectrum of the squared sine ratio.
    pub fn spectrum(&self) -> Vec<f64> {
        let n = self.half_n;
        let tri: Vec<f64> = (0..2 * n - 1)
            .map(|i| {
                let j = i as i64 - (n as i64 - 1);
                (1.0 - j.unsigned_abs() as f64 / n as f64) / n as f64
            })
            .collect();
        let mut out = vec![0.0; 2 * self.fc + 1];
        for (i, a) in tri.iter().enumerate() {
            for (j, b) in tri.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }
}

/// Builds the Fejer^4 evaluator, rejecting odd cutoffs.
pub fn fejer4_kernel(fc: usize) -> Result<Fejer4Kernel> {
    Fejer4Kernel::new(fc)
}
