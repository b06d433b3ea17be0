use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the Hermitian-symmetry defect accepted at construction.
const HERMITIAN_TOL: f64 = 1e-12;

/// Real-valued trigonometric polynomial frequency-limited to `fc`.
///
/// Coefficients are indexed k = -fc..fc (length 2*fc+1) and are kept exactly
/// Hermitian-symmetric, so every evaluation is real up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    fc: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds a polynomial from coefficients indexed -fc..fc.
    ///
    /// Rejects coefficient arrays whose Hermitian defect exceeds 1e-12, then
    /// symmetrizes exactly so downstream arithmetic cannot drift.
    pub fn new(fc: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * fc + 1 {
            return Err(Error::LengthMismatch {
                name: "coeffs",
                expected: 2 * fc + 1,
                got: coeffs.len(),
            });
        }
        let mut defect = 0f64;
        for k in 0..=fc {
            let d = (coeffs[fc + k] - coeffs[fc - k].conj()).norm();
            defect = defect.max(d);
        }
        if defect > HERMITIAN_TOL {
            return Err(Error::ImaginaryResidue {
                context: "TrigPoly coefficients (Hermitian symmetry)",
                residue: defect,
                tol: HERMITIAN_TOL,
            });
        }
        let mut coeffs = coeffs;
        for k in 1..=fc {
            let avg = 0.5 * (coeffs[fc + k] + coeffs[fc - k].conj());
            coeffs[fc + k] = avg;
            coeffs[fc - k] = avg.conj();
        }
        coeffs[fc] = Complex64::new(coeffs[fc].re, 0.0);
        Ok(Self { fc, coeffs })
    }

    /// The constant polynomial p(t) = value.
    pub fn constant(value: f64) -> Self {
        Self {
            fc: 0,
            coeffs: vec![Complex64::new(value, 0.0)],
        }
    }

    /// Zero polynomial with the given cutoff.
    pub fn zero(fc: usize) -> Self {
        Self {
            fc,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * fc + 1],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.fc
    }

    /// Coefficient at signed frequency k (zero outside the band).
    pub fn coeff(&self, k: i64) -> Complex64 {
        let fc = self.fc as i64;
        if k < -fc || k > fc {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + fc) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn imag_tol(&self) -> f64 {
        let l1: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        1e-10 * l1.max(1.0)
    }

    /// Evaluates at a single point by direct summation.
    pub fn eval_at(&self, t: f64) -> Result<f64> {
        let fc = self.fc as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -fc..=fc {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * k as f64 * t);
            acc += self.coeff(k) * phase;
        }
        let tol = self.imag_tol();
        if acc.im.abs() > tol {
            return Err(Error::ImaginaryResidue {
                context: "eval_at",
                residue: acc.im.abs(),
                tol,
            });
        }
        Ok(acc.re)
    }

    /// Evaluates p(m/M) for m = 0..M-1 via a zero-padded FFT.
    pub fn eval_on_grid(&self, m: usize) -> Result<Vec<f64>> {
        if m < 2 * self.fc + 1 {
            return Err(Error::GridTooCoarse { m, fc: self.fc });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let fc = self.fc as i64;
        for k in -fc..=fc {
            let idx = k.rem_euclid(m as i64) as usize;
            buf[idx] += self.coeff(k);
        }
        // Forward DFT computes sum_k c_k e^{-i 2 pi k m / M}, matching eval_at.
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let tol = self.imag_tol();
        let mut out = Vec::with_capacity(m);
        for v in &buf {
            if v.im.abs() > tol {
                return Err(Error::ImaginaryResidue {
                    context: "eval_on_grid",
                    residue: v.im.abs(),
                    tol,
                });
            }
            out.push(v.re);
        }
        Ok(out)
    }

    /// Pointwise product; the spectrum is the linear convolution of the inputs.
    pub fn multiply(&self, other: &Self) -> Self {
        let fc = self.fc + other.fc;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * fc + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(fc, coeffs).expect("product of real polynomials is real")
    }

    /// Derivative: coefficient k maps to -i 2 pi k times itself.
    pub fn derivative(&self) -> Self {
        let fc = self.fc as i64;
        let coeffs = (-fc..=fc)
            .map(|k| self.coeff(k) * Complex64::new(0.0, -2.0 * PI * k as f64))
            .collect();
        Self::new(self.fc, coeffs).expect("derivative of a real polynomial is real")
    }

    /// Sum of two polynomials (cutoff is the larger of the two).
    pub fn add(&self, other: &Self) -> Self {
        let fc = self.fc.max(other.fc) as i64;
        let coeffs = (-fc..=fc).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(fc as usize, coeffs).expect("sum of real polynomials is real")
    }

    /// Adds a constant offset.
    pub fn add_constant(&self, value: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[self.fc] += Complex64::new(value, 0.0);
        Self { fc: self.fc, coeffs }
    }

    /// Scales all coefficients by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        Self { fc: self.fc, coeffs }
    }

    /// Max of |p| over an `oversample * (2 fc + 1)`-point grid.
    ///
    /// This is a lower estimate of the true sup norm; the refinement error is
    /// controlled by Bernstein's bound on p'.
    pub fn sup_norm_estimate(&self, oversample: usize) -> f64 {
        let m = (oversample.max(1) * (2 * self.fc + 1)).max(2 * self.fc + 1);
        self.eval_on_grid(m)
            .expect("grid is fine enough by construction")
            .iter()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cos_poly() -> TrigPoly {
        // cos(2 pi t) = (e^{-i 2 pi t} + e^{i 2 pi t}) / 2
        TrigPoly::new(
            1,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        )
        .unwrap()
    }

    fn random_hermitian(fc: usize, seed: u64) -> TrigPoly {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * fc + 1];
        coeffs[fc] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for k in 1..=fc {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[fc + k] = c;
            coeffs[fc - k] = c.conj();
        }
        TrigPoly::new(fc, coeffs).unwrap()
    }

    #[test]
    fn constant_on_grid_is_constant() {
        let p = TrigPoly::constant(1.0);
        assert_eq!(p.eval_on_grid(8).unwrap(), vec![1.0; 8]);
    }

    #[test]
    fn cos_on_four_points() {
        let grid = cos_poly().eval_on_grid(4).unwrap();
        let expected = [1.0, 0.0, -1.0, 0.0];
        for (got, want) in grid.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_matches_direct_summation() {
        let p = random_hermitian(5, 7);
        let grid = p.eval_on_grid(64).unwrap();
        for (m, got) in grid.iter().enumerate() {
            let want = p.eval_at(m as f64 / 64.0).unwrap();
            let rel = (got - want).abs() / want.abs().max(1e-30);
            assert!(rel < 1e-10, "m={m}: got {got}, want {want}");
        }
    }

    #[test]
    fn grid_too_coarse_is_rejected() {
        let p = random_hermitian(5, 1);
        assert!(matches!(
            p.eval_on_grid(10),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn non_hermitian_coeffs_are_rejected() {
        let coeffs = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(
            TrigPoly::new(1, coeffs),
            Err(Error::ImaginaryResidue { .. })
        ));
    }

    #[test]
    fn eval_at_trivial_cases() {
        assert_abs_diff_eq!(
            TrigPoly::constant(1.0).eval_at(0.37).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(cos_poly().eval_at(0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn multiply_identity_and_cos_squared() {
        let p = random_hermitian(4, 3);
        let one = TrigPoly::constant(1.0);
        let q = p.multiply(&one);
        for k in -4i64..=4 {
            assert!((q.coeff(k) - p.coeff(k)).norm() < 1e-15);
        }

        // cos^2(2 pi t) = 1/2 + cos(4 pi t)/2
        let c2 = cos_poly().multiply(&cos_poly());
        assert_abs_diff_eq!(c2.coeff(0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c2.coeff(2).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c2.coeff(-2).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c2.eval_at(0.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn multiply_matches_pointwise_product() {
        let p = random_hermitian(6, 11);
        let q = random_hermitian(6, 12);
        let prod = p.multiply(&q);
        let gp = p.eval_on_grid(128).unwrap();
        let gq = q.eval_on_grid(128).unwrap();
        let gprod = prod.eval_on_grid(128).unwrap();
        for i in 0..128 {
            assert_abs_diff_eq!(gprod[i], gp[i] * gq[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let d = TrigPoly::constant(3.0).derivative();
        assert_eq!(d.coeff(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_of_cos_at_quarter() {
        // d/dt cos(2 pi t) = -2 pi sin(2 pi t); at t = 1/4 this is -2 pi.
        let d = cos_poly().derivative();
        assert_abs_diff_eq!(
            d.eval_at(0.25).unwrap(),
            -2.0 * PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn derivative_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let p = random_hermitian(7, 21);
        let d = p.derivative();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let h = 1e-6;
        for _ in 0..20 {
            let t: f64 = rng.gen_range(0.0..1.0);
            let fd =
                (p.eval_at(t + h).unwrap() - p.eval_at(t - h).unwrap()) / (2.0 * h);
            let got = d.eval_at(t).unwrap();
            let rel = (got - fd).abs() / got.abs().max(1.0);
            assert!(rel < 1e-4, "t={t}: fd {fd} vs {got}");
        }
    }

    #[test]
    fn sup_norm_estimate_basic() {
        assert_abs_diff_eq!(
            TrigPoly::constant(1.0).sup_norm_estimate(16),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(cos_poly().sup_norm_estimate(16), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sup_norm_estimate_refines() {
        let p = crate::trig::fejer_kernel(8, 64).unwrap();
        let coarse = p.sup_norm_estimate(16);
        let fine = p.sup_norm_estimate(64);
        assert!((fine - coarse).abs() / fine < 1e-3);
    }

    proptest! {
        #[test]
        fn parseval_consistency(seed in 0u64..1000, fc in 1usize..12) {
            let p = random_hermitian(fc, seed);
            let n = (2 * fc + 1).next_power_of_two().max(16);
            let grid = p.eval_on_grid(n).unwrap();
            let energy: f64 = grid.iter().map(|v| v * v).sum();
            let coef: f64 = p.coeffs().iter().map(|c| c.norm_sqr()).sum();
            let rel = (energy - n as f64 * coef).abs() / (n as f64 * coef).max(1e-30);
            prop_assert!(rel < 1e-9);
        }

        #[test]
        fn multiply_commutes_and_associates(a in 0u64..500, b in 500u64..1000, c in 1000u64..1500) {
            let p = random_hermitian(4, a);
            let q = random_hermitian(3, b);
            let r = random_hermitian(2, c);
            let pq = p.multiply(&q);
            let qp = q.multiply(&p);
            for k in -7i64..=7 {
                prop_assert!((pq.coeff(k) - qp.coeff(k)).norm() < 1e-10);
            }
            let left = pq.multiply(&r);
            let right = p.multiply(&q.multiply(&r));
            for k in -9i64..=9 {
                prop_assert!((left.coeff(k) - right.coeff(k)).norm() < 1e-10);
            }
        }

        #[test]
        fn product_rule_holds_pointwise(a in 0u64..500, b in 500u64..1000) {
            let p = random_hermitian(5, a);
            let q = random_hermitian(4, b);
            let lhs = p.multiply(&q).derivative();
            let rhs = p.derivative().multiply(&q).add(&p.multiply(&q.derivative()));
            let m = 16 * (2 * lhs.cutoff() + 1);
            let gl = lhs.eval_on_grid(m).unwrap();
            let gr = rhs.eval_on_grid(m).unwrap();
            for i in 0..m {
                prop_assert!((gl[i] - gr[i]).abs() < 1e-8);
            }
        }

        #[test]
        fn bernstein_inequality_on_random_polys(seed in 0u64..300, fc in 1usize..10) {
            let p = random_hermitian(fc, seed);
            let sup_p = p.sup_norm_estimate(32);
            let sup_d = p.derivative().sup_norm_estimate(32);
            prop_assert!(sup_d <= 2.0 * PI * fc as f64 * sup_p * (1.0 + 1e-6));
        }
    }
}
