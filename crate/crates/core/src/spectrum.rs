//! Sense-spectrum algebra.
//!
//! The overlap of two spectra keeps, per dimension, the smaller magnitude
//! when both entries share a sign and zero otherwise. What remains of each
//! input after removing the overlap is its uniqueness spectrum, and the L1
//! norms of the three parts play the roles of the HIS scalars.
//!
//! Everything here works on `&[f64]`; [`Spectrum`] derefs to a slice so
//! owned spectra and table rows go through the same functions.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::similarity::{his_value, HisParams, Measure, SimilarityScore};
use crate::taxonomy::HisScalars;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn zeros(dim: usize) -> Self {
        Spectrum(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn l1(&self) -> f64 {
        l1(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Spectrum {
    fn from(values: Vec<f64>) -> Self {
        Spectrum(values)
    }
}

impl Deref for Spectrum {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Spectrum {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTriple {
    pub common: Spectrum,
    pub unique_a: Spectrum,
    pub unique_b: Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumScalars {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `(sgn a + sgn b) / 2 * min(|a|, |b|)` per dimension.
pub fn overlap(a: &[f64], b: &[f64]) -> Result<Spectrum> {
    check_dims(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (sgn(x) + sgn(y)) / 2.0 * x.abs().min(y.abs()))
        .collect::<Vec<_>>()
        .into())
}

fn overlap_relu_at(x: f64, y: f64) -> f64 {
    relu(x).min(relu(y)) - relu(-x).min(relu(-y))
}

fn unique_relu_at(x: f64, y: f64) -> f64 {
    relu(relu(x) - relu(y)) - relu(relu(-x) - relu(-y))
}

/// The overlap written with relu and min only:
/// `min(relu a, relu b) - min(relu -a, relu -b)`.
pub fn overlap_relu(a: &[f64], b: &[f64]) -> Result<Spectrum> {
    check_dims(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| overlap_relu_at(x, y))
        .collect::<Vec<_>>()
        .into())
}

/// The uniqueness of `a` against `b` written with relu only:
/// `relu(relu a - relu b) - relu(relu -a - relu -b)`.
pub fn unique_relu(a: &[f64], b: &[f64]) -> Result<Spectrum> {
    check_dims(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| unique_relu_at(x, y))
        .collect::<Vec<_>>()
        .into())
}

pub fn decompose(a: &[f64], b: &[f64]) -> Result<SpectrumTriple> {
    let common = overlap(a, b)?;
    let unique_a: Vec<f64> = a.iter().zip(common.iter()).map(|(x, c)| x - c).collect();
    let unique_b: Vec<f64> = b.iter().zip(common.iter()).map(|(y, c)| y - c).collect();
    Ok(SpectrumTriple {
        common,
        unique_a: unique_a.into(),
        unique_b: unique_b.into(),
    })
}

pub fn spectrum_scalars(a: &[f64], b: &[f64]) -> Result<SpectrumScalars> {
    check_dims(a, b)?;
    let mut s = SpectrumScalars {
        alpha_hat: 0.0,
        beta_hat: 0.0,
        gamma_hat: 0.0,
    };
    for (&x, &y) in a.iter().zip(b) {
        s.alpha_hat += unique_relu_at(x, y).abs();
        s.beta_hat += unique_relu_at(y, x).abs();
        s.gamma_hat += overlap_relu_at(x, y).abs();
    }
    Ok(s)
}

pub fn his_from_spectra(a: &[f64], b: &[f64], params: &HisParams) -> Result<SimilarityScore> {
    let s = spectrum_scalars(a, b)?;
    let value = his_value(s.alpha_hat, s.beta_hat, s.gamma_hat, params)?;
    Ok(SimilarityScore {
        value,
        measure: Measure::His,
    })
}

/// `|α - α̂| + |β - β̂| + |γ - γ̂|`.
pub fn pair_loss(a: &[f64], b: &[f64], labels: HisScalars) -> Result<f64> {
    let s = spectrum_scalars(a, b)?;
    Ok((f64::from(labels.alpha) - s.alpha_hat).abs()
        + (f64::from(labels.beta) - s.beta_hat).abs()
        + (f64::from(labels.gamma) - s.gamma_hat).abs())
}

pub fn pair_loss_grad(a: &[f64], b: &[f64], labels: HisScalars) -> Result<(Spectrum, Spectrum)> {
    check_dims(a, b)?;
    let mut ga = Spectrum::zeros(a.len());
    let mut gb = Spectrum::zeros(b.len());
    accumulate_pair_grad(a, b, labels, &mut ga, &mut gb);
    Ok((ga, gb))
}

/// Adds the loss subgradients into `ga` and `gb` and returns the loss.
/// Dimensions must already agree.
pub(crate) fn accumulate_pair_grad(a: &[f64], b: &[f64], labels: HisScalars, ga: &mut [f64], gb: &mut [f64]) -> f64 {
    let s = spectrum_scalars(a, b).expect("dimensions checked by caller");
    let (alpha, beta, gamma) = (f64::from(labels.alpha), f64::from(labels.beta), f64::from(labels.gamma));
    let loss = (alpha - s.alpha_hat).abs() + (beta - s.beta_hat).abs() + (gamma - s.gamma_hat).abs();
    // d|label - hat| / d hat
    let s_alpha = sgn(s.alpha_hat - alpha);
    let s_beta = sgn(s.beta_hat - beta);
    let s_gamma = sgn(s.gamma_hat - gamma);

    for i in 0..a.len() {
        let (x, y) = (a[i], b[i]);
        let (px, py, nx, ny) = (relu(x), relu(y), relu(-x), relu(-y));
        // gradients w.r.t. relu(x), relu(y), relu(-x), relu(-y)
        let (mut dpx, mut dpy, mut dnx, mut dny) = (0.0, 0.0, 0.0, 0.0);

        let ua = relu(px - py) - relu(nx - ny);
        let g = s_alpha * sgn(ua);
        if g != 0.0 {
            if px - py > 0.0 {
                dpx += g;
                dpy -= g;
            }
            if nx - ny > 0.0 {
                dnx -= g;
                dny += g;
            }
        }

        let ub = relu(py - px) - relu(ny - nx);
        let g = s_beta * sgn(ub);
        if g != 0.0 {
            if py - px > 0.0 {
                dpy += g;
                dpx -= g;
            }
            if ny - nx > 0.0 {
                dny -= g;
                dnx += g;
            }
        }

        let c = px.min(py) - nx.min(ny);
        let g = s_gamma * sgn(c);
        if g != 0.0 {
            route_min(px, py, g, &mut dpx, &mut dpy);
            route_min(nx, ny, -g, &mut dnx, &mut dny);
        }

        if x > 0.0 {
            ga[i] += dpx;
        } else if x < 0.0 {
            ga[i] -= dnx;
        }
        if y > 0.0 {
            gb[i] += dpy;
        } else if y < 0.0 {
            gb[i] -= dny;
        }
    }
    loss
}

fn route_min(x: f64, y: f64, g: f64, dx: &mut f64, dy: &mut f64) {
    if x < y {
        *dx += g;
    } else if y < x {
        *dy += g;
    } else {
        *dx += g / 2.0;
        *dy += g / 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const VA: [f64; 3] = [2.0, 1.0, -1.0];
    const VB: [f64; 3] = [1.0, -1.0, -3.0];

    #[test]
    fn worked_example() {
        assert_eq!(&*overlap(&VA, &VB).unwrap(), &[1.0, 0.0, -1.0]);
        let t = decompose(&VA, &VB).unwrap();
        assert_eq!(&*t.common, &[1.0, 0.0, -1.0]);
        assert_eq!(&*t.unique_a, &[1.0, 1.0, 0.0]);
        assert_eq!(&*t.unique_b, &[0.0, -1.0, -2.0]);
        let s = spectrum_scalars(&VA, &VB).unwrap();
        assert_eq!((s.alpha_hat, s.beta_hat, s.gamma_hat), (2.0, 3.0, 2.0));
        assert_eq!(pair_loss(&VA, &VB, HisScalars::new(2, 3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn trivial_cases() {
        let v = [0.5, -1.5, 0.0, 3.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let zero = [0.0; 4];
        assert_eq!(&*overlap(&v, &v).unwrap(), &v);
        assert!(overlap(&v, &neg).unwrap().iter().all(|&x| x == 0.0));

        let t = decompose(&v, &zero).unwrap();
        assert!(t.common.iter().all(|&x| x == 0.0));
        assert_eq!(&*t.unique_a, &v);
        assert!(t.unique_b.iter().all(|&x| x == 0.0));

        let n = l1(&v);
        let s = spectrum_scalars(&v, &v).unwrap();
        assert_eq!((s.alpha_hat, s.beta_hat, s.gamma_hat), (0.0, 0.0, n));
        let s = spectrum_scalars(&v, &neg).unwrap();
        assert_eq!((s.alpha_hat, s.beta_hat, s.gamma_hat), (n, n, 0.0));

        assert_eq!(pair_loss(&zero, &zero, HisScalars::new(2, 2, 9)).unwrap(), 13.0);
        let (ga, gb) = pair_loss_grad(&zero, &zero, HisScalars::new(2, 2, 9)).unwrap();
        assert!(ga.iter().chain(gb.iter()).all(|&g| g == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let err = overlap(&[1.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { left: 1, right: 2 }));
        assert!(decompose(&[1.0], &[]).is_err());
        assert!(pair_loss(&[1.0], &[], HisScalars::new(0, 0, 1)).is_err());
        assert!(pair_loss_grad(&[1.0], &[], HisScalars::new(0, 0, 1)).is_err());
    }

    #[test]
    fn his_from_spectra_values() {
        let p = HisParams::default();
        // one dimension each: unique parts 2 and 2, common 9
        let a = [11.0, 0.0];
        let b = [9.0, 2.0];
        let s = spectrum_scalars(&a, &b).unwrap();
        assert_eq!((s.alpha_hat, s.beta_hat, s.gamma_hat), (2.0, 2.0, 9.0));
        let v = his_from_spectra(&a, &b, &p).unwrap().value;
        assert!((v - 0.490_418_92).abs() < 1e-4);
        let small = his_from_spectra(&[0.25], &[0.25], &p).unwrap().value;
        assert!((small - 0.25f64.powf(-0.1)).abs() < 1e-12 && small > 1.0);
        assert!(matches!(
            his_from_spectra(&[0.0], &[0.0], &p),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn zero_residual_has_zero_gradient() {
        let (ga, gb) = pair_loss_grad(&VA, &VB, HisScalars::new(2, 3, 2)).unwrap();
        assert!(ga.iter().chain(gb.iter()).all(|&g| g == 0.0));
    }

    fn near_kink(a: &[f64], b: &[f64], labels: HisScalars, tol: f64) -> bool {
        let dims = a
            .iter()
            .zip(b)
            .any(|(&x, &y)| x.abs() < tol || y.abs() < tol || (x - y).abs() < tol);
        let s = spectrum_scalars(a, b).unwrap();
        let margin = 10.0 * tol * a.len() as f64;
        dims || (s.alpha_hat - f64::from(labels.alpha)).abs() < margin
            || (s.beta_hat - f64::from(labels.beta)).abs() < margin
            || (s.gamma_hat - f64::from(labels.gamma)).abs() < margin
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-4;
        let mut checked = 0;
        while checked < 300 {
            let dim = rng.gen_range(1..8);
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let labels = HisScalars::new(rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..6));
            if near_kink(&a, &b, labels, 1e-3) {
                continue;
            }
            checked += 1;
            let (ga, gb) = pair_loss_grad(&a, &b, labels).unwrap();
            for i in 0..dim {
                for (which, analytic) in [(0, ga[i]), (1, gb[i])] {
                    let eval = |delta: f64| {
                        let (mut x, mut y) = (a.clone(), b.clone());
                        if which == 0 {
                            x[i] += delta;
                        } else {
                            y[i] += delta;
                        }
                        pair_loss(&x, &y, labels).unwrap()
                    };
                    let fd = (eval(h) - eval(-h)) / (2.0 * h);
                    assert!(
                        (fd - analytic).abs() <= 1e-3 * analytic.abs().max(1.0),
                        "dim {i} side {which}: fd {fd} vs {analytic}"
                    );
                }
            }
        }
    }

    fn pair(max_dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        prop_oneof![Just(1usize), Just(3usize), Just(max_dim)].prop_flat_map(|d| {
            (
                proptest::collection::vec(-2.0f64..2.0, d),
                proptest::collection::vec(-2.0f64..2.0, d),
            )
        })
    }

    /// Values on the 2^-50 grid that a uniform sampler over [-2, 2) draws
    /// from; differences of such values are exact.
    fn grid_pair(max_dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let entry = (-(1i64 << 51)..(1i64 << 51)).prop_map(|k| k as f64 * 2f64.powi(-50));
        prop_oneof![Just(1usize), Just(3usize), Just(max_dim)].prop_flat_map(move |d| {
            (
                proptest::collection::vec(entry.clone(), d),
                proptest::collection::vec(entry.clone(), d),
            )
        })
    }

    proptest! {
        #[test]
        fn relu_form_matches_sign_form((a, b) in pair(200)) {
            let direct = overlap(&a, &b).unwrap();
            let relu_form = overlap_relu(&a, &b).unwrap();
            for (x, y) in direct.iter().zip(relu_form.iter()) {
                // == identifies +0 and -0
                prop_assert!(x == y, "{} vs {}", x, y);
            }
            let t = decompose(&a, &b).unwrap();
            prop_assert_eq!(&*t.unique_a, &*unique_relu(&a, &b).unwrap());
            prop_assert_eq!(&*t.unique_b, &*unique_relu(&b, &a).unwrap());
        }

        #[test]
        fn decomposition_is_exact_on_the_sampling_grid((a, b) in grid_pair(200)) {
            let t = decompose(&a, &b).unwrap();
            for i in 0..a.len() {
                prop_assert_eq!(t.common[i] + t.unique_a[i], a[i]);
                prop_assert_eq!(t.common[i] + t.unique_b[i], b[i]);
            }
        }

        #[test]
        fn decomposition_within_an_ulp((a, b) in pair(200)) {
            // for arbitrary doubles a - c can round, so the sum may miss by
            // one unit in the last place
            let t = decompose(&a, &b).unwrap();
            for i in 0..a.len() {
                for (x, u) in [(a[i], t.unique_a[i]), (b[i], t.unique_b[i])] {
                    let back = t.common[i] + u;
                    let ulp = f64::EPSILON * x.abs();
                    prop_assert!((back - x).abs() <= ulp, "{} vs {}", back, x);
                }
                let c = t.common[i];
                prop_assert!(c.abs() <= a[i].abs().min(b[i].abs()));
                prop_assert!(c == 0.0 || (c.signum() == a[i].signum() && c.signum() == b[i].signum()));
            }
        }

        #[test]
        fn symmetry((a, b) in pair(200)) {
            let ab = decompose(&a, &b).unwrap();
            let ba = decompose(&b, &a).unwrap();
            prop_assert_eq!(&ab.common, &ba.common);
            prop_assert_eq!(&ab.unique_a, &ba.unique_b);
            prop_assert_eq!(&ab.unique_b, &ba.unique_a);
        }

        #[test]
        fn scale_equivariance((a, b) in pair(200), c in 0.01f64..100.0) {
            let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
            let cb: Vec<f64> = b.iter().map(|x| c * x).collect();
            let scaled = overlap(&ca, &cb).unwrap();
            let base = overlap(&a, &b).unwrap();
            for (x, y) in scaled.iter().zip(base.iter()) {
                prop_assert!(*x == c * y);
            }
        }

        #[test]
        fn loss_is_zero_exactly_at_the_labels(
            (a, b) in pair(20),
            alpha in 0u32..5, beta in 0u32..5, gamma in 0u32..10,
        ) {
            let labels = HisScalars::new(alpha, beta, gamma);
            let loss = pair_loss(&a, &b, labels).unwrap();
            prop_assert!(loss >= 0.0);
            let s = spectrum_scalars(&a, &b).unwrap();
            let at_labels = s.alpha_hat == f64::from(alpha)
                && s.beta_hat == f64::from(beta)
                && s.gamma_hat == f64::from(gamma);
            prop_assert_eq!(loss == 0.0, at_labels);
        }
    }
}
