//! Regularized Green's functions and coupling-constant maps.
//!
//! The free outgoing Helmholtz Green's function diverges at the origin in
//! two and three dimensions. This module carries the cutoff-regularized
//! values at zero separation, the map from bare to renormalized couplings,
//! and the closed forms that match the renormalized couplings of the
//! standard treatment onto the physical couplings of the DFSS treatment
//! for a two-scatterer configuration. It also exposes the intermediate
//! quantities (`h`, `xi_n`, `mu_n`, `phi_n`) of the small-separation
//! decomposition of the two-scatterer amplitudes, with `phi_n` computed as
//! residuals against the coincidence limit — their functional form is not
//! modeled anywhere.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{distance, Dimension};
use crate::scalar::{lit, Real};
use crate::specfun;

type C<R> = Complex<R>;

#[inline]
fn i<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::one())
}

#[inline]
fn re<R: Real>(v: R) -> C<R> {
    Complex::new(v, R::zero())
}

/// Relative size below which a closed-form denominator counts as singular.
const DENOMINATOR_GUARD: f64 = 1e-12;

fn check_denominator<R: Real>(den: C<R>, scale: R, err: Error) -> Result<C<R>> {
    if den.norm() <= lit::<R>(DENOMINATOR_GUARD) * scale {
        Err(err)
    } else {
        Ok(den)
    }
}

/// A (possibly regularized) Green's-function value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue<R: Real> {
    pub value: C<R>,
    /// True when the value came from a cutoff-regularized integral.
    pub regularized: bool,
    /// The momentum cutoff, present iff `regularized`.
    pub cutoff: Option<R>,
}

/// Free outgoing Green's function of the Helmholtz operator at offset `x`:
/// `-(i/4) H0^(1)(k r)` in 2D, `-e^(i k r)/(4 pi r)` in 3D. Singular at
/// the origin.
pub fn green_free<R: Real>(dimension: Dimension, k: R, x: &[R]) -> Result<GreenValue<R>> {
    if x.len() != dimension.ambient() {
        return Err(Error::Domain { context: "green_free position has the wrong dimension" });
    }
    let r = distance(x, &vec![R::zero(); x.len()]);
    if !(r.is_finite() && r > R::zero()) || !(k.is_finite() && k > R::zero()) {
        return Err(Error::Domain { context: "green_free requires r > 0 and k > 0" });
    }
    let value = match dimension {
        Dimension::Two => -(i::<R>() * lit::<R>(0.25)) * specfun::hankel1_0(k * r)?,
        Dimension::Three => {
            let phase = Complex::from_polar(R::one(), k * r);
            -phase / (lit::<R>(4.0) * R::PI() * r)
        }
    };
    Ok(GreenValue { value, regularized: false, cutoff: None })
}

/// Cutoff-regularized 2D Green's function at zero separation:
/// `-(1/4 pi) ln(Lambda^2/k^2 - 1) - i/4`, exact for `Lambda > k`.
pub fn g_lambda_zero_2d<R: Real>(lambda: R, k: R) -> Result<GreenValue<R>> {
    if !(k.is_finite() && k > R::zero() && lambda.is_finite() && lambda > k) {
        return Err(Error::Domain { context: "g_lambda_zero_2d requires Lambda > k > 0" });
    }
    let ratio = lambda / k;
    let arg = ratio * ratio - R::one();
    if arg <= R::zero() {
        return Err(Error::Domain { context: "g_lambda_zero_2d logarithm argument must be positive" });
    }
    let real = -arg.ln() / (lit::<R>(4.0) * R::PI());
    Ok(GreenValue {
        value: Complex::new(real, lit(-0.25)),
        regularized: true,
        cutoff: Some(lambda),
    })
}

/// Cutoff-regularized 3D Green's function at zero separation, leading form
/// `-Lambda/(2 pi^2) - i k/(4 pi)` with the `O(1/Lambda)` tail dropped.
/// Requires `Lambda >= 10 k` so the truncation is trustworthy.
pub fn g_lambda_zero_3d<R: Real>(lambda: R, k: R) -> Result<GreenValue<R>> {
    if !(k.is_finite() && k > R::zero() && lambda.is_finite() && lambda > R::zero()) {
        return Err(Error::Domain { context: "g_lambda_zero_3d requires Lambda, k > 0" });
    }
    if lambda < lit::<R>(10.0) * k {
        return Err(Error::CutoffAccuracy {
            context: "g_lambda_zero_3d truncation needs Lambda >= 10 k",
        });
    }
    let two_pi_sq = lit::<R>(2.0) * R::PI() * R::PI();
    let value = Complex::new(-lambda / two_pi_sq, -k / (lit::<R>(4.0) * R::PI()));
    Ok(GreenValue { value, regularized: true, cutoff: Some(lambda) })
}

/// 2D bare-to-renormalized coupling map at reference scale `mu`:
/// `z_tilde = (1/z_bare + ln(Lambda/mu)/(2 pi))^(-1)`.
pub fn renormalized_coupling_2d<R: Real>(bare: C<R>, lambda: R, mu: R) -> Result<C<R>> {
    if !(lambda.is_finite() && lambda > R::zero() && mu.is_finite() && mu > R::zero()) {
        return Err(Error::Domain { context: "renormalized_coupling_2d requires Lambda, mu > 0" });
    }
    if bare.norm() == R::zero() {
        return Err(Error::Domain { context: "renormalized_coupling_2d requires a nonzero bare coupling" });
    }
    let shift = (lambda / mu).ln() / (lit::<R>(2.0) * R::PI());
    let den = bare.inv() + re(shift);
    let scale = bare.inv().norm() + shift.abs();
    if den.norm() <= lit::<R>(DENOMINATOR_GUARD) * (scale + R::one()) {
        return Err(Error::InfiniteCoupling);
    }
    Ok(den.inv())
}

/// Renormalized couplings that make the standard two-scatterer closed
/// forms coincide with the DFSS ones, 2D. The incidence enters through
/// `s = k l sin(theta0)`, the phase picked up across the pair.
pub fn matched_coupling_2d<R: Real>(
    z1: C<R>,
    z2: C<R>,
    k: R,
    ell: R,
    theta0: R,
) -> Result<(C<R>, C<R>)> {
    if !(k.is_finite() && k > R::zero() && ell.is_finite() && ell > R::zero()) {
        return Err(Error::Domain { context: "matched_coupling_2d requires k > 0 and ell > 0" });
    }
    let x = k * ell;
    let j0 = re(specfun::bessel_j0(x)?);
    let y0 = re(specfun::bessel_y0(x)?);
    let h0 = specfun::hankel1_0(x)?;
    let four = lit::<R>(4.0);
    let sixteen_i = i::<R>() * lit::<R>(16.0);
    let s = x * theta0.sin();
    let ep = Complex::from_polar(R::one(), s);
    let em = Complex::from_polar(R::one(), -s);

    let num1 = z1 * (z2 * (ep * j0 - R::one()) + i::<R>() * four) * four;
    let den1 = z1 * z2 * y0 * (j0 - ep) + z2 * (ep * h0 - R::one()) * four + sixteen_i;
    let scale1 = (z1 * z2).norm() + z2.norm() * four + lit::<R>(16.0);
    let den1 = check_denominator(den1, scale1, Error::MatchingSingularity)?;

    let num2 = z2 * (z1 * (em * j0 - R::one()) + i::<R>() * four) * four;
    let den2 = z1 * z2 * y0 * (j0 - em) + z1 * (em * h0 - R::one()) * four + sixteen_i;
    let scale2 = (z1 * z2).norm() + z1.norm() * four + lit::<R>(16.0);
    let den2 = check_denominator(den2, scale2, Error::MatchingSingularity)?;

    Ok((num1 / den1, num2 / den2))
}

/// 3D analog of [`matched_coupling_2d`]; the incidence enters through
/// `alpha0 = sin(theta0) cos(phi0)`, the x-component of the unit incident
/// direction along the pair axis.
pub fn matched_coupling_3d<R: Real>(
    z1: C<R>,
    z2: C<R>,
    k: R,
    ell: R,
    theta0: R,
    phi0: R,
) -> Result<(C<R>, C<R>)> {
    if !(k.is_finite() && k > R::zero() && ell.is_finite() && ell > R::zero()) {
        return Err(Error::Domain { context: "matched_coupling_3d requires k > 0 and ell > 0" });
    }
    let alpha0 = theta0.sin() * phi0.cos();
    let x = k * ell;
    let (sin_x, cos_x) = x.sin_cos();
    let four_pi = lit::<R>(4.0) * R::PI();
    let sixteen_pi_sq_i = i::<R>() * four_pi * four_pi;
    let inv_ell = ell.recip();
    let ea = Complex::from_polar(R::one(), x * alpha0); // e^{i k l alpha0}
    let eb = ea.conj();
    let e_ap1 = Complex::from_polar(R::one(), x * (alpha0 + R::one()));
    let e_am1 = Complex::from_polar(R::one(), x * (R::one() - alpha0));

    let num1 = z1 * (z2 * ((re(x) - ea * sin_x) * inv_ell) - i::<R>() * four_pi) * four_pi;
    let den1 = z1 * z2 * ((re(sin_x) - ea * x) * cos_x * (inv_ell * inv_ell))
        + z2 * ((re(x) + i::<R>() * e_ap1) * (four_pi * inv_ell))
        - sixteen_pi_sq_i;
    let scale1 =
        (z1 * z2).norm() * inv_ell * inv_ell + z2.norm() * four_pi * inv_ell + four_pi * four_pi;
    let den1 = check_denominator(den1, scale1, Error::MatchingSingularity)?;

    let num2 = z2 * (z1 * ((re(x) - eb * sin_x) * inv_ell) - i::<R>() * four_pi) * four_pi;
    let den2 = z1 * z2 * ((re(sin_x) - eb * x) * cos_x * (inv_ell * inv_ell))
        + z1 * ((re(x) + i::<R>() * e_am1) * (four_pi * inv_ell))
        - sixteen_pi_sq_i;
    let scale2 =
        (z1 * z2).norm() * inv_ell * inv_ell + z1.norm() * four_pi * inv_ell + four_pi * four_pi;
    let den2 = check_denominator(den2, scale2, Error::MatchingSingularity)?;

    Ok((num1 / den1, num2 / den2))
}

/// Coincidence limits of the DFSS two-scatterer coefficients:
/// `f0_n = 4 z_n / (4 + i (z1 + z2))` in 2D,
/// `f0_n = 4 pi z_n / (4 pi + i k (z1 + z2))` in 3D.
/// Their sum equals the single-scatterer coefficient of the merged coupling.
pub fn coincidence_f0<R: Real>(
    z1: C<R>,
    z2: C<R>,
    k: R,
    dimension: Dimension,
) -> Result<(C<R>, C<R>)> {
    if z1.norm() == R::zero() || z2.norm() == R::zero() {
        return Err(Error::Domain { context: "coincidence_f0 requires nonzero couplings" });
    }
    let (scale, den) = match dimension {
        Dimension::Two => {
            let four = lit::<R>(4.0);
            (four, re(four) + i::<R>() * (z1 + z2))
        }
        Dimension::Three => {
            let four_pi = lit::<R>(4.0) * R::PI();
            (four_pi, re(four_pi) + i::<R>() * (z1 + z2) * k)
        }
    };
    let den = check_denominator(
        den,
        scale + (z1 + z2).norm() * k.max(R::one()),
        Error::SpectralSingularity { rcond: 0.0 },
    )?;
    Ok((z1 * scale / den, z2 * scale / den))
}

/// Intermediate state of the small-separation decomposition of the
/// two-scatterer coefficients. With `h` the off-diagonal kernel value and
/// `g` the diagonal constant (`i/4` or `ik/4pi`),
///
/// ```text
/// xi_n = 1/z_n - h + g
/// mu_1 = -(e^{is} - 1) h          mu_2 = (e^{is} - 1)(xi_1 + h)
/// f_1  = (xi_2 + mu_1) / D        f_2  = (xi_1 + mu_2) / D
/// D    = xi_1 xi_2 + (xi_1 + xi_2) h
/// ```
///
/// reproduces the direct closed forms. The residuals
/// `phi_n = xi_n + (eta^{+-1} + 1) h - 1/f0_n` measure the distance from
/// the coincidence limit `f0` (with `eta = f0_2/f0_1`) and tend to zero as
/// the separation closes when the couplings follow the matched maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSeparationState<R: Real> {
    pub h: C<R>,
    pub xi: (C<R>, C<R>),
    pub mu: (C<R>, C<R>),
    pub phi: (C<R>, C<R>),
    /// The coefficients rebuilt from the reduced representation.
    pub f_reduced: (C<R>, C<R>),
}

/// Computes the small-separation state for renormalized couplings
/// `(z1t, z2t)` at separation `ell`, incidence `theta0` (3D azimuth taken
/// as zero, so the cross-pair phase is `k l sin(theta0)` in both
/// dimensions), against the coincidence reference `f0`.
pub fn small_separation_state<R: Real>(
    z1t: C<R>,
    z2t: C<R>,
    k: R,
    ell: R,
    theta0: R,
    dimension: Dimension,
    f0: (C<R>, C<R>),
) -> Result<SmallSeparationState<R>> {
    if !(k.is_finite() && k > R::zero() && ell.is_finite() && ell > R::zero()) {
        return Err(Error::Domain { context: "small_separation_state requires k > 0 and ell > 0" });
    }
    let x = k * ell;
    let (h, g) = match dimension {
        Dimension::Two => {
            (i::<R>() * lit::<R>(0.25) * specfun::hankel1_0(x)?, i::<R>() * lit::<R>(0.25))
        }
        Dimension::Three => {
            let four_pi = lit::<R>(4.0) * R::PI();
            (
                Complex::from_polar(R::one(), x) / (four_pi * ell),
                i::<R>() * (k / four_pi),
            )
        }
    };
    let xi1 = z1t.inv() - h + g;
    let xi2 = z2t.inv() - h + g;
    let phase = Complex::from_polar(R::one(), x * theta0.sin()) - R::one();
    let mu1 = -phase * h;
    let mu2 = phase * (xi1 + h);
    let den = xi1 * xi2 + (xi1 + xi2) * h;
    let scale = (xi1 * xi2).norm() + (xi1 + xi2).norm() * h.norm();
    let den = check_denominator(den, scale + R::one(), Error::SpectralSingularity { rcond: 0.0 })?;
    let f1 = (xi2 + mu1) / den;
    let f2 = (xi1 + mu2) / den;
    let (f01, f02) = f0;
    if f01.norm() == R::zero() || f02.norm() == R::zero() {
        return Err(Error::Domain { context: "small_separation_state requires nonzero f0" });
    }
    let eta = f02 / f01;
    let phi1 = xi1 + (eta + R::one()) * h - f01.inv();
    let phi2 = xi2 + (eta.inv() + R::one()) * h - f02.inv();
    Ok(SmallSeparationState { h, xi: (xi1, xi2), mu: (mu1, mu2), phi: (phi1, phi2), f_reduced: (f1, f2) })
}
