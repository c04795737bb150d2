//! Scattering amplitudes, differential cross-sections, and the
//! position-space wavefunction.
//!
//! The generic path builds the interaction matrix, solves
//! `sum_n A_mn f_n = exp(i a_m . k_in)`, and assembles
//!
//! ```text
//! f(k', k) = c_d / sqrt(k^(3-d)) * sum_m f_m exp(-i a_m . k')
//! c_2 = -sqrt(i / (8 pi))        c_3 = -1/(4 pi)
//! ```
//!
//! with the principal branch `sqrt(i) = exp(i pi/4)`, which makes the 2D
//! prefactor `-sqrt(i/(8 pi k))`. Closed forms for one and two scatterers
//! are provided for both formulations; they agree with the matrix path to
//! near machine precision and serve as its cross-check.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::{self, COINCIDENCE_GUARD_K_ELL};
use crate::model::{
    direction_vectors, dot, wave_vectors, Dimension, DirectionPair, Formulation, Scene,
};
use crate::renorm::green_free;
use crate::scalar::{lit, Real};
use crate::solve::{self, SolveDiagnostics};
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

const DENOMINATOR_GUARD: f64 = 1e-12;

fn guard_denominator<R: Real>(den: C<R>, scale: R) -> Result<C<R>> {
    if den.norm() <= lit::<R>(DENOMINATOR_GUARD) * scale {
        Err(Error::SpectralSingularity { rcond: 0.0 })
    } else {
        Ok(den)
    }
}

/// Dimension-dependent amplitude prefactor `c_d`.
pub fn prefactor<R: Real>(dimension: Dimension) -> C<R> {
    match dimension {
        // -sqrt(i/(8 pi)), principal branch of the square root
        Dimension::Two => {
            let mag = (lit::<R>(8.0) * R::PI()).sqrt().recip();
            -Complex::from_polar(mag, R::FRAC_PI_4())
        }
        Dimension::Three => re(-(lit::<R>(4.0) * R::PI()).recip()),
    }
}

/// Full prefactor `c_d / sqrt(k^(3-d))`: `-sqrt(i/(8 pi k))` in 2D,
/// `-1/(4 pi)` in 3D.
pub fn amplitude_prefactor<R: Real>(dimension: Dimension, k: R) -> C<R> {
    match dimension {
        Dimension::Two => prefactor::<R>(dimension) / re(k.sqrt()),
        Dimension::Three => prefactor::<R>(dimension),
    }
}

/// A scattering amplitude with its derived differential cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeResult<R: Real> {
    pub f: C<R>,
    /// `|f|^2`.
    pub dcs: R,
    pub formulation: Formulation,
    pub dimension: Dimension,
    pub dirs: DirectionPair<R>,
}

impl<R: Real> AmplitudeResult<R> {
    fn new(f: C<R>, formulation: Formulation, dimension: Dimension, dirs: DirectionPair<R>) -> Self {
        AmplitudeResult { f, dcs: f.norm_sqr(), formulation, dimension, dirs }
    }
}

/// `|f|^2`, the differential cross-section.
#[inline]
pub fn differential_cross_section<R: Real>(result: &AmplitudeResult<R>) -> R {
    result.f.norm_sqr()
}

/// Amplitude for explicit incident/scattered wave vectors. This is the
/// core evaluation; everything angle-based wraps it.
pub fn amplitude_from_wave_vectors<R: Real>(
    scene: &Scene<R>,
    k_in: &[R],
    k_out: &[R],
) -> Result<(C<R>, SolveDiagnostics<R>)> {
    let a = kernel::build(scene)?;
    let b = solve::incident_phases(scene, k_in);
    let (f, diagnostics) = solve::solve_system(&a, &b)?;
    let mut sum = Complex::new(R::zero(), R::zero());
    for (m, s) in scene.scatterers().iter().enumerate() {
        let phase = Complex::from_polar(R::one(), -dot(&s.position, k_out));
        sum = sum + f[m] * phase;
    }
    Ok((amplitude_prefactor(scene.dimension(), scene.k()) * sum, diagnostics))
}

/// Scattering amplitude of a validated scene for the given directions.
pub fn scattering_amplitude<R: Real>(
    scene: &Scene<R>,
    dirs: &DirectionPair<R>,
) -> Result<(AmplitudeResult<R>, SolveDiagnostics<R>)> {
    dirs.validate(scene.dimension())?;
    let (k_in, k_out) = wave_vectors(scene, dirs);
    let (f, diagnostics) = amplitude_from_wave_vectors(scene, &k_in, &k_out)?;
    Ok((AmplitudeResult::new(f, scene.formulation(), scene.dimension(), *dirs), diagnostics))
}

/// Single-scatterer closed form:
/// 2D `f = -sqrt(i/(8 pi k)) e^(i a.(k - k')) / (1/z + i/4)`,
/// 3D `f = -e^(i a.(k - k')) / (4 pi / z + i k)`.
pub fn closed_form_single<R: Real>(
    dimension: Dimension,
    formulation: Formulation,
    coupling: C<R>,
    position: &[R],
    k: R,
    dirs: &DirectionPair<R>,
) -> Result<AmplitudeResult<R>> {
    dirs.validate(dimension)?;
    if position.len() != dimension.ambient() {
        return Err(Error::Domain { context: "closed_form_single position has the wrong dimension" });
    }
    if !(k.is_finite() && k > R::zero()) {
        return Err(Error::NonPositiveWavenumber { k: k.to_f64().unwrap_or(f64::NAN) });
    }
    if coupling.norm() == R::zero() {
        return Err(Error::ZeroCoupling { index: 0 });
    }
    let (k_in, k_out) = direction_vectors(dimension, k, dirs);
    let phase_arg = dot(position, &k_in) - dot(position, &k_out);
    let phase = Complex::from_polar(R::one(), phase_arg);
    let f = match dimension {
        Dimension::Two => {
            let den = coupling.inv() + i::<R>() * lit::<R>(0.25);
            let den = guard_denominator(den, coupling.inv().norm() + lit::<R>(0.25))?;
            amplitude_prefactor(dimension, k) * phase / den
        }
        Dimension::Three => {
            let four_pi = lit::<R>(4.0) * R::PI();
            let den = coupling.inv() * four_pi + i::<R>() * k;
            let den = guard_denominator(den, coupling.inv().norm() * four_pi + k)?;
            -phase / den
        }
    };
    Ok(AmplitudeResult::new(f, formulation, dimension, *dirs))
}

/// The two coefficients and the assembled amplitude of a two-scatterer
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDeltaClosedForm<R: Real> {
    pub f1: C<R>,
    pub f2: C<R>,
    pub amplitude: AmplitudeResult<R>,
}

/// Two-scatterer closed form in 2D for centers `a1 = 0`, `a2 = ell e_y`:
///
/// ```text
/// f  = -sqrt(i/(8 pi k)) [ f1 + f2 e^(-i k ell sin theta) ]
/// f1 = 4 [ 4/z2 + i - i K e^(is) ] / D      s = k ell sin theta0
/// f2 = 4 [ (4/z1 + i) e^(is) - i K ] / D
/// D  = (4/z1 + i)(4/z2 + i) + K^2
/// ```
///
/// with `K = H0^(1)(k ell)` for the standard formulation (requires
/// `ell > 0`) and `K = J0(k ell)` for DFSS (finite down to `ell = 0`).
pub fn closed_form_double_2d<R: Real>(
    z1: C<R>,
    z2: C<R>,
    ell: R,
    k: R,
    dirs: &DirectionPair<R>,
    formulation: Formulation,
) -> Result<DoubleDeltaClosedForm<R>> {
    if !(k.is_finite() && k > R::zero()) {
        return Err(Error::NonPositiveWavenumber { k: k.to_f64().unwrap_or(f64::NAN) });
    }
    if !ell.is_finite() || ell < R::zero() {
        return Err(Error::Domain { context: "closed_form_double_2d requires ell >= 0" });
    }
    if z1.norm() == R::zero() || z2.norm() == R::zero() {
        return Err(Error::ZeroCoupling { index: if z1.norm() == R::zero() { 0 } else { 1 } });
    }
    let x = k * ell;
    let kernel_value = match formulation {
        Formulation::StandardRenormalized => {
            if x < lit(COINCIDENCE_GUARD_K_ELL) {
                return Err(Error::KernelSingularity {
                    first: 0,
                    second: 1,
                    k_ell: x.to_f64().unwrap_or(f64::NAN),
                });
            }
            specfun::hankel1_0(x)?
        }
        Formulation::Dfss => re(specfun::bessel_j0(x)?),
    };
    let four = lit::<R>(4.0);
    let u = z1.inv() * four + i::<R>();
    let v = z2.inv() * four + i::<R>();
    let den = u * v + kernel_value * kernel_value;
    let den = guard_denominator(den, (u * v).norm() + kernel_value.norm_sqr() + R::one())?;
    let s = x * dirs.theta0.sin();
    let ep = Complex::from_polar(R::one(), s);
    let f1 = (v - i::<R>() * kernel_value * ep) * four / den;
    let f2 = (u * ep - i::<R>() * kernel_value) * four / den;
    let out_phase = Complex::from_polar(R::one(), -x * dirs.theta.sin());
    let f = amplitude_prefactor(Dimension::Two, k) * (f1 + f2 * out_phase);
    Ok(DoubleDeltaClosedForm {
        f1,
        f2,
        amplitude: AmplitudeResult::new(f, formulation, Dimension::Two, *dirs),
    })
}

/// Two-scatterer closed form in 3D for centers `a1 = 0`, `a2 = ell e_x`,
/// with `alpha0 = sin(theta0) cos(phi0)`:
///
/// ```text
/// f  = -(1/(4 pi)) [ f1 + f2 e^(-i k ell sin theta cos phi) ]
/// standard:  f1 = 4pi [ 4pi/z2 + ik - e^(i k ell (alpha0+1))/ell ] / D
///            D  = (4pi/z1 + ik)(4pi/z2 + ik) - e^(2 i k ell)/ell^2
/// DFSS:      f1 = 4pi [ 4pi/z2 + ik - i k sinc(k ell) e^(i k ell alpha0) ] / D
///            D  = (4pi/z1 + ik)(4pi/z2 + ik) + k^2 sinc^2(k ell)
/// ```
///
/// (`sin(k ell)/ell = k sinc(k ell)`, so the DFSS form is finite at
/// coincidence; the standard form requires `ell > 0`).
pub fn closed_form_double_3d<R: Real>(
    z1: C<R>,
    z2: C<R>,
    ell: R,
    k: R,
    dirs: &DirectionPair<R>,
    formulation: Formulation,
) -> Result<DoubleDeltaClosedForm<R>> {
    if !(k.is_finite() && k > R::zero()) {
        return Err(Error::NonPositiveWavenumber { k: k.to_f64().unwrap_or(f64::NAN) });
    }
    if !ell.is_finite() || ell < R::zero() {
        return Err(Error::Domain { context: "closed_form_double_3d requires ell >= 0" });
    }
    if z1.norm() == R::zero() || z2.norm() == R::zero() {
        return Err(Error::ZeroCoupling { index: if z1.norm() == R::zero() { 0 } else { 1 } });
    }
    let four_pi = lit::<R>(4.0) * R::PI();
    let x = k * ell;
    let alpha0 = dirs.theta0.sin() * dirs.phi0.cos();
    let u = z1.inv() * four_pi + i::<R>() * k;
    let v = z2.inv() * four_pi + i::<R>() * k;
    let ea = Complex::from_polar(R::one(), x * alpha0);
    // Off-diagonal coupling g: both denominators share the form u v - g^2.
    let g = match formulation {
        Formulation::StandardRenormalized => {
            if x < lit(COINCIDENCE_GUARD_K_ELL) {
                return Err(Error::KernelSingularity {
                    first: 0,
                    second: 1,
                    k_ell: x.to_f64().unwrap_or(f64::NAN),
                });
            }
            Complex::from_polar(ell.recip(), x) // e^{i k ell}/ell
        }
        Formulation::Dfss => i::<R>() * (k * specfun::sinc(x)), // i sin(k ell)/ell
    };
    let den = u * v - g * g;
    let den = guard_denominator(den, (u * v).norm() + g.norm_sqr() + R::one())?;
    let f1 = (v - g * ea) * four_pi / den;
    let f2 = (u * ea - g) * four_pi / den;
    let out_phase = Complex::from_polar(R::one(), -x * dirs.theta.sin() * dirs.phi.cos());
    let f = -(f1 + f2 * out_phase) / four_pi;
    Ok(DoubleDeltaClosedForm {
        f1,
        f2,
        amplitude: AmplitudeResult::new(f, formulation, Dimension::Three, *dirs),
    })
}

/// A wavefunction sample. `extrapolated` marks DFSS scenes, where the
/// position-space form reuses the standard reconstruction with the DFSS
/// matrix rather than a derivation of its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionSample<R: Real> {
    pub value: C<R>,
    pub extrapolated: bool,
}

/// Position-space wavefunction
/// `psi(x) = (2 pi)^(-d/2) e^(i k.x) + sum_n G(x - a_n) X_n`,
/// with `G` the free outgoing Green's function and `X` the rescaled
/// coefficient vector. Singular at the scatterer centers.
pub fn wavefunction_at<R: Real>(
    scene: &Scene<R>,
    incident: &DirectionPair<R>,
    x: &[R],
) -> Result<WavefunctionSample<R>> {
    let d = scene.dimension().ambient();
    if x.len() != d {
        return Err(Error::Domain { context: "wavefunction position has the wrong dimension" });
    }
    incident.validate(scene.dimension())?;
    for (index, s) in scene.scatterers().iter().enumerate() {
        let r = crate::model::distance(x, &s.position);
        if scene.k() * r < lit(COINCIDENCE_GUARD_K_ELL) {
            return Err(Error::EvaluationAtCenter { index });
        }
    }
    let a = kernel::build(scene)?;
    let (coeffs, _) = solve::solve_coefficients(&a, scene, incident)?;
    let (k_in, _) = wave_vectors(scene, incident);
    let norm = (lit::<R>(2.0) * R::PI()).powi(-(d as i32)).sqrt();
    let mut psi = Complex::from_polar(R::one(), dot(x, &k_in)) * norm;
    for (n, s) in scene.scatterers().iter().enumerate() {
        let offset: Vec<R> = x.iter().zip(&s.position).map(|(&a, &b)| a - b).collect();
        let g = green_free(scene.dimension(), scene.k(), &offset)?;
        psi = psi + g.value * coeffs.x[n];
    }
    Ok(WavefunctionSample { value: psi, extrapolated: scene.formulation() == Formulation::Dfss })
}
