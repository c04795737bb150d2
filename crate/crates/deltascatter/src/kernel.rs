//! Interaction-matrix construction.
//!
//! For a scene of `N` scatterers this module builds the dense complex
//! symmetric matrix `A` whose inverse carries the scattering amplitude:
//!
//! ```text
//! standard 2D:  A_nn = 1/z_n + c_n + i/4          A_mn = (i/4) H0^(1)(k l_mn)
//! standard 3D:  A_nn = 1/z_n + c_n + i k/(4 pi)   A_mn = e^(i k l_mn) / (4 pi l_mn)
//! DFSS 2D:      A_nn = 1/z_n + i/4                A_mn = (i/4) J0(k l_mn)
//! DFSS 3D:      A_nn = 1/z_n + i k/(4 pi)         A_mn = (i k/(4 pi)) sinc(k l_mn)
//! ```
//!
//! with `l_mn` the pairwise distances. The standard off-diagonals diverge
//! at coincidence; building one inside the guard is a hard error rather
//! than a clamped value, since that divergence is exactly the behavior the
//! limit studies probe. The DFSS entries are finite for every collinear
//! configuration including full coincidence. Both DFSS kernels are
//! instances of one regular form `A_mn = gamma_d Q_d(k l_mn)` with
//! `gamma_2 = i/4, Q_2 = J0` and `gamma_3 = ik/4pi, Q_3 = sinc`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Dimension, Formulation, Scene};
use crate::scalar::{lit, Real};
use crate::specfun;

/// Standard kernels refuse pairs with `k*l` below this guard.
pub const COINCIDENCE_GUARD_K_ELL: f64 = 1e-12;

/// Dense complex symmetric `N x N` interaction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix<R: Real> {
    n: usize,
    dimension: Dimension,
    formulation: Formulation,
    k: R,
    entries: Vec<Complex<R>>,
}

impl<R: Real> InteractionMatrix<R> {
    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    #[inline]
    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    #[inline]
    pub fn k(&self) -> R {
        self.k
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> Complex<R> {
        self.entries[m * self.n + n]
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<R>] {
        &self.entries
    }
}

/// Diagonal constant `gamma_d`: `i/4` in 2D, `ik/(4 pi)` in 3D.
#[inline]
pub fn gamma_d<R: Real>(dimension: Dimension, k: R) -> Complex<R> {
    match dimension {
        Dimension::Two => Complex::new(R::zero(), lit(0.25)),
        Dimension::Three => Complex::new(R::zero(), k / (lit::<R>(4.0) * R::PI())),
    }
}

/// Builds the interaction matrix for any (dimension, formulation) pair.
pub fn build<R: Real>(scene: &Scene<R>) -> Result<InteractionMatrix<R>> {
    match (scene.dimension(), scene.formulation()) {
        (Dimension::Two, Formulation::StandardRenormalized) => build_standard_2d(scene),
        (Dimension::Three, Formulation::StandardRenormalized) => build_standard_3d(scene),
        (Dimension::Two, Formulation::Dfss) => build_dfss_2d(scene),
        (Dimension::Three, Formulation::Dfss) => build_dfss_3d(scene),
    }
}

fn expect_scene<R: Real>(
    scene: &Scene<R>,
    dimension: Dimension,
    formulation: Formulation,
) -> Result<()> {
    if scene.dimension() != dimension || scene.formulation() != formulation {
        return Err(Error::ConfigMismatch {
            context: "scene dimension/formulation does not match the requested kernel",
        });
    }
    Ok(())
}

/// Assembles the lower/upper triangle from `off(k*l, l)` and the diagonal
/// from `1/z_n + shift_n`. Only `m < n` is computed and mirrored, so the
/// matrix is symmetric to the bit.
fn assemble<R: Real>(
    scene: &Scene<R>,
    diag_shift: impl Fn(usize) -> Complex<R>,
    off: impl Fn(R, R) -> Result<Complex<R>>,
) -> Result<InteractionMatrix<R>> {
    let n = scene.num_scatterers();
    let k = scene.k();
    let mut entries = vec![Complex::new(R::zero(), R::zero()); n * n];
    for m in 0..n {
        entries[m * n + m] = scene.coupling(m).inv() + diag_shift(m);
        for p in (m + 1)..n {
            let ell = scene.separation(m, p);
            let value = off(k * ell, ell).map_err(|e| match e {
                Error::KernelSingularity { k_ell, .. } => {
                    Error::KernelSingularity { first: m, second: p, k_ell }
                }
                other => other,
            })?;
            entries[m * n + p] = value;
            entries[p * n + m] = value;
        }
    }
    Ok(InteractionMatrix {
        n,
        dimension: scene.dimension(),
        formulation: scene.formulation(),
        k,
        entries,
    })
}

fn guard_standard<R: Real>(k_ell: R) -> Result<()> {
    if k_ell < lit(COINCIDENCE_GUARD_K_ELL) {
        return Err(Error::KernelSingularity {
            first: 0,
            second: 0,
            k_ell: k_ell.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Standard renormalized kernel in two dimensions.
pub fn build_standard_2d<R: Real>(scene: &Scene<R>) -> Result<InteractionMatrix<R>> {
    expect_scene(scene, Dimension::Two, Formulation::StandardRenormalized)?;
    let gamma = gamma_d(Dimension::Two, scene.k());
    assemble(
        scene,
        |m| Complex::new(scene.subtraction_constant(m), R::zero()) + gamma,
        |k_ell, _| {
            guard_standard(k_ell)?;
            Ok(gamma * specfun::hankel1_0(k_ell)?)
        },
    )
}

/// Standard renormalized kernel in three dimensions.
pub fn build_standard_3d<R: Real>(scene: &Scene<R>) -> Result<InteractionMatrix<R>> {
    expect_scene(scene, Dimension::Three, Formulation::StandardRenormalized)?;
    let gamma = gamma_d(Dimension::Three, scene.k());
    let four_pi = lit::<R>(4.0) * R::PI();
    assemble(
        scene,
        |m| Complex::new(scene.subtraction_constant(m), R::zero()) + gamma,
        |k_ell, ell| {
            guard_standard(k_ell)?;
            let phase = Complex::new(R::zero(), k_ell).exp();
            Ok(phase / (four_pi * ell))
        },
    )
}

/// DFSS kernel in two dimensions; finite at every separation.
pub fn build_dfss_2d<R: Real>(scene: &Scene<R>) -> Result<InteractionMatrix<R>> {
    expect_scene(scene, Dimension::Two, Formulation::Dfss)?;
    let gamma = gamma_d(Dimension::Two, scene.k());
    assemble(
        scene,
        |_| gamma,
        |k_ell, _| Ok(gamma * specfun::bessel_j0(k_ell)?),
    )
}

/// DFSS kernel in three dimensions; finite at every separation.
pub fn build_dfss_3d<R: Real>(scene: &Scene<R>) -> Result<InteractionMatrix<R>> {
    expect_scene(scene, Dimension::Three, Formulation::Dfss)?;
    let gamma = gamma_d(Dimension::Three, scene.k());
    assemble(scene, |_| gamma, |k_ell, _| Ok(gamma * specfun::sinc(k_ell)))
}

/// Regular kernel factor `Q_d` of the unified DFSS form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularKernel {
    BesselJ0,
    Sinc,
}

impl RegularKernel {
    /// `Q_d(0+) = 1` for both kernels.
    pub fn eval<R: Real>(self, x: R) -> Result<R> {
        match self {
            RegularKernel::BesselJ0 => specfun::bessel_j0(x),
            RegularKernel::Sinc => Ok(specfun::sinc(x)),
        }
    }
}

/// Parameters of the unified DFSS kernel `A_mn = gamma_d Q_d(k l_mn)`.
/// The pairing of `gamma_d` and `Q_d` is fixed by the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedKernelParams<R: Real> {
    pub dimension: Dimension,
    pub gamma: Complex<R>,
    pub q: RegularKernel,
}

impl<R: Real> UnifiedKernelParams<R> {
    pub fn for_dimension(dimension: Dimension, k: R) -> Self {
        let q = match dimension {
            Dimension::Two => RegularKernel::BesselJ0,
            Dimension::Three => RegularKernel::Sinc,
        };
        UnifiedKernelParams { dimension, gamma: gamma_d(dimension, k), q }
    }
}

/// Builds the unified-form matrix for a DFSS scene; entrywise identical to
/// the dimension-specific builder.
pub fn build_unified<R: Real>(
    params: &UnifiedKernelParams<R>,
    scene: &Scene<R>,
) -> Result<InteractionMatrix<R>> {
    if scene.formulation() != Formulation::Dfss {
        return Err(Error::ConfigMismatch { context: "unified kernel applies to DFSS scenes" });
    }
    if params.dimension != scene.dimension() {
        return Err(Error::ConfigMismatch { context: "unified kernel params built for another dimension" });
    }
    let expected = UnifiedKernelParams::for_dimension(scene.dimension(), scene.k());
    if params.q != expected.q || params.gamma != expected.gamma {
        return Err(Error::ConfigMismatch { context: "unified kernel params do not match the scene" });
    }
    let gamma = params.gamma;
    let q = params.q;
    assemble(scene, |_| gamma, |k_ell, _| Ok(gamma * q.eval(k_ell)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SceneConfig, Scatterer};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;

    fn scene(
        dimension: Dimension,
        k: f64,
        formulation: Formulation,
        data: &[(&[f64], Complex<f64>)],
    ) -> Scene<f64> {
        SceneConfig {
            dimension,
            k,
            scatterers: data
                .iter()
                .map(|(p, z)| Scatterer::new(p.to_vec(), *z))
                .collect(),
            formulation,
            subtraction_constants: None,
        }
        .validate()
        .unwrap()
    }

    // J0(1), Y0(1) from the series oracle, frozen.
    const J0_1: f64 = 0.7651976865579666;
    const Y0_1: f64 = 0.08825696421567696;

    #[test]
    fn standard_2d_single_diagonal() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::StandardRenormalized,
            &[(&[0.0, 0.0], Complex::new(4.0, 0.0))],
        );
        let a = build_standard_2d(&s).unwrap();
        assert_eq!(a.get(0, 0), Complex::new(0.25, 0.25));
    }

    #[test]
    fn standard_2d_offdiagonal_is_hankel() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::StandardRenormalized,
            &[
                (&[0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[0.0, 1.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_standard_2d(&s).unwrap();
        let expected = Complex::new(0.0, 0.25) * Complex::new(J0_1, Y0_1);
        assert_abs_diff_eq!(a.get(0, 1).re, expected.re, epsilon = 1e-14);
        assert_abs_diff_eq!(a.get(0, 1).im, expected.im, epsilon = 1e-14);
    }

    #[test]
    fn standard_3d_entries() {
        let s = scene(
            Dimension::Three,
            1.0,
            Formulation::StandardRenormalized,
            &[
                (&[0.0, 0.0, 0.0], Complex::new(4.0 * std::f64::consts::PI, 0.0)),
                (&[1.0, 0.0, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_standard_3d(&s).unwrap();
        let inv4pi = 1.0 / (4.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(a.get(0, 0).re, inv4pi, epsilon = 1e-15);
        assert_abs_diff_eq!(a.get(0, 0).im, inv4pi, epsilon = 1e-15);
        let expected = Complex::new(1.0f64.cos(), 1.0f64.sin()) * inv4pi;
        assert_abs_diff_eq!(a.get(1, 0).re, expected.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.get(1, 0).im, expected.im, epsilon = 1e-15);
    }

    #[test]
    fn standard_guard_fires_inside_coincidence_window() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::StandardRenormalized,
            &[
                (&[0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[1e-13, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        match build_standard_2d(&s) {
            Err(Error::KernelSingularity { first: 0, second: 1, .. }) => {}
            other => panic!("expected kernel singularity, got {other:?}"),
        }
    }

    #[test]
    fn dfss_2d_finite_at_zero_separation() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[0.0, 0.0], Complex::new(2.0, 0.0)),
            ],
        );
        let a = build_dfss_2d(&s).unwrap();
        assert_eq!(a.get(0, 1), Complex::new(0.0, 0.25));
    }

    #[test]
    fn dfss_2d_vanishes_at_first_bessel_zero() {
        let ell = 2.404825557695773;
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[ell, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_dfss_2d(&s).unwrap();
        assert!(a.get(0, 1).norm() <= 1e-12);
    }

    #[test]
    fn dfss_3d_entries() {
        let pi = std::f64::consts::PI;
        let s = scene(
            Dimension::Three,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[0.5, 0.0, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_dfss_3d(&s).unwrap();
        let expected = 0.958851077208406 / (4.0 * pi);
        assert_abs_diff_eq!(a.get(0, 1).im, expected, epsilon = 1e-15);
        assert_eq!(a.get(0, 1).re, 0.0);

        // sin(pi) = 0 kills the off-diagonal at k*l = pi.
        let s = scene(
            Dimension::Three,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[pi, 0.0, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_dfss_3d(&s).unwrap();
        assert!(a.get(0, 1).norm() <= 1e-15);

        // near-coincidence tends to i/(4 pi)
        let s = scene(
            Dimension::Three,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0, 0.0], Complex::new(1.0, 0.0)),
                (&[1e-12, 0.0, 0.0], Complex::new(1.0, 0.0)),
            ],
        );
        let a = build_dfss_3d(&s).unwrap();
        assert_abs_diff_eq!(a.get(0, 1).im, 1.0 / (4.0 * pi), epsilon = 1e-15);
    }

    #[test]
    fn unified_form_matches_dimension_specific_builders() {
        let s2 = scene(
            Dimension::Two,
            1.7,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], Complex::new(1.0, 0.3)),
                (&[0.9, 0.0], Complex::new(-0.5, 1.0)),
                (&[2.1, 0.0], Complex::new(2.0, 0.0)),
            ],
        );
        let direct = build_dfss_2d(&s2).unwrap();
        let unified = build_unified(&UnifiedKernelParams::for_dimension(Dimension::Two, 1.7), &s2).unwrap();
        for (a, b) in direct.entries().iter().zip(unified.entries()) {
            assert!((a - b).norm() <= 1e-15);
        }

        let s3 = scene(
            Dimension::Three,
            0.8,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0, 0.0], Complex::new(1.0, 0.3)),
                (&[1.2, 0.0, 0.0], Complex::new(0.4, -0.1)),
            ],
        );
        let direct = build_dfss_3d(&s3).unwrap();
        let unified = build_unified(&UnifiedKernelParams::for_dimension(Dimension::Three, 0.8), &s3).unwrap();
        for (a, b) in direct.entries().iter().zip(unified.entries()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn gamma_d_values() {
        let g2: Complex<f64> = gamma_d(Dimension::Two, 5.0);
        assert_eq!(g2, Complex::new(0.0, 0.25));
        let g3: Complex<f64> = gamma_d(Dimension::Three, 2.0);
        assert_abs_diff_eq!(g3.im, 1.0 / (2.0 * std::f64::consts::PI), epsilon = 1e-16);
    }

    #[test]
    fn unified_rejects_mismatches() {
        let s2 = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[(&[0.0, 0.0], Complex::new(1.0, 0.0))],
        );
        let wrong_dim = UnifiedKernelParams::for_dimension(Dimension::Three, 1.0);
        assert!(matches!(build_unified(&wrong_dim, &s2), Err(Error::ConfigMismatch { .. })));
        let mut wrong_pairing = UnifiedKernelParams::for_dimension(Dimension::Two, 1.0);
        wrong_pairing.q = RegularKernel::Sinc;
        assert!(matches!(build_unified(&wrong_pairing, &s2), Err(Error::ConfigMismatch { .. })));
    }

    #[test]
    fn symmetry_is_exact_and_permutation_consistent() {
        let positions: [&[f64]; 3] = [&[0.0, 0.0], &[1.3, 0.7], &[-0.4, 2.2]];
        let zs = [Complex::new(1.0, 0.2), Complex::new(-0.7, 1.1), Complex::new(0.5, -0.5)];
        let s = scene(
            Dimension::Two,
            1.1,
            Formulation::StandardRenormalized,
            &[(positions[0], zs[0]), (positions[1], zs[1]), (positions[2], zs[2])],
        );
        let a = build(&s).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(a.get(m, n), a.get(n, m));
            }
        }
        // permuting the scatterers permutes rows and columns
        let perm = [2usize, 0, 1];
        let sp = scene(
            Dimension::Two,
            1.1,
            Formulation::StandardRenormalized,
            &[
                (positions[perm[0]], zs[perm[0]]),
                (positions[perm[1]], zs[perm[1]]),
                (positions[perm[2]], zs[perm[2]]),
            ],
        );
        let ap = build(&sp).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(ap.get(m, n), a.get(perm[m], perm[n]));
            }
        }
    }
}
