//! Property-based invariants over randomized inputs.

use deltascatter::amplitude::amplitude_from_wave_vectors;
use deltascatter::coincidence::merge_scatterers;
use deltascatter::kernel;
use deltascatter::model::{
    wave_vectors, Dimension, DirectionPair, Formulation, Scatterer, SceneConfig,
};
use deltascatter::solve::{detect_spectral_singularity, solve_coefficients};
use deltascatter::specfun::{bessel_j0, sinc};
use deltascatter::{Complex64, Scene64};
use proptest::prelude::*;

fn finite_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_filter("finite", |x| x.is_finite())
}

fn coupling() -> impl Strategy<Value = Complex64> {
    (finite_range(0.3, 3.0), finite_range(0.0, std::f64::consts::TAU))
        .prop_map(|(m, p)| Complex64::from_polar(m, p))
}

/// Collinear scene along a random axis; valid for both formulations.
fn collinear_scene(
    dimension: Dimension,
    formulation: Formulation,
) -> impl Strategy<Value = Scene64> {
    let d = dimension.ambient();
    (
        finite_range(0.4, 2.5),
        prop::collection::vec((finite_range(0.1, 1.5), coupling()), 1..5),
        prop::collection::vec(finite_range(-1.0, 1.0), d),
    )
        .prop_map(move |(k, steps, axis_seed)| {
            let norm: f64 = axis_seed.iter().map(|c| c * c).sum::<f64>().sqrt();
            let axis: Vec<f64> = if norm > 0.1 {
                axis_seed.iter().map(|c| c / norm).collect()
            } else {
                (0..d).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
            };
            let mut offset = 0.0;
            let scatterers = steps
                .into_iter()
                .map(|(gap, z)| {
                    offset += gap;
                    Scatterer::new(axis.iter().map(|u| u * offset).collect(), z)
                })
                .collect();
            SceneConfig { dimension, k, scatterers, formulation, subtraction_constants: None }
                .validate()
                .expect("constructed scenes are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// J0 and sinc are even and bounded by one on the real axis.
    #[test]
    fn special_functions_even_and_bounded(x in finite_range(-60.0, 60.0)) {
        let j = bessel_j0(x).unwrap();
        prop_assert_eq!(j, bessel_j0(-x).unwrap());
        prop_assert!(j.abs() <= 1.0 + 1e-15);
        let s = sinc(x);
        prop_assert_eq!(s, sinc(-x));
        prop_assert!(s.abs() <= 1.0 + 1e-15);
    }

    /// The interaction matrix is symmetric to the bit for every scene.
    #[test]
    fn interaction_matrix_is_symmetric(
        scene in collinear_scene(Dimension::Two, Formulation::Dfss),
    ) {
        let a = kernel::build(&scene).unwrap();
        let n = a.size();
        for m in 0..n {
            for p in 0..n {
                prop_assert_eq!(a.get(m, p), a.get(p, m));
            }
        }
    }

    /// Nonsingular solves leave a relative residual below 1e-10.
    #[test]
    fn solve_residual_is_tiny(
        scene in collinear_scene(Dimension::Three, Formulation::Dfss),
        theta0 in finite_range(0.0, std::f64::consts::PI),
        phi0 in finite_range(0.0, std::f64::consts::TAU),
    ) {
        let a = kernel::build(&scene).unwrap();
        prop_assume!(detect_spectral_singularity(&a).condition_estimate > 1e-6);
        let dirs = DirectionPair::spherical(theta0, phi0, 0.5, 0.0);
        let (_, diag) = solve_coefficients(&a, &scene, &dirs).unwrap();
        prop_assert!(diag.residual_norm <= 1e-10);
    }

    /// Reciprocity: swapping and negating the wave vectors fixes f.
    #[test]
    fn amplitude_reciprocity(
        scene in collinear_scene(Dimension::Two, Formulation::StandardRenormalized),
        theta0 in finite_range(0.0, std::f64::consts::TAU),
        theta in finite_range(0.0, std::f64::consts::TAU),
    ) {
        let a = kernel::build(&scene).unwrap();
        prop_assume!(detect_spectral_singularity(&a).condition_estimate > 1e-4);
        let dirs = DirectionPair::planar(theta0, theta);
        let (k_in, k_out) = wave_vectors(&scene, &dirs);
        let (f, _) = amplitude_from_wave_vectors(&scene, &k_in, &k_out).unwrap();
        prop_assume!(f.norm() > 1e-12);
        let neg_in: Vec<f64> = k_out.iter().map(|c| -c).collect();
        let neg_out: Vec<f64> = k_in.iter().map(|c| -c).collect();
        let (f_rec, _) = amplitude_from_wave_vectors(&scene, &neg_in, &neg_out).unwrap();
        prop_assert!((f - f_rec).norm() / f.norm() <= 1e-12);
    }

    /// Merging never changes the total coupling, whatever the tolerance.
    #[test]
    fn merge_preserves_total_coupling(
        scene in collinear_scene(Dimension::Two, Formulation::Dfss),
        tolerance in finite_range(0.0, 2.0),
    ) {
        let plan = merge_scatterers(&scene, tolerance);
        let before: Complex64 = scene.scatterers().iter().map(|s| s.coupling).sum();
        let after: Complex64 = plan.merged_scene.scatterers.iter().map(|s| s.coupling).sum();
        prop_assert!((before - after).norm() <= 1e-12 * before.norm().max(1.0));
        // groups partition the index set
        let mut seen: Vec<usize> = plan.groups.concat();
        seen.sort_unstable();
        let expect: Vec<usize> = (0..scene.num_scatterers()).collect();
        prop_assert_eq!(seen, expect);
    }

    /// Scene validation is idempotent.
    #[test]
    fn validation_is_idempotent(
        scene in collinear_scene(Dimension::Three, Formulation::StandardRenormalized),
    ) {
        let again = scene.config().clone().validate().unwrap();
        prop_assert_eq!(scene, again);
    }
}
