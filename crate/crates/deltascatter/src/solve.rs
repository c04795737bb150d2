//! Complex dense linear solves for the coefficient vector.
//!
//! The interaction matrix is complex symmetric (not Hermitian), so no
//! specialized factorization applies; a plain LU with partial pivoting is
//! used. A reciprocal condition estimate from the pivot magnitudes flags
//! spectral singularities, i.e. parameter sets at which `A` is not
//! invertible and the stationary problem has no unique scattering solution.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::InteractionMatrix;
use crate::model::{wave_vectors, DirectionPair, Scene};
use crate::scalar::{lit, Real};

/// Reciprocal-condition threshold below which a matrix counts as singular.
pub const SINGULARITY_RCOND_THRESHOLD: f64 = 1e-12;

/// Solver health report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics<R: Real> {
    /// Reciprocal condition estimate `min |u_ii| / max |u_ii|` from the
    /// pivoted factorization (0 for an exactly singular matrix).
    pub condition_estimate: R,
    /// `condition_estimate < 1e-12`.
    pub singular: bool,
    /// Relative residual `|A f - b| / |b|` of the returned solution
    /// (zero when no solve was performed).
    pub residual_norm: R,
}

/// Solution of `A f = b` with `b_m = exp(i a_m . k)`, together with the
/// rescaled coefficients `X_n = (2 pi)^(-d/2) f_n` that enter the
/// position-space wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<R: Real> {
    pub f: Vec<Complex<R>>,
    pub x: Vec<Complex<R>>,
}

/// LU factorization with partial pivoting of a complex dense matrix.
pub(crate) struct LuFactors<R: Real> {
    n: usize,
    data: Vec<Complex<R>>,
    pivots: Vec<usize>,
    rcond: R,
}

impl<R: Real> LuFactors<R> {
    /// Factors (a copy of) the matrix. Never fails; exact singularity is
    /// reported through `rcond() == 0`.
    pub fn new(matrix: &InteractionMatrix<R>) -> Self {
        let n = matrix.size();
        let mut data = matrix.entries().to_vec();
        let mut pivots = vec![0usize; n];
        let mut min_pivot = R::infinity();
        let mut max_pivot = R::zero();
        for col in 0..n {
            // partial pivoting on column magnitude
            let mut best = col;
            let mut best_mag = data[col * n + col].norm_sqr();
            for row in (col + 1)..n {
                let mag = data[row * n + col].norm_sqr();
                if mag > best_mag {
                    best_mag = mag;
                    best = row;
                }
            }
            pivots[col] = best;
            if best != col {
                for j in 0..n {
                    data.swap(col * n + j, best * n + j);
                }
            }
            let pivot = data[col * n + col];
            let mag = pivot.norm();
            if mag < min_pivot {
                min_pivot = mag;
            }
            if mag > max_pivot {
                max_pivot = mag;
            }
            if mag == R::zero() {
                continue; // leave the zero column; rcond reports singularity
            }
            for row in (col + 1)..n {
                let factor = data[row * n + col] / pivot;
                data[row * n + col] = factor;
                for j in (col + 1)..n {
                    let sub = factor * data[col * n + j];
                    data[row * n + j] = data[row * n + j] - sub;
                }
            }
        }
        let rcond = if max_pivot == R::zero() { R::zero() } else { min_pivot / max_pivot };
        LuFactors { n, data, pivots, rcond }
    }

    #[inline]
    pub fn rcond(&self) -> R {
        self.rcond
    }

    #[inline]
    pub fn is_singular(&self) -> bool {
        self.rcond < lit(SINGULARITY_RCOND_THRESHOLD)
    }

    /// Solves `A x = b` via the stored factors.
    pub fn solve(&self, b: &[Complex<R>]) -> Vec<Complex<R>> {
        let n = self.n;
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.pivots[col]);
        }
        // forward substitution, unit lower triangle
        for row in 1..n {
            for col in 0..row {
                let sub = self.data[row * n + col] * x[col];
                x[row] = x[row] - sub;
            }
        }
        // back substitution
        for row in (0..n).rev() {
            for col in (row + 1)..n {
                let sub = self.data[row * n + col] * x[col];
                x[row] = x[row] - sub;
            }
            x[row] = x[row] / self.data[row * n + row];
        }
        x
    }
}

fn mat_vec<R: Real>(a: &InteractionMatrix<R>, x: &[Complex<R>]) -> Vec<Complex<R>> {
    let n = a.size();
    (0..n)
        .map(|m| (0..n).fold(Complex::new(R::zero(), R::zero()), |acc, j| acc + a.get(m, j) * x[j]))
        .collect()
}

fn norm2<R: Real>(v: &[Complex<R>]) -> R {
    v.iter().fold(R::zero(), |acc, c| acc + c.norm_sqr()).sqrt()
}

/// Incident-wave phases `b_m = exp(i a_m . k_in)`.
pub fn incident_phases<R: Real>(scene: &Scene<R>, k_in: &[R]) -> Vec<Complex<R>> {
    scene
        .scatterers()
        .iter()
        .map(|s| {
            let phase = crate::model::dot(&s.position, k_in);
            Complex::from_polar(R::one(), phase)
        })
        .collect()
}

/// Factors `A`, reports the condition estimate, and if nonsingular solves
/// for the right-hand side with one step of iterative refinement.
pub(crate) fn solve_system<R: Real>(
    a: &InteractionMatrix<R>,
    b: &[Complex<R>],
) -> Result<(Vec<Complex<R>>, SolveDiagnostics<R>)> {
    let lu = LuFactors::new(a);
    if lu.is_singular() {
        return Err(Error::SpectralSingularity { rcond: lu.rcond().to_f64().unwrap_or(f64::NAN) });
    }
    let mut x = lu.solve(b);
    let b_norm = norm2(b);
    let residual = |x: &[Complex<R>]| -> (Vec<Complex<R>>, R) {
        let ax = mat_vec(a, x);
        let r: Vec<Complex<R>> = b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect();
        let rel = if b_norm > R::zero() { norm2(&r) / b_norm } else { norm2(&r) };
        (r, rel)
    };
    let (r, mut rel) = residual(&x);
    if rel > lit(1e-13) {
        // one refinement pass tightens marginally conditioned solves
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi = *xi + *di;
        }
        rel = residual(&x).1;
    }
    Ok((
        x,
        SolveDiagnostics { condition_estimate: lu.rcond(), singular: false, residual_norm: rel },
    ))
}

/// Solves the interaction system for a scene and incidence direction:
/// `sum_n A_mn f_n = exp(i a_m . k_in)`. Returns the coefficient vector
/// (both `f` and `X = (2 pi)^(-d/2) f`) and the solver diagnostics.
pub fn solve_coefficients<R: Real>(
    a: &InteractionMatrix<R>,
    scene: &Scene<R>,
    dirs: &DirectionPair<R>,
) -> Result<(CoefficientVector<R>, SolveDiagnostics<R>)> {
    dirs.validate(scene.dimension())?;
    let (k_in, _) = wave_vectors(scene, dirs);
    let b = incident_phases(scene, &k_in);
    let (f, diagnostics) = solve_system(a, &b)?;
    let d = scene.dimension().ambient() as i32;
    let scale = (lit::<R>(2.0) * R::PI()).powi(-d).sqrt();
    let x = f.iter().map(|&fi| fi * scale).collect();
    Ok((CoefficientVector { f, x }, diagnostics))
}

/// Factors `A` and reports whether it is numerically singular, without
/// solving anything.
pub fn detect_spectral_singularity<R: Real>(a: &InteractionMatrix<R>) -> SolveDiagnostics<R> {
    let lu = LuFactors::new(a);
    SolveDiagnostics {
        condition_estimate: lu.rcond(),
        singular: lu.is_singular(),
        residual_norm: R::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel;
    use crate::model::{Dimension, Formulation, Scatterer, SceneConfig};
    use num_complex::Complex;

    type C = Complex<f64>;

    fn dfss_2d(k: f64, data: &[(&[f64], C)]) -> Scene<f64> {
        SceneConfig {
            dimension: Dimension::Two,
            k,
            scatterers: data.iter().map(|(p, z)| Scatterer::new(p.to_vec(), *z)).collect(),
            formulation: Formulation::Dfss,
            subtraction_constants: None,
        }
        .validate()
        .unwrap()
    }

    /// Closed-form 2x2 inverse used as an independent check on the LU path.
    fn solve_2x2(a: [[C; 2]; 2], b: [C; 2]) -> [C; 2] {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        [
            (a[1][1] * b[0] - a[0][1] * b[1]) / det,
            (a[0][0] * b[1] - a[1][0] * b[0]) / det,
        ]
    }

    /// Cofactor-expansion 3x3 inverse applied to a right-hand side.
    fn solve_3x3(a: [[C; 3]; 3], b: [C; 3]) -> [C; 3] {
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
        };
        let det = a[0][0] * minor(1, 2, 1, 2) - a[0][1] * minor(1, 2, 0, 2)
            + a[0][2] * minor(1, 2, 0, 1);
        let mut x = [C::new(0.0, 0.0); 3];
        // adjugate columns applied to b
        let cof = [
            [minor(1, 2, 1, 2), -minor(0, 2, 1, 2), minor(0, 1, 1, 2)],
            [-minor(1, 2, 0, 2), minor(0, 2, 0, 2), -minor(0, 1, 0, 2)],
            [minor(1, 2, 0, 1), -minor(0, 2, 0, 1), minor(0, 1, 0, 1)],
        ];
        for r in 0..3 {
            for (c, bc) in b.iter().enumerate() {
                x[r] += cof[r][c] * bc;
            }
            x[r] /= det;
        }
        x
    }

    #[test]
    fn single_scatterer_inversion() {
        let scene = dfss_2d(1.0, &[(&[0.0, 0.0], C::new(4.0, 0.0))]);
        let a = kernel::build(&scene).unwrap();
        let dirs = DirectionPair::planar(0.0, 0.5);
        let (coeffs, diag) = solve_coefficients(&a, &scene, &dirs).unwrap();
        // 1/(1/4 + i/4) = 2 - 2i
        assert!((coeffs.f[0] - C::new(2.0, -2.0)).norm() < 1e-14);
        assert!(!diag.singular);
        assert!(diag.residual_norm <= 1e-13);
        // X = f / (2 pi) in two dimensions
        let expected_x = coeffs.f[0] / (2.0 * std::f64::consts::PI);
        assert!((coeffs.x[0] - expected_x).norm() < 1e-16);
    }

    #[test]
    fn forced_pole_is_a_spectral_singularity() {
        // 1/(4i) + i/4 = 0 exactly.
        let scene = dfss_2d(1.0, &[(&[0.0, 0.0], C::new(0.0, 4.0))]);
        let a = kernel::build(&scene).unwrap();
        let dirs = DirectionPair::planar(0.0, 0.5);
        match solve_coefficients(&a, &scene, &dirs) {
            Err(Error::SpectralSingularity { .. }) => {}
            other => panic!("expected spectral singularity, got {other:?}"),
        }
        let diag = detect_spectral_singularity(&a);
        assert!(diag.singular);
    }

    #[test]
    fn two_by_two_matches_cofactor_inverse() {
        let scene = dfss_2d(
            1.0,
            &[
                (&[0.0, 0.0], C::new(1.0, 0.0)),
                (&[0.0, 1.0], C::new(1.0, 0.0)),
            ],
        );
        let a = kernel::build(&scene).unwrap();
        let dirs = DirectionPair::planar(0.0, 0.0);
        let (coeffs, _) = solve_coefficients(&a, &scene, &dirs).unwrap();
        let am = [[a.get(0, 0), a.get(0, 1)], [a.get(1, 0), a.get(1, 1)]];
        // theta0 = 0: k_in = (1, 0), positions (0,0) and (0,1) -> b = (1, 1)
        let b = [C::new(1.0, 0.0), C::new(1.0, 0.0)];
        let reference = solve_2x2(am, b);
        for (got, want) in coeffs.f.iter().zip(&reference) {
            assert!((got - want).norm() / want.norm() <= 1e-12);
        }
    }

    #[test]
    fn three_by_three_matches_cofactor_inverse() {
        let scene = dfss_2d(
            1.4,
            &[
                (&[0.0, 0.0], C::new(1.0, 0.3)),
                (&[0.9, 0.0], C::new(-0.7, 1.1)),
                (&[2.2, 0.0], C::new(0.5, -0.4)),
            ],
        );
        let a = kernel::build(&scene).unwrap();
        let dirs = DirectionPair::planar(0.35, 1.0);
        let (coeffs, _) = solve_coefficients(&a, &scene, &dirs).unwrap();
        let am = [
            [a.get(0, 0), a.get(0, 1), a.get(0, 2)],
            [a.get(1, 0), a.get(1, 1), a.get(1, 2)],
            [a.get(2, 0), a.get(2, 1), a.get(2, 2)],
        ];
        let (k_in, _) = wave_vectors(&scene, &dirs);
        let bv = incident_phases(&scene, &k_in);
        let reference = solve_3x3(am, [bv[0], bv[1], bv[2]]);
        for (got, want) in coeffs.f.iter().zip(&reference) {
            assert!((got - want).norm() / want.norm() <= 1e-11);
        }
    }

    #[test]
    fn detect_on_trivial_matrices() {
        // 1x1 [1] nonsingular; 1x1 [0] singular. Construct via couplings:
        // z = i*4 makes the diagonal vanish; z = 4 gives 1/4 + i/4.
        let ok = dfss_2d(1.0, &[(&[0.0, 0.0], C::new(4.0, 0.0))]);
        let a = kernel::build(&ok).unwrap();
        assert!(!detect_spectral_singularity(&a).singular);
        assert!((detect_spectral_singularity(&a).condition_estimate - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tuned_determinant_zero_is_detected() {
        // For the 2D DFSS pair at k*l = 1, det A(z) = (1/z + i/4)^2 - (i J0(1)/4)^2
        // is real on the imaginary coupling axis: det(it) = J0^2/16 - (1/4 - 1/t)^2.
        // Root found by a secant iteration in t.
        let ell = 1.0;
        let det_at = |t: f64| -> f64 {
            let z = C::new(0.0, t);
            let scene = dfss_2d(
                1.0,
                &[(&[0.0, 0.0], z), (&[0.0, ell], z)],
            );
            let a = kernel::build(&scene).unwrap();
            let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
            det.re
        };
        let mut t0 = 15.0;
        let mut t1 = 19.0;
        for _ in 0..60 {
            let f0 = det_at(t0);
            let f1 = det_at(t1);
            if f1 == f0 || !f1.is_finite() {
                break;
            }
            let t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
            if !t2.is_finite() {
                break;
            }
            t0 = t1;
            t1 = t2;
            if (t1 - t0).abs() <= 1e-13 * t1.abs() {
                break;
            }
        }
        // frozen root of the secant iteration: z = 4i / (1 - J0(1))
        assert!((t1 - 17.035607279003643).abs() < 1e-9);
        let z = C::new(0.0, t1);
        let scene = dfss_2d(1.0, &[(&[0.0, 0.0], z), (&[0.0, ell], z)]);
        let a = kernel::build(&scene).unwrap();
        assert!(detect_spectral_singularity(&a).singular);
    }

    #[test]
    fn coefficients_depend_on_incidence_only_through_phases() {
        let scene = dfss_2d(
            1.3,
            &[
                (&[0.0, 0.0], C::new(1.0, 0.2)),
                (&[0.8, 0.0], C::new(-0.6, 0.9)),
                (&[1.7, 0.0], C::new(0.5, 0.0)),
            ],
        );
        let a = kernel::build(&scene).unwrap();
        // shifting theta0 only changes the right-hand side phases
        for th0 in [0.77, 1.9] {
            let dirs = DirectionPair::planar(th0, 0.1);
            let (coeffs, _) = solve_coefficients(&a, &scene, &dirs).unwrap();
            let (k_in, _) = wave_vectors(&scene, &dirs);
            let b = incident_phases(&scene, &k_in);
            let (f2, _) = solve_system(&a, &b).unwrap();
            for (x, y) in coeffs.f.iter().zip(&f2) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn residual_is_small_for_well_conditioned_systems() {
        let scene = dfss_2d(
            0.9,
            &[
                (&[0.0, 0.0], C::new(2.0, 0.1)),
                (&[1.1, 0.0], C::new(1.0, -0.3)),
                (&[2.4, 0.0], C::new(-1.5, 0.8)),
                (&[3.0, 0.0], C::new(0.3, 0.3)),
            ],
        );
        let a = kernel::build(&scene).unwrap();
        let dirs = DirectionPair::planar(0.4, 1.2);
        let (_, diag) = solve_coefficients(&a, &scene, &dirs).unwrap();
        assert!(diag.residual_norm <= 1e-10, "residual {}", diag.residual_norm);
    }
}
