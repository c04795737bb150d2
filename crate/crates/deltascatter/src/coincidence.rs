//! Merging of near-coincident scatterers and numerical coincidence-limit
//! studies.
//!
//! Collapsing a cluster of delta scatterers onto one center with the
//! summed coupling must leave the DFSS amplitude unchanged in the limit of
//! vanishing cluster size; the standard renormalized amplitude instead
//! decays to zero when any pair closes (logarithmically in 2D, linearly in
//! 3D). [`merge_scatterers`] builds the collapsed scene, [`coincidence_sweep`]
//! records the amplitude along a shrinking-separation grid, and
//! [`verify_merge_invariance`] checks the collapsed-vs-merged agreement on
//! an arbitrary subgroup.

use num_complex::Complex;

use crate::amplitude::amplitude_from_wave_vectors;
use crate::error::{Error, Result};
use crate::model::{wave_vectors, DirectionPair, Formulation, Scatterer, Scene, SceneConfig};
use crate::scalar::{lit, Real};
use crate::solve::SolveDiagnostics;

type C<R> = Complex<R>;

/// A clustering of the scene's scatterers plus the collapsed scene.
///
/// Each group is replaced by a single scatterer whose coupling is the
/// exact sum over members and whose position is the unweighted centroid of
/// the members' original positions (complex couplings admit no meaningful
/// weighting; at merge tolerances the difference is below test noise).
/// Because the centroid is always taken over original members, merging
/// clusters pairwise in any order yields the same representative as a
/// one-shot merge.
#[derive(Debug, Clone, PartialEq)]
pub struct MergePlan<R: Real> {
    /// Partition of the scatterer indices, each group ascending, groups
    /// ordered by their smallest member.
    pub groups: Vec<Vec<usize>>,
    /// The collapsed scene (unvalidated: a group's coupling sum may
    /// legitimately vanish, which validation rejects).
    pub merged_scene: SceneConfig<R>,
}

/// Single-linkage clustering of the scatterers with the given distance
/// tolerance: two scatterers share a group when a chain of pairwise
/// distances `<= tolerance` connects them.
pub fn merge_scatterers<R: Real>(scene: &Scene<R>, tolerance: R) -> MergePlan<R> {
    let n = scene.num_scatterers();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if scene.separation(i, j) <= tolerance {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = b.min(a);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(i);
    }

    let d = scene.dimension().ambient();
    let mut merged = Vec::with_capacity(groups.len());
    let mut constants = Vec::with_capacity(groups.len());
    for group in &groups {
        let mut coupling = Complex::new(R::zero(), R::zero());
        let mut centroid = vec![R::zero(); d];
        for &idx in group {
            coupling = coupling + scene.coupling(idx);
            for (c, p) in centroid.iter_mut().zip(scene.position(idx)) {
                *c += *p;
            }
        }
        let count = lit::<R>(group.len() as f64);
        for c in centroid.iter_mut() {
            *c /= count;
        }
        merged.push(Scatterer::new(centroid, coupling));
        // subtraction constants have no merge rule; keep the first member's
        constants.push(scene.subtraction_constant(group[0]));
    }
    let subtraction_constants = if scene.config().subtraction_constants.is_some() {
        Some(constants)
    } else {
        None
    };
    MergePlan {
        groups,
        merged_scene: SceneConfig {
            dimension: scene.dimension(),
            k: scene.k(),
            scatterers: merged,
            formulation: scene.formulation(),
            subtraction_constants,
        },
    }
}

/// Amplitudes along a shrinking-separation grid for one scatterer pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitStudy<R: Real> {
    pub k: R,
    /// Strictly decreasing separations.
    pub ell_grid: Vec<R>,
    /// Amplitude per grid point; `None` where the solve hit a singularity.
    pub amplitudes: Vec<Option<C<R>>>,
    /// Merged-scene amplitude (DFSS) or zero (standard: the collapsing
    /// amplitude has no finite nonzero limit).
    pub reference: C<R>,
    /// Log-log slope of `|f - reference|` against `ell`, when fittable.
    pub convergence_rate: Option<R>,
}

/// Returns a copy of the scene with scatterer `pair.1` moved along the
/// line of centers so that its distance to `pair.0` equals `ell`. When the
/// pair coincides the scene's fitted axis sets the direction.
pub fn scene_with_separation<R: Real>(
    scene: &Scene<R>,
    pair: (usize, usize),
    ell: R,
) -> Result<Scene<R>> {
    let (i, j) = pair;
    let n = scene.num_scatterers();
    if i >= n || j >= n || i == j {
        return Err(Error::Domain { context: "separation override needs two distinct valid indices" });
    }
    if !(ell.is_finite() && ell >= R::zero()) {
        return Err(Error::Domain { context: "separation must be nonnegative and finite" });
    }
    let d = scene.separation(i, j);
    let direction: Vec<R> = if d > R::zero() {
        scene
            .position(j)
            .iter()
            .zip(scene.position(i))
            .map(|(&a, &b)| (a - b) / d)
            .collect()
    } else {
        scene.axis_direction()
    };
    let mut config = scene.config().clone();
    let anchor = scene.position(i).to_vec();
    for (c, (&a, &u)) in config.scatterers[j]
        .position
        .iter_mut()
        .zip(anchor.iter().zip(&direction))
    {
        *c = a + u * ell;
    }
    config.validate()
}

/// Sweeps the separation of `pair` over `ell_grid` (sorted to strictly
/// decreasing order) and records the amplitude at each point. Spectral and
/// kernel singularities are recorded per point rather than aborting the
/// study.
pub fn coincidence_sweep<R: Real>(
    scene: &Scene<R>,
    pair: (usize, usize),
    ell_grid: &[R],
    dirs: &DirectionPair<R>,
) -> Result<LimitStudy<R>> {
    dirs.validate(scene.dimension())?;
    if ell_grid.is_empty() {
        return Err(Error::Domain { context: "coincidence sweep needs a nonempty grid" });
    }
    if ell_grid.iter().any(|e| !(e.is_finite() && *e > R::zero())) {
        return Err(Error::Domain { context: "coincidence sweep grid must be positive" });
    }
    let mut grid = ell_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    grid.dedup();

    let reference = match scene.formulation() {
        Formulation::Dfss => {
            let merged = merge_pair(scene, pair)?;
            let (r, _) = amplitude_of(&merged, dirs)?;
            r
        }
        Formulation::StandardRenormalized => Complex::new(R::zero(), R::zero()),
    };

    let mut amplitudes = Vec::with_capacity(grid.len());
    for &ell in &grid {
        let point = scene_with_separation(scene, pair, ell).and_then(|s| amplitude_of(&s, dirs));
        match point {
            Ok((f, _)) => amplitudes.push(Some(f)),
            Err(Error::SpectralSingularity { .. }) | Err(Error::KernelSingularity { .. }) => {
                amplitudes.push(None)
            }
            Err(other) => return Err(other),
        }
    }
    let convergence_rate = log_log_slope(&grid, &amplitudes, reference);
    Ok(LimitStudy { k: scene.k(), ell_grid: grid, amplitudes, reference, convergence_rate })
}

fn amplitude_of<R: Real>(
    scene: &Scene<R>,
    dirs: &DirectionPair<R>,
) -> Result<(C<R>, SolveDiagnostics<R>)> {
    let (k_in, k_out) = wave_vectors(scene, dirs);
    amplitude_from_wave_vectors(scene, &k_in, &k_out)
}

/// Collapses `pair.1` into `pair.0`: summed coupling at the position of
/// `pair.0`. Merging a cluster one pair at a time this way agrees with the
/// one-shot [`merge_scatterers`] plan once the members coincide.
pub fn merge_pair<R: Real>(scene: &Scene<R>, pair: (usize, usize)) -> Result<Scene<R>> {
    let (i, j) = pair;
    let n = scene.num_scatterers();
    if i >= n || j >= n || i == j {
        return Err(Error::Domain { context: "merge needs two distinct valid indices" });
    }
    let mut config = scene.config().clone();
    let sum = scene.coupling(i) + scene.coupling(j);
    config.scatterers[i].coupling = sum;
    config.scatterers.remove(j);
    if let Some(cs) = config.subtraction_constants.as_mut() {
        cs.remove(j);
    }
    config.validate()
}

fn log_log_slope<R: Real>(grid: &[R], amplitudes: &[Option<C<R>>], reference: C<R>) -> Option<R> {
    let points: Vec<(R, R)> = grid
        .iter()
        .zip(amplitudes)
        .filter_map(|(&ell, f)| {
            f.and_then(|f| {
                let dev = (f - reference).norm();
                (dev > R::zero()).then(|| (ell.ln(), dev.ln()))
            })
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = lit::<R>(points.len() as f64);
    let mx = points.iter().fold(R::zero(), |a, p| a + p.0) / n;
    let my = points.iter().fold(R::zero(), |a, p| a + p.1) / n;
    let sxx = points.iter().fold(R::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = points.iter().fold(R::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    (sxx > R::zero()).then(|| sxy / sxx)
}

/// Result of a collapsed-vs-merged comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeInvariance<R: Real> {
    /// Amplitude with the group shrunk to pairwise `k*l = 1e-8` spacings.
    pub collapsed: C<R>,
    /// Amplitude of the explicitly merged scene.
    pub merged: C<R>,
    pub relative_error: R,
}

/// Pairwise spacing (in units of `1/k`) used when a group is collapsed for
/// the merge-invariance check. A tiny nonzero value tests continuity at
/// the same time; exact zero is also legal for DFSS kernels.
pub const COLLAPSE_K_ELL: f64 = 1e-8;

/// Collapses `group` onto its first member (members spaced `k*l = 1e-8`
/// apart along the scene axis), computes the amplitude, and compares it
/// with the scene where the group is replaced by one scatterer carrying
/// the summed coupling at the first member's position. DFSS scenes only:
/// the standard kernel has no finite coincidence limit to verify.
pub fn verify_merge_invariance<R: Real>(
    scene: &Scene<R>,
    group: &[usize],
    dirs: &DirectionPair<R>,
) -> Result<MergeInvariance<R>> {
    if scene.formulation() != Formulation::Dfss {
        return Err(Error::ConfigMismatch { context: "merge invariance applies to DFSS scenes" });
    }
    let n = scene.num_scatterers();
    if group.len() < 2 || group.iter().any(|&g| g >= n) {
        return Err(Error::Domain { context: "merge group needs at least two valid indices" });
    }
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != group.len() {
        return Err(Error::Domain { context: "merge group indices must be distinct" });
    }

    let axis = scene.axis_direction();
    let spacing = lit::<R>(COLLAPSE_K_ELL) / scene.k();
    let anchor = scene.position(sorted[0]).to_vec();

    // collapsed scene: group members strung out at tiny spacings
    let mut collapsed = scene.config().clone();
    for (step, &idx) in sorted.iter().enumerate().skip(1) {
        let offset = spacing * lit::<R>(step as f64);
        for (c, (&a, &u)) in collapsed.scatterers[idx]
            .position
            .iter_mut()
            .zip(anchor.iter().zip(&axis))
        {
            *c = a + u * offset;
        }
    }
    let collapsed = collapsed.validate()?;
    let (f_collapsed, _) = amplitude_of(&collapsed, dirs)?;

    // merged scene: one scatterer with the summed coupling at the anchor
    let mut merged = scene.config().clone();
    let total: C<R> = sorted
        .iter()
        .fold(Complex::new(R::zero(), R::zero()), |acc, &idx| acc + scene.coupling(idx));
    merged.scatterers[sorted[0]].coupling = total;
    merged.scatterers[sorted[0]].position = anchor;
    for &idx in sorted.iter().skip(1).rev() {
        merged.scatterers.remove(idx);
        if let Some(cs) = merged.subtraction_constants.as_mut() {
            cs.remove(idx);
        }
    }
    let merged = merged.validate()?;
    let (f_merged, _) = amplitude_of(&merged, dirs)?;

    let relative_error = (f_collapsed - f_merged).norm() / f_merged.norm();
    Ok(MergeInvariance { collapsed: f_collapsed, merged: f_merged, relative_error })
}

/// Least-squares single-coefficient fit of a decay model, with the worst
/// relative deviation of the data from the fitted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<R: Real> {
    pub coefficient: R,
    pub max_relative_residual: R,
}

/// Fits `|f| = C / |ln(k ell)|` over the study's valid points.
pub fn fit_inverse_log<R: Real>(study: &LimitStudy<R>) -> Option<DecayFit<R>> {
    fit_model(study, |k_ell| k_ell.ln().abs().recip())
}

/// Fits `|f| = C * (k ell)` over the study's valid points.
pub fn fit_linear<R: Real>(study: &LimitStudy<R>) -> Option<DecayFit<R>> {
    fit_model(study, |k_ell| k_ell)
}

fn fit_model<R: Real>(study: &LimitStudy<R>, model: impl Fn(R) -> R) -> Option<DecayFit<R>> {
    let mut ratios = Vec::new();
    for (&ell, f) in study.ell_grid.iter().zip(&study.amplitudes) {
        if let Some(f) = f {
            let m = model(study.k * ell);
            if m > R::zero() && f.norm() > R::zero() {
                ratios.push(f.norm() / m);
            }
        }
    }
    if ratios.len() < 2 {
        return None;
    }
    // geometric mean minimizes the squared log-residuals
    let n = lit::<R>(ratios.len() as f64);
    let coefficient = (ratios.iter().fold(R::zero(), |a, r| a + r.ln()) / n).exp();
    let max_relative_residual = ratios
        .iter()
        .map(|&r| (r / coefficient - R::one()).abs())
        .fold(R::zero(), R::max);
    Some(DecayFit { coefficient, max_relative_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Dimension;
    use num_complex::Complex;

    type C64 = Complex<f64>;

    fn scene(
        dimension: Dimension,
        k: f64,
        formulation: Formulation,
        data: &[(&[f64], C64)],
    ) -> Scene<f64> {
        SceneConfig {
            dimension,
            k,
            scatterers: data.iter().map(|(p, z)| Scatterer::new(p.to_vec(), *z)).collect(),
            formulation,
            subtraction_constants: None,
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn distant_scatterers_do_not_merge() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], C64::new(1.0, 0.0)),
                (&[2.0, 0.0], C64::new(2.0, 0.0)),
            ],
        );
        let plan = merge_scatterers(&s, 1e-6);
        assert_eq!(plan.groups, vec![vec![0], vec![1]]);
        assert_eq!(plan.merged_scene.scatterers.len(), 2);
    }

    #[test]
    fn coincident_triple_merges_with_summed_coupling() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[1.0, 0.0], C64::new(1.0, 0.0)),
                (&[1.0, 0.0], C64::new(2.0, 0.0)),
                (&[1.0, 0.0], C64::new(3.0, 0.0)),
            ],
        );
        let plan = merge_scatterers(&s, 0.0);
        assert_eq!(plan.groups, vec![vec![0, 1, 2]]);
        assert_eq!(plan.merged_scene.scatterers[0].coupling, C64::new(6.0, 0.0));
        assert_eq!(plan.merged_scene.scatterers[0].position, vec![1.0, 0.0]);
    }

    #[test]
    fn single_linkage_chains_through_intermediate_points() {
        // spacing eps with eps < tol < 2 eps: the chain collapses entirely.
        let eps = 1e-4;
        let tol = 1.5e-4;
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], C64::new(1.0, 0.0)),
                (&[eps, 0.0], C64::new(1.0, 0.0)),
                (&[2.0 * eps, 0.0], C64::new(1.0, 0.0)),
            ],
        );
        let plan = merge_scatterers(&s, tol);
        assert_eq!(plan.groups, vec![vec![0, 1, 2]]);
        // centroid of the three original positions
        assert!((plan.merged_scene.scatterers[0].position[0] - eps).abs() < 1e-19);
    }

    #[test]
    fn merge_preserves_total_coupling() {
        let zs = [C64::new(1.0, 0.5), C64::new(-2.0, 1.0), C64::new(0.25, -0.125)];
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], zs[0]),
                (&[1e-9, 0.0], zs[1]),
                (&[5.0, 0.0], zs[2]),
            ],
        );
        let plan = merge_scatterers(&s, 1e-6);
        let total_before: C64 = zs.iter().sum();
        let total_after: C64 = plan.merged_scene.scatterers.iter().map(|s| s.coupling).sum();
        assert_eq!(total_before, total_after);
    }

    #[test]
    fn dfss_sweep_converges_to_merged_amplitude() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], C64::new(1.0, 0.0)),
                (&[1.0, 0.0], C64::new(1.0, 0.0)),
            ],
        );
        let dirs = DirectionPair::planar(0.4, 1.1);
        let grid: Vec<f64> = (2..=6).map(|e| 10f64.powi(-e)).collect();
        let study = coincidence_sweep(&s, (0, 1), &grid, &dirs).unwrap();
        let mut last = f64::INFINITY;
        for (ell, f) in study.ell_grid.iter().zip(&study.amplitudes) {
            let f = f.expect("no singular points in this sweep");
            let rel = (f - study.reference).norm() / study.reference.norm();
            assert!(rel < last, "not monotone at ell={ell}");
            last = rel;
        }
        assert!(last <= 1e-4);
        // the deviation decays like a power of ell
        let rate = study.convergence_rate.unwrap();
        assert!(rate > 0.5, "rate {rate}");
    }

    #[test]
    fn standard_sweep_reference_is_zero_and_decays() {
        let s = scene(
            Dimension::Three,
            1.0,
            Formulation::StandardRenormalized,
            &[
                (&[0.0, 0.0, 0.0], C64::new(1.0, 0.0)),
                (&[1.0, 0.0, 0.0], C64::new(1.0, 0.0)),
            ],
        );
        let dirs = DirectionPair::spherical(0.4, 0.0, 1.1, 0.3);
        let grid: Vec<f64> = (3..=6).map(|e| 10f64.powi(-e)).collect();
        let study = coincidence_sweep(&s, (0, 1), &grid, &dirs).unwrap();
        assert_eq!(study.reference, C64::new(0.0, 0.0));
        // |f| = O(k ell): the log-log slope is 1
        let rate = study.convergence_rate.unwrap();
        assert!((rate - 1.0).abs() < 0.05, "rate {rate}");
        let fit = fit_linear(&study).unwrap();
        assert!(fit.max_relative_residual <= 0.05);
    }

    #[test]
    fn standard_2d_sweep_decays_like_an_inverse_logarithm() {
        // large fixed couplings keep the O(1/ln) corrections small over
        // the finite window; the collapse itself happens for any value
        let z = C64::new(10.0, 0.0);
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::StandardRenormalized,
            &[(&[0.0, 0.0], z), (&[0.0, 1.0], z)],
        );
        let dirs = DirectionPair::planar(0.3, 1.1);
        let grid: Vec<f64> = (3..=8).map(|e| 10f64.powi(-e)).collect();
        let study = coincidence_sweep(&s, (0, 1), &grid, &dirs).unwrap();
        let mut last = f64::INFINITY;
        for f in study.amplitudes.iter().flatten() {
            assert!(f.norm() < last, "|f| must decrease toward coincidence");
            last = f.norm();
        }
        let fit = fit_inverse_log(&study).unwrap();
        assert!(fit.max_relative_residual <= 0.10, "residual {}", fit.max_relative_residual);
    }

    #[test]
    fn sweep_records_singular_points_without_aborting() {
        // z tuned so det A(l) = 0 at k*l = 1: 1/z + i/4 = +- i J0(k l)/4.
        // At the grid point ell = 1 the solve is singular; elsewhere fine.
        let j0_1 = 0.7651976865579666;
        let z = C64::new(0.0, 4.0 / (1.0 - j0_1));
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[(&[0.0, 0.0], z), (&[1.0, 0.0], z)],
        );
        let dirs = DirectionPair::planar(0.0, 0.5);
        let study = coincidence_sweep(&s, (0, 1), &[2.0, 1.0, 0.5], &dirs).unwrap();
        assert!(study.amplitudes[0].is_some());
        assert!(study.amplitudes[1].is_none(), "expected a singular point at ell = 1");
        assert!(study.amplitudes[2].is_some());
    }

    #[test]
    fn collapse_all_matches_single_scatterer_form() {
        let zs = [C64::new(1.0, 0.2), C64::new(0.5, -0.4), C64::new(-0.3, 0.9)];
        let s = scene(
            Dimension::Two,
            1.3,
            Formulation::Dfss,
            &[
                (&[0.0, 0.0], zs[0]),
                (&[0.7, 0.0], zs[1]),
                (&[1.9, 0.0], zs[2]),
            ],
        );
        let dirs = DirectionPair::planar(0.3, 1.0);
        let report = verify_merge_invariance(&s, &[0, 1, 2], &dirs).unwrap();
        assert!(report.relative_error <= 1e-6, "err {}", report.relative_error);
        let total: C64 = zs.iter().sum();
        let single = crate::amplitude::closed_form_single(
            Dimension::Two,
            Formulation::Dfss,
            total,
            &[0.0, 0.0],
            1.3,
            &dirs,
        )
        .unwrap();
        assert!((report.merged - single.f).norm() / single.f.norm() <= 1e-12);
    }

    #[test]
    fn merge_invariance_requires_dfss() {
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::StandardRenormalized,
            &[
                (&[0.0, 0.0], C64::new(1.0, 0.0)),
                (&[1.0, 0.0], C64::new(1.0, 0.0)),
            ],
        );
        let dirs = DirectionPair::planar(0.0, 0.5);
        assert!(matches!(
            verify_merge_invariance(&s, &[0, 1], &dirs),
            Err(Error::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn sequential_and_oneshot_merging_agree() {
        // exactly coincident group: merging pairwise in any order gives the
        // same collapsed scene as a one-shot merge.
        let zs = [C64::new(1.0, 0.1), C64::new(2.0, -0.3), C64::new(-0.5, 0.7)];
        let s = scene(
            Dimension::Two,
            1.0,
            Formulation::Dfss,
            &[
                (&[2.0, 0.0], zs[0]),
                (&[2.0, 0.0], zs[1]),
                (&[2.0, 0.0], zs[2]),
                (&[5.0, 0.0], C64::new(1.0, 0.0)),
            ],
        );
        let dirs = DirectionPair::planar(0.2, 0.9);
        let oneshot = merge_scatterers(&s, 0.0).merged_scene.validate().unwrap();
        // pairwise: merge (0,1) then (0,2-shifted)
        let step1 = merge_pair(&s, (0, 1)).unwrap();
        let step2 = merge_pair(&step1, (0, 1)).unwrap();
        let (fa, _) = amplitude_of(&oneshot, &dirs).unwrap();
        let (fb, _) = amplitude_of(&step2, &dirs).unwrap();
        assert!((fa - fb).norm() / fa.norm() <= 1e-10);
    }
}
