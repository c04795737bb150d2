//! Scene description and validation: dimensions, formulations, scatterer
//! lists, incidence/scattering directions, and the collinearity rules the
//! DFSS kernels require.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Ambient dimension of the scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    /// Number of spatial components.
    #[inline]
    pub fn ambient(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// Which treatment interprets the couplings.
///
/// `StandardRenormalized` reads the scene couplings as renormalized values
/// entering a Hankel/outgoing-exponential kernel that diverges at
/// coincidence. `Dfss` reads them as the physical couplings of the
/// dynamical formulation of stationary scattering, whose kernels (`J0` in
/// 2D, a cardinal sine in 3D) stay finite at every separation but are only
/// derived for collinear centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    StandardRenormalized,
    Dfss,
}

/// A point scatterer: a delta potential with a complex coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer<R: Real> {
    /// Position, `dimension.ambient()` components.
    pub position: Vec<R>,
    /// Complex coupling constant; must be nonzero.
    pub coupling: Complex<R>,
}

impl<R: Real> Scatterer<R> {
    pub fn new(position: Vec<R>, coupling: Complex<R>) -> Self {
        Scatterer { position, coupling }
    }
}

/// Unvalidated scene description.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig<R: Real> {
    pub dimension: Dimension,
    /// Wavenumber of the incident wave, `> 0`.
    pub k: R,
    pub scatterers: Vec<Scatterer<R>>,
    pub formulation: Formulation,
    /// Optional diagonal subtraction constants, one per scatterer
    /// (standard renormalized formulation only; default all zero).
    pub subtraction_constants: Option<Vec<R>>,
}

impl<R: Real> SceneConfig<R> {
    /// Validates every scene invariant; see [`validate_scene`].
    pub fn validate(self) -> Result<Scene<R>> {
        validate_scene(self)
    }
}

/// Maximum perpendicular deviation from the fitted axis, relative to the
/// largest pairwise distance, below which a scene counts as collinear.
pub const COLLINEARITY_REL_TOL: f64 = 1e-9;

/// A validated scene. Immutable; kernels and solvers take this type so the
/// invariants hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<R: Real> {
    config: SceneConfig<R>,
}

/// Checks all scene invariants and wraps the config:
///
/// * `k > 0` and finite,
/// * at least one scatterer, all couplings nonzero and finite,
/// * positions finite with the ambient number of components,
/// * subtraction constants (if any) standard-only and of matching length,
/// * DFSS scenes collinear within [`COLLINEARITY_REL_TOL`],
/// * standard scenes free of exactly coincident centers.
///
/// Validation is idempotent: a valid config round-trips unchanged.
pub fn validate_scene<R: Real>(config: SceneConfig<R>) -> Result<Scene<R>> {
    if !(config.k.is_finite() && config.k > R::zero()) {
        return Err(Error::NonPositiveWavenumber { k: config.k.to_f64().unwrap_or(f64::NAN) });
    }
    let n = config.scatterers.len();
    if n == 0 {
        return Err(Error::EmptyScene);
    }
    let d = config.dimension.ambient();
    for (index, s) in config.scatterers.iter().enumerate() {
        if s.position.len() != d || s.position.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadScatterer { index, expected: d });
        }
        if !s.coupling.re.is_finite() || !s.coupling.im.is_finite() {
            return Err(Error::BadScatterer { index, expected: d });
        }
        if s.coupling == Complex::new(R::zero(), R::zero()) {
            return Err(Error::ZeroCoupling { index });
        }
    }
    if let Some(cs) = &config.subtraction_constants {
        if config.formulation != Formulation::StandardRenormalized {
            return Err(Error::SubtractionConstantsForbidden);
        }
        if cs.len() != n {
            return Err(Error::SubtractionConstantsLength { expected: n, actual: cs.len() });
        }
        if cs.iter().any(|c| !c.is_finite()) {
            return Err(Error::SubtractionConstantsLength { expected: n, actual: cs.len() });
        }
    }
    match config.formulation {
        Formulation::Dfss => {
            let positions: Vec<&[R]> = config.scatterers.iter().map(|s| s.position.as_slice()).collect();
            let (max_dev, max_dist) = collinearity_deviation(&positions);
            let tolerance = lit::<R>(COLLINEARITY_REL_TOL) * max_dist;
            if max_dev > tolerance {
                return Err(Error::NonCollinearDfss {
                    max_deviation: max_dev.to_f64().unwrap_or(f64::NAN),
                    tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Formulation::StandardRenormalized => {
            for m in 0..n {
                for p in (m + 1)..n {
                    if config.scatterers[m].position == config.scatterers[p].position {
                        return Err(Error::DuplicatePositionStandard { first: m, second: p });
                    }
                }
            }
        }
    }
    Ok(Scene { config })
}

impl<R: Real> Scene<R> {
    pub fn config(&self) -> &SceneConfig<R> {
        &self.config
    }

    pub fn into_config(self) -> SceneConfig<R> {
        self.config
    }

    #[inline]
    pub fn dimension(&self) -> Dimension {
        self.config.dimension
    }

    #[inline]
    pub fn formulation(&self) -> Formulation {
        self.config.formulation
    }

    #[inline]
    pub fn k(&self) -> R {
        self.config.k
    }

    #[inline]
    pub fn num_scatterers(&self) -> usize {
        self.config.scatterers.len()
    }

    #[inline]
    pub fn scatterers(&self) -> &[Scatterer<R>] {
        &self.config.scatterers
    }

    #[inline]
    pub fn position(&self, n: usize) -> &[R] {
        &self.config.scatterers[n].position
    }

    #[inline]
    pub fn coupling(&self, n: usize) -> Complex<R> {
        self.config.scatterers[n].coupling
    }

    /// Diagonal subtraction constant for scatterer `n` (zero if unset).
    #[inline]
    pub fn subtraction_constant(&self, n: usize) -> R {
        self.config
            .subtraction_constants
            .as_ref()
            .map(|cs| cs[n])
            .unwrap_or_else(R::zero)
    }

    /// Euclidean distance between scatterers `m` and `n`.
    #[inline]
    pub fn separation(&self, m: usize, n: usize) -> R {
        distance(self.position(m), self.position(n))
    }

    /// Pairwise distance matrix (row-major, symmetric, zero diagonal).
    pub fn distance_matrix(&self) -> Vec<R> {
        let n = self.num_scatterers();
        let mut d = vec![R::zero(); n * n];
        for m in 0..n {
            for p in (m + 1)..n {
                let r = self.separation(m, p);
                d[m * n + p] = r;
                d[p * n + m] = r;
            }
        }
        d
    }

    /// Unit vector along the scene's fitted axis (the chord through the
    /// farthest pair), or `e_x` when all centers coincide.
    pub fn axis_direction(&self) -> Vec<R> {
        let positions: Vec<&[R]> = self.scatterers().iter().map(|s| s.position.as_slice()).collect();
        axis_of(&positions, self.dimension().ambient())
    }
}

/// Incidence and scattering directions in radians. In two dimensions only
/// the polar angles are used; in three dimensions `theta` is the polar
/// angle in `[0, pi]` and `phi` the azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPair<R: Real> {
    pub theta0: R,
    pub phi0: R,
    pub theta: R,
    pub phi: R,
}

impl<R: Real> DirectionPair<R> {
    /// 2D pair: incident angle `theta0`, scattered angle `theta`.
    pub fn planar(theta0: R, theta: R) -> Self {
        DirectionPair { theta0, phi0: R::zero(), theta, phi: R::zero() }
    }

    /// 3D pair in spherical angles.
    pub fn spherical(theta0: R, phi0: R, theta: R, phi: R) -> Self {
        DirectionPair { theta0, phi0, theta, phi }
    }

    /// Checks finiteness, and in 3D that the polar angles lie in `[0, pi]`.
    pub fn validate(&self, dimension: Dimension) -> Result<()> {
        let all_finite = self.theta0.is_finite()
            && self.phi0.is_finite()
            && self.theta.is_finite()
            && self.phi.is_finite();
        if !all_finite {
            return Err(Error::Domain { context: "angles must be finite" });
        }
        if dimension == Dimension::Three {
            let ok = |t: R| t >= R::zero() && t <= R::PI();
            if !(ok(self.theta0) && ok(self.theta)) {
                return Err(Error::Domain { context: "3D polar angles must lie in [0, pi]" });
            }
        }
        Ok(())
    }
}

/// Incident and scattered wave vectors for the scene's wavenumber.
pub fn wave_vectors<R: Real>(scene: &Scene<R>, dirs: &DirectionPair<R>) -> (Vec<R>, Vec<R>) {
    direction_vectors(scene.dimension(), scene.k(), dirs)
}

/// Incident and scattered wave vectors of magnitude `k`.
///
/// 2D: `k (cos t, sin t)`. 3D: `k (sin t cos p, sin t sin p, cos t)`, so
/// the `x`-components are `k sin(theta) cos(phi)`.
pub fn direction_vectors<R: Real>(
    dimension: Dimension,
    k: R,
    dirs: &DirectionPair<R>,
) -> (Vec<R>, Vec<R>) {
    match dimension {
        Dimension::Two => (
            vec![k * dirs.theta0.cos(), k * dirs.theta0.sin()],
            vec![k * dirs.theta.cos(), k * dirs.theta.sin()],
        ),
        Dimension::Three => (
            spherical_vector(k, dirs.theta0, dirs.phi0),
            spherical_vector(k, dirs.theta, dirs.phi),
        ),
    }
}

fn spherical_vector<R: Real>(k: R, theta: R, phi: R) -> Vec<R> {
    let st = theta.sin();
    vec![k * st * phi.cos(), k * st * phi.sin(), k * theta.cos()]
}

#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn distance<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter()
        .zip(b)
        .fold(R::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// Axis through the farthest pair of points (unit vector), `e_x` fallback.
fn axis_of<R: Real>(positions: &[&[R]], d: usize) -> Vec<R> {
    let mut best = (0usize, 0usize, R::zero());
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let r = distance(positions[i], positions[j]);
            if r > best.2 {
                best = (i, j, r);
            }
        }
    }
    let mut axis = vec![R::zero(); d];
    if best.2 > R::zero() {
        for c in 0..d {
            axis[c] = (positions[best.1][c] - positions[best.0][c]) / best.2;
        }
    } else {
        axis[0] = R::one();
    }
    axis
}

/// Maximum perpendicular deviation of the points from the chord through
/// their farthest pair, together with that largest pairwise distance.
pub fn collinearity_deviation<R: Real>(positions: &[&[R]]) -> (R, R) {
    if positions.len() < 2 {
        return (R::zero(), R::zero());
    }
    let d = positions[0].len();
    let mut max_dist = R::zero();
    let mut anchor = 0usize;
    let mut far = 0usize;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let r = distance(positions[i], positions[j]);
            if r > max_dist {
                max_dist = r;
                anchor = i;
                far = j;
            }
        }
    }
    if max_dist == R::zero() {
        return (R::zero(), R::zero());
    }
    let mut axis = vec![R::zero(); d];
    for c in 0..d {
        axis[c] = (positions[far][c] - positions[anchor][c]) / max_dist;
    }
    let mut max_dev = R::zero();
    for p in positions {
        let mut proj = R::zero();
        for c in 0..d {
            proj += (p[c] - positions[anchor][c]) * axis[c];
        }
        let mut dev_sq = R::zero();
        for c in 0..d {
            let perp = (p[c] - positions[anchor][c]) - proj * axis[c];
            dev_sq += perp * perp;
        }
        let dev = dev_sq.sqrt();
        if dev > max_dev {
            max_dev = dev;
        }
    }
    (max_dev, max_dist)
}

/// Orthogonal frame change produced by [`canonicalize`]: positions map as
/// `p -> R (p - origin_shift)` and direction vectors as `v -> R v`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTransform<R: Real> {
    /// Row-major rotation, `d x d`.
    pub rotation: Vec<R>,
    /// Subtracted before rotating (the first scatterer's original position).
    pub origin_shift: Vec<R>,
    dim: usize,
}

impl<R: Real> FrameTransform<R> {
    /// Applies the rotation to a direction vector (no translation).
    pub fn rotate(&self, v: &[R]) -> Vec<R> {
        let d = self.dim;
        (0..d)
            .map(|r| (0..d).fold(R::zero(), |acc, c| acc + self.rotation[r * d + c] * v[c]))
            .collect()
    }

    /// Maps a point into the canonical frame.
    pub fn map_point(&self, p: &[R]) -> Vec<R> {
        let shifted: Vec<R> = p.iter().zip(&self.origin_shift).map(|(&a, &b)| a - b).collect();
        self.rotate(&shifted)
    }
}

/// Rigidly moves a collinear scene so the first scatterer sits at the
/// origin and the centers lie on the x-axis. Returns the transformed scene
/// and the frame transform; apply [`FrameTransform::rotate`] to wave
/// vectors computed in the original frame to keep every inner product
/// `a · k` unchanged. Residual off-axis components (already below the
/// collinearity tolerance) are zeroed.
pub fn canonicalize<R: Real>(scene: &Scene<R>) -> Result<(Scene<R>, FrameTransform<R>)> {
    let d = scene.dimension().ambient();
    let axis = scene.axis_direction();
    let rotation = rotation_to_x_axis(&axis, d);
    let origin_shift = scene.position(0).to_vec();
    let transform = FrameTransform { rotation, origin_shift, dim: d };

    let mut config = scene.config().clone();
    for s in &mut config.scatterers {
        let mut mapped = transform.map_point(&s.position);
        for c in mapped.iter_mut().skip(1) {
            *c = R::zero();
        }
        s.position = mapped;
    }
    let canonical = validate_scene(config)?;
    Ok((canonical, transform))
}

/// Proper rotation whose first row is `axis`, so `R axis = e_x`.
fn rotation_to_x_axis<R: Real>(axis: &[R], d: usize) -> Vec<R> {
    let mut rot = vec![R::zero(); d * d];
    if d == 2 {
        rot[0] = axis[0];
        rot[1] = axis[1];
        rot[2] = -axis[1];
        rot[3] = axis[0];
    } else {
        // Rows: axis, a unit vector orthogonal to it, and their cross product.
        let u = axis;
        let seed: [R; 3] = if u[0].abs() < lit(0.9) {
            [R::one(), R::zero(), R::zero()]
        } else {
            [R::zero(), R::one(), R::zero()]
        };
        let proj = seed[0] * u[0] + seed[1] * u[1] + seed[2] * u[2];
        let mut v = [seed[0] - proj * u[0], seed[1] - proj * u[1], seed[2] - proj * u[2]];
        let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        for c in v.iter_mut() {
            *c /= vn;
        }
        let w = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        rot[0..3].copy_from_slice(u);
        rot[3..6].copy_from_slice(&v);
        rot[6..9].copy_from_slice(&w);
    }
    rot
}
