//! Rotations, unit directions and the relative-motion algebra.
//!
//! Rotations are stored as plain 3×3 matrices. Every relation used by the
//! solver (composition around a circuit, inversion of an edge label, the
//! baseline form) is a matrix product, so no other representation is kept;
//! the angle-axis map only appears in noise injection and in metrics.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// An element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T: Scalar> {
    m: Matrix3<T>,
}

impl<T: Scalar> Rotation<T> {
    /// Orthonormality tolerance.
    pub fn orth_tolerance() -> T {
        T::tolerance(1e-9, 1e3)
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// Validates `m` against `RᵀR = I` and `det R = 1`.
    pub fn from_matrix(m: Matrix3<T>) -> Result<Self> {
        let defect = orthonormality_defect(&m);
        let det = m.determinant();
        let tol = Self::orth_tolerance();
        if defect > tol || (det - T::one()).abs() > tol {
            return Err(Error::NotARotation {
                defect: defect.as_f64(),
                det: det.as_f64(),
            });
        }
        Ok(Self { m })
    }

    /// Wraps `m` without checking it.
    pub fn from_matrix_unchecked(m: Matrix3<T>) -> Self {
        Self { m }
    }

    /// Nearest rotation in the Frobenius norm (polar projection).
    pub fn project(m: &Matrix3<T>) -> Result<Self> {
        let svd = m.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::Degenerate("svd of a 3x3 matrix failed".into())),
        };
        let mut d = Matrix3::identity();
        if (u * v_t).determinant() < T::zero() {
            d[(2, 2)] = -T::one();
        }
        Ok(Self { m: u * d * v_t })
    }

    /// Exponential map of a rotation vector (radians).
    pub fn from_scaled_axis(v: Vector3<T>) -> Self {
        Self {
            m: Rotation3::from_scaled_axis(v).into_inner(),
        }
    }

    /// Roll-pitch-yaw Euler angles in radians.
    pub fn from_euler_angles(roll: T, pitch: T, yaw: T) -> Self {
        Self {
            m: Rotation3::from_euler_angles(roll, pitch, yaw).into_inner(),
        }
    }

    /// Rotation by `angle` radians about `axis`.
    pub fn about_axis(axis: &Vector3<T>, angle: T) -> Result<Self> {
        let n = axis.norm();
        if n <= T::zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Self::from_scaled_axis(axis * (angle / n)))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix3<T> {
        &self.m
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    #[inline]
    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// Rotation angle in `[0, π]`.
    ///
    /// Uses `atan2(sin, cos)` from the skew and trace parts so small angles
    /// keep full relative precision.
    pub fn angle(&self) -> T {
        let m = &self.m;
        let half = T::lit(0.5);
        let w = Vector3::new(
            m[(2, 1)] - m[(1, 2)],
            m[(0, 2)] - m[(2, 0)],
            m[(1, 0)] - m[(0, 1)],
        ) * half;
        let cos = (m.trace() - T::one()) * half;
        w.norm().atan2(cos)
    }

    /// Logarithm as a rotation vector (axis times angle, radians).
    pub fn log(&self) -> Vector3<T> {
        Rotation3::from_matrix_unchecked(self.m).scaled_axis()
    }

    #[inline]
    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        self.m * v
    }

    pub fn cast<U: Scalar>(&self) -> Rotation<U> {
        Rotation {
            m: self.m.map(|x| U::lit(x.as_f64())),
        }
    }
}

impl<T: Scalar> Mul for Rotation<T> {
    type Output = Rotation<T>;

    fn mul(self, rhs: Self) -> Self::Output {
        Rotation { m: self.m * rhs.m }
    }
}

impl<T: Scalar> Mul<&Rotation<T>> for &Rotation<T> {
    type Output = Rotation<T>;

    fn mul(self, rhs: &Rotation<T>) -> Self::Output {
        Rotation { m: self.m * rhs.m }
    }
}

fn orthonormality_defect<T: Scalar>(m: &Matrix3<T>) -> T {
    let e = m.transpose() * m - Matrix3::identity();
    e.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3<T: Scalar> {
    v: Vector3<T>,
}

impl<T: Scalar> UnitVector3<T> {
    /// Normalizes `v`.
    pub fn new(v: Vector3<T>) -> Result<Self> {
        let n = v.norm();
        if !(n > T::tolerance(1e-300, 0.0)) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { v: v / n })
    }

    /// Wraps a vector that is already unit length.
    pub fn new_unchecked(v: Vector3<T>) -> Self {
        Self { v }
    }

    pub fn x_axis() -> Self {
        Self { v: Vector3::x() }
    }

    pub fn y_axis() -> Self {
        Self { v: Vector3::y() }
    }

    pub fn z_axis() -> Self {
        Self { v: Vector3::z() }
    }

    #[inline]
    pub fn as_vector(&self) -> &Vector3<T> {
        &self.v
    }

    #[inline]
    pub fn into_inner(self) -> Vector3<T> {
        self.v
    }

    /// Angle to another direction, radians.
    pub fn angle_to(&self, other: &Self) -> T {
        self.v.cross(&other.v).norm().atan2(self.v.dot(&other.v))
    }

    pub fn cast<U: Scalar>(&self) -> UnitVector3<U> {
        UnitVector3 {
            v: self.v.map(|x| U::lit(x.as_f64())),
        }
    }
}

impl<T: Scalar> std::ops::Neg for UnitVector3<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self { v: -self.v }
    }
}

/// Relative motion `(R_ij, t̂_ij)` of an edge, scale excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeMotion<T: Scalar> {
    pub rotation: Rotation<T>,
    pub direction: UnitVector3<T>,
}

impl<T: Scalar> RelativeMotion<T> {
    pub fn new(rotation: Rotation<T>, direction: UnitVector3<T>) -> Self {
        Self {
            rotation,
            direction,
        }
    }

    /// Label of the reversed edge: `(Rᵀ, −Rᵀ t̂)`. The scale is unchanged.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let d = -(rt.rotate(self.direction.as_vector()));
        Self {
            rotation: rt,
            direction: UnitVector3::new_unchecked(d),
        }
    }

    pub fn cast<U: Scalar>(&self) -> RelativeMotion<U> {
        RelativeMotion {
            rotation: self.rotation.cast(),
            direction: self.direction.cast(),
        }
    }
}

/// Inverts an edge label. `‖t_ji‖ = ‖t_ij‖`, so a scale hint passes through.
pub fn invert_relative<T: Scalar>(
    m: &RelativeMotion<T>,
    scale_hint: Option<T>,
) -> (RelativeMotion<T>, Option<T>) {
    (m.inverse(), scale_hint)
}

/// Composes two scaled relative motions, `M₁ M₂`.
///
/// Returns the rotation and the unnormalized translation
/// `α₁ t̂₁ + R₁ α₂ t̂₂`.
pub fn compose<T: Scalar>(
    first: &RelativeMotion<T>,
    first_scale: T,
    second: &RelativeMotion<T>,
    second_scale: T,
) -> Result<(Rotation<T>, Vector3<T>)> {
    for s in [first_scale, second_scale] {
        if !(s > T::zero()) {
            return Err(Error::NonPositiveScale(s.as_f64()));
        }
    }
    let rotation = first.rotation * second.rotation;
    let translation = first.direction.as_vector() * first_scale
        + first.rotation.rotate(second.direction.as_vector()) * second_scale;
    Ok((rotation, translation))
}

/// Metric on SO(3) used by the null-circuit test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMetric {
    /// Rotation angle of `R₁ᵀR₂`.
    #[default]
    Geodesic,
    /// `‖R₁ − R₂‖_F / √2`, which agrees with the angle to first order.
    Chordal,
}

impl RotationMetric {
    pub fn distance<T: Scalar>(self, a: &Rotation<T>, b: &Rotation<T>) -> T {
        match self {
            RotationMetric::Geodesic => geodesic_distance(a, b),
            RotationMetric::Chordal => (a.matrix() - b.matrix()).norm() / T::lit(2.0).sqrt(),
        }
    }
}

/// Bi-invariant angular distance, radians in `[0, π]`.
pub fn geodesic_distance<T: Scalar>(a: &Rotation<T>, b: &Rotation<T>) -> T {
    (a.transpose() * *b).angle()
}

/// Absolute pose `x_cam = R_i x_world + t_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsolutePose<T: Scalar> {
    pub rotation: Rotation<T>,
    pub translation: Vector3<T>,
}

impl<T: Scalar> AbsolutePose<T> {
    pub fn new(rotation: Rotation<T>, translation: Vector3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Pose whose optical center sits at `center`.
    pub fn from_center(rotation: Rotation<T>, center: Vector3<T>) -> Self {
        let translation = -(rotation.rotate(&center));
        Self {
            rotation,
            translation,
        }
    }

    /// Optical center `−Rᵀ t`.
    pub fn center(&self) -> Vector3<T> {
        -(self.rotation.transpose().rotate(&self.translation))
    }
}

/// `R_ij = R_i R_jᵀ`, `t_ij = −R_i R_jᵀ t_j + t_i`, split into direction and norm.
pub fn relative_from_absolute<T: Scalar>(
    pi: &AbsolutePose<T>,
    pj: &AbsolutePose<T>,
) -> Result<(RelativeMotion<T>, T)> {
    let rotation = pi.rotation * pj.rotation.transpose();
    let t = pi.translation - rotation.rotate(&pj.translation);
    let alpha = t.norm();
    if alpha < T::tolerance(1e-12, 4.0) {
        return Err(Error::CoincidentCenters(alpha.as_f64()));
    }
    let direction = UnitVector3::new_unchecked(t / alpha);
    Ok((RelativeMotion::new(rotation, direction), alpha))
}

/// Baseline versor `b̂_ij = −R_iᵀ t̂_ij`: the edge direction in the world frame.
pub fn baseline_versor<T: Scalar>(ri: &Rotation<T>, m: &RelativeMotion<T>) -> UnitVector3<T> {
    UnitVector3::new_unchecked(-(ri.transpose().rotate(m.direction.as_vector())))
}

fn check_sigma(sigma_deg: f64) -> Result<()> {
    if !(sigma_deg >= 0.0) {
        return Err(Error::NegativeNoise(sigma_deg));
    }
    Ok(())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    z * sigma
}

/// Left-multiplies by `exp(ξ)` with `ξ ~ N(0, σ² I₃)` in the tangent space.
///
/// The result is re-projected onto SO(3).
pub fn perturb_rotation<T: Scalar, R: Rng + ?Sized>(
    r: &Rotation<T>,
    sigma_deg: f64,
    rng: &mut R,
) -> Result<Rotation<T>> {
    check_sigma(sigma_deg)?;
    if sigma_deg == 0.0 {
        return Ok(*r);
    }
    let s = sigma_deg.to_radians();
    let xi = Vector3::new(
        T::lit(gaussian(rng, s)),
        T::lit(gaussian(rng, s)),
        T::lit(gaussian(rng, s)),
    );
    let noisy = Rotation::from_scaled_axis(xi) * *r;
    Rotation::project(noisy.matrix())
}

/// Adds `N(0, σ²)` to both spherical angles (polar, azimuth) of `d`.
///
/// Directions within `1e-8` of a pole are rotated a quarter turn about x
/// before perturbing and rotated back afterwards.
pub fn perturb_direction<T: Scalar, R: Rng + ?Sized>(
    d: &UnitVector3<T>,
    sigma_deg: f64,
    rng: &mut R,
) -> Result<UnitVector3<T>> {
    check_sigma(sigma_deg)?;
    if sigma_deg == 0.0 {
        return Ok(*d);
    }
    let s = sigma_deg.to_radians();
    let v = d.as_vector().map(|x| x.as_f64());
    let near_pole = 1.0 - v.z.abs() < 1e-8;
    let tilt = Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::FRAC_PI_2);
    let v = if near_pole { tilt * v } else { v };

    let polar = v.z.clamp(-1.0, 1.0).acos() + gaussian(rng, s);
    let azimuth = v.y.atan2(v.x) + gaussian(rng, s);
    let mut w = Vector3::new(
        polar.sin() * azimuth.cos(),
        polar.sin() * azimuth.sin(),
        polar.cos(),
    );
    if near_pole {
        w = tilt.inverse() * w;
    }
    UnitVector3::new(w.map(T::lit))
}

/// Haar-uniform rotation (normalized Gaussian quaternion).
pub fn random_rotation<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Rotation<T> {
    loop {
        let q = nalgebra::Quaternion::new(
            gaussian(rng, 1.0),
            gaussian(rng, 1.0),
            gaussian(rng, 1.0),
            gaussian(rng, 1.0),
        );
        if q.norm() > 1e-6 {
            let r = nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix();
            return Rotation::from_matrix_unchecked(r.into_inner().map(T::lit));
        }
    }
}

/// Rotation from Euler angles drawn uniformly in `[−π, π)`.
pub fn random_euler_rotation<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Rotation<T> {
    let pi = std::f64::consts::PI;
    let mut angle = || rng.random_range(-pi..pi);
    let (a, b, c) = (angle(), angle(), angle());
    Rotation::from_euler_angles(T::lit(a), T::lit(b), T::lit(c))
}

/// Uniform direction on the sphere.
pub fn random_unit_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> UnitVector3<T> {
    loop {
        let v = Vector3::new(gaussian(rng, 1.0), gaussian(rng, 1.0), gaussian(rng, 1.0));
        if v.norm() > 1e-6 {
            return UnitVector3::new_unchecked((v / v.norm()).map(T::lit));
        }
    }
}
