use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::{identity2, pauli, ComplexMatrix, I};
use crate::error::{Error, Result};

/// Inputs within this distance of unit norm are normalized; others are rejected.
pub const NORMALIZE_TOLERANCE: f64 = 1e-6;

/// Unit vector on the Bloch sphere, defining the dichotomic observable σ·n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const X: Self = Self([1.0, 0.0, 0.0]);
    pub const Y: Self = Self([0.0, 1.0, 0.0]);
    pub const Z: Self = Self([0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_array([x, y, z])
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZE_TOLERANCE {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self(v.map(|c| c / norm)))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self(v.map(|c| c / norm)))
    }

    /// Direction with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self([st * cp, st * sp, ct])
    }

    /// Polar and azimuthal angles `(theta, phi)`.
    pub fn angles(&self) -> (f64, f64) {
        let [x, y, z] = self.0;
        (z.clamp(-1.0, 1.0).acos(), y.atan2(x))
    }

    /// Uniformly distributed direction.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
            if let Ok(b) = Self::normalized(v) {
                return b;
            }
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot3(&self.0, &other.0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.map(|c| -c))
    }

    /// Applies a 3×3 rotation (rows) and renormalizes.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        let v = std::array::from_fn(|i| dot3(&r[i], &self.0));
        Self::normalized(v).expect("rotation of a unit vector is nonzero")
    }
}

impl<'de> Deserialize<'de> for BlochVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 3]>::deserialize(d)?;
        Self::from_array(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Bloch vector of a possibly mixed qubit state, `‖r‖ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedBloch([f64; 3]);

impl MixedBloch {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = norm3(&r);
        if !norm.is_finite() || norm > 1.0 + Self::TOLERANCE {
            return Err(Error::BlochOutsideBall { norm });
        }
        Ok(Self(r))
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    pub fn dot(&self, n: &BlochVector) -> f64 {
        dot3(&self.0, &n.0)
    }
}

impl From<BlochVector> for MixedBloch {
    fn from(b: BlochVector) -> Self {
        Self(b.0)
    }
}

/// Outcome of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        f64::from(self.sign())
    }
}

impl TryFrom<i32> for Outcome {
    type Error = Error;

    fn try_from(k: i32) -> Result<Self> {
        match k {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(Error::InvalidOutcome(other)),
        }
    }
}

/// The spin observable σ·n.
pub fn observable(n: &BlochVector) -> ComplexMatrix {
    let [sx, sy, sz] = pauli();
    let [x, y, z] = n.0;
    &(&sx.scale_real(x) + &sy.scale_real(y)) + &sz.scale_real(z)
}

/// Projector ½(𝕀 + k σ·n) onto the outcome `k` of σ·n.
pub fn projector(n: &BlochVector, k: Outcome) -> ComplexMatrix {
    (&identity2() + &observable(n).scale_real(k.value())).scale_real(0.5)
}

/// SU(2) element rotating Bloch vectors by `angle` radians about `axis`:
/// exp(−i angle/2 · axis·σ).
pub fn axis_angle_unitary(axis: &BlochVector, angle: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * angle).sin_cos();
    &identity2().scale_real(c) + &observable(axis).scale(-I * s)
}

/// The SO(3) rotation R with U (σ·n) U† = σ·(R n), R_ij = ½ Tr(σ_i U σ_j U†).
pub fn bloch_rotation(u: &ComplexMatrix) -> [[f64; 3]; 3] {
    let paulis = pauli();
    let conj: Vec<ComplexMatrix> = paulis
        .iter()
        .map(|s| s.conjugate_by(u).expect("2x2 unitary"))
        .collect();
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * paulis[i].trace_product(&conj[j]).re))
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::eigen::hermitian_eigenvalues;
    use crate::qcore::matrix::{C64, ZERO};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn normalization_policy() {
        let b = BlochVector::new(0.0, 0.0, 1.0 + 5e-7).unwrap();
        assert_eq!(b.z(), 1.0);
        assert!(matches!(
            BlochVector::new(0.0, 0.0, 1.01),
            Err(Error::NotUnitVector { .. })
        ));
        assert!(BlochVector::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(BlochVector::normalized([0.0; 3]).is_err());
    }

    #[test]
    fn observable_examples() {
        let [sx, _, sz] = pauli();
        assert_eq!(observable(&BlochVector::Z), sz);
        assert_eq!(observable(&BlochVector::X), sx);

        let d = BlochVector::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
        let obs = observable(&d);
        let expected = (&sx + &sz).scale_real(FRAC_1_SQRT_2);
        assert!(obs.approx_eq(&expected, 1e-15));
        let eig = hermitian_eigenvalues(&obs);
        assert!((eig[0] + 1.0).abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let up = projector(&BlochVector::Z, Outcome::Plus);
        assert_eq!(up, ComplexMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap());
        let down = projector(&BlochVector::Z, Outcome::Minus);
        assert_eq!(
            down,
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0]).unwrap()
        );
        let xp = projector(&BlochVector::X, Outcome::Plus);
        let half = C64::new(0.5, 0.0);
        assert_eq!(xp, ComplexMatrix::from_2x2(half, half, half, half));
    }

    #[test]
    fn outcome_parsing() {
        assert_eq!(Outcome::try_from(1), Ok(Outcome::Plus));
        assert_eq!(Outcome::try_from(-1), Ok(Outcome::Minus));
        assert_eq!(Outcome::try_from(0), Err(Error::InvalidOutcome(0)));
        assert_eq!(Outcome::try_from(2), Err(Error::InvalidOutcome(2)));
    }

    #[test]
    fn axis_angle_rotates_about_axis() {
        // quarter turn about z sends x to y
        let u = axis_angle_unitary(&BlochVector::Z, std::f64::consts::FRAC_PI_2);
        assert!(u.unitarity_defect() < 1e-15);
        let r = bloch_rotation(&u);
        let v = BlochVector::X.rotated(&r);
        assert!((v.y() - 1.0).abs() < 1e-15, "{v}");
        // identity rotation
        let r0 = bloch_rotation(&axis_angle_unitary(&BlochVector::X, 0.0));
        for (i, row) in r0.iter().enumerate() {
            for (j, &rij) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((rij - want).abs() < 1e-15);
            }
        }
        assert_eq!(u.get(0, 1), ZERO);
    }

    #[test]
    fn angles_round_trip() {
        let b = BlochVector::new(0.48, -0.6, 0.64).unwrap();
        let (t, p) = b.angles();
        let back = BlochVector::from_angles(t, p);
        assert!((back.dot(&b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_bloch_ball() {
        assert!(MixedBloch::new([0.3, 0.4, 0.0]).is_ok());
        assert!(MixedBloch::new([1.0, 0.0, 1e-13]).is_ok());
        assert!(matches!(
            MixedBloch::new([0.8, 0.8, 0.0]),
            Err(Error::BlochOutsideBall { .. })
        ));
    }
}
