//! Spin observables, CHSH operators and witnesses, and the Svetlichny
//! operator.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, ComplexMatrix};

pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector(n));
        }
        Ok(Self { x, y, z })
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotUnitVector(n));
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Polar and azimuthal angles.
    pub fn angles(self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    pub fn z(self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub(crate) fn from_array_unchecked(v: [f64; 3]) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[vec![o, one], vec![one, o]]),
        Axis::Y => ComplexMatrix::from_rows(&[vec![o, -i], vec![i, o]]),
        Axis::Z => ComplexMatrix::from_rows(&[vec![one, o], vec![o, -one]]),
    }
}

/// `v · σ` for any real 3-vector.
pub fn sigma_dot(v: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = v;
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(z, 0.0), Complex64::new(x, -y)],
        vec![Complex64::new(x, y), Complex64::new(-z, 0.0)],
    ])
}

pub fn spin_observable(n: UnitVector3) -> ComplexMatrix {
    sigma_dot(n.to_array())
}

/// Two dichotomic observables per party.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSettings {
    a0: ComplexMatrix,
    a1: ComplexMatrix,
    b0: ComplexMatrix,
    b1: ComplexMatrix,
}

impl ChshSettings {
    /// Requires each observable to be a Hermitian 2x2 matrix with spectrum
    /// inside `[-1, 1]`.
    pub fn new(a0: ComplexMatrix, a1: ComplexMatrix, b0: ComplexMatrix, b1: ComplexMatrix) -> Result<Self> {
        for m in [&a0, &a1, &b0, &b1] {
            check_2x2(m)?;
            let s = hermitian_eigenvalues(m)?;
            if s.min() < -1.0 - UNIT_TOL || s.max() > 1.0 + UNIT_TOL {
                return Err(Error::ObservableOutOfRange);
            }
        }
        Ok(Self { a0, a1, b0, b1 })
    }

    /// Accepts any Hermitian 2x2 observables, including ones whose spectrum
    /// leaves `[-1, 1]`.
    pub fn from_raw(a0: ComplexMatrix, a1: ComplexMatrix, b0: ComplexMatrix, b1: ComplexMatrix) -> Result<Self> {
        for m in [&a0, &a1, &b0, &b1] {
            check_2x2(m)?;
            let res = m.hermiticity_residual();
            if res > crate::linalg::HERMITICITY_TOL {
                return Err(Error::NotHermitian(res));
            }
        }
        Ok(Self { a0, a1, b0, b1 })
    }

    pub fn from_directions(a0: UnitVector3, a1: UnitVector3, b0: UnitVector3, b1: UnitVector3) -> Self {
        Self {
            a0: spin_observable(a0),
            a1: spin_observable(a1),
            b0: spin_observable(b0),
            b1: spin_observable(b1),
        }
    }

    pub fn observables(&self) -> [&ComplexMatrix; 4] {
        [&self.a0, &self.a1, &self.b0, &self.b1]
    }

    /// The settings of the mixed GHZ/W worked example:
    /// `A0 = σx`, `A1 = σy`, `B0,1 = ±0.95σx + 0.95σy + 0.447σz`.
    pub fn mixed_example() -> Self {
        Self::from_raw(
            pauli(Axis::X),
            pauli(Axis::Y),
            sigma_dot([0.95, 0.95, 0.447]),
            sigma_dot([-0.95, 0.95, 0.447]),
        )
        .expect("Hermitian literals")
    }
}

fn check_2x2(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "observable is {}x{}, expected 2x2",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Signs of `(A0B0, A0B1, A1B0, A1B1)` in the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SignPattern {
    /// `A0B0 + A0B1 + A1B0 - A1B1`.
    #[default]
    Standard,
    /// `A0B0 - A0B1 + A1B0 + A1B1`, whose witness reads
    /// `2I - A0B0 + A0B1 - A1B0 - A1B1`.
    Flipped,
}

impl SignPattern {
    pub fn signs(self) -> [f64; 4] {
        match self {
            SignPattern::Standard => [1.0, 1.0, 1.0, -1.0],
            SignPattern::Flipped => [1.0, -1.0, 1.0, 1.0],
        }
    }
}

pub fn chsh_operator(settings: &ChshSettings, signs: SignPattern) -> ComplexMatrix {
    let [s00, s01, s10, s11] = signs.signs();
    let terms = [
        (s00, &settings.a0, &settings.b0),
        (s01, &settings.a0, &settings.b1),
        (s10, &settings.a1, &settings.b0),
        (s11, &settings.a1, &settings.b1),
    ];
    let mut acc = ComplexMatrix::zeros(4, 4);
    for (s, a, b) in terms {
        acc = &acc + &kron(a, b).scale(s);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Plane {
    XY,
    XZ,
    YZ,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::XY, Plane::XZ, Plane::YZ];

    pub fn axes(self) -> (Axis, Axis) {
        match self {
            Plane::XY => (Axis::X, Axis::Y),
            Plane::XZ => (Axis::X, Axis::Z),
            Plane::YZ => (Axis::Y, Axis::Z),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Plane::XY => "xy",
            Plane::XZ => "xz",
            Plane::YZ => "yz",
        }
    }

    /// `A0 = σi`, `A1 = σj`, `B0,1 = (σi ± σj)/√2`.
    pub fn settings(self) -> ChshSettings {
        let (i, j) = self.axes();
        let (si, sj) = (pauli(i), pauli(j));
        let b0 = (&si + &sj).scale(FRAC_1_SQRT_2);
        let b1 = (&si - &sj).scale(FRAC_1_SQRT_2);
        ChshSettings::new(si, sj, b0, b1).expect("plane observables are dichotomic")
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" | "yx" => Ok(Plane::XY),
            "xz" | "zx" => Ok(Plane::XZ),
            "yz" | "zy" => Ok(Plane::YZ),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// The four-term CHSH operator with observables confined to a plane.
pub fn chsh_plane_operator(plane: Plane) -> ComplexMatrix {
    chsh_operator(&plane.settings(), SignPattern::Standard)
}

/// `2 I - b`.
pub fn chsh_witness(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.rows() != 4 || b.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "witness of a {}x{} operator",
            b.rows(),
            b.cols()
        )));
    }
    let res = b.hermiticity_residual();
    if res > crate::linalg::HERMITICITY_TOL {
        return Err(Error::NotHermitian(res));
    }
    Ok(&ComplexMatrix::identity(4).scale(2.0) - b)
}

pub fn plane_witness(plane: Plane) -> ComplexMatrix {
    chsh_witness(&chsh_plane_operator(plane)).expect("plane operator is Hermitian 4x4")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvetlichnySettings {
    pub a: UnitVector3,
    pub a_prime: UnitVector3,
    pub b: UnitVector3,
    pub b_prime: UnitVector3,
    pub c: UnitVector3,
    pub c_prime: UnitVector3,
}

impl SvetlichnySettings {
    pub fn vectors(&self) -> [UnitVector3; 6] {
        [self.a, self.a_prime, self.b, self.b_prime, self.c, self.c_prime]
    }

    pub fn from_vectors(v: [UnitVector3; 6]) -> Self {
        Self {
            a: v[0],
            a_prime: v[1],
            b: v[2],
            b_prime: v[3],
            c: v[4],
            c_prime: v[5],
        }
    }

    /// All six directions in the xy-plane at the given azimuths.
    pub fn from_azimuths(phi: [f64; 6]) -> Self {
        Self::from_vectors(phi.map(|p| UnitVector3::from_angles(std::f64::consts::FRAC_PI_2, p)))
    }
}

/// `a·σ ⊗ [b·σ ⊗ (c+c')·σ + b'·σ ⊗ (c-c')·σ]
///  + a'·σ ⊗ [b·σ ⊗ (c-c')·σ - b'·σ ⊗ (c+c')·σ]`.
pub fn svetlichny_operator(s: &SvetlichnySettings) -> ComplexMatrix {
    let add = |u: UnitVector3, v: UnitVector3, sign: f64| {
        let (u, v) = (u.to_array(), v.to_array());
        sigma_dot([u[0] + sign * v[0], u[1] + sign * v[1], u[2] + sign * v[2]])
    };
    let c_plus = add(s.c, s.c_prime, 1.0);
    let c_minus = add(s.c, s.c_prime, -1.0);
    let (sb, sbp) = (spin_observable(s.b), spin_observable(s.b_prime));
    let first = &kron(&sb, &c_plus) + &kron(&sbp, &c_minus);
    let second = &kron(&sb, &c_minus) - &kron(&sbp, &c_plus);
    &kron(&spin_observable(s.a), &first) + &kron(&spin_observable(s.a_prime), &second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_product;
    use crate::sampling;
    use crate::states::{make_example, make_reference, partial_trace, ExampleFamily, ReferenceState, Subsystem};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_literals() {
        let x = pauli(Axis::X);
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        let y = pauli(Axis::Y);
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(pauli(Axis::Z), ComplexMatrix::diag(&[1.0, -1.0]));
        for a in [Axis::X, Axis::Y, Axis::Z] {
            let p = pauli(a);
            assert_eq!(&p * &p, ComplexMatrix::identity(2));
            assert_eq!(p.trace(), c(0.0, 0.0));
        }
    }

    #[test]
    fn spin_observable_axes_and_diagonal() {
        assert_eq!(spin_observable(UnitVector3::Z), pauli(Axis::Z));
        assert_eq!(spin_observable(UnitVector3::X), pauli(Axis::X));
        let d = UnitVector3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
        let s = hermitian_eigenvalues(&spin_observable(d)).unwrap();
        assert_abs_diff_eq!(s.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values[1], 1.0, epsilon = 1e-14);
        assert!(UnitVector3::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn chsh_cancellation() {
        let s = ChshSettings::from_directions(UnitVector3::X, UnitVector3::Y, UnitVector3::X, UnitVector3::X);
        let b = chsh_operator(&s, SignPattern::Standard);
        let expect = kron(&pauli(Axis::X), &pauli(Axis::X)).scale(2.0);
        assert!(b.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn mixed_example_witness_value() {
        let rho = make_example(ExampleFamily::MixedGhz2W(0.65)).unwrap();
        let bc = partial_trace(&rho, Subsystem::A).unwrap();
        let w = chsh_witness(&chsh_operator(&ChshSettings::mixed_example(), SignPattern::Flipped)).unwrap();
        let direct = &(&(&(&ComplexMatrix::identity(4).scale(2.0) - &kron(&pauli(Axis::X), &sigma_dot([0.95, 0.95, 0.447])))
            + &kron(&pauli(Axis::X), &sigma_dot([-0.95, 0.95, 0.447])))
            - &kron(&pauli(Axis::Y), &sigma_dot([0.95, 0.95, 0.447])))
            - &kron(&pauli(Axis::Y), &sigma_dot([-0.95, 0.95, 0.447]));
        assert!(w.max_abs_diff(&direct) < 1e-15);
        assert_abs_diff_eq!(trace_product(&w, bc.matrix()).unwrap(), -0.0266667, epsilon = 1e-6);
    }

    #[test]
    fn mixed_example_observables_leave_unit_interval() {
        let b0 = sigma_dot([0.95, 0.95, 0.447]);
        let i = pauli(Axis::X);
        assert!(matches!(
            ChshSettings::new(i.clone(), i.clone(), b0.clone(), b0),
            Err(Error::ObservableOutOfRange)
        ));
    }

    #[test]
    fn bell_reaches_tsirelson() {
        let bell = make_reference(ReferenceState::BellPhiPlus);
        let h = FRAC_1_SQRT_2;
        let s = ChshSettings::from_directions(
            UnitVector3::X,
            UnitVector3::Z,
            UnitVector3::new(h, 0.0, h).unwrap(),
            UnitVector3::new(h, 0.0, -h).unwrap(),
        );
        let v = trace_product(&chsh_operator(&s, SignPattern::Standard), bell.matrix()).unwrap();
        assert_abs_diff_eq!(v, 2.0 * SQRT_2, epsilon = 1e-14);
        let v = trace_product(&chsh_plane_operator(Plane::XZ), bell.matrix()).unwrap();
        assert_abs_diff_eq!(v, 2.0 * SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn plane_operator_simplifies() {
        for plane in Plane::ALL {
            let (i, j) = plane.axes();
            let simple = (&kron(&pauli(i), &pauli(i)) + &kron(&pauli(j), &pauli(j))).scale(SQRT_2);
            assert!(chsh_plane_operator(plane).max_abs_diff(&simple) < 1e-14);
            let mixed = ComplexMatrix::identity(4).scale(0.25);
            assert_abs_diff_eq!(trace_product(&chsh_plane_operator(plane), &mixed).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn witness_examples() {
        let w = chsh_witness(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(w.trace().re, 8.0);
        for &p in &[0.82, 0.9, 1.0] {
            let bc = partial_trace(&make_example(ExampleFamily::IdentityW(p)).unwrap(), Subsystem::A).unwrap();
            let v = trace_product(&plane_witness(Plane::XY), bc.matrix()).unwrap();
            assert_abs_diff_eq!(v, 2.0 - 4.0 * SQRT_2 * p / 3.0, epsilon = 1e-12);
        }
        for &l in &[0.92, 0.94] {
            let ac = partial_trace(&make_example(ExampleFamily::PureWClass1(l)).unwrap(), Subsystem::B).unwrap();
            let v = trace_product(&plane_witness(Plane::XZ), ac.matrix()).unwrap();
            assert_abs_diff_eq!(v, 3.15966 - 0.848528 * l - 2.82843 * l * l, epsilon = 1e-5);
        }
    }

    #[test]
    fn svetlichny_cancels_when_primes_match() {
        let z = UnitVector3::Z;
        let s = SvetlichnySettings::from_vectors([z; 6]);
        assert!(svetlichny_operator(&s).frobenius_norm() < 1e-15);
    }

    #[test]
    fn traces_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SvetlichnySettings::from_vectors(std::array::from_fn(|_| sampling::random_unit_vector(&mut rng)));
        let sv = svetlichny_operator(&s);
        assert_abs_diff_eq!(trace_product(&sv, &ComplexMatrix::identity(8)).unwrap(), 0.0, epsilon = 1e-13);
        // Tr[I2 ⊗ W] = Tr[I2] Tr[W] = 2 * 8.
        let w = plane_witness(Plane::XZ);
        assert_abs_diff_eq!(w.trace().re, 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(kron(&ComplexMatrix::identity(2), &w).trace().re, 16.0, epsilon = 1e-13);
    }

    #[test]
    fn svetlichny_expectation_respects_quantum_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..2000 {
            let rho = sampling::random_density(&mut rng, 8, 1 + i % 8);
            let s = SvetlichnySettings::from_vectors(std::array::from_fn(|_| sampling::random_unit_vector(&mut rng)));
            let v = trace_product(&svetlichny_operator(&s), rho.matrix()).unwrap();
            assert!(v.abs() <= 4.0 * SQRT_2 + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn spin_observable_squares_to_identity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = spin_observable(sampling::random_unit_vector(&mut rng));
            prop_assert!((&s * &s).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }

        #[test]
        fn svetlichny_operator_hermitian_traceless(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = SvetlichnySettings::from_vectors(std::array::from_fn(|_| sampling::random_unit_vector(&mut rng)));
            let sv = svetlichny_operator(&s);
            prop_assert!(sv.hermiticity_residual() < 1e-12);
            prop_assert!(sv.trace().norm() < 1e-12);
        }

        #[test]
        fn witness_trace_identity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = sampling::random_hermitian(&mut rng, 4);
            let w = chsh_witness(&b).unwrap();
            prop_assert!((w.trace().re - (8.0 - b.trace().re)).abs() < 1e-12);
        }
    }
}
