//! Density matrices on one to three qubits, reductions, and the example
//! state families.
//!
//! Registers are ordered `A ⊗ B ⊗ C`; basis index `4a + 2b + c`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, EigenSpectrum, HERMITICITY_TOL};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({} qubits) {:?}", self.qubits, self.matrix)
    }
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity. The stored matrix is
    /// the symmetrized input.
    pub fn validate(candidate: ComplexMatrix, qubits: usize) -> Result<Self> {
        if !(1..=3).contains(&qubits) {
            return Err(Error::DimensionMismatch(format!(
                "{qubits} qubits not supported"
            )));
        }
        let n = candidate.ensure_square()?;
        if n != 1 << qubits {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} matrix for {qubits} qubits"
            )));
        }
        if candidate
            .entries()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let res = candidate.hermiticity_residual();
        if res > HERMITICITY_TOL {
            return Err(Error::NotHermitian(res));
        }
        let matrix = candidate.symmetrized();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr));
        }
        let min = hermitian_eigenvalues(&matrix)?.min();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { qubits, matrix })
    }

    /// Infers the qubit count from the dimension.
    pub fn from_matrix(candidate: ComplexMatrix) -> Result<Self> {
        let n = candidate.ensure_square()?;
        let qubits = match n {
            2 => 1,
            4 => 2,
            8 => 3,
            _ => {
                return Err(Error::DimensionMismatch(format!(
                    "dimension {n} is not 2, 4 or 8"
                )))
            }
        };
        Self::validate(candidate, qubits)
    }

    /// `|psi><psi|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        Self::from_matrix(ComplexMatrix::outer(&v))
    }

    /// Convex combination `sum w_i rho_i`; weights must be nonnegative and
    /// sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty mixture".into()))?;
        let n = first.1.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch("mixture of unequal dimensions".into()));
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Self::validate(acc, first.1.qubits)
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let n = 1 << qubits;
        Self {
            qubits,
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
        }
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix, qubits: usize) -> Self {
        Self {
            qubits,
            matrix: matrix.symmetrized(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> EigenSpectrum {
        hermitian_eigenvalues(&self.matrix).expect("validated density matrix is Hermitian")
    }

    pub fn expect_qubits(&self, expected: usize) -> Result<()> {
        if self.qubits == expected {
            Ok(())
        } else {
            Err(Error::QubitCount {
                expected,
                got: self.qubits,
            })
        }
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > 3 {
            return Err(Error::DimensionMismatch(format!("{qubits} qubits not supported")));
        }
        Ok(Self {
            qubits,
            matrix: crate::linalg::kron(&self.matrix, &other.matrix),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Subsystem {
    A,
    B,
    C,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::A, Subsystem::B, Subsystem::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subsystem::A => "A",
            Subsystem::B => "B",
            Subsystem::C => "C",
        };
        f.write_str(s)
    }
}

/// An unordered pair of distinct subsystems, stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Pair {
    first: Subsystem,
    second: Subsystem,
}

impl Pair {
    pub const AB: Pair = Pair {
        first: Subsystem::A,
        second: Subsystem::B,
    };
    pub const AC: Pair = Pair {
        first: Subsystem::A,
        second: Subsystem::C,
    };
    pub const BC: Pair = Pair {
        first: Subsystem::B,
        second: Subsystem::C,
    };
    pub const ALL: [Pair; 3] = [Pair::AB, Pair::AC, Pair::BC];

    pub fn new(a: Subsystem, b: Subsystem) -> Result<Self> {
        if a == b {
            return Err(Error::UnknownName(format!("{a}{b}")));
        }
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        Ok(Self { first, second })
    }

    pub fn first(self) -> Subsystem {
        self.first
    }

    pub fn second(self) -> Subsystem {
        self.second
    }

    /// The subsystem traced out to obtain this pair.
    pub fn traced(self) -> Subsystem {
        Subsystem::ALL
            .into_iter()
            .find(|s| *s != self.first && *s != self.second)
            .expect("pair of distinct labels")
    }

    pub fn complement_of(traced: Subsystem) -> Self {
        match traced {
            Subsystem::A => Pair::BC,
            Subsystem::B => Pair::AC,
            Subsystem::C => Pair::AB,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lab = |c: char| match c.to_ascii_uppercase() {
            'A' => Ok(Subsystem::A),
            'B' => Ok(Subsystem::B),
            'C' => Ok(Subsystem::C),
            _ => Err(Error::UnknownName(s.to_string())),
        };
        let cs: Vec<char> = s.trim().chars().collect();
        if cs.len() != 2 {
            return Err(Error::UnknownName(s.to_string()));
        }
        Pair::new(lab(cs[0])?, lab(cs[1])?).map_err(|_| Error::UnknownName(s.to_string()))
    }
}

/// Traces one subsystem out of a three-qubit state, leaving the other two in
/// ascending label order.
pub fn partial_trace(rho: &DensityMatrix, traced: Subsystem) -> Result<DensityMatrix> {
    rho.expect_qubits(3)?;
    let k = traced.index();
    let keep: Vec<usize> = (0..3).filter(|&q| q != k).collect();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(4, 4);
    // Bit of qubit q in index i (A is the most significant).
    let bit = |i: usize, q: usize| (i >> (2 - q)) & 1;
    for i in 0..8 {
        for j in 0..8 {
            if bit(i, k) != bit(j, k) {
                continue;
            }
            let ri = 2 * bit(i, keep[0]) + bit(i, keep[1]);
            let rj = 2 * bit(j, keep[0]) + bit(j, keep[1]);
            out[(ri, rj)] += m[(i, j)];
        }
    }
    Ok(DensityMatrix::from_trusted(out, 2))
}

pub fn reduce(rho: &DensityMatrix, pair: Pair) -> Result<DensityMatrix> {
    partial_trace(rho, pair.traced())
}

/// Which qubit of a pair is transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TransposeTarget {
    First,
    #[default]
    Second,
}

/// `rho^{T}` on one factor of a two-qubit matrix: entry `(ik, jl)` moves to
/// `(il, jk)` for the second factor, `(jk, il)` for the first.
pub fn partial_transpose_matrix(m: &ComplexMatrix, target: TransposeTarget) -> ComplexMatrix {
    assert_eq!((m.rows(), m.cols()), (4, 4));
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    let v = m[(2 * i + k, 2 * j + l)];
                    match target {
                        TransposeTarget::Second => out[(2 * i + l, 2 * j + k)] = v,
                        TransposeTarget::First => out[(2 * j + k, 2 * i + l)] = v,
                    }
                }
            }
        }
    }
    out
}

pub fn partial_transpose(rho: &DensityMatrix, target: TransposeTarget) -> Result<ComplexMatrix> {
    rho.expect_qubits(2)?;
    Ok(partial_transpose_matrix(rho.matrix(), target))
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, TransposeTarget::Second)?;
    negativity_of_transpose(&pt)
}

pub(crate) fn negativity_of_transpose(pt: &ComplexMatrix) -> Result<f64> {
    let spec = hermitian_eigenvalues(pt)?;
    // `sum` of an empty iterator is -0.0.
    Ok(spec.values.iter().filter(|v| **v < 0.0).fold(0.0, |acc, v| acc - v))
}

/// Reorders the qubits of an `n`-qubit matrix: output qubit `q` is input
/// qubit `perm[q]`.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let dim = 1 << n;
    assert_eq!(m.rows(), dim);
    let map = |i: usize| -> usize {
        let mut out = 0;
        for (q, &src) in perm.iter().enumerate() {
            let b = (i >> (n - 1 - q)) & 1;
            out |= b << (n - 1 - src);
        }
        out
    };
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = m[(map(i), map(j))];
        }
    }
    out
}

/// `I_2` on the traced subsystem tensored with a pair operator, as an 8x8
/// matrix in `A ⊗ B ⊗ C` order.
pub fn embed_pair_operator(op: &ComplexMatrix, pair: Pair) -> ComplexMatrix {
    let raw = crate::linalg::kron(&ComplexMatrix::identity(2), op);
    // raw has qubit order (traced, first, second).
    let order = [pair.traced().index(), pair.first().index(), pair.second().index()];
    let mut perm = [0usize; 3];
    for (pos, &phys) in order.iter().enumerate() {
        perm[phys] = pos;
    }
    permute_qubits(&raw, &perm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExampleFamily {
    /// `lambda0 |000> + 0.3 |101> + sqrt(0.91 - lambda0^2) |110>`.
    PureWClass1(f64),
    /// `0.2 GHZ + t W1 + (0.8 - t) W2`.
    MixedGhz2W(f64),
    /// `(|000> + cos(theta) |110> + sin(theta) |111>) / sqrt 2`.
    MaximalSlice(f64),
    /// `p GHZ' + (1 - p) W` with `GHZ' = (|010> + |101>) / sqrt 2`.
    GhzWConvex(f64),
    /// `(1 - p) I/8 + p W`.
    IdentityW(f64),
}

pub const LAMBDA0_MAX: f64 = 0.953939;

impl ExampleFamily {
    pub const IDS: [&'static str; 5] = [
        "pure-W-class-1",
        "mixed-GHZ-2W",
        "maximal-slice",
        "GHZ-W-convex",
        "identity-W",
    ];

    pub fn from_id(id: &str, param: f64) -> Result<Self> {
        let fam = match id.to_ascii_lowercase().as_str() {
            "pure-w-class-1" | "1" => ExampleFamily::PureWClass1(param),
            "mixed-ghz-2w" | "2" => ExampleFamily::MixedGhz2W(param),
            "maximal-slice" | "3" => ExampleFamily::MaximalSlice(param),
            "ghz-w-convex" | "4" => ExampleFamily::GhzWConvex(param),
            "identity-w" | "5" => ExampleFamily::IdentityW(param),
            _ => return Err(Error::UnknownName(id.to_string())),
        };
        Ok(fam)
    }

    /// Family number 1..=5.
    pub fn number(self) -> usize {
        match self {
            ExampleFamily::PureWClass1(_) => 1,
            ExampleFamily::MixedGhz2W(_) => 2,
            ExampleFamily::MaximalSlice(_) => 3,
            ExampleFamily::GhzWConvex(_) => 4,
            ExampleFamily::IdentityW(_) => 5,
        }
    }

    pub fn from_number(n: usize, param: f64) -> Result<Self> {
        Self::from_id(&n.to_string(), param)
    }

    pub fn id(self) -> &'static str {
        Self::IDS[self.number() - 1]
    }

    pub fn param(self) -> f64 {
        match self {
            ExampleFamily::PureWClass1(x)
            | ExampleFamily::MixedGhz2W(x)
            | ExampleFamily::MaximalSlice(x)
            | ExampleFamily::GhzWConvex(x)
            | ExampleFamily::IdentityW(x) => x,
        }
    }

    pub fn with_param(self, param: f64) -> Self {
        Self::from_number(self.number(), param).expect("known family")
    }

    /// Closed validity interval `(lo, hi, lo_open)`.
    fn range(self) -> (f64, f64, bool, &'static str) {
        match self {
            ExampleFamily::PureWClass1(_) => (0.0, LAMBDA0_MAX, false, "[0, 0.953939]"),
            ExampleFamily::MixedGhz2W(_) => (0.0, 0.8, false, "[0, 0.8]"),
            ExampleFamily::MaximalSlice(_) => (0.0, FRAC_PI_2, false, "[0, pi/2]"),
            ExampleFamily::GhzWConvex(_) => (0.4, 0.9, false, "[0.4, 0.9]"),
            ExampleFamily::IdentityW(_) => (0.816, 1.0, true, "(0.816, 1]"),
        }
    }

    /// Subrange where the reduced pair used in the worked examples is
    /// entangled.
    pub fn entangled_range(self) -> (f64, f64) {
        match self {
            ExampleFamily::PureWClass1(_) => (0.91753, LAMBDA0_MAX),
            ExampleFamily::MixedGhz2W(_) => (0.5, 0.8),
            ExampleFamily::MaximalSlice(_) => (1.05, FRAC_PI_2),
            ExampleFamily::GhzWConvex(_) => (0.4, 0.9),
            ExampleFamily::IdentityW(_) => (0.816, 1.0),
        }
    }

    /// The reduced pair the worked examples analyse.
    pub fn example_pair(self) -> Pair {
        match self {
            ExampleFamily::PureWClass1(_) => Pair::AC,
            _ => Pair::BC,
        }
    }

    pub fn check_range(self) -> Result<()> {
        let (lo, hi, lo_open, range) = self.range();
        let x = self.param();
        let ok = x.is_finite() && x <= hi && if lo_open { x > lo } else { x >= lo };
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterOutOfRange {
                family: self.id(),
                value: x,
                range,
            })
        }
    }
}

impl fmt::Display for ExampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.id(), self.param())
    }
}

fn ket(terms: &[(usize, f64)]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 8];
    for &(i, a) in terms {
        v[i] += Complex64::new(a, 0.0);
    }
    v
}

fn projector(terms: &[(usize, f64)]) -> DensityMatrix {
    DensityMatrix::pure(&ket(terms)).expect("nonzero ket")
}

const S3: f64 = 0.577_350_269_189_625_8;

fn w1() -> DensityMatrix {
    projector(&[(0b001, S3), (0b010, S3), (0b100, S3)])
}

fn w2() -> DensityMatrix {
    projector(&[(0b110, S3), (0b101, S3), (0b011, S3)])
}

fn ghz() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    projector(&[(0b000, h), (0b111, h)])
}

pub fn make_example(family: ExampleFamily) -> Result<DensityMatrix> {
    family.check_range()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rho = match family {
        ExampleFamily::PureWClass1(l) => {
            let rest = (0.91 - l * l).max(0.0).sqrt();
            projector(&[(0b000, l), (0b101, 0.3), (0b110, rest)])
        }
        ExampleFamily::MixedGhz2W(t) => {
            DensityMatrix::mixture(&[(0.2, &ghz()), (t, &w1()), (0.8 - t, &w2())])?
        }
        ExampleFamily::MaximalSlice(th) => projector(&[
            (0b000, h),
            (0b110, th.cos() * h),
            (0b111, th.sin() * h),
        ]),
        ExampleFamily::GhzWConvex(p) => {
            let g = projector(&[(0b010, h), (0b101, h)]);
            DensityMatrix::mixture(&[(p, &g), (1.0 - p, &w1())])?
        }
        ExampleFamily::IdentityW(p) => {
            let mixed = DensityMatrix::maximally_mixed(3);
            DensityMatrix::mixture(&[(1.0 - p, &mixed), (p, &w1())])?
        }
    };
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceState {
    Ghz,
    W,
    W2,
    BellPhiPlus,
    Product000,
}

impl ReferenceState {
    pub const NAMES: [&'static str; 5] = ["GHZ", "W", "W2", "Bell-Φ⁺", "product-000"];
}

impl FromStr for ReferenceState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .to_lowercase()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect();
        match norm.as_str() {
            "ghz" => Ok(ReferenceState::Ghz),
            "w" | "w1" => Ok(ReferenceState::W),
            "w2" => Ok(ReferenceState::W2),
            "bellφ⁺" | "bellφ+" | "bellphiplus" | "bellphi+" | "phiplus" | "phi+" | "bell" => {
                Ok(ReferenceState::BellPhiPlus)
            }
            "product000" | "000" => Ok(ReferenceState::Product000),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

pub fn make_reference(name: ReferenceState) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match name {
        ReferenceState::Ghz => ghz(),
        ReferenceState::W => w1(),
        ReferenceState::W2 => w2(),
        ReferenceState::Product000 => projector(&[(0, 1.0)]),
        ReferenceState::BellPhiPlus => {
            let v = [h, 0.0, 0.0, h].map(|a| Complex64::new(a, 0.0));
            DensityMatrix::pure(&v).expect("nonzero ket")
        }
    }
}

pub fn make_reference_by_name(name: &str) -> Result<DensityMatrix> {
    Ok(make_reference(name.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Direct loop over the three-qubit tensor: sum over the traced index.
    fn trace_oracle(m: &ComplexMatrix, traced: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                for c2 in 0..2 {
                    for d in 0..2 {
                        let mut s = Complex64::new(0.0, 0.0);
                        for t in 0..2 {
                            let (row, col) = match traced {
                                0 => (4 * t + 2 * a + b, 4 * t + 2 * c2 + d),
                                1 => (4 * a + 2 * t + b, 4 * c2 + 2 * t + d),
                                _ => (4 * a + 2 * b + t, 4 * c2 + 2 * d + t),
                            };
                            s += m[(row, col)];
                        }
                        out[(2 * a + b, 2 * c2 + d)] = s;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn validate_accepts_maximally_mixed_and_projector() {
        let m = ComplexMatrix::identity(8).scale(0.125);
        assert!(DensityMatrix::validate(m, 3).is_ok());
        let p = make_reference(ReferenceState::Product000);
        assert_eq!(p.spectrum().values.iter().filter(|v| v.abs() > 1e-9).count(), 1);
    }

    #[test]
    fn validate_rejects_traceless() {
        let z = ComplexMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(DensityMatrix::validate(z, 1), Err(Error::TraceNotOne(_))));
    }

    #[test]
    fn validate_rejects_non_psd_and_non_hermitian() {
        let m = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::validate(m, 1), Err(Error::NotPsd(_))));
        let mut m = ComplexMatrix::diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix::validate(m, 1), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn family1_reduces_to_printed_ac_matrix() {
        for &l in &[0.92, 0.93, 0.95] {
            let rho = make_example(ExampleFamily::PureWClass1(l)).unwrap();
            let ac = partial_trace(&rho, Subsystem::B).unwrap();
            let m = ac.matrix();
            assert_abs_diff_eq!(m[(0, 0)].re, l * l, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(0, 3)].re, 0.3 * l, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(3, 0)].re, 0.3 * l, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(2, 2)].re, 0.91 - l * l, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(3, 3)].re, 0.09, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_factor_traces_away() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bc = sampling::random_density(&mut rng, 4, 4);
        let zero = DensityMatrix::from_matrix(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let abc = zero.tensor(&bc).unwrap();
        let red = partial_trace(&abc, Subsystem::A).unwrap();
        assert!(red.matrix().max_abs_diff(bc.matrix()) < 1e-15);
    }

    #[test]
    fn family5_corner_entry() {
        let rho = make_example(ExampleFamily::IdentityW(0.9)).unwrap();
        let bc = partial_trace(&rho, Subsystem::A).unwrap();
        assert_abs_diff_eq!(bc.matrix()[(0, 0)].re, 0.325, epsilon = 1e-12);
    }

    #[test]
    fn printed_reductions_of_families_2_4_5() {
        for i in 0..20 {
            let f = i as f64 / 19.0;
            let t = 0.8 * f;
            let bc = partial_trace(&make_example(ExampleFamily::MixedGhz2W(t)).unwrap(), Subsystem::A).unwrap();
            let a = 0.8 / 3.0;
            let printed = ComplexMatrix::from_real_rows(&[
                &[(0.6 + 2.0 * t) / 6.0, 0.0, 0.0, 0.0],
                &[0.0, a, a, 0.0],
                &[0.0, a, a, 0.0],
                &[0.0, 0.0, 0.0, (2.2 - 2.0 * t) / 6.0],
            ]);
            assert!(bc.matrix().max_abs_diff(&printed) < 1e-12);

            let p = 0.4 + 0.5 * f;
            let bc = partial_trace(&make_example(ExampleFamily::GhzWConvex(p)).unwrap(), Subsystem::A).unwrap();
            let a = (1.0 - p) / 3.0;
            let printed = ComplexMatrix::from_real_rows(&[
                &[a, 0.0, 0.0, 0.0],
                &[0.0, p / 2.0 + a, a, 0.0],
                &[0.0, a, p / 2.0 + a, 0.0],
                &[0.0, 0.0, 0.0, 0.0],
            ]);
            assert!(bc.matrix().max_abs_diff(&printed) < 1e-12);

            let p = 0.8165 + (1.0 - 0.8165) * f;
            let bc = partial_trace(&make_example(ExampleFamily::IdentityW(p)).unwrap(), Subsystem::A).unwrap();
            let a = p / 3.0 + (1.0 - p) / 4.0;
            let printed = ComplexMatrix::from_real_rows(&[
                &[a, 0.0, 0.0, 0.0],
                &[0.0, a, p / 3.0, 0.0],
                &[0.0, p / 3.0, a, 0.0],
                &[0.0, 0.0, 0.0, (1.0 - p) / 4.0],
            ]);
            assert!(bc.matrix().max_abs_diff(&printed) < 1e-12);
        }
    }

    #[test]
    fn maximal_slice_bc_reduction_is_separable() {
        // The bc marginal of this family is a mixture of |00> and a product
        // |1>(cos|0> + sin|1>); the off-diagonal (0,3) entry vanishes.
        for &th in &[1.1, 1.2, 1.5] {
            let rho = make_example(ExampleFamily::MaximalSlice(th)).unwrap();
            let bc = partial_trace(&rho, Subsystem::A).unwrap();
            assert_abs_diff_eq!(bc.matrix()[(0, 3)].norm(), 0.0, epsilon = 1e-15);
            assert!(negativity(&bc).unwrap() < 1e-12);
            let ab = partial_trace(&rho, Subsystem::C).unwrap();
            assert_abs_diff_eq!(ab.matrix()[(0, 3)].re, th.cos() / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let d = DensityMatrix::from_matrix(ComplexMatrix::diag(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let pt = partial_transpose(&d, TransposeTarget::Second).unwrap();
        assert_eq!(&pt, d.matrix());
        let bell = make_reference(ReferenceState::BellPhiPlus);
        let pt = partial_transpose(&bell, TransposeTarget::Second).unwrap();
        let spec = hermitian_eigenvalues(&pt).unwrap();
        for (v, e) in spec.values.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(negativity(&bell).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn werner_boundary_has_zero_negativity() {
        let bell = make_reference(ReferenceState::BellPhiPlus);
        let w = 1.0 / 3.0;
        let mixed = DensityMatrix::maximally_mixed(2);
        let werner = DensityMatrix::mixture(&[(w, &bell), (1.0 - w, &mixed)]).unwrap();
        assert!(negativity(&werner).unwrap().abs() < 1e-12);
    }

    #[test]
    fn family_endpoints() {
        let g = make_example(ExampleFamily::MaximalSlice(FRAC_PI_2)).unwrap();
        assert!(g.matrix().max_abs_diff(make_reference(ReferenceState::Ghz).matrix()) < 1e-15);
        let w = make_example(ExampleFamily::IdentityW(1.0)).unwrap();
        assert!(w.matrix().max_abs_diff(make_reference(ReferenceState::W).matrix()) < 1e-15);
        let rho = make_example(ExampleFamily::PureWClass1(0.92)).unwrap();
        let x = (0.91f64 - 0.92 * 0.92).sqrt();
        assert_abs_diff_eq!(rho.matrix()[(0b110, 0b110)].re, x * x, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(0b000, 0b101)].re, 0.92 * 0.3, epsilon = 1e-14);
    }

    #[test]
    fn out_of_range_parameters() {
        for fam in [
            ExampleFamily::PureWClass1(0.96),
            ExampleFamily::MixedGhz2W(-0.1),
            ExampleFamily::MaximalSlice(2.0),
            ExampleFamily::GhzWConvex(0.95),
            ExampleFamily::IdentityW(0.816),
        ] {
            assert!(matches!(make_example(fam), Err(Error::ParameterOutOfRange { .. })));
        }
    }

    #[test]
    fn reference_states() {
        let w = make_reference(ReferenceState::W);
        let ab = partial_trace(&w, Subsystem::C).unwrap();
        let a = DensityMatrix::from_trusted(ComplexMatrix::from_real_rows(&[
            &[ab.matrix()[(0, 0)].re + ab.matrix()[(1, 1)].re, 0.0],
            &[0.0, ab.matrix()[(2, 2)].re + ab.matrix()[(3, 3)].re],
        ]), 1);
        assert_abs_diff_eq!(a.matrix()[(0, 0)].re, 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a.matrix()[(1, 1)].re, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(make_reference(ReferenceState::Ghz).matrix().trace().re, 1.0, epsilon = 1e-15);
        assert!("bogus".parse::<ReferenceState>().is_err());
        assert_eq!("Bell-Φ⁺".parse::<ReferenceState>().unwrap(), ReferenceState::BellPhiPlus);
    }

    #[test]
    fn embedding_matches_kron_for_bc_and_commutes_with_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let op = sampling::random_hermitian(&mut rng, 4);
        let lit = kron(&ComplexMatrix::identity(2), &op);
        assert!(embed_pair_operator(&op, Pair::BC).max_abs_diff(&lit) < 1e-15);
        // Tr[rho (I ⊗ op)] = Tr[rho_ij op] for every pair.
        let rho = sampling::random_density(&mut rng, 8, 8);
        for pair in Pair::ALL {
            let big = crate::linalg::trace_product(rho.matrix(), &embed_pair_operator(&op, pair)).unwrap();
            let small = crate::linalg::trace_product(reduce(&rho, pair).unwrap().matrix(), &op).unwrap();
            assert_abs_diff_eq!(big, small, epsilon = 1e-12);
        }
    }

    #[test]
    fn separable_mixtures_have_zero_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let rho = sampling::random_separable_two_qubit(&mut rng, 4);
            assert!(negativity(&rho).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("bc".parse::<Pair>().unwrap(), Pair::BC);
        assert_eq!("CA".parse::<Pair>().unwrap(), Pair::AC);
        assert!("AA".parse::<Pair>().is_err());
        assert_eq!(Pair::AC.traced(), Subsystem::B);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn partial_trace_is_valid_and_matches_oracle(seed in any::<u64>(), rank in 1usize..=8, k in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = sampling::random_density(&mut rng, 8, rank);
            let traced = Subsystem::from_index(k).unwrap();
            let red = partial_trace(&rho, traced).unwrap();
            prop_assert!((red.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(red.spectrum().min() > -1e-12);
            prop_assert!(red.matrix().max_abs_diff(&trace_oracle(rho.matrix(), k)) < 1e-13);
        }

        #[test]
        fn partial_transpose_is_involution(seed in any::<u64>(), first in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = sampling::random_density(&mut rng, 4, 4);
            let t = if first { TransposeTarget::First } else { TransposeTarget::Second };
            let twice = partial_transpose_matrix(&partial_transpose_matrix(rho.matrix(), t), t);
            prop_assert!(twice.max_abs_diff(rho.matrix()) < 1e-14);
            let pt = partial_transpose_matrix(rho.matrix(), t);
            prop_assert!((pt.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(pt.is_hermitian(1e-14));
        }

        #[test]
        fn negativity_matches_trace_norm_form(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = sampling::random_density(&mut rng, 4, 2);
            let pt = partial_transpose(&rho, TransposeTarget::Second).unwrap();
            let spec = hermitian_eigenvalues(&pt).unwrap();
            let trace_norm: f64 = spec.values.iter().map(|v| v.abs()).sum();
            prop_assert!((negativity(&rho).unwrap() - (trace_norm - 1.0) / 2.0).abs() < 1e-12);
        }
    }
}
