//! Two-qubit nonlocality measures relative to a CHSH witness.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, similar_spectrum, trace_product, ComplexMatrix};
use crate::operators::{pauli, Axis};
use crate::states::{negativity_of_transpose, partial_transpose, DensityMatrix, TransposeTarget};

const CHSH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `Tr[W rho] < 0`.
    Detected,
    /// `Tr[W rho] >= 0`.
    Undetected,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Detected => "detected",
            Regime::Undetected => "undetected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NonlocalityStrength {
    Detected { s_nl: f64 },
    Undetected { s_nl_new: f64, k: f64, p_max: f64, r: f64 },
}

impl NonlocalityStrength {
    pub fn regime(&self) -> Regime {
        match self {
            NonlocalityStrength::Detected { .. } => Regime::Detected,
            NonlocalityStrength::Undetected { .. } => Regime::Undetected,
        }
    }

    /// `(S^New - r (P - 3/4)) / (1 - r)`, the quantity the undetected
    /// bounds consume. Equals `K` whenever `S^New` follows its definition.
    pub fn effective_k(&self) -> Option<f64> {
        match *self {
            NonlocalityStrength::Undetected { s_nl_new, p_max, r, .. } => {
                Some((s_nl_new - r * (p_max - 0.75)) / (1.0 - r))
            }
            NonlocalityStrength::Detected { .. } => None,
        }
    }

    pub fn s_nl(&self) -> Option<f64> {
        match *self {
            NonlocalityStrength::Detected { s_nl } => Some(s_nl),
            NonlocalityStrength::Undetected { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    /// `T^t T`.
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.t[k][i] * self.t[k][j]).sum();
            }
        }
        g
    }
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    rho.expect_qubits(2)?;
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let mut t = [[0.0; 3]; 3];
    for (m, &am) in axes.iter().enumerate() {
        for (n, &an) in axes.iter().enumerate() {
            let op = crate::linalg::kron(&pauli(am), &pauli(an));
            t[m][n] = trace_product(&op, rho.matrix())?;
        }
    }
    Ok(CorrelationMatrix { t })
}

/// Sum of the two largest eigenvalues of `T^t T`.
pub fn horodecki_m(rho: &DensityMatrix) -> Result<f64> {
    let g = correlation_matrix(rho)?.gram();
    let rows: Vec<&[f64]> = g.iter().map(|r| r.as_slice()).collect();
    let spec = hermitian_eigenvalues(&ComplexMatrix::from_real_rows(&rows))?;
    Ok((spec.values[1] + spec.values[2]).max(0.0))
}

/// `(1 + <B>/4) / 2`.
pub fn p_max_from_expectation(chsh_expectation: f64) -> Result<f64> {
    if !chsh_expectation.is_finite() || chsh_expectation.abs() > 2.0 * SQRT_2 + CHSH_TOL {
        return Err(Error::ExpectationOutOfRange(chsh_expectation));
    }
    Ok(0.5 * (1.0 + chsh_expectation / 4.0))
}

/// Winning probability under the best spin-observable settings,
/// `(1 + sqrt(M)/2) / 2`.
pub fn p_max_optimal(rho: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * (1.0 + horodecki_m(rho)?.sqrt() / 2.0))
}

/// Winning probability of the settings behind `w`: `3/4 - Tr[w rho]/8`.
pub fn p_max_witness(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    Ok(0.75 - witness_value(rho, w)? / 8.0)
}

/// `Tr[w rho]`.
pub fn witness_value(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    rho.expect_qubits(2)?;
    trace_product(w, rho.matrix())
}

pub fn regime(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<Regime> {
    Ok(if witness_value(rho, w)? < 0.0 {
        Regime::Detected
    } else {
        Regime::Undetected
    })
}

/// `max(-Tr[w rho]/8, 0)`.
pub fn s_nl_detected(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    Ok((-witness_value(rho, w)? / 8.0).max(0.0))
}

/// Partial-transpose data shared by `K` and its bounds.
#[derive(Debug, Clone)]
pub(crate) struct TransposeData {
    pub pt: ComplexMatrix,
    pub negativity: f64,
    pub pt_max: f64,
    pub pt_sq_min: f64,
    pub pt_sq_trace: f64,
}

impl TransposeData {
    pub fn new(rho: &DensityMatrix, target: TransposeTarget) -> Result<Self> {
        let pt = partial_transpose(rho, target)?;
        let negativity = negativity_of_transpose(&pt)?;
        let pt_max = hermitian_eigenvalues(&pt)?.max();
        let pt_sq = &pt * &pt;
        let pt_sq_min = hermitian_eigenvalues(&pt_sq.symmetrized())?.min();
        let pt_sq_trace = pt_sq.trace().re;
        Ok(Self {
            pt,
            negativity,
            pt_max,
            pt_sq_min,
            pt_sq_trace,
        })
    }

    fn require_entangled(&self) -> Result<()> {
        if self.negativity <= crate::linalg::ZERO_TOL {
            Err(Error::ZeroNegativity)
        } else {
            Ok(())
        }
    }
}

/// `K` together with a flag for evaluation on a detected state, where the
/// quantity has no role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KValue {
    pub value: f64,
    pub regime_mismatch: bool,
}

/// `Tr[w rho rho^T] / (4 N(rho))`.
pub fn k_value(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<KValue> {
    let data = TransposeData::new(rho, TransposeTarget::Second)?;
    data.require_entangled()?;
    let w_rho = w.matmul(rho.matrix())?;
    let num = trace_product(&w_rho, &data.pt)?;
    Ok(KValue {
        value: num / (4.0 * data.negativity),
        regime_mismatch: regime(rho, w)? == Regime::Detected,
    })
}

fn require_undetected(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    let tr = witness_value(rho, w)?;
    if tr < 0.0 {
        return Err(Error::RegimeMismatch { expected: "undetected" });
    }
    Ok(tr)
}

/// `lambda_min[(rho^T)^2] Tr[w rho] / (4 lambda_max(rho^T) N)`.
pub fn k_lower_bound(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    let tr = require_undetected(rho, w)?;
    let data = TransposeData::new(rho, TransposeTarget::Second)?;
    data.require_entangled()?;
    Ok(data.pt_sq_min * tr / (4.0 * data.pt_max * data.negativity))
}

/// `[lambda_max(w rho) Tr[w rho] + Tr[(rho^T)^2]] / (8 N)`.
pub fn k_upper_bound(rho: &DensityMatrix, w: &ComplexMatrix) -> Result<f64> {
    let tr = require_undetected(rho, w)?;
    let data = TransposeData::new(rho, TransposeTarget::Second)?;
    data.require_entangled()?;
    let w_rho_max = similar_spectrum(rho.matrix(), w)?.max();
    Ok((w_rho_max * tr + data.pt_sq_trace) / (8.0 * data.negativity))
}

/// `K / (3/4 - P + K)`, clamped to `(0, 1]`.
pub fn r_cap(k: f64, p_max: f64) -> Result<f64> {
    if p_max > 0.75 + CHSH_TOL {
        return Err(Error::RegimeMismatch { expected: "undetected" });
    }
    let denom = 0.75 - p_max + k;
    if !(k > 0.0) || !(denom > 0.0) {
        return Err(Error::NonPositiveDenominator);
    }
    Ok((k / denom).min(1.0))
}

/// `S^New = r (P - 3/4) + (1 - r) K` with `P` the witness winning
/// probability.
pub fn s_nl_new(rho: &DensityMatrix, w: &ComplexMatrix, r: f64) -> Result<NonlocalityStrength> {
    require_undetected(rho, w)?;
    let k = k_value(rho, w)?.value;
    let p = p_max_witness(rho, w)?;
    let cap = r_cap(k, p)?;
    if !(0.0..cap).contains(&r) {
        return Err(Error::ROutOfRange { r, cap });
    }
    Ok(NonlocalityStrength::Undetected {
        s_nl_new: r * (p - 0.75) + (1.0 - r) * k,
        k,
        p_max: p,
        r,
    })
}

/// Detected strength when `w` detects `rho`, otherwise the undetected one
/// at `r` (default: half the cap).
pub fn strength(rho: &DensityMatrix, w: &ComplexMatrix, r: Option<f64>) -> Result<NonlocalityStrength> {
    match regime(rho, w)? {
        Regime::Detected => Ok(NonlocalityStrength::Detected {
            s_nl: s_nl_detected(rho, w)?,
        }),
        Regime::Undetected => {
            let r = match r {
                Some(r) => r,
                None => {
                    let k = k_value(rho, w)?.value;
                    r_cap(k, p_max_witness(rho, w)?)? / 2.0
                }
            };
            s_nl_new(rho, w, r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{chsh_operator, chsh_witness, plane_witness, ChshSettings, Plane, SignPattern};
    use crate::sampling;
    use crate::states::{make_example, make_reference, partial_trace, ExampleFamily, ReferenceState, Subsystem};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bc(f: ExampleFamily) -> DensityMatrix {
        partial_trace(&make_example(f).unwrap(), Subsystem::A).unwrap()
    }

    fn werner(w: f64) -> DensityMatrix {
        let bell = make_reference(ReferenceState::BellPhiPlus);
        DensityMatrix::mixture(&[(w, &bell), (1.0 - w, &DensityMatrix::maximally_mixed(2))]).unwrap()
    }

    #[test]
    fn correlation_matrix_examples() {
        let t = correlation_matrix(&make_reference(ReferenceState::BellPhiPlus)).unwrap().t;
        let expect = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(t[i][j], expect[i][j], epsilon = 1e-14);
            }
        }
        let t = correlation_matrix(&DensityMatrix::maximally_mixed(2)).unwrap().t;
        assert!(t.iter().flatten().all(|v| v.abs() < 1e-15));
        let p00 = DensityMatrix::from_matrix(ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let t = correlation_matrix(&p00).unwrap().t;
        let nonzero: Vec<_> = t.iter().flatten().filter(|v| v.abs() > 1e-14).collect();
        assert_eq!(nonzero.len(), 1);
        assert_abs_diff_eq!(t[2][2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn horodecki_examples() {
        assert_abs_diff_eq!(horodecki_m(&make_reference(ReferenceState::BellPhiPlus)).unwrap(), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(horodecki_m(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(horodecki_m(&werner(std::f64::consts::FRAC_1_SQRT_2)).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn p_max_examples() {
        assert_eq!(p_max_from_expectation(2.0).unwrap(), 0.75);
        assert_abs_diff_eq!(p_max_from_expectation(2.0 * SQRT_2).unwrap(), 0.5 + SQRT_2 / 4.0, epsilon = 1e-15);
        assert_eq!(p_max_from_expectation(0.0).unwrap(), 0.5);
        assert!(p_max_from_expectation(3.0).is_err());
        assert_abs_diff_eq!(
            p_max_optimal(&make_reference(ReferenceState::BellPhiPlus)).unwrap(),
            0.5 + SQRT_2 / 4.0,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(p_max_optimal(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn p_max_optimal_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for i in 0..300 {
            let p = p_max_optimal(&sampling::random_density(&mut rng, 4, 1 + i % 4)).unwrap();
            assert!((0.5..=0.5 + SQRT_2 / 4.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn s_nl_examples() {
        let rho = bc(ExampleFamily::MixedGhz2W(0.65));
        let w = chsh_witness(&chsh_operator(&ChshSettings::mixed_example(), SignPattern::Flipped)).unwrap();
        assert_abs_diff_eq!(s_nl_detected(&rho, &w).unwrap(), 0.00333, epsilon = 5e-6);
        let ac = partial_trace(&make_example(ExampleFamily::PureWClass1(0.953939)).unwrap(), Subsystem::B).unwrap();
        let s = s_nl_detected(&ac, &plane_witness(Plane::XZ)).unwrap();
        assert!((0.0..=0.030).contains(&s));
        let undetected = bc(ExampleFamily::IdentityW(0.9));
        assert_eq!(s_nl_detected(&undetected, &plane_witness(Plane::XY)).unwrap(), 0.0);
    }

    #[test]
    fn k_numerators() {
        let wxy = plane_witness(Plane::XY);
        for &p in &[0.82, 0.9, 1.0] {
            let rho = bc(ExampleFamily::IdentityW(p));
            let data = TransposeData::new(&rho, TransposeTarget::Second).unwrap();
            let num = trace_product(&wxy.matmul(rho.matrix()).unwrap(), &data.pt).unwrap();
            let expect = (9.0 - 6.0 * SQRT_2 * p + (3.0 - 2.0 * SQRT_2) * p * p) / 18.0;
            assert_abs_diff_eq!(num, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(data.pt_sq_trace, (9.0 + 11.0 * p * p) / 36.0, epsilon = 1e-12);
            let w_rho_max = similar_spectrum(rho.matrix(), &wxy).unwrap().max();
            assert_abs_diff_eq!(w_rho_max, (3.0 + p) / 6.0, epsilon = 1e-12);
        }
        let sep = DensityMatrix::maximally_mixed(2);
        assert_eq!(k_value(&sep, &wxy), Err(Error::ZeroNegativity));
    }

    #[test]
    fn k_on_detected_state_is_flagged_and_bounds_refuse() {
        let bell = make_reference(ReferenceState::BellPhiPlus);
        let w = plane_witness(Plane::XZ);
        assert!(k_value(&bell, &w).unwrap().regime_mismatch);
        assert!(matches!(k_lower_bound(&bell, &w), Err(Error::RegimeMismatch { .. })));
        assert!(matches!(k_upper_bound(&bell, &w), Err(Error::RegimeMismatch { .. })));
    }

    #[test]
    fn lemma_sandwich_on_families_4_and_5() {
        let w = plane_witness(Plane::XY);
        for i in 0..50 {
            let f = i as f64 / 49.0;
            for rho in [
                bc(ExampleFamily::GhzWConvex(0.4 + 0.5 * f)),
                bc(ExampleFamily::IdentityW(0.8165 + (1.0 - 0.8165) * f)),
            ] {
                let lo = k_lower_bound(&rho, &w).unwrap();
                let k = k_value(&rho, &w).unwrap().value;
                let hi = k_upper_bound(&rho, &w).unwrap();
                assert!(lo <= k + 1e-10 && k <= hi + 1e-10, "{lo} {k} {hi}");
            }
        }
    }

    #[test]
    fn r_cap_examples() {
        assert_eq!(r_cap(0.3, 0.75).unwrap(), 1.0);
        assert!(matches!(r_cap(0.0, 0.7), Err(Error::NonPositiveDenominator)));
        assert!(matches!(r_cap(0.2, 0.8), Err(Error::RegimeMismatch { .. })));
    }

    #[test]
    fn s_nl_new_endpoints_and_positivity() {
        let w = plane_witness(Plane::XY);
        for &p in &[0.82, 0.9, 0.97] {
            let rho = bc(ExampleFamily::IdentityW(p));
            let k = k_value(&rho, &w).unwrap().value;
            let s0 = s_nl_new(&rho, &w, 0.0).unwrap();
            assert!(matches!(s0, NonlocalityStrength::Undetected { s_nl_new, .. } if s_nl_new == k));
            let cap = r_cap(k, p_max_witness(&rho, &w).unwrap()).unwrap();
            for j in 0..20 {
                let r = cap * j as f64 / 20.0;
                let s = s_nl_new(&rho, &w, r).unwrap();
                if let NonlocalityStrength::Undetected { s_nl_new, .. } = s {
                    assert!(s_nl_new > 0.0);
                }
                assert_abs_diff_eq!(s.effective_k().unwrap(), k, epsilon = 1e-12);
            }
            assert!(matches!(s_nl_new(&rho, &w, cap), Err(Error::ROutOfRange { .. })));
        }
    }

    #[test]
    fn strength_dispatches_on_regime() {
        let bell = make_reference(ReferenceState::BellPhiPlus);
        assert_eq!(strength(&bell, &plane_witness(Plane::XZ), None).unwrap().regime(), Regime::Detected);
        let rho = bc(ExampleFamily::IdentityW(0.9));
        let s = strength(&rho, &plane_witness(Plane::XY), None).unwrap();
        assert_eq!(s.regime(), Regime::Undetected);
    }
}
