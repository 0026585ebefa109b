//! Lower and upper bounds on `<S_v>` from a reduced pair, the admissible
//! operator-parameter windows, and the genuine-nonlocality verdict.
//!
//! Every bound is a function of a dozen spectral scalars collected in
//! [`Intermediates`]; the state-level entry points compute those scalars and
//! delegate to the scalar formulas, so closed forms can be substituted for
//! any of them.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{
    first_nonzero_eigenvalue, hermitian_eigenvalues, similar_spectrum, trace_product, ComplexMatrix,
    EigenSpectrum, ZERO_TOL,
};
use crate::nonlocality::{r_cap, NonlocalityStrength, Regime, TransposeData};
use crate::operators::{plane_witness, Plane};
use crate::states::{embed_pair_operator, reduce, DensityMatrix, Pair, TransposeTarget};

/// A window `(U, l)` counts as nonempty only when wider than this.
pub const WINDOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundConfig {
    pub p: f64,
    pub q: f64,
    /// `None` picks half the cap in the undetected regime.
    pub r: Option<f64>,
    pub witness: ComplexMatrix,
    pub pair: Pair,
    pub transpose_target: TransposeTarget,
}

impl BoundConfig {
    pub fn new(pair: Pair, witness: ComplexMatrix, p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            r: None,
            witness,
            pair,
            transpose_target: TransposeTarget::Second,
        }
    }

    fn check(&self) -> Result<()> {
        check_unit("p", self.p)?;
        check_unit("q", self.q)?;
        if self.witness.rows() != 4 || !self.witness.is_hermitian(crate::linalg::HERMITICITY_TOL) {
            return Err(Error::NotHermitian(self.witness.hermiticity_residual()));
        }
        Ok(())
    }
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOperatorParameter(name))
    }
}

/// The scalars every bound and window is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intermediates {
    /// `lambda_max(I_2 ⊗ rho_ij)`.
    pub lambda_max_embedded: f64,
    /// First nonzero eigenvalue of `I_2 ⊗ rho_ij`.
    pub lambda_k_embedded: f64,
    /// Extremes of the spectrum of `rho_ABC (I_2 ⊗ rho_ij)`.
    pub product_min: f64,
    pub product_max: f64,
    pub rho_abc_max: f64,
    pub rho_abc_min: f64,
    /// `Tr[W rho_ij]`.
    pub witness_value: f64,
    /// `Tr[W rho_ij rho_ij^T]`.
    pub k_numerator: f64,
    pub negativity: f64,
    /// `lambda_max(rho_ij^T)`.
    pub pt_max: f64,
    /// `lambda_min[(rho_ij^T)^2]`.
    pub pt_sq_min: f64,
    /// `Tr[(rho_ij^T)^2]`.
    pub pt_sq_trace: f64,
    /// `lambda_max(W rho_ij)`.
    pub w_rho_max: f64,
}

/// Real spectrum of `rho_ABC (I_2 ⊗ rho_ij)`, obtained from the similar
/// Hermitian matrix `rho_ABC^{1/2} (I_2 ⊗ rho_ij) rho_ABC^{1/2}`.
pub fn product_spectrum(rho_abc: &DensityMatrix, rho_ij: &DensityMatrix, pair: Pair) -> Result<EigenSpectrum> {
    rho_abc.expect_qubits(3)?;
    rho_ij.expect_qubits(2)?;
    similar_spectrum(rho_abc.matrix(), &embed_pair_operator(rho_ij.matrix(), pair))
}

impl Intermediates {
    pub fn compute(
        rho_abc: &DensityMatrix,
        rho_ij: &DensityMatrix,
        pair: Pair,
        witness: &ComplexMatrix,
        target: TransposeTarget,
    ) -> Result<Self> {
        rho_ij.expect_qubits(2)?;
        Self::build(rho_abc, rho_ij, pair, witness, target, true)
    }

    /// Like [`Intermediates::compute`] but accepts a Hermitian unit-trace
    /// `rho_ij` that need not be positive; `lambda_max(W rho_ij)` becomes NaN
    /// when it is not real.
    pub(crate) fn compute_unchecked(
        rho_abc: &DensityMatrix,
        rho_ij: &ComplexMatrix,
        pair: Pair,
        witness: &ComplexMatrix,
    ) -> Result<Self> {
        let rho_ij = DensityMatrix::from_trusted(rho_ij.clone(), 2);
        Self::build(rho_abc, &rho_ij, pair, witness, TransposeTarget::Second, false)
    }

    fn build(
        rho_abc: &DensityMatrix,
        rho_ij: &DensityMatrix,
        pair: Pair,
        witness: &ComplexMatrix,
        target: TransposeTarget,
        strict: bool,
    ) -> Result<Self> {
        rho_abc.expect_qubits(3)?;
        let embedded = embed_pair_operator(rho_ij.matrix(), pair);
        let emb_spec = hermitian_eigenvalues(&embedded)?;
        let product = similar_spectrum(rho_abc.matrix(), &embedded)?;
        let rho_spec = rho_abc.spectrum();
        let pt = TransposeData::new(rho_ij, target)?;
        let w_rho = witness.matmul(rho_ij.matrix())?;
        let w_rho_max = match similar_spectrum(rho_ij.matrix(), witness) {
            Ok(s) => s.max(),
            Err(e) if strict => return Err(e),
            Err(_) => f64::NAN,
        };
        Ok(Self {
            lambda_max_embedded: emb_spec.max(),
            lambda_k_embedded: first_nonzero_eigenvalue(&emb_spec)?,
            product_min: product.min(),
            product_max: product.max(),
            rho_abc_max: rho_spec.max(),
            rho_abc_min: rho_spec.min(),
            witness_value: trace_product(witness, rho_ij.matrix())?,
            k_numerator: trace_product(&w_rho, &pt.pt)?,
            negativity: pt.negativity,
            pt_max: pt.pt_max,
            pt_sq_min: pt.pt_sq_min,
            pt_sq_trace: pt.pt_sq_trace,
            w_rho_max,
        })
    }

    pub fn from_config(rho_abc: &DensityMatrix, cfg: &BoundConfig) -> Result<(Self, DensityMatrix)> {
        let rho_ij = reduce(rho_abc, cfg.pair)?;
        let inter = Self::compute(rho_abc, &rho_ij, cfg.pair, &cfg.witness, cfg.transpose_target)?;
        Ok((inter, rho_ij))
    }

    pub fn regime(&self) -> Regime {
        if self.witness_value < 0.0 {
            Regime::Detected
        } else {
            Regime::Undetected
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.negativity > ZERO_TOL
    }

    pub fn s_nl(&self) -> f64 {
        (-self.witness_value / 8.0).max(0.0)
    }

    pub fn k(&self) -> Result<f64> {
        if !self.is_entangled() {
            return Err(Error::ZeroNegativity);
        }
        Ok(self.k_numerator / (4.0 * self.negativity))
    }

    /// Witness winning probability `3/4 - Tr[W rho]/8`.
    pub fn p_witness(&self) -> f64 {
        0.75 - self.witness_value / 8.0
    }

    pub fn r_cap(&self) -> Result<f64> {
        r_cap(self.k()?, self.p_witness())
    }

    /// Strength matching the regime; `r` defaults to half the cap.
    pub fn strength(&self, r: Option<f64>) -> Result<NonlocalityStrength> {
        match self.regime() {
            Regime::Detected => Ok(NonlocalityStrength::Detected { s_nl: self.s_nl() }),
            Regime::Undetected => {
                let k = self.k()?;
                let p = self.p_witness();
                let cap = r_cap(k, p)?;
                let r = r.unwrap_or(cap / 2.0);
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
        }
    }

    /// `Z = N lambda_max(rho^T)`.
    pub fn z(&self) -> f64 {
        self.negativity * self.pt_max
    }

    fn lambda_k(&self) -> Result<f64> {
        if self.lambda_k_embedded.abs() <= ZERO_TOL {
            return Err(Error::Singular("first nonzero eigenvalue of I_2 ⊗ rho_ij"));
        }
        Ok(self.lambda_k_embedded)
    }

    fn pt_sq_min_nonzero(&self) -> Result<f64> {
        if self.pt_sq_min.abs() <= ZERO_TOL {
            return Err(Error::Singular("lambda_min of the squared partial transpose"));
        }
        Ok(self.pt_sq_min)
    }

    /// Lower bound with a detected pair:
    /// `8(1-p)/(p lambda_max(I⊗rho)) [lambda_min(prod) + 2 lambda_max(rho_ABC) S_NL]`.
    pub fn sv1(&self, p: f64, s_nl: f64) -> Result<f64> {
        check_unit("p", p)?;
        Ok(8.0 * (1.0 - p) / (p * self.lambda_max_embedded) * self.n1(s_nl))
    }

    /// Upper bound with a detected pair:
    /// `8(1-q)/(q lambda_k) [lambda_max(prod) + 2 lambda_min(rho_ABC) S_NL]`.
    pub fn sv2(&self, q: f64, s_nl: f64) -> Result<f64> {
        check_unit("q", q)?;
        Ok(8.0 * (1.0 - q) / (q * self.lambda_k()?) * self.n2(s_nl))
    }

    /// Lower bound with an undetected pair, `x = (S^New - r(P - 3/4))/(1 - r)`.
    pub fn sv3(&self, p: f64, x: f64) -> Result<f64> {
        check_unit("p", p)?;
        Ok(8.0 * (1.0 - p) / (p * self.lambda_max_embedded) * self.h(x)?)
    }

    /// Upper bound with an undetected pair.
    pub fn sv4(&self, q: f64, x: f64) -> Result<f64> {
        check_unit("q", q)?;
        Ok(2.0 * (1.0 - q) / (q * self.lambda_k()?) * self.f(x)?)
    }

    fn n1(&self, s_nl: f64) -> f64 {
        self.product_min + 2.0 * s_nl * self.rho_abc_max
    }

    fn n2(&self, s_nl: f64) -> f64 {
        self.product_max + 2.0 * s_nl * self.rho_abc_min
    }

    /// `H = lambda_min(prod) - x N lambda_max(rho^T) lambda_max(rho_ABC) / lambda_min[(rho^T)^2]`.
    pub fn h(&self, x: f64) -> Result<f64> {
        Ok(self.product_min - x * self.z() * self.rho_abc_max / self.pt_sq_min_nonzero()?)
    }

    /// `F = 4 lambda_max(prod) - lambda_min(rho_ABC)/lambda_max(W rho) (8 N x - Tr[(rho^T)^2])`.
    pub fn f(&self, x: f64) -> Result<f64> {
        let term = if self.rho_abc_min == 0.0 {
            0.0
        } else {
            if self.w_rho_max.abs() <= ZERO_TOL {
                return Err(Error::Singular("lambda_max(W rho_ij)"));
            }
            self.rho_abc_min / self.w_rho_max * (8.0 * self.negativity * x - self.pt_sq_trace)
        };
        Ok(4.0 * self.product_max - term)
    }

    /// `G` of the undetected lower bound at parameter `p`.
    pub fn g(&self, p: f64, x: f64) -> Result<f64> {
        Ok(self.rho_abc_max * x * self.z() / (p * self.pt_sq_min_nonzero()? * self.lambda_max_embedded))
    }

    pub fn p_window_detected(&self, s_nl: f64) -> DetectedPWindow {
        let n = self.n1(s_nl);
        let lam = self.lambda_max_embedded;
        let d_plus = 2.0 * n + lam;
        let d_minus = 2.0 * n - lam;
        let l1 = 2.0 * n / d_plus;
        let u1 = 2.0 * n / d_minus;
        let upper = SQRT_2 * n / (SQRT_2 * n + lam);
        let admissible = if d_minus > 0.0 {
            Interval::new(l1, u1)
        } else {
            Interval::new(l1, 1.0)
        };
        DetectedPWindow {
            d_plus,
            d_minus,
            l1,
            u1,
            admissible,
            genuine: Interval::genuine(upper, l1),
        }
    }

    pub fn q_window_detected(&self, s_nl: f64) -> Result<DetectedQWindow> {
        let n = self.n2(s_nl);
        let lam = self.lambda_k()?;
        let d_plus = 2.0 * n + lam;
        let d_minus = 2.0 * n - lam;
        let l2 = 2.0 * n / d_plus;
        let upper = SQRT_2 * n / (SQRT_2 * n + lam);
        Ok(DetectedQWindow {
            d_plus,
            d_minus,
            l2,
            admissible: Interval::new(l2, 1.0),
            genuine: Interval::genuine(upper, l2),
        })
    }

    pub fn p_window_undetected(&self, x: f64) -> Result<UndetectedWindow> {
        let h = self.h(x)?;
        let lam = self.lambda_max_embedded;
        let den = 2.0 * h - lam;
        if den.abs() <= ZERO_TOL {
            return Err(Error::Singular("2H - lambda_max(I_2 ⊗ rho_ij)"));
        }
        let l3 = 2.0 * h / den;
        let upper = SQRT_2 * h / (SQRT_2 * h - lam);
        Ok(UndetectedWindow {
            value: h,
            l: l3,
            admissible: Interval::new(l3, 1.0),
            genuine: Interval::genuine(upper, l3),
        })
    }

    pub fn q_window_undetected(&self, x: f64) -> Result<UndetectedWindow> {
        let f = self.f(x)?;
        let lam = self.lambda_k()?;
        let den = f + 2.0 * lam;
        if den.abs() <= ZERO_TOL {
            return Err(Error::Singular("F + 2 lambda_k"));
        }
        let l4 = f / den;
        let upper = f / (f + 2.0 * SQRT_2 * lam);
        Ok(UndetectedWindow {
            value: f,
            l: l4,
            admissible: Interval::new(l4, 1.0),
            genuine: Interval::genuine(upper, l4),
        })
    }

    /// Bounds, windows and derived quantities at `(p, q)` for `strength`.
    pub fn report(&self, p: f64, q: f64, strength: &NonlocalityStrength) -> Result<BoundsReport> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        let mut d = ReportQuantities::spectral(self);
        let report = match *strength {
            NonlocalityStrength::Detected { s_nl } => {
                let pw = self.p_window_detected(s_nl);
                let qw = self.q_window_detected(s_nl)?;
                d.d_plus_1 = Some(pw.d_plus);
                d.d_minus_1 = Some(pw.d_minus);
                d.d_plus_2 = Some(qw.d_plus);
                d.d_minus_2 = Some(qw.d_minus);
                BoundsReport {
                    regime: Regime::Detected,
                    p,
                    q,
                    strength: *strength,
                    sv1: Some(self.sv1(p, s_nl)?),
                    sv2: Some(self.sv2(q, s_nl)?),
                    sv3: None,
                    sv4: None,
                    p_window: pw.admissible,
                    q_window: qw.admissible,
                    genuine_p_window: pw.genuine,
                    genuine_q_window: qw.genuine,
                    intermediates: d,
                }
            }
            NonlocalityStrength::Undetected { .. } => {
                let x = strength.effective_k().expect("undetected strength");
                let pw = self.p_window_undetected(x)?;
                let qw = self.q_window_undetected(x)?;
                d.h = Some(pw.value);
                d.f = Some(qw.value);
                d.g = Some(self.g(p, x)?);
                BoundsReport {
                    regime: Regime::Undetected,
                    p,
                    q,
                    strength: *strength,
                    sv1: None,
                    sv2: None,
                    sv3: Some(self.sv3(p, x)?),
                    sv4: Some(self.sv4(q, x)?),
                    p_window: pw.admissible,
                    q_window: qw.admissible,
                    genuine_p_window: pw.genuine,
                    genuine_q_window: qw.genuine,
                    intermediates: d,
                }
            }
        };
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub empty: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            empty: !(upper >= lower),
        }
    }

    /// The open window `(u, l)` intersected with `(0, 1]`; nonempty only
    /// when wider than [`WINDOW_TOL`].
    pub fn genuine(u: f64, l: f64) -> Self {
        let lower = u.max(0.0);
        let upper = l.min(1.0);
        Self {
            lower: u,
            upper: l,
            empty: !(upper - lower > WINDOW_TOL),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        !self.empty && x >= self.lower && x <= self.upper
    }

    /// Midpoint of the part inside `(0, 1]`.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower.max(0.0) + self.upper.min(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedPWindow {
    pub d_plus: f64,
    pub d_minus: f64,
    pub l1: f64,
    pub u1: f64,
    pub admissible: Interval,
    pub genuine: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedQWindow {
    pub d_plus: f64,
    pub d_minus: f64,
    pub l2: f64,
    pub admissible: Interval,
    pub genuine: Interval,
}

/// `value` is `H` for the p-window and `F` for the q-window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UndetectedWindow {
    pub value: f64,
    pub l: f64,
    pub admissible: Interval,
    pub genuine: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportQuantities {
    pub d_plus_1: Option<f64>,
    pub d_minus_1: Option<f64>,
    pub d_plus_2: Option<f64>,
    pub d_minus_2: Option<f64>,
    pub h: Option<f64>,
    pub f: Option<f64>,
    pub z: f64,
    pub g: Option<f64>,
    pub lambda_max_embedded: f64,
    pub lambda_min_product: f64,
    pub lambda_max_product: f64,
    pub lambda_k_embedded: f64,
    pub lambda_min_rho_abc: f64,
    pub lambda_max_rho_abc: f64,
    pub witness_value: f64,
    pub negativity: f64,
}

impl ReportQuantities {
    fn spectral(i: &Intermediates) -> Self {
        Self {
            d_plus_1: None,
            d_minus_1: None,
            d_plus_2: None,
            d_minus_2: None,
            h: None,
            f: None,
            z: i.z(),
            g: None,
            lambda_max_embedded: i.lambda_max_embedded,
            lambda_min_product: i.product_min,
            lambda_max_product: i.product_max,
            lambda_k_embedded: i.lambda_k_embedded,
            lambda_min_rho_abc: i.rho_abc_min,
            lambda_max_rho_abc: i.rho_abc_max,
            witness_value: i.witness_value,
            negativity: i.negativity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub regime: Regime,
    pub p: f64,
    pub q: f64,
    pub strength: NonlocalityStrength,
    pub sv1: Option<f64>,
    pub sv2: Option<f64>,
    pub sv3: Option<f64>,
    pub sv4: Option<f64>,
    pub p_window: Interval,
    pub q_window: Interval,
    pub genuine_p_window: Interval,
    pub genuine_q_window: Interval,
    pub intermediates: ReportQuantities,
}

impl BoundsReport {
    pub fn lower(&self) -> f64 {
        self.sv1.or(self.sv3).expect("one lower bound per regime")
    }

    pub fn upper(&self) -> f64 {
        self.sv2.or(self.sv4).expect("one upper bound per regime")
    }
}

fn require_regime(inter: &Intermediates, expected: Regime) -> Result<()> {
    if inter.regime() != expected {
        return Err(Error::RegimeMismatch {
            expected: expected.name(),
        });
    }
    Ok(())
}

fn intermediates_for(rho_abc: &DensityMatrix, rho_ij: &DensityMatrix, cfg: &BoundConfig) -> Result<Intermediates> {
    cfg.check()?;
    Intermediates::compute(rho_abc, rho_ij, cfg.pair, &cfg.witness, cfg.transpose_target)
}

pub fn lower_bound_detected(rho_abc: &DensityMatrix, rho_ij: &DensityMatrix, cfg: &BoundConfig, s_nl: f64) -> Result<f64> {
    let inter = intermediates_for(rho_abc, rho_ij, cfg)?;
    require_regime(&inter, Regime::Detected)?;
    inter.sv1(cfg.p, s_nl)
}

pub fn upper_bound_detected(rho_abc: &DensityMatrix, rho_ij: &DensityMatrix, cfg: &BoundConfig, s_nl: f64) -> Result<f64> {
    let inter = intermediates_for(rho_abc, rho_ij, cfg)?;
    require_regime(&inter, Regime::Detected)?;
    inter.sv2(cfg.q, s_nl)
}

fn undetected_x(inter: &Intermediates, strength: &NonlocalityStrength) -> Result<f64> {
    require_regime(inter, Regime::Undetected)?;
    if !inter.is_entangled() {
        return Err(Error::ZeroNegativity);
    }
    strength.effective_k().ok_or(Error::RegimeMismatch { expected: "undetected" })
}

pub fn lower_bound_undetected(
    rho_abc: &DensityMatrix,
    rho_ij: &DensityMatrix,
    cfg: &BoundConfig,
    strength: &NonlocalityStrength,
) -> Result<f64> {
    let inter = intermediates_for(rho_abc, rho_ij, cfg)?;
    let x = undetected_x(&inter, strength)?;
    inter.sv3(cfg.p, x)
}

pub fn upper_bound_undetected(
    rho_abc: &DensityMatrix,
    rho_ij: &DensityMatrix,
    cfg: &BoundConfig,
    strength: &NonlocalityStrength,
) -> Result<f64> {
    let inter = intermediates_for(rho_abc, rho_ij, cfg)?;
    let x = undetected_x(&inter, strength)?;
    inter.sv4(cfg.q, x)
}

/// Full report for one pair and witness at the configured `(p, q, r)`.
pub fn bounds_report(rho_abc: &DensityMatrix, cfg: &BoundConfig) -> Result<BoundsReport> {
    cfg.check()?;
    let (inter, _) = Intermediates::from_config(rho_abc, cfg)?;
    if !inter.is_entangled() {
        return Err(Error::ZeroNegativity);
    }
    let strength = inter.strength(cfg.r)?;
    inter.report(cfg.p, cfg.q, &strength)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Corollary {
    /// Lower bound, detected pair: `U1 < p < l1`.
    #[serde(rename = "1a")]
    C1a,
    /// Upper bound, detected pair: `U2 < q < l2`.
    #[serde(rename = "1b")]
    C1b,
    /// Lower bound, undetected pair: `U3 < p < l3`.
    #[serde(rename = "2a")]
    C2a,
    /// Upper bound, undetected pair: `U4 < q < l4`.
    #[serde(rename = "2b")]
    C2b,
}

impl Corollary {
    pub fn name(self) -> &'static str {
        match self {
            Corollary::C1a => "1a",
            Corollary::C1b => "1b",
            Corollary::C2a => "2a",
            Corollary::C2b => "2b",
        }
    }

    pub fn parameter(self) -> &'static str {
        match self {
            Corollary::C1a | Corollary::C2a => "p",
            Corollary::C1b | Corollary::C2b => "q",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum WitnessChoice {
    Plane(Plane),
    Custom,
}

impl WitnessChoice {
    pub fn name(&self) -> String {
        match self {
            WitnessChoice::Plane(p) => format!("W^({p})"),
            WitnessChoice::Custom => "custom".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Genuine,
    Inconclusive,
    NotApplicable,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Genuine => "genuine",
            Outcome::Inconclusive => "inconclusive",
            Outcome::NotApplicable => "not-applicable",
        }
    }
}

/// The corollary that fired, and where.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub corollary: Corollary,
    pub pair: Pair,
    pub witness: String,
    pub parameter: &'static str,
    /// Window midpoint.
    pub value: f64,
    pub window: Interval,
    /// The bound evaluated at `value`.
    pub bound: f64,
    pub report: BoundsReport,
}

/// One (pair, witness) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub pair: Pair,
    pub witness: String,
    pub regime: Option<Regime>,
    pub fired: Vec<Corollary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub evidence: Option<Evidence>,
    pub negativities: Vec<(Pair, f64)>,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    /// Restrict to one pair; all three otherwise.
    pub pair: Option<Pair>,
    /// Extra witness tried after the three plane witnesses.
    pub witness: Option<ComplexMatrix>,
    /// Only evaluate the supplied witness.
    pub witness_only: bool,
    pub r: Option<f64>,
    pub execution: Execution,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            pair: None,
            witness: None,
            witness_only: false,
            r: None,
            execution: Execution::Parallel,
        }
    }
}

struct Firing {
    corollary: Corollary,
    window: Interval,
    value: f64,
    bound: f64,
}

struct Evaluation {
    regime: Regime,
    report: BoundsReport,
    firings: Vec<Firing>,
}

fn evaluate_candidate(inter: &Intermediates, r: Option<f64>) -> Result<Evaluation> {
    let strength = inter.strength(r)?;
    let regime = strength.regime();
    // Windows first, then bounds at their midpoints.
    let (pw, qw, pc, qc) = match strength {
        NonlocalityStrength::Detected { s_nl } => (
            inter.p_window_detected(s_nl).genuine,
            inter.q_window_detected(s_nl)?.genuine,
            Corollary::C1a,
            Corollary::C1b,
        ),
        NonlocalityStrength::Undetected { .. } => {
            let x = strength.effective_k().expect("undetected");
            (
                inter.p_window_undetected(x)?.genuine,
                inter.q_window_undetected(x)?.genuine,
                Corollary::C2a,
                Corollary::C2b,
            )
        }
    };
    let p = if pw.empty { 0.5 } else { pw.midpoint() };
    let q = if qw.empty { 0.5 } else { qw.midpoint() };
    let report = inter.report(p, q, &strength)?;
    let mut firings = Vec::new();
    if !pw.empty {
        firings.push(Firing {
            corollary: pc,
            window: pw,
            value: p,
            bound: report.lower(),
        });
    }
    if !qw.empty {
        firings.push(Firing {
            corollary: qc,
            window: qw,
            value: q,
            bound: report.upper(),
        });
    }
    Ok(Evaluation {
        regime,
        report,
        firings,
    })
}

/// Searches reduced pairs and witnesses for a firing window corollary.
///
/// Candidates with a detected pair take precedence over undetected ones;
/// within a regime, pairs `AB, AC, BC` and witnesses `xy, xz, yz, custom`
/// are tried in that order.
pub fn detect_genuine(rho_abc: &DensityMatrix, opts: &DetectOptions) -> Result<Verdict> {
    rho_abc.expect_qubits(3)?;
    let pairs: Vec<Pair> = match opts.pair {
        Some(p) => vec![p],
        None => Pair::ALL.to_vec(),
    };
    let mut witnesses: Vec<(WitnessChoice, ComplexMatrix)> = Vec::new();
    if !(opts.witness_only && opts.witness.is_some()) {
        for plane in Plane::ALL {
            witnesses.push((WitnessChoice::Plane(plane), plane_witness(plane)));
        }
    }
    if let Some(w) = &opts.witness {
        if w.rows() != 4 || w.cols() != 4 {
            return Err(Error::DimensionMismatch("witness must be 4x4".into()));
        }
        witnesses.push((WitnessChoice::Custom, w.clone()));
    }

    let mut reduced = Vec::new();
    let mut negativities = Vec::new();
    for &pair in &pairs {
        let rho_ij = reduce(rho_abc, pair)?;
        let n = crate::states::negativity(&rho_ij)?;
        negativities.push((pair, n));
        reduced.push((pair, rho_ij, n));
    }
    let entangled: Vec<&(Pair, DensityMatrix, f64)> = reduced.iter().filter(|(_, _, n)| *n > ZERO_TOL).collect();
    if entangled.is_empty() {
        return Ok(Verdict {
            outcome: Outcome::NotApplicable,
            evidence: None,
            negativities,
            candidates: Vec::new(),
        });
    }

    let jobs: Vec<(Pair, &DensityMatrix, usize)> = entangled
        .iter()
        .flat_map(|(pair, rho, _)| (0..witnesses.len()).map(move |w| (*pair, rho, w)))
        .collect();
    let results = opts.execution.map_indexed(jobs.len(), |i| {
        let (pair, rho_ij, w) = jobs[i];
        Intermediates::compute(rho_abc, rho_ij, pair, &witnesses[w].1, TransposeTarget::Second)
            .and_then(|inter| evaluate_candidate(&inter, opts.r))
    });

    let mut candidates = Vec::with_capacity(jobs.len());
    let mut best: Option<(u8, usize, Corollary, Evidence)> = None;
    for (i, res) in results.into_iter().enumerate() {
        let (pair, _, w) = jobs[i];
        let name = witnesses[w].0.name();
        match res {
            Ok(eval) => {
                let rank = match eval.regime {
                    Regime::Detected => 0,
                    Regime::Undetected => 1,
                };
                candidates.push(Candidate {
                    pair,
                    witness: name.clone(),
                    regime: Some(eval.regime),
                    fired: eval.firings.iter().map(|f| f.corollary).collect(),
                    error: None,
                });
                if let Some(first) = eval.firings.first() {
                    let key = (rank, i, first.corollary);
                    if best.as_ref().is_none_or(|(r, j, c, _)| key < (*r, *j, *c)) {
                        let ev = Evidence {
                            corollary: first.corollary,
                            pair,
                            witness: name,
                            parameter: first.corollary.parameter(),
                            value: first.value,
                            window: first.window,
                            bound: first.bound,
                            report: eval.report,
                        };
                        best = Some((key.0, key.1, key.2, ev));
                    }
                }
            }
            Err(e) => candidates.push(Candidate {
                pair,
                witness: name,
                regime: None,
                fired: Vec::new(),
                error: Some(e.to_string()),
            }),
        }
    }

    let (outcome, evidence) = match best {
        Some((_, _, _, ev)) => (Outcome::Genuine, Some(ev)),
        None => (Outcome::Inconclusive, None),
    };
    Ok(Verdict {
        outcome,
        evidence,
        negativities,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_example, make_reference, ExampleFamily, ReferenceState};
    use approx::assert_abs_diff_eq;

    fn family_inter(f: ExampleFamily, plane: Plane) -> Intermediates {
        let rho = make_example(f).unwrap();
        let pair = f.example_pair();
        let rho_ij = reduce(&rho, pair).unwrap();
        Intermediates::compute(&rho, &rho_ij, pair, &plane_witness(plane), TransposeTarget::Second).unwrap()
    }

    #[test]
    fn product_spectrum_of_identities() {
        let a = DensityMatrix::maximally_mixed(3);
        let b = DensityMatrix::maximally_mixed(2);
        let s = product_spectrum(&a, &b, Pair::BC).unwrap();
        for v in s.values {
            assert_abs_diff_eq!(v, 1.0 / 32.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn family1_embedded_spectrum() {
        for &l in &[0.92, 0.94, 0.95] {
            let i = family_inter(ExampleFamily::PureWClass1(l), Plane::XZ);
            assert_abs_diff_eq!(i.lambda_max_embedded, 0.09 + l * l, epsilon = 1e-12);
            assert_abs_diff_eq!(i.lambda_k_embedded, 0.91 - l * l, epsilon = 1e-12);
            assert_abs_diff_eq!(i.product_min, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(i.rho_abc_max, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn family5_state_quantities() {
        for &p in &[0.82, 0.9, 0.97] {
            let i = family_inter(ExampleFamily::IdentityW(p), Plane::XY);
            assert_abs_diff_eq!(i.lambda_max_embedded, (3.0 + 5.0 * p) / 12.0, epsilon = 1e-12);
            assert_abs_diff_eq!(i.lambda_k_embedded, (1.0 - p) / 4.0, epsilon = 1e-12);
            assert_abs_diff_eq!(i.rho_abc_max, (1.0 + 7.0 * p) / 8.0, epsilon = 1e-12);
            assert_abs_diff_eq!(i.rho_abc_min, (1.0 - p) / 8.0, epsilon = 1e-12);
            assert_abs_diff_eq!(i.w_rho_max, (3.0 + p) / 6.0, epsilon = 1e-12);
            // The product of two PSD matrices has a nonnegative spectrum.
            assert!(i.product_min >= -1e-12);
        }
    }

    #[test]
    fn bounds_vanish_at_unit_parameter() {
        let i = family_inter(ExampleFamily::PureWClass1(0.93), Plane::XZ);
        assert_eq!(i.sv1(1.0, i.s_nl()).unwrap(), 0.0);
        assert_eq!(i.sv2(1.0, i.s_nl()).unwrap(), 0.0);
        let i = family_inter(ExampleFamily::GhzWConvex(0.6), Plane::XY);
        let k = i.k().unwrap();
        assert_eq!(i.sv3(1.0, k).unwrap(), 0.0);
        assert_eq!(i.sv4(1.0, k).unwrap(), 0.0);
        assert!(matches!(i.sv3(0.0, k), Err(Error::InvalidOperatorParameter("p"))));
    }

    #[test]
    fn table_rows_with_state_computation() {
        // Lower column of the pure W-class family and the undetected lower
        // bound of the GHZ/W convex family follow from the state alone.
        let i = family_inter(ExampleFamily::PureWClass1(0.92), Plane::XZ);
        assert_abs_diff_eq!(i.sv1(0.0065, i.s_nl()).unwrap(), 4.8875, epsilon = 5e-3);
        let i = family_inter(ExampleFamily::PureWClass1(0.93), Plane::XZ);
        assert_abs_diff_eq!(i.sv1(0.035, i.s_nl()).unwrap(), 4.3762, epsilon = 5e-3);
        let i = family_inter(ExampleFamily::GhzWConvex(0.6), Plane::XY);
        assert_abs_diff_eq!(i.sv3(0.93, i.k().unwrap()).unwrap(), -5.6407, epsilon = 1e-2);
    }

    #[test]
    fn zero_numerators_give_empty_windows() {
        let mut i = family_inter(ExampleFamily::PureWClass1(0.93), Plane::XZ);
        i.product_min = 0.0;
        let w = i.p_window_detected(0.0);
        assert_eq!(w.l1, 0.0);
        assert!(w.genuine.empty);
        i.product_max = 0.0;
        let w = i.q_window_detected(0.0).unwrap();
        assert_eq!(w.l2, 0.0);
        assert!(w.genuine.empty);
    }

    #[test]
    fn window_endpoints_bracket_the_bound_thresholds() {
        // Inside (U, l) the bound lies strictly between 4 and 4 sqrt 2.
        let i = family_inter(ExampleFamily::PureWClass1(0.93), Plane::XZ);
        let s = i.s_nl();
        let w = i.p_window_detected(s).genuine;
        assert!(!w.empty);
        let v = i.sv1(w.midpoint(), s).unwrap();
        assert!(v > 4.0 && v < 4.0 * SQRT_2);
        assert_abs_diff_eq!(i.sv1(w.upper, s).unwrap(), 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(i.sv1(w.lower, s).unwrap(), 4.0 * SQRT_2, epsilon = 1e-9);

        let i = family_inter(ExampleFamily::GhzWConvex(0.6), Plane::XY);
        let k = i.k().unwrap();
        let w = i.p_window_undetected(k).unwrap().genuine;
        assert_abs_diff_eq!(i.sv3(w.upper, k).unwrap(), -4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(i.sv3(w.lower, k).unwrap(), -4.0 * SQRT_2, epsilon = 1e-9);
        let w = i.q_window_undetected(k).unwrap().genuine;
        assert_abs_diff_eq!(i.sv4(w.upper, k).unwrap(), 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(i.sv4(w.lower, k).unwrap(), 4.0 * SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn regime_checks() {
        let rho = make_example(ExampleFamily::GhzWConvex(0.6)).unwrap();
        let rho_ij = reduce(&rho, Pair::BC).unwrap();
        let cfg = BoundConfig::new(Pair::BC, plane_witness(Plane::XY), 0.9, 0.8);
        assert!(matches!(
            lower_bound_detected(&rho, &rho_ij, &cfg, 0.0),
            Err(Error::RegimeMismatch { .. })
        ));
        let det = NonlocalityStrength::Detected { s_nl: 0.1 };
        assert!(matches!(
            lower_bound_undetected(&rho, &rho_ij, &cfg, &det),
            Err(Error::RegimeMismatch { .. })
        ));
        let report = bounds_report(&rho, &cfg).unwrap();
        assert_eq!(report.regime, Regime::Undetected);
        assert!(report.intermediates.h.is_some() && report.intermediates.d_plus_1.is_none());
    }

    #[test]
    fn verdicts() {
        let v = detect_genuine(&make_reference(ReferenceState::Product000), &DetectOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
        let v = detect_genuine(&DensityMatrix::maximally_mixed(3), &DetectOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
        let v = detect_genuine(&make_example(ExampleFamily::PureWClass1(0.92)).unwrap(), &DetectOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Genuine);
        let ev = v.evidence.unwrap();
        assert_eq!(ev.report.regime, Regime::Detected);
        assert!(ev.window.contains(ev.value));
    }

    #[test]
    fn verdict_is_schedule_independent() {
        let rho = make_example(ExampleFamily::GhzWConvex(0.7)).unwrap();
        let seq = detect_genuine(&rho, &DetectOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
        let par = detect_genuine(&rho, &DetectOptions::default()).unwrap();
        assert_eq!(seq, par);
    }
}
