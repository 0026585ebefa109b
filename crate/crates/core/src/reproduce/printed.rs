//! Published numbers for the five worked examples: table rows, reduced
//! matrices as printed, closed forms of the spectral inputs and windows, and
//! the stated strength bands.

use std::f64::consts::SQRT_2;

use crate::bounds::Intermediates;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::operators::{chsh_operator, chsh_witness, plane_witness, ChshSettings, Plane, SignPattern};
use crate::states::{make_example, reduce, ExampleFamily};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub param: f64,
    pub p: f64,
    pub q: f64,
    pub lower: f64,
    pub upper: f64,
}

const fn row(param: f64, p: f64, q: f64, lower: f64, upper: f64) -> PublishedRow {
    PublishedRow {
        param,
        p,
        q,
        lower,
        upper,
    }
}

pub const TABLE_1: [PublishedRow; 4] = [
    row(0.92, 0.0065, 0.95, 4.8875, 5.2471),
    row(0.93, 0.035, 0.9695, 4.3762, 4.6088),
    row(0.94, 0.596, 0.9822, 4.4457, 4.7243),
    row(0.95, 0.0873, 0.9951, 4.1946, 4.7047),
];

pub const TABLE_2: [PublishedRow; 4] = [
    row(0.55, 0.012, 0.65, 4.4833, 5.3846),
    row(0.65, 0.014, 0.75, 4.5324, 4.6864),
    row(0.70, 0.016, 0.78, 4.2622, 4.7385),
    row(0.78, 0.0175, 0.83, 4.3356, 4.6863),
];

pub const TABLE_3: [PublishedRow; 4] = [
    row(1.2, 0.65, 0.85, -4.7555, 4.7917),
    row(1.3, 0.78, 0.76, -5.1357, 5.2385),
    row(1.4, 0.91, 0.68, -5.1099, 5.6212),
    row(1.5, 0.985, 0.67, -5.3324, 4.5781),
];

pub const TABLE_4: [PublishedRow; 4] = [
    row(0.5, 0.86, 0.75, -5.5122, 4.667),
    row(0.6, 0.93, 0.79, -5.6407, 4.3746),
    row(0.7, 0.975, 0.82, -4.8916, 4.6028),
    row(0.8, 0.992, 0.87, -4.9253, 4.5663),
];

pub const TABLE_5: [PublishedRow; 4] = [
    row(0.82, 0.993, 0.89, -5.10054, 5.5735),
    row(0.87, 0.9969, 0.92, -4.857, 5.3888),
    row(0.92, 0.9989, 0.95, -5.0963, 5.2761),
    row(0.97, 0.99985, 0.98, -5.5196, 5.4439),
];

pub fn table_rows(which: usize) -> &'static [PublishedRow] {
    match which {
        1 => &TABLE_1,
        2 => &TABLE_2,
        3 => &TABLE_3,
        4 => &TABLE_4,
        5 => &TABLE_5,
        _ => &[],
    }
}

/// Witness used with each worked example.
pub fn family_witness(family: usize) -> ComplexMatrix {
    match family {
        1 => plane_witness(Plane::XZ),
        2 => chsh_witness(&chsh_operator(&ChshSettings::mixed_example(), SignPattern::Flipped))
            .expect("Hermitian 4x4"),
        _ => plane_witness(Plane::XY),
    }
}

/// The stated spread of `S^New` and of `r` over each undetected family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bands {
    pub s_nl_new: (f64, f64),
    /// `Some` when the statement bounds `r` itself; the other families only
    /// bound the cap on `r`.
    pub r: Option<(f64, f64)>,
}

pub fn bands(family: usize) -> Option<Bands> {
    match family {
        3 => Some(Bands {
            s_nl_new: (0.05, 1.5),
            r: None,
        }),
        4 => Some(Bands {
            s_nl_new: (0.05, 8.0727),
            r: None,
        }),
        5 => Some(Bands {
            s_nl_new: (0.54124, 0.5484),
            r: Some((0.61, 0.69)),
        }),
        _ => None,
    }
}

/// `S_NL` of the mixed GHZ/W example as the window coefficients use it:
/// `0.0132 = 4 S_NL` and `0.0093 ≈ 2 sqrt 2 S_NL`. The printed strength is 0.00333.
pub const FAMILY2_S_NL_IN_WINDOWS: f64 = 0.0033;
pub const FAMILY2_S_NL_PRINTED: f64 = 0.00333;

/// The reduced two-qubit matrix as printed, in the example's pair.
pub fn printed_reduced(family: ExampleFamily) -> ComplexMatrix {
    match family {
        ExampleFamily::PureWClass1(l) => ComplexMatrix::from_real_rows(&[
            &[l * l, 0.0, 0.0, 0.3 * l],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.91 - l * l, 0.0],
            &[0.3 * l, 0.0, 0.0, 0.09],
        ]),
        ExampleFamily::MixedGhz2W(t) => {
            let a = 0.8 / 3.0;
            ComplexMatrix::from_real_rows(&[
                &[(0.6 + 2.0 * t) / 6.0, 0.0, 0.0, 0.0],
                &[0.0, a, a, 0.0],
                &[0.0, a, a, 0.0],
                &[0.0, 0.0, 0.0, (2.2 - 2.0 * t) / 6.0],
            ])
        }
        ExampleFamily::MaximalSlice(th) => {
            let c = th.cos();
            ComplexMatrix::from_real_rows(&[
                &[0.5, 0.0, 0.0, c],
                &[0.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 0.0],
                &[c, 0.0, 0.0, 0.5],
            ])
        }
        ExampleFamily::GhzWConvex(p) => {
            let a = (1.0 - p) / 3.0;
            ComplexMatrix::from_real_rows(&[
                &[a, 0.0, 0.0, 0.0],
                &[0.0, p / 2.0 + a, a, 0.0],
                &[0.0, a, p / 2.0 + a, 0.0],
                &[0.0, 0.0, 0.0, 0.0],
            ])
        }
        ExampleFamily::IdentityW(p) => {
            let d = p / 3.0 + (1.0 - p) / 4.0;
            ComplexMatrix::from_real_rows(&[
                &[d, 0.0, 0.0, 0.0],
                &[0.0, d, p / 3.0, 0.0],
                &[0.0, p / 3.0, d, 0.0],
                &[0.0, 0.0, 0.0, (1.0 - p) / 4.0],
            ])
        }
    }
}

/// Library quantity a printed closed form is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    LambdaMaxEmbedded,
    ProductMin,
    ProductMax,
    LambdaK,
    WitnessValue,
    SNl,
    KNumerator,
    PtSqMin,
    PtMax,
    WRhoMax,
    PtSqTrace,
    RhoMax,
    RhoMin,
    H,
    /// Genuine-window endpoints `U^(i)` and `l_i`.
    U1,
    L1,
    U2,
    L2,
    U3,
    L3,
    U4,
    L4,
}

impl Target {
    /// Whether the quantity feeds the bounds rather than being derived.
    pub fn is_input(self) -> bool {
        !matches!(
            self,
            Target::SNl
                | Target::H
                | Target::U1
                | Target::L1
                | Target::U2
                | Target::L2
                | Target::U3
                | Target::L3
                | Target::U4
                | Target::L4
        )
    }

    /// Value of the target on library intermediates at `X = K`.
    pub fn evaluate(self, i: &Intermediates, s_nl: f64) -> Option<f64> {
        let x = || i.k().ok();
        let v = match self {
            Target::LambdaMaxEmbedded => i.lambda_max_embedded,
            Target::ProductMin => i.product_min,
            Target::ProductMax => i.product_max,
            Target::LambdaK => i.lambda_k_embedded,
            Target::WitnessValue => i.witness_value,
            Target::SNl => s_nl,
            Target::KNumerator => i.k_numerator,
            Target::PtSqMin => i.pt_sq_min,
            Target::PtMax => i.pt_max,
            Target::WRhoMax => i.w_rho_max,
            Target::PtSqTrace => i.pt_sq_trace,
            Target::RhoMax => i.rho_abc_max,
            Target::RhoMin => i.rho_abc_min,
            Target::H => i.h(x()?).ok()?,
            Target::U1 => i.p_window_detected(s_nl).genuine.lower,
            Target::L1 => i.p_window_detected(s_nl).genuine.upper,
            Target::U2 => i.q_window_detected(s_nl).ok()?.genuine.lower,
            Target::L2 => i.q_window_detected(s_nl).ok()?.genuine.upper,
            Target::U3 => i.p_window_undetected(x()?).ok()?.genuine.lower,
            Target::L3 => i.p_window_undetected(x()?).ok()?.genuine.upper,
            Target::U4 => i.q_window_undetected(x()?).ok()?.genuine.lower,
            Target::L4 => i.q_window_undetected(x()?).ok()?.genuine.upper,
        };
        v.is_finite().then_some(v)
    }
}

/// One printed closed form, as a function of the family parameter.
#[derive(Clone, Copy)]
pub struct ClosedForm {
    pub name: &'static str,
    pub expression: &'static str,
    pub target: Target,
    pub eval: fn(f64) -> f64,
}

fn cf(name: &'static str, expression: &'static str, target: Target, eval: fn(f64) -> f64) -> ClosedForm {
    ClosedForm {
        name,
        expression,
        target,
        eval,
    }
}

fn f1_s(l: f64) -> f64 {
    -(3.15966 - 0.848528 * l - 2.82843 * l * l) / 8.0
}

fn f1_x(l: f64) -> f64 {
    0.09 * l * l + l.powi(4)
}

fn f4_h(p: f64) -> f64 {
    (2.0 + p) * (6.0 - 4.0 * SQRT_2 + 2.0 * SQRT_2 * p + (3.0 + 2.0 * SQRT_2) * p * p) * (3.0 + (9.0 - 30.0 * p + 30.0 * p * p).sqrt())
        / (72.0 * (-3.0 + 5f64.sqrt() * (p - 1.0).powi(4).sqrt() + 6.0 * p - 3.0 * p * p))
}

fn f4_r(p: f64) -> f64 {
    ((p - 4.0).powi(2) * (16.0 - 32.0 * p + 25.0 * p * p)).sqrt()
}

fn f4_pmax(p: f64) -> f64 {
    (16.0 - 8.0 * p + p * p + (256.0 - 640.0 * p + 672.0 * p * p - 232.0 * p.powi(3) + 25.0 * p.powi(4)).sqrt()) / 72.0
}

fn f4_rho_max(p: f64) -> f64 {
    (3.0 + 3f64.sqrt() * (3.0 - 10.0 * p + 10.0 * p * p).sqrt()) / 6.0
}

fn f4_k_num(p: f64) -> f64 {
    (6.0 - 4.0 * SQRT_2 + 2.0 * SQRT_2 * p + (3.0 + 2.0 * SQRT_2) * p * p) / 9.0
}

fn f4_pt_sq_min(p: f64) -> f64 {
    (3.0 - 6.0 * p + 3.0 * p * p - 5f64.sqrt() * (1.0 - 4.0 * p + 6.0 * p * p - 4.0 * p.powi(3) + p.powi(4)).sqrt()) / 18.0
}

fn f5_pmin(p: f64) -> f64 {
    (-1.0 + p * p) / 32.0
}

fn f5_pmax(p: f64) -> f64 {
    (9.0 + 30.0 * p + 25.0 * p * p + 8.0 * (27.0 * p * p + 42.0 * p.powi(3) - 3.0 * p.powi(4)).sqrt()) / 28.0
}

fn f5_pt_sq_min(p: f64) -> f64 {
    (9.0 - 6.0 * p + 21.0 * p * p - 4.0 * 5f64.sqrt() * (9.0 * p * p - 6.0 * p.powi(3) + p.powi(4)).sqrt()) / 144.0
}

/// `H` and `F` of the identity/W family from the printed inputs at `X = K`.
fn f5_h_f(p: f64) -> (f64, f64) {
    let i = printed_closed_intermediates(ExampleFamily::IdentityW(p));
    let x = i.k_numerator / (4.0 * i.negativity);
    (i.h(x).unwrap_or(f64::NAN), i.f(x).unwrap_or(f64::NAN))
}

/// Every printed closed form of `family`.
pub fn closed_forms(family: usize) -> Vec<ClosedForm> {
    use Target::*;
    match family {
        1 => vec![
            cf("lambda_max(I2 x rho_AC)", "0.09+l^2", LambdaMaxEmbedded, |l| 0.09 + l * l),
            cf("lambda_min(product)", "0", ProductMin, |_| 0.0),
            cf("lambda_max(product)", "0.09l^2+l^4", ProductMax, f1_x),
            cf("lambda_k(I2 x rho_AC)", "0.91-l^2", LambdaK, |l| 0.91 - l * l),
            cf("Tr[W rho_AC]", "3.15966-0.848528l-2.82843l^2", WitnessValue, |l| {
                3.15966 - 0.848528 * l - 2.82843 * l * l
            }),
            cf("lambda_max(rho_ABC)", "1", RhoMax, |_| 1.0),
            cf("lambda_min(rho_ABC)", "0", RhoMin, |_| 0.0),
            cf("p window lower", "2sqrt2 S/(0.09+l^2+2sqrt2 S)", U1, |l| {
                let s = f1_s(l);
                2.0 * SQRT_2 * s / (0.09 + l * l + 2.0 * SQRT_2 * s)
            }),
            cf("p window upper", "4S/(0.09+l^2+4S)", L1, |l| {
                let s = f1_s(l);
                4.0 * s / (0.09 + l * l + 4.0 * s)
            }),
            cf("q window lower", "sqrt2 X/(0.91-l^2+sqrt2 X)", U2, |l| {
                SQRT_2 * f1_x(l) / (0.91 - l * l + SQRT_2 * f1_x(l))
            }),
            cf("q window upper", "2X/(0.91-l^2+2X)", L2, |l| 2.0 * f1_x(l) / (0.91 - l * l + 2.0 * f1_x(l))),
        ],
        2 => vec![
            cf("lambda_max(I2 x rho_BC)", "0.5333", LambdaMaxEmbedded, |_| 0.5333),
            cf("lambda_min(product)", "0", ProductMin, |_| 0.0),
            cf("lambda_max(product)", "-0.111t(-4.3+t)", ProductMax, |t| -0.111 * t * (-4.3 + t)),
            cf("lambda_k(I2 x rho_BC)", "0.333(1.1-t)", LambdaK, |t| 0.333 * (1.1 - t)),
            cf("S_NL", "0.00333", SNl, |_| FAMILY2_S_NL_PRINTED),
            cf("lambda_max(rho_ABC)", "t", RhoMax, |t| t),
            cf("lambda_min(rho_ABC)", "0", RhoMin, |_| 0.0),
            cf("p window lower", "0.0093t/(0.5333+0.0093t)", U1, |t| 0.0093 * t / (0.5333 + 0.0093 * t)),
            cf("p window upper", "0.0132t/(0.5333+0.0132t)", L1, |t| 0.0132 * t / (0.5333 + 0.0132 * t)),
            cf("q window lower", "0.1571t(4.3-t)/(0.3667+0.3423t-0.1571t^2)", U2, |t| {
                0.1571 * t * (4.3 - t) / (0.3667 + 0.3423 * t - 0.1571 * t * t)
            }),
            cf("q window upper", "0.2222t(4.3-t)/(0.3667+0.6222t-0.2222t^2)", L2, |t| {
                0.2222 * t * (4.3 - t) / (0.3667 + 0.6222 * t - 0.2222 * t * t)
            }),
        ],
        3 => vec![
            cf("lambda_max(I2 x rho_BC)", "(1+2cos)/2", LambdaMaxEmbedded, |t| (1.0 + 2.0 * t.cos()) / 2.0),
            cf("lambda_min(product)", "0", ProductMin, |_| 0.0),
            cf("lambda_max(product)", "(3-cos2t)/8", ProductMax, |t| (3.0 - (2.0 * t).cos()) / 8.0),
            cf("lambda_k(I2 x rho_BC)", "(1-2cos)/2", LambdaK, |t| (1.0 - 2.0 * t.cos()) / 2.0),
            cf("Tr[W rho_BC]", "2", WitnessValue, |_| 2.0),
            cf("Tr[W rho rho^T]", "1", KNumerator, |_| 1.0),
            cf("lambda_min[(rho^T)^2]", "cos^2", PtSqMin, |t| t.cos().powi(2)),
            cf("lambda_max(rho^T)", "0.5", PtMax, |_| 0.5),
            cf("lambda_max(rho_ABC)", "1", RhoMax, |_| 1.0),
            cf("lambda_min(rho_ABC)", "0", RhoMin, |_| 0.0),
            cf("p window lower", "sqrt2 sec^3/(8+4sec+sqrt2 sec^3)", U3, |t| {
                let s = 1.0 / t.cos();
                SQRT_2 * s.powi(3) / (8.0 + 4.0 * s + SQRT_2 * s.powi(3))
            }),
            cf("p window upper", "1/(1+2cos^2+4cos^3)", L3, |t| {
                let c = t.cos();
                1.0 / (1.0 + 2.0 * c * c + 4.0 * c.powi(3))
            }),
            cf("q window lower", "(3-cos2t)/(3-cos2t+2sqrt2(1-2cos))", U4, |t| {
                let a = 3.0 - (2.0 * t).cos();
                a / (a + 2.0 * SQRT_2 * (1.0 - 2.0 * t.cos()))
            }),
            cf("q window upper", "(3-cos2t)/(5-4cos-cos2t)", L4, |t| {
                (3.0 - (2.0 * t).cos()) / (5.0 - 4.0 * t.cos() - (2.0 * t).cos())
            }),
        ],
        4 => vec![
            cf("lambda_max(I2 x rho_BC)", "(4-p)/6", LambdaMaxEmbedded, |p| (4.0 - p) / 6.0),
            cf("lambda_min(product)", "0", ProductMin, |_| 0.0),
            cf("lambda_max(product)", "(16-8p+p^2+sqrt(...))/72", ProductMax, f4_pmax),
            cf("lambda_k(I2 x rho_BC)", "(1-p)/3", LambdaK, |p| (1.0 - p) / 3.0),
            cf("Tr[W rho_BC]", "2(3-2sqrt2+2sqrt2 p)/3", WitnessValue, |p| {
                2.0 * (3.0 - 2.0 * SQRT_2 + 2.0 * SQRT_2 * p) / 3.0
            }),
            cf("Tr[W rho rho^T]", "(6-4sqrt2+2sqrt2 p+(3+2sqrt2)p^2)/9", KNumerator, f4_k_num),
            cf("lambda_min[(rho^T)^2]", "(3-6p+3p^2-sqrt5 sqrt(...))/18", PtSqMin, f4_pt_sq_min),
            cf("lambda_max(rho^T)", "(2+p)/6", PtMax, |p| (2.0 + p) / 6.0),
            cf("lambda_max(rho_ABC)", "(3+sqrt3 sqrt(3-10p+10p^2))/6", RhoMax, f4_rho_max),
            cf("lambda_min(rho_ABC)", "0", RhoMin, |_| 0.0),
            cf("H", "(2+p)(...)(3+sqrt(9-30p+30p^2))/(72(...))", H, f4_h),
            cf("p window lower", "sqrt2 H/(sqrt2 H-(4-p)/6)", U3, |p| {
                let h = f4_h(p);
                SQRT_2 * h / (SQRT_2 * h - (4.0 - p) / 6.0)
            }),
            cf("p window upper", "2H/(2H-(4-p)/6)", L3, |p| {
                let h = f4_h(p);
                2.0 * h / (2.0 * h - (4.0 - p) / 6.0)
            }),
            cf("q window lower", "(16-8p+p^2+R)/(16+12sqrt2-4(2+3sqrt2)p+p^2 R)", U4, |p| {
                let r = f4_r(p);
                (16.0 - 8.0 * p + p * p + r) / (16.0 + 12.0 * SQRT_2 - 4.0 * (2.0 + 3.0 * SQRT_2) * p + p * p * r)
            }),
            cf("q window upper", "(16-8p+p^2+R)/(28-20p+p^2+R)", L4, |p| {
                let r = f4_r(p);
                (16.0 - 8.0 * p + p * p + r) / (28.0 - 20.0 * p + p * p + r)
            }),
        ],
        5 => vec![
            cf("lambda_max(I2 x rho_BC)", "(3+5p)/12", LambdaMaxEmbedded, |p| (3.0 + 5.0 * p) / 12.0),
            cf("lambda_min(product)", "(-1+p^2)/32", ProductMin, f5_pmin),
            cf("lambda_max(product)", "(9+30p+25p^2+8sqrt(...))/28", ProductMax, f5_pmax),
            cf("lambda_k(I2 x rho_BC)", "(1-p)/4", LambdaK, |p| (1.0 - p) / 4.0),
            cf("Tr[W rho_BC]", "2-4sqrt2 p/3", WitnessValue, |p| 2.0 - 4.0 * SQRT_2 * p / 3.0),
            cf("Tr[W rho rho^T]", "(9-6sqrt2 p+(3-2sqrt2)p^2)/18", KNumerator, |p| {
                (9.0 - 6.0 * SQRT_2 * p + (3.0 - 2.0 * SQRT_2) * p * p) / 18.0
            }),
            cf("lambda_min[(rho^T)^2]", "(9-6p+21p^2-4sqrt5 sqrt(...))/144", PtSqMin, f5_pt_sq_min),
            cf("lambda_max(rho^T)", "(3-p+2sqrt5 p)/12", PtMax, |p| (3.0 - p + 2.0 * 5f64.sqrt() * p) / 12.0),
            cf("lambda_max(W rho_BC)", "(3+p)/6", WRhoMax, |p| (3.0 + p) / 6.0),
            cf("Tr[(rho^T)^2]", "(9+11p^2)/36", PtSqTrace, |p| (9.0 + 11.0 * p * p) / 36.0),
            cf("lambda_max(rho_ABC)", "(1+7p)/8", RhoMax, |p| (1.0 + 7.0 * p) / 8.0),
            cf("lambda_min(rho_ABC)", "(1-p)/8", RhoMin, |p| (1.0 - p) / 8.0),
            cf("p window lower", "sqrt2 H/(sqrt2 H-(3+p)/12)", U3, |p| {
                let h = f5_h_f(p).0;
                SQRT_2 * h / (SQRT_2 * h - (3.0 + p) / 12.0)
            }),
            cf("p window upper", "2H/(2H-(3+p)/12)", L3, |p| {
                let h = f5_h_f(p).0;
                2.0 * h / (2.0 * h - (3.0 + p) / 12.0)
            }),
            cf("q window lower", "F/(F+2sqrt2(3+p)/12)", U4, |p| {
                let f = f5_h_f(p).1;
                f / (f + 2.0 * SQRT_2 * (3.0 + p) / 12.0)
            }),
            cf("q window upper", "F/(F-2sqrt2(3+p)/12)", L4, |p| {
                let f = f5_h_f(p).1;
                f / (f - 2.0 * SQRT_2 * (3.0 + p) / 12.0)
            }),
        ],
        _ => Vec::new(),
    }
}

/// Intermediates assembled from the printed closed forms alone. Quantities
/// without a printed form (the negativity, for instance) are taken from the
/// library applied to the true state and the printed reduced matrix.
pub fn printed_closed_intermediates(family: ExampleFamily) -> Intermediates {
    printed_intermediates(family).expect("printed inputs are finite on the tabulated range")
}

pub fn printed_intermediates(family: ExampleFamily) -> Result<Intermediates> {
    let n = family.number();
    let x = family.param();
    let rho = make_example(family)?;
    let pair = family.example_pair();
    let w = family_witness(n);
    let printed = printed_reduced(family);
    // Matrices printed equal to the true marginal go through the checked path.
    let mut inter = match reduce(&rho, pair) {
        Ok(true_ij) if true_ij.matrix().max_abs_diff(&printed) < 1e-12 => {
            Intermediates::compute(&rho, &true_ij, pair, &w, Default::default())?
        }
        _ => Intermediates::compute_unchecked(&rho, &printed, pair, &w)?,
    };
    for form in closed_forms(n).iter().filter(|f| f.target.is_input()) {
        let v = (form.eval)(x);
        match form.target {
            Target::LambdaMaxEmbedded => inter.lambda_max_embedded = v,
            Target::ProductMin => inter.product_min = v,
            Target::ProductMax => inter.product_max = v,
            Target::LambdaK => inter.lambda_k_embedded = v,
            Target::WitnessValue => inter.witness_value = v,
            Target::KNumerator => inter.k_numerator = v,
            Target::PtSqMin => inter.pt_sq_min = v,
            Target::PtMax => inter.pt_max = v,
            Target::WRhoMax => inter.w_rho_max = v,
            Target::PtSqTrace => inter.pt_sq_trace = v,
            Target::RhoMax => inter.rho_abc_max = v,
            Target::RhoMin => inter.rho_abc_min = v,
            _ => unreachable!("derived quantities are not inputs"),
        }
    }
    Ok(inter)
}

/// `S_NL` the detected tables were evaluated with.
pub fn printed_s_nl(family: ExampleFamily, inter: &Intermediates) -> f64 {
    match family {
        ExampleFamily::MixedGhz2W(_) => FAMILY2_S_NL_IN_WINDOWS,
        _ => inter.s_nl(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn family2_window_coefficients_encode_truncated_strength() {
        assert_abs_diff_eq!(4.0 * FAMILY2_S_NL_IN_WINDOWS, 0.0132, epsilon = 1e-12);
        assert_abs_diff_eq!(2.0 * SQRT_2 * FAMILY2_S_NL_IN_WINDOWS, 0.0093, epsilon = 5e-5);
        // The unrounded strength would print as 0.0133 and 0.0094.
        assert!((4.0 * FAMILY2_S_NL_PRINTED - 0.0132).abs() > 1e-4);
    }

    #[test]
    fn printed_matrices_match_true_marginals_except_maximal_slice() {
        for n in 1..=5 {
            let rows = table_rows(n);
            let f = ExampleFamily::from_number(n, rows[1].param).unwrap();
            let true_ij = reduce(&make_example(f).unwrap(), f.example_pair()).unwrap();
            let d = true_ij.matrix().max_abs_diff(&printed_reduced(f));
            if n == 3 {
                assert!(d > 0.1);
            } else {
                assert!(d < 1e-12, "family {n}: {d}");
            }
        }
    }

    #[test]
    fn tabulated_parameters_sit_in_printed_windows() {
        let i = printed_closed_intermediates(ExampleFamily::MaximalSlice(1.2));
        let k = i.k().unwrap();
        assert!(i.p_window_undetected(k).unwrap().genuine.contains(0.65));
        assert!(i.q_window_undetected(k).unwrap().genuine.contains(0.85));
        let i = printed_closed_intermediates(ExampleFamily::PureWClass1(0.92));
        assert!(i.p_window_detected(i.s_nl()).genuine.contains(0.0065));
        assert!(i.q_window_detected(i.s_nl()).unwrap().genuine.contains(0.95));
        let f = ExampleFamily::MixedGhz2W(0.55);
        let i = printed_closed_intermediates(f);
        let s = printed_s_nl(f, &i);
        assert!(i.p_window_detected(s).genuine.contains(0.012));
    }
}
