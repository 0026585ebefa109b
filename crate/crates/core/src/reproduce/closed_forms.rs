use serde::Serialize;

use crate::bounds::Intermediates;
use crate::error::{Error, Result};
use crate::states::{make_example, reduce, ExampleFamily};

use super::printed::{self, ClosedForm};

/// Relative deviation below which a printed form is exact up to float noise.
pub const EXACT_TOL: f64 = 1e-6;
/// Relative deviation attributable to rounding of printed constants.
pub const ROUNDING_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Match,
    Rounding,
    Structural,
    /// The general computation is undefined somewhere on the grid.
    Undefined,
}

impl Agreement {
    pub fn name(self) -> &'static str {
        match self {
            Agreement::Match => "match",
            Agreement::Rounding => "rounding",
            Agreement::Structural => "structural",
            Agreement::Undefined => "undefined",
        }
    }

    pub fn acceptable(self) -> bool {
        matches!(self, Agreement::Match | Agreement::Rounding)
    }

    fn classify(dev: Option<f64>) -> Self {
        match dev {
            None => Agreement::Undefined,
            Some(d) if d <= EXACT_TOL => Agreement::Match,
            Some(d) if d <= ROUNDING_TOL => Agreement::Rounding,
            Some(_) => Agreement::Structural,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub family: &'static str,
    pub name: &'static str,
    pub expression: &'static str,
    pub grid: (f64, f64, usize),
    /// Largest relative deviation from the library on the true state.
    pub deviation_state: Option<f64>,
    pub worst_param: Option<f64>,
    /// Largest relative deviation from the library formulas evaluated on
    /// the printed inputs; zero for quantities that are themselves inputs.
    pub deviation_printed: Option<f64>,
    pub agreement: Agreement,
    pub agreement_printed: Agreement,
}

/// Parameter grid each family's closed forms are sampled on.
pub fn audit_grid(family: usize) -> Option<(f64, f64)> {
    Some(match family {
        1 => (0.9176, 0.9539),
        2 => (0.5, 0.8),
        3 => (1.05, 1.55),
        4 => (0.4, 0.9),
        5 => (0.8165, 0.995),
        _ => return None,
    })
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn state_intermediates(f: ExampleFamily) -> Result<(Intermediates, f64)> {
    let rho = make_example(f)?;
    let pair = f.example_pair();
    let w = printed::family_witness(f.number());
    let inter = Intermediates::compute(&rho, &reduce(&rho, pair)?, pair, &w, Default::default())?;
    Ok((inter, inter.s_nl()))
}

fn printed_inputs(f: ExampleFamily) -> Result<(Intermediates, f64)> {
    let inter = printed::printed_intermediates(f)?;
    let s = printed::printed_s_nl(f, &inter);
    Ok((inter, s))
}

/// Worst deviation over the grid, or `None` if any point is undefined.
fn worst(
    form: &ClosedForm,
    params: &[f64],
    source: &[Option<(Intermediates, f64)>],
) -> (Option<f64>, Option<f64>) {
    let mut dev = 0.0f64;
    let mut at = None;
    for (&x, src) in params.iter().zip(source) {
        let printed_value = (form.eval)(x);
        let general = src.as_ref().and_then(|(i, s)| form.target.evaluate(i, *s));
        let (Some(g), true) = (general, printed_value.is_finite()) else {
            return (None, Some(x));
        };
        let d = rel_dev(printed_value, g);
        if d > dev || at.is_none() {
            dev = dev.max(d);
            at = Some(x);
        }
    }
    (Some(dev), at)
}

/// Samples every printed closed form of `family` on `grid_points` parameters
/// and compares it with the general computation.
pub fn reproduce_closed_forms(family: usize, grid_points: usize) -> Result<Vec<ClosedFormCheck>> {
    let (lo, hi) = audit_grid(family).ok_or_else(|| Error::UnknownName(format!("family {family}")))?;
    let n = grid_points.max(2);
    let params: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let fam = |x| ExampleFamily::from_number(family, x);
    let state: Vec<_> = params.iter().map(|&x| fam(x).and_then(state_intermediates).ok()).collect();
    let inputs: Vec<_> = params.iter().map(|&x| fam(x).and_then(printed_inputs).ok()).collect();
    let id = fam(lo)?.id();
    Ok(printed::closed_forms(family)
        .iter()
        .map(|form| {
            let (deviation_state, worst_param) = worst(form, &params, &state);
            let (deviation_printed, _) = worst(form, &params, &inputs);
            ClosedFormCheck {
                family: id,
                name: form.name,
                expression: form.expression,
                grid: (lo, hi, n),
                deviation_state,
                worst_param,
                deviation_printed,
                agreement: Agreement::classify(deviation_state),
                agreement_printed: Agreement::classify(deviation_printed),
            }
        })
        .collect())
}
