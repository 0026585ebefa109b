//! Where a state comes from, and which pair and witness to evaluate.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use svet_core::operators::{plane_witness, Plane};
use svet_core::statefile::{parse_inline, parse_state, StateSource};
use svet_core::states::{make_reference_by_name, DensityMatrix, ExampleFamily, Pair};
use svet_core::{ComplexMatrix, Error};

use crate::Failure;

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// Example family id (pure-W-class-1, mixed-GHZ-2W, maximal-slice,
    /// GHZ-W-convex, identity-W) or its number 1..5.
    #[arg(long, requires = "param")]
    pub family: Option<String>,
    /// State file (`dim N` plus rows of `re,im`, or `family <id> <param>`).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Matrix rows separated by `;`, entries `re,im` separated by spaces.
    #[arg(long)]
    pub inline: Option<String>,
    /// Reference state: GHZ, W, W2, Bell-Φ⁺, product-000.
    #[arg(long = "ref")]
    pub reference: Option<String>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Family parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum WitnessSpec {
    Plane(Plane),
    Custom(ComplexMatrix),
}

impl WitnessSpec {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        if let Ok(p) = text.parse::<Plane>() {
            return Ok(WitnessSpec::Plane(p));
        }
        match read_source(&PathBuf::from(text))? {
            StateSource::Matrix(m) if m.dim() == 4 && m.is_hermitian(1e-10) => Ok(WitnessSpec::Custom(m)),
            StateSource::Matrix(_) => Err(Failure::Invalid("witness must be a Hermitian 4x4 matrix".into())),
            StateSource::Family(_) => Err(Failure::Invalid("witness file must contain a matrix".into())),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            WitnessSpec::Plane(p) => plane_witness(*p),
            WitnessSpec::Custom(m) => m.clone(),
        }
    }
}

fn read_source(path: &PathBuf) -> Result<StateSource, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text).map_err(Failure::from)
}

impl StateArgs {
    pub fn source(&self) -> Result<StateSource, Failure> {
        let s = &self.source;
        if let Some(id) = &s.family {
            let param = self.param.expect("clap enforces --param");
            return Ok(StateSource::Family(ExampleFamily::from_id(id, param).map_err(Failure::usage)?));
        }
        if let Some(path) = &s.matrix {
            return read_source(path);
        }
        if let Some(text) = &s.inline {
            return Ok(StateSource::Matrix(parse_inline(text)?));
        }
        if let Some(name) = &s.reference {
            let rho = make_reference_by_name(name).map_err(Failure::usage)?;
            return Ok(StateSource::Matrix(rho.into_matrix()));
        }
        unreachable!("clap requires one source")
    }

    pub fn resolve(&self) -> Result<DensityMatrix, Failure> {
        self.source()?.resolve().map_err(Failure::from)
    }
}

pub fn parse_pair(text: &str) -> Result<Pair, Failure> {
    text.parse().map_err(|e: Error| Failure::usage(e))
}
