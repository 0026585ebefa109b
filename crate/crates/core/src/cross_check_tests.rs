//! The corollaries against the optimizer: a fired corollary is not always
//! backed by a Svetlichny value above 4.

use crate::bounds::{detect_genuine, Corollary, DetectOptions, Outcome};
use crate::linalg::ComplexMatrix;
use crate::optimizer::{maximize_svetlichny, OptimizerConfig};
use crate::reproduce::printed::table_rows;
use crate::states::{make_example, DensityMatrix, ExampleFamily, Pair};

fn bell_times_zero() -> DensityMatrix {
    // (|000> + |110>)/sqrt 2: a Bell pair on AB, C in |0>.
    let mut m = ComplexMatrix::zeros(8, 8);
    for (i, j) in [(0, 0), (0, 6), (6, 0), (6, 6)] {
        m[(i, j)] = 0.5.into();
    }
    DensityMatrix::from_matrix(m).unwrap()
}

#[test]
fn biseparable_state_fires_detected_corollary() {
    let rho = bell_times_zero();
    let v = detect_genuine(&rho, &DetectOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Genuine);
    let e = v.evidence.unwrap();
    assert_eq!((e.corollary, e.pair), (Corollary::C1a, Pair::AB));
    assert!(e.bound > 4.0);
    let opt = maximize_svetlichny(&rho, &OptimizerConfig::default()).unwrap();
    assert!(opt.value <= 4.0 + 1e-6, "{}", opt.value);
}

#[test]
fn tabulated_states_against_optimizer() {
    let cfg = OptimizerConfig {
        restarts: 32,
        ..Default::default()
    };
    let mut violating = Vec::new();
    for t in 1..=5 {
        for row in table_rows(t) {
            let rho = make_example(ExampleFamily::from_number(t, row.param).unwrap()).unwrap();
            if maximize_svetlichny(&rho, &cfg).unwrap().value > 4.0 + 1e-6 {
                violating.push((t, row.param));
            }
        }
    }
    assert_eq!(
        violating,
        [(3, 1.2), (3, 1.3), (3, 1.4), (3, 1.5), (4, 0.7), (4, 0.8), (5, 0.92), (5, 0.97)]
    );
}
