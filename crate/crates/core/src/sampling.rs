//! Random states, operators and directions for sweeps and property tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{kron, ComplexMatrix};
use crate::operators::UnitVector3;
use crate::states::{permute_qubits, DensityMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Ginibre ensemble: `G G^dagger / Tr` with `G` of shape `dim x rank`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_row_major(dim, rank, (0..dim * rank).map(|_| gaussian(rng)).collect())
        .expect("shape");
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix(m.scale(1.0 / tr)).expect("Ginibre sample is a state")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_row_major(dim, dim, (0..dim * dim).map(|_| gaussian(rng)).collect())
        .expect("shape");
    (&g + &g.adjoint()).scale(0.5)
}

pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_row_major(dim, dim, (0..dim * dim).map(|_| gaussian(rng)).collect())
        .expect("shape");
    &g * &g.adjoint()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVector3 {
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let n = (x * x + y * y + z * z).sqrt();
        if n > 1e-9 {
            return UnitVector3::normalized(x, y, z).expect("nonzero");
        }
    }
}

/// Convex mixture of `terms` random product states `rho_a ⊗ rho_b`.
pub fn random_separable_two_qubit<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> DensityMatrix {
    let weights = random_weights(rng, terms);
    let mut acc = ComplexMatrix::zeros(4, 4);
    for w in weights {
        let a = random_density(rng, 2, 2);
        let b = random_density(rng, 2, 2);
        acc = &acc + &kron(a.matrix(), b.matrix()).scale(w);
    }
    DensityMatrix::from_matrix(acc).expect("mixture of states")
}

/// Classical mixture of states that are each a product across a randomly
/// chosen one-versus-two cut.
pub fn random_biseparable_three_qubit<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> DensityMatrix {
    let weights = random_weights(rng, terms);
    let mut acc = ComplexMatrix::zeros(8, 8);
    for w in weights {
        let (r1, r2) = (rng.random_range(1..=2), rng.random_range(1..=4));
        let single = random_density(rng, 2, r1);
        let pair = random_density(rng, 4, r2);
        // kron puts the single qubit first; move it to position `cut`.
        let raw = kron(single.matrix(), pair.matrix());
        let cut = rng.random_range(0..3);
        let perm: [usize; 3] = match cut {
            0 => [0, 1, 2],
            1 => [1, 0, 2],
            _ => [1, 2, 0],
        };
        acc = &acc + &permute_qubits(&raw, &perm).scale(w);
    }
    DensityMatrix::from_matrix(acc).expect("mixture of states")
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{negativity, partial_trace, Subsystem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for rank in 1..=8 {
            let rho = random_density(&mut rng, 8, rank);
            assert_eq!(rho.qubits(), 3);
        }
        let b = random_biseparable_three_qubit(&mut rng, 3);
        assert_eq!(b.qubits(), 3);
    }

    #[test]
    fn single_cut_product_has_separable_marginal_across_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let rho = random_biseparable_three_qubit(&mut rng, 1);
            // Exactly one qubit factorizes; at least one pair containing it is PPT.
            let ppt = Subsystem::ALL
                .iter()
                .filter(|&&s| negativity(&partial_trace(&rho, s).unwrap()).unwrap() < 1e-12)
                .count();
            assert!(ppt >= 2);
        }
    }
}
