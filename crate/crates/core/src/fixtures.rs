//! Built-in tensors.

use crate::tensor::SymTensor;

/// Orbit representatives (one-based) of the 3×3×3×3 Kofidis–Regalia tensor,
/// a classic case on which the symmetric power method fails to converge.
pub const KOFIDIS_ORBITS: [([usize; 4], f64); 15] = [
    ([1, 1, 1, 1], 0.2883),
    ([1, 1, 2, 2], -0.2485),
    ([1, 2, 2, 2], 0.2972),
    ([1, 3, 3, 3], -0.3619),
    ([2, 2, 3, 3], 0.2127),
    ([1, 1, 1, 2], -0.0031),
    ([1, 1, 2, 3], -0.2939),
    ([1, 2, 2, 3], 0.1862),
    ([2, 2, 2, 2], 0.1241),
    ([2, 3, 3, 3], 0.2727),
    ([1, 1, 1, 3], 0.1973),
    ([1, 1, 3, 3], 0.3847),
    ([1, 2, 3, 3], 0.0919),
    ([2, 2, 2, 3], -0.3420),
    ([3, 3, 3, 3], -0.3054),
];

pub fn kofidis_tensor() -> SymTensor {
    let mut t = SymTensor::zeros(4, 3);
    for (index, value) in KOFIDIS_ORBITS {
        let zero_based: Vec<usize> = index.iter().map(|i| i - 1).collect();
        t.set_orbit(&zero_based, value).expect("fixture indices are in range");
    }
    t
}

/// Looks up a built-in tensor by name (`kofidis`).
pub fn builtin(name: &str) -> Option<SymTensor> {
    match name {
        "kofidis" => Some(kofidis_tensor()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SYMMETRY_TOL;

    #[test]
    fn fixture_holds_printed_values_at_every_permutation() {
        let t = kofidis_tensor();
        assert!(t.symmetry_residual() <= SYMMETRY_TOL);
        for (index, value) in KOFIDIS_ORBITS {
            let zb: Vec<usize> = index.iter().map(|i| i - 1).collect();
            assert_eq!(t.get(&zb), value);
            let rev: Vec<usize> = zb.iter().rev().copied().collect();
            assert_eq!(t.get(&rev), value);
        }
        // 15 orbits cover all 81 entries, none left at zero
        assert!(t.data().iter().all(|v| *v != 0.0));
    }

    #[test]
    fn fixture_subtensor_on_first_two_indices() {
        let s = kofidis_tensor().subtensor(&[0, 1]).unwrap();
        assert_eq!(s.get(&[0, 0, 0, 0]), 0.2883);
        assert_eq!(s.get(&[0, 0, 1, 1]), -0.2485);
        assert_eq!(s.get(&[1, 1, 1, 1]), 0.1241);
    }

    #[test]
    fn fixture_norm_counts_orbit_multiplicities() {
        fn multiplicity(idx: &[usize; 4]) -> f64 {
            let mut counts = [0usize; 4];
            for &i in idx {
                counts[i] += 1;
            }
            let fact = |k: usize| (1..=k).product::<usize>() as f64;
            fact(4) / counts.iter().map(|&c| fact(c)).product::<f64>()
        }
        let expected: f64 = KOFIDIS_ORBITS
            .iter()
            .map(|(idx, v)| multiplicity(idx) * v * v)
            .sum::<f64>()
            .sqrt();
        let mult_total: f64 = KOFIDIS_ORBITS.iter().map(|(idx, _)| multiplicity(idx)).sum();
        assert_eq!(mult_total, 81.0);
        assert!((kofidis_tensor().frobenius_norm() - expected).abs() < 1e-14);
    }
}
