// SPDX-License-Identifier: Apache-2.0

//! Fixed inputs shared by the benchmarks.

use repvol_core::{Angle, TorusElement, TorusHom};

/// Deterministic rational homomorphism `Z^(2m-1) → SO(2)^m`.
pub fn sample_hom(m: usize) -> TorusHom {
    let gens = (0..2 * m - 1)
        .map(|i| {
            TorusElement::new(
                (0..m)
                    .map(|j| Angle::from_ratio((3 * i + 5 * j + 1) as i64, (7 + i + 2 * j) as i64))
                    .collect(),
            )
        })
        .collect();
    TorusHom::from_torus(gens).expect("2m - 1 generators with m factors")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_homs_are_well_formed() {
        for m in 1..=3 {
            assert_eq!(sample_hom(m).m(), m);
        }
    }
}
