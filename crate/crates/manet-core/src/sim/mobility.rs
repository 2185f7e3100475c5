//! Node movement over the m-by-m torus of cells.

use rand::Rng;

use super::rng_util::uniform_index;
use crate::params::Mobility;

/// Advances every node one slot. Cells are indexed row-major as `r * m + c`.
///
/// * i.i.d: a fresh uniform cell each slot.
/// * Random walk: uniform over the nine slots of the 3x3 torus neighborhood;
///   on small tori several of the nine land on the same cell, which keeps the
///   per-slot choice at exactly 1/9 each.
pub fn mobility_step<R: Rng>(model: Mobility, m: u32, cells: &mut [u32], rng: &mut R) {
    match model {
        Mobility::Iid => {
            let m2 = m * m;
            for cell in cells.iter_mut() {
                *cell = uniform_index(rng, m2);
            }
        }
        Mobility::Rw => {
            for cell in cells.iter_mut() {
                let r = *cell / m;
                let c = *cell % m;
                let pick = uniform_index(rng, 9);
                let dr = pick / 3;
                let dc = pick % 3;
                let nr = (r + m + dr - 1) % m;
                let nc = (c + m + dc - 1) % m;
                *cell = nr * m + nc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_cell_walk_stays_put() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut cells = vec![0u32; 5];
        for _ in 0..50 {
            mobility_step(Mobility::Rw, 1, &mut cells, &mut rng);
            assert!(cells.iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn walk_reaches_all_nine_neighbors_with_wraparound() {
        // On a 3x3 torus every cell is adjacent to every other, so one step
        // from the corner can land anywhere.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [false; 9];
        for _ in 0..500 {
            let mut cells = vec![0u32];
            mobility_step(Mobility::Rw, 3, &mut cells, &mut rng);
            seen[cells[0] as usize] = true;
        }
        assert!(seen.iter().all(|&s| s), "reachable set {seen:?}");
    }

    #[test]
    fn iid_occupancy_is_uniform() {
        // Chi-squared against uniform over 16 cells; 99% quantile for 15
        // degrees of freedom is 30.58.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 4u32;
        let mut counts = [0u64; 16];
        let mut cells = vec![0u32; 10];
        let steps = 100_000;
        for _ in 0..steps {
            mobility_step(Mobility::Iid, m, &mut cells, &mut rng);
            for &c in &cells {
                counts[c as usize] += 1;
            }
        }
        let total = (steps * 10) as f64;
        let expected = total / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 30.58, "chi2 = {chi2}");
    }

    #[test]
    fn rw_occupancy_is_uniform_in_steady_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = 4u32;
        let mut counts = [0u64; 16];
        let mut cells = vec![5u32; 10];
        for _ in 0..1000 {
            mobility_step(Mobility::Rw, m, &mut cells, &mut rng); // burn-in
        }
        let steps = 100_000;
        for _ in 0..steps {
            mobility_step(Mobility::Rw, m, &mut cells, &mut rng);
            for &c in &cells {
                counts[c as usize] += 1;
            }
        }
        let total = (steps * 10) as f64;
        let expected = total / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // Correlated samples widen the statistic; stay well clear anyway.
        assert!(chi2 < 120.0, "chi2 = {chi2}");
    }
}
