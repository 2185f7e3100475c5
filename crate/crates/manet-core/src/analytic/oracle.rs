//! Reference stationary-distribution solver.
//!
//! Solves `pi P = pi`, `sum pi = 1` for a row-stochastic tridiagonal chain by
//! dense Gaussian elimination. It shares no algebra with the closed-form
//! occupancy laws, so the two routes check each other; the closed forms stay
//! the production path and this solver backs the test suites.

use crate::error::{ModelError, Result};

/// A birth-death transition matrix: self-loops complete each row to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `up[i]` = p(i -> i+1); length = states - 1.
    pub up: Vec<f64>,
    /// `down[i]` = p(i+1 -> i); length = states - 1.
    pub down: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(up: Vec<f64>, down: Vec<f64>) -> Result<Self> {
        if up.len() != down.len() {
            return Err(ModelError::DegenerateChain(
                "up/down length mismatch".into(),
            ));
        }
        let states = up.len() + 1;
        for i in 0..states {
            let u = if i < up.len() { up[i] } else { 0.0 };
            let d = if i > 0 { down[i - 1] } else { 0.0 };
            if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&d) || u + d > 1.0 + 1e-12 {
                return Err(ModelError::DegenerateChain(format!(
                    "row {i} is not sub-stochastic (up={u}, down={d})"
                )));
            }
        }
        Ok(Tridiagonal { up, down })
    }

    pub fn states(&self) -> usize {
        self.up.len() + 1
    }

    /// Transition chances of the finite source queue with
    /// departure-before-arrival slot order: derived from the queue dynamics
    /// alone, independently of any closed-form solution.
    pub fn source_queue(lambda: f64, mu: f64, bs: u32) -> Result<Self> {
        let k = bs as usize;
        // From empty, any arrival is accepted (no same-slot service race);
        // higher levels grow only on an unserved slot with an arrival.
        let mut up = vec![(1.0 - mu) * lambda; k];
        up[0] = lambda;
        // Leaving a level needs a service and no replacement arrival.
        let down = vec![mu * (1.0 - lambda); k];
        Tridiagonal::new(up, down)
    }
}

/// Stationary probability vector of the chain, to residual below 1e-12.
///
/// Single-state chains return `[1]`. Chains with a zero birth or death rate
/// are reducible and refused, as are the period-2 chains that arise when no
/// state has a self-loop.
pub fn stationary_oracle(chain: &Tridiagonal) -> Result<Vec<f64>> {
    let k = chain.states();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    if chain.up.contains(&0.0) || chain.down.contains(&0.0) {
        return Err(ModelError::DegenerateChain(
            "zero transition rate makes the chain reducible".into(),
        ));
    }
    let has_self_loop = (0..k).any(|i| {
        let u = if i < chain.up.len() { chain.up[i] } else { 0.0 };
        let d = if i > 0 { chain.down[i - 1] } else { 0.0 };
        u + d < 1.0 - 1e-12
    });
    if !has_self_loop {
        return Err(ModelError::DegenerateChain(
            "chain without self-loops is periodic".into(),
        ));
    }

    // Rows of A: (P^T - I) pi = 0, with the last balance equation replaced by
    // the normalization constraint.
    let mut a = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        let u = if i < chain.up.len() { chain.up[i] } else { 0.0 };
        let d = if i > 0 { chain.down[i - 1] } else { 0.0 };
        let stay = 1.0 - u - d;
        a[i][i] += stay - 1.0;
        if i + 1 < k {
            a[i + 1][i] += u; // column i contributes to balance row i+1
            a[i][i + 1] += chain.down[i];
        }
    }
    let mut b = vec![0.0f64; k];
    a[k - 1].fill(1.0);
    b[k - 1] = 1.0;

    gaussian_solve(&mut a, &mut b)?;

    // Stray negatives from roundoff are clipped before renormalizing.
    let mut pi = b;
    for p in &mut pi {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }

    let residual = balance_residual(chain, &pi);
    if residual > 1e-12 {
        return Err(ModelError::DegenerateChain(format!(
            "stationary solve residual {residual:e} exceeds 1e-12"
        )));
    }
    Ok(pi)
}

/// `max_j |(pi P)_j - pi_j|`.
pub fn balance_residual(chain: &Tridiagonal, pi: &[f64]) -> f64 {
    let k = chain.states();
    let mut worst = 0.0f64;
    for j in 0..k {
        let u = if j < chain.up.len() { chain.up[j] } else { 0.0 };
        let d = if j > 0 { chain.down[j - 1] } else { 0.0 };
        let mut flow = pi[j] * (1.0 - u - d);
        if j > 0 {
            flow += pi[j - 1] * chain.up[j - 1];
        }
        if j + 1 < k {
            flow += pi[j + 1] * chain.down[j];
        }
        worst = worst.max((flow - pi[j]).abs());
    }
    worst
}

/// In-place Gaussian elimination with partial pivoting; solution lands in `b`.
fn gaussian_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<()> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(ModelError::DegenerateChain(
                "singular balance system".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            if f == 0.0 {
                continue;
            }
            for (x, p) in row[col..k].iter_mut().zip(&pivot_row[col..k]) {
                *x -= f * p;
            }
            b[col + 1 + offset] -= f * b[col];
        }
    }
    for col in (0..k).rev() {
        let mut v = b[col];
        for j in col + 1..k {
            v -= a[col][j] * b[j];
        }
        b[col] = v / a[col][col];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_state_chain() {
        let chain = Tridiagonal::new(vec![], vec![]).unwrap();
        assert_eq!(stationary_oracle(&chain).unwrap(), vec![1.0]);
    }

    #[test]
    fn two_state_chain_by_hand() {
        // up 0.2, down 0.3: pi = (0.6, 0.4).
        let chain = Tridiagonal::new(vec![0.2], vec![0.3]).unwrap();
        let pi = stationary_oracle(&chain).unwrap();
        assert_abs_diff_eq!(pi[0], 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(pi[1], 0.4, epsilon = 1e-13);
    }

    #[test]
    fn reducible_chain_flagged() {
        let chain = Tridiagonal::new(vec![0.0, 0.2], vec![0.3, 0.3]).unwrap();
        assert!(matches!(
            stationary_oracle(&chain),
            Err(ModelError::DegenerateChain(_))
        ));
    }

    #[test]
    fn periodic_chain_flagged() {
        // No state keeps a self-loop: period 2.
        let chain = Tridiagonal::new(vec![1.0, 0.5], vec![0.5, 1.0]).unwrap();
        assert!(matches!(
            stationary_oracle(&chain),
            Err(ModelError::DegenerateChain(_))
        ));
    }

    #[test]
    fn rejects_super_stochastic_rows() {
        // Middle state: up 0.6 plus down 0.5 exceeds one.
        assert!(Tridiagonal::new(vec![0.7, 0.6], vec![0.5, 0.2]).is_err());
    }
}
