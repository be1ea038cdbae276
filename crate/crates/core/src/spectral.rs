//! Avoidability exponent of a doubled pattern in which every variable
//! occurs exactly twice, through the Perron root of its interleaving matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::Pattern;

pub const TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 10_000;

/// `entries[i][j]` counts occurrences of variable `i` strictly between the
/// two occurrences of variable `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeMatrix {
    pub size: usize,
    pub entries: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronRoot {
    pub beta: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeResult {
    pub pattern: Pattern,
    pub matrix: AeMatrix,
    pub beta: f64,
    pub ae: f64,
    pub iterations: usize,
}

pub fn ae_matrix(p: &Pattern) -> Result<AeMatrix> {
    let v = p.var_count();
    let mut positions = vec![Vec::with_capacity(2); v];
    for (i, &x) in p.vars().iter().enumerate() {
        positions[x as usize].push(i);
    }
    if positions.iter().any(|ps| ps.len() != 2) {
        return Err(Error::NotTwiceEach(p.to_string()));
    }
    let mut entries = vec![vec![0u32; v]; v];
    for (j, ps) in positions.iter().enumerate() {
        for &x in &p.vars()[ps[0] + 1..ps[1]] {
            entries[x as usize][j] += 1;
        }
    }
    Ok(AeMatrix { size: v, entries })
}

/// Strongly connected classes of the support graph `i -> j` when `M[i][j] > 0`.
fn classes(mat: &AeMatrix) -> Vec<Vec<usize>> {
    let n = mat.size;
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || mat.entries[i][j] > 0).collect()).collect();
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            row.iter_mut().zip(&via).for_each(|(r, &v)| *r |= v);
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if !assigned[i] {
            let class: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            class.iter().for_each(|&j| assigned[j] = true);
            out.push(class);
        }
    }
    out
}

/// Spectral radius of a non-negative matrix.
///
/// The radius is the largest over the irreducible diagonal blocks. Each
/// block is handled by power iteration on `B + I`, which is primitive, so
/// its dominant eigenvalue is simple and strictly largest in modulus.
pub fn perron_root(mat: &AeMatrix) -> Result<PerronRoot> {
    let mut best = PerronRoot { beta: 0.0, iterations: 0 };
    for class in classes(mat) {
        let block: Vec<Vec<f64>> =
            class.iter().map(|&i| class.iter().map(|&j| mat.entries[i][j] as f64).collect()).collect();
        // a single vertex without a loop contributes eigenvalue 0
        if block.len() == 1 && block[0][0] == 0.0 {
            continue;
        }
        let r = shifted_power_iteration(&block)?;
        best.iterations += r.iterations;
        best.beta = best.beta.max(r.beta);
    }
    Ok(best)
}

fn shifted_power_iteration(block: &[Vec<f64>]) -> Result<PerronRoot> {
    let n = block.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev = f64::NAN;
    let mut estimate = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let y: Vec<f64> = (0..n).map(|i| x[i] + block[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()).collect();
        // Rayleigh quotient; x has unit norm
        estimate = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        x = y.into_iter().map(|a| a / norm).collect();
        if (estimate - prev).abs() < TOLERANCE {
            return Ok(PerronRoot { beta: (estimate - 1.0).max(0.0), iterations: it });
        }
        prev = estimate;
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, estimate: estimate - 1.0 })
}

pub fn avoidability_exponent(p: &Pattern) -> Result<AeResult> {
    let matrix = ae_matrix(p)?;
    let PerronRoot { beta, iterations } = perron_root(&matrix)?;
    Ok(AeResult { pattern: p.clone(), matrix, beta, ae: 1.0 + 1.0 / (beta + 1.0), iterations })
}
