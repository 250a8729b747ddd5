//! Fixed-step explicit Runge-Kutta integration for scalar ODEs.
//!
//! The default method is the seventh-order solution of Fehlberg's 7(8)
//! pair. Only the eleven stages that feed the order-7 weights are kept;
//! the two extra stages of the embedded eighth-order solution are dropped
//! since no error control is performed.

use crate::error::{Error, Result};

/// Explicit Butcher tableau. `a` is stored row by row, row `i` holding the
/// `i` coefficients a[i][0..i].
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub order: u32,
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Fehlberg's order-7 method (RKF7 of the RKF 7(8) pair).
    pub fn fehlberg7() -> Self {
        let c = vec![
            0.0,
            2.0 / 27.0,
            1.0 / 9.0,
            1.0 / 6.0,
            5.0 / 12.0,
            1.0 / 2.0,
            5.0 / 6.0,
            1.0 / 6.0,
            2.0 / 3.0,
            1.0 / 3.0,
            1.0,
        ];
        let a = vec![
            vec![],
            vec![2.0 / 27.0],
            vec![1.0 / 36.0, 1.0 / 12.0],
            vec![1.0 / 24.0, 0.0, 1.0 / 8.0],
            vec![5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0],
            vec![1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0],
            vec![
                -25.0 / 108.0,
                0.0,
                0.0,
                125.0 / 108.0,
                -65.0 / 27.0,
                125.0 / 54.0,
            ],
            vec![
                31.0 / 300.0,
                0.0,
                0.0,
                0.0,
                61.0 / 225.0,
                -2.0 / 9.0,
                13.0 / 900.0,
            ],
            vec![
                2.0,
                0.0,
                0.0,
                -53.0 / 6.0,
                704.0 / 45.0,
                -107.0 / 9.0,
                67.0 / 90.0,
                3.0,
            ],
            vec![
                -91.0 / 108.0,
                0.0,
                0.0,
                23.0 / 108.0,
                -976.0 / 135.0,
                311.0 / 54.0,
                -19.0 / 60.0,
                17.0 / 6.0,
                -1.0 / 12.0,
            ],
            vec![
                2383.0 / 4100.0,
                0.0,
                0.0,
                -341.0 / 164.0,
                4496.0 / 1025.0,
                -301.0 / 82.0,
                2133.0 / 4100.0,
                45.0 / 82.0,
                45.0 / 164.0,
                18.0 / 41.0,
            ],
        ];
        let b = vec![
            41.0 / 840.0,
            0.0,
            0.0,
            0.0,
            0.0,
            34.0 / 105.0,
            9.0 / 35.0,
            9.0 / 35.0,
            9.0 / 280.0,
            9.0 / 280.0,
            41.0 / 840.0,
        ];
        ButcherTableau { c, a, b, order: 7 }
    }

    /// Checks explicitness, consistency (Σb = 1) and the row-sum condition.
    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if self.c.len() != s || self.a.len() != s {
            return Err(Error::InvalidArgument("tableau dimensions disagree".into()));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != i {
                return Err(Error::InvalidArgument(format!(
                    "row {i} of a must have {i} entries (explicit method)"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - self.c[i]).abs() > 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "row sum {sum} differs from c[{i}] = {}",
                    self.c[i]
                )));
            }
        }
        let total: f64 = self.b.iter().sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(())
    }
}

/// Solution values on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub h: f64,
}

impl GridSolution {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Uniform grid with nodes `start + i*h`, the last node pinned to `end`.
pub fn uniform_nodes(start: f64, end: f64, n_steps: usize) -> (Vec<f64>, f64) {
    let h = (end - start) / n_steps as f64;
    let nodes = (0..=n_steps)
        .map(|i| {
            if i == n_steps {
                end
            } else {
                start + i as f64 * h
            }
        })
        .collect();
    (nodes, h)
}

/// Integrates `dxi/dx = rhs(x, xi)` from `(x_start, xi_start)` to `x_end`
/// in `n_steps` equal steps of the given tableau.
pub fn integrate_with<F>(
    tableau: &ButcherTableau,
    rhs: F,
    x_start: f64,
    xi_start: f64,
    x_end: f64,
    n_steps: usize,
) -> Result<GridSolution>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    if !xi_start.is_finite() {
        return Err(Error::NonFinite { x: x_start });
    }
    let (nodes, h) = uniform_nodes(x_start, x_end, n_steps);
    let s = tableau.stages();
    let mut k = vec![0.0; s];
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut xi = xi_start;
    values.push(xi);

    for step in 0..n_steps {
        let x = nodes[step];
        let h_step = nodes[step + 1] - x;
        for i in 0..s {
            let incr: f64 = tableau.a[i].iter().zip(&k[..i]).map(|(a, k)| a * k).sum();
            let xs = x + tableau.c[i] * h_step;
            let ki = rhs(xs, xi + h_step * incr)?;
            if !ki.is_finite() {
                return Err(Error::NonFinite { x: xs });
            }
            k[i] = ki;
        }
        let incr: f64 = tableau.b.iter().zip(&k).map(|(b, k)| b * k).sum();
        xi += h_step * incr;
        if !xi.is_finite() {
            return Err(Error::NonFinite { x: nodes[step + 1] });
        }
        values.push(xi);
    }

    Ok(GridSolution { nodes, values, h })
}

/// [`integrate_with`] using the order-7 Fehlberg tableau.
pub fn integrate<F>(
    rhs: F,
    x_start: f64,
    xi_start: f64,
    x_end: f64,
    n_steps: usize,
) -> Result<GridSolution>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    integrate_with(
        &ButcherTableau::fehlberg7(),
        rhs,
        x_start,
        xi_start,
        x_end,
        n_steps,
    )
}
