use super::quadrature::{gauss_legendre, gauss_legendre_on, pairwise_sum};
use crate::error::{QflowError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Geometry of a grid; `nodes`/`weights` on [`Grid`] are the flattened rule.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridKind {
    CartesianBox {
        lo: [f64; 3],
        hi: [f64; 3],
        n: [usize; 3],
    },
    SphericalProduct {
        r_nodes: Vec<f64>,
        theta_nodes: Vec<f64>,
        phi_nodes: Vec<f64>,
    },
    Points,
}

/// Declarative grid description accepted by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Reference,
    Verification,
    CartesianBox {
        lo: [f64; 3],
        hi: [f64; 3],
        n: [usize; 3],
    },
    Spherical {
        r_min: f64,
        r_max: f64,
        nr: usize,
        ntheta: usize,
        nphi: usize,
    },
    Points {
        nodes: Vec<[f64; 3]>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub kind: GridKind,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Radius of the default reference grid.
pub const REFERENCE_RADIUS: f64 = 30.0;

impl Grid {
    /// Tensor Gauss–Legendre rule on a box. An axis with `n = 1` collapses to
    /// its midpoint with weight equal to the box extent.
    pub fn cartesian_box(lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> Result<Grid> {
        if n.contains(&0) || (0..3).any(|a| hi[a] <= lo[a]) {
            return Err(QflowError::InvalidGrid("box needs n >= 1 and hi > lo".into()));
        }
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
            .map(|a| {
                if n[a] == 1 {
                    (vec![0.5 * (lo[a] + hi[a])], vec![hi[a] - lo[a]])
                } else {
                    gauss_legendre_on(n[a], lo[a], hi[a])
                }
            })
            .collect();
        let mut nodes = Vec::with_capacity(n[0] * n[1] * n[2]);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (x, wx) in axes[0].0.iter().zip(&axes[0].1) {
            for (y, wy) in axes[1].0.iter().zip(&axes[1].1) {
                for (z, wz) in axes[2].0.iter().zip(&axes[2].1) {
                    nodes.push([*x, *y, *z]);
                    weights.push(wx * wy * wz);
                }
            }
        }
        Ok(Grid {
            kind: GridKind::CartesianBox { lo, hi, n },
            nodes,
            weights,
        })
    }

    /// Spherical product rule from explicit radial nodes and weights (the
    /// weights exclude the `r²` Jacobian), Gauss–Legendre in `cos θ` and a
    /// uniform, half-offset `φ` rule.
    pub fn spherical_product(
        r_nodes: Vec<f64>,
        r_weights: Vec<f64>,
        ntheta: usize,
        nphi: usize,
    ) -> Result<Grid> {
        if r_nodes.is_empty() || r_nodes.len() != r_weights.len() || ntheta == 0 || nphi == 0 {
            return Err(QflowError::InvalidGrid("empty spherical rule".into()));
        }
        if r_nodes.iter().any(|&r| r <= 0.0) {
            return Err(QflowError::InvalidGrid("radial nodes must exclude r = 0".into()));
        }
        let (u, wu) = gauss_legendre(ntheta);
        let theta: Vec<f64> = u.iter().rev().map(|c| c.acos()).collect();
        let wtheta: Vec<f64> = wu.iter().rev().copied().collect();
        let phi: Vec<f64> = (0..nphi)
            .map(|k| 2.0 * PI * (k as f64 + 0.5) / nphi as f64)
            .collect();
        let wphi = 2.0 * PI / nphi as f64;
        let mut nodes = Vec::with_capacity(r_nodes.len() * ntheta * nphi);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (r, wr) in r_nodes.iter().zip(&r_weights) {
            for (th, wt) in theta.iter().zip(&wtheta) {
                let (st, ct) = th.sin_cos();
                for ph in &phi {
                    let (sp, cp) = ph.sin_cos();
                    nodes.push([r * st * cp, r * st * sp, r * ct]);
                    weights.push(wr * r * r * wt * wphi);
                }
            }
        }
        Ok(Grid {
            kind: GridKind::SphericalProduct {
                r_nodes,
                theta_nodes: theta,
                phi_nodes: phi,
            },
            nodes,
            weights,
        })
    }

    /// Shell `r_min ≤ r ≤ r_max` with Gauss–Legendre radial nodes.
    pub fn spherical(r_min: f64, r_max: f64, nr: usize, ntheta: usize, nphi: usize) -> Result<Grid> {
        if !(r_min >= 0.0 && r_max > r_min) || nr == 0 {
            return Err(QflowError::InvalidGrid("need 0 <= r_min < r_max".into()));
        }
        let (r, w) = gauss_legendre_on(nr, r_min, r_max);
        Grid::spherical_product(r, w, ntheta, nphi)
    }

    /// 200 radial × 64 θ × 64 φ nodes on the ball of radius 30.
    pub fn reference() -> Grid {
        Grid::spherical(0.0, REFERENCE_RADIUS, 200, 64, 64).expect("static grid")
    }

    /// Reference rule with a custom radius and angular order; used when a
    /// state's support or angular content calls for it.
    pub fn reference_with(radius: f64, nang: usize) -> Grid {
        Grid::spherical(0.0, radius, 200, nang, nang).expect("valid radius")
    }

    /// Shell `0.25 ≤ r ≤ 10` (20 × 12 × 12) for pointwise residual suites:
    /// away from the Coulomb centre and from the polar axis.
    pub fn verification() -> Grid {
        Grid::spherical(0.25, 10.0, 20, 12, 12).expect("static grid")
    }

    /// Unweighted probe set (all weights 1).
    pub fn points(nodes: Vec<[f64; 3]>) -> Grid {
        let weights = vec![1.0; nodes.len()];
        Grid {
            kind: GridKind::Points,
            nodes,
            weights,
        }
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Grid> {
        match spec {
            GridSpec::Reference => Ok(Grid::reference()),
            GridSpec::Verification => Ok(Grid::verification()),
            GridSpec::CartesianBox { lo, hi, n } => Grid::cartesian_box(*lo, *hi, *n),
            GridSpec::Spherical {
                r_min,
                r_max,
                nr,
                ntheta,
                nphi,
            } => Grid::spherical(*r_min, *r_max, *nr, *ntheta, *nphi),
            GridSpec::Points { nodes } => Ok(Grid::points(nodes.clone())),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Result of a grid quadrature with the number of nodes skipped as nodes of
/// the wavefunction.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub skipped: usize,
}

/// Largest tolerated fraction of skipped nodes.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;

/// `Σ wᵢ f(xᵢ)`, skipping nodes where `f` reports a wavefunction node.
pub fn integrate_scalar<F>(f: F, grid: &Grid) -> Result<Integral>
where
    F: Fn([f64; 3]) -> Result<f64> + Sync,
{
    let vals = map_nodes(grid, &f)?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    check_skipped(skipped, grid.len())?;
    let terms: Vec<f64> = vals
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| v.map_or(0.0, |v| v * w))
        .collect();
    Ok(Integral {
        value: pairwise_sum(&terms),
        skipped,
    })
}

/// Complex analogue of [`integrate_scalar`] returning only the value.
pub fn integrate_complex<F>(f: F, grid: &Grid) -> Result<num_complex::Complex64>
where
    F: Fn([f64; 3]) -> Result<num_complex::Complex64> + Sync,
{
    let vals = map_nodes(grid, &f)?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    check_skipped(skipped, grid.len())?;
    let (re, im): (Vec<f64>, Vec<f64>) = vals
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| v.map_or((0.0, 0.0), |v| (v.re * w, v.im * w)))
        .unzip();
    Ok(num_complex::Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
}

/// Evaluates `f` on every node in parallel, preserving node order. Node
/// errors become `None`; any other error aborts.
pub fn map_nodes<R, F>(grid: &Grid, f: F) -> Result<Vec<Option<R>>>
where
    R: Send,
    F: Fn([f64; 3]) -> Result<R> + Sync,
{
    grid.nodes
        .par_iter()
        .map(|&x| match f(x) {
            Ok(v) => Ok(Some(v)),
            Err(QflowError::Node { .. }) | Err(QflowError::Stencil { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

pub fn check_skipped(skipped: usize, total: usize) -> Result<()> {
    if total == 0 || skipped as f64 > MAX_SKIPPED_FRACTION * total as f64 {
        return Err(QflowError::DegenerateGrid { skipped, total });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_weights_sum_to_volume() {
        let g = Grid::cartesian_box([-1.0, 0.0, 2.0], [3.0, 0.5, 2.5], [7, 1, 4]).unwrap();
        assert!((g.total_weight() - 4.0 * 0.5 * 0.5).abs() < 1e-10);
    }

    #[test]
    fn spherical_weights_sum_to_shell_volume() {
        let g = Grid::spherical(0.5, 2.0, 12, 8, 8).unwrap();
        let v = 4.0 * PI / 3.0 * (8.0 - 0.125);
        assert!((g.total_weight() - v).abs() < 1e-8 * v);
        let r = Grid::reference();
        let vr = 4.0 * PI / 3.0 * REFERENCE_RADIUS.powi(3);
        assert!((r.total_weight() - vr).abs() < 1e-8 * vr);
    }

    #[test]
    fn radial_nodes_exclude_origin() {
        assert!(Grid::spherical_product(vec![0.0], vec![1.0], 2, 2).is_err());
        let r = Grid::reference();
        assert!(r.nodes.iter().all(|x| x.iter().map(|c| c * c).sum::<f64>() > 0.0));
    }

    #[test]
    fn zero_integrand_integrates_to_exact_zero() {
        let g = Grid::verification();
        let i = integrate_scalar(|_| Ok(0.0), &g).unwrap();
        assert_eq!(i.value, 0.0);
        assert_eq!(i.skipped, 0);
    }

    #[test]
    fn too_many_skipped_nodes_is_degenerate() {
        let g = Grid::spherical(1.0, 2.0, 4, 4, 4).unwrap();
        let r = integrate_scalar(
            |x| {
                if x[2] > 0.0 {
                    Err(QflowError::Node { x, rho: 0.0 })
                } else {
                    Ok(1.0)
                }
            },
            &g,
        );
        assert!(matches!(r, Err(QflowError::DegenerateGrid { .. })));
        let empty = Grid::points(vec![]);
        assert!(matches!(
            integrate_scalar(|_| Ok(1.0), &empty),
            Err(QflowError::DegenerateGrid { .. })
        ));
    }
}
