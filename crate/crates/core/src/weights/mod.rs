//! Weights and their characteristics.
//!
//! Averages of constant, coordinate-power and one-dimensional power weights are
//! integrated in closed form; radial powers in two or more dimensions use a midpoint
//! rule, tabulated weights the exact integral of their cellwise-constant extension.

mod candidates;
mod maximal;

pub use candidates::{
    ainf_characteristic, ap_characteristic, apr_characteristic, two_weight_characteristic,
    CandidateFamily, CandidateSpec, CharacteristicEstimate, Shape,
};
pub use maximal::{all_widths, maximal_cells, maximal_function};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{AxisBox, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    Constant {
        c: f64,
    },
    /// Radial power `|x|^a`.
    Power {
        a: f64,
    },
    /// `prod_j |x_j|^{a_j}`.
    CoordPower {
        a: Vec<f64>,
    },
    /// Node values on `grid`, extended as constant on each cell `x_j + [-h/2, h/2)^n`.
    Tabulated {
        grid: Grid,
        values: Vec<f64>,
    },
}

/// Quadrature resolution for weights without a closed-form box integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrature {
    /// Midpoint nodes per axis for one-dimensional quadrature.
    pub resolution: usize,
    /// Midpoint nodes per axis for radial powers in two or three dimensions.
    pub resolution_nd: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            resolution: 512,
            resolution_nd: 64,
        }
    }
}

/// `\int_lo^hi |t|^a dt` if finite.
pub(crate) fn power_integral(a: f64, lo: f64, hi: f64) -> Option<f64> {
    if lo == hi {
        return Some(0.0);
    }
    if a == 0.0 {
        return Some(hi - lo);
    }
    let touches = lo <= 0.0 && 0.0 <= hi;
    if touches && a <= -1.0 {
        return None;
    }
    let prim = |t: f64| -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t.signum() * t.abs().powf(a + 1.0) / (a + 1.0)
        }
    };
    if a == -1.0 {
        // both endpoints on the same side of zero
        return Some((hi.abs() / lo.abs()).ln().abs());
    }
    Some(prim(hi) - prim(lo))
}

impl Weight {
    pub fn constant(c: f64) -> Self {
        Weight::Constant { c }
    }

    pub fn power(a: f64) -> Self {
        Weight::Power { a }
    }

    pub fn coord_power(a: Vec<f64>) -> Self {
        Weight::CoordPower { a }
    }

    pub fn tabulated(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let w = Weight::Tabulated { grid, values };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::Constant { c } if !(*c > 0.0 && c.is_finite()) => Err(Error::arg(
                "c",
                "constant weight must be positive and finite",
            )),
            Weight::Power { a } if !a.is_finite() => {
                Err(Error::arg("a", "exponent must be finite"))
            }
            Weight::CoordPower { a } if a.is_empty() || a.iter().any(|x| !x.is_finite()) => {
                Err(Error::arg(
                    "a",
                    "coordinate exponents must be a nonempty list of finite reals",
                ))
            }
            Weight::Tabulated { grid, values } => {
                if values.len() != grid.num_nodes() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.num_nodes(),
                        found: values.len(),
                    });
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::arg(
                        "values",
                        "tabulated weights must be finite and nonnegative at nodes",
                    ));
                }
                if values.iter().all(|v| *v == 0.0) {
                    return Err(Error::arg(
                        "values",
                        "tabulated weight vanishes identically",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self, Weight::Constant { c } if *c == 1.0)
    }

    /// `w^t`, with closed-form exponent arithmetic for the analytic kinds.
    pub fn pow(&self, t: f64) -> Weight {
        match self {
            Weight::Constant { c } => Weight::Constant { c: c.powf(t) },
            Weight::Power { a } => Weight::Power { a: a * t },
            Weight::CoordPower { a } => Weight::CoordPower {
                a: a.iter().map(|x| x * t).collect(),
            },
            Weight::Tabulated { grid, values } => Weight::Tabulated {
                grid: *grid,
                values: values.iter().map(|v| v.powf(t)).collect(),
            },
        }
    }

    /// The `p`-dual weight `w^{-1/(p-1)}`.
    pub fn dual(&self, p: f64) -> Result<Weight> {
        dual_weight(self, p)
    }

    /// Pointwise value; power kinds are infinite or zero at their singular set.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Constant { c } => *c,
            Weight::Power { a } => {
                if *a == 0.0 {
                    return 1.0;
                }
                x.iter().map(|t| t * t).sum::<f64>().sqrt().powf(*a)
            }
            Weight::CoordPower { a } => x
                .iter()
                .zip(a)
                .map(|(t, e)| if *e == 0.0 { 1.0 } else { t.abs().powf(*e) })
                .product(),
            Weight::Tabulated { grid, values } => values[grid.nearest_node(x)],
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Weight::CoordPower { a } if a.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: a.len(),
            }),
            Weight::Tabulated { grid, .. } if grid.dim() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: grid.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// `w(A) = \int_A w`.
    pub fn integral(&self, b: &AxisBox, quad: &Quadrature) -> Result<f64> {
        let dim = b.dim();
        self.check_dim(dim)?;
        let non_integrable = |factor: usize, exponent: f64| Error::NonIntegrable {
            factor,
            exponent,
            bounds: b.describe(),
        };
        match self {
            Weight::Constant { c } => Ok(c * b.volume()),
            Weight::CoordPower { a } => {
                let mut prod = 1.0;
                for (j, &e) in a.iter().enumerate() {
                    prod *= power_integral(e, b.lo[j], b.hi[j]).ok_or(non_integrable(j, e))?;
                }
                Ok(prod)
            }
            Weight::Power { a } if dim == 1 => {
                power_integral(*a, b.lo[0], b.hi[0]).ok_or(non_integrable(0, *a))
            }
            Weight::Power { a } => {
                if *a <= -(dim as f64) && (0..dim).all(|j| b.touches_zero(j)) {
                    return Err(non_integrable(0, *a));
                }
                Ok(midpoint_box(b, quad.resolution_nd, |x| self.value(x)))
            }
            Weight::Tabulated { grid, values } => Ok(tabulated_integral(grid, values, b)),
        }
    }

    /// `w(A) / |A|`.
    pub fn average(&self, b: &AxisBox, quad: &Quadrature) -> Result<f64> {
        Ok(self.integral(b, quad)? / b.volume())
    }

    /// Values at the nodes of `grid`. A power-type singular node is replaced by the
    /// average of the weight over its cell `[-h/2, h/2)` (per singular axis for
    /// coordinate powers).
    pub fn node_values(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_dim(grid.dim())?;
        let h = grid.spacing();
        let cell_avg_1d = |a: f64| -> Result<f64> {
            if a <= -1.0 {
                return Err(Error::NonIntegrable {
                    factor: 0,
                    exponent: a,
                    bounds: format!("[{}, {})", -h / 2.0, h / 2.0),
                });
            }
            Ok((h / 2.0).powf(a) / (a + 1.0))
        };
        match self {
            Weight::Tabulated { grid: g, values } => {
                if g != grid {
                    return Err(Error::arg(
                        "grid",
                        "tabulated weight was sampled on a different grid",
                    ));
                }
                Ok(values.clone())
            }
            Weight::Constant { c } => Ok(vec![*c; grid.num_nodes()]),
            Weight::CoordPower { a } => {
                let mut singular = Vec::with_capacity(a.len());
                for &e in a {
                    singular.push(if e == 0.0 { 1.0 } else { cell_avg_1d(e)? });
                }
                let axis_vals: Vec<Vec<f64>> = a
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| {
                        (0..grid.points())
                            .map(|i| {
                                let t = grid.coord(i);
                                if e == 0.0 {
                                    1.0
                                } else if t == 0.0 {
                                    singular[j]
                                } else {
                                    t.abs().powf(e)
                                }
                            })
                            .collect()
                    })
                    .collect();
                Ok((0..grid.num_nodes())
                    .map(|idx| {
                        let m = grid.unravel(idx);
                        (0..grid.dim()).map(|j| axis_vals[j][m[j]]).product()
                    })
                    .collect())
            }
            Weight::Power { a } => {
                let origin = grid.nearest_node(&[0.0; 3]);
                let at_origin = if *a == 0.0 {
                    1.0
                } else if grid.dim() == 1 {
                    cell_avg_1d(*a)?
                } else {
                    if *a <= -(grid.dim() as f64) {
                        return Err(Error::NonIntegrable {
                            factor: 0,
                            exponent: *a,
                            bounds: "origin cell".into(),
                        });
                    }
                    let cell = AxisBox::cube(&vec![0.0; grid.dim()], h)?;
                    midpoint_box(&cell, 64, |x| self.value(x)) / cell.volume()
                };
                Ok((0..grid.num_nodes())
                    .map(|idx| {
                        if idx == origin {
                            at_origin
                        } else {
                            self.value(&grid.node(idx)[..grid.dim()])
                        }
                    })
                    .collect())
            }
        }
    }
}

/// The `p`-dual weight `w'_p = w^{-1/(p-1)}`.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in (1, inf)"),
        ));
    }
    Ok(w.pow(-1.0 / (p - 1.0)))
}

/// Midpoint rule with `q` nodes per axis; nonfinite values (a singular node) are skipped.
fn midpoint_box(b: &AxisBox, q: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let dim = b.dim();
    let steps: Vec<f64> = (0..dim).map(|a| b.side(a) / q as f64).collect();
    let total = q.pow(dim as u32);
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    for flat in 0..total {
        let mut r = flat;
        for a in (0..dim).rev() {
            let i = r % q;
            r /= q;
            x[a] = b.lo[a] + (i as f64 + 0.5) * steps[a];
        }
        let v = f(&x);
        if v.is_finite() {
            sum += v;
        }
    }
    sum * steps.iter().product::<f64>()
}

fn tabulated_integral(grid: &Grid, values: &[f64], b: &AxisBox) -> f64 {
    let h = grid.spacing();
    let dim = grid.dim();
    // per-axis (index, overlap length) of cells meeting the box
    let axes: Vec<Vec<(usize, f64)>> = (0..dim)
        .map(|a| {
            (0..grid.points())
                .filter_map(|i| {
                    let x = grid.coord(i);
                    let o = (b.hi[a].min(x + 0.5 * h) - b.lo[a].max(x - 0.5 * h)).max(0.0);
                    (o > 0.0).then_some((i, o))
                })
                .collect()
        })
        .collect();
    let mut sum = 0.0;
    let mut multi = [0usize; 3];
    let counts: Vec<usize> = axes.iter().map(|v| v.len()).collect();
    let total: usize = counts.iter().product();
    for flat in 0..total {
        let mut r = flat;
        let mut vol = 1.0;
        for a in (0..dim).rev() {
            let (i, o) = axes[a][r % counts[a]];
            r /= counts[a];
            multi[a] = i;
            vol *= o;
        }
        sum += values[grid.ravel(&multi)] * vol;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_weight_exponents() {
        assert_eq!(
            dual_weight(&Weight::constant(1.0), 2.0).unwrap(),
            Weight::constant(1.0)
        );
        assert_eq!(
            dual_weight(&Weight::power(0.5), 2.0).unwrap(),
            Weight::power(-0.5)
        );
        assert_eq!(
            dual_weight(&Weight::power(1.0), 3.0).unwrap(),
            Weight::power(-0.5)
        );
        assert!(dual_weight(&Weight::power(1.0), 1.0).is_err());
    }

    #[test]
    fn power_integral_closed_form() {
        let q = Quadrature::default();
        let b = AxisBox::new(vec![-1.0], vec![2.0]).unwrap();
        let want = (1.0 + 2f64.powf(1.5)) / 1.5;
        assert!((Weight::power(0.5).integral(&b, &q).unwrap() - want).abs() < 1e-14);
        let e = Weight::power(-1.0).integral(&b, &q).unwrap_err();
        assert!(matches!(e, Error::NonIntegrable { factor: 0, .. }));
        let away = AxisBox::new(vec![1.0], vec![2.0]).unwrap();
        let v = Weight::power(-1.0).integral(&away, &q).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn coord_power_names_factor() {
        let q = Quadrature::default();
        let b = AxisBox::new(vec![0.5, -1.0], vec![1.0, 1.0]).unwrap();
        match Weight::coord_power(vec![-2.0, -1.5]).integral(&b, &q) {
            Err(Error::NonIntegrable { factor, .. }) => assert_eq!(factor, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn radial_midpoint_matches_polar_integral() {
        // \int_{[-1,1]^2} |x|^2 = 8/3
        let q = Quadrature {
            resolution: 512,
            resolution_nd: 256,
        };
        let b = AxisBox::cube(&[0.0, 0.0], 2.0).unwrap();
        let v = Weight::power(2.0).integral(&b, &q).unwrap();
        assert!((v - 8.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn tabulated_integral_constant() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let w = Weight::tabulated(g, vec![2.0; 16]).unwrap();
        let b = AxisBox::new(vec![-0.3], vec![1.1]).unwrap();
        assert!((w.integral(&b, &Quadrature::default()).unwrap() - 2.8).abs() < 1e-12);
    }

    #[test]
    fn singular_node_uses_cell_average() {
        let g = Grid::new(1, 8, 8.0).unwrap();
        let v = Weight::power(0.5).node_values(&g).unwrap();
        let origin = g.nearest_node(&[0.0]);
        assert!((v[origin] - 0.5f64.powf(0.5) / 1.5).abs() < 1e-15);
        assert!((v[origin + 1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weight_json_round_trip() {
        let w: Weight = serde_json::from_str(r#"{"kind":"coord_power","a":[0.5,-0.25]}"#).unwrap();
        assert_eq!(w, Weight::coord_power(vec![0.5, -0.25]));
        let c: Weight = serde_json::from_str(r#"{"kind":"constant","c":1.0}"#).unwrap();
        assert!(c.is_constant_one());
    }
}
