use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maximal::maximal_cells;
use super::{dual_weight, Quadrature, Weight};
use crate::error::{Error, Result};
use crate::grid::AxisBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Cubes,
    Rectangles,
}

/// A finite candidate family: side lengths `2^e` on a log ladder
/// `e = side_min_exp + k / per_octave <= side_max_exp`, and per-axis centers
/// `c = j s / centers_per_side` with `|c| <= reach s`. Boxes with a corner at the
/// origin (the singular point of power weights) are included whenever
/// `centers_per_side` is even.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub shape: Shape,
    #[serde(default = "default_min")]
    pub side_min_exp: f64,
    #[serde(default = "default_max")]
    pub side_max_exp: f64,
    #[serde(default = "default_per_octave")]
    pub per_octave: usize,
    #[serde(default = "default_centers")]
    pub centers_per_side: usize,
    #[serde(default = "default_reach")]
    pub reach: f64,
}

fn default_min() -> f64 {
    -4.0
}
fn default_max() -> f64 {
    4.0
}
fn default_per_octave() -> usize {
    1
}
fn default_centers() -> usize {
    32
}
fn default_reach() -> f64 {
    2.0
}

impl CandidateSpec {
    pub fn new(shape: Shape) -> Self {
        CandidateSpec {
            shape,
            side_min_exp: default_min(),
            side_max_exp: default_max(),
            per_octave: default_per_octave(),
            centers_per_side: default_centers(),
            reach: default_reach(),
        }
    }

    pub fn sides(&self) -> Vec<f64> {
        let q = self.per_octave.max(1) as f64;
        let steps = ((self.side_max_exp - self.side_min_exp) * q + 1e-9).floor() as i64;
        (0..=steps.max(-1))
            .map(|k| 2f64.powf(self.side_min_exp + k as f64 / q))
            .collect()
    }

    fn axis_offsets(&self) -> Vec<f64> {
        let m = self.centers_per_side.max(1) as i64;
        let jmax = (self.reach * m as f64 + 1e-9).floor() as i64;
        (-jmax..=jmax).map(|j| j as f64 / m as f64).collect()
    }

    pub fn build(&self, dim: usize) -> Result<CandidateFamily> {
        let sides = self.sides();
        let offs = self.axis_offsets();
        let mut boxes = Vec::new();
        match self.shape {
            Shape::Cubes => {
                let k = offs.len();
                for &s in &sides {
                    for flat in 0..k.pow(dim as u32) {
                        let mut r = flat;
                        let mut center = vec![0.0; dim];
                        for c in center.iter_mut().rev() {
                            *c = offs[r % k] * s;
                            r /= k;
                        }
                        boxes.push(AxisBox::cube(&center, s)?);
                    }
                }
            }
            Shape::Rectangles => {
                let per_axis: Vec<(f64, f64)> = sides
                    .iter()
                    .flat_map(|&s| offs.iter().map(move |&o| (o * s, s)))
                    .collect();
                let k = per_axis.len();
                for flat in 0..k.pow(dim as u32) {
                    let mut r = flat;
                    let mut lo = vec![0.0; dim];
                    let mut hi = vec![0.0; dim];
                    for a in (0..dim).rev() {
                        let (c, s) = per_axis[r % k];
                        r /= k;
                        lo[a] = c - 0.5 * s;
                        hi[a] = c + 0.5 * s;
                    }
                    boxes.push(AxisBox::new(lo, hi)?);
                }
            }
        }
        if boxes.is_empty() {
            return Err(Error::Empty("candidate family has no boxes".into()));
        }
        let description = format!(
            "{dim}-d {:?}: sides 2^[{}, {}] ({} per octave), centers step side/{} within {} sides of 0, {} boxes",
            self.shape,
            self.side_min_exp,
            self.side_max_exp,
            self.per_octave,
            self.centers_per_side,
            self.reach,
            boxes.len()
        );
        Ok(CandidateFamily {
            shape: self.shape,
            boxes,
            description,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFamily {
    pub shape: Shape,
    pub boxes: Vec<AxisBox>,
    pub description: String,
}

impl CandidateFamily {
    pub fn from_boxes(
        shape: Shape,
        boxes: Vec<AxisBox>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::Empty("candidate family has no boxes".into()));
        }
        if shape == Shape::Cubes && boxes.iter().any(|b| !b.is_cube()) {
            return Err(Error::arg(
                "candidates",
                "cube family contains a non-cube box",
            ));
        }
        Ok(CandidateFamily {
            shape,
            boxes,
            description: description.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicEstimate {
    pub value: f64,
    pub family: String,
    /// The candidate search is finite, so the value never exceeds the true supremum.
    pub is_lower_bound: bool,
    pub boxes_searched: usize,
    pub argmax: Option<AxisBox>,
}

/// Deterministic max-reduction over the family; the first error in family order wins.
fn sup_over(
    family: &CandidateFamily,
    f: impl Fn(&AxisBox) -> Result<f64> + Sync,
) -> Result<CharacteristicEstimate> {
    let vals: Vec<Result<f64>> = family.boxes.par_iter().map(&f).collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best {
            best = v;
            arg = Some(i);
        }
    }
    Ok(CharacteristicEstimate {
        value: best,
        family: family.description.clone(),
        is_lower_bound: true,
        boxes_searched: family.boxes.len(),
        argmax: arg.map(|i| family.boxes[i].clone()),
    })
}

fn positive_average(w: &Weight, b: &AxisBox, quad: &Quadrature) -> Result<f64> {
    let v = w.average(b, quad)?;
    if !(v > 0.0) {
        return Err(Error::ZeroMass(b.describe()));
    }
    Ok(v)
}

/// `sup_A <w>_A <sigma'_p>_A^{p-1}` over the family.
pub fn two_weight_characteristic(
    w: &Weight,
    sigma: &Weight,
    p: f64,
    family: &CandidateFamily,
    quad: &Quadrature,
) -> Result<CharacteristicEstimate> {
    let dual = dual_weight(sigma, p)?;
    sup_over(family, |b| {
        let aw = positive_average(w, b, quad)?;
        let ad = positive_average(&dual, b, quad)?;
        Ok(aw * ad.powf(p - 1.0))
    })
}

/// `[w]_{A_p}` over the family (the two-weight characteristic with `sigma = w`).
pub fn ap_characteristic(
    w: &Weight,
    p: f64,
    family: &CandidateFamily,
    quad: &Quadrature,
) -> Result<CharacteristicEstimate> {
    two_weight_characteristic(w, w, p, family, quad)
}

/// `sup_A w(A)^{-1} \int_A M(w 1_A)`, with `A` split into `cells` equal cells per axis,
/// exact cell masses, and the maximal function over all cell-aligned windows inside `A`.
pub fn ainf_characteristic(
    w: &Weight,
    family: &CandidateFamily,
    quad: &Quadrature,
    cells: usize,
) -> Result<CharacteristicEstimate> {
    if cells == 0 {
        return Err(Error::arg("cells", "need at least one cell per axis"));
    }
    let widths: Vec<usize> = (1..=cells).collect();
    let shape = family.shape;
    sup_over(family, |b| {
        let dim = b.dim();
        let total = cells.pow(dim as u32);
        let steps: Vec<f64> = (0..dim).map(|a| b.side(a) / cells as f64).collect();
        let cell_vol: f64 = steps.iter().product();
        let mut avgs = Vec::with_capacity(total);
        let mut mass = 0.0;
        for flat in 0..total {
            let mut r = flat;
            let mut lo = vec![0.0; dim];
            let mut hi = vec![0.0; dim];
            for a in (0..dim).rev() {
                let i = r % cells;
                r /= cells;
                lo[a] = b.lo[a] + i as f64 * steps[a];
                hi[a] = if i + 1 == cells {
                    b.hi[a]
                } else {
                    b.lo[a] + (i + 1) as f64 * steps[a]
                };
            }
            let cell = AxisBox { lo, hi };
            let m = w.integral(&cell, quad)?;
            mass += m;
            avgs.push(m / cell_vol);
        }
        if !(mass > 0.0) {
            return Err(Error::ZeroMass(b.describe()));
        }
        let m = maximal_cells(&avgs, &vec![cells; dim], shape, &widths)?;
        Ok(m.iter().sum::<f64>() * cell_vol / mass)
    })
}

/// `sup_Q <sigma^r>_Q^{1/r - 1/p} <w>_Q^{1/p}` over a cube family.
pub fn apr_characteristic(
    w: &Weight,
    sigma: &Weight,
    p: f64,
    r: f64,
    family: &CandidateFamily,
    quad: &Quadrature,
) -> Result<CharacteristicEstimate> {
    if !(r >= 1.0) || r >= p || !p.is_finite() {
        return Err(Error::arg(
            "r",
            format!("need 1 <= r < p, got r = {r}, p = {p}"),
        ));
    }
    if family.shape != Shape::Cubes {
        return Err(Error::arg(
            "candidates",
            "the A_p^r characteristic is taken over cubes",
        ));
    }
    let sr = sigma.pow(r);
    sup_over(family, |b| {
        let a_s = positive_average(&sr, b, quad)?;
        let a_w = positive_average(w, b, quad)?;
        Ok(a_s.powf(1.0 / r - 1.0 / p) * a_w.powf(1.0 / p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam1(shape: Shape) -> CandidateFamily {
        let mut s = CandidateSpec::new(shape);
        s.side_min_exp = -2.0;
        s.side_max_exp = 2.0;
        s.centers_per_side = 8;
        s.build(1).unwrap()
    }

    #[test]
    fn constant_weight_is_one() {
        let f = fam1(Shape::Cubes);
        let q = Quadrature::default();
        let e = ap_characteristic(&Weight::constant(1.0), 3.0, &f, &q).unwrap();
        assert_eq!(e.value, 1.0);
        assert!(e.is_lower_bound);
        let i = ainf_characteristic(&Weight::constant(2.0), &f, &q, 64).unwrap();
        assert!((i.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn family_contains_corner_boxes() {
        let f = fam1(Shape::Cubes);
        assert!(f.boxes.iter().any(|b| b.lo[0] == 0.0 && b.hi[0] == 1.0));
    }

    #[test]
    fn apr_rejects_r_at_least_p() {
        let f = fam1(Shape::Cubes);
        let w = Weight::constant(1.0);
        assert!(apr_characteristic(&w, &w, 2.0, 2.0, &f, &Quadrature::default()).is_err());
        let v = apr_characteristic(&w, &w, 4.0, 2.0, &f, &Quadrature::default()).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn non_integrable_dual_is_reported() {
        let f = fam1(Shape::Cubes);
        let e = ap_characteristic(&Weight::power(1.5), 2.0, &f, &Quadrature::default());
        assert!(matches!(e, Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn two_dim_rectangles_contain_cubes() {
        let mut s = CandidateSpec::new(Shape::Rectangles);
        s.side_min_exp = 0.0;
        s.side_max_exp = 1.0;
        s.centers_per_side = 2;
        s.reach = 1.0;
        let r = s.build(2).unwrap();
        s.shape = Shape::Cubes;
        let c = s.build(2).unwrap();
        assert!(c.boxes.iter().all(|b| r.boxes.contains(b)));
    }
}
