use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::AxisBox;

/// Shifted dyadic system: cubes `2^{-j}([0,1)^n + m) + sum_{j < j' <= truncation} omega_{j'} 2^{-j'}`
/// for scales `j` in `scales`. The infinite shift series is cut at `truncation`; the cut
/// moves a cube by at most `2^{-truncation}` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicGridSpec {
    pub dim: usize,
    /// `(coarsest, finest)` scale `j`; sides run from `2^{-coarsest}` to `2^{-finest}`.
    pub scales: (i32, i32),
    pub truncation: i32,
    /// `omega_j in {0,1}^n` for every `j` in `(coarsest, truncation]`.
    pub shifts: BTreeMap<i32, Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicCube {
    pub scale: i32,
    pub index: Vec<i64>,
    pub bounds: AxisBox,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-self.scale)
    }
}

impl DyadicGridSpec {
    /// The standard grid: every shift entry zero.
    pub fn standard(dim: usize, coarsest: i32, finest: i32) -> Self {
        DyadicGridSpec::with_pattern(dim, coarsest, finest, &vec![0; dim])
    }

    /// Per-axis pattern 0 (no shift), 1 (`omega_j = 1` for odd `j`) or 2 (for even `j`).
    /// Patterns 1 and 2 shift every cube by one or two thirds of its side, up to truncation.
    pub fn with_pattern(dim: usize, coarsest: i32, finest: i32, pattern: &[u8]) -> Self {
        let mut shifts = BTreeMap::new();
        for j in coarsest + 1..=finest {
            let odd = j.rem_euclid(2) == 1;
            let w = pattern
                .iter()
                .map(|&t| match t {
                    1 => odd as u8,
                    2 => (!odd) as u8,
                    _ => 0,
                })
                .collect();
            shifts.insert(j, w);
        }
        DyadicGridSpec {
            dim,
            scales: (coarsest, finest),
            truncation: finest,
            shifts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > crate::grid::MAX_DIM {
            return Err(Error::arg(
                "dim",
                format!("dimension {} unsupported", self.dim),
            ));
        }
        if self.scales.0 > self.scales.1 {
            return Err(Error::arg("scales", "coarsest scale exceeds finest"));
        }
        if self.truncation < self.scales.1 {
            return Err(Error::arg(
                "truncation",
                "shift truncation is coarser than the finest scale",
            ));
        }
        for (j, w) in &self.shifts {
            if w.len() != self.dim || w.iter().any(|&x| x > 1) {
                return Err(Error::arg(
                    "shifts",
                    format!("entry at scale {j} must lie in {{0,1}}^{}", self.dim),
                ));
            }
        }
        Ok(())
    }

    /// `sum_{j < j' <= truncation} omega_{j'} 2^{-j'}`.
    pub fn shift(&self, j: i32) -> Result<Vec<f64>> {
        let mut s = vec![0.0; self.dim];
        for jp in j + 1..=self.truncation {
            let w = self.shifts.get(&jp).ok_or(Error::MissingShift(jp))?;
            for (a, x) in s.iter_mut().enumerate() {
                if w.get(a).copied().unwrap_or(0) == 1 {
                    *x += 2f64.powi(-jp);
                }
            }
        }
        Ok(s)
    }

    /// Bound on how far the truncated shift is from the full series.
    pub fn truncation_defect(&self) -> f64 {
        2f64.powi(-self.truncation)
    }

    pub fn cube(&self, scale: i32, index: Vec<i64>) -> Result<DyadicCube> {
        let side = 2f64.powi(-scale);
        let s = self.shift(scale)?;
        let lo: Vec<f64> = index
            .iter()
            .zip(&s)
            .map(|(m, t)| *m as f64 * side + t)
            .collect();
        let hi: Vec<f64> = lo.iter().map(|x| x + side).collect();
        Ok(DyadicCube {
            scale,
            index,
            bounds: AxisBox { lo, hi },
        })
    }

    /// The `2^n` children at scale `j + 1`.
    pub fn children(&self, q: &DyadicCube) -> Result<Vec<DyadicCube>> {
        let j = q.scale + 1;
        let w = self.shifts.get(&j).ok_or(Error::MissingShift(j))?;
        let n = self.dim;
        (0..1usize << n)
            .map(|bits| {
                let idx = (0..n)
                    .map(|a| 2 * q.index[a] + w[a] as i64 + (bits >> a & 1) as i64)
                    .collect();
                self.cube(j, idx)
            })
            .collect()
    }

    /// The cube of scale `j` containing the point `x`.
    pub fn cube_at(&self, j: i32, x: &[f64]) -> Result<DyadicCube> {
        let side = 2f64.powi(-j);
        let s = self.shift(j)?;
        let idx = x
            .iter()
            .zip(&s)
            .map(|(x, t)| ((x - t) / side).floor() as i64)
            .collect();
        self.cube(j, idx)
    }

    /// Finest cube of the scale range containing `target`, if any.
    pub fn smallest_containing(&self, target: &AxisBox) -> Result<Option<DyadicCube>> {
        for j in (self.scales.0..=self.scales.1).rev() {
            let q = self.cube_at(j, &target.lo)?;
            if (0..self.dim)
                .all(|a| target.hi[a] <= q.bounds.hi[a] && q.bounds.lo[a] <= target.lo[a])
            {
                return Ok(Some(q));
            }
        }
        Ok(None)
    }
}

fn inside(b: &AxisBox, outer: &AxisBox) -> bool {
    (0..b.dim()).all(|a| b.lo[a] >= outer.lo[a] && b.hi[a] <= outer.hi[a])
}

/// Every whole cube of the grid's scales inside `region`.
pub fn shifted_dyadic_cubes(spec: &DyadicGridSpec, region: &AxisBox) -> Result<Vec<DyadicCube>> {
    spec.validate()?;
    if region.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: region.dim(),
        });
    }
    let mut out = Vec::new();
    for j in spec.scales.0..=spec.scales.1 {
        let side = 2f64.powi(-j);
        let s = spec.shift(j)?;
        let ranges: Vec<(i64, i64)> = (0..spec.dim)
            .map(|a| {
                (
                    ((region.lo[a] - s[a]) / side).ceil() as i64,
                    ((region.hi[a] - s[a]) / side).floor() as i64 - 1,
                )
            })
            .collect();
        if ranges.iter().any(|(a, b)| a > b) {
            continue;
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let q = spec.cube(j, idx.clone())?;
            if inside(&q.bounds, region) {
                out.push(q);
            }
            for a in (0..spec.dim).rev() {
                idx[a] += 1;
                if idx[a] <= ranges[a].1 {
                    continue 'outer;
                }
                idx[a] = ranges[a].0;
            }
            break;
        }
    }
    if out.is_empty() {
        return Err(Error::Empty(format!(
            "no whole cube of scales {:?} fits in {}",
            spec.scales,
            region.describe()
        )));
    }
    Ok(out)
}

/// Whole standard dyadic cubes `2^{-j}([0,1)^n + m)` inside `region`.
pub fn standard_dyadic_cubes(scales: (i32, i32), region: &AxisBox) -> Result<Vec<DyadicCube>> {
    shifted_dyadic_cubes(
        &DyadicGridSpec::standard(region.dim(), scales.0, scales.1),
        region,
    )
}

/// The `3^n` grids taking every per-axis combination of the patterns 0, 1, 2.
pub fn default_grids(dim: usize, coarsest: i32, finest: i32) -> Vec<DyadicGridSpec> {
    let count = 3usize.pow(dim as u32);
    (0..count)
        .map(|mut t| {
            let pattern: Vec<u8> = (0..dim)
                .map(|_| {
                    let p = (t % 3) as u8;
                    t /= 3;
                    p
                })
                .collect();
            DyadicGridSpec::with_pattern(dim, coarsest, finest, &pattern)
        })
        .collect()
}

/// Finest cube over `grids` that contains `target`, with the grid index.
pub fn best_cover(
    grids: &[DyadicGridSpec],
    target: &AxisBox,
) -> Result<Option<(usize, DyadicCube)>> {
    let mut best: Option<(usize, DyadicCube)> = None;
    for (i, g) in grids.iter().enumerate() {
        if let Some(q) = g.smallest_containing(target)? {
            if best.as_ref().map_or(true, |(_, b)| q.scale > b.scale) {
                best = Some((i, q));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_unit_cubes() {
        let b = AxisBox::new(vec![-2.0], vec![2.0]).unwrap();
        let cubes = standard_dyadic_cubes((0, 0), &b).unwrap();
        let lows: Vec<f64> = cubes.iter().map(|q| q.bounds.lo[0]).collect();
        assert_eq!(lows, vec![-2.0, -1.0, 0.0, 1.0]);
        let unit = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(standard_dyadic_cubes((1, 1), &unit).unwrap().len(), 4);
        let tiny = AxisBox::new(vec![0.1], vec![0.2]).unwrap();
        assert!(standard_dyadic_cubes((0, 1), &tiny).is_err());
    }

    #[test]
    fn nested_or_disjoint() {
        let b = AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let cubes = standard_dyadic_cubes((0, 1), &b).unwrap();
        for p in &cubes {
            for q in &cubes {
                let overlap = (0..2)
                    .all(|a| p.bounds.lo[a] < q.bounds.hi[a] && q.bounds.lo[a] < p.bounds.hi[a]);
                let p_in_q = inside(&p.bounds, &q.bounds);
                let q_in_p = inside(&q.bounds, &p.bounds);
                assert!(!overlap || p_in_q || q_in_p);
            }
        }
    }

    #[test]
    fn all_ones_shift_moves_unit_cube() {
        let mut spec = DyadicGridSpec::standard(1, 0, 10);
        for w in spec.shifts.values_mut() {
            w[0] = 1;
        }
        let q = spec.cube(0, vec![0]).unwrap();
        // 1 - 2^{-10}: the series sum_{j >= 1} 2^{-j} = 1 truncated at the finest scale
        assert_eq!(q.bounds.lo[0], 1.0 - 2f64.powi(-10));
        assert_eq!(spec.truncation_defect(), 2f64.powi(-10));
        let mut missing = spec.clone();
        missing.shifts.remove(&5);
        assert!(matches!(
            missing.cube(0, vec![0]),
            Err(Error::MissingShift(5))
        ));
    }

    #[test]
    fn children_tile_the_parent() {
        for g in default_grids(2, -1, 3) {
            let q = g.cube(0, vec![1, -2]).unwrap();
            let kids = g.children(&q).unwrap();
            let vol: f64 = kids.iter().map(|k| k.bounds.volume()).sum();
            assert_eq!(vol, q.bounds.volume());
            for k in kids {
                assert!(inside(&k.bounds, &q.bounds));
            }
        }
    }
}
