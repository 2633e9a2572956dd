use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{AxisBox, Grid};

/// `I_{k, eta}`: `[2^k, 2^{k+1})` for `eta = 1`, `[-2^{k+1}, -2^k)` for `eta = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub k: i32,
    pub eta: i8,
}

/// Signed realization of the magnitude range `[lo, hi)` (`0 < lo < hi`).
fn signed(lo: f64, hi: f64, eta: i8) -> (f64, f64) {
    if eta > 0 {
        (lo, hi)
    } else {
        (-hi, -lo)
    }
}

impl DyadicInterval {
    pub fn bounds(&self) -> (f64, f64) {
        signed(2f64.powi(self.k), 2f64.powi(self.k + 1), self.eta)
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = self.bounds();
        a <= t && t < b
    }

    /// Recognizes `[lo, hi]` as `eta [2^k, 2^{k+1}]`.
    pub fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        let (a, b, eta) = if lo > 0.0 {
            (lo, hi, 1)
        } else if hi < 0.0 {
            (-hi, -lo, -1)
        } else {
            return Err(Error::NotDyadic { lo, hi });
        };
        let k = a.log2().round();
        if a != 2f64.powf(k) || b != 2.0 * a {
            return Err(Error::NotDyadic { lo, hi });
        }
        Ok(DyadicInterval { k: k as i32, eta })
    }
}

/// All `I_{k, eta}` with `k_min <= k <= k_max`, both signs.
pub fn dyadic_intervals(k_min: i32, k_max: i32) -> Result<Vec<DyadicInterval>> {
    if k_min > k_max {
        return Err(Error::arg(
            "k_range",
            format!("empty range [{k_min}, {k_max}]"),
        ));
    }
    let mut out = Vec::new();
    for k in k_min..=k_max {
        out.push(DyadicInterval { k, eta: 1 });
        out.push(DyadicInterval { k, eta: -1 });
    }
    Ok(out)
}

/// `J_{ln+r} = [cutoff, l+1]^r x {l+1} x [cutoff, l]^{n-r-1}` (integer ranges).
pub fn blocking_index_set(k: i32, n: usize, cutoff: i32) -> Vec<Vec<i32>> {
    let ni = n as i32;
    let (l, r) = (k.div_euclid(ni), k.rem_euclid(ni) as usize);
    let ranges: Vec<(i32, i32)> = (0..n)
        .map(|j| match j.cmp(&r) {
            std::cmp::Ordering::Less => (cutoff, l + 1),
            std::cmp::Ordering::Equal => (l + 1, l + 1),
            std::cmp::Ordering::Greater => (cutoff, l),
        })
        .collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for (a, b) in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (a..=b).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Products `I_1 x ... x I_n` of dyadic intervals.
    Product,
    /// The blockings `E_{k, eta}`.
    Blocking,
    /// The anisotropic blockings `E^a_{k, eta}`.
    Anisotropic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RectLabel {
    Product { ks: Vec<i32>, eta: Vec<i8> },
    Blocking { k: i32, eta: Vec<i8> },
}

/// A member rectangle, realized half-open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqRect {
    pub bounds: AxisBox,
    pub label: RectLabel,
}

impl FreqRect {
    pub fn contains(&self, xi: &[f64]) -> bool {
        self.bounds.contains(xi)
    }

    pub fn eta(&self) -> &[i8] {
        match &self.label {
            RectLabel::Product { eta, .. } | RectLabel::Blocking { eta, .. } => eta,
        }
    }
}

/// A truncated family of frequency rectangles. Blocking families realize the parts of
/// the factors `eta_j [0, 2^m]` above the truncation as `[2^{a_j cutoff}, 2^{a_j m})`,
/// so every family covers exactly `prod_j {2^{a_j cutoff} <= |xi_j| < 2^{a_j (l_max+1)}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqRectFamily {
    pub kind: FamilyKind,
    pub n: usize,
    pub l_min: i32,
    pub l_max: i32,
    pub cutoff: i32,
    pub a: Vec<f64>,
    pub members: Vec<FreqRect>,
}

fn sign_vectors(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|j| if bits >> j & 1 == 1 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

fn check_dim(n: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(Error::arg("n", format!("dimension {n} outside 1..=3")));
    }
    Ok(())
}

/// `E^a_{k, eta}` with the given truncation; `None` when the rectangle is empty.
pub fn aniso_blocking_rect(a: &[f64], k: i32, eta: &[i8], cutoff: i32) -> Option<FreqRect> {
    let n = a.len();
    let ni = n as i32;
    let (l, r) = (k.div_euclid(ni), k.rem_euclid(ni) as usize);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for j in 0..n {
        let (e_lo, e_hi) = match j.cmp(&r) {
            std::cmp::Ordering::Less => (cutoff, l + 1),
            std::cmp::Ordering::Equal => (l, l + 1),
            std::cmp::Ordering::Greater => (cutoff, l),
        };
        if e_lo >= e_hi {
            return None;
        }
        let (x, y) = signed(
            2f64.powf(a[j] * e_lo as f64),
            2f64.powf(a[j] * e_hi as f64),
            eta[j],
        );
        lo.push(x);
        hi.push(y);
    }
    Some(FreqRect {
        bounds: AxisBox { lo, hi },
        label: RectLabel::Blocking {
            k,
            eta: eta.to_vec(),
        },
    })
}

fn blocking_family(
    kind: FamilyKind,
    a: Vec<f64>,
    l_min: i32,
    l_max: i32,
) -> Result<FreqRectFamily> {
    let n = a.len();
    check_dim(n)?;
    if l_min > l_max {
        return Err(Error::arg(
            "l_range",
            format!("empty range [{l_min}, {l_max}]"),
        ));
    }
    let mut members = Vec::new();
    for l in l_min..=l_max {
        for r in 0..n as i32 {
            let k = l * n as i32 + r;
            for eta in sign_vectors(n) {
                if let Some(rect) = aniso_blocking_rect(&a, k, &eta, l_min) {
                    members.push(rect);
                }
            }
        }
    }
    Ok(FreqRectFamily {
        kind,
        n,
        l_min,
        l_max,
        cutoff: l_min,
        a,
        members,
    })
}

/// The blocking family `E_n` for `l_min <= l <= l_max`.
pub fn blocking_rects(n: usize, l_min: i32, l_max: i32) -> Result<FreqRectFamily> {
    blocking_family(FamilyKind::Blocking, vec![1.0; n], l_min, l_max)
}

/// The anisotropic blocking family `E^a_n`.
pub fn aniso_blocking_rects(a: &[f64], l_min: i32, l_max: i32) -> Result<FreqRectFamily> {
    if a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::arg("a", "anisotropy exponents must be positive"));
    }
    blocking_family(FamilyKind::Anisotropic, a.to_vec(), l_min, l_max)
}

/// The product family `I_n` with scales `k_min..=k_max` on every axis.
pub fn product_rects(n: usize, k_min: i32, k_max: i32) -> Result<FreqRectFamily> {
    check_dim(n)?;
    let ints = dyadic_intervals(k_min, k_max)?;
    let m = ints.len();
    let mut members = Vec::new();
    for flat in 0..m.pow(n as u32) {
        let mut r = flat;
        let mut pick = vec![ints[0]; n];
        for slot in pick.iter_mut().rev() {
            *slot = ints[r % m];
            r /= m;
        }
        let (lo, hi): (Vec<f64>, Vec<f64>) = pick.iter().map(|i| i.bounds()).unzip();
        members.push(FreqRect {
            bounds: AxisBox { lo, hi },
            label: RectLabel::Product {
                ks: pick.iter().map(|i| i.k).collect(),
                eta: pick.iter().map(|i| i.eta).collect(),
            },
        });
    }
    Ok(FreqRectFamily {
        kind: FamilyKind::Product,
        n,
        l_min: k_min,
        l_max: k_max,
        cutoff: k_min,
        a: vec![1.0; n],
        members,
    })
}

impl FreqRectFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the member containing `xi`, if any.
    pub fn member_of(&self, xi: &[f64]) -> Option<usize> {
        self.members.iter().position(|m| m.contains(xi))
    }

    /// Per frequency node, the indices of all members containing it.
    pub fn node_members(&self, grid: &Grid) -> Vec<Vec<usize>> {
        (0..grid.num_nodes())
            .map(|idx| {
                let xi = grid.freq_node(idx);
                self.members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.contains(&xi[..grid.dim()]))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }

    /// Frequency-node mask of member `i`.
    pub fn member_mask(&self, grid: &Grid, i: usize) -> Vec<f64> {
        crate::multiplier::box_mask(grid, &self.members[i].bounds)
    }

    /// Mask of the union of all members.
    pub fn union_mask(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.num_nodes())
            .map(|idx| {
                let xi = grid.freq_node(idx);
                if self.member_of(&xi[..grid.dim()]).is_some() {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// The family `{-E : E in family}` as closed rectangles.
    pub fn negated_closures(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.members
            .iter()
            .map(|m| {
                (
                    m.bounds.hi.iter().map(|x| -x).collect(),
                    m.bounds.lo.iter().map(|x| -x).collect(),
                )
            })
            .collect()
    }

    /// CSV listing: `index,kind,k,eta,lo_1..lo_n,hi_1..hi_n`, with `k` a
    /// `;`-separated list for product members.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["index".to_string(), "kind".into(), "k".into(), "eta".into()];
        for j in 0..self.n {
            header.push(format!("lo_{}", j + 1));
        }
        for j in 0..self.n {
            header.push(format!("hi_{}", j + 1));
        }
        wr.write_record(&header)
            .map_err(|e| Error::Io(e.to_string()))?;
        let join = |v: Vec<String>| v.join(";");
        for (i, m) in self.members.iter().enumerate() {
            let (k, eta) = match &m.label {
                RectLabel::Product { ks, eta } => (
                    join(ks.iter().map(|x| x.to_string()).collect()),
                    join(eta.iter().map(|x| x.to_string()).collect()),
                ),
                RectLabel::Blocking { k, eta } => (
                    k.to_string(),
                    join(eta.iter().map(|x| x.to_string()).collect()),
                ),
            };
            let mut row = vec![i.to_string(), format!("{:?}", self.kind), k, eta];
            row.extend(m.bounds.lo.iter().map(|x| format!("{x:e}")));
            row.extend(m.bounds.hi.iter().map(|x| format!("{x:e}")));
            wr.write_record(&row)
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Result of comparing each blocking with the union of its product rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingIdentityScan {
    pub members: usize,
    /// Frequency nodes lying in some member.
    pub covered_nodes: usize,
    /// (member, node) pairs where the blocking and the union disagree.
    pub defects: usize,
}

/// Node-wise comparison of `E_{k,eta}` with `U_{i in J_k} I_{i_1 - 1, eta_1} x ... x I_{i_n - 1, eta_n}`
/// for every member of `blocking_rects(n, l_min, l_max)` on the frequency nodes of `grid`.
/// The index sets are clipped at `l_min + 1`, which is where the truncated lower factors
/// `[2^{l_min}, 2^m)` begin.
pub fn blocking_identity_scan(
    n: usize,
    l_min: i32,
    l_max: i32,
    grid: &Grid,
) -> Result<BlockingIdentityScan> {
    if grid.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let fam = blocking_rects(n, l_min, l_max)?;
    let mut covered = vec![false; grid.num_nodes()];
    let mut defects = 0;
    for m in &fam.members {
        let RectLabel::Blocking { k, eta } = &m.label else {
            continue;
        };
        let pieces: Vec<Vec<DyadicInterval>> = blocking_index_set(*k, n, l_min + 1)
            .into_iter()
            .map(|i| {
                (0..n)
                    .map(|j| DyadicInterval {
                        k: i[j] - 1,
                        eta: eta[j],
                    })
                    .collect()
            })
            .collect();
        for (idx, cov) in covered.iter_mut().enumerate() {
            let xi = grid.freq_node(idx);
            let in_e = m.contains(&xi[..n]);
            let in_u = pieces
                .iter()
                .any(|p| p.iter().enumerate().all(|(j, iv)| iv.contains(xi[j])));
            *cov |= in_e;
            if in_e != in_u {
                defects += 1;
            }
        }
    }
    Ok(BlockingIdentityScan {
        members: fam.len(),
        covered_nodes: covered.iter().filter(|c| **c).count(),
        defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_examples() {
        let d = dyadic_intervals(0, 0).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].bounds(), (1.0, 2.0));
        assert_eq!(d[1].bounds(), (-2.0, -1.0));
        assert_eq!(dyadic_intervals(-1, 1).unwrap().len(), 6);
        assert!(dyadic_intervals(1, 0).is_err());
        assert_eq!(
            DyadicInterval::from_bounds(-8.0, -4.0).unwrap(),
            DyadicInterval { k: 2, eta: -1 }
        );
        assert!(DyadicInterval::from_bounds(1.0, 3.0).is_err());
        assert!(DyadicInterval::from_bounds(-1.0, 1.0).is_err());
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(blocking_index_set(3, 1, -10), vec![vec![4]]);
        let j = blocking_index_set(2 * 2, 2, -2);
        assert_eq!(j.len(), 5);
        assert!(j.iter().all(|i| i[0] == 3 && (-2..=2).contains(&i[1])));
    }

    #[test]
    fn blocking_sides_read_off() {
        let f = blocking_rects(2, -1, 1).unwrap();
        // E_{2*0+1,(1,1)}: xi_1 in [2^-1, 2), xi_2 in [1, 2)
        let m = f
            .members
            .iter()
            .find(|m| {
                m.label
                    == RectLabel::Blocking {
                        k: 1,
                        eta: vec![1, 1],
                    }
            })
            .unwrap();
        assert_eq!(m.bounds.lo, vec![0.5, 1.0]);
        assert_eq!(m.bounds.hi, vec![2.0, 2.0]);
        let aniso = aniso_blocking_rects(&[2.0, 1.0], -1, 1).unwrap();
        let e = aniso
            .members
            .iter()
            .find(|m| {
                m.label
                    == RectLabel::Blocking {
                        k: 0,
                        eta: vec![1, 1],
                    }
            })
            .unwrap();
        assert_eq!(e.bounds.lo, vec![1.0, 0.5]);
        assert_eq!(e.bounds.hi, vec![4.0, 1.0]);
        assert!(aniso_blocking_rects(&[1.0, 0.0], 0, 1).is_err());
    }

    #[test]
    fn one_dim_families_agree() {
        let b = blocking_rects(1, -2, 2).unwrap();
        let p = product_rects(1, -2, 2).unwrap();
        let d = dyadic_intervals(-2, 2).unwrap();
        assert_eq!(b.len(), d.len());
        for iv in d {
            let (lo, hi) = iv.bounds();
            assert!(b
                .members
                .iter()
                .any(|m| m.bounds.lo[0] == lo && m.bounds.hi[0] == hi));
            assert!(p
                .members
                .iter()
                .any(|m| m.bounds.lo[0] == lo && m.bounds.hi[0] == hi));
        }
    }

    #[test]
    fn blocking_identity_is_exact() {
        let g = Grid::new(2, 64, 4.0).unwrap();
        let scan = blocking_identity_scan(2, -1, 1, &g).unwrap();
        assert_eq!(scan.defects, 0);
        assert!(scan.covered_nodes > 0);
        assert!(blocking_identity_scan(1, -1, 1, &g).is_err());
    }

    #[test]
    fn csv_listing() {
        let f = product_rects(2, 0, 0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("index,kind,k,eta,lo_1,lo_2,hi_1,hi_2"));
    }
}
