use std::collections::VecDeque;

use num_complex::Complex64;

use super::Shape;
use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// Applies `f(line_in, line_out)` to every line along `axis`, changing that axis
/// length from `dims[axis]` to `new_len`.
fn map_lines(
    data: &[f64],
    dims: &[usize],
    axis: usize,
    new_len: usize,
    f: impl Fn(&[f64], &mut [f64]),
) -> (Vec<f64>, Vec<usize>) {
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let len = dims[axis];
    let mut out = vec![0.0; outer * new_len * inner];
    let mut line_in = vec![0.0; len];
    let mut line_out = vec![0.0; new_len];
    for o in 0..outer {
        for i in 0..inner {
            for (t, v) in line_in.iter_mut().enumerate() {
                *v = data[(o * len + t) * inner + i];
            }
            f(&line_in, &mut line_out);
            for (t, v) in line_out.iter().enumerate() {
                out[(o * new_len + t) * inner + i] = *v;
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[axis] = new_len;
    (out, new_dims)
}

fn window_sums(line: &[f64], w: usize, out: &mut [f64]) {
    let mut s: f64 = line[..w].iter().sum();
    out[0] = s;
    for t in 1..out.len() {
        s += line[t + w - 1] - line[t - 1];
        out[t] = s;
    }
}

/// `out[x] = max { starts[s] : s <= x < s + w }`.
fn spread_max(starts: &[f64], w: usize, out: &mut [f64]) {
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (x, o) in out.iter_mut().enumerate() {
        while next < starts.len() && next <= x {
            while dq.back().is_some_and(|&b| starts[b] <= starts[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&f| f + w <= x) {
            dq.pop_front();
        }
        *o = dq.front().map_or(0.0, |&f| starts[f]);
    }
}

/// Window sums are recomputed by differences; recompute exactly for small windows
/// to keep the result independent of accumulated rounding.
fn window_sums_exact(line: &[f64], w: usize, out: &mut [f64]) {
    if w <= 32 {
        for (t, o) in out.iter_mut().enumerate() {
            *o = line[t..t + w].iter().sum();
        }
    } else {
        window_sums(line, w, out);
    }
}

/// Discrete maximal function of a cellwise-constant array: at every cell, the largest
/// average over windows of cells that contain it and fit inside the array. Window widths
/// are counted in cells; with `Shape::Cubes` only equal widths on every axis are used,
/// with `Shape::Rectangles` every tuple of the listed widths.
pub fn maximal_cells(
    values: &[f64],
    dims: &[usize],
    shape: Shape,
    widths: &[usize],
) -> Result<Vec<f64>> {
    if widths.is_empty() {
        return Err(Error::arg("scales", "scale list is empty"));
    }
    let total: usize = dims.iter().product();
    if values.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: values.len(),
        });
    }
    let dim = dims.len();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    match shape {
        Shape::Cubes => {
            for &w in widths {
                tuples.push(vec![w; dim]);
            }
        }
        Shape::Rectangles => {
            let k = widths.len();
            for flat in 0..k.pow(dim as u32) {
                let mut r = flat;
                let mut t = vec![0; dim];
                for slot in t.iter_mut().rev() {
                    *slot = widths[r % k];
                    r /= k;
                }
                tuples.push(t);
            }
        }
    }
    let mut best = vec![0.0f64; total];
    for w in tuples {
        if w.iter().zip(dims).any(|(wi, d)| *wi == 0 || wi > d) {
            continue;
        }
        let mut data = values.to_vec();
        let mut cur = dims.to_vec();
        for a in 0..dim {
            let wa = w[a];
            (data, cur) = map_lines(&data, &cur, a, cur[a] - wa + 1, |l, o| {
                window_sums_exact(l, wa, o)
            });
        }
        let vol: f64 = w.iter().map(|&x| x as f64).product();
        for v in data.iter_mut() {
            *v /= vol;
        }
        for a in 0..dim {
            let wa = w[a];
            (data, cur) = map_lines(&data, &cur, a, dims[a], |l, o| spread_max(l, wa, o));
        }
        for (b, v) in best.iter_mut().zip(&data) {
            if *v > *b {
                *b = *v;
            }
        }
    }
    Ok(best)
}

/// Every window width `1..=n`.
pub fn all_widths(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Hardy-Littlewood maximal function of a nonnegative scalar sampled function over
/// grid-aligned windows of the given widths (in cells), clipped to the box.
pub fn maximal_function(
    f: &SampledFunction,
    shape: Shape,
    scales: &[usize],
) -> Result<SampledFunction> {
    if f.fiber() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.fiber(),
        });
    }
    let vals: Vec<f64> = f.values().iter().map(|z| z.re).collect();
    if f.values().iter().any(|z| z.im != 0.0) || vals.iter().any(|v| *v < 0.0) {
        return Err(Error::arg(
            "f",
            "maximal function input must be real and nonnegative",
        ));
    }
    let g = *f.grid();
    let dims = vec![g.points(); g.dim()];
    let m = maximal_cells(&vals, &dims, shape, scales)?;
    SampledFunction::from_values(
        g,
        1,
        m.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn constant_is_fixed() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = SampledFunction::from_fn(g, 1, |_, _| Complex64::new(3.0, 0.0));
        let m = maximal_function(&f, Shape::Rectangles, &[1, 2, 5]).unwrap();
        assert!(m.values().iter().all(|z| (z.re - 3.0).abs() < 1e-14));
    }

    #[test]
    fn indicator_bounds() {
        let vals: Vec<f64> = (0..16)
            .map(|i| if (4..8).contains(&i) { 1.0 } else { 0.0 })
            .collect();
        let m = maximal_cells(&vals, &[16], Shape::Cubes, &all_widths(16)).unwrap();
        for (i, v) in m.iter().enumerate() {
            assert!(*v <= 1.0 + 1e-15);
            if (4..8).contains(&i) {
                assert!(*v >= 1.0 - 1e-15);
            }
        }
        // distance 2 from the block: best window [i, 8) has average 4/(8-i)... from the right
        assert!((m[10] - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn empty_scales_rejected() {
        assert!(maximal_cells(&[1.0; 4], &[4], Shape::Cubes, &[]).is_err());
    }
}
