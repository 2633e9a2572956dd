use num_complex::Complex64;
use proptest::prelude::*;

use multiplier_lab::grid::{forward_dft, inverse_dft, sample, AxisBox, FunctionSpec, Grid, SampledFunction};
use multiplier_lab::linalg::{c, diag, CMat};
use multiplier_lab::lp_decomp::{blocking_rects, product_rects};
use multiplier_lab::multiplier::{
    adjoint_symbol, apply_multiplier, frequency_cutoff, MatrixSymbol, Sgn,
};
use multiplier_lab::opnorm::weighted_lp_norm;
use multiplier_lab::sparse::{node_set, sparse_operator, weak_lp_norm, SparseFamily};
use multiplier_lab::symbols::{aniso_dilate, aniso_distance, r_bound, OperatorFamily, PartitionOfUnity};
use multiplier_lab::weights::{ap_characteristic, CandidateSpec, Quadrature, Shape, Weight};

fn values(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b)), len)
}

fn grid1(points: usize) -> Grid {
    Grid::new(1, points, 8.0).unwrap()
}

fn func(g: Grid, fiber: usize, v: Vec<Complex64>) -> SampledFunction {
    SampledFunction::from_values(g, fiber, v).unwrap()
}

fn tabulated(g: Grid, d: usize, v: Vec<Complex64>) -> MatrixSymbol {
    MatrixSymbol::tabulated(g, d, d, v).unwrap()
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn dft_round_trip(v in values(64 * 2)) {
        let f = func(grid1(64), 2, v);
        let back = inverse_dft(&forward_dft(&f));
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.max_norm().max(1.0));
    }

    #[test]
    fn parseval(v in values(16 * 16)) {
        let g = Grid::new(2, 16, 4.0).unwrap();
        let f = func(g, 1, v);
        let space: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.cell_volume();
        let freq = forward_dft(&f).energy() * g.freq_spacing().powi(2);
        prop_assert!((space - freq).abs() <= 1e-10 * space);
    }

    #[test]
    fn multiplier_is_linear(sym in values(32 * 4), f in values(32 * 2), h in values(32 * 2),
                            a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = grid1(32);
        let m = tabulated(g, 2, sym);
        let (f, h) = (func(g, 2, f), func(g, 2, h));
        let (a, b) = (c(a, 0.5), c(b, -0.25));
        let lhs = apply_multiplier(&m, &f.combine(a, &h, b)).unwrap();
        let rhs = apply_multiplier(&m, &f).unwrap().combine(a, &apply_multiplier(&m, &h).unwrap(), b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_norm()));
    }

    #[test]
    fn composition_is_pointwise_product(s1 in values(32 * 4), s2 in values(32 * 4), f in values(32 * 2)) {
        let g = grid1(32);
        let (m1, m2) = (tabulated(g, 2, s1), tabulated(g, 2, s2));
        let f = func(g, 2, f);
        let twice = apply_multiplier(&m1, &apply_multiplier(&m2, &f).unwrap()).unwrap();
        let once = apply_multiplier(&m1.compose(&m2).unwrap(), &f).unwrap();
        prop_assert!(twice.max_abs_diff(&once) <= 1e-10 * (1.0 + once.max_norm()));
    }

    #[test]
    fn adjoint_is_an_involution(s in values(32 * 4)) {
        let m = tabulated(grid1(32), 2, s);
        let back = adjoint_symbol(&adjoint_symbol(&m));
        for idx in 0..32 {
            prop_assert_eq!(back.at(idx), m.at(idx));
        }
    }

    #[test]
    fn cutoffs_are_idempotent_and_disjoint(f in values(64), lo in -3.0..0.0f64, w in 0.0..3.0f64) {
        let f = func(grid1(64), 1, f);
        let a = AxisBox::new(vec![lo], vec![lo + w]).unwrap();
        let b = AxisBox::new(vec![lo + w], vec![lo + w + 1.0]).unwrap();
        let once = frequency_cutoff(&a, &f).unwrap();
        let twice = frequency_cutoff(&a, &once).unwrap();
        prop_assert!(twice.max_abs_diff(&once) <= 1e-12);
        let cross = frequency_cutoff(&b, &once).unwrap();
        prop_assert!(cross.max_norm() <= 1e-12);
    }

    #[test]
    fn unimodular_scalar_symbol_is_an_l2_isometry(seed in any::<u64>()) {
        let g = Grid::new(1, 128, 8.0).unwrap();
        // no mass at xi = 0, where sgn vanishes
        let f = sample(&FunctionSpec::RandomBandLimited { band: 4.0, min_abs: 0.1, seed }, g, 1).unwrap();
        let m = MatrixSymbol::from_fn(g, Sgn { d: 1, axis: 0, scale: c(0.0, 1.0) }).unwrap();
        let tf = apply_multiplier(&m, &f).unwrap();
        prop_assert!((tf.l2_norm() / f.l2_norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn ap_normalization_duality_and_p_monotonicity(a in -0.45..0.9f64) {
        let fam = CandidateSpec::new(Shape::Cubes).build(1).unwrap();
        let quad = Quadrature::default();
        let w = Weight::power(a);
        let a2 = ap_characteristic(&w, 2.0, &fam, &quad).unwrap().value;
        let a3 = ap_characteristic(&w, 3.0, &fam, &quad).unwrap().value;
        prop_assert!(a2 >= 1.0 - 1e-12);
        prop_assert!(a3 <= a2 * (1.0 + 1e-12));
        let dual = ap_characteristic(&w.dual(3.0).unwrap(), 1.5, &fam, &quad).unwrap().value.powf(2.0);
        prop_assert!((a3 - dual).abs() <= 1e-6 * a3);
    }

    #[test]
    fn partition_of_unity_and_separated_supports(r in -6.0..6.0f64, j in -6i32..6) {
        let pou = PartitionOfUnity;
        let xi = [2f64.powf(r)];
        prop_assert!((pou.partial_sum(7, &xi) - 1.0).abs() <= 1e-10);
        prop_assert_eq!(pou.block(j, &xi) * pou.block(j + 2, &xi), 0.0);
    }

    #[test]
    fn anisotropic_distance_is_homogeneous(
        xi in prop::collection::vec(-10.0..10.0f64, 2),
        a in prop::collection::vec(0.25..4.0f64, 2),
        lambda in 1e-3..1e3f64,
    ) {
        let lhs = aniso_distance(&aniso_dilate(&xi, &a, lambda), &a);
        let rhs = lambda * aniso_distance(&xi, &a);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn r_bound_of_a_union_is_the_max(d1 in prop::collection::vec(-3.0..3.0f64, 2), d2 in prop::collection::vec(-3.0..3.0f64, 2)) {
        let m = |d: &[f64]| -> CMat { diag(&[c(d[0], 0.0), c(d[1], 0.0)]) };
        let f1 = OperatorFamily::new(vec![m(&d1)]).unwrap();
        let f2 = OperatorFamily::new(vec![m(&d2)]).unwrap();
        let u = r_bound(&f1.union(&f2).unwrap());
        prop_assert!((u - r_bound(&f1).max(r_bound(&f2))).abs() <= 1e-12);
    }

    #[test]
    fn sparse_operator_is_monotone(f in prop::collection::vec(0.0..1.0f64, 64), bump in prop::collection::vec(0.0..1.0f64, 64)) {
        let g = grid1(64);
        let cubes = vec![
            AxisBox::new(vec![-4.0], vec![0.0]).unwrap(),
            AxisBox::new(vec![-2.0], vec![-1.0]).unwrap(),
            AxisBox::new(vec![0.0], vec![4.0]).unwrap(),
        ];
        let s = SparseFamily::full(g, cubes, 0.0);
        let lo = SampledFunction::from_real(g, &f).unwrap();
        let hi: Vec<f64> = f.iter().zip(&bump).map(|(x, y)| x + y).collect();
        let hi = SampledFunction::from_real(g, &hi).unwrap();
        let a1 = sparse_operator(&s, 1.0, &lo).unwrap().real_parts();
        let a2 = sparse_operator(&s, 2.0, &lo).unwrap().real_parts();
        let b1 = sparse_operator(&s, 1.0, &hi).unwrap().real_parts();
        for i in 0..64 {
            prop_assert!(a1[i] <= b1[i] + 1e-15);
            prop_assert!(a1[i] <= a2[i] * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn weak_norm_is_below_strong_norm(v in values(64), p in 1.0..4.0f64) {
        let f = func(grid1(64), 1, v);
        let weak = weak_lp_norm(&f, p).unwrap();
        let strong = weighted_lp_norm(&f, p, &Weight::constant(1.0)).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }
}

#[test]
fn family_members_are_disjoint_on_nodes() {
    let g = Grid::new(2, 64, 8.0).unwrap();
    for fam in [product_rects(2, -2, 2).unwrap(), blocking_rects(2, -2, 2).unwrap()] {
        assert!(fam.node_members(&g).iter().all(|m| m.len() <= 1));
    }
}

#[test]
fn product_family_is_symmetric_under_negation() {
    let fam = product_rects(2, -2, 2).unwrap();
    let mut closures: Vec<(Vec<f64>, Vec<f64>)> =
        fam.members.iter().map(|m| (m.bounds.lo.clone(), m.bounds.hi.clone())).collect();
    let mut negated = fam.negated_closures();
    let key = |a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>)| a.partial_cmp(b).unwrap();
    closures.sort_by(key);
    negated.sort_by(key);
    assert_eq!(closures, negated);
}

#[test]
fn node_sets_match_half_open_boxes() {
    let g = grid1(64);
    let b = AxisBox::new(vec![-1.0], vec![0.5]).unwrap();
    let want: Vec<usize> = (0..64).filter(|&i| b.contains(&g.node(i)[..1])).collect();
    assert_eq!(node_set(&g, &b), want);
}
