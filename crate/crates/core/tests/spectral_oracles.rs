use binoether_core::expr::{PhaseSpace, ScalarExpr};
use binoether_core::geometry::{lie_derivative_mv, MultiVectorField, PhasePoint};
use binoether_core::spectral::{
    invariant_gradient, mixed_wedge_ratios, pfaffian, root_jets, secular_roots, y_from_roots,
};
use binoether_core::system::builtin;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_antisymmetric(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let v = rng.random_range(-1.0..1.0);
            m[i * dim + j] = v;
            m[j * dim + i] = -v;
        }
    }
    m
}

#[test]
fn pfaffian_squared_is_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dim in (2..=12).step_by(2) {
        for _ in 0..100 {
            let m = random_antisymmetric(&mut rng, dim);
            let pf = pfaffian(&m, dim).unwrap();
            let det = DMatrix::from_row_slice(dim, dim, &m).determinant();
            assert!((pf * pf - det).abs() <= 1e-9 * det.abs().max(1e-300), "dim {dim}: {pf}^2 vs {det}");
        }
    }
}

#[test]
fn pfaffian_closed_forms() {
    assert_eq!(pfaffian(&[0.0, 1.0, -1.0, 0.0], 2).unwrap(), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let (a, b, c) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let mut m = vec![0.0; 36];
        for (k, v) in [a, b, c].into_iter().enumerate() {
            m[(2 * k) * 6 + 2 * k + 1] = v;
            m[(2 * k + 1) * 6 + 2 * k] = -v;
        }
        let pf = pfaffian(&m, 6).unwrap();
        assert!((pf - a * b * c).abs() <= 1e-12 * (a * b * c).abs().max(1.0));
    }
}

/// Top component of `B_1 ∧ .. ∧ B_n` up to a dimension-only factor, by a
/// full sum over permutations.
fn wedge_top(factors: &[&[f64]], dim: usize) -> f64 {
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, 1.0, &mut |p, sign| {
        let mut prod = sign;
        for (k, b) in factors.iter().enumerate() {
            prod *= b[p[2 * k] * dim + p[2 * k + 1]];
        }
        total += prod;
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, sign: f64, visit: &mut impl FnMut(&[usize], f64)) {
    if k == p.len() {
        visit(p, sign);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, if i == k { sign } else { -sign }, visit);
        p.swap(k, i);
    }
}

fn brute_force_ratios(w: &[f64], what: &[f64], dim: usize) -> Vec<f64> {
    let n = dim / 2;
    let denom = wedge_top(&vec![w; n], dim);
    (1..=n)
        .map(|l| {
            let mut factors = vec![what; l];
            factors.extend(std::iter::repeat_n(w, n - l));
            wedge_top(&factors, dim) / denom
        })
        .collect()
}

fn random_point(rng: &mut impl Rng, dim: usize) -> PhasePoint {
    PhasePoint::new((0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
}

#[test]
fn wedge_ratios_match_permutation_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=4 {
        let dim = 2 * n;
        let s = PhaseSpace::canonical(n).unwrap();
        for _ in 0..5 {
            let w = random_antisymmetric(&mut rng, dim);
            let what = random_antisymmetric(&mut rng, dim);
            let expected = brute_force_ratios(&w, &what, dim);
            let field = |m: &[f64]| {
                let comps = (0..dim)
                    .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
                    .map(|(i, j)| ((i, j), ScalarExpr::num(m[i * dim + j])));
                MultiVectorField::bivector(&s, comps.collect::<Vec<_>>()).unwrap()
            };
            let x = random_point(&mut rng, dim);
            let got = mixed_wedge_ratios(&field(&w), &field(&what), &x).unwrap().values;
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "n={n}: {got:?} vs {expected:?}");
            }
        }
    }
}

#[test]
fn example_values_at_named_points() {
    let s = builtin("dissipative", 1).unwrap();
    let what = lie_derivative_mv(&s.e, &s.w).unwrap();
    let x = PhasePoint::new(vec![1.0, 2.0]).unwrap();
    let y = mixed_wedge_ratios(&s.w, &what, &x).unwrap().values;
    assert!((y[0] + 6.0).abs() < 1e-12);
    let c = secular_roots(&s.w, &what, &x).unwrap();
    assert!((c.roots[0] + 6.0).abs() < 1e-12);
    assert_eq!(invariant_gradient(&s.w, &s.e, 1, &x).unwrap(), vec![-2.0, -2.0]);

    let s2 = builtin("dissipative", 2).unwrap();
    let what2 = lie_derivative_mv(&s2.e, &s2.w).unwrap();
    // (q1, q2, p1, p2) = (1, 0, 2, 1)
    let x = PhasePoint::new(vec![1.0, 0.0, 2.0, 1.0]).unwrap();
    let c = secular_roots(&s2.w, &what2, &x).unwrap();
    assert!((c.roots[0] + 6.0).abs() < 1e-12 && (c.roots[1] + 2.0).abs() < 1e-12, "{:?}", c.roots);
    let y = y_from_roots(&c).values;
    assert!((y[0] + 4.0).abs() < 1e-12 && (y[1] - 12.0).abs() < 1e-12);
}

#[test]
fn roots_pair_with_generalized_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=3 {
        let s = builtin("dissipative", n).unwrap();
        let what = lie_derivative_mv(&s.e, &s.w).unwrap();
        let dim = 2 * n;
        for _ in 0..10 {
            let x = random_point(&mut rng, dim);
            let Ok(spec) = secular_roots(&s.w, &what, &x) else { continue };
            let w = DMatrix::from_row_slice(dim, dim, &s.w.evaluate(&x).unwrap().to_matrix());
            let h = DMatrix::from_row_slice(dim, dim, &what.evaluate(&x).unwrap().to_matrix());
            let eig = w.try_inverse().unwrap() * h;
            let mut ev: Vec<f64> = eig.complex_eigenvalues().iter().map(|z| z.re).collect();
            ev.sort_by(f64::total_cmp);
            for (k, c) in spec.roots.iter().enumerate() {
                let scale = c.abs().max(1.0);
                assert!((ev[2 * k] - c).abs() <= 1e-6 * scale && (ev[2 * k + 1] - c).abs() <= 1e-6 * scale,
                    "{ev:?} vs {:?}", spec.roots);
            }
        }
    }
}

fn route_gap(w: &MultiVectorField, what: &MultiVectorField, x: &PhasePoint) -> f64 {
    let wedge = mixed_wedge_ratios(w, what, x).unwrap().values;
    let spec = secular_roots(w, what, x).unwrap();
    let roots = y_from_roots(&spec).values;
    let scale = spec.roots.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    wedge
        .iter()
        .zip(&roots)
        .enumerate()
        .map(|(l, (a, b))| (a - b).abs() / scale.powi(l as i32 + 1))
        .fold(0.0, f64::max)
}

fn regular_points(w: &MultiVectorField, rng: &mut impl Rng, count: usize) -> Vec<PhasePoint> {
    let dim = w.dim();
    let mut out = Vec::new();
    while out.len() < count {
        let x = random_point(rng, dim);
        let m = w.evaluate(&x).unwrap().to_matrix();
        let norm = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if pfaffian(&m, dim).unwrap().abs() > 1e-6 * norm.powi((dim / 2) as i32) {
            out.push(x);
        }
    }
    out
}

#[test]
fn routes_agree_on_the_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let s = builtin("dissipative", n).unwrap();
        let what = lie_derivative_mv(&s.e, &s.w).unwrap();
        for x in regular_points(&s.w, &mut rng, 32) {
            assert!(route_gap(&s.w, &what, &x) <= 1e-9);
        }
    }
}

fn random_cubic(rng: &mut impl Rng, coords: &[usize]) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for _ in 0..5 {
        let mut m = ScalarExpr::num(rng.random_range(-1.0..1.0));
        for _ in 0..rng.random_range(1..=3) {
            m = m * ScalarExpr::coord(coords[rng.random_range(0..coords.len())]);
        }
        out = out + m;
    }
    out
}

/// Pairs `(W, λW + L_E W)`. Canonical `W` with a gradient generator
/// `E = sum d_qi φ(q) d_qi` has real roots `λ - eig(Hess φ)`; the dissipative
/// `W` with `E = sum g_i(p_i + q_i) d_qi` is block-diagonal.
#[test]
fn routes_agree_on_randomized_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..10 {
        let n = 2 + k % 3;
        let s = PhaseSpace::canonical(n).unwrap();
        let qs: Vec<usize> = (1..=n).map(|i| s.q(i)).collect();
        let (w, e) = if k % 2 == 0 {
            let w = MultiVectorField::bivector(&s, (1..=n).map(|i| ((s.p(i), s.q(i)), ScalarExpr::num(1.0)))).unwrap();
            let phi = random_cubic(&mut rng, &qs);
            let e = MultiVectorField::vector(&s, qs.iter().map(|&q| (q, phi.diff(q)))).unwrap();
            (w, e)
        } else {
            let s_ = builtin("dissipative", n).unwrap();
            let e = MultiVectorField::vector(
                &s,
                (1..=n).map(|i| {
                    let sum = ScalarExpr::coord(s.p(i)) + ScalarExpr::coord(s.q(i));
                    let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let g = ScalarExpr::num(c[0]) + ScalarExpr::num(c[1]) * sum.clone()
                        + ScalarExpr::num(c[2]) * sum.powi(2);
                    (s.q(i), g)
                }),
            )
            .unwrap();
            (s_.w, e)
        };
        let lambda = rng.random_range(-2.0..2.0);
        let what = w.scaled(lambda).plus(&lie_derivative_mv(&e, &w).unwrap()).unwrap();
        for x in regular_points(&w, &mut rng, 32) {
            let gap = route_gap(&w, &what, &x);
            assert!(gap <= 1e-9, "pair {k}: gap {gap}");
        }
    }
}

#[test]
fn scaling_the_deformation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = builtin("dissipative", 3).unwrap();
    let what = lie_derivative_mv(&s.e, &s.w).unwrap();
    let lambda = -1.75;
    let scaled = what.scaled(lambda);
    for x in regular_points(&s.w, &mut rng, 16) {
        let (a, b) = (secular_roots(&s.w, &what, &x).unwrap(), secular_roots(&s.w, &scaled, &x).unwrap());
        let mut expected: Vec<f64> = a.roots.iter().map(|c| lambda * c).collect();
        expected.sort_by(f64::total_cmp);
        for (c, e) in b.roots.iter().zip(&expected) {
            assert!((c - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
        let (ya, yb) = (mixed_wedge_ratios(&s.w, &what, &x).unwrap(), mixed_wedge_ratios(&s.w, &scaled, &x).unwrap());
        for (l, (u, v)) in ya.values.iter().zip(&yb.values).enumerate() {
            let e = lambda.powi(l as i32 + 1) * u;
            assert!((v - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=3 {
        let s = builtin("dissipative", n).unwrap();
        let what = lie_derivative_mv(&s.e, &s.w).unwrap();
        for x in regular_points(&s.w, &mut rng, 8) {
            for l in 1..=n {
                let g = invariant_gradient(&s.w, &s.e, l, &x).unwrap();
                for i in 0..2 * n {
                    let probe = |d: f64| {
                        let mut y = x.to_vec();
                        y[i] += d;
                        mixed_wedge_ratios(&s.w, &what, &PhasePoint::new(y).unwrap()).unwrap().values[l - 1]
                    };
                    let fd = (probe(1e-6) - probe(-1e-6)) / 2e-6;
                    assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "n={n} l={l} i={i}: {fd} vs {}", g[i]);
                }
            }
        }
    }
}

#[test]
fn constant_ratio_deformation_has_zero_gradient() {
    let s = builtin("dissipative", 2).unwrap();
    let e = MultiVectorField::vector(&s.space, [(s.space.q(1), ScalarExpr::zero())]).unwrap();
    let x = PhasePoint::new(vec![0.3, -0.4, 1.2, 0.9]).unwrap();
    let what = s.w.scaled(2.5);
    let jets = binoether_core::spectral::invariant_jets(&s.w, &what, &x).unwrap();
    for j in jets {
        assert!(j.gradient.iter().all(|g| g.abs() < 1e-12), "{j:?}");
    }
    assert!(invariant_gradient(&s.w, &e, 1, &x).unwrap().iter().all(|g| *g == 0.0));
}

#[test]
fn root_gradients_are_exact_on_the_example() {
    // c_i = -2 (p_i + q_i)
    let s = builtin("dissipative", 2).unwrap();
    let what = lie_derivative_mv(&s.e, &s.w).unwrap();
    let x = PhasePoint::new(vec![0.3, -0.4, 1.2, 0.9]).unwrap();
    let roots = root_jets(&s.w, &what, &x).unwrap().unwrap();
    // sums 1.5 and 0.5, so the ascending roots are -3 then -1
    assert!((roots[0].value + 3.0).abs() < 1e-12);
    for (g, e) in roots[0].gradient.iter().zip([-2.0, 0.0, -2.0, 0.0]) {
        assert!((g - e).abs() < 1e-10);
    }
    for (g, e) in roots[1].gradient.iter().zip([0.0, -2.0, 0.0, -2.0]) {
        assert!((g - e).abs() < 1e-10);
    }
}
