use std::f64::consts::PI;

use approx::assert_relative_eq;
use moment_spaces::limits::{exact_log_volume_ratio, log_volume_unconstrained, regime};
use moment_spaces::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn constraint(pairs: &[(usize, f64)]) -> Constraint {
    Constraint::new(pairs.to_vec()).unwrap()
}

fn moments01(ps: &[f64]) -> Moments {
    let c = Coordinates::new(Domain::Interval01, ps.to_vec()).unwrap();
    canonical_to_moments(&c).unwrap()
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    while b - a > 1e-14 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

// KL(arcsine | mu) by x = (1 - cos t) / 2, under which the arcsine law is dt / pi
fn kl_quadrature(mu: &Measure) -> f64 {
    let ac = mu.ac.as_ref().unwrap();
    let n = 4000;
    let dt = PI / n as f64;
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            let x = 0.5 * (1.0 - t.cos());
            let arcsine = 1.0 / (PI * (x * (1.0 - x)).sqrt());
            (arcsine / ac.density(x)).ln()
        })
        .sum::<f64>()
        / n as f64
}

fn gauss_legendre_16() -> ([f64; 8], [f64; 8]) {
    (
        [
            0.0950125098376374,
            0.2816035507792589,
            0.4580167776572274,
            0.6178762444026438,
            0.755_404_408_355_003,
            0.8656312023878318,
            0.9445750230732326,
            0.9894009349916499,
        ],
        [
            0.1894506104550685,
            0.1826034150449236,
            0.1691565193950025,
            0.1495959888165767,
            0.1246289712555339,
            0.0951585116824928,
            0.0622535239386479,
            0.0271524594117541,
        ],
    )
}

fn gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre_16();
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    (0..8)
        .map(|i| w[i] * (f(c + r * x[i]) + f(c - r * x[i])))
        .sum::<f64>()
        * r
}

#[test]
fn kl_examples() {
    assert_eq!(kl_arcsine(&[0.5, 0.5, 0.5]), 0.0);
    assert_relative_eq!(kl_arcsine(&[0.3]), -(0.84f64).ln(), epsilon = 1e-15);
    assert_relative_eq!(kl_arcsine(&[0.3]), 0.174353, epsilon = 1e-6);
    let mu = build_bs01_measure(&[0.3]).unwrap();
    assert!((kl_quadrature(&mu) - kl_arcsine(&[0.3])).abs() < 1e-6);
}

#[test]
fn range_objective_examples() {
    let arcsine = Moments::new(Domain::Interval01, vec![0.5, 0.375]);
    assert!(range_objective(&arcsine).abs() < 1e-15);
    let m = Moments::new(Domain::Interval01, vec![0.3]);
    assert_relative_eq!(range_objective(&m), 0.84f64.ln(), epsilon = 1e-15);
    let edge = Moments::new(Domain::Interval01, vec![0.5, 0.25]);
    assert_eq!(range_objective(&edge), f64::NEG_INFINITY);
}

#[test]
fn mean_constraint_closed_form() {
    for c in [0.2, 0.3, 0.5] {
        let lim = solve_uniform_limit(&constraint(&[(1, c)])).unwrap();
        assert_eq!(lim.minimizers.len(), 1);
        let mu = &lim.minimizers[0].measure;
        assert_relative_eq!(lim.minimizers[0].coordinates[0], c, epsilon = 1e-12);
        let ac = mu.ac.as_ref().unwrap();
        let d = &ac.denominator;
        assert_relative_eq!(d.coeffs[0], c * c, epsilon = 1e-12);
        assert_relative_eq!(
            d.coeffs.get(1).copied().unwrap_or(0.0),
            1.0 - 2.0 * c,
            epsilon = 1e-12
        );
        for i in 0..64 {
            let x = (i as f64 + 0.5) / 64.0;
            let exact =
                c * (1.0 - c) / (PI * (x * (1.0 - x)).sqrt() * ((1.0 - 2.0 * c) * x + c * c));
            assert!((density_at(mu, x).unwrap() - exact).abs() < 1e-10);
        }
    }
    let lim = solve_uniform_limit(&constraint(&[(1, 0.3)])).unwrap();
    let ac = lim.minimizers[0].measure.ac.as_ref().unwrap();
    assert_relative_eq!(ac.denominator.coeffs[0], 0.09, epsilon = 1e-12);
    assert_relative_eq!(ac.denominator.coeffs[1], 0.4, epsilon = 1e-12);
}

#[test]
fn half_mean_is_arcsine() {
    let lim = solve_uniform_limit(&constraint(&[(1, 0.5)])).unwrap();
    let mu = &lim.minimizers[0].measure;
    for x in [0.1, 0.5, 0.8] {
        assert_relative_eq!(
            density_at(mu, x).unwrap(),
            1.0 / (PI * (x * (1.0 - x)).sqrt()),
            max_relative = 1e-12
        );
    }
}

#[test]
fn mean_and_variance_closed_form() {
    let (c1, c2) = (0.4, 0.2);
    let lim = solve_uniform_limit(&constraint(&[(1, c1), (2, c2)])).unwrap();
    let mu = &lim.minimizers[0].measure;
    let ac = mu.ac.as_ref().unwrap();
    let (u, v) = (c1 - c2, c2 - c1 * c1);
    // closed-form denominator divided by (c1 (1 - c1))^2, the normalization used by the measure
    let s = (c1 * (1.0 - c1)).powi(2);
    let exact = [
        u * u * c1 * c1 / s,
        (-2.0 * u * u * c1 + v * v) / s,
        (u * u - v * v) / s,
    ];
    for (a, b) in ac.denominator.coeffs.iter().zip(exact) {
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
    for i in 0..64 {
        let x = (i as f64 + 0.5) / 64.0;
        let den = u * u * (x - c1).powi(2) + v * v * x * (1.0 - x);
        let exact = c1 * (1.0 - c1) * v * u / (PI * (x * (1.0 - x)).sqrt() * den);
        assert!((density_at(mu, x).unwrap() - exact).abs() < 1e-10 * exact.max(1.0));
    }
}

#[test]
fn second_moment_constraint_matches_golden_section() {
    let c2 = 0.3;
    let f = |c1: f64| (c2 - c1 * c1) * (c1 - c2) / (c1 * (1.0 - c1));
    let c1 = golden_max(&f, c2, c2.sqrt());
    let lim = solve_uniform_limit(&constraint(&[(2, c2)])).unwrap();
    let mu = &lim.minimizers[0].measure;
    assert!((lim.minimizers[0].coordinates[0] - c1).abs() < 1e-8);
    assert!((measure_moment(mu, 1) - c1).abs() < 1e-8);
    assert!((measure_moment(mu, 2) - c2).abs() < 1e-8);
    let (u, v) = (c1 - c2, c2 - c1 * c1);
    for x in [0.1f64, 0.45, 0.9] {
        let den = u * u * (x - c1).powi(2) + v * v * x * (1.0 - x);
        let exact = c1 * (1.0 - c1) * v * u / (PI * (x * (1.0 - x)).sqrt() * den);
        assert!((density_at(mu, x).unwrap() - exact).abs() < 1e-6 * exact);
    }
}

#[test]
fn uniform_limit_rejects_inadmissible() {
    assert!(matches!(
        solve_uniform_limit(&constraint(&[(1, 0.3), (2, 0.05)])),
        Err(Error::NotAdmissible)
    ));
    assert!(matches!(
        solve_uniform_limit(&constraint(&[(1, 1.2)])),
        Err(Error::NotAdmissible)
    ));
}

#[test]
fn limit_measures_meet_constraints() {
    for pairs in [
        vec![(1, 0.3)],
        vec![(2, 0.3)],
        vec![(1, 0.4), (2, 0.2)],
        vec![(3, 0.1)],
        vec![(1, 0.6), (3, 0.3)],
    ] {
        let lim = solve_uniform_limit(&constraint(&pairs)).unwrap();
        let mu = &lim.minimizers[0].measure;
        assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        for (i, c) in pairs {
            assert!((measure_moment(mu, i) - c).abs() < 1e-8, "m_{i}");
        }
    }
}

#[test]
fn optimum_has_vanishing_projected_gradient() {
    let cons = constraint(&[(3, 0.1)]);
    let lim = solve_uniform_limit(&cons).unwrap();
    let m = lim.moments(0, 3);
    // the free moments are m_1 and m_2
    let w = |x: &[f64]| range_objective(&Moments::new(Domain::Interval01, vec![x[0], x[1], 0.1]));
    let x = [m[0], m[1]];
    let h = 1e-6;
    let mut norm = 0.0f64;
    for c in 0..2 {
        let mut up = x;
        up[c] += h;
        let mut dn = x;
        dn[c] -= h;
        norm = norm.hypot((w(&up) - w(&dn)) / (2.0 * h));
    }
    assert!(norm < 1e-7, "{norm}");
}

#[test]
fn real_line_example() {
    let v = PotentialSpec::new(vec![
        Potential::parse("(y-1)^2").unwrap(),
        Potential::parse("8*y^2").unwrap(),
    ])
    .unwrap();
    let lim = solve_general_limits(&v, &constraint(&[(1, 0.0)]), Domain::RealLine).unwrap();
    assert_eq!(lim.minimizers.len(), 1);
    let q = &lim.minimizers[0];
    assert_eq!(q.weight, 1.0);
    assert!(q.coordinates[0].abs() < 1e-15);
    assert!((q.tail[0] - 1.0).abs() < 1e-8);
    assert!((q.tail[1] - 0.25).abs() < 1e-8);
    let mu = &q.measure;
    assert_eq!(mu.atoms.len(), 1);
    assert!((mu.atoms[0].location + 0.25).abs() < 1e-8);
    assert!((mu.atoms[0].weight - 0.75).abs() < 1e-6);
    let (a, b) = mu.ac.as_ref().unwrap().support;
    assert!(a.abs() < 1e-8 && (b - 2.0).abs() < 1e-8);
}

#[test]
fn zero_potential_matches_uniform_limit() {
    for pairs in [
        vec![(1, 0.3)],
        vec![(2, 0.3)],
        vec![(1, 0.4), (2, 0.2)],
        vec![(3, 0.1)],
    ] {
        let c = constraint(&pairs);
        let u = solve_uniform_limit(&c).unwrap();
        let g = solve_general_limits(&PotentialSpec::zero(), &c, Domain::Interval01).unwrap();
        assert_eq!(g.minimizers.len(), 1);
        assert!((g.minimizers[0].tail[0] - 0.5).abs() < 1e-7);
        assert!((g.minimizers[0].tail[1] - 0.5).abs() < 1e-7);
        for (a, b) in u.minimizers[0]
            .coordinates
            .iter()
            .zip(&g.minimizers[0].coordinates)
        {
            assert!((a - b).abs() < 1e-7, "{pairs:?}: {a} {b}");
        }
    }
}

#[test]
fn double_well_has_two_symmetric_minimizers() {
    let v = PotentialSpec::new(vec![
        Potential::parse("(y^2-1)^2").unwrap(),
        Potential::parse("y^2").unwrap(),
        Potential::parse("y^2").unwrap(),
        Potential::parse("y^2").unwrap(),
    ])
    .unwrap();
    let lim = solve_general_limits(&v, &constraint(&[(2, 1.0)]), Domain::RealLine).unwrap();
    assert_eq!(lim.minimizers.len(), 2);
    let (a, b) = (&lim.minimizers[0], &lim.minimizers[1]);
    assert!((a.weight - 0.5).abs() < 1e-6 && (b.weight - 0.5).abs() < 1e-6);
    assert!((a.coordinates[0] + b.coordinates[0]).abs() < 1e-8);
    assert!((a.coordinates[1] - b.coordinates[1]).abs() < 1e-8);
    assert!(a.coordinates[0].abs() > 1e-3);
    let total: f64 = lim.minimizers.iter().map(|m| m.weight).sum();
    assert!((total - 1.0).abs() < 1e-10);
    for m in &lim.minimizers {
        assert!((measure_moment(&m.measure, 2) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn flat_minimizer_is_degenerate() {
    let v = PotentialSpec::new(vec![
        Potential::parse("y^4").unwrap(),
        Potential::parse("y^2").unwrap(),
    ])
    .unwrap();
    let r = solve_general_limits(&v, &Constraint::empty(), Domain::RealLine);
    assert!(matches!(r, Err(Error::DegenerateMinimizer(_))), "{r:?}");
}

#[test]
fn slow_growth_is_not_integrable() {
    let v = PotentialSpec::new(vec![Potential::parse("log(1+y)").unwrap()]).unwrap();
    let r = solve_general_limits(&v, &Constraint::empty(), Domain::HalfLine);
    assert!(matches!(r, Err(Error::NonIntegrable { .. })));
}

#[test]
fn first_moment_variance_is_one_eighth() {
    let lim = solve_uniform_limit(&Constraint::empty()).unwrap();
    let s = clt_covariance(&Model::Uniform, &lim, 0, 1).unwrap();
    assert!((s[(0, 0)] - 0.125).abs() < 1e-9);
    // exact finite-n variance n / (4 (2n + 1)) approaches it
    let n = 1e6;
    assert!((n / (4.0 * (2.0 * n + 1.0)) - s[(0, 0)]).abs() < 1e-7);
}

#[test]
fn unconstrained_covariance_is_delta_method() {
    // m_1 = p_1, m_2 = p_1^2 + p_1 q_1 p_2 with p_j = 1/2 and Var = 1/8 each
    let lim = solve_uniform_limit(&Constraint::empty()).unwrap();
    let s = clt_covariance(&Model::Uniform, &lim, 0, 2).unwrap();
    let j = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.25]);
    let exact = &j * DMatrix::identity(2, 2) * 0.125 * j.transpose();
    assert!((s - exact).abs().max() < 1e-9);
}

#[test]
fn constrained_covariance_structure() {
    for (pairs, l) in [
        (vec![(1, 0.3)], 3),
        (vec![(2, 0.3)], 3),
        (vec![(1, 0.4), (3, 0.2)], 4),
    ] {
        let c = constraint(&pairs);
        let lim = solve_uniform_limit(&c).unwrap();
        let s = clt_covariance(&Model::Uniform, &lim, 0, l).unwrap();
        for (i, _) in &pairs {
            for r in 0..l {
                assert_eq!(s[(i - 1, r)], 0.0);
                assert_eq!(s[(r, i - 1)], 0.0);
            }
        }
        assert!((&s - s.transpose()).abs().max() < 1e-9);
        let eig = nalgebra::SymmetricEigen::new(s.clone()).eigenvalues;
        let top = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rank = eig.iter().filter(|v| **v > 1e-9 * top).count();
        assert_eq!(rank, l - pairs.len());
        assert!(eig.iter().all(|v| *v > -1e-12 * top));
    }
}

#[test]
fn gibbs_covariance_of_real_line_example() {
    let v = PotentialSpec::new(vec![
        Potential::parse("(y-1)^2").unwrap(),
        Potential::parse("8*y^2").unwrap(),
    ])
    .unwrap();
    let c = constraint(&[(1, 0.0)]);
    let lim = solve_general_limits(&v, &c, Domain::RealLine).unwrap();
    let s = clt_covariance(&Model::Gibbs(v), &lim, 0, 2).unwrap();
    assert!(s.row(0).iter().all(|x| *x == 0.0));
    // with alpha_1 = 0 fixed, m_2 = beta_1 and W_2'' = 16 + 1 / beta^2 = 32 at 1/4
    assert!((s[(1, 1)] - 1.0 / 32.0).abs() < 1e-7, "{}", s[(1, 1)]);
}

#[test]
fn rate_function_basics() {
    for pairs in [vec![], vec![(1, 0.3)], vec![(2, 0.3)]] {
        let c = constraint(&pairs);
        let lim = solve_uniform_limit(&c).unwrap();
        let m = Moments::new(Domain::Interval01, lim.moments(0, 4));
        assert!(rate_eval_uniform(&m, &c).unwrap().abs() < 1e-12);
        let outside = Moments::new(Domain::Interval01, vec![0.3, 0.05, 0.1, 0.1]);
        assert_eq!(rate_eval_uniform(&outside, &c).unwrap(), f64::INFINITY);
    }
    let off = Moments::new(Domain::Interval01, vec![0.31, 0.2]);
    assert_eq!(
        rate_eval_uniform(&off, &constraint(&[(1, 0.3)])).unwrap(),
        f64::INFINITY
    );
}

#[test]
fn unconstrained_rate_at_single_mean() {
    // I = -log(0.21 (1/4)^{l-1}) + log((1/4)^l) for every l
    for l in 1..=4 {
        let mut ps = vec![0.3];
        ps.extend(std::iter::repeat_n(0.5, l - 1));
        let m = moments01(&ps);
        let exact = -(0.21 * 0.25f64.powi(l as i32 - 1)).ln() + 0.25f64.powi(l as i32).ln();
        let rate = rate_eval_uniform(&m, &Constraint::empty()).unwrap();
        assert!((rate - exact).abs() < 1e-12, "{rate} {exact}");
        assert!((rate - kl_arcsine(&[0.3])).abs() < 1e-12);
    }
}

#[test]
fn gibbs_rate_function() {
    let v = PotentialSpec::new(vec![
        Potential::parse("(y-1)^2").unwrap(),
        Potential::parse("8*y^2").unwrap(),
    ])
    .unwrap();
    let c = constraint(&[(1, 0.0)]);
    let lim = solve_general_limits(&v, &c, Domain::RealLine).unwrap();
    let m = Moments::new(Domain::RealLine, lim.moments(0, 4));
    assert!(
        rate_eval_general(&m, &v, &c, Domain::RealLine)
            .unwrap()
            .abs()
            < 1e-12
    );
    let bad = Moments::new(Domain::RealLine, vec![0.0, -1.0]);
    assert_eq!(
        rate_eval_general(&bad, &v, &c, Domain::RealLine).unwrap(),
        f64::INFINITY
    );
    let other = Moments::new(Domain::RealLine, vec![0.0, 0.5, 0.1]);
    assert!(rate_eval_general(&other, &v, &c, Domain::RealLine).unwrap() > 0.0);
}

#[test]
fn zero_potential_rate_matches_uniform_rate() {
    let c = constraint(&[(1, 0.3)]);
    let zero = PotentialSpec::zero();
    for ps in [[0.3, 0.2, 0.7], [0.3, 0.5, 0.5], [0.3, 0.9, 0.1]] {
        let m = moments01(&ps);
        let a = rate_eval_uniform(&m, &c).unwrap();
        let b = rate_eval_general(&m, &zero, &c, Domain::Interval01).unwrap();
        assert!((a - b).abs() < 1e-7, "{a} {b}");
    }
}

#[test]
fn mdp_rate_examples() {
    let c = constraint(&[(1, 0.3)]);
    let lim = solve_uniform_limit(&c).unwrap();
    let s = clt_covariance(&Model::Uniform, &lim, 0, 3).unwrap();
    assert_eq!(mdp_rate(&[0.0, 0.0, 0.0], &s, &c), 0.0);
    assert_eq!(mdp_rate(&[0.1, 0.0, 0.0], &s, &c), f64::INFINITY);
    let sub = s.view((1, 1), (2, 2)).clone_owned().try_inverse().unwrap();
    for x in [[0.0, 0.2, -0.1], [0.0, -1.0, 3.0]] {
        let v = nalgebra::DVector::from_row_slice(&x[1..]);
        let exact = 0.5 * (v.transpose() * &sub * &v)[(0, 0)];
        let r = mdp_rate(&x, &s, &c);
        assert!(r >= 0.0);
        assert!((r - exact).abs() < 1e-8 * exact.max(1.0));
    }
}

#[test]
fn volume_of_two_moment_space() {
    // {(m1, m2): m1^2 <= m2 <= m1} by nested Gauss-Legendre on 64 panels
    let panels = 64;
    let mut quad = 0.0;
    for i in 0..panels {
        let (a, b) = (i as f64 / panels as f64, (i + 1) as f64 / panels as f64);
        quad += gl(&|m1| gl(&|_| 1.0, m1 * m1, m1), a, b);
    }
    assert!((quad - 1.0 / 6.0).abs() < 1e-12);
    assert!((log_volume_unconstrained(2).exp() - quad).abs() < 1e-9);
    assert!((log_volume_unconstrained(1).exp() - 1.0).abs() < 1e-14);
}

#[test]
fn volume_regimes() {
    assert_eq!(
        regime(&constraint(&[(3, 0.3125)])),
        VolumeRegime::Polynomial
    );
    assert_eq!(regime(&constraint(&[(3, 0.1)])), VolumeRegime::Exponential);
    assert_eq!(
        volume_ratio(&constraint(&[(3, 0.3125)]), 50)
            .unwrap()
            .regime,
        VolumeRegime::Polynomial
    );
    assert_eq!(
        volume_ratio(&constraint(&[(3, 0.1)]), 50).unwrap().regime,
        VolumeRegime::Exponential
    );
    assert!(volume_ratio(&constraint(&[(1, 0.3), (2, 0.05)]), 50).is_err());
}

#[test]
fn volume_asymptotics_track_exact_ratio() {
    for pairs in [vec![(1, 0.3)], vec![(2, 0.3)], vec![(1, 0.5)]] {
        let c = constraint(&pairs);
        let mut last = f64::INFINITY;
        for n in [50, 200, 800] {
            let exact = exact_log_volume_ratio(&c, n).unwrap().unwrap();
            let approx = volume_ratio(&c, n).unwrap().log_ratio;
            let gap = (exact - approx).abs();
            assert!(gap < 0.05, "{pairs:?} n={n}: {exact} {approx}");
            assert!(gap <= last + 1e-9);
            last = gap;
        }
    }
}

proptest! {
    #[test]
    fn range_objective_is_negative_kl(ps in proptest::collection::vec(0.02f64..0.98, 1..=6)) {
        // compare at the rounded moment vector, whose canonical moments are taken in double-double
        let m = moments01(&ps);
        let md = MomentsDD::new(Domain::Interval01, m.values.iter().map(|v| DoubleDouble::from(*v)).collect());
        let exact: Vec<f64> = moments_to_canonical(&md).unwrap().values.iter().map(|v| v.to_f64()).collect();
        prop_assert!((range_objective(&m) + kl_arcsine(&exact)).abs() < 1e-10);
    }

    #[test]
    fn kl_matches_quadrature(ps in proptest::collection::vec(0.1f64..0.9, 1..=4)) {
        let mu = build_bs01_measure(&ps).unwrap();
        prop_assert!((kl_quadrature(&mu) - kl_arcsine(&ps)).abs() < 1e-6);
        prop_assert!(kl_arcsine(&ps) >= 0.0);
    }

    #[test]
    fn range_objective_is_strongly_concave(
        a in proptest::collection::vec(0.05f64..0.95, 3),
        b in proptest::collection::vec(0.05f64..0.95, 3),
    ) {
        let (ma, mb) = (moments01(&a), moments01(&b));
        let mid = Moments::new(
            Domain::Interval01,
            ma.values.iter().zip(&mb.values).map(|(x, y)| 0.5 * (x + y)).collect(),
        );
        let dist2: f64 = ma.values.iter().zip(&mb.values).map(|(x, y)| (x - y).powi(2)).sum();
        let gap = range_objective(&mid) - 0.5 * (range_objective(&ma) + range_objective(&mb));
        prop_assert!(gap >= 0.01 * dist2, "gap {} dist2 {}", gap, dist2);
    }

    #[test]
    fn uniform_rate_is_shifted_range(p2 in 0.01f64..0.99, p3 in 0.01f64..0.99, p4 in 0.01f64..0.99) {
        let c = constraint(&[(1, 0.3)]);
        let lim = solve_uniform_limit(&c).unwrap();
        let shift = range_objective(&Moments::new(Domain::Interval01, lim.moments(0, 4)));
        let m = moments01(&[0.3, p2, p3, p4]);
        let rate = rate_eval_uniform(&m, &c).unwrap();
        prop_assert!(rate >= 0.0);
        prop_assert!((rate - (shift - range_objective(&m))).abs() < 1e-10);
    }
}
