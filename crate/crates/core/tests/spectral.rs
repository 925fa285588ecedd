use approx::assert_relative_eq;
use moment_spaces::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn dense(j: &Jacobi) -> DMatrix<f64> {
    let n = j.size();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            j.diagonal[r]
        } else if r + 1 == c {
            j.offdiagonal[r]
        } else if c + 1 == r {
            j.offdiagonal[c]
        } else {
            0.0
        }
    })
}

fn binomial_arcsine(l: usize) -> f64 {
    (1..=l).map(|i| (l + i) as f64 / (4.0 * i as f64)).product()
}

fn arcsine_recurrence(n: usize) -> Recurrence {
    let c = Coordinates::new(Domain::Interval01, vec![0.5; 2 * n]).unwrap();
    canonical_to_recurrence(&c).unwrap()
}

#[test]
fn one_by_one_is_point_mass() {
    let rec = Recurrence::new(vec![0.7], vec![]).unwrap();
    let mu = spectral_measure(&jacobi_matrix(&rec, 1).unwrap()).unwrap();
    assert_eq!(mu.nodes, vec![0.7]);
    assert_eq!(mu.weights, vec![1.0]);
}

#[test]
fn two_by_two_by_hand() {
    let rec = Recurrence::new(vec![0.0, 0.0], vec![1.0]).unwrap();
    let j = jacobi_matrix(&rec, 2).unwrap();
    assert_eq!(j.offdiagonal, vec![1.0]);
    let mu = spectral_measure(&j).unwrap();
    assert_relative_eq!(mu.nodes[0], -1.0, epsilon = 1e-15);
    assert_relative_eq!(mu.nodes[1], 1.0, epsilon = 1e-15);
    assert_relative_eq!(mu.weights[0], 0.5, epsilon = 1e-15);
    assert_relative_eq!(mu.weights[1], 0.5, epsilon = 1e-15);
    assert_relative_eq!(mu.moment(2), 1.0, epsilon = 1e-15);
    assert_eq!(j.power_moment(2), 1.0);
}

#[test]
fn arcsine_jacobi_entries() {
    let j = jacobi_matrix(&arcsine_recurrence(4), 4).unwrap();
    assert!(j.diagonal.iter().all(|a| *a == 0.5));
    assert_relative_eq!(j.offdiagonal[0], 0.125f64.sqrt(), epsilon = 1e-16);
    assert_relative_eq!(j.offdiagonal[1], 0.0625f64.sqrt(), epsilon = 1e-16);
    assert_relative_eq!(j.offdiagonal[2], 0.0625f64.sqrt(), epsilon = 1e-16);
}

#[test]
fn arcsine_truncation_moments() {
    let j = jacobi_matrix(&arcsine_recurrence(6), 6).unwrap();
    let mu = spectral_measure(&j).unwrap();
    let exact = [0.5, 3.0 / 8.0, 5.0 / 16.0, 35.0 / 128.0, 63.0 / 256.0];
    for (l, m) in exact.iter().enumerate() {
        assert!((mu.moment(l + 1) - m).abs() < 1e-10);
        assert!((j.power_moment(l + 1) - m).abs() < 1e-15);
    }
    assert_eq!(j.power_moment(3), 0.3125);
    for l in 1..=11 {
        assert!((mu.moment(l) - binomial_arcsine(l)).abs() < 1e-10);
    }
}

#[test]
fn large_truncation_moment_identity() {
    let n = 200;
    let j = jacobi_matrix(&arcsine_recurrence(n), n).unwrap();
    let mu = spectral_measure(&j).unwrap();
    assert!((mu.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for l in [1, 2, 3, 10, 50, 200, 399] {
        let a = mu.moment(l);
        assert!((a - j.power_moment(l)).abs() < 1e-10, "l={l}");
        assert!((a - binomial_arcsine(l)).abs() < 1e-10, "l={l}");
    }
}

#[test]
fn size_checks() {
    let rec = Recurrence::new(vec![0.0, 0.0], vec![1.0]).unwrap();
    assert!(jacobi_matrix(&rec, 3).is_err());
    assert!(jacobi_matrix(&rec, 0).is_err());
}

#[test]
fn single_precision() {
    let rec = RecurrenceF32::new(vec![0.0, 0.0], vec![1.0]).unwrap();
    let mu = spectral_measure(&jacobi_matrix(&rec, 2).unwrap()).unwrap();
    assert!((mu.nodes[1] - 1.0).abs() < 1e-6);
    assert!((mu.weights[0] - 0.5).abs() < 1e-6);
}

fn jacobi_strategy(max: usize) -> impl Strategy<Value = Jacobi> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(-1.0f64..1.0, n),
                proptest::collection::vec(0.01f64..1.0, n - 1),
            )
        })
        .prop_map(|(a, b)| {
            let n = a.len();
            jacobi_matrix(&Recurrence::new(a, b).unwrap(), n).unwrap()
        })
}

proptest! {
    #[test]
    fn moment_identity(j in jacobi_strategy(40)) {
        let n = j.size();
        let mu = spectral_measure(&j).unwrap();
        prop_assert!((mu.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(mu.weights.iter().all(|w| *w >= 0.0));
        let d = dense(&j);
        let mut power = DMatrix::<f64>::identity(n, n);
        for l in 1..2 * n {
            power = &power * &d;
            let exact = power[(0, 0)];
            let scale = power.abs().max().max(1.0);
            prop_assert!((mu.moment(l) - exact).abs() <= 1e-10 * scale, "l={}", l);
            prop_assert!((j.power_moment(l) - exact).abs() <= 1e-12 * scale);
        }
        prop_assert!((mu.nodes.iter().sum::<f64>() - j.trace()).abs() < 1e-10);
    }

    #[test]
    fn eigenvalues_interlace(j in jacobi_strategy(30), extra in -1.0f64..1.0, b in 0.01f64..1.0) {
        let n = j.size();
        let mut diagonal = j.diagonal.clone();
        diagonal.push(extra);
        let mut offdiagonal = j.offdiagonal.clone();
        offdiagonal.push(b.sqrt());
        let bigger = Jacobi { diagonal, offdiagonal };
        let small = spectral_measure(&j).unwrap().nodes;
        let large = spectral_measure(&bigger).unwrap().nodes;
        prop_assert_eq!(large.len(), n + 1);
        for i in 0..n {
            prop_assert!(large[i] <= small[i] + 1e-12, "{} {}", large[i], small[i]);
            prop_assert!(small[i] <= large[i + 1] + 1e-12);
        }
        let dense_eigs = {
            let mut e: Vec<f64> = nalgebra::SymmetricEigen::new(dense(&bigger)).eigenvalues.iter().copied().collect();
            e.sort_by(f64::total_cmp);
            e
        };
        for (a, b) in large.iter().zip(&dense_eigs) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
