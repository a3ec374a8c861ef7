use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use singlet_sim::quantum::{hermitian_eigen, quantum_correlation, quantum_joint, SpinOperators};
use singlet_sim::{make_spin, sample_direction, Direction64, SingletState64, SpinOperators64, SpinValue};

fn spin(twice: i64) -> SpinValue {
    make_spin(twice).unwrap()
}

fn random_pairs(seed: u64, n: usize) -> Vec<(Direction64, Direction64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (sample_direction(&mut rng), sample_direction(&mut rng)))
        .collect()
}

#[test]
fn algebra_holds_up_to_spin_six() {
    for twice in 0..=12 {
        let ops = SpinOperators64::new(spin(twice));
        assert!(ops.commutator_error() <= 1e-10, "2s = {twice}");
        assert!(ops.casimir_error() <= 1e-10, "2s = {twice}");
        let psi = SingletState64::new(spin(twice));
        assert!((psi.norm() - 1.0).abs() <= 1e-12);
        assert!(psi.total_spin_residual(&ops) <= 1e-10);
    }
}

#[test]
fn spectrum_is_the_spin_grid_in_every_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for twice in [1i64, 2, 5, 8, 12] {
        let ops = SpinOperators::<f64>::new(spin(twice));
        for _ in 0..100 {
            let a: Direction64 = sample_direction(&mut rng);
            let eig = hermitian_eigen(&ops.along(&a)).unwrap();
            // ascending values against -s, ..., s
            for (k, value) in eig.values.iter().enumerate() {
                let expect = (2 * k as i64 - twice) as f64 / 2.0;
                assert!((value - expect).abs() <= 1e-9, "2s = {twice}: {value} vs {expect}");
            }
        }
    }
}

#[test]
fn contraction_matches_closed_form() {
    for twice in 0..=12 {
        let s = spin(twice);
        for (a, b) in random_pairs(22 + twice as u64, 50) {
            let got = quantum_correlation(s, &a, &b);
            let expect = s.singlet_correlation_factor() * a.dot(&b);
            assert!((got - expect).abs() <= 1e-9, "2s = {twice}: {got} vs {expect}");
        }
    }
}

#[test]
fn joint_has_uniform_marginals_and_right_correlation() {
    for twice in 0..=12 {
        let s = spin(twice);
        let support = s.outcome_support();
        for (a, b) in random_pairs(40 + twice as u64, 5) {
            let joint = quantum_joint::<f64>(s, &a, &b).unwrap();
            assert!((joint.total() - 1.0).abs() <= 1e-10);
            assert!(joint.marginal_alpha().max_deviation_from_uniform(&support) <= 1e-10);
            assert!(joint.marginal_beta().max_deviation_from_uniform(&support) <= 1e-10);
            assert!((joint.correlation() - quantum_correlation(s, &a, &b)).abs() <= 1e-9);
        }
    }
}

#[test]
fn orthogonal_directions_are_uncorrelated() {
    let a = Direction64::from_spherical(0.8, 0.3);
    // rotate the polar angle by a right angle in the same meridian plane
    let b = Direction64::from_spherical(0.8 + std::f64::consts::FRAC_PI_2, 0.3);
    assert!(a.dot(&b).abs() < 1e-15);
    for twice in 1..=8 {
        let joint = quantum_joint::<f64>(spin(twice), &a, &b).unwrap();
        assert!(joint.correlation().abs() <= 1e-9);
    }
}

/// Wigner small-d element `d^j_{m' m}(beta)`, all arguments doubled.
fn wigner_d(tj: i64, tmp: i64, tm: i64, beta: f64) -> f64 {
    let fact = |n: i64| (1..=n).map(|k| k as f64).product::<f64>();
    let (jpm, jmm) = ((tj + tm) / 2, (tj - tm) / 2);
    let (jpmp, jmmp) = ((tj + tmp) / 2, (tj - tmp) / 2);
    let shift = (tmp - tm) / 2;
    let prefactor = (fact(jpmp) * fact(jmmp) * fact(jpm) * fact(jmm)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut sum = 0.0;
    for k in 0..=tj {
        let terms = [jpm - k, k, jmmp - k, k + shift];
        if terms.iter().any(|&t| t < 0) {
            continue;
        }
        let denom: f64 = terms.iter().map(|&t| fact(t)).product();
        let sign = if (k + shift) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c.powi((tj - 2 * k - shift) as i32) * s.powi((2 * k + shift) as i32) / denom;
    }
    prefactor * sum
}

#[test]
fn joint_matches_wigner_rotation() {
    // a = z, b at polar angle theta in the xz-plane: Bob's conditional state
    // after Alice finds m is |-m>, so P(m, m') = d^s_{m', -m}(theta)^2 / (2s+1)
    for twice in 1..=8i64 {
        let s = spin(twice);
        for theta in [0.0, 0.4, 1.3, 2.0, std::f64::consts::PI] {
            let a = Direction64::z_axis();
            let b = Direction64::from_spherical(theta, 0.0);
            let joint = quantum_joint::<f64>(s, &a, &b).unwrap();
            for alpha in s.outcome_support() {
                for beta in s.outcome_support() {
                    let d = wigner_d(twice, beta.twice(), -alpha.twice(), theta);
                    let expect = d * d / (twice + 1) as f64;
                    let got = joint.probability(alpha, beta);
                    assert!(
                        (got - expect).abs() <= 1e-9,
                        "2s = {twice}, theta {theta}, ({alpha}, {beta}): {got} vs {expect}"
                    );
                }
            }
        }
    }
}

#[test]
fn spin_one_parallel_zero_cell() {
    let z = Direction64::z_axis();
    let joint = quantum_joint::<f64>(spin(2), &z, &z).unwrap();
    let zero = singlet_sim::HalfIntegerValue::ZERO;
    assert!((joint.probability(zero, zero) - 1.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn spin_half_parallel_is_anticorrelated() {
    let a = Direction64::from_spherical(1.0, 2.0);
    let joint = quantum_joint::<f64>(spin(1), &a, &a).unwrap();
    let (up, down) = (
        singlet_sim::HalfIntegerValue::from_twice(1),
        singlet_sim::HalfIntegerValue::from_twice(-1),
    );
    assert!((joint.probability(up, down) - 0.5).abs() <= 1e-12);
    assert!((joint.probability(down, up) - 0.5).abs() <= 1e-12);
    assert!(joint.probability(up, up) <= 1e-12);
}
