use num_rational::Rational64;
use num_traits::ToPrimitive;
use singlet_sim::harness::monte_carlo;
use singlet_sim::protocol::f_bit;
use singlet_sim::stats::{chi_square_uniform, proportion_z, CHI_SQUARE_ALPHA, SIGMA_BAND};
use singlet_sim::{build_chain, make_spin, sample_direction, Direction64, RandomStream};

const N: usize = 200_000;

fn directions(seed: u64) -> Vec<Direction64> {
    let mut rng = RandomStream::new(seed).generator();
    (0..N).map(|_| sample_direction(&mut rng)).collect()
}

#[test]
fn sphere_components_have_zero_mean() {
    let dirs = directions(11);
    // each component has variance 1/3 on the sphere
    let se = (1.0 / 3.0 / N as f64).sqrt();
    for axis in 0..3 {
        let mean = dirs.iter().map(|d| d.components()[axis]).sum::<f64>() / N as f64;
        assert!(mean.abs() <= SIGMA_BAND * se, "axis {axis}: mean {mean}");
    }
    let max_norm_error = dirs.iter().map(|d| (d.norm() - 1.0).abs()).fold(0.0, f64::max);
    assert!(max_norm_error < 1e-14);
}

#[test]
fn sphere_z_is_uniform() {
    let dirs = directions(12);
    let mut bins = [0u64; 20];
    for d in &dirs {
        let k = (((d.z() + 1.0) / 2.0) * 20.0).floor() as usize;
        bins[k.min(19)] += 1;
    }
    let report = chi_square_uniform(&bins).unwrap();
    assert!(report.passes(CHI_SQUARE_ALPHA), "{report:?}");
}

#[test]
fn sphere_azimuth_is_uniform() {
    let dirs = directions(13);
    let mut bins = [0u64; 16];
    for d in &dirs {
        let phi = d.y().atan2(d.x()).rem_euclid(std::f64::consts::TAU);
        let k = (phi / std::f64::consts::TAU * 16.0).floor() as usize;
        bins[k.min(15)] += 1;
    }
    assert!(chi_square_uniform(&bins).unwrap().passes(CHI_SQUARE_ALPHA));
}

#[test]
fn biased_bit_fractions() {
    let dirs = directions(14);
    for (num, den) in [(1, 3), (3, 5), (5, 7)] {
        let p = Rational64::new(num, den);
        let minus = dirs.iter().filter(|nu| f_bit(*nu, p) == -1).count() as u64;
        let target = (1.0 - p.to_f64().unwrap()) / 2.0;
        let z = proportion_z(minus, N as u64, target);
        assert!(z <= SIGMA_BAND, "p = {p}: z = {z}");
    }
}

#[test]
fn split_streams_are_deterministic_and_distinct() {
    let master = RandomStream::new(99);
    assert_eq!(master.split(5), master.split(5));
    assert_ne!(master.split(5), master.split(6));
    let first = |s: RandomStream| {
        let mut rng = s.generator();
        sample_direction::<f64, _>(&mut rng)
    };
    assert_eq!(first(master.split(3)), first(master.split(3)));
    assert_ne!(first(master.split(3)), first(master.split(4)));
    assert_ne!(first(RandomStream::new(1)), first(RandomStream::new(2)));
}

#[test]
fn worker_count_does_not_change_monte_carlo() {
    let chain = build_chain(make_spin(5).unwrap());
    let a = Direction64::from_spherical(0.4, 1.0);
    let b = Direction64::from_spherical(2.2, -0.3);
    let master = RandomStream::new(2024);
    let one = monte_carlo(&chain, &a, &b, &master, 20_001, 1, true);
    let four = monte_carlo(&chain, &a, &b, &master, 20_001, 4, true);
    assert_eq!(one, four);
    assert_eq!(one.trials(), 20_001);
}
