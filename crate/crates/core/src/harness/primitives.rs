use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{parallel_blocks, SCHEMA_VERSION};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::protocol::{c_bit, f_bit};
use crate::random::{sample_direction, sign_of, RandomStream};
use crate::stats::{z_test, IntegerMoments, SIGMA_BAND};

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivesConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub a: Direction<f64>,
    pub b: Direction<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveCheck {
    pub name: String,
    pub target: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitivesReport {
    pub schema: u32,
    pub command: &'static str,
    pub samples: u64,
    pub seed: u64,
    pub a: Direction<f64>,
    pub b: Direction<f64>,
    pub sigma_band: f64,
    pub checks: Vec<PrimitiveCheck>,
    pub passed: bool,
}

/// One step as Alice and Bob see it: `(x, y)` with `x = Sgn(a.lambda)` and
/// `y = Sgn(b.(lambda + c mu))`.
fn step_signs(rng: &mut ChaCha8Rng, a: &Direction<f64>, b: &Direction<f64>) -> (i64, i64) {
    let lambda = sample_direction(rng);
    let mu = sample_direction(rng);
    let c = c_bit(a, &lambda, &mu);
    let x = sign_of(a.dot(&lambda));
    let y = sign_of(b.dot_combination(&lambda, c, &mu));
    (i64::from(x), i64::from(y))
}

fn draw_f(rng: &mut ChaCha8Rng, bias: Rational64) -> i64 {
    i64::from(f_bit(&sample_direction::<f64, _>(rng), bias))
}

fn indicator(event: bool) -> i64 {
    i64::from(event)
}

fn ratio(r: Rational64) -> f64 {
    r.to_f64().expect("finite")
}

type Statistic = Box<dyn Fn(&mut ChaCha8Rng) -> i64 + Sync>;

struct Probe {
    name: String,
    target: f64,
    statistic: Statistic,
}

fn battery(a: Direction<f64>, b: Direction<f64>) -> Vec<Probe> {
    let ab = a.dot(&b);
    let mut probes = vec![
        Probe {
            name: "P[Sgn(a.lambda) = +1]".into(),
            target: 0.5,
            statistic: Box::new(move |r| indicator(step_signs(r, &a, &b).0 == 1)),
        },
        Probe {
            name: "P[Sgn(b.(lambda + c mu)) = +1]".into(),
            target: 0.5,
            statistic: Box::new(move |r| indicator(step_signs(r, &a, &b).1 == 1)),
        },
        Probe {
            name: "<x y>".into(),
            target: ab,
            statistic: Box::new(move |r| {
                let (x, y) = step_signs(r, &a, &b);
                x * y
            }),
        },
        Probe {
            name: "<x_1 y_2>".into(),
            target: 0.0,
            statistic: Box::new(move |r| {
                let (x1, _) = step_signs(r, &a, &b);
                let (_, y2) = step_signs(r, &a, &b);
                x1 * y2
            }),
        },
    ];
    let biases = [Rational64::new(1, 3), Rational64::new(3, 5), Rational64::new(5, 7)];
    for p in biases {
        probes.push(Probe {
            name: format!("P[f = +1], p = {p}"),
            target: (1.0 + ratio(p)) / 2.0,
            statistic: Box::new(move |r| indicator(draw_f(r, p) == 1)),
        });
    }
    let p = biases[1];
    probes.push(Probe {
        name: format!("<(1 + f)^2>, p = {p}"),
        target: 2.0 * (1.0 + ratio(p)),
        statistic: Box::new(move |r| (1 + draw_f(r, p)).pow(2)),
    });
    probes.push(Probe {
        name: format!("<(1 + f)^2 x y>, p = {p}"),
        target: 2.0 * (1.0 + ratio(p)) * ab,
        statistic: Box::new(move |r| {
            let (x, y) = step_signs(r, &a, &b);
            (1 + draw_f(r, p)).pow(2) * x * y
        }),
    });
    let (p1, p2) = (biases[0], biases[2]);
    probes.push(Probe {
        name: format!("<(1 + f_1)^2 (1 + f_2)^2>, p = {p1}, {p2}"),
        target: 4.0 * (1.0 + ratio(p1)) * (1.0 + ratio(p2)),
        statistic: Box::new(move |r| (1 + draw_f(r, p1)).pow(2) * (1 + draw_f(r, p2)).pow(2)),
    });
    probes
}

/// Monte Carlo checks of the sign and f-bit identities the protocol rests on.
pub fn cmd_primitives_check(config: &PrimitivesConfig) -> Result<PrimitivesReport> {
    if config.samples < 2 {
        return Err(Error::Config("samples must be at least 2".into()));
    }
    if config.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let master = RandomStream::new(config.seed);
    let checks = battery(config.a, config.b)
        .into_iter()
        .enumerate()
        .map(|(i, probe)| {
            let stream = master.split(i as u64);
            let moments = parallel_blocks(config.samples, config.workers, |range| {
                let mut m = IntegerMoments::default();
                for k in range {
                    m.push((probe.statistic)(&mut stream.split(k).generator()));
                }
                m
            })
            .into_iter()
            .fold(IntegerMoments::default(), IntegerMoments::merge);
            let estimate = moments.estimate(1.0)?;
            let z = z_test(&estimate, probe.target).unwrap_or(f64::INFINITY);
            Ok(PrimitiveCheck {
                name: probe.name,
                target: probe.target,
                estimate: estimate.mean,
                std_error: estimate.std_error,
                z,
                passed: z <= SIGMA_BAND,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(PrimitivesReport {
        schema: SCHEMA_VERSION,
        command: "primitives-check",
        samples: config.samples,
        seed: config.seed,
        a: config.a,
        b: config.b,
        sigma_band: SIGMA_BAND,
        checks,
        passed,
    })
}

impl PrimitivesReport {
    /// `name,target,estimate,std_error,z,passed` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,target,estimate,std_error,z,passed\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "\"{}\",{:.10},{:.10},{:.3e},{:.3},{}",
                c.name, c.target, c.estimate, c.std_error, c.z, c.passed
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<44} target {:>9.6} got {:>9.6} +- {:.1e}  z {:>5.2}  {}",
                c.name,
                c.target,
                c.estimate,
                c.std_error,
                c.z,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        out
    }
}
