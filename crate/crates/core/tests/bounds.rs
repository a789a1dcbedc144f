use rmab::harness::{
    centralized_constants, decentralized_constants, theorem1_bound, theorem3_bound, theorem5_bound, BoundInputs,
};
use rmab::{Arm, ArmSpec, CollisionModel, RestlessModel, Tolerances};

const P01: [f64; 5] = [0.1, 0.1, 0.5, 0.1, 0.1];
const P10: [f64; 5] = [0.2, 0.3, 0.1, 0.4, 0.5];
const N: usize = 5;

fn channels_arms() -> Vec<Arm> {
    let tol = Tolerances::default();
    (0..N).map(|k| Arm::new(ArmSpec::two_state(P01[k], P10[k], 0.1, 1.0).unwrap(), &tol).unwrap()).collect()
}

fn inputs(d: f64, m: usize, collision: CollisionModel, restless: RestlessModel) -> BoundInputs {
    BoundInputs::from_arms(&channels_arms(), d, m, collision, restless, Some(10.0)).unwrap()
}

/// Closed-form quantities of the two-state channel arms, computed from the
/// transition probabilities alone and sorted by mean.
struct Oracle {
    mu: Vec<f64>,
    h: Vec<f64>,
    pi_min: f64,
    a_max: f64,
}

fn oracle(l: f64) -> Oracle {
    let mut arms: Vec<(f64, f64)> = (0..N)
        .map(|k| {
            let pi1 = P01[k] / (P01[k] + P10[k]);
            let mu = 0.1 * (1.0 - pi1) + pi1;
            let eps = P01[k] + P10[k];
            let h = (1.0 / 2f64.ln() + 2f64.sqrt() * eps * l.sqrt() / (10.0 * 1.1)) * 2.0;
            (mu, h)
        })
        .collect();
    arms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let pi_min = (0..N)
        .map(|k| {
            let pi1 = P01[k] / (P01[k] + P10[k]);
            pi1.min(1.0 - pi1)
        })
        .fold(f64::INFINITY, f64::min);
    Oracle {
        mu: arms.iter().map(|a| a.0).collect(),
        h: arms.iter().map(|a| a.1).collect(),
        pi_min,
        a_max: 1.1 / pi_min,
    }
}

fn log4(x: f64) -> f64 {
    x.ln() / 4f64.ln()
}

fn eq4(t: f64, d: f64, o: &Oracle) -> f64 {
    let mut c1 = o.a_max;
    for j in 1..N {
        c1 += 3.0 / o.pi_min * (o.mu[0] - o.mu[j]) * (o.h[0] + o.h[j]);
    }
    let c2 = (N as f64 * o.mu[0] - o.mu.iter().sum::<f64>()) / 3.0;
    c1 * log4(1.5 * (t - N as f64) + 1.0).ceil()
        + c2 * (4.0 * (3.0 * d * t.ln() + 1.0) - 1.0)
        + N as f64 * o.a_max * (log4(3.0 * d * t.ln() + 1.0).floor() + 1.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Times whose log₄ arguments are far from integers, so ceil/floor agree
// between the exact helpers and the floating-point oracle.
const TIMES: [u64; 6] = [7, 100, 999, 12_345, 500_000, 98_765_432];

#[test]
fn theorem1_matches_written_formula() {
    let o = oracle(10.0);
    for d in [10.0, 197.53] {
        let inp = inputs(d, 1, CollisionModel::Share, RestlessModel::Endogenous);
        for t in TIMES {
            let got = theorem1_bound(t, &inp).unwrap();
            assert!(rel(got, eq4(t as f64, d, &o)) < 1e-12, "t={t}");
        }
    }
}

#[test]
fn theorem3_reduces_to_theorem1() {
    let inp = inputs(10.0, 1, CollisionModel::Share, RestlessModel::Endogenous);
    for t in TIMES {
        assert_eq!(theorem3_bound(t, &inp).unwrap().to_bits(), theorem1_bound(t, &inp).unwrap().to_bits());
    }
}

#[test]
fn theorem3_c2_for_two_plays() {
    let o = oracle(10.0);
    let k = centralized_constants(&inputs(10.0, 2, CollisionModel::Share, RestlessModel::Endogenous), 2).unwrap();
    let expected = (3.0 * (o.mu[0] + o.mu[1]) - o.mu.iter().sum::<f64>()) / 3.0;
    assert!(rel(k.c2, expected) < 1e-12);
    let mut c1 = 2.0 * o.a_max;
    for j in 0..2 {
        for i in 2..N {
            c1 += 3.0 / o.pi_min * (o.mu[j] - o.mu[i]) * (o.h[j] + o.h[i]);
        }
    }
    assert!(rel(k.c1, c1) < 1e-12);
}

#[test]
fn theorem5_matches_written_formula() {
    let o = oracle(10.0);
    let m = 2usize;
    let w: Vec<f64> = (0..m).map(|j| (0..N).filter(|&i| i != j).map(|i| o.h[i] + o.h[j]).sum()).collect();
    let scale = 3.0 * m as f64 / o.pi_min;
    let top: f64 = o.mu[..m].iter().sum();
    let c3 = (N as f64 * top - m as f64 * o.mu.iter().sum::<f64>()) / 3.0;
    for (collision, restless) in [
        (CollisionModel::Zero, RestlessModel::Endogenous),
        (CollisionModel::Share, RestlessModel::Endogenous),
        (CollisionModel::Zero, RestlessModel::Exogenous),
        (CollisionModel::Share, RestlessModel::Exogenous),
    ] {
        let endo = restless == RestlessModel::Endogenous;
        let mut c1 = match collision {
            CollisionModel::Zero => top * scale * (w[0] + w[1]),
            CollisionModel::Share => scale * (o.mu[0] * w[0] + o.mu[1] * w[1]),
        };
        if endo {
            c1 += (m * m) as f64 * o.a_max;
        }
        let c2 = if endo { (N * m) as f64 * o.a_max } else { 0.0 };
        let inp = inputs(20.0, m, collision, restless);
        for t in TIMES {
            let tf = t as f64;
            let dl = 3.0 * 20.0 * tf.ln() + 1.0;
            let expected = c1 * log4(3.0 * tf / (2.0 * m as f64) + 1.0).ceil()
                + c2 * (log4(dl).floor() + 1.0)
                + c3 * (4.0 * dl - 1.0);
            assert!(rel(theorem5_bound(t, &inp).unwrap(), expected) < 1e-12);
        }
    }
}

#[test]
fn zero_reward_c1_dominates_share() {
    for restless in [RestlessModel::Endogenous, RestlessModel::Exogenous] {
        for m in 1..N {
            let zero = decentralized_constants(&inputs(10.0, m, CollisionModel::Zero, restless)).unwrap();
            let share = decentralized_constants(&inputs(10.0, m, CollisionModel::Share, restless)).unwrap();
            assert!(zero.c1 >= share.c1, "m={m}");
        }
    }
    let last = inputs(10.0, N - 1, CollisionModel::Share, RestlessModel::Endogenous);
    let b = theorem5_bound(10_000, &last).unwrap();
    assert!(b.is_finite() && b > 0.0);
}

#[test]
fn theorem1_growth_approaches_its_limit() {
    let d = 10.0;
    let inp = inputs(d, 1, CollisionModel::Share, RestlessModel::Endogenous);
    let k = centralized_constants(&inp, 1).unwrap();
    let limit = k.c1 / 4f64.ln() + 12.0 * k.c2 * d;
    let a_max = inp.constants.a_max;
    for t in [1u64 << 40, 1 << 50, 1 << 62] {
        let lt = (t as f64).ln();
        let ratio = theorem1_bound(t, &inp).unwrap() / lt;
        // Remainder terms of order 1/ln t.
        let slack = (k.c1 * (1.0 + log4(1.5)) + 3.0 * k.c2 + N as f64 * a_max * (log4(3.0 * d * lt + 1.0) + 1.0)) / lt;
        assert!((ratio - limit).abs() <= slack, "t={t}");
    }
}

#[test]
fn bounds_are_nonnegative_and_monotone_at_epoch_ends() {
    let inp = inputs(10.0, 2, CollisionModel::Share, RestlessModel::Endogenous);
    let ends = [5u64, 25, 105, 425, 937, 2985, 11_177];
    let mut prev = 0.0;
    for t in ends {
        let b = theorem3_bound(t, &inp).unwrap();
        assert!(b >= prev);
        prev = b;
    }
}
