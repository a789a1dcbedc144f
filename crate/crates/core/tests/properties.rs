use proptest::prelude::*;
use rmab::config::{ArmConfig, DConfig, ExperimentConfig, PassiveKind, PolicyConfig, RunConfig, TwoState};
use rmab::dsee::{exploration_quota, required_d, EpochSchedule, EpochShape};
use rmab::harness::{rank_by_mean, run_episode, InitialStates, PolicyKind, Scenario};
use rmab::{Arm, ArmSpec, CollisionModel, DParameter, RestlessModel, SystemConstants, Tolerances};

fn two_state_arm(p01: f64, p10: f64, r1: f64) -> Arm {
    Arm::new(ArmSpec::two_state(p01, p10, 0.1, r1).unwrap(), &Tolerances::default()).unwrap()
}

fn arm_params() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.05f64..0.95, 0.05f64..0.95, 0.2f64..3.0), 2..6)
}

fn dsee(arms: Vec<Arm>, d: f64, horizon: u64) -> Scenario {
    Scenario {
        arms,
        policy: PolicyKind::Dsee,
        m: 1,
        d: DParameter::Fixed(d),
        l: None,
        collision: CollisionModel::Share,
        restless: RestlessModel::Endogenous,
        join_slots: Vec::new(),
        pilots: None,
        oracle_ranking: false,
        initial: InitialStates::Stationary,
        horizon,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_state_stationary_law(p01 in 0.01f64..0.99, p10 in 0.01f64..0.99) {
        let arm = two_state_arm(p01, p10, 1.0);
        let pi1 = p01 / (p01 + p10);
        prop_assert!((arm.diagnostics().pi[1] - pi1).abs() < 1e-12);
        prop_assert!((arm.diagnostics().gap - (p01 + p10)).abs() < 1e-12);
    }

    #[test]
    fn sorted_means_ignore_arm_order(params in arm_params(), rot in 0usize..5) {
        let arms: Vec<Arm> = params.iter().map(|&(a, b, r)| two_state_arm(a, b, r)).collect();
        let mut rotated = arms.clone();
        let k = rot % rotated.len();
        rotated.rotate_left(k);
        let sorted = |xs: &[Arm]| -> Vec<f64> { rank_by_mean(xs).iter().map(|&i| xs[i].mu()).collect() };
        prop_assert_eq!(sorted(&arms), sorted(&rotated));
    }

    #[test]
    fn required_d_is_scale_invariant(params in arm_params(), c in 0.1f64..10.0) {
        let arms: Vec<Arm> = params.iter().map(|&(a, b, r)| two_state_arm(a, b, r)).collect();
        let scaled: Vec<Arm> = arms
            .iter()
            .map(|a| Arm::new(a.spec().scaled(c).unwrap(), &Tolerances::default()).unwrap())
            .collect();
        let d_of = |xs: &[Arm]| {
            let order = rank_by_mean(xs);
            let gap = xs[order[0]].mu() - xs[order[1]].mu();
            required_d(SystemConstants::from_arms(xs).unwrap().l_value, gap)
        };
        if let (Ok(a), Ok(b)) = (d_of(&arms), d_of(&scaled)) {
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn reward_scaling_keeps_dsee_actions(params in arm_params(), c in 0.5f64..4.0, seed in 0u64..1000) {
        let arms: Vec<Arm> = params.iter().map(|&(a, b, r)| two_state_arm(a, b, r)).collect();
        let scaled: Vec<Arm> = arms
            .iter()
            .map(|a| Arm::new(a.spec().scaled(c).unwrap(), &Tolerances::default()).unwrap())
            .collect();
        let a = run_episode(&dsee(arms, 2.0, 400), seed).unwrap();
        let b = run_episode(&dsee(scaled, 2.0, 400), seed).unwrap();
        prop_assert_eq!(a.actions, b.actions);
    }

    #[test]
    fn epoch_counts_stay_below_caps(d in 0.0f64..50.0, n in 1usize..8, horizon in 1u64..20_000) {
        let shape = EpochShape::centralized(n, 1);
        let dp = DParameter::Fixed(d);
        let mut s = EpochSchedule::new(shape);
        for _ in 1..horizon {
            s.advance(&dp);
        }
        let t = s.t() as f64;
        if t >= 2.0 {
            let cap_o = ((3.0 * d * t.ln() + 1.0).ln() / 4f64.ln()).floor() as u32 + 1;
            prop_assert!(s.n_o() <= cap_o.max(1));
        }
        if t > n as f64 {
            let cap_i = ((1.5 * (t - n as f64) + 1.0).ln() / 4f64.ln()).ceil() as u32;
            prop_assert!(s.n_i() <= cap_i);
        }
        prop_assert_eq!(exploration_quota(s.n_o()), (4u64.pow(s.n_o()) - 1) / 3);
    }

    #[test]
    fn config_round_trips(
        params in arm_params(),
        d in prop_oneof![
            (0.0f64..500.0).prop_map(DConfig::Fixed),
            Just(DConfig::Preset(rmab::config::DPreset::LnLn)),
            prop::collection::vec((1u64..1000, 0.0f64..10.0), 1..4).prop_map(DConfig::Table),
        ],
        horizon in 1u64..1_000_000,
        runs in 1usize..1000,
        seed in 0u64..=i64::MAX as u64,
        l in prop::option::of(0.0f64..100.0),
    ) {
        let cfg = ExperimentConfig {
            name: Some("prop".into()),
            policy: PolicyConfig {
                kind: PolicyKind::Dsee,
                plays: 1,
                d,
                l,
                collision: None,
                restless: RestlessModel::Exogenous,
                join_slots: Vec::new(),
                pilot_states: None,
                oracle_ranking: false,
            },
            run: RunConfig {
                horizon,
                runs,
                base_seed: seed,
                initial: Default::default(),
                sampling: Default::default(),
            },
            numerics: Tolerances::default(),
            arms: params
                .iter()
                .map(|&(p01, p10, r)| ArmConfig {
                    two_state: Some(TwoState { p01, p10 }),
                    matrix_file: None,
                    transition: None,
                    rewards: vec![0.1, r],
                    reward_scale: None,
                    passive: PassiveKind::default(),
                    passive_transition: None,
                })
                .collect(),
        };
        let text = cfg.canonical();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.digest(), cfg.digest());
    }
}
