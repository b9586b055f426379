//! Property tests for the attractor invariants.

use mcan_core::attractor::{
    circular_mean_index, fractional_shift, ActivityGrid, Axis, NetworkParams, ShiftCommand,
};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = NetworkParams> {
    (1usize..=6, 2usize..=10, 0.5f64..=1.0, 1e-5f64..2e-3).prop_map(|(a, e, gamma, phi)| {
        NetworkParams::new(a, e, gamma, phi).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_preserves_norm_and_nonnegativity(
        p in params_strategy(),
        dx in -2.5f64..2.5,
        dy in -2.5f64..2.5,
        steps in 1usize..8,
    ) {
        let mut g = ActivityGrid::init_gaussian(48, 48, (24, 24), &p).unwrap();
        let cmd = ShiftCommand::from_real(dx, dy);
        for _ in 0..steps {
            g.step(&cmd, &p).unwrap();
            prop_assert!((g.l2_norm() - 1.0).abs() < 1e-9);
            prop_assert!(g.values().iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn step_commutes_with_toroidal_translation(
        p in params_strategy(),
        tx in 0i64..48,
        ty in 0i64..48,
        dx in -1.5f64..1.5,
    ) {
        let cmd = ShiftCommand::from_real(dx, 0.7);
        let mut a = ActivityGrid::init_gaussian(48, 48, (10, 30), &p).unwrap();
        let mut b = a.translated(tx, ty);
        a.step(&cmd, &p).unwrap();
        b.step(&cmd, &p).unwrap();
        let a_translated = a.translated(tx, ty);
        for (x, y) in a_translated.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-9, "equivariance violated: {x} vs {y}");
        }
    }

    #[test]
    fn shift_copy_conserves_mass(
        p in params_strategy(),
        ix in 0i64..1000,
        iy in 0i64..1000,
    ) {
        let g = ActivityGrid::init_gaussian(40, 40, (20, 20), &p).unwrap();
        let cmd = ShiftCommand { x_int: ix, y_int: iy, x_frac: 0.0, y_frac: 0.0 };
        let shifted = g.shift_copy(&cmd);
        let before: f64 = g.values().iter().filter(|v| **v > 0.0).sum();
        let after: f64 = shifted.iter().sum();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn fractional_shift_at_one_is_integer_shift(
        p in params_strategy(),
        xi in -3i64..3,
        yi in -3i64..3,
    ) {
        let g = ActivityGrid::init_gaussian(40, 40, (13, 27), &p).unwrap();
        let near_one = ShiftCommand { x_int: xi, y_int: yi, x_frac: 1.0 - 1e-12, y_frac: 1.0 - 1e-12 };
        let frac = fractional_shift(&g.shift_copy(&near_one), 40, 40, &near_one, 1.0);
        let exact = ShiftCommand { x_int: xi + 1, y_int: yi + 1, x_frac: 0.0, y_frac: 0.0 };
        let target = g.shift_copy(&exact);
        for (a, b) in frac.iter().zip(&target) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn decode_matches_brute_force(values in proptest::collection::vec(0.0f64..1.0, 3..250)) {
        let total: f64 = values.iter().sum();
        prop_assume!(total > 0.0);
        let n = values.len() as f64;
        let got = circular_mean_index(&values).unwrap();
        let (mut s, mut c) = (0.0, 0.0);
        for (i, w) in values.iter().enumerate() {
            let ang = std::f64::consts::TAU * i as f64 / n;
            s += w * ang.sin();
            c += w * ang.cos();
        }
        let mut want = n / std::f64::consts::TAU * s.atan2(c);
        if want < 0.0 {
            want += n;
        }
        let err = (got - want).abs();
        prop_assert!(err.min(n - err) < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn shift_command_split_is_exact(dx in -1e6f64..1e6, dy in -1e6f64..1e6) {
        let cmd = ShiftCommand::from_real(dx, dy);
        prop_assert!((0.0..1.0).contains(&cmd.x_frac));
        prop_assert!((0.0..1.0).contains(&cmd.y_frac));
        prop_assert_eq!(cmd.x(), dx);
        prop_assert_eq!(cmd.y(), dy);
    }
}

#[test]
fn zero_velocity_bump_is_stationary_long_run() {
    let p = NetworkParams::new(3, 10, 1.0, 0.0001).unwrap();
    let mut g = ActivityGrid::init_gaussian(100, 100, (50, 50), &p).unwrap();
    for _ in 0..1000 {
        g.step(&ShiftCommand::zero(), &p).unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-9);
    }
    let x = g.decode(Axis::X).unwrap();
    let y = g.decode(Axis::Y).unwrap();
    assert!((x - 50.0).abs() < 1.0 && (y - 50.0).abs() < 1.0, "drifted to ({x}, {y})");
}
