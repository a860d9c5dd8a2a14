//! Exact Riemann solver checked against the jump conditions it must satisfy.

use mprk_euler::riemann::{solve, Primitive, Structure, Wave};
use proptest::prelude::*;

const GAMMA: f64 = 1.4;

fn flux(s: &Primitive, frame: f64) -> [f64; 3] {
    // conserved fluxes in a frame moving with `frame`
    let v = s.u - frame;
    let e = s.p / (GAMMA - 1.0) + 0.5 * s.rho * v * v;
    [s.rho * v, s.rho * v * v + s.p, v * (e + s.p)]
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Residual of the Rankine–Hugoniot conditions across a shock of `speed`.
fn shock_residual(a: &Primitive, b: &Primitive, speed: f64) -> f64 {
    let (fa, fb) = (flux(a, speed), flux(b, speed));
    let scale = [
        a.rho * (a.u - speed).abs().max(1.0),
        fa[1].abs().max(a.p).max(b.p),
        fa[2].abs().max(fb[2].abs()).max((a.p + b.p) * (a.u - speed).abs()).max(1e-300),
    ];
    (0..3).map(|k| (fa[k] - fb[k]).abs() / scale[k]).fold(0.0, f64::max)
}

/// Isentrope and Riemann invariant across a rarefaction.
fn rarefaction_residual(a: &Primitive, b: &Primitive, sign: f64) -> f64 {
    let entropy = relative(a.p / a.rho.powf(GAMMA), b.p / b.rho.powf(GAMMA));
    let c = |s: &Primitive| (GAMMA * s.p / s.rho).sqrt();
    // u ± 2c/(γ-1) is constant, + for a left wave
    let inv = |s: &Primitive| s.u + sign * 2.0 * c(s) / (GAMMA - 1.0);
    let scale = a.u.abs().max(c(a)).max(c(b));
    entropy.max((inv(a) - inv(b)).abs() / scale)
}

fn state() -> impl Strategy<Value = Primitive> {
    (-3.0f64..1.0, -2.0f64..2.0, -3.0f64..1.0).prop_map(|(lr, u, lp)| Primitive::new(10f64.powf(lr), u, 10f64.powf(lp)))
}

fn check_side(outer: &Primitive, star: &Primitive, wave: Wave, sign: f64) -> f64 {
    match wave {
        Wave::Shock { speed } => shock_residual(outer, star, speed),
        Wave::Rarefaction { head, tail } => {
            // the fan opens away from the contact
            assert!(sign * (tail - head) >= -1e-12, "fan head {head} tail {tail}");
            rarefaction_residual(outer, star, sign)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn star_states_satisfy_the_jump_conditions(left in state(), right in state()) {
        let sol = solve(GAMMA, left, right).unwrap();
        match sol.structure {
            Structure::Star { p_star, u_star, rho_star_left, rho_star_right, left_wave, right_wave, .. } => {
                let sl = Primitive::new(rho_star_left, u_star, p_star);
                let sr = Primitive::new(rho_star_right, u_star, p_star);
                let rl = check_side(&left, &sl, left_wave, 1.0);
                let rr = check_side(&right, &sr, right_wave, -1.0);
                prop_assert!(rl <= 1e-9, "left residual {rl:e}");
                prop_assert!(rr <= 1e-9, "right residual {rr:e}");

                // sampling on both sides of the contact: equal p and u
                let a = sol.sample(u_star - 1e-9);
                let b = sol.sample(u_star + 1e-9);
                prop_assert!(relative(a.p, b.p) <= 1e-9 && (a.u - b.u).abs() <= 1e-9 * (1.0 + u_star.abs()));
                prop_assert!(relative(a.rho, rho_star_left) <= 1e-9 && relative(b.rho, rho_star_right) <= 1e-9);
            }
            Structure::Vacuum { left_front, right_front } => {
                prop_assert!(left_front < right_front);
                let mid = sol.sample(0.5 * (left_front + right_front));
                prop_assert_eq!((mid.rho, mid.p), (0.0, 0.0));
            }
        }
        // far field reproduces the data
        prop_assert_eq!(sol.sample(-1e6), left);
        prop_assert_eq!(sol.sample(1e6), right);
    }

    #[test]
    fn fan_interior_is_continuous(left in state(), right in state()) {
        // sampled densities change by small steps through the whole fan
        let sol = solve(GAMMA, left, right).unwrap();
        if let Structure::Star { left_wave: Wave::Rarefaction { head, tail }, .. } = sol.structure {
            let n = 400;
            let values: Vec<_> = (0..=n).map(|k| sol.sample(head + (tail - head) * k as f64 / n as f64)).collect();
            for w in values.windows(2) {
                prop_assert!(relative(w[0].rho, w[1].rho) < 0.05);
            }
            prop_assert!(rarefaction_residual(&values[0], &values[n / 2], 1.0) <= 1e-9);
        }
    }
}

#[test]
fn sod_problem() {
    let sol = solve(GAMMA, Primitive::new(1.0, 0.0, 1.0), Primitive::new(0.125, 0.0, 0.1)).unwrap();
    let Structure::Star { p_star, u_star, left_wave, right_wave, .. } = sol.structure else {
        panic!("expected a star region");
    };
    // reference star state of the classic shock tube
    assert!((p_star - 0.30313).abs() < 1e-5);
    assert!((u_star - 0.92745).abs() < 1e-5);
    assert!(matches!(left_wave, Wave::Rarefaction { .. }));
    assert!(matches!(right_wave, Wave::Shock { speed } if (speed - 1.75216).abs() < 1e-5));
}
