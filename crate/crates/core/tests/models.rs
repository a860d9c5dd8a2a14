//! Model formulas against values from an independent scalar evaluation
//! (a short double-precision script run outside this crate), plus
//! algebraic properties on random states.

use approx::assert_relative_eq;
use mprk_euler::models::{GasModel, IdealGas, ReactionConstants, ReactiveMixture};
use proptest::prelude::*;

const LEFT_DENSITIES: [f64; 3] = [5.251896311257205e-5, 3.748071704863518e-5, 2.962489471973072e-4];

fn left_state(mix: &ReactiveMixture) -> [f64; 5] {
    mix.conservative(LEFT_DENSITIES, 0.0, 1e3)
}

#[test]
fn reactive_left_state_against_scalar_oracle() {
    let mix = ReactiveMixture::new(ReactionConstants::default().with_delta(1e4));
    let u = left_state(&mix);
    assert_relative_eq!(u[4], 2396.1535398095994, max_relative = 1e-13);
    assert_relative_eq!(mix.pressure(&u).unwrap(), 1e3, max_relative = 1e-12);
    assert_relative_eq!(mix.temperature(&u).unwrap(), 231.7622898954703, max_relative = 1e-12);
    assert_relative_eq!(mix.gamma(&u).unwrap(), 1.633750472207894, max_relative = 1e-13);
    assert_relative_eq!(mix.sound_speed(&u).unwrap(), 2056.645257939211, max_relative = 1e-12);

    let s = mix.source(&u).unwrap().unwrap();
    assert_relative_eq!(s.production[0], 3.303140151878499e-102, max_relative = 1e-9);
    assert_relative_eq!(s.destruction[0], 8.644363131432055e62, max_relative = 1e-9);
}

#[test]
fn reactive_left_state_with_molar_gas_constant() {
    // with R = 8.314 both species fluxes nearly balance: the data is close
    // to chemical equilibrium at about 8000 K
    let mix = ReactiveMixture::new(ReactionConstants::default().with_delta(1e4).with_gas_constant(8.314));
    let u = left_state(&mix);
    assert_relative_eq!(mix.temperature(&u).unwrap(), 8000.454318017799, max_relative = 1e-12);
    let s = mix.source(&u).unwrap().unwrap();
    assert_relative_eq!(s.production[0], 14574.685846469201, max_relative = 1e-10);
    assert_relative_eq!(s.destruction[0], 14642.073388106606, max_relative = 1e-10);
}

#[test]
fn forward_rate_at_ten_thousand_kelvin() {
    let (kf, _) = ReactionConstants::default().rate_coefficients(1e4);
    assert_relative_eq!(kf, 7370356.0516296895, max_relative = 1e-13);
}

#[test]
fn rates_stay_finite_in_log_space_when_cold() {
    // k_b overflows below about 150 K while its logarithm stays usable
    let k = ReactionConstants::default();
    let (ln_kf, ln_kb) = k.log_rate_coefficients(80.0);
    assert!(ln_kf.is_finite() && ln_kb.is_finite() && ln_kb > 709.0);
    let mix = ReactiveMixture::new(k.with_delta(1e4));
    // cold state, species 1 already gone: no NaN from inf * 0
    let u = mix.conservative([0.0, 1e-3, 1e-3], 0.0, 10.0);
    let s = mix.source(&u).unwrap().unwrap();
    assert_eq!(s.destruction[0], 0.0);
    assert!(s.production[0] >= 0.0);
}

#[test]
fn single_gas_examples() {
    let gas = IdealGas::default();
    assert_relative_eq!(gas.pressure(&[1.0, 0.0, 2.5]).unwrap(), 1.0, max_relative = 1e-15);
    assert_relative_eq!(gas.pressure(&[1.0, 1.0, 5.5]).unwrap(), 2.0, max_relative = 1e-15);
    assert_relative_eq!(gas.pressure(&[1.0, 20.0, 207.5]).unwrap(), 3.0, max_relative = 1e-13);
    assert_eq!(gas.conservative(1.0, -20.0, 0.4), [1.0, -20.0, 201.0]);
    assert_relative_eq!(gas.sound_speed(&gas.conservative(1.0, 0.0, 1.0)).unwrap(), 1.4f64.sqrt());
}

#[test]
fn contact_state_flux_relation() {
    let gas = IdealGas::default();
    let f = gas.flux(&gas.conservative(1.0, 20.0, 3.0)).unwrap();
    assert_relative_eq!(f[1], 20.0 * f[0] + 3.0, max_relative = 1e-15);
}

fn valid_single() -> impl Strategy<Value = (f64, f64, f64)> {
    (1e-3f64..1e3, -50.0f64..50.0, 1e-3f64..1e3)
}

fn valid_multi() -> impl Strategy<Value = ([f64; 3], f64, f64)> {
    (prop::array::uniform3(1e-8f64..1e-2), -100.0f64..100.0, 1e-1f64..1e4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn single_pressure_round_trip((rho, u, p) in valid_single()) {
        let gas = IdealGas::default();
        let back = gas.pressure(&gas.conservative(rho, u, p)).unwrap();
        prop_assert!((back - p).abs() <= 1e-12 * p.max(0.5 * rho * u * u));
    }
}

proptest! {
    #[test]
    fn single_sound_speed_is_scale_invariant((rho, _, p) in valid_single(), lambda in 1e-3f64..1e3) {
        // at rest, so no kinetic energy cancels in the pressure recovery
        let gas = IdealGas::default();
        let c = gas.sound_speed(&gas.conservative(rho, 0.0, p)).unwrap();
        let scaled = gas.sound_speed(&gas.conservative(lambda * rho, 0.0, lambda * p)).unwrap();
        prop_assert!((c - scaled).abs() <= 1e-12 * c);
    }

    #[test]
    fn multi_primitive_round_trip((d, u, p) in valid_multi()) {
        let mix = ReactiveMixture::default();
        let cons = mix.conservative(d, u, p);
        let prim = mix.to_primitive(&cons).unwrap();
        prop_assert!((prim.pressure - p).abs() <= 1e-9 * p.max(mix.constants.formation_enthalpy * d[0]));
        prop_assert!((prim.velocity - u).abs() <= 1e-14 * u.abs().max(1.0));
    }

    #[test]
    fn source_is_mass_conservative_bitwise((d, u, p) in valid_multi(), r in prop::sample::select(vec![287.0, 8.314])) {
        let mix = ReactiveMixture::new(ReactionConstants::default().with_delta(1e4).with_gas_constant(r));
        let s = mix.source(&mix.conservative(d, u, p)).unwrap().unwrap();
        prop_assert_eq!(s.production[1].to_bits(), s.destruction[0].to_bits());
        prop_assert_eq!(s.destruction[1].to_bits(), s.production[0].to_bits());
        prop_assert!(s.production.iter().chain(&s.destruction).all(|v| *v >= 0.0));
    }

    #[test]
    fn equilibrium_identity(t in 300.0f64..2e4) {
        let k = ReactionConstants::default();
        let (kf, kb) = k.rate_coefficients(t);
        prop_assert!((kb * k.equilibrium_exponent(t).exp() - kf).abs() <= 1e-12 * kf);
    }
}
