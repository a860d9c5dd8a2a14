//! Gas models for the single-species and the three-species reactive Euler
//! equations.
//!
//! Conservative states are plain arrays. A single-species state is
//! `[rho, rho*u, rho*E]`; a three-species state is
//! `[rho1, rho2, rho3, rho*u, rho*E]`. Every model exposes the same
//! [`GasModel`] surface so the flux and time-integration layers can be
//! written once for both systems.

use thiserror::Error;

/// Ratio of specific heats for the single-species (air) model.
pub const GAMMA_AIR: f64 = 1.4;

/// Largest number of density components a model may carry.
pub const MAX_SPECIES: usize = 3;

/// Single-species conservative state `[rho, rho*u, rho*E]`.
pub type SingleState = [f64; 3];

/// Three-species conservative state `[rho1, rho2, rho3, rho*u, rho*E]`.
pub type MultiState = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModelError {
    #[error("non-positive density {value:e} in component {component}")]
    NonPositiveDensity { component: usize, value: f64 },
    #[error("non-positive pressure {0:e}")]
    NonPositivePressure(f64),
    #[error("state contains non-finite values")]
    NonFinite,
}

/// Primitive view of a state: species densities, velocity and pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimState {
    pub densities: Vec<f64>,
    pub velocity: f64,
    pub pressure: f64,
}

impl PrimState {
    pub fn new(densities: &[f64], velocity: f64, pressure: f64) -> Self {
        Self { densities: densities.to_vec(), velocity, pressure }
    }

    pub fn total_density(&self) -> f64 {
        self.densities.iter().sum()
    }
}

/// Production/destruction split of the reaction source of species 1 and 2.
///
/// `production[k] - destruction[k]` is the net source of species `k`.
/// The reaction only exchanges mass between the two species, so
/// `production[1] == destruction[0]` and `destruction[1] == production[0]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SourceSplit {
    pub production: [f64; 2],
    pub destruction: [f64; 2],
}

impl SourceSplit {
    /// Net source `[S1, S2]`.
    pub fn net(&self) -> [f64; 2] {
        [self.production[0] - self.destruction[0], self.production[1] - self.destruction[1]]
    }

    pub fn scaled_add(&mut self, coef: f64, other: &SourceSplit) {
        // an infinite rate must not turn into NaN through a zero weight
        if coef == 0.0 {
            return;
        }
        for k in 0..2 {
            self.production[k] += coef * other.production[k];
            self.destruction[k] += coef * other.destruction[k];
        }
    }
}

/// Common interface of the Euler gas models.
///
/// Components `0..SPECIES` are partial densities, followed by momentum and
/// total energy.
pub trait GasModel<const N: usize>: Send + Sync {
    /// Number of density components.
    const SPECIES: usize;
    const MOMENTUM: usize = N - 2;
    const ENERGY: usize = N - 1;

    /// Equation of state. The result may be non-positive for unphysical
    /// states; only the densities are validated.
    fn pressure(&self, u: &[f64; N]) -> Result<f64, ModelError>;

    /// Speed of sound; fails for non-positive pressure.
    fn sound_speed(&self, u: &[f64; N]) -> Result<f64, ModelError>;

    fn to_primitive(&self, u: &[f64; N]) -> Result<PrimState, ModelError>;

    fn to_conservative(&self, prim: &PrimState) -> Result<[f64; N], ModelError>;

    /// Conservative state of the primitive array `(rho_1.., u, p)`; no
    /// validation.
    fn conservative_from_array(&self, v: &[f64; N]) -> [f64; N];

    /// Primitive array `(rho_1.., u, p)` of a state.
    fn primitive_array(&self, u: &[f64; N]) -> Result<[f64; N], ModelError> {
        let mut v = *u;
        v[Self::MOMENTUM] = self.velocity(u);
        v[Self::ENERGY] = self.pressure(u)?;
        Ok(v)
    }

    /// Reaction source split, `None` for models without a source.
    fn source(&self, _u: &[f64; N]) -> Result<Option<SourceSplit>, ModelError> {
        Ok(None)
    }

    fn has_source(&self) -> bool {
        false
    }

    fn total_density(&self, u: &[f64; N]) -> f64 {
        u[..Self::SPECIES].iter().sum()
    }

    fn velocity(&self, u: &[f64; N]) -> f64 {
        u[Self::MOMENTUM] / self.total_density(u)
    }

    /// Physical flux `(rho_k u, rho u^2 + p, u (rho E + p))`.
    fn flux(&self, u: &[f64; N]) -> Result<[f64; N], ModelError> {
        let p = self.pressure(u)?;
        let vel = self.velocity(u);
        let mut f = [0.0; N];
        for k in 0..Self::SPECIES {
            f[k] = u[k] * vel;
        }
        f[Self::MOMENTUM] = u[Self::MOMENTUM] * vel + p;
        f[Self::ENERGY] = vel * (u[Self::ENERGY] + p);
        Ok(f)
    }
}

/// Partial densities may vanish (they underflow near chemical
/// equilibrium); the total must stay positive.
fn check_densities(densities: &[f64]) -> Result<(), ModelError> {
    for (component, &value) in densities.iter().enumerate() {
        if !value.is_finite() {
            return Err(ModelError::NonFinite);
        }
        if value < 0.0 {
            return Err(ModelError::NonPositiveDensity { component, value });
        }
    }
    let total: f64 = densities.iter().sum();
    if total <= 0.0 {
        return Err(ModelError::NonPositiveDensity { component: 0, value: total });
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<(), ModelError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ModelError::NonFinite)
    }
}

/// Calorically perfect single-species gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    pub gamma: f64,
}

impl Default for IdealGas {
    fn default() -> Self {
        Self { gamma: GAMMA_AIR }
    }
}

impl IdealGas {
    pub fn new(gamma: f64) -> Self {
        Self { gamma }
    }

    /// `(rho, u, p)` to `[rho, rho u, rho E]`.
    pub fn conservative(&self, rho: f64, u: f64, p: f64) -> SingleState {
        [rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u * u]
    }
}

impl GasModel<3> for IdealGas {
    const SPECIES: usize = 1;

    fn conservative_from_array(&self, v: &SingleState) -> SingleState {
        self.conservative(v[0], v[1], v[2])
    }

    fn pressure(&self, u: &SingleState) -> Result<f64, ModelError> {
        check_finite(u)?;
        check_densities(&u[..1])?;
        let [rho, mom, ene] = *u;
        Ok((self.gamma - 1.0) * (ene - mom * mom / (2.0 * rho)))
    }

    fn sound_speed(&self, u: &SingleState) -> Result<f64, ModelError> {
        let p = self.pressure(u)?;
        if p <= 0.0 {
            return Err(ModelError::NonPositivePressure(p));
        }
        Ok((self.gamma * p / u[0]).sqrt())
    }

    fn to_primitive(&self, u: &SingleState) -> Result<PrimState, ModelError> {
        let p = self.pressure(u)?;
        Ok(PrimState::new(&[u[0]], u[1] / u[0], p))
    }

    fn to_conservative(&self, prim: &PrimState) -> Result<SingleState, ModelError> {
        check_densities(&prim.densities)?;
        check_finite(&[prim.velocity, prim.pressure])?;
        Ok(self.conservative(prim.densities[0], prim.velocity, prim.pressure))
    }
}

/// Constants of the three-species dissociation/recombination model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionConstants {
    /// Molar masses `M1, M2, M3`.
    pub molar_mass: [f64; 3],
    pub gas_constant: f64,
    /// Rate prefactor `C`.
    pub rate_prefactor: f64,
    /// Activation temperature `Ê`.
    pub activation_temperature: f64,
    /// Equilibrium-fit coefficients `b1..b5`.
    pub equilibrium_fit: [f64; 5],
    /// Formation enthalpy `h1⁰` of species 1.
    pub formation_enthalpy: f64,
    /// Inverse reaction characteristic time; multiplies the whole source.
    pub delta: f64,
}

impl Default for ReactionConstants {
    fn default() -> Self {
        Self {
            molar_mass: [0.016, 0.032, 0.028],
            gas_constant: 287.0,
            rate_prefactor: 2.9e17,
            activation_temperature: 59750.0,
            equilibrium_fit: [2.85, 0.988, -6.181, -0.023, -0.001],
            formation_enthalpy: 1.558e7,
            delta: 0.0,
        }
    }
}

impl ReactionConstants {
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_gas_constant(mut self, gas_constant: f64) -> Self {
        self.gas_constant = gas_constant;
        self
    }

    /// Exponent `b1 + b2 ln z + b3 z + b4 z² + b5 z³` with `z = 10⁴ / T`.
    pub fn equilibrium_exponent(&self, temperature: f64) -> f64 {
        let z = 1e4 / temperature;
        let [b1, b2, b3, b4, b5] = self.equilibrium_fit;
        b1 + b2 * z.ln() + b3 * z + b4 * z * z + b5 * z * z * z
    }

    /// Natural logarithms of `(k_f, k_b)`; finite wherever `T > 0`, even
    /// where the coefficients themselves over- or underflow.
    pub fn log_rate_coefficients(&self, temperature: f64) -> (f64, f64) {
        let t = temperature;
        let ln_kf = self.rate_prefactor.ln() - 2.0 * t.ln() - self.activation_temperature / t;
        (ln_kf, ln_kf - self.equilibrium_exponent(t))
    }

    /// Forward and backward rate coefficients `(k_f, k_b)`.
    pub fn rate_coefficients(&self, temperature: f64) -> (f64, f64) {
        let (ln_kf, ln_kb) = self.log_rate_coefficients(temperature);
        (ln_kf.exp(), ln_kb.exp())
    }
}

/// Three-species reactive gas mixture.
///
/// `energy_coefficients` are the per-species internal-energy factors
/// `c_s` in `e_s = c_s R T / M_s`; they enter both the equation of state
/// and the ratio of specific heats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactiveMixture {
    pub constants: ReactionConstants,
    pub energy_coefficients: [f64; 3],
}

impl Default for ReactiveMixture {
    fn default() -> Self {
        Self::new(ReactionConstants::default())
    }
}

impl ReactiveMixture {
    pub fn new(constants: ReactionConstants) -> Self {
        Self { constants, energy_coefficients: [1.5, 2.5, 1.5] }
    }

    /// `Σ rho_s / M_s`.
    pub fn moles(&self, densities: &[f64]) -> f64 {
        densities.iter().zip(self.constants.molar_mass).map(|(rho, m)| rho / m).sum()
    }

    /// `Σ c_s rho_s / M_s`.
    fn weighted_moles(&self, densities: &[f64]) -> f64 {
        densities
            .iter()
            .zip(self.constants.molar_mass)
            .zip(self.energy_coefficients)
            .map(|((rho, m), c)| c * rho / m)
            .sum()
    }

    /// `rho E - rho1 h1⁰ - m² / (2 rho)`.
    pub fn thermal_energy(&self, u: &MultiState) -> f64 {
        let rho = u[0] + u[1] + u[2];
        u[4] - u[0] * self.constants.formation_enthalpy - u[3] * u[3] / (2.0 * rho)
    }

    pub fn temperature(&self, u: &MultiState) -> Result<f64, ModelError> {
        let p = self.pressure(u)?;
        if p <= 0.0 {
            return Err(ModelError::NonPositivePressure(p));
        }
        Ok(p / (self.constants.gas_constant * self.moles(&u[..3])))
    }

    /// `γ = 1 + p / (T Σ rho_s e_s'(T))`.
    pub fn gamma(&self, u: &MultiState) -> Result<f64, ModelError> {
        let p = self.pressure(u)?;
        let t = self.temperature(u)?;
        let heat_capacity = self.constants.gas_constant * self.weighted_moles(&u[..3]);
        Ok(1.0 + p / (t * heat_capacity))
    }

    pub fn conservative(&self, densities: [f64; 3], u: f64, p: f64) -> MultiState {
        let rho: f64 = densities.iter().sum();
        let thermal = p * self.weighted_moles(&densities) / self.moles(&densities);
        [
            densities[0],
            densities[1],
            densities[2],
            rho * u,
            thermal + densities[0] * self.constants.formation_enthalpy + 0.5 * rho * u * u,
        ]
    }
}

impl GasModel<5> for ReactiveMixture {
    const SPECIES: usize = 3;

    fn conservative_from_array(&self, v: &MultiState) -> MultiState {
        self.conservative([v[0], v[1], v[2]], v[3], v[4])
    }

    fn pressure(&self, u: &MultiState) -> Result<f64, ModelError> {
        check_finite(u)?;
        check_densities(&u[..3])?;
        let ratio = self.moles(&u[..3]) / self.weighted_moles(&u[..3]);
        Ok(ratio * self.thermal_energy(u))
    }

    fn sound_speed(&self, u: &MultiState) -> Result<f64, ModelError> {
        let p = self.pressure(u)?;
        if p <= 0.0 {
            return Err(ModelError::NonPositivePressure(p));
        }
        let gamma = self.gamma(u)?;
        Ok((gamma * p / (u[0] + u[1] + u[2])).sqrt())
    }

    fn to_primitive(&self, u: &MultiState) -> Result<PrimState, ModelError> {
        let p = self.pressure(u)?;
        Ok(PrimState::new(&u[..3], self.velocity(u), p))
    }

    fn to_conservative(&self, prim: &PrimState) -> Result<MultiState, ModelError> {
        check_densities(&prim.densities)?;
        check_finite(&[prim.velocity, prim.pressure])?;
        let d = [prim.densities[0], prim.densities[1], prim.densities[2]];
        Ok(self.conservative(d, prim.velocity, prim.pressure))
    }

    fn source(&self, u: &MultiState) -> Result<Option<SourceSplit>, ModelError> {
        let k = &self.constants;
        if k.delta == 0.0 {
            return Ok(Some(SourceSplit::default()));
        }
        let t = self.temperature(u)?;
        // products are formed in log space: at low temperature k_b overflows
        // while the species-1 concentration underflows
        let (ln_kf, ln_kb) = k.log_rate_coefficients(t);
        let ln_common = (k.delta * 2.0 * k.molar_mass[0] * self.moles(&u[..3])).ln();
        let production = (ln_common + ln_kf + (u[1] / k.molar_mass[1]).ln()).exp();
        let destruction = (ln_common + ln_kb + 2.0 * (u[0] / k.molar_mass[0]).ln()).exp();
        // an overflowing rate stays +inf: the reaction then completes within
        // any step, a limit the Patankar solve handles
        if production.is_nan() || destruction.is_nan() {
            return Err(ModelError::NonFinite);
        }
        Ok(Some(SourceSplit { production: [production, destruction], destruction: [destruction, production] }))
    }

    fn has_source(&self) -> bool {
        true
    }
}
