//! Uniform grid, ghost cells, minmod reconstruction and the local
//! Lax–Friedrichs (Rusanov) interface flux with its weighted/unweighted
//! split of the momentum and energy fluxes.

use thiserror::Error;

use crate::models::{GasModel, ModelError, MAX_SPECIES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error("empty or inverted domain [{0}, {1}]")]
    BadDomain(f64, f64),
}

/// Uniform grid of `cells` cells on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub cells: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, cells: usize) -> Result<Self, GridError> {
        if cells < 2 {
            return Err(GridError::TooFewCells(cells));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(GridError::BadDomain(a, b));
        }
        Ok(Self { a, b, cells })
    }

    pub fn dx(&self) -> f64 {
        (self.b - self.a) / self.cells as f64
    }

    /// Position of interface `j`, `j = 0..=cells`.
    pub fn interface(&self, j: usize) -> f64 {
        self.a + j as f64 * self.dx()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Homogeneous Neumann: the ghost cell copies the adjacent interior cell.
    Neumann,
}

/// Spatial reconstruction of the interface states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    /// Cell averages on both sides of each interface.
    Constant,
    /// Component-wise minmod-limited linear reconstruction of the
    /// primitive variables `(rho_k, u, p)`.
    Minmod,
    /// Component-wise minmod-limited linear reconstruction of the
    /// conservative variables.
    MinmodConservative,
}

/// `(<g>, [[g]])` of two values: the arithmetic mean and the jump right minus left.
#[inline]
pub fn mean_jump(left: f64, right: f64) -> (f64, f64) {
    (0.5 * (left + right), right - left)
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Cells extended with one ghost cell per side.
pub fn fill_ghosts<const N: usize>(cells: &[[f64; N]], boundary: Boundary) -> Vec<[f64; N]> {
    let n = cells.len();
    let mut out = Vec::with_capacity(n + 2);
    let (left, right) = match boundary {
        Boundary::Periodic => (cells[n - 1], cells[0]),
        Boundary::Neumann => (cells[0], cells[n - 1]),
    };
    out.push(left);
    out.extend_from_slice(cells);
    out.push(right);
    out
}

/// Left and right states of every interface `j = 0..=cells`.
pub type Traces<const N: usize> = Vec<([f64; N], [f64; N])>;

/// Minmod-limited traces. Ghost cells reuse the periodic image's slope or
/// carry a zero slope under Neumann conditions.
pub fn minmod_reconstruct<const N: usize>(cells: &[[f64; N]], boundary: Boundary) -> Traces<N> {
    let n = cells.len();
    let ext = fill_ghosts(cells, boundary);
    // half slopes of the interior cells, in conservative variables
    let half: Vec<[f64; N]> = (1..=n)
        .map(|i| {
            let mut s = [0.0; N];
            for c in 0..N {
                s[c] = 0.5 * minmod(ext[i][c] - ext[i - 1][c], ext[i + 1][c] - ext[i][c]);
            }
            s
        })
        .collect();
    let ghost_half = |i: usize| -> [f64; N] {
        match boundary {
            Boundary::Periodic => half[i],
            Boundary::Neumann => [0.0; N],
        }
    };
    let plus = |u: &[f64; N], s: &[f64; N]| -> [f64; N] { std::array::from_fn(|c| u[c] + s[c]) };
    let minus = |u: &[f64; N], s: &[f64; N]| -> [f64; N] { std::array::from_fn(|c| u[c] - s[c]) };

    (0..=n)
        .map(|j| {
            let left = if j == 0 { plus(&ext[0], &ghost_half(n - 1)) } else { plus(&ext[j], &half[j - 1]) };
            let right = if j == n { minus(&ext[n + 1], &ghost_half(0)) } else { minus(&ext[j + 1], &half[j]) };
            (left, right)
        })
        .collect()
}

/// Minmod traces of the primitive variables, returned as conservative
/// states. Density and pressure traces stay between neighbouring cell
/// values and are therefore positive.
pub fn minmod_reconstruct_primitive<M: GasModel<N>, const N: usize>(
    model: &M,
    cells: &[[f64; N]],
    boundary: Boundary,
) -> Result<Traces<N>, InterfaceError> {
    let prim = cells
        .iter()
        .enumerate()
        .map(|(i, u)| model.primitive_array(u).map_err(|source| InterfaceError { interface: i, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(minmod_reconstruct(&prim, boundary)
        .into_iter()
        .map(|(l, r)| (model.conservative_from_array(&l), model.conservative_from_array(&r)))
        .collect())
}

/// Interface states for the chosen reconstruction.
pub fn interface_states<M: GasModel<N>, const N: usize>(
    model: &M,
    cells: &[[f64; N]],
    boundary: Boundary,
    reconstruction: Reconstruction,
) -> Result<Traces<N>, InterfaceError> {
    Ok(match reconstruction {
        Reconstruction::Constant => {
            let ext = fill_ghosts(cells, boundary);
            ext.windows(2).map(|w| (w[0], w[1])).collect()
        }
        Reconstruction::Minmod => minmod_reconstruct_primitive(model, cells, boundary)?,
        Reconstruction::MinmodConservative => minmod_reconstruct(cells, boundary),
    })
}

/// Weighted (`F^w`) and unweighted (`F^u`) parts of the momentum and energy
/// numerical fluxes. Index 0 is momentum, 1 is energy; `weighted[k]` is the
/// part carried by species `k`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FluxSplit {
    pub weighted: [[f64; 2]; MAX_SPECIES],
    pub unweighted: [f64; 2],
}

/// Numerical flux through one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFlux<const N: usize> {
    pub flux: [f64; N],
    pub alpha: f64,
    pub split: FluxSplit,
}

/// `α = max{|u_L| + c_L, |u_R| + c_R, |<u>| + c(<U>)}` where `<U>` is the
/// arithmetic mean of the conservative states.
pub fn llf_alpha<M: GasModel<N>, const N: usize>(
    model: &M,
    left: &[f64; N],
    right: &[f64; N],
) -> Result<f64, ModelError> {
    let mean: [f64; N] = std::array::from_fn(|c| 0.5 * (left[c] + right[c]));
    let a_left = model.velocity(left).abs() + model.sound_speed(left)?;
    let a_right = model.velocity(right).abs() + model.sound_speed(right)?;
    let a_mean = model.velocity(&mean).abs() + model.sound_speed(&mean)?;
    Ok(a_left.max(a_right).max(a_mean))
}

/// `<F(U)> - α/2 [[U]]`.
pub fn llf_flux<M: GasModel<N>, const N: usize>(
    model: &M,
    left: &[f64; N],
    right: &[f64; N],
) -> Result<[f64; N], ModelError> {
    Ok(interface_flux(model, left, right)?.flux)
}

/// Full LLF flux, wave speed and flux split at one interface.
pub fn interface_flux<M: GasModel<N>, const N: usize>(
    model: &M,
    left: &[f64; N],
    right: &[f64; N],
) -> Result<InterfaceFlux<N>, ModelError> {
    let alpha = llf_alpha(model, left, right)?;
    let fl = model.flux(left)?;
    let fr = model.flux(right)?;
    let flux = std::array::from_fn(|c| 0.5 * (fl[c] + fr[c]) - 0.5 * alpha * (right[c] - left[c]));
    let split = split_flux(model, left, right, alpha)?;
    Ok(InterfaceFlux { flux, alpha, split })
}

/// Split of the momentum and energy LLF fluxes.
///
/// For every species `k`:
/// `F^{w,k}_mom = <rho_k u²> - α/2 [[rho_k u]]`,
/// `F^{w,k}_ene = <rho_k u³/2> - α/2 [[rho_k u²/2]]`, and
/// `F^u_mom = <p>`, `F^u_ene = <u (e + p)> - α/2 [[e]]` with the internal
/// energy density `e = rho E - m²/(2 rho)`.
pub fn split_flux<M: GasModel<N>, const N: usize>(
    model: &M,
    left: &[f64; N],
    right: &[f64; N],
    alpha: f64,
) -> Result<FluxSplit, ModelError> {
    let side = |u: &[f64; N]| -> Result<(f64, f64, f64), ModelError> {
        let p = model.pressure(u)?;
        let vel = model.velocity(u);
        let e = u[M::ENERGY] - 0.5 * u[M::MOMENTUM] * vel;
        Ok((vel, p, e))
    };
    let (ul, pl, el) = side(left)?;
    let (ur, pr, er) = side(right)?;
    let mut split = FluxSplit::default();
    for k in 0..M::SPECIES {
        let (rl, rr) = (left[k], right[k]);
        split.weighted[k][0] = 0.5 * (rl * ul * ul + rr * ur * ur) - 0.5 * alpha * (rr * ur - rl * ul);
        split.weighted[k][1] = 0.5 * (0.5 * rl * ul * ul * ul + 0.5 * rr * ur * ur * ur)
            - 0.5 * alpha * (0.5 * rr * ur * ur - 0.5 * rl * ul * ul);
    }
    split.unweighted[0] = 0.5 * (pl + pr);
    split.unweighted[1] = 0.5 * (ul * (el + pl) + ur * (er + pr)) - 0.5 * alpha * (er - el);
    Ok(split)
}

/// Failure of an interface evaluation, located by interface index.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("interface {interface}: {source}")]
pub struct InterfaceError {
    pub interface: usize,
    #[source]
    pub source: ModelError,
}

/// Numerical fluxes of all `cells + 1` interfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceFluxes<const N: usize> {
    pub fluxes: Vec<InterfaceFlux<N>>,
}

impl<const N: usize> InterfaceFluxes<N> {
    /// Evaluate every interface. Under periodic conditions the first
    /// interface is the image of the last one and shares its values.
    pub fn evaluate<M: GasModel<N>>(
        model: &M,
        cells: &[[f64; N]],
        boundary: Boundary,
        reconstruction: Reconstruction,
    ) -> Result<Self, InterfaceError> {
        let traces = interface_states(model, cells, boundary, reconstruction)?;
        let mut fluxes = traces
            .iter()
            .enumerate()
            .map(|(interface, (l, r))| {
                interface_flux(model, l, r).map_err(|source| InterfaceError { interface, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if boundary == Boundary::Periodic {
            let n = fluxes.len() - 1;
            fluxes[0] = fluxes[n];
        }
        Ok(Self { fluxes })
    }

    pub fn alpha_max(&self) -> f64 {
        self.fluxes.iter().map(|f| f.alpha).fold(0.0, f64::max)
    }

    /// Flux component `c` at every interface.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.fluxes.iter().map(|f| f.flux[c]).collect()
    }
}

/// Largest LLF wave speed over all interfaces of the cell averages.
pub fn max_wave_speed<M: GasModel<N>, const N: usize>(
    model: &M,
    cells: &[[f64; N]],
    boundary: Boundary,
) -> Result<f64, InterfaceError> {
    let ext = fill_ghosts(cells, boundary);
    let mut alpha_max = 0.0f64;
    for (interface, w) in ext.windows(2).enumerate() {
        let a = llf_alpha(model, &w[0], &w[1]).map_err(|source| InterfaceError { interface, source })?;
        alpha_max = alpha_max.max(a);
    }
    Ok(alpha_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::IdealGas;
    use approx::assert_relative_eq;

    #[test]
    fn grid_geometry() {
        let g = Grid::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.interface(0), -1.0);
        assert_eq!(g.interface(4), 1.0);
        assert_eq!(g.center(1), -0.25);
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(1.0, 0.0, 8).is_err());
    }

    #[test]
    fn mean_and_jump() {
        assert_eq!(mean_jump(1.0, 3.0), (2.0, 2.0));
        assert_eq!(mean_jump(4.0, 4.0), (4.0, 0.0));
        assert_eq!(mean_jump(3.0, -1.5).1, -mean_jump(-1.5, 3.0).1);
    }

    #[test]
    fn minmod_definition() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(-2.0, -1.0), -1.0);
        assert_eq!(minmod(0.0, 5.0), 0.0);
    }

    #[test]
    fn ghost_cells() {
        let cells = [[1.0], [2.0], [3.0]];
        assert_eq!(fill_ghosts(&cells, Boundary::Periodic), vec![[3.0], [1.0], [2.0], [3.0], [1.0]]);
        assert_eq!(fill_ghosts(&cells, Boundary::Neumann), vec![[1.0], [1.0], [2.0], [3.0], [3.0]]);
        let flat = [[7.0]; 4];
        for bc in [Boundary::Periodic, Boundary::Neumann] {
            assert!(fill_ghosts(&flat, bc).iter().all(|c| c[0] == 7.0));
        }
    }

    #[test]
    fn reconstruction_of_constant_and_linear_data() {
        let flat = vec![[2.5, -1.0]; 6];
        for (l, r) in minmod_reconstruct(&flat, Boundary::Neumann) {
            assert_eq!(l, [2.5, -1.0]);
            assert_eq!(r, [2.5, -1.0]);
        }
        // u_i = x_i with dx = 1: traces away from the boundary cells land
        // exactly on the interfaces
        let linear: Vec<[f64; 1]> = (0..8).map(|i| [i as f64 + 0.5]).collect();
        let traces = minmod_reconstruct(&linear, Boundary::Neumann);
        for (j, (l, r)) in traces.iter().enumerate().take(7).skip(2) {
            assert_eq!(l[0], j as f64);
            assert_eq!(r[0], j as f64);
        }
        // zero slopes in the ghost and boundary cells under Neumann conditions
        assert_eq!(traces[0], ([0.5], [0.5]));
    }

    #[test]
    fn primitive_reconstruction_keeps_velocity_and_pressure() {
        let gas = IdealGas::default();
        let cells: Vec<_> =
            [1.0, 0.2, 1e-6, 0.5, 3.0, 3.0].iter().map(|&rho| gas.conservative(rho, 20.0, 3.0)).collect();
        let traces = minmod_reconstruct_primitive(&gas, &cells, Boundary::Neumann).unwrap();
        for (l, r) in &traces {
            for u in [l, r] {
                assert!(u[0] > 0.0);
                assert_relative_eq!(gas.velocity(u), 20.0, max_relative = 1e-12);
                assert_relative_eq!(gas.pressure(u).unwrap(), 3.0, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn periodic_reconstruction_closes() {
        let cells: Vec<[f64; 1]> = (0..10).map(|i| [(i as f64 * 0.7).sin()]).collect();
        let traces = minmod_reconstruct(&cells, Boundary::Periodic);
        assert_eq!(traces[0], traces[10]);
    }

    #[test]
    fn alpha_examples() {
        let gas = IdealGas::default();
        let rest = gas.conservative(1.0, 0.0, 1.0);
        assert_relative_eq!(llf_alpha(&gas, &rest, &rest).unwrap(), 1.4f64.sqrt(), max_relative = 1e-15);
        let left = gas.conservative(1.0, -20.0, 0.4);
        let right = gas.conservative(1.0, 20.0, 0.4);
        let c = gas.sound_speed(&left).unwrap();
        assert_relative_eq!(llf_alpha(&gas, &left, &right).unwrap(), 20.0 + c, max_relative = 1e-14);
    }

    #[test]
    fn alpha_reports_invalid_states() {
        let gas = IdealGas::default();
        let good = gas.conservative(1.0, 0.0, 1.0);
        assert!(llf_alpha(&gas, &good, &[1.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn flux_is_consistent() {
        let gas = IdealGas::default();
        let u = gas.conservative(0.7, -3.0, 2.2);
        let f = llf_flux(&gas, &u, &u).unwrap();
        let exact = gas.flux(&u).unwrap();
        for c in 0..3 {
            assert_relative_eq!(f[c], exact[c], max_relative = 1e-14);
        }
    }

    #[test]
    fn contact_pair_flux_algebra() {
        let gas = IdealGas::default();
        let (u_bar, p_bar) = (20.0, 3.0);
        let e_bar = p_bar / 0.4;
        let left = gas.conservative(1.0, u_bar, p_bar);
        let right = gas.conservative(1e-6, u_bar, p_bar);
        let iface = interface_flux(&gas, &left, &right).unwrap();
        let f = iface.flux;
        assert!((f[1] - u_bar * f[0] - p_bar).abs() < 1e-12);
        assert!((f[2] - 0.5 * u_bar * u_bar * f[0] - u_bar * (e_bar + p_bar)).abs() < 1e-10);
        let s = iface.split;
        assert_relative_eq!(s.weighted[0][0], u_bar * f[0], max_relative = 1e-13);
        assert_relative_eq!(s.unweighted[0], p_bar, max_relative = 1e-13);
        assert_relative_eq!(s.weighted[0][1], 0.5 * u_bar * u_bar * f[0], max_relative = 1e-13);
        assert_relative_eq!(s.unweighted[1], u_bar * (e_bar + p_bar), max_relative = 1e-12);
    }

    #[test]
    fn resting_split() {
        let gas = IdealGas::default();
        let u = gas.conservative(1.3, 0.0, 0.8);
        let s = interface_flux(&gas, &u, &u).unwrap().split;
        assert_eq!(s.weighted[0][0], 0.0);
        assert_relative_eq!(s.unweighted[0], 0.8, max_relative = 1e-15);
    }

    #[test]
    fn periodic_fluxes_share_the_wrap_interface() {
        let gas = IdealGas::default();
        let cells: Vec<_> = (0..6).map(|i| gas.conservative(1.0 + 0.1 * i as f64, 0.5, 1.0)).collect();
        for rec in [Reconstruction::Constant, Reconstruction::Minmod, Reconstruction::MinmodConservative] {
            let fl = InterfaceFluxes::evaluate(&gas, &cells, Boundary::Periodic, rec).unwrap();
            assert_eq!(fl.fluxes[0], fl.fluxes[6]);
        }
    }
}
