//! Exact solution of the Riemann problem for the ideal-gas Euler equations,
//! including vacuum generation.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RiemannError {
    #[error("initial states must have positive density and pressure")]
    InvalidState,
    #[error("pressure iteration did not converge in {0} iterations")]
    NoConvergence(usize),
}

/// Wave on one side of the contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

/// Star-region solution of a Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub gamma: f64,
    pub left: Primitive,
    pub right: Primitive,
    pub structure: Structure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Structure {
    Star {
        p_star: f64,
        u_star: f64,
        rho_star_left: f64,
        rho_star_right: f64,
        left_wave: Wave,
        right_wave: Wave,
        iterations: usize,
    },
    /// Two rarefactions separated by vacuum; fronts move with `u ± 2c/(γ-1)`.
    Vacuum { left_front: f64, right_front: f64 },
}

const MAX_ITERATIONS: usize = 100;
const TOLERANCE: f64 = 1e-12;

fn sound(gamma: f64, s: &Primitive) -> f64 {
    (gamma * s.p / s.rho).sqrt()
}

/// Pressure function of one side and its derivative.
fn side_function(gamma: f64, p: f64, s: &Primitive) -> (f64, f64) {
    let c = sound(gamma, s);
    if p > s.p {
        let a = 2.0 / ((gamma + 1.0) * s.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let ratio = p / s.p;
        let e = (gamma - 1.0) / (2.0 * gamma);
        let f = 2.0 * c / (gamma - 1.0) * (ratio.powf(e) - 1.0);
        let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * c);
        (f, df)
    }
}

/// Newton iteration for the star pressure, started from the two-rarefaction
/// approximation and stopped when the relative update drops below 1e-12.
pub fn solve(gamma: f64, left: Primitive, right: Primitive) -> Result<RiemannSolution, RiemannError> {
    for s in [&left, &right] {
        if !(s.rho > 0.0 && s.p > 0.0) || !s.u.is_finite() {
            return Err(RiemannError::InvalidState);
        }
    }
    let (cl, cr) = (sound(gamma, &left), sound(gamma, &right));
    let du = right.u - left.u;
    if du >= 2.0 * (cl + cr) / (gamma - 1.0) {
        let structure = Structure::Vacuum {
            left_front: left.u + 2.0 * cl / (gamma - 1.0),
            right_front: right.u - 2.0 * cr / (gamma - 1.0),
        };
        return Ok(RiemannSolution { gamma, left, right, structure });
    }

    let z = (gamma - 1.0) / (2.0 * gamma);
    let guess = (cl + cr - 0.5 * (gamma - 1.0) * du) / (cl / left.p.powf(z) + cr / right.p.powf(z));
    let mut p = guess.powf(1.0 / z).max(1e-14 * left.p.min(right.p));
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (fl, dfl) = side_function(gamma, p, &left);
        let (fr, dfr) = side_function(gamma, p, &right);
        let mut next = p - (fl + fr + du) / (dfl + dfr);
        if next <= 0.0 {
            next = 0.5 * p;
        }
        let change = (next - p).abs();
        p = next;
        if change <= TOLERANCE * p {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(RiemannError::NoConvergence(MAX_ITERATIONS));
        }
    }
    let (fl, _) = side_function(gamma, p, &left);
    let (fr, _) = side_function(gamma, p, &right);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);

    let gm = (gamma - 1.0) / (gamma + 1.0);
    let star_density = |s: &Primitive| -> f64 {
        let ratio = p / s.p;
        if p > s.p {
            s.rho * (ratio + gm) / (gm * ratio + 1.0)
        } else {
            s.rho * ratio.powf(1.0 / gamma)
        }
    };
    let rho_star_left = star_density(&left);
    let rho_star_right = star_density(&right);
    let shock_factor = |s: &Primitive| ((gamma + 1.0) / (2.0 * gamma) * p / s.p + (gamma - 1.0) / (2.0 * gamma)).sqrt();
    let left_wave = if p > left.p {
        Wave::Shock { speed: left.u - cl * shock_factor(&left) }
    } else {
        let c_star = cl * (p / left.p).powf(z);
        Wave::Rarefaction { head: left.u - cl, tail: u_star - c_star }
    };
    let right_wave = if p > right.p {
        Wave::Shock { speed: right.u + cr * shock_factor(&right) }
    } else {
        let c_star = cr * (p / right.p).powf(z);
        Wave::Rarefaction { head: right.u + cr, tail: u_star + c_star }
    };
    let structure =
        Structure::Star { p_star: p, u_star, rho_star_left, rho_star_right, left_wave, right_wave, iterations };
    Ok(RiemannSolution { gamma, left, right, structure })
}

impl RiemannSolution {
    /// Solution at similarity coordinate `xi = (x - x0) / t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let (l, r) = (&self.left, &self.right);
        let (cl, cr) = (sound(g, l), sound(g, r));
        let fan_left = |xi: f64| {
            let f = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (l.u - xi);
            Primitive::new(
                l.rho * f.powf(2.0 / (g - 1.0)),
                2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u + xi),
                l.p * f.powf(2.0 * g / (g - 1.0)),
            )
        };
        let fan_right = |xi: f64| {
            let f = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (r.u - xi);
            Primitive::new(
                r.rho * f.powf(2.0 / (g - 1.0)),
                2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u + xi),
                r.p * f.powf(2.0 * g / (g - 1.0)),
            )
        };
        match self.structure {
            Structure::Vacuum { left_front, right_front } => {
                if xi <= l.u - cl {
                    *l
                } else if xi < left_front {
                    fan_left(xi)
                } else if xi <= right_front {
                    // velocity interpolated linearly across the vacuum
                    let s = (xi - left_front) / (right_front - left_front);
                    Primitive::new(0.0, left_front + s * (right_front - left_front), 0.0)
                } else if xi < r.u + cr {
                    fan_right(xi)
                } else {
                    *r
                }
            }
            Structure::Star { p_star, u_star, rho_star_left, rho_star_right, left_wave, right_wave, .. } => {
                if xi <= u_star {
                    match left_wave {
                        Wave::Shock { speed } if xi < speed => *l,
                        Wave::Shock { .. } => Primitive::new(rho_star_left, u_star, p_star),
                        Wave::Rarefaction { head, .. } if xi <= head => *l,
                        Wave::Rarefaction { tail, .. } if xi < tail => fan_left(xi),
                        Wave::Rarefaction { .. } => Primitive::new(rho_star_left, u_star, p_star),
                    }
                } else {
                    match right_wave {
                        Wave::Shock { speed } if xi > speed => *r,
                        Wave::Shock { .. } => Primitive::new(rho_star_right, u_star, p_star),
                        Wave::Rarefaction { head, .. } if xi >= head => *r,
                        Wave::Rarefaction { tail, .. } if xi > tail => fan_right(xi),
                        Wave::Rarefaction { .. } => Primitive::new(rho_star_right, u_star, p_star),
                    }
                }
            }
        }
    }

    /// Solution at `(x, t)` for a discontinuity initially at `x0`.
    pub fn sample_at(&self, x: f64, x0: f64, t: f64) -> Primitive {
        if t <= 0.0 {
            return if x < x0 { self.left } else { self.right };
        }
        self.sample((x - x0) / t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sod_star_state() {
        let sol = solve(1.4, Primitive::new(1.0, 0.0, 1.0), Primitive::new(0.125, 0.0, 0.1)).unwrap();
        let Structure::Star { p_star, u_star, rho_star_left, rho_star_right, .. } = sol.structure else {
            panic!("expected star region");
        };
        // reference values of the standard Sod problem
        assert_relative_eq!(p_star, 0.30313, max_relative = 1e-4);
        assert_relative_eq!(u_star, 0.92745, max_relative = 1e-4);
        assert_relative_eq!(rho_star_left, 0.42632, max_relative = 1e-4);
        assert_relative_eq!(rho_star_right, 0.26557, max_relative = 1e-4);
    }

    #[test]
    fn identical_states_give_the_state() {
        let s = Primitive::new(0.7, 1.2, 0.9);
        let sol = solve(1.4, s, s).unwrap();
        for xi in [-5.0, -0.3, 0.0, 1.2, 4.0] {
            let v = sol.sample(xi);
            assert_relative_eq!(v.rho, s.rho, max_relative = 1e-12);
            assert_relative_eq!(v.u, s.u, max_relative = 1e-12);
            assert_relative_eq!(v.p, s.p, max_relative = 1e-12);
        }
    }

    #[test]
    fn vacuum_is_detected() {
        let sol = solve(1.4, Primitive::new(1.0, -20.0, 0.4), Primitive::new(1.0, 20.0, 0.4)).unwrap();
        assert!(matches!(sol.structure, Structure::Vacuum { .. }));
        let mid = sol.sample(0.0);
        assert_eq!((mid.rho, mid.p), (0.0, 0.0));
        assert_eq!(mid.u, 0.0);
        assert_eq!(sol.sample(-100.0), sol.left);
    }

    #[test]
    fn rejects_invalid_states() {
        let good = Primitive::new(1.0, 0.0, 1.0);
        assert_eq!(solve(1.4, good, Primitive::new(0.0, 0.0, 1.0)), Err(RiemannError::InvalidState));
        assert_eq!(solve(1.4, Primitive::new(1.0, 0.0, -1.0), good), Err(RiemannError::InvalidState));
    }

    #[test]
    fn sampling_before_start_returns_initial_data() {
        let sol = solve(1.4, Primitive::new(1.0, 0.0, 1.0), Primitive::new(0.125, 0.0, 0.1)).unwrap();
        assert_eq!(sol.sample_at(-0.1, 0.0, 0.0), sol.left);
        assert_eq!(sol.sample_at(0.1, 0.0, 0.0), sol.right);
    }
}
