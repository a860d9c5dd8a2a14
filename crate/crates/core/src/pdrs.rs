//! Production-destruction-rest (PDRS) structure of the finite-volume
//! semi-discretization and the modified Patankar linear systems built
//! from it.
//!
//! A scalar interface flux `F_j` between cells `j-1` and `j` is an exchange
//! of a conserved quantity between two neighbours: `max(0, F_j)` moves
//! rightward (destroyed in cell `j-1`, produced in cell `j`) and
//! `max(0, -F_j)` moves leftward. With that convention `p_ij = d_ji` holds
//! by construction and only `|i - j| = 1` entries exist. Under Neumann
//! conditions the two boundary fluxes become rest terms of the first and
//! last cell; under periodic conditions the wrap interface is an ordinary
//! neighbour pair and the rest terms vanish.

use nalgebra::Matrix2;
use thiserror::Error;

use crate::banded::{BlockTridiagonal, BlockVector};
use crate::models::SourceSplit;
use crate::spatial::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PdrsError {
    #[error("Patankar-weight denominator {value:e} at cell {cell} must be finite and non-negative")]
    InvalidDenominator { cell: usize, value: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    Length { expected: usize, found: usize },
}

/// Rightward/leftward exchange of one quantity through the `cells + 1`
/// interfaces. Entries are non-negative for true PDRS terms and signed for
/// the auxiliary terms of the flux-balanced schemes.
///
/// For periodic conditions the wrap interface is stored at index `cells`;
/// index 0 is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceExchange {
    pub boundary: Boundary,
    /// Amount entering cell `j` from cell `j - 1` through interface `j`.
    /// It is weighted with the donor (left) cell.
    pub rightward: Vec<f64>,
    /// Amount entering cell `j - 1` from cell `j` through interface `j`.
    /// It is weighted with the donor (right) cell.
    pub leftward: Vec<f64>,
}

impl InterfaceExchange {
    pub fn zeros(cells: usize, boundary: Boundary) -> Self {
        Self { boundary, rightward: vec![0.0; cells + 1], leftward: vec![0.0; cells + 1] }
    }

    pub fn cells(&self) -> usize {
        self.rightward.len() - 1
    }

    fn periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Value entering cell `i` through its left interface.
    fn inflow_left(&self, i: usize) -> f64 {
        if i == 0 && self.periodic() {
            self.rightward[self.cells()]
        } else {
            self.rightward[i]
        }
    }

    /// Value leaving cell `i` through its left interface.
    fn outflow_left(&self, i: usize) -> f64 {
        if i == 0 && self.periodic() {
            self.leftward[self.cells()]
        } else {
            self.leftward[i]
        }
    }

    fn left_neighbour(&self, i: usize) -> Option<usize> {
        match (i, self.boundary) {
            (0, Boundary::Periodic) => Some(self.cells() - 1),
            (0, Boundary::Neumann) => None,
            _ => Some(i - 1),
        }
    }

    fn right_neighbour(&self, i: usize) -> Option<usize> {
        let n = self.cells();
        match self.boundary {
            _ if i + 1 < n => Some(i + 1),
            Boundary::Periodic => Some(0),
            Boundary::Neumann => None,
        }
    }

    /// Production `p_ij` of cell `i` at the expense of cell `j`.
    pub fn production(&self, i: usize, j: usize) -> f64 {
        let mut value = 0.0;
        if self.left_neighbour(i) == Some(j) {
            value += self.inflow_left(i);
        }
        if self.right_neighbour(i) == Some(j) {
            value += self.leftward[i + 1];
        }
        value
    }

    /// Destruction `d_ij = p_ji`.
    pub fn destruction(&self, i: usize, j: usize) -> f64 {
        self.production(j, i)
    }

    /// Unweighted boundary inflow of cell `i`.
    pub fn rest_production(&self, i: usize) -> f64 {
        let n = self.cells();
        if self.periodic() {
            return 0.0;
        }
        let mut value = 0.0;
        if i == 0 {
            value += self.rightward[0];
        }
        if i == n - 1 {
            value += self.leftward[n];
        }
        value
    }

    /// Boundary outflow of cell `i`, weighted with cell `i`.
    pub fn rest_destruction(&self, i: usize) -> f64 {
        let n = self.cells();
        if self.periodic() {
            return 0.0;
        }
        let mut value = 0.0;
        if i == 0 {
            value += self.leftward[0];
        }
        if i == n - 1 {
            value += self.rightward[n];
        }
        value
    }

    /// Total outflow `r^d_i + Σ_j d_ij` of cell `i`.
    pub fn total_destruction(&self, i: usize) -> f64 {
        self.outflow_left(i) + self.rightward[i + 1]
    }

    /// `self += coef * other`.
    pub fn scaled_add(&mut self, coef: f64, other: &InterfaceExchange) {
        for (a, b) in self.rightward.iter_mut().zip(&other.rightward) {
            *a += coef * b;
        }
        for (a, b) in self.leftward.iter_mut().zip(&other.leftward) {
            *a += coef * b;
        }
    }

    /// `r^p_i + Σ_j p_ij w_j - (r^d_i + Σ_j d_ij) w_i` for every cell.
    /// With all weights equal to one this is the flux difference
    /// `F_{i-1/2} - F_{i+1/2}`.
    pub fn weighted_balance(&self, weights: &[f64]) -> Vec<f64> {
        let n = self.cells();
        (0..n)
            .map(|i| {
                let w_left = self.left_neighbour(i).map_or(1.0, |j| weights[j]);
                let w_right = self.right_neighbour(i).map_or(1.0, |j| weights[j]);
                self.inflow_left(i) * w_left + self.leftward[i + 1] * w_right - self.total_destruction(i) * weights[i]
            })
            .collect()
    }
}

/// PDRS terms of one positive quantity (a density, or the total energy of
/// the `-ρE` variants).
#[derive(Debug, Clone, PartialEq)]
pub struct PdrsTerms(pub InterfaceExchange);

impl PdrsTerms {
    /// `p_{i+1,i} = d_{i,i+1} = max{0, F_{i+1/2}}`,
    /// `p_{i,i+1} = d_{i+1,i} = -min{0, F_{i+1/2}}`, boundary fluxes as rest
    /// terms. `fluxes` holds all `cells + 1` interface values.
    pub fn from_fluxes(fluxes: &[f64], boundary: Boundary) -> Self {
        let rightward = fluxes.iter().map(|&f| f.max(0.0)).collect();
        let leftward = fluxes.iter().map(|&f| (-f).max(0.0)).collect();
        Self(InterfaceExchange { boundary, rightward, leftward })
    }

    pub fn zeros(cells: usize, boundary: Boundary) -> Self {
        Self(InterfaceExchange::zeros(cells, boundary))
    }

    pub fn cells(&self) -> usize {
        self.0.cells()
    }

    pub fn production(&self, i: usize, j: usize) -> f64 {
        self.0.production(i, j)
    }

    pub fn destruction(&self, i: usize, j: usize) -> f64 {
        self.0.destruction(i, j)
    }

    pub fn rest_production(&self, i: usize) -> f64 {
        self.0.rest_production(i)
    }

    pub fn rest_destruction(&self, i: usize) -> f64 {
        self.0.rest_destruction(i)
    }

    pub fn scaled_add(&mut self, coef: f64, other: &PdrsTerms) {
        self.0.scaled_add(coef, &other.0);
    }

    pub fn weighted_balance(&self, weights: &[f64]) -> Vec<f64> {
        self.0.weighted_balance(weights)
    }
}

/// Auxiliary production/destruction terms of one balanced component
/// (momentum or energy) of the flux-balanced schemes.
///
/// `species[k]` holds the part `F^{w,k}` that travels with species `k`: it
/// takes the destruction branch where the species flux is `>= 0` and the
/// production branch where it is `< 0`, so it is weighted exactly like the
/// density term of the same interface. `unweighted` holds `F^u` at every
/// interface and enters the rest production unweighted.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxTerms {
    pub species: Vec<InterfaceExchange>,
    pub unweighted: Vec<f64>,
}

impl AuxTerms {
    /// `weighted[k]` and `density_flux[k]` are the `F^{w,k}` values and
    /// species-`k` density fluxes at all interfaces.
    pub fn assemble(
        weighted: &[Vec<f64>],
        density_flux: &[Vec<f64>],
        unweighted: Vec<f64>,
        boundary: Boundary,
    ) -> Self {
        let species = weighted
            .iter()
            .zip(density_flux)
            .map(|(fw, fd)| {
                let rightward = fw.iter().zip(fd).map(|(&w, &d)| if d >= 0.0 { w } else { 0.0 }).collect();
                let leftward = fw.iter().zip(fd).map(|(&w, &d)| if d < 0.0 { -w } else { 0.0 }).collect();
                InterfaceExchange { boundary, rightward, leftward }
            })
            .collect();
        Self { species, unweighted }
    }

    pub fn zeros(species: usize, cells: usize, boundary: Boundary) -> Self {
        Self { species: vec![InterfaceExchange::zeros(cells, boundary); species], unweighted: vec![0.0; cells + 1] }
    }

    pub fn cells(&self) -> usize {
        self.unweighted.len() - 1
    }

    /// `𝔭^k_{ij}`.
    pub fn production(&self, k: usize, i: usize, j: usize) -> f64 {
        self.species[k].production(i, j)
    }

    /// `𝔡^k_{ij}`.
    pub fn destruction(&self, k: usize, i: usize, j: usize) -> f64 {
        self.species[k].destruction(i, j)
    }

    /// `𝔯^d_i` of species `k`.
    pub fn rest_destruction(&self, k: usize, i: usize) -> f64 {
        self.species[k].rest_destruction(i)
    }

    /// `𝔯^p_i = r_i + 𝔯^d_i + (F^u_{i-1/2} - F^u_{i+1/2})`, where `r_i` is the
    /// signed boundary part of the weighted flux.
    pub fn rest_production(&self, i: usize) -> f64 {
        let rest: f64 = self.species.iter().map(|s| s.rest_production(i)).sum();
        rest + self.unweighted[i] - self.unweighted[i + 1]
    }

    pub fn scaled_add(&mut self, coef: f64, other: &AuxTerms) {
        for (a, b) in self.species.iter_mut().zip(&other.species) {
            a.scaled_add(coef, b);
        }
        for (a, b) in self.unweighted.iter_mut().zip(&other.unweighted) {
            *a += coef * b;
        }
    }

    /// Weighted flux balance of every cell; `weights[k]` are the Patankar
    /// weights of species `k`.
    pub fn weighted_balance(&self, weights: &[Vec<f64>]) -> Vec<f64> {
        let n = self.cells();
        let mut out: Vec<f64> = (0..n).map(|i| self.unweighted[i] - self.unweighted[i + 1]).collect();
        if self.species.first().is_some_and(|s| s.boundary == Boundary::Periodic) {
            out[0] = self.unweighted[n] - self.unweighted[1];
        }
        for (s, w) in self.species.iter().zip(weights) {
            for (o, b) in out.iter_mut().zip(s.weighted_balance(w)) {
                *o += b;
            }
        }
        out
    }
}

/// Banded modified Patankar system `M u = rhs` with `D` coupled
/// components per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MpMatrix<const D: usize> {
    pub matrix: BlockTridiagonal<D>,
    pub rhs: Vec<BlockVector<D>>,
}

impl<const D: usize> MpMatrix<D> {
    pub fn solve(&self) -> Result<Vec<BlockVector<D>>, crate::banded::SolveError> {
        self.matrix.solve(&self.rhs)
    }
}

/// `num / sigma`, with an empty cell contributing nothing: every
/// destruction term of a cell with zero content vanishes.
pub(crate) fn patankar_ratio(num: f64, sigma: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / sigma
    }
}

fn check_denominators(pwd: &[f64], cells: usize) -> Result<(), PdrsError> {
    if pwd.len() != cells {
        return Err(PdrsError::Length { expected: cells, found: pwd.len() });
    }
    match pwd.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
        Some(cell) => Err(PdrsError::InvalidDenominator { cell, value: pwd[cell] }),
        None => Ok(()),
    }
}

/// Scalar entries `(lower, diag, upper, rhs)` of the MP system of one
/// quantity: `m_ii = 1 + λ (r^d_i + Σ_j d_ij) / σ_i`,
/// `m_ij = -λ p_ij / σ_j`, `rhs_i = base_i + λ r^p_i`.
fn scalar_rows(terms: &PdrsTerms, pwd: &[f64], base: &[f64], lambda: f64) -> Vec<[f64; 4]> {
    let ex = &terms.0;
    let n = ex.cells();
    (0..n)
        .map(|i| {
            let diag = 1.0 + lambda * patankar_ratio(ex.total_destruction(i), pwd[i]);
            let lower = ex.left_neighbour(i).map_or(0.0, |j| -lambda * patankar_ratio(ex.inflow_left(i), pwd[j]));
            let upper = ex.right_neighbour(i).map_or(0.0, |j| -lambda * patankar_ratio(ex.leftward[i + 1], pwd[j]));
            [lower, diag, upper, base[i] + lambda * ex.rest_production(i)]
        })
        .collect()
}

/// MP system of one decoupled quantity. `lambda = Δt/Δx` already carries
/// any stage coefficient folded into `terms`.
pub fn assemble_mp_matrix(terms: &PdrsTerms, pwd: &[f64], base: &[f64], lambda: f64) -> Result<MpMatrix<1>, PdrsError> {
    let n = terms.cells();
    check_denominators(pwd, n)?;
    if base.len() != n {
        return Err(PdrsError::Length { expected: n, found: base.len() });
    }
    let mut matrix = BlockTridiagonal::<1>::identity(n, terms.0.boundary == Boundary::Periodic);
    let mut rhs = Vec::with_capacity(n);
    for (i, [lower, diag, upper, b]) in scalar_rows(terms, pwd, base, lambda).into_iter().enumerate() {
        matrix.lower[i][0] = lower;
        matrix.diag[i][0] = diag;
        matrix.upper[i][0] = upper;
        rhs.push(BlockVector::<1>::new(b));
    }
    Ok(MpMatrix { matrix, rhs })
}

/// Source block of one cell for the `(rho1, rho2)` pair:
/// `Δt [[S^d_1/σ_1, -S^d_2/σ_2], [-S^d_1/σ_1, S^d_2/σ_2]]`.
pub fn source_coupling_block(source: &SourceSplit, pwd: [f64; 2], dt: f64) -> Matrix2<f64> {
    let d1 = dt * patankar_ratio(source.destruction[0], pwd[0]);
    let d2 = dt * patankar_ratio(source.destruction[1], pwd[1]);
    Matrix2::new(d1, -d2, -d1, d2)
}

/// Coupled MP system of species 1 and 2 with the reaction source, with
/// unknowns interleaved per cell so the matrix is block tridiagonal.
pub fn assemble_coupled_mp_matrix(
    terms: [&PdrsTerms; 2],
    pwd: [&[f64]; 2],
    base: [&[f64]; 2],
    lambda: f64,
    dt: f64,
    source: &[SourceSplit],
) -> Result<MpMatrix<2>, PdrsError> {
    let n = check_coupled(terms, pwd, base, source)?;
    let rows = [scalar_rows(terms[0], pwd[0], base[0], lambda), scalar_rows(terms[1], pwd[1], base[1], lambda)];
    let mut matrix = BlockTridiagonal::<2>::identity(n, terms[0].0.boundary == Boundary::Periodic);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let [l0, d0, u0, b0] = rows[0][i];
        let [l1, d1, u1, b1] = rows[1][i];
        matrix.lower[i] = Matrix2::new(l0, 0.0, 0.0, l1);
        matrix.upper[i] = Matrix2::new(u0, 0.0, 0.0, u1);
        matrix.diag[i] = Matrix2::new(d0, 0.0, 0.0, d1) + source_coupling_block(&source[i], [pwd[0][i], pwd[1][i]], dt);
        rhs.push(BlockVector::<2>::new(b0, b1));
    }
    Ok(MpMatrix { matrix, rhs })
}

fn check_coupled(
    terms: [&PdrsTerms; 2],
    pwd: [&[f64]; 2],
    base: [&[f64]; 2],
    source: &[SourceSplit],
) -> Result<usize, PdrsError> {
    let n = terms[0].cells();
    for k in 0..2 {
        check_denominators(pwd[k], n)?;
        if base[k].len() != n {
            return Err(PdrsError::Length { expected: n, found: base[k].len() });
        }
    }
    if source.len() != n {
        return Err(PdrsError::Length { expected: n, found: source.len() });
    }
    Ok(n)
}

/// Column scaling `x_j = c_j y_j` of the MP system: with `c_j = σ_j` every
/// `1/σ_j` cancels, so the entries stay finite when a denominator is zero
/// or a rate overflows. A column with zero content and nothing leaving it
/// keeps `c_j = 1`. Returns `(c_j, c_j / σ_j)`.
fn column_scale(sigma: f64, leaving: f64) -> (f64, f64) {
    if sigma > 0.0 || leaving > 0.0 {
        (sigma, 1.0)
    } else {
        (1.0, 0.0)
    }
}

/// Solve the MP system of one decoupled quantity, equivalent to
/// `assemble_mp_matrix(..)?.solve()` but robust to vanishing denominators.
pub fn solve_mp(terms: &PdrsTerms, pwd: &[f64], base: &[f64], lambda: f64) -> Result<Vec<f64>, MpSolveError> {
    let n = terms.cells();
    check_denominators(pwd, n)?;
    if base.len() != n {
        return Err(PdrsError::Length { expected: n, found: base.len() }.into());
    }
    let ex = &terms.0;
    let scale: Vec<(f64, f64)> = (0..n).map(|i| column_scale(pwd[i], ex.total_destruction(i))).collect();
    let mut matrix = BlockTridiagonal::<1>::identity(n, ex.boundary == Boundary::Periodic);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        matrix.diag[i][0] = scale[i].0 + lambda * ex.total_destruction(i) * scale[i].1;
        if let Some(j) = ex.left_neighbour(i) {
            matrix.lower[i][0] = -lambda * ex.inflow_left(i) * scale[j].1;
        }
        if let Some(j) = ex.right_neighbour(i) {
            matrix.upper[i][0] = -lambda * ex.leftward[i + 1] * scale[j].1;
        }
        rhs.push(BlockVector::<1>::new(base[i] + lambda * ex.rest_production(i)));
    }
    let y = matrix.solve(&rhs)?;
    Ok(y.iter().zip(&scale).map(|(y, (c, _))| c * y[0]).collect())
}

/// `(u/t, v/t)` with `t = u + v`, for `u, v ≥ 0` possibly infinite.
fn shares(u: f64, v: f64) -> (f64, f64) {
    match (u.is_infinite(), v.is_infinite()) {
        (true, true) => (0.5, 0.5),
        (true, false) => (1.0, 0.0),
        (false, true) => (0.0, 1.0),
        (false, false) => (u / (u + v), v / (u + v)),
    }
}

/// Solve the coupled MP system of species 1 and 2, equivalent to
/// `assemble_coupled_mp_matrix(..)?.solve()`.
///
/// Besides the column scaling of [`solve_mp`], the rows are combined: the
/// species-1 row is divided by its diagonal and the species-2 row replaced
/// by the sum of both, in which the reaction cancels. Every pivot
/// determinant is then a sum of non-negative terms, whereas the plain
/// `(1+A)(1+B) - AB` loses all digits once the reaction is stiff.
pub fn solve_coupled_mp(
    terms: [&PdrsTerms; 2],
    pwd: [&[f64]; 2],
    base: [&[f64]; 2],
    lambda: f64,
    dt: f64,
    source: &[SourceSplit],
) -> Result<Vec<[f64; 2]>, MpSolveError> {
    let n = check_coupled(terms, pwd, base, source)?;
    let ex = [&terms[0].0, &terms[1].0];
    let scale: Vec<[(f64, f64); 2]> = (0..n)
        .map(|i| [0, 1].map(|k| column_scale(pwd[k][i], ex[k].total_destruction(i) + source[i].destruction[k])))
        .collect();
    let mut matrix = BlockTridiagonal::<2>::identity(n, ex[0].boundary == Boundary::Periodic);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let transport = [0, 1].map(|k| scale[i][k].0 + lambda * ex[k].total_destruction(i) * scale[i][k].1);
        let reaction = [0, 1].map(|k| dt * source[i].destruction[k] * scale[i][k].1);
        // species-1 row divided by t = transport + reaction, split so that
        // infinite reaction coefficients stay exact
        let (keep, convert) = shares(transport[0] + reaction[0], reaction[1]);
        let total = transport[0] + reaction[0] + reaction[1];
        matrix.diag[i] = Matrix2::new(keep, -convert, transport[0], transport[1]);
        let offdiag = |inflow: [f64; 2], j: usize| {
            let e = [0, 1].map(|k| -lambda * inflow[k] * scale[j][k].1);
            Matrix2::new(e[0] / total, 0.0, e[0], e[1])
        };
        if let Some(j) = ex[0].left_neighbour(i) {
            matrix.lower[i] = offdiag([ex[0].inflow_left(i), ex[1].inflow_left(i)], j);
        }
        if let Some(j) = ex[0].right_neighbour(i) {
            matrix.upper[i] = offdiag([ex[0].leftward[i + 1], ex[1].leftward[i + 1]], j);
        }
        let b = [0, 1].map(|k| base[k][i] + lambda * ex[k].rest_production(i));
        rhs.push(BlockVector::<2>::new(b[0] / total, b[0] + b[1]));
    }
    let y = matrix.solve(&rhs)?;
    Ok(y.iter().zip(&scale).map(|(y, s)| [s[0].0 * y[0], s[1].0 * y[1]]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MpSolveError {
    #[error(transparent)]
    Assembly(#[from] PdrsError),
    #[error(transparent)]
    Solve(#[from] crate::banded::SolveError),
}
