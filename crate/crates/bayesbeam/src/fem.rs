//! Euler-Bernoulli cantilever finite elements and modal analysis.
//!
//! The model is a straight beam meshed with 2-node bending elements, two
//! degrees of freedom per node (transverse displacement and rotation),
//! cubic Hermite shape functions and a consistent mass matrix. Clamping the
//! root removes the first node's dofs, so an `n`-element cantilever has
//! `N = 2n` free dofs. Lumped point masses (accelerometers) attach to the
//! translational dof of the nearest node.

use alloc::{format, vec, vec::Vec};
use nalgebra::{DMatrix, DVector, Matrix4};

use crate::num::{round, sqrt};
use crate::{Error, Result};

/// 2π, used to convert angular frequency to Hz.
pub const TAU: f64 = core::f64::consts::TAU;

/// A lumped mass attached to the beam at a fixed axial position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    /// Axial position from the clamped end, in meters.
    pub position: f64,
    /// Mass in kilograms.
    pub mass: f64,
}

/// Geometry, material, mesh and boundary description of the cantilever.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    /// Beam length in meters.
    pub length: f64,
    /// Cross-section width in meters.
    pub width: f64,
    /// Cross-section thickness in meters.
    pub thickness: f64,
    /// Nominal Young's modulus in Pa, used for elements not covered by an
    /// updating parameter.
    pub youngs_modulus: f64,
    /// Poisson's ratio (carried for completeness; bending of a slender beam
    /// does not use it).
    pub poisson_ratio: f64,
    /// Material density in kg/m³.
    pub density: f64,
    /// Number of elements in the uniform mesh.
    pub n_elements: usize,
    /// Lumped masses along the beam.
    pub point_masses: Vec<PointMass>,
    /// Whether the root dofs are fixed (clamped-free configuration).
    pub clamped: bool,
}

impl BeamModel {
    /// Checks the invariants on geometry, material and point masses.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(format!(
                    "beam {name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.n_elements == 0 {
            return Err(Error::invalid("beam needs at least one element"));
        }
        for pm in &self.point_masses {
            if !(0.0..=self.length).contains(&pm.position) {
                return Err(Error::invalid(format!(
                    "point mass position {} outside beam [0, {}]",
                    pm.position, self.length
                )));
            }
            if !(pm.mass > 0.0) || !pm.mass.is_finite() {
                return Err(Error::invalid(format!(
                    "point mass must be strictly positive, got {}",
                    pm.mass
                )));
            }
        }
        Ok(())
    }

    /// Length of one element of the uniform mesh.
    pub fn element_length(&self) -> f64 {
        self.length / self.n_elements as f64
    }

    /// Area moment of inertia of the rectangular section, `w·t³/12`.
    pub fn nominal_inertia(&self) -> f64 {
        self.width * self.thickness * self.thickness * self.thickness / 12.0
    }

    /// Cross-section area of the rectangular section, `w·t`.
    pub fn nominal_area(&self) -> f64 {
        self.width * self.thickness
    }

    /// Per-element properties with every element at its nominal value.
    pub fn nominal_properties(&self) -> Result<Vec<ElementProperties>> {
        self.validate()?;
        let props = ElementProperties {
            youngs_modulus: self.youngs_modulus,
            inertia: self.nominal_inertia(),
            area: self.nominal_area(),
            density: self.density,
            length: self.element_length(),
        };
        Ok(vec![props; self.n_elements])
    }
}

/// Physical properties of a single beam element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementProperties {
    /// Young's modulus in Pa.
    pub youngs_modulus: f64,
    /// Area moment of inertia in m⁴.
    pub inertia: f64,
    /// Cross-section area in m².
    pub area: f64,
    /// Density in kg/m³.
    pub density: f64,
    /// Element length in meters.
    pub length: f64,
}

impl ElementProperties {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("youngs_modulus", self.youngs_modulus),
            ("inertia", self.inertia),
            ("area", self.area),
            ("density", self.density),
            ("length", self.length),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(format!(
                    "element {name} must be strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Kind of a nodal degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    /// Transverse displacement.
    Translation,
    /// Cross-section rotation.
    Rotation,
}

/// One retained degree of freedom: which node and which component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dof {
    /// Node index (node 0 is the clamped end).
    pub node: usize,
    /// Translation or rotation.
    pub kind: DofKind,
}

/// Assembled (or reduced) mass and stiffness matrices with the labels of
/// the dofs their rows/columns correspond to.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    /// Mass matrix, symmetric positive definite.
    pub mass: DMatrix<f64>,
    /// Stiffness matrix, symmetric positive definite once clamped.
    pub stiffness: DMatrix<f64>,
    /// Maps each row/column index to its node and component.
    pub dof_map: Vec<Dof>,
}

impl SystemMatrices {
    /// Number of retained dofs.
    pub fn ndof(&self) -> usize {
        self.dof_map.len()
    }

    /// Row/column index of a given node/component, if retained.
    pub fn dof_index(&self, node: usize, kind: DofKind) -> Option<usize> {
        self.dof_map
            .iter()
            .position(|d| d.node == node && d.kind == kind)
    }

    /// Indices of all translational dofs, in row order.
    pub fn translational_dofs(&self) -> Vec<usize> {
        self.dof_map
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == DofKind::Translation)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Natural frequencies and mass-normalized mode shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSolution {
    /// Natural frequencies in Hz, ascending.
    pub frequencies: Vec<f64>,
    /// Mode shapes as columns, `φᵀ M φ = 1`.
    pub mode_shapes: DMatrix<f64>,
}

/// Element stiffness and consistent mass matrices.
///
/// Dof order is `(w₁, θ₁, w₂, θ₂)`. The stiffness block is
/// `EI/ℓ³ · [[12, 6ℓ, -12, 6ℓ], [6ℓ, 4ℓ², -6ℓ, 2ℓ²], ...]` and the mass
/// block is `ρAℓ/420 · [[156, 22ℓ, 54, -13ℓ], ...]`, both symmetric; the
/// free-free stiffness has exactly two zero eigenvalues (rigid translation
/// and rotation).
pub fn element_matrices(props: &ElementProperties) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    props.validate()?;
    let l = props.length;
    let l2 = l * l;
    let ks = props.youngs_modulus * props.inertia / (l2 * l);
    #[rustfmt::skip]
    let k = Matrix4::new(
        12.0,      6.0 * l,   -12.0,     6.0 * l,
        6.0 * l,   4.0 * l2,  -6.0 * l,  2.0 * l2,
        -12.0,     -6.0 * l,  12.0,      -6.0 * l,
        6.0 * l,   2.0 * l2,  -6.0 * l,  4.0 * l2,
    ) * ks;
    let ms = props.density * props.area * l / 420.0;
    #[rustfmt::skip]
    let m = Matrix4::new(
        156.0,     22.0 * l,  54.0,      -13.0 * l,
        22.0 * l,  4.0 * l2,  13.0 * l,  -3.0 * l2,
        54.0,      13.0 * l,  156.0,     -22.0 * l,
        -13.0 * l, -3.0 * l2, -22.0 * l, 4.0 * l2,
    ) * ms;
    Ok((k, m))
}

/// Assembles global mass and stiffness matrices from per-element properties.
///
/// Requires one `ElementProperties` entry per element on the uniform mesh.
/// Point masses are added to the translational dof of the nearest node;
/// with a clamped root the first node's two dofs are removed, giving
/// `N = 2·n_elements` retained dofs.
pub fn assemble(model: &BeamModel, per_element: &[ElementProperties]) -> Result<SystemMatrices> {
    model.validate()?;
    if per_element.len() != model.n_elements {
        return Err(Error::invalid(format!(
            "expected {} element property entries, got {}",
            model.n_elements,
            per_element.len()
        )));
    }
    let le = model.element_length();
    for (e, props) in per_element.iter().enumerate() {
        if (props.length - le).abs() > 1e-12 * le {
            return Err(Error::invalid(format!(
                "element {e} length {} does not match uniform mesh length {le}",
                props.length
            )));
        }
    }

    let n_nodes = model.n_elements + 1;
    let first_node = usize::from(model.clamped);
    let ndof = 2 * (n_nodes - first_node);

    // Global index of (node, component), None when clamped away.
    let global = |node: usize, comp: usize| -> Option<usize> {
        (node >= first_node).then(|| 2 * (node - first_node) + comp)
    };

    let mut mass = DMatrix::<f64>::zeros(ndof, ndof);
    let mut stiffness = DMatrix::<f64>::zeros(ndof, ndof);

    for (e, props) in per_element.iter().enumerate() {
        let (k_e, m_e) = element_matrices(props)?;
        let dofs = [
            global(e, 0),
            global(e, 1),
            global(e + 1, 0),
            global(e + 1, 1),
        ];
        for (i, gi) in dofs.iter().enumerate() {
            let Some(gi) = gi else { continue };
            for (j, gj) in dofs.iter().enumerate() {
                let Some(gj) = gj else { continue };
                stiffness[(*gi, *gj)] += k_e[(i, j)];
                mass[(*gi, *gj)] += m_e[(i, j)];
            }
        }
    }

    for pm in &model.point_masses {
        let node = round(pm.position / le) as usize;
        // A mass at the clamped node loads a removed dof and drops out.
        if let Some(gi) = global(node.min(model.n_elements), 0) {
            mass[(gi, gi)] += pm.mass;
        }
    }

    let dof_map = (first_node..n_nodes)
        .flat_map(|node| {
            [
                Dof {
                    node,
                    kind: DofKind::Translation,
                },
                Dof {
                    node,
                    kind: DofKind::Rotation,
                },
            ]
        })
        .collect();

    Ok(SystemMatrices {
        mass,
        stiffness,
        dof_map,
    })
}

/// Factorization of `M = LLᵀ` plus the transformed standard-form operator
/// `A = L⁻¹ K L⁻ᵀ`, shared by the two eigen-solve entry points.
fn standard_form(sys: &SystemMatrices) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let chol = nalgebra::Cholesky::new(sys.mass.clone()).ok_or_else(|| {
        Error::numerical("mass matrix is not positive definite; cannot factorize for eigensolve")
    })?;
    let l = chol.unpack();
    let y = l
        .solve_lower_triangular(&sys.stiffness)
        .ok_or_else(|| Error::numerical("singular mass factor in eigensolve"))?;
    let a = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::numerical("singular mass factor in eigensolve"))?;
    // Symmetrize to scrub rounding before the symmetric QR iteration.
    let a = (&a + a.transpose()) * 0.5;
    Ok((l, a))
}

fn check_mode_count(sys: &SystemMatrices, n_modes: usize) -> Result<()> {
    if n_modes == 0 || n_modes > sys.ndof() {
        return Err(Error::invalid(format!(
            "requested {n_modes} modes from a {}-dof system",
            sys.ndof()
        )));
    }
    Ok(())
}

/// Lowest `n_modes` natural frequencies in Hz, without mode shapes.
///
/// Same transformation as [`solve_modes`] but skips eigenvector
/// accumulation; this is the hot path inside posterior evaluations.
pub fn natural_frequencies(sys: &SystemMatrices, n_modes: usize) -> Result<Vec<f64>> {
    check_mode_count(sys, n_modes)?;
    let (_, a) = standard_form(sys)?;
    let mut lambdas: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    lambdas.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(lambdas
        .iter()
        .take(n_modes)
        .map(|&l| sqrt(l.max(0.0)) / TAU)
        .collect())
}

/// Solves `K φ = ω² M φ` for the lowest `n_modes` modes.
///
/// Frequencies come back in Hz ascending; shapes are mass-normalized and
/// sign-fixed (largest-magnitude entry positive) so results are
/// deterministic for identical inputs.
pub fn solve_modes(sys: &SystemMatrices, n_modes: usize) -> Result<ModalSolution> {
    check_mode_count(sys, n_modes)?;
    let (l, a) = standard_form(sys)?;
    let eig = a.symmetric_eigen();

    let n = sys.ndof();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues are finite")
    });

    let mut frequencies = Vec::with_capacity(n_modes);
    let mut mode_shapes = DMatrix::<f64>::zeros(n, n_modes);
    for (col, &idx) in order.iter().take(n_modes).enumerate() {
        frequencies.push(sqrt(eig.eigenvalues[idx].max(0.0)) / TAU);
        let y = eig.eigenvectors.column(idx).into_owned();
        let mut phi = l
            .tr_solve_lower_triangular(&y)
            .ok_or_else(|| Error::numerical("singular mass factor in back-substitution"))?;
        // L⁻ᵀ of an orthonormal vector is already M-normalized up to
        // rounding; renormalize and fix the sign for determinism.
        let norm = sqrt((phi.transpose() * &sys.mass * &phi)[(0, 0)]);
        if norm > 0.0 {
            phi /= norm;
        }
        let dominant = phi.iter().enumerate().fold(0, |best, (i, v)| {
            if v.abs() > phi[best].abs() {
                i
            } else {
                best
            }
        });
        if phi[dominant] < 0.0 {
            phi.neg_mut();
        }
        mode_shapes.set_column(col, &phi);
    }

    Ok(ModalSolution {
        frequencies,
        mode_shapes,
    })
}

/// Guyan (static) condensation onto the given master dofs.
///
/// With the partition `[masters; slaves]`, the reduced matrices are
/// `K_r = K_mm − K_ms K_ss⁻¹ K_sm` and `M_r = Tᵀ M T` with
/// `T = [I; −K_ss⁻¹ K_sm]`. Exact for statics, an upper bound for
/// frequencies.
pub fn guyan_reduce(sys: &SystemMatrices, master_dofs: &[usize]) -> Result<SystemMatrices> {
    let n = sys.ndof();
    let mut masters: Vec<usize> = master_dofs.to_vec();
    masters.sort_unstable();
    masters.dedup();
    if masters.is_empty() {
        return Err(Error::invalid("master dof set is empty"));
    }
    if let Some(&bad) = masters.iter().find(|&&d| d >= n) {
        return Err(Error::invalid(format!(
            "master dof {bad} out of range for a {n}-dof system"
        )));
    }
    if masters.len() == n {
        // Identity reduction.
        return Ok(sys.clone());
    }

    let slaves: Vec<usize> = (0..n).filter(|d| !masters.contains(d)).collect();
    let pick = |m: &DMatrix<f64>, rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };

    let k_mm = pick(&sys.stiffness, &masters, &masters);
    let k_ms = pick(&sys.stiffness, &masters, &slaves);
    let k_sm = pick(&sys.stiffness, &slaves, &masters);
    let k_ss = pick(&sys.stiffness, &slaves, &slaves);
    let m_mm = pick(&sys.mass, &masters, &masters);
    let m_ms = pick(&sys.mass, &masters, &slaves);
    let m_sm = pick(&sys.mass, &slaves, &masters);
    let m_ss = pick(&sys.mass, &slaves, &slaves);

    let chol = nalgebra::Cholesky::new(k_ss)
        .ok_or_else(|| Error::numerical("slave-partition stiffness is singular"))?;
    // X = K_ss⁻¹ K_sm, so T = [I; −X].
    let x = chol.solve(&k_sm);

    let k_r = &k_mm - &k_ms * &x;
    let m_r = &m_mm - &m_ms * &x - x.transpose() * (&m_sm - &m_ss * &x);
    let k_r = (&k_r + k_r.transpose()) * 0.5;
    let m_r = (&m_r + m_r.transpose()) * 0.5;

    Ok(SystemMatrices {
        mass: m_r,
        stiffness: k_r,
        dof_map: masters.iter().map(|&d| sys.dof_map[d]).collect(),
    })
}

/// Modal force residual `ε = [−ω² M + K] φ` for a measured pair `(ω, φ)`.
///
/// `ω` is in rad/s. Zero when `(ω², φ)` is an eigenpair of `(M, K)`; apply
/// [`guyan_reduce`] first when the measured coordinates are fewer than the
/// model's.
pub fn modal_residual(sys: &SystemMatrices, omega: f64, phi: &DVector<f64>) -> Result<DVector<f64>> {
    if phi.len() != sys.ndof() {
        return Err(Error::invalid(format!(
            "mode shape has {} entries but the system has {} dofs",
            phi.len(),
            sys.ndof()
        )));
    }
    Ok(&sys.stiffness * phi - (&sys.mass * phi) * (omega * omega))
}
