//! Momentum map of the rotation action, linear and angular momenta in both
//! the Hamiltonian and the classical (field-integral) form, and residual
//! reports for the identities that tie them together.
//!
//! Everything that multiplies by the coordinate `y` assumes the fields are
//! negligible near the wrap seam of the box.

use num_complex::Complex64;

use crate::comoving::{
    comoving_grad, comoving_hamiltonian, cubic_group, deformation_field, rotate_state, rotation_generator, to_comoving,
    ComovingState,
};
use crate::error::{Error, Result};
use crate::grid::{self, inner_product, leray_project, ScalarField, VectorField3};
use crate::hamiltonian::{structural_apply, Cotangent, Model, State, Tangent};
use crate::Vec3;

/// `⟨Π, ∇_*A⟩ₙ = Σⱼ ⟨Πⱼ, ∂ₙAⱼ⟩`.
pub fn grad_star_inner(pi_a: &VectorField3, a: &VectorField3) -> Result<Vec3> {
    if pi_a.grid() != a.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *a.grid();
    let k = g.wavenumbers();
    let ah = a.spectra();
    let ph = pi_a.spectra();
    let mut acc = [0.0; 3];
    for idx in 0..g.node_count() {
        let (ix, iy, iz) = g.unindex(idx);
        let kv = [k[ix], k[iy], k[iz]];
        // Re[Π̂ conj(i k Â)] = k Im[Π̂ conj(Â)]... with sign from conj(i) = -i
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..3 {
            s += ph[j].data[idx] * ah[j].data[idx].conj();
        }
        for n in 0..3 {
            acc[n] += kv[n] * s.im;
        }
    }
    let scale = g.cell_volume() / g.node_count() as f64;
    Ok(Vec3::new(acc[0] * scale, acc[1] * scale, acc[2] * scale))
}

/// `⟨((x-q) ∧ ∇)ₙ A, Π⟩`, the operator applied to each component of `A`.
pub fn angular_star_inner(a: &VectorField3, pi_a: &VectorField3, q: &Vec3) -> Result<Vec3> {
    if pi_a.grid() != a.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *a.grid();
    let y = grid::centered_coordinate(&g, q);
    let grads: Vec<VectorField3> = (0..3).map(|j| grid::gradient(&a[j])).collect();
    let mut acc = Vec3::zeros();
    for i in 0..g.node_count() {
        let yi = y.at(i);
        for (j, gr) in grads.iter().enumerate() {
            acc += yi.cross(&gr.at(i)) * pi_a[j][i];
        }
    }
    Ok(acc * g.cell_volume())
}

/// `∫ F ∧ G`.
fn integral_cross(f: &VectorField3, g: &VectorField3) -> Vec3 {
    let grid = f.grid();
    let mut acc = Vec3::zeros();
    for i in 0..grid.node_count() {
        acc += f.at(i).cross(&g.at(i));
    }
    acc * grid.cell_volume()
}

/// `J_ξ = ⟨ξ∧𝐀 - ((ξ∧y)·∇)𝐀, 𝚷⟩ + (ξ∧q)·P + ξ·π`.
pub fn j_xi(yc: &ComovingState, xi: &Vec3) -> Result<f64> {
    let gen = rotation_generator(&yc.a, xi);
    Ok(inner_product(&gen, &yc.pi_a)? + xi.cross(&yc.q).dot(&yc.p_total) + xi.dot(&yc.pi))
}

/// `J = ⟨𝐀∧𝚷⟩ - ⟨(y∧∇)_*𝐀, 𝚷⟩ + q∧P + π`.
pub fn angular_momentum(yc: &ComovingState) -> Result<Vec3> {
    let cross = integral_cross(&yc.a, &yc.pi_a);
    let star = angular_star_inner(&yc.a, &yc.pi_a, &Vec3::zeros())?;
    Ok(cross - star + yc.q.cross(&yc.p_total) + yc.pi)
}

/// Classical momentum `∫E∧B + m q̇` and angular momentum
/// `∫x∧(E∧B) + Iω + q∧m q̇`, with `x` the box-centred coordinate, plus the
/// neutralizing-background terms from [`background_terms`].
pub fn classical_invariants(model: &Model, y: &State) -> Result<(Vec3, Vec3)> {
    let (p_raw, j_raw) = classical_invariants_uncorrected(model, y)?;
    let (p_bg, j_bg) = background_terms(model, y);
    Ok((p_raw + p_bg, j_raw + j_bg))
}

/// The classical field integrals with the periodic `E` taken at face value.
pub fn classical_invariants_uncorrected(model: &Model, y: &State) -> Result<(Vec3, Vec3)> {
    let d = model.derived_quantities(y)?;
    let g = *model.grid();
    let x = grid::centered_coordinate(&g, &Vec3::zeros());
    let mut p_field = Vec3::zeros();
    let mut j_field = Vec3::zeros();
    for i in 0..g.node_count() {
        let s = d.e.at(i).cross(&d.b.at(i));
        p_field += s;
        j_field += x.at(i).cross(&s);
    }
    let mv = model.mass() * d.v;
    let p_c = p_field * g.cell_volume() + mv;
    let j_c = j_field * g.cell_volume() + model.inertia() * d.omega + y.q.cross(&mv);
    Ok((p_c, j_c))
}

/// Torus corrections `(P_bg, J_bg)` added to the classical field integrals.
///
/// * The Coulomb potential solves `ΔΦ = -(ρ_q - Q/L³)`, so the integrals of
///   `∇Φ∧B` pick up the coupling of `A` to the uniform neutralizing
///   background: `(Q/L³)∫(A - Ā)` and `(Q/L³)∫(x-q)∧(A - Ā)`.
/// * The uniform modes `Ā`, `Π̄` carry momentum `QĀ` and angular momentum
///   `L³ Ā∧Π̄ + q∧QĀ` that no `E∧B` integral sees, since `B` has no
///   uniform part.
///
/// Both vanish for localized, mean-free fields.
pub fn background_terms(model: &Model, y: &State) -> (Vec3, Vec3) {
    let g = *model.grid();
    let charge = model.profile().charge();
    let mean_a = Vec3::new(y.a[0].mean(), y.a[1].mean(), y.a[2].mean());
    let mean_pi = Vec3::new(y.pi_a[0].mean(), y.pi_a[1].mean(), y.pi_a[2].mean());
    let x = grid::centered_coordinate(&g, &y.q);
    let mut moment = Vec3::zeros();
    for i in 0..g.node_count() {
        moment += x.at(i).cross(&(y.a.at(i) - mean_a));
    }
    let p_bg = charge * mean_a;
    let j_bg = charge / g.volume() * g.cell_volume() * moment
        + g.volume() * mean_a.cross(&mean_pi)
        + y.q.cross(&(charge * mean_a));
    (p_bg, j_bg)
}

/// One number per phase-space block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BlockNorms {
    pub a: f64,
    pub pi_a: f64,
    pub q: f64,
    pub p: f64,
    pub pi: f64,
}

impl BlockNorms {
    fn of(t: &Tangent) -> Self {
        Self { a: t.a.norm(), pi_a: t.pi_a.norm(), q: t.q.norm(), p: t.p.norm(), pi: t.pi.norm() }
    }

    pub fn max(&self) -> f64 {
        [self.a, self.pi_a, self.q, self.p, self.pi].into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct MomentumMapReport {
    /// Blockwise `‖F_{J_ξ} - v_ξ‖`.
    pub residual: BlockNorms,
    /// `‖v_ξ‖` over all blocks, the scale for relative residuals.
    pub scale: f64,
    /// Relative mismatch between `⟨DJ_ξ, δ⟩` and a central difference of
    /// `J_ξ` along a probe direction `δ`.
    pub fd_relative_error: f64,
}

impl MomentumMapReport {
    pub fn max_relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual.max() / self.scale
        } else {
            self.residual.max()
        }
    }
}

/// `DJ_ξ` assembled blockwise; the `𝐀` block goes through the adjoint route
/// `-ξ∧𝚷 + Σᵢ ∂ᵢ(uᵢ 𝚷)`, `u = ξ∧y`, independent of `rotation_generator`.
pub fn grad_j_xi(yc: &ComovingState, xi: &Vec3) -> Cotangent {
    let g = *yc.grid();
    let y = grid::centered_coordinate(&g, &Vec3::zeros());
    let u = VectorField3::from_indexed(g, |i| xi.cross(&y.at(i)));
    let mut adj = yc.pi_a.const_cross(xi).scaled(-1.0);
    for i in 0..3 {
        let flux = yc.pi_a.mul_scalar_field(&u[i]).expect("same grid");
        let d = flux.map_components(|c| grid::partial(c, i));
        adj = adj.add_scaled(&d, 1.0).expect("same grid");
    }
    Cotangent {
        a: leray_project(&adj),
        pi_a: leray_project(&rotation_generator(&yc.a, xi)),
        q: -xi.cross(&yc.p_total),
        p: xi.cross(&yc.q),
        pi: *xi,
    }
}

pub fn verify_momentum_map(yc: &ComovingState, xi: &Vec3) -> Result<MomentumMapReport> {
    let dj = grad_j_xi(yc, xi);
    let field = structural_apply(&yc.as_phase_vector(), &dj);
    let v = deformation_field(xi, yc);
    let diff = field.add_scaled(&v, -1.0)?;
    let residual = BlockNorms::of(&diff);
    let scale = v.norm();

    // probe direction: swap the field blocks, reuse the finite-dimensional ones
    let probe = Tangent {
        a: yc.pi_a.clone(),
        pi_a: yc.a.scaled(-0.5),
        q: yc.p_total + Vec3::new(0.3, -0.2, 0.1),
        p: yc.q + Vec3::new(-0.1, 0.4, 0.2),
        pi: yc.pi + Vec3::new(0.2, 0.1, -0.3),
    };
    let eps = 1e-3;
    let base = yc.as_phase_vector();
    let plus = ComovingState::from_phase_vector(base.add_scaled(&probe, eps)?);
    let minus = ComovingState::from_phase_vector(base.add_scaled(&probe, -eps)?);
    let fd = (j_xi(&plus, xi)? - j_xi(&minus, xi)?) / (2.0 * eps);
    let analytic = dj.pairing(&probe)?;
    let denom = fd.abs().max(analytic.abs());
    let fd_relative_error = if denom > 0.0 { (fd - analytic).abs() / denom } else { 0.0 };
    Ok(MomentumMapReport { residual, scale, fd_relative_error })
}

#[derive(Debug, Clone)]
pub struct ClassicalIdentityReport {
    pub j: Vec3,
    pub j_c: Vec3,
    pub p: Vec3,
    pub p_c: Vec3,
    /// `-∫ y∧(∇Φ ∧ curl 𝐀)` in the comoving frame.
    pub ek0_lhs: Vec3,
    /// `⟨y∧𝐀, ρ⟩` minus the angular background term, comoving frame.
    pub ek0_rhs: Vec3,
}

impl ClassicalIdentityReport {
    pub fn j_residual(&self) -> Vec3 {
        self.j - self.j_c
    }

    pub fn j_relative(&self) -> f64 {
        relative(&self.j, &self.j_c)
    }

    pub fn p_relative(&self) -> f64 {
        relative(&self.p, &self.p_c)
    }

    pub fn ek0_residual(&self) -> f64 {
        (self.ek0_lhs - self.ek0_rhs).norm()
    }
}

fn relative(a: &Vec3, b: &Vec3) -> f64 {
    let d = (a - b).norm();
    if a.norm() > 0.0 {
        d / a.norm()
    } else {
        d
    }
}

pub fn verify_classical_identity(model: &Model, y: &State) -> Result<ClassicalIdentityReport> {
    let yc = to_comoving(y)?;
    let j = angular_momentum(&yc)?;
    let (p_c, j_c) = classical_invariants(model, y)?;

    let g = *model.grid();
    let origin = Vec3::zeros();
    let phi = model.profile().coulomb_potential(&origin);
    let grad_phi = grid::gradient(&phi);
    let b = grid::curl(&yc.a);
    let yv = grid::centered_coordinate(&g, &origin);
    let mut lhs = Vec3::zeros();
    for i in 0..g.node_count() {
        lhs -= yv.at(i).cross(&grad_phi.at(i).cross(&b.at(i)));
    }
    lhs *= g.cell_volume();
    let mean = Vec3::new(yc.a[0].mean(), yc.a[1].mean(), yc.a[2].mean());
    let mut bg = Vec3::zeros();
    for i in 0..g.node_count() {
        bg += yv.at(i).cross(&(yc.a.at(i) - mean));
    }
    let rhs =
        model.profile().moment_inner(&yc.a, &origin)? - bg * (model.profile().charge() / g.volume() * g.cell_volume());
    Ok(ClassicalIdentityReport { j, j_c, p: yc.p_total, p_c, ek0_lhs: lhs, ek0_rhs: rhs })
}

#[derive(Debug, Clone)]
pub struct RotationReport {
    pub hamiltonian: f64,
    /// `max_R |𝐇(T(R)𝐘) - 𝐇(𝐘)|`
    pub max_energy_change: f64,
    /// `max_R |⟨R𝚷R⁻¹, ∇_*R𝐀R⁻¹⟩ - R⟨𝚷, ∇_*𝐀⟩|`
    pub max_transport_residual: f64,
}

impl RotationReport {
    pub fn relative(&self) -> f64 {
        if self.hamiltonian != 0.0 {
            self.max_energy_change / self.hamiltonian.abs()
        } else {
            self.max_energy_change
        }
    }
}

pub fn verify_rotation_invariance(model: &Model, yc: &ComovingState) -> Result<RotationReport> {
    let h0 = comoving_hamiltonian(model, yc)?;
    let g0 = grad_star_inner(&yc.pi_a, &yc.a)?;
    let mut max_energy_change: f64 = 0.0;
    let mut max_transport_residual: f64 = 0.0;
    for rot in cubic_group() {
        let r = rotate_state(&rot, yc);
        let h = comoving_hamiltonian(model, &r)?;
        max_energy_change = max_energy_change.max((h - h0).abs());
        let gr = grad_star_inner(&r.pi_a, &r.a)?;
        max_transport_residual = max_transport_residual.max((gr - rot.matrix() * g0).norm());
    }
    Ok(RotationReport { hamiltonian: h0, max_energy_change, max_transport_residual })
}

/// `ℒ_{v_ξ}𝐇 = ⟨D𝐇, v_ξ⟩`.
pub fn lie_derivative_h(model: &Model, yc: &ComovingState, xi: &Vec3) -> Result<f64> {
    let dh = comoving_grad(model, yc)?;
    let v = deformation_field(xi, yc);
    dh.pairing(&v)
}

/// The conjugate angular momentum's field part under the two readings of the
/// lab-frame formula: `⟨(x-q)∧A(x), ρ(x-q)⟩` (used throughout) and the literal
/// `⟨(x-q)∧A(x), ρ(x)⟩`.
pub fn spin_coupling_readings(model: &Model, y: &State) -> Result<(Vec3, Vec3)> {
    let consistent = model.profile().moment_inner(&y.a, &y.q)?;
    let g = *model.grid();
    let x = grid::centered_coordinate(&g, &y.q);
    let rho = model.profile().shifted_density(&Vec3::zeros());
    let mut literal = Vec3::zeros();
    for i in 0..g.node_count() {
        literal += x.at(i).cross(&y.a.at(i)) * rho[i];
    }
    Ok((consistent, literal * g.cell_volume()))
}

/// Diagnostics recorded along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantRecord {
    pub t: f64,
    pub h: f64,
    pub p: Vec3,
    pub p_c: Vec3,
    pub j: Vec3,
    pub j_c: Vec3,
    pub pi_norm: f64,
    pub div_a_max: f64,
    pub div_pi_max: f64,
    pub gauss_residual: f64,
}

/// `max |div E - (ρ(· - q) - Q/L³)|`.
pub fn gauss_residual(model: &Model, y: &State) -> Result<f64> {
    let d = model.derived_quantities(y)?;
    let div_e = grid::divergence(&d.e);
    let prof = model.profile();
    let g = *model.grid();
    let background = prof.charge() / g.volume();
    let rho = prof.shifted_density(&y.q);
    let expected = ScalarField::from_raw(g, rho.values().iter().map(|r| r - background).collect());
    Ok(div_e.add_scaled(&expected, -1.0)?.max_abs())
}

pub fn invariant_record(model: &Model, t: f64, y: &State) -> Result<InvariantRecord> {
    let yc = to_comoving(y)?;
    let (p_c, j_c) = classical_invariants(model, y)?;
    let (div_a_max, div_pi_max) = y.gauge_residual();
    Ok(InvariantRecord {
        t,
        h: model.hamiltonian(y)?,
        p: yc.p_total,
        p_c,
        j: angular_momentum(&yc)?,
        j_c,
        pi_norm: y.pi.norm(),
        div_a_max,
        div_pi_max,
        gauss_residual: gauss_residual(model, y)?,
    })
}
