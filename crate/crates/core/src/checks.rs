//! Structural and physical residuals evaluated on a single state, reported as
//! a pass/fail table.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comoving::{comoving_hamiltonian, to_comoving};
use crate::config::Tolerances;
use crate::error::Result;
use crate::grid::{self, GridSpec};
use crate::hamiltonian::{structural_apply, Cotangent, Model, State, Tangent};
use crate::init::random_localized_field;
use crate::momentum::{
    gauss_residual, lie_derivative_h, verify_classical_identity, verify_momentum_map, verify_rotation_invariance,
};
use crate::Vec3;

/// Steps tried by the finite-difference gradient check; the best one counts.
pub const FD_STEPS: [f64; 4] = [1e-4, 1e-5, 1e-6, 1e-7];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>24} {:>10}  result", "check", "value", "tolerance")?;
        for r in &self.rows {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{:<28} {:>24.16e} {:>10.1e}  {verdict}", r.name, r.value, r.tolerance)?;
        }
        Ok(())
    }
}

fn ratio(num: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        num / scale
    } else {
        num
    }
}

/// A random phase-space vector with localized divergence-free field blocks
/// and `O(1)` finite-dimensional blocks.
pub fn random_phase_vector(grid: &GridSpec, rng: &mut impl Rng) -> Result<Tangent> {
    let half = 0.5 * grid.len();
    let mut v3 = |s: f64| Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s));
    let centre_a = v3(0.25 * half);
    let centre_p = v3(0.25 * half);
    let (q, p, pi) = (v3(1.0), v3(1.0), v3(1.0));
    let radius = 0.4 * half;
    Ok(Tangent {
        a: random_localized_field(grid, &centre_a, radius, 1.0, rng)?,
        pi_a: random_localized_field(grid, &centre_p, radius, 1.0, rng)?,
        q,
        p,
        pi,
    })
}

/// `|⟨Z₁, 𝒥Z₂⟩ + ⟨Z₂, 𝒥Z₁⟩| / (‖Z₁‖‖Z₂‖)`.
pub fn skew_symmetry_residual(y: &State, z1: &Cotangent, z2: &Cotangent) -> Result<f64> {
    let s = z1.pairing(&structural_apply(y, z2))? + z2.pairing(&structural_apply(y, z1))?;
    Ok(ratio(s.abs(), z1.norm() * z2.norm()))
}

/// Phase-space block selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    PiA,
    Q,
    P,
    Pi,
}

impl Block {
    pub const ALL: [Block; 5] = [Block::A, Block::PiA, Block::Q, Block::P, Block::Pi];

    /// `v` with every other block zeroed.
    pub fn restrict(self, v: &Tangent) -> Tangent {
        let mut out = Tangent::zeros(*v.grid());
        match self {
            Block::A => out.a = v.a.clone(),
            Block::PiA => out.pi_a = v.pi_a.clone(),
            Block::Q => out.q = v.q,
            Block::P => out.p = v.p,
            Block::Pi => out.pi = v.pi,
        }
        out
    }
}

/// Relative mismatch between `⟨DH, δ⟩` and central differences of `H` along
/// `δ`, minimized over [`FD_STEPS`]. The scale is `‖DH‖‖δ‖` restricted to the
/// blocks `δ` touches, so a vanishing directional derivative is not
/// penalized for roundoff.
pub fn gradient_fd_error(model: &Model, y: &State, dh: &Cotangent, dir: &Tangent) -> Result<f64> {
    let analytic = dh.pairing(dir)?;
    let mut scale = 0.0;
    for b in Block::ALL {
        let d = b.restrict(dir);
        if d.norm() > 0.0 {
            scale += b.restrict(dh).norm() * d.norm();
        }
    }
    let mut best = f64::INFINITY;
    for eps in FD_STEPS {
        let hp = model.hamiltonian(&y.add_scaled(dir, eps)?)?;
        let hm = model.hamiltonian(&y.add_scaled(dir, -eps)?)?;
        let fd = (hp - hm) / (2.0 * eps);
        best = best.min(ratio((fd - analytic).abs(), scale));
    }
    Ok(best)
}

/// Worst block of [`gradient_fd_error`] over the blocks of `dir`.
pub fn gradient_block_errors(model: &Model, y: &State, dir: &Tangent) -> Result<f64> {
    let dh = model.grad_hamiltonian(y)?;
    let mut worst: f64 = 0.0;
    for b in Block::ALL {
        worst = worst.max(gradient_fd_error(model, y, &dh, &b.restrict(dir))?);
    }
    Ok(worst)
}

/// `‖Π̇ - (ΔA + 𝒫(wρ_q))‖ / (‖ΔA‖ + ‖𝒫(wρ_q)‖)`, with the right side
/// assembled from the Laplacian and the current independently of `DH`.
pub fn form_equivalence_residual(model: &Model, y: &State) -> Result<f64> {
    let rhs = model.rhs(y)?;
    let lap = grid::vector_laplacian(&y.a);
    let cur = grid::leray_project(&model.current_density(y)?);
    let expected = lap.add_scaled(&cur, 1.0)?;
    Ok(ratio(rhs.pi_a.add_scaled(&expected, -1.0)?.norm(), lap.norm() + cur.norm()))
}

/// `|𝐇(TY) - H(Y)| / |H(Y)|`.
pub fn canonical_transform_residual(model: &Model, y: &State) -> Result<f64> {
    let h = model.hamiltonian(y)?;
    let hc = comoving_hamiltonian(model, &to_comoving(y)?)?;
    Ok(ratio((hc - h).abs(), h.abs()))
}

/// `(|m q̈ - F| + |I ω̇ - T|) / max(|F| + |T|, Q²/R²)` with `F`, `T` the
/// Lorentz force and torque and the accelerations taken along the
/// Hamiltonian flow. The floor is the Coulomb force scale, so a force-free
/// state is not judged on roundoff.
pub fn newton_lorentz_residual(model: &Model, y: &State) -> Result<f64> {
    let (qdd, wd) = model.accelerations(y)?;
    let (f, t) = model.lorentz_force_torque(y)?;
    let mismatch = (model.mass() * qdd - f).norm() + (model.inertia() * wd - t).norm();
    let prof = model.profile();
    let floor = (prof.charge() / prof.radius()).powi(2);
    Ok(ratio(mismatch, (f.norm() + t.norm()).max(floor)))
}

/// Evaluate every residual on `y`. `seed` drives the random probe vectors.
pub fn run_checks(model: &Model, y: &State, tol: &Tolerances, seed: u64) -> Result<CheckReport> {
    let g = *model.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut push = |name, value, tolerance| rows.push(CheckRow { name, value, tolerance });

    let mut skew: f64 = 0.0;
    for _ in 0..4 {
        let z1 = random_phase_vector(&g, &mut rng)?;
        let z2 = random_phase_vector(&g, &mut rng)?;
        skew = skew.max(skew_symmetry_residual(y, &z1, &z2)?);
    }
    push("skew_symmetry", skew, tol.skew_symmetry);

    let dir = random_phase_vector(&g, &mut rng)?.scaled(0.1);
    push("gradient_fd", gradient_block_errors(model, y, &dir)?, tol.gradient);
    push("form_equivalence", form_equivalence_residual(model, y)?, tol.form_equivalence);
    push("canonical_transform", canonical_transform_residual(model, y)?, tol.canonical_transform);

    let yc = to_comoving(y)?;
    let h = model.hamiltonian(y)?;
    let (mut mm, mut mm_fd, mut lie): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for xi in [Vec3::x(), Vec3::y(), Vec3::z()] {
        let rep = verify_momentum_map(&yc, &xi)?;
        mm = mm.max(rep.max_relative());
        mm_fd = mm_fd.max(rep.fd_relative_error);
        lie = lie.max(ratio(lie_derivative_h(model, &yc, &xi)?.abs(), h.abs()));
    }
    push("momentum_map", mm, tol.momentum_map);
    push("momentum_map_fd", mm_fd, tol.momentum_map_fd);
    push("rotation_invariance", verify_rotation_invariance(model, &yc)?.relative(), tol.rotation_invariance);
    push("lie_derivative", lie, tol.lie_derivative);

    let classical = verify_classical_identity(model, y)?;
    push("linear_momentum_identity", classical.p_relative(), tol.linear_momentum_identity);
    push("angular_momentum_identity", classical.j_relative(), tol.angular_momentum_identity);

    push("newton_lorentz", newton_lorentz_residual(model, y)?, tol.newton_lorentz);
    push("gauss", gauss_residual(model, y)?, tol.gauss);
    let (da, dp) = y.gauge_residual();
    push("gauge", da.max(dp), tol.gauge);
    Ok(CheckReport { rows })
}
