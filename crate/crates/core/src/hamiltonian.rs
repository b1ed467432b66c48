//! Phase space, Hamiltonian, its gradient and the Poisson structure.
//!
//! A phase point is `(A, Π, q, p, π)`: the Coulomb-gauge vector potential and
//! its conjugate momentum, the particle centre, and the conjugate linear and
//! angular momenta. The Hamiltonian is
//!
//! ```text
//! H = ½⟨Π,Π⟩ + ½⟨curl A, curl A⟩ + |p - ⟨A, ρ_q⟩|²/2m + |π - ⟨(x-q)∧A, ρ_q⟩|²/2I
//! ```
//!
//! and the evolution is `Ẏ = 𝒥(Y) DH(Y)` with the block operator
//! `𝒥(Y) Z = (Z_Π, -Z_A, Z_p, -Z_q, -π ∧ Z_π)`.

use num_complex::Complex64;

use crate::charge::{levi_civita_contract, shifted_pairings, ChargeProfile, Couplings};
use crate::error::{Error, Result};
use crate::grid::{
    self, curl_hat, inner_product, leray_project, parseval, phase_table, GridSpec, ScalarField, Spectrum, VectorField3,
};
use crate::Vec3;

/// A point of phase space or a (co)tangent vector at one; all three share the
/// block layout `(A, Π, q, p, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    pub a: VectorField3,
    pub pi_a: VectorField3,
    pub q: Vec3,
    pub p: Vec3,
    pub pi: Vec3,
}

pub type State = PhaseVector;
pub type Tangent = PhaseVector;
pub type Cotangent = PhaseVector;

impl PhaseVector {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            a: VectorField3::zeros(grid),
            pi_a: VectorField3::zeros(grid),
            q: Vec3::zeros(),
            p: Vec3::zeros(),
            pi: Vec3::zeros(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.a.grid()
    }

    /// `self + s·other`, blockwise.
    pub fn add_scaled(&self, other: &PhaseVector, s: f64) -> Result<Self> {
        Ok(Self {
            a: self.a.add_scaled(&other.a, s)?,
            pi_a: self.pi_a.add_scaled(&other.pi_a, s)?,
            q: self.q + s * other.q,
            p: self.p + s * other.p,
            pi: self.pi + s * other.pi,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { a: self.a.scaled(s), pi_a: self.pi_a.scaled(s), q: s * self.q, p: s * self.p, pi: s * self.pi }
    }

    /// Duality pairing: field inner products plus Euclidean dot products.
    pub fn pairing(&self, other: &PhaseVector) -> Result<f64> {
        Ok(inner_product(&self.a, &other.a)?
            + inner_product(&self.pi_a, &other.pi_a)?
            + self.q.dot(&other.q)
            + self.p.dot(&other.p)
            + self.pi.dot(&other.pi))
    }

    pub fn norm(&self) -> f64 {
        self.pairing(self).map(f64::sqrt).unwrap_or(f64::NAN)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite()
            && self.pi_a.is_finite()
            && self.q.iter().chain(self.p.iter()).chain(self.pi.iter()).all(|v| v.is_finite())
    }

    /// `(max |div A|, max |div Π|)`.
    pub fn gauge_residual(&self) -> (f64, f64) {
        (grid::divergence(&self.a).max_abs(), grid::divergence(&self.pi_a).max_abs())
    }

    /// Leray-project both field blocks.
    pub fn reproject(&self) -> Self {
        Self { a: leray_project(&self.a), pi_a: leray_project(&self.pi_a), q: self.q, p: self.p, pi: self.pi }
    }
}

/// Apply the structural operator: `(Z_Π, -Z_A, Z_p, -Z_q, -π ∧ Z_π)`.
pub fn structural_apply(y: &State, z: &Cotangent) -> Tangent {
    Tangent { a: z.pi_a.clone(), pi_a: z.a.scaled(-1.0), q: z.p, p: -z.q, pi: -y.pi.cross(&z.pi) }
}

#[derive(Debug, Clone)]
pub struct DerivedQuantities {
    pub v: Vec3,
    pub omega: Vec3,
    pub e: VectorField3,
    pub b: VectorField3,
    pub phi: ScalarField,
}

/// Physical parameters bundled with the charge profile.
#[derive(Debug, Clone)]
pub struct Model {
    profile: ChargeProfile,
    mass: f64,
    inertia: f64,
}

impl Model {
    pub fn new(profile: ChargeProfile, mass: f64, inertia: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(inertia.is_finite() && inertia > 0.0) {
            return Err(Error::InvalidParameter(format!("moment of inertia must be positive, got {inertia}")));
        }
        Ok(Self { profile, mass, inertia })
    }

    pub fn grid(&self) -> &GridSpec {
        self.profile.grid()
    }

    pub fn profile(&self) -> &ChargeProfile {
        &self.profile
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    fn check(&self, y: &State) -> Result<()> {
        if y.a.grid() != self.grid() || y.pi_a.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn velocities_from(&self, y: &State, c: &Couplings) -> (Vec3, Vec3) {
        let v = (y.p - c.charge_vec()) / self.mass;
        let omega = (y.pi - c.moment_vec()) / self.inertia;
        (v, omega)
    }

    /// `(q̇, ω)` recovered from the conjugate momenta.
    pub fn velocities(&self, y: &State) -> Result<(Vec3, Vec3)> {
        self.check(y)?;
        let ah = y.a.spectra();
        let c = self.profile.couplings(&ah, &y.q);
        Ok(self.velocities_from(y, &c))
    }

    pub fn hamiltonian(&self, y: &State) -> Result<f64> {
        self.check(y)?;
        let ah = y.a.spectra();
        let c = self.profile.couplings(&ah, &y.q);
        let (v, omega) = self.velocities_from(y, &c);
        let bh = curl_hat(&ah);
        let magnetic: f64 = (0..3).map(|j| parseval(&bh[j], &bh[j])).sum();
        let electric = inner_product(&y.pi_a, &y.pi_a)?;
        Ok(0.5 * (electric + magnetic) + 0.5 * self.mass * v.norm_squared() + 0.5 * self.inertia * omega.norm_squared())
    }

    /// `DH(Y)`. The `A` block is the gradient restricted to divergence-free
    /// fields, i.e. Leray-projected.
    pub fn grad_hamiltonian(&self, y: &State) -> Result<Cotangent> {
        self.check(y)?;
        let g = *self.grid();
        let ah = y.a.spectra();
        let c = self.profile.couplings(&ah, &y.q);
        let (v, omega) = self.velocities_from(y, &c);

        let mut dq = Vec3::zeros();
        for i in 0..3 {
            let da = Vec3::from(c.charge_dq[i]);
            let db = levi_civita_contract(&c.moment_dq[i]);
            dq[i] = -v.dot(&da) - omega.dot(&db);
        }

        // curl curl A - [v ρ_q + ω ∧ (yρ)_q], projected
        let k = g.wavenumbers();
        let px = phase_table(&g, y.q.x);
        let py = phase_table(&g, y.q.y);
        let pz = phase_table(&g, y.q.z);
        let prof = &self.profile;
        let mut out = [Spectrum::zeros(g), Spectrum::zeros(g), Spectrum::zeros(g)];
        for idx in 0..g.node_count() {
            let (ix, iy, iz) = g.unindex(idx);
            let kv = [k[ix], k[iy], k[iz]];
            let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            let av = [ah[0].data[idx], ah[1].data[idx], ah[2].data[idx]];
            let kdota = kv[0] * av[0] + kv[1] * av[1] + kv[2] * av[2];
            let phase = px[ix] * py[iy] * pz[iz];
            let r = prof.rho_hat.data[idx];
            let m = [prof.moment_hat[0].data[idx], prof.moment_hat[1].data[idx], prof.moment_hat[2].data[idx]];
            let cur = current_mode(&v, &omega, r, &m, phase);
            let mut gv = [Complex64::new(0.0, 0.0); 3];
            for j in 0..3 {
                gv[j] = k2 * av[j] - kv[j] * kdota - cur[j];
            }
            if k2 != 0.0 {
                let kg = (kv[0] * gv[0] + kv[1] * gv[1] + kv[2] * gv[2]) / k2;
                for j in 0..3 {
                    gv[j] -= kv[j] * kg;
                }
            }
            for j in 0..3 {
                out[j].data[idx] = gv[j];
            }
        }

        Ok(Cotangent { a: VectorField3::from_spectra(out), pi_a: y.pi_a.clone(), q: dq, p: v, pi: omega })
    }

    /// `𝒥(Y) DH(Y)`.
    pub fn rhs(&self, y: &State) -> Result<Tangent> {
        let dh = self.grad_hamiltonian(y)?;
        Ok(structural_apply(y, &dh))
    }

    /// The current `w ρ(· - q)` with `w = q̇ + ω ∧ (x - q)`, assembled from the
    /// shifted charge and moment kernels.
    pub fn current_density(&self, y: &State) -> Result<VectorField3> {
        let (v, omega) = self.velocities(y)?;
        let rho = self.profile.shifted_density(&y.q);
        let mom = self.profile.shifted_moments(&y.q);
        let g = *self.grid();
        Ok(VectorField3::from_indexed(g, |i| v * rho[i] + omega.cross(&mom.at(i))))
    }

    pub fn derived_quantities(&self, y: &State) -> Result<DerivedQuantities> {
        let (v, omega) = self.velocities(y)?;
        let phi = self.profile.coulomb_potential(&y.q);
        let b = grid::curl(&y.a);
        let e = y.pi_a.scaled(-1.0).add_scaled(&grid::gradient(&phi), -1.0)?;
        Ok(DerivedQuantities { v, omega, e, b, phi })
    }

    /// Lorentz force `⟨E + w∧B, ρ_q⟩` and torque `⟨(x-q)∧[E + w∧B], ρ_q⟩`.
    pub fn lorentz_force_torque(&self, y: &State) -> Result<(Vec3, Vec3)> {
        let d = self.derived_quantities(y)?;
        Ok(self.lorentz_from_fields(&d.e, &d.b, &d.v, &d.omega, &y.q))
    }

    /// `(q̈, ω̇)` along the flow, by differentiating `q̇ = (p - a)/m` and
    /// `ω = (π - b)/I` with `Ẏ = rhs(Y)`.
    pub fn accelerations(&self, y: &State) -> Result<(Vec3, Vec3)> {
        self.check(y)?;
        let ydot = self.rhs(y)?;
        let ah = y.a.spectra();
        let c = self.profile.couplings(&ah, &y.q);
        let adot = self.profile.couplings(&ydot.a.spectra(), &y.q);
        let mut a_rate = adot.charge_vec();
        let mut b_rate = adot.moment_vec();
        for i in 0..3 {
            a_rate += ydot.q[i] * Vec3::from(c.charge_dq[i]);
            b_rate += ydot.q[i] * levi_civita_contract(&c.moment_dq[i]);
        }
        Ok(((ydot.p - a_rate) / self.mass, (ydot.pi - b_rate) / self.inertia))
    }

    pub(crate) fn lorentz_from_fields(
        &self,
        e: &VectorField3,
        b: &VectorField3,
        v: &Vec3,
        omega: &Vec3,
        q: &Vec3,
    ) -> (Vec3, Vec3) {
        let prof = &self.profile;
        let eh = e.spectra();
        let bh = b.spectra();
        let e_force = prof.charge_inner_hat(&eh, q);
        let e_torque = prof.moment_inner_hat(&eh, q);
        let b_charge = prof.charge_inner_hat(&bh, q);
        // mm[i][k] = ⟨B_k, (y_i ρ)_q⟩
        let mm = prof.moment_matrix(&bh, q);
        let tr = mm[0][0] + mm[1][1] + mm[2][2];
        // Σ_k ⟨B_k, (y_j y_k ρ)_q⟩ = -⟨B_j, Ψ_q⟩ since y_j y ρ = ∇(y_j Ψ) - Ψ e_j
        // and div B = 0
        let kernel = [&prof.potential_hat];
        let row_sum = Vec3::new(
            -shifted_pairings(&bh[0], &kernel, q)[0],
            -shifted_pairings(&bh[1], &kernel, q)[0],
            -shifted_pairings(&bh[2], &kernel, q)[0],
        );

        let mut force = e_force + v.cross(&b_charge);
        let mut torque = e_torque + omega.cross(&row_sum);
        for i in 0..3 {
            let mut f = -omega[i] * tr;
            let mut t = v[i] * tr;
            for k in 0..3 {
                f += omega[k] * mm[i][k];
                t -= v[k] * mm[k][i];
            }
            force[i] += f;
            torque[i] += t;
        }
        (force, torque)
    }
}

/// Fourier coefficient of `v ρ_q + ω ∧ (yρ)_q` at one mode.
#[inline]
fn current_mode(v: &Vec3, omega: &Vec3, rho: Complex64, m: &[Complex64; 3], phase: Complex64) -> [Complex64; 3] {
    [
        (v.x * rho + omega.y * m[2] - omega.z * m[1]) * phase,
        (v.y * rho + omega.z * m[0] - omega.x * m[2]) * phase,
        (v.z * rho + omega.x * m[1] - omega.y * m[0]) * phase,
    ]
}
