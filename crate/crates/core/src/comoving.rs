//! Comoving-frame variables `(𝐀, 𝚷, q, P, π)` with `𝐀(y) = A(q + y)` and
//! `P = p - ⟨𝚷, ∇_*𝐀⟩`, the rotation action on them, and the infinitesimal
//! generator of that action.

use crate::error::{Error, Result};
use crate::grid::{
    self, curl_hat, inner_product, leray_project, parseval, translate_vector, GridSpec, Spectrum, VectorField3,
};
use crate::hamiltonian::{Cotangent, Model, PhaseVector, State, Tangent};
use crate::momentum::grad_star_inner;
use crate::{Mat3, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct ComovingState {
    pub a: VectorField3,
    pub pi_a: VectorField3,
    pub q: Vec3,
    /// Total momentum `P`.
    pub p_total: Vec3,
    pub pi: Vec3,
}

impl ComovingState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            a: VectorField3::zeros(grid),
            pi_a: VectorField3::zeros(grid),
            q: Vec3::zeros(),
            p_total: Vec3::zeros(),
            pi: Vec3::zeros(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.a.grid()
    }

    /// Same blocks in the generic layout, with `P` in the `p` slot.
    pub fn as_phase_vector(&self) -> PhaseVector {
        PhaseVector { a: self.a.clone(), pi_a: self.pi_a.clone(), q: self.q, p: self.p_total, pi: self.pi }
    }

    pub fn from_phase_vector(v: PhaseVector) -> Self {
        Self { a: v.a, pi_a: v.pi_a, q: v.q, p_total: v.p, pi: v.pi }
    }
}

pub fn to_comoving(y: &State) -> Result<ComovingState> {
    let a = translate_vector(&y.a, &(-y.q));
    let pi_a = translate_vector(&y.pi_a, &(-y.q));
    let p_total = y.p - grad_star_inner(&pi_a, &a)?;
    Ok(ComovingState { a, pi_a, q: y.q, p_total, pi: y.pi })
}

pub fn from_comoving(yc: &ComovingState) -> Result<State> {
    let p = yc.p_total + grad_star_inner(&yc.pi_a, &yc.a)?;
    Ok(State { a: translate_vector(&yc.a, &yc.q), pi_a: translate_vector(&yc.pi_a, &yc.q), q: yc.q, p, pi: yc.pi })
}

struct ComovingParts {
    v: Vec3,
    omega: Vec3,
    field_energy: f64,
}

fn comoving_parts(model: &Model, yc: &ComovingState) -> Result<(ComovingParts, [Spectrum; 3])> {
    if yc.a.grid() != model.grid() || yc.pi_a.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    let ah = yc.a.spectra();
    let origin = Vec3::zeros();
    let c = model.profile().couplings(&ah, &origin);
    let g = grad_star_inner(&yc.pi_a, &yc.a)?;
    let v = (yc.p_total + g - c.charge_vec()) / model.mass();
    let omega = (yc.pi - c.moment_vec()) / model.inertia();
    let bh = curl_hat(&ah);
    let magnetic: f64 = (0..3).map(|j| parseval(&bh[j], &bh[j])).sum();
    let field_energy = 0.5 * (inner_product(&yc.pi_a, &yc.pi_a)? + magnetic);
    Ok((ComovingParts { v, omega, field_energy }, ah))
}

/// The Hamiltonian expressed in comoving variables; it does not depend on `q`.
pub fn comoving_hamiltonian(model: &Model, yc: &ComovingState) -> Result<f64> {
    let (c, _) = comoving_parts(model, yc)?;
    Ok(c.field_energy + 0.5 * model.mass() * c.v.norm_squared() + 0.5 * model.inertia() * c.omega.norm_squared())
}

/// Analytic gradient of the comoving Hamiltonian, field blocks projected onto
/// divergence-free fields.
pub fn comoving_grad(model: &Model, yc: &ComovingState) -> Result<Cotangent> {
    let (c, _) = comoving_parts(model, yc)?;
    let (v, omega) = (c.v, c.omega);
    let prof = model.profile();
    let g = *model.grid();

    let transport_a = transport(&yc.a, &v);
    let transport_pi = transport(&yc.pi_a, &v);
    let origin = Vec3::zeros();
    let rho = prof.shifted_density(&origin);
    let mom = prof.shifted_moments(&origin);
    let curlcurl = grid::curl(&grid::curl(&yc.a));
    let coupling = VectorField3::from_indexed(g, |i| v * rho[i] + omega.cross(&mom.at(i)));
    let d_a = curlcurl.add_scaled(&transport_pi, -1.0)?.add_scaled(&coupling, -1.0)?;
    let d_pi = yc.pi_a.add_scaled(&transport_a, 1.0)?;
    Ok(Cotangent { a: leray_project(&d_a), pi_a: leray_project(&d_pi), q: Vec3::zeros(), p: v, pi: omega })
}

/// `(u·∇)F` for a constant vector `u`.
pub fn transport(f: &VectorField3, u: &Vec3) -> VectorField3 {
    f.map_components(|c| {
        let mut s = c.spectrum();
        let g = s.grid;
        let k = g.wavenumbers();
        for (idx, val) in s.data.iter_mut().enumerate() {
            let (ix, iy, iz) = g.unindex(idx);
            let ku = u.x * k[ix] + u.y * k[iy] + u.z * k[iz];
            *val *= num_complex::Complex64::new(0.0, ku);
        }
        s.into_real()
    })
}

/// `ξ̂`, so that `hat(ξ)·u = ξ ∧ u`.
pub fn hat(xi: &Vec3) -> Mat3 {
    Mat3::new(0.0, -xi.z, xi.y, xi.z, 0.0, -xi.x, -xi.y, xi.x, 0.0)
}

/// A proper rotation. Cube symmetries act on the grid exactly; any other
/// rotation falls back to trilinear resampling and is flagged approximate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    matrix: Mat3,
    exact: bool,
}

impl Rotation {
    pub fn new(matrix: Mat3) -> Result<Self> {
        let orth = (matrix.transpose() * matrix - Mat3::identity()).abs().max();
        if !(orth < 1e-10 && (matrix.determinant() - 1.0).abs() < 1e-10) {
            return Err(Error::NotARotation);
        }
        let exact = matrix.iter().all(|&v| v == 0.0 || v == 1.0 || v == -1.0);
        Ok(Self { matrix, exact })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat3::identity(), exact: true }
    }

    /// `e^{s ξ̂}` via Rodrigues' formula.
    pub fn from_axis_angle(xi: &Vec3, s: f64) -> Self {
        let theta = xi.norm() * s;
        if theta == 0.0 {
            return Self::identity();
        }
        let k = hat(&(xi / xi.norm()));
        let m = Mat3::identity() + theta.sin() * k + (1.0 - theta.cos()) * k * k;
        Self { matrix: m, exact: false }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let m = self.matrix * other.matrix;
        let exact = self.exact && other.exact;
        Rotation { matrix: if exact { m.map(f64::round) } else { m }, exact }
    }
}

/// The 24 rotations of the cube.
pub fn cubic_group() -> Vec<Rotation> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in 0..8u8 {
            let mut m = Mat3::zeros();
            for (row, &col) in perm.iter().enumerate() {
                m[(row, col)] = if signs & (1 << row) != 0 { -1.0 } else { 1.0 };
            }
            if m.determinant() > 0.0 {
                out.push(Rotation { matrix: m, exact: true });
            }
        }
    }
    out
}

/// `y ↦ R F(R⁻¹ y)` on the grid.
pub fn rotate_field(rot: &Rotation, f: &VectorField3) -> VectorField3 {
    let g = *f.grid();
    let r = rot.matrix;
    let rinv = r.transpose();
    if rot.exact {
        let n = g.n() as i64;
        let half = n / 2;
        VectorField3::from_indexed(g, |idx| {
            let (ix, iy, iz) = g.unindex(idx);
            let s = Vec3::new((ix as i64 - half) as f64, (iy as i64 - half) as f64, (iz as i64 - half) as f64);
            let src = rinv * s;
            let wrap = |v: f64| ((v.round() as i64 + half).rem_euclid(n)) as usize;
            let j = g.index(wrap(src.x), wrap(src.y), wrap(src.z));
            r * f.at(j)
        })
    } else {
        VectorField3::from_indexed(g, |idx| {
            let src = rinv * g.node(idx);
            r * trilinear(f, &src)
        })
    }
}

fn trilinear(f: &VectorField3, x: &Vec3) -> Vec3 {
    let g = f.grid();
    let n = g.n() as i64;
    let h = g.spacing();
    let mut base = [0i64; 3];
    let mut frac = [0.0; 3];
    for d in 0..3 {
        let s = (x[d] + 0.5 * g.len()) / h;
        let fl = s.floor();
        base[d] = fl as i64;
        frac[d] = s - fl;
    }
    let mut out = Vec3::zeros();
    for corner in 0..8 {
        let mut w = 1.0;
        let mut id = [0usize; 3];
        for d in 0..3 {
            let bit = (corner >> d) & 1;
            w *= if bit == 1 { frac[d] } else { 1.0 - frac[d] };
            id[d] = (base[d] + bit as i64).rem_euclid(n) as usize;
        }
        out += w * f.at(g.index(id[0], id[1], id[2]));
    }
    out
}

/// `T(R)𝐘 = (R𝐀(R⁻¹y), R𝚷(R⁻¹y), Rq, RP, Rπ)`.
pub fn rotate_state(rot: &Rotation, yc: &ComovingState) -> ComovingState {
    let r = rot.matrix;
    ComovingState {
        a: rotate_field(rot, &yc.a),
        pi_a: rotate_field(rot, &yc.pi_a),
        q: r * yc.q,
        p_total: r * yc.p_total,
        pi: r * yc.pi,
    }
}

/// `ξ ∧ F - ((ξ ∧ y)·∇)F` with `y` the coordinate centred at the origin.
pub fn rotation_generator(f: &VectorField3, xi: &Vec3) -> VectorField3 {
    let g = *f.grid();
    let y = grid::centered_coordinate(&g, &Vec3::zeros());
    let grads: Vec<VectorField3> = (0..3).map(|j| grid::gradient(&f[j])).collect();
    VectorField3::from_indexed(g, |i| {
        let u = xi.cross(&y.at(i));
        let fv = f.at(i);
        let adv = Vec3::new(u.dot(&grads[0].at(i)), u.dot(&grads[1].at(i)), u.dot(&grads[2].at(i)));
        xi.cross(&fv) - adv
    })
}

/// Infinitesimal generator `v_ξ` of the rotation action, with `P` in the `p`
/// slot of the returned tangent.
pub fn deformation_field(xi: &Vec3, yc: &ComovingState) -> Tangent {
    Tangent {
        a: rotation_generator(&yc.a, xi),
        pi_a: rotation_generator(&yc.pi_a, xi),
        q: xi.cross(&yc.q),
        p: xi.cross(&yc.p_total),
        pi: xi.cross(&yc.pi),
    }
}
