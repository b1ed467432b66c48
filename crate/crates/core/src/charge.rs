//! The rigid charge density and its pairings with fields.
//!
//! Kernels are built from the continuum Fourier transform of the profile,
//! truncated to the resolved band (Nyquist planes dropped). Pairing a
//! band-limited field with a truncated kernel then gives the exact integral
//! against the true profile, whether or not the profile itself is resolved.
//! Pairings with a charge centred at an arbitrary `q` apply the phase
//! `e^{-ik·q}`, so `q` moves continuously between nodes and every pairing is a
//! smooth, exactly differentiable function of `q`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{phase_table, GridSpec, ScalarField, Spectrum, VectorField3};
use crate::Vec3;

/// Unnormalized bump `exp(-R²/(R² - r²))` for `r < R`, zero otherwise.
pub fn bump(radius: f64, r: f64) -> f64 {
    let r2 = radius * radius;
    let d = r2 - r * r;
    if d <= 0.0 {
        0.0
    } else {
        (-r2 / d).exp()
    }
}

/// Intervals of the radial trapezoid rule. The integrands are even in `r`
/// and vanish to all orders at `R`, so the rule converges faster than any
/// power; 4096 intervals put the error at roundoff for `κR` up to a few
/// hundred.
const RADIAL_INTERVALS: usize = 4096;

/// `sin x / x`
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(x cos x - sin x) / x³`
fn sinc_derivative_ratio(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0
    } else {
        (x * x.cos() - x.sin()) / (x * x * x)
    }
}

/// Continuum transforms of the unnormalized bump at `|k| = κ`:
/// `(∫ bump e^{-ik·y} dy, ∫ Ψ e^{-ik·y} dy)` with `∇Ψ = y·bump`, `Ψ(R) = 0`.
fn radial_transforms(radius: f64, kappa: f64) -> (f64, f64) {
    let dr = radius / RADIAL_INTERVALS as f64;
    let (mut s0, mut s1) = (0.0, 0.0);
    for i in 1..RADIAL_INTERVALS {
        let r = i as f64 * dr;
        let w = bump(radius, r) * r * r;
        s0 += w * sinc(kappa * r);
        s1 += w * r * r * sinc_derivative_ratio(kappa * r);
    }
    let c = 4.0 * std::f64::consts::PI * dr;
    (c * s0, c * s1)
}

/// `ε_{njm}` contraction `Σ_{jm} ε_{njm} t[j][m]`.
pub(crate) fn levi_civita_contract(t: &[[f64; 3]; 3]) -> Vec3 {
    Vec3::new(t[1][2] - t[2][1], t[2][0] - t[0][2], t[0][1] - t[1][0])
}

#[derive(Debug, Clone)]
pub struct ChargeProfile {
    grid: GridSpec,
    radius: f64,
    charge: f64,
    normalization: f64,
    mean_square_radius: f64,
    rho: ScalarField,
    moments: [ScalarField; 3],
    pub(crate) rho_hat: Spectrum,
    /// `ik_j Ψ̂`, the transform of `y_j ρ(y)`.
    pub(crate) moment_hat: [Spectrum; 3],
    /// `Ψ(y) = -∫_{|y|}^R s ρ(s) ds`, so that `y ρ = ∇Ψ` and
    /// `y_j y ρ = ∇(y_j Ψ) - Ψ e_j`.
    pub(crate) potential_hat: Spectrum,
}

impl ChargeProfile {
    pub fn new(radius: f64, charge: f64, grid: GridSpec) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("R_rho must be positive, got {radius}")));
        }
        if !charge.is_finite() {
            return Err(Error::NonFinite("total charge"));
        }
        if 2.0 * radius >= 0.5 * grid.len() {
            return Err(Error::SupportTooLarge { diameter: 2.0 * radius, limit: 0.5 * grid.len() });
        }
        let (mass0, psi0) = radial_transforms(radius, 0.0);
        let normalization = charge / mass0;
        let mean_square_radius = -3.0 * psi0 / mass0;

        // transforms depend on |k|² = (2π/L)² m with integer m
        let half = (grid.n() / 2) as i64;
        let max_m = 3 * (half - 1) * (half - 1);
        let dk = 2.0 * std::f64::consts::PI / grid.len();
        let table: Vec<(f64, f64)> =
            (0..=max_m).into_par_iter().map(|m| radial_transforms(radius, dk * (m as f64).sqrt())).collect();

        // DFT of band-limited node samples: (-1)^(mx+my+mz) F(k) / h³, nodes
        // starting at -L/2
        let scale = normalization / grid.cell_volume();
        let mut rho_hat = Spectrum::zeros(grid);
        let mut potential_hat = Spectrum::zeros(grid);
        for idx in 0..grid.node_count() {
            let (ix, iy, iz) = grid.unindex(idx);
            if grid.is_nyquist(ix) || grid.is_nyquist(iy) || grid.is_nyquist(iz) {
                continue;
            }
            let (mx, my, mz) = (grid.mode(ix), grid.mode(iy), grid.mode(iz));
            let sign = if (mx + my + mz).rem_euclid(2) == 0 { scale } else { -scale };
            let (r, p) = table[(mx * mx + my * my + mz * mz) as usize];
            rho_hat.data[idx] = Complex64::new(sign * r, 0.0);
            potential_hat.data[idx] = Complex64::new(sign * p, 0.0);
        }
        let moment_hat = [0, 1, 2].map(|j| {
            let mut s = potential_hat.clone();
            s.apply_derivative(j);
            s
        });
        let rho = rho_hat.clone().into_real();
        let moments = moment_hat.clone().map(Spectrum::into_real);
        Ok(Self {
            grid,
            radius,
            charge,
            normalization,
            mean_square_radius,
            rho,
            moments,
            rho_hat,
            moment_hat,
            potential_hat,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// The constant `C` in `ρ = C·bump`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Analytic density at distance `r` from the centre.
    pub fn density(&self, r: f64) -> f64 {
        self.normalization * bump(self.radius, r)
    }

    /// `ρ` centred at the origin, band-limited, on the nodes.
    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    /// The moment kernels `y_j ρ(y)`, band-limited, on the nodes.
    pub fn moment_kernels(&self) -> &[ScalarField; 3] {
        &self.moments
    }

    /// `∫|y|²ρ / ∫ρ`.
    pub fn mean_square_radius(&self) -> f64 {
        self.mean_square_radius
    }

    /// Band-limited `ρ(· - q)` on the nodes.
    pub fn shifted_density(&self, q: &Vec3) -> ScalarField {
        let mut s = self.rho_hat.clone();
        s.apply_shift(q);
        s.into_real()
    }

    /// Band-limited `(y_j ρ)(· - q)` on the nodes.
    pub fn shifted_moments(&self, q: &Vec3) -> VectorField3 {
        let f = |j: usize| {
            let mut s = self.moment_hat[j].clone();
            s.apply_shift(q);
            s
        };
        VectorField3::from_spectra([f(0), f(1), f(2)])
    }

    /// `⟨F, ρ(· - q)⟩` componentwise.
    pub fn charge_inner(&self, f: &VectorField3, q: &Vec3) -> Result<Vec3> {
        self.check_grid(f.grid())?;
        let fh = f.spectra();
        let k = [&self.rho_hat];
        let mut out = [[0.0; 1]; 3];
        for j in 0..3 {
            out[j] = shifted_pairings(&fh[j], &k, q);
        }
        Ok(Vec3::new(out[0][0], out[1][0], out[2][0]))
    }

    /// `⟨(x - q) ∧ F(x), ρ(x - q)⟩`.
    pub fn moment_inner(&self, f: &VectorField3, q: &Vec3) -> Result<Vec3> {
        self.check_grid(f.grid())?;
        let fh = f.spectra();
        Ok(self.moment_inner_hat(&fh, q))
    }

    pub(crate) fn moment_inner_hat(&self, fh: &[Spectrum; 3], q: &Vec3) -> Vec3 {
        levi_civita_contract(&self.moment_matrix(fh, q))
    }

    /// `t[j][m] = ⟨F_m, (y_j ρ)(· - q)⟩`.
    pub(crate) fn moment_matrix(&self, fh: &[Spectrum; 3], q: &Vec3) -> [[f64; 3]; 3] {
        let kernels = [&self.moment_hat[0], &self.moment_hat[1], &self.moment_hat[2]];
        let mut t = [[0.0; 3]; 3];
        for m in 0..3 {
            let p = shifted_pairings(&fh[m], &kernels, q);
            for j in 0..3 {
                t[j][m] = p[j];
            }
        }
        t
    }

    pub(crate) fn charge_inner_hat(&self, fh: &[Spectrum; 3], q: &Vec3) -> Vec3 {
        let k = [&self.rho_hat];
        Vec3::new(
            shifted_pairings(&fh[0], &k, q)[0],
            shifted_pairings(&fh[1], &k, q)[0],
            shifted_pairings(&fh[2], &k, q)[0],
        )
    }

    /// Coulomb potential of the shifted charge with neutralizing background:
    /// `ΔΦ = -(ρ(· - q) - Q/L³)`, `mean(Φ) = 0`.
    pub fn coulomb_potential(&self, q: &Vec3) -> ScalarField {
        let mut s = self.rho_hat.clone();
        s.apply_shift(q);
        s.apply_inverse_laplacian();
        s.into_real().scaled(-1.0)
    }

    fn check_grid(&self, g: &GridSpec) -> Result<()> {
        if *g == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Couplings of a field and their `q`-gradients, evaluated in one sweep.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn couplings(&self, fh: &[Spectrum; 3], q: &Vec3) -> Couplings {
        let g = self.grid;
        let k = g.wavenumbers();
        let px = phase_table(&g, -q.x);
        let py = phase_table(&g, -q.y);
        let pz = phase_table(&g, -q.z);

        // value and three q-derivatives for each (kernel, component) pair
        let mut acc = [[[0.0f64; 4]; 3]; 4];
        for idx in 0..g.node_count() {
            let (ix, iy, iz) = g.unindex(idx);
            let phase = px[ix] * py[iy] * pz[iz];
            if phase == Complex64::new(0.0, 0.0) {
                continue;
            }
            let kv = [k[ix], k[iy], k[iz]];
            let kernels = [
                self.rho_hat.data[idx],
                self.moment_hat[0].data[idx],
                self.moment_hat[1].data[idx],
                self.moment_hat[2].data[idx],
            ];
            for (c, kern) in kernels.iter().enumerate() {
                let w = kern.conj() * phase;
                for m in 0..3 {
                    let z = fh[m].data[idx] * w;
                    let a = &mut acc[c][m];
                    a[0] += z.re;
                    // d/dq_i of e^{ik·q} brings down i k_i
                    a[1] -= kv[0] * z.im;
                    a[2] -= kv[1] * z.im;
                    a[3] -= kv[2] * z.im;
                }
            }
        }
        let s = g.cell_volume() / g.node_count() as f64;
        let mut out = Couplings::default();
        for m in 0..3 {
            out.charge[m] = acc[0][m][0] * s;
            for i in 0..3 {
                out.charge_dq[i][m] = acc[0][m][i + 1] * s;
            }
            for j in 0..3 {
                out.moment[j][m] = acc[j + 1][m][0] * s;
                for i in 0..3 {
                    out.moment_dq[i][j][m] = acc[j + 1][m][i + 1] * s;
                }
            }
        }
        out
    }
}

/// `⟨F, K(· - q)⟩` for a field spectrum against several kernels.
pub(crate) fn shifted_pairings<const K: usize>(f: &Spectrum, kernels: &[&Spectrum; K], q: &Vec3) -> [f64; K] {
    let g = f.grid;
    let px = phase_table(&g, -q.x);
    let py = phase_table(&g, -q.y);
    let pz = phase_table(&g, -q.z);
    let mut acc = [0.0; K];
    for idx in 0..g.node_count() {
        let (ix, iy, iz) = g.unindex(idx);
        let phase = px[ix] * py[iy] * pz[iz];
        let fv = f.data[idx] * phase;
        for (a, kern) in acc.iter_mut().zip(kernels) {
            *a += (fv * kern.data[idx].conj()).re;
        }
    }
    let s = g.cell_volume() / g.node_count() as f64;
    acc.map(|a| a * s)
}

/// Pairings of a vector field with the shifted charge and moment kernels.
#[derive(Debug, Clone, Default)]
pub(crate) struct Couplings {
    /// `⟨F_m, ρ_q⟩`
    pub charge: [f64; 3],
    /// `∂/∂q_i ⟨F_m, ρ_q⟩`
    pub charge_dq: [[f64; 3]; 3],
    /// `⟨F_m, (y_j ρ)_q⟩` indexed `[j][m]`
    pub moment: [[f64; 3]; 3],
    /// `∂/∂q_i ⟨F_m, (y_j ρ)_q⟩` indexed `[i][j][m]`
    pub moment_dq: [[[f64; 3]; 3]; 3],
}

impl Couplings {
    pub fn charge_vec(&self) -> Vec3 {
        Vec3::from(self.charge)
    }

    pub fn moment_vec(&self) -> Vec3 {
        levi_civita_contract(&self.moment)
    }
}
