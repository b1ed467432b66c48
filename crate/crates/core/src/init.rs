//! Initial data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comoving::transport;
use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, VectorField3};
use crate::hamiltonian::{Model, State};
use crate::Vec3;

/// Position and conjugate momenta of the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleInit {
    pub q0: Vec3,
    pub p0: Vec3,
    pub pi0: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldInit {
    /// `A = Π = 0`.
    Zero,
    /// Quasi-static field dragged along by the particle: `-ΔA = 𝒫(wρ_q)`,
    /// `Π = -(q̇·∇)A`, iterated so the velocities agree with the momenta.
    SolitonGuess,
    /// Divergence-free Gaussian wave packets centred on the particle.
    RandomLocalized { seed: u64, envelope_radius: f64, amplitude: f64 },
}

pub fn initial_state(model: &Model, particle: &ParticleInit, fields: &FieldInit) -> Result<State> {
    let g = *model.grid();
    let mut y = State::zeros(g);
    y.q = particle.q0;
    y.p = particle.p0;
    y.pi = particle.pi0;
    match *fields {
        FieldInit::Zero => {}
        FieldInit::SolitonGuess => soliton_guess(model, &mut y)?,
        FieldInit::RandomLocalized { seed, envelope_radius, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            y.a = random_localized_field(&g, &particle.q0, envelope_radius, amplitude, &mut rng)?;
            y.pi_a = random_localized_field(&g, &particle.q0, envelope_radius, amplitude, &mut rng)?;
        }
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    Ok(y)
}

fn soliton_guess(model: &Model, y: &mut State) -> Result<()> {
    for _ in 0..50 {
        let (v, _) = model.velocities(y)?;
        let j = grid::leray_project(&model.current_density(y)?);
        let a = j.map_components(|c| grid::laplacian_inverse(c).scaled(-1.0));
        let change = a.add_scaled(&y.a, -1.0)?.max_abs();
        y.pi_a = transport(&a, &v).scaled(-1.0);
        y.a = a;
        if change <= 1e-14 * y.a.max_abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(())
}

/// Width of each packet relative to the envelope radius.
const WIDTH_FRACTION: f64 = 0.25;

/// `curl G` where `G` is a Gaussian of width `R/4` centred at `centre`,
/// multiplied by a random polynomial of degree ≤ 2 in `(x - centre)/σ`.
/// Exactly divergence-free, free of Nyquist modes, accurate when `σ` spans a
/// few grid cells, and negligible beyond the envelope radius `R`.
pub fn random_localized_field(
    grid: &GridSpec,
    centre: &Vec3,
    envelope_radius: f64,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Result<VectorField3> {
    if !(envelope_radius > 0.0 && envelope_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("envelope radius must be positive, got {envelope_radius}")));
    }
    let sigma = WIDTH_FRACTION * envelope_radius;
    // coefficients for 1, y_i, y_i y_j (i <= j) per component
    let mut coef = [[0.0; 10]; 3];
    for c in coef.iter_mut() {
        for v in c.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    let g = *grid;
    let centre = *centre;
    let potential = VectorField3::from_fn(g, move |x| {
        let d = Vec3::new(g.wrap(x.x - centre.x), g.wrap(x.y - centre.y), g.wrap(x.z - centre.z)) / sigma;
        let env = (-0.5 * d.norm_squared()).exp();
        let basis = [1.0, d.x, d.y, d.z, d.x * d.x, d.x * d.y, d.x * d.z, d.y * d.y, d.y * d.z, d.z * d.z];
        let mut out = Vec3::zeros();
        for (j, c) in coef.iter().enumerate() {
            out[j] = env * c.iter().zip(basis.iter()).map(|(a, b)| a * b).sum::<f64>();
        }
        out
    });
    let f = grid::band_limit(&grid::curl(&potential));
    let peak = f.max_abs();
    Ok(if peak > 0.0 { f.scaled(amplitude / peak) } else { f })
}
