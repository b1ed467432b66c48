//! Acceptance criteria 1-10. Runs as a plain binary (no libtest harness) so
//! every criterion prints exactly one PASS/FAIL line; exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlspin::checks::{
    canonical_transform_residual, form_equivalence_residual, gradient_block_errors, random_phase_vector,
    skew_symmetry_residual,
};
use mlspin::comoving::to_comoving;
use mlspin::config::SimConfig;
use mlspin::init::{initial_state, FieldInit, ParticleInit};
use mlspin::integrator::{evolve, RunConfig};
use mlspin::momentum::{invariant_record, verify_classical_identity, verify_momentum_map, verify_rotation_invariance};
use mlspin::{ChargeProfile, GridSpec, Model, Result, State, Vec3};

const SKEW_TOL: f64 = 1e-12;
const GRADIENT_TOL: f64 = 1e-6;
const FORM_TOL: f64 = 1e-10;
const CANONICAL_TOL: f64 = 1e-10;
const MOMENTUM_MAP_TOL: f64 = 1e-8;
const ROTATION_TOL: f64 = 1e-11;
const CLASSICAL_TOL: f64 = 1e-6;
const DRIFT_H_TOL: f64 = 1e-7;
const DRIFT_P_TOL: f64 = 1e-6;
const DRIFT_J_TOL: f64 = 1e-5;
const DRIFT_H_HALVING_GAIN: f64 = 8.0;
const GAUSS_TOL: f64 = 1e-10;
const DIV_TOL: f64 = 1e-9;
/// Observed order accepted as "second order" under one dt-halving.
const NEWTON_MIN_ORDER: f64 = 1.8;
/// Packets narrow enough to leave aliasing content at N = 48, so the
/// decrease of the classical-identity residual with N is observable rather
/// than buried in roundoff.
const NARROW_ENVELOPE: f64 = 2.0;
/// A residual series entirely below this is an exact discrete identity
/// (the linear momentum one, for Nyquist-free fields): nothing to converge.
const EXACT_FLOOR: f64 = 64.0 * f64::EPSILON;

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn model(len: f64, n: usize) -> Model {
    let g = GridSpec::new(len, n).expect("grid");
    Model::new(ChargeProfile::new(2.0, 1.0, g).expect("profile"), 1.0, 1.0).expect("model")
}

fn v3(rng: &mut impl Rng, s: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// Random particle data and localized divergence-free fields around it.
fn localized_state(m: &Model, seed: u64, amplitude: f64) -> Result<State> {
    packet_state(m, seed, amplitude, 4.0)
}

fn packet_state(m: &Model, seed: u64, amplitude: f64, envelope_radius: f64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let particle = ParticleInit { q0: v3(&mut rng, 1.0), p0: v3(&mut rng, 0.5), pi0: v3(&mut rng, 0.5) };
    let fields = FieldInit::RandomLocalized { seed: rng.gen(), envelope_radius, amplitude };
    initial_state(m, &particle, &fields)
}

fn criterion_1() -> Result<Outcome> {
    let m = model(16.0, 16);
    let g = *m.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = random_phase_vector(&g, &mut rng)?;
        let z1 = random_phase_vector(&g, &mut rng)?;
        let z2 = random_phase_vector(&g, &mut rng)?;
        worst = worst.max(skew_symmetry_residual(&y, &z1, &z2)?);
    }
    Ok(Outcome { pass: worst <= SKEW_TOL, detail: format!("max relative {worst:.3e} (tol {SKEW_TOL:.0e}, 100 cases)") })
}

fn criterion_2() -> Result<Outcome> {
    let m = model(16.0, 32);
    let g = *m.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for s in 0..20 {
        let y = localized_state(&m, 2000 + s, 0.1)?;
        let dir = random_phase_vector(&g, &mut rng)?.scaled(0.1);
        worst = worst.max(gradient_block_errors(&m, &y, &dir)?);
    }
    Ok(Outcome {
        pass: worst <= GRADIENT_TOL,
        detail: format!("worst block {worst:.3e} (tol {GRADIENT_TOL:.0e}, 20 states, N=32)"),
    })
}

fn criterion_3() -> Result<Outcome> {
    let m = model(16.0, 32);
    let mut worst: f64 = 0.0;
    for s in 0..5 {
        worst = worst.max(form_equivalence_residual(&m, &localized_state(&m, 3000 + s, 0.1)?)?);
    }
    Ok(Outcome { pass: worst <= FORM_TOL, detail: format!("max relative {worst:.3e} (tol {FORM_TOL:.0e})") })
}

fn criterion_4() -> Result<Outcome> {
    let m = model(16.0, 32);
    let mut worst: f64 = 0.0;
    for s in 0..20 {
        worst = worst.max(canonical_transform_residual(&m, &localized_state(&m, 4000 + s, 0.1)?)?);
    }
    Ok(Outcome {
        pass: worst <= CANONICAL_TOL,
        detail: format!("max |H(TY)-H|/|H| {worst:.3e} (tol {CANONICAL_TOL:.0e}, 20 states)"),
    })
}

fn criterion_5() -> Result<Outcome> {
    let m = model(16.0, 48);
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut worst: f64 = 0.0;
    for s in 0..10 {
        let yc = to_comoving(&localized_state(&m, 5000 + s, 0.1)?)?;
        for xi in &axes {
            worst = worst.max(verify_momentum_map(&yc, xi)?.max_relative());
        }
    }
    let mut vacuum_exact = true;
    for s in 0..3 {
        let y = initial_state(
            &m,
            &ParticleInit {
                q0: Vec3::new(0.3, -0.2, 0.1) * s as f64,
                p0: Vec3::new(0.1, 0.2, -0.3),
                pi0: Vec3::new(-0.2, 0.4, 0.5),
            },
            &FieldInit::Zero,
        )?;
        let yc = to_comoving(&y)?;
        for xi in &axes {
            let r = verify_momentum_map(&yc, xi)?.residual;
            vacuum_exact &= r.q == 0.0 && r.p == 0.0 && r.pi == 0.0;
        }
    }
    Ok(Outcome {
        pass: worst <= MOMENTUM_MAP_TOL && vacuum_exact,
        detail: format!(
            "max relative {worst:.3e} (tol {MOMENTUM_MAP_TOL:.0e}, 10 states, N=48); zero-field finite blocks exactly 0: {vacuum_exact}"
        ),
    })
}

fn criterion_6() -> Result<Outcome> {
    let m = model(16.0, 32);
    let mut worst: f64 = 0.0;
    for s in 0..3 {
        let yc = to_comoving(&localized_state(&m, 6000 + s, 0.1)?)?;
        worst = worst.max(verify_rotation_invariance(&m, &yc)?.relative());
    }
    Ok(Outcome {
        pass: worst <= ROTATION_TOL,
        detail: format!("max over 24 rotations {worst:.3e}·|H| (tol {ROTATION_TOL:.0e})"),
    })
}

fn criterion_7() -> Result<Outcome> {
    let sizes = [48, 56, 64];
    let seeds = [7000, 7001, 7002];
    let mut pass = true;
    let mut lines = Vec::new();
    for seed in seeds {
        let mut j_res = Vec::new();
        let mut p_res = Vec::new();
        for &n in &sizes {
            let m = model(16.0, n);
            let r = verify_classical_identity(&m, &packet_state(&m, seed, 0.1, NARROW_ENVELOPE)?)?;
            j_res.push(r.j_relative());
            p_res.push(r.p_relative());
        }
        let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]) || v.iter().all(|&r| r <= EXACT_FLOOR);
        pass &= j_res[0] <= CLASSICAL_TOL && p_res[0] <= CLASSICAL_TOL && monotone(&j_res) && monotone(&p_res);
        lines.push(format!(
            "J {:.1e}/{:.1e}/{:.1e} P {:.1e}/{:.1e}/{:.1e}",
            j_res[0], j_res[1], j_res[2], p_res[0], p_res[1], p_res[2]
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!("N=48/56/64: {} (tol {CLASSICAL_TOL:.0e} at N=48, envelope {NARROW_ENVELOPE}, exact floor {EXACT_FLOOR:.1e})", lines.join("; ")),
    })
}

struct Drift {
    h: f64,
    p: f64,
    j: f64,
    gauss: f64,
    div: f64,
}

fn default_run(dt_scale: f64) -> Result<Drift> {
    let cfg = SimConfig::default();
    let m = cfg.model()?;
    let y0 = initial_state(&m, &cfg.particle_init(), &cfg.field_init())?;
    let mut run: RunConfig = cfg.run_config()?;
    run.dt *= dt_scale;
    let recs = evolve(&m, &y0, &run, |t, y| invariant_record(&m, t, y))?;
    let first = &recs[0];
    let rel = |d: f64, s: f64| if s > 0.0 { d / s } else { d };
    let mut out = Drift { h: 0.0, p: 0.0, j: 0.0, gauss: 0.0, div: 0.0 };
    for r in &recs {
        out.h = out.h.max(rel((r.h - first.h).abs(), first.h.abs()));
        out.p = out.p.max(rel((r.p - first.p).norm(), first.p.norm()));
        out.j = out.j.max(rel((r.j - first.j).norm(), first.j.norm()));
        out.gauss = out.gauss.max(r.gauss_residual);
        out.div = out.div.max(r.div_a_max).max(r.div_pi_max);
    }
    Ok(out)
}

fn criteria_8_9() -> Result<(Outcome, Outcome)> {
    let full = default_run(1.0)?;
    let half = default_run(0.5)?;
    let gain = full.h / half.h;
    let c8 = Outcome {
        pass: full.h <= DRIFT_H_TOL && full.p <= DRIFT_P_TOL && full.j <= DRIFT_J_TOL && gain >= DRIFT_H_HALVING_GAIN,
        detail: format!(
            "H {:.3e} (tol {DRIFT_H_TOL:.0e}), P {:.3e} (tol {DRIFT_P_TOL:.0e}), J {:.3e} (tol {DRIFT_J_TOL:.0e}); dt/2 H drift {:.3e}, gain {gain:.1}x (need {DRIFT_H_HALVING_GAIN})",
            full.h, full.p, full.j, half.h
        ),
    };
    let gauss = full.gauss.max(half.gauss);
    let div = full.div.max(half.div);
    let c9 = Outcome {
        pass: gauss <= GAUSS_TOL && div <= DIV_TOL,
        detail: format!("gauss {gauss:.3e} (tol {GAUSS_TOL:.0e}), max div A/Π {div:.3e} (tol {DIV_TOL:.0e})"),
    };
    Ok((c8, c9))
}

/// Max over sample times of `|m q̈ - F| + |I ω̇ - T|`, with `q̈` and `ω̇`
/// from centred differences of the integrated trajectory.
fn newton_mismatch(m: &Model, y0: &State, dt: f64, sample_every: f64, t_final: f64) -> Result<(f64, f64)> {
    let run = RunConfig { dt, t_final, observe_every: 1, reproject_gauge: false };
    let traj = evolve(m, y0, &run, |t, y| Ok((t, y.clone())))?;
    let stride = (sample_every / dt).round() as usize;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut n = stride;
    while n + 1 < traj.len() {
        let (_, prev) = &traj[n - 1];
        let (_, cur) = &traj[n];
        let (_, next) = &traj[n + 1];
        let qdd = (next.q - 2.0 * cur.q + prev.q) / (dt * dt);
        let (_, w_prev) = m.velocities(prev)?;
        let (_, w_next) = m.velocities(next)?;
        let wd = (w_next - w_prev) / (2.0 * dt);
        let (f, t) = m.lorentz_force_torque(cur)?;
        worst = worst.max((m.mass() * qdd - f).norm() + (m.inertia() * wd - t).norm());
        scale = scale.max(f.norm() + t.norm());
        n += stride;
    }
    Ok((worst, scale))
}

fn criterion_10() -> Result<Outcome> {
    let m = model(16.0, 32);
    let particle = ParticleInit { q0: Vec3::zeros(), p0: Vec3::new(0.3, 0.1, -0.2), pi0: Vec3::new(0.2, -0.1, 0.6) };
    let fields = FieldInit::RandomLocalized { seed: 10, envelope_radius: 4.0, amplitude: 0.2 };
    let y0 = initial_state(&m, &particle, &fields)?;
    let dt = 0.1 * m.grid().spacing();
    let (e1, scale) = newton_mismatch(&m, &y0, dt, 0.2, 1.0)?;
    let (e2, _) = newton_mismatch(&m, &y0, 0.5 * dt, 0.2, 1.0)?;
    let order = (e1 / e2).log2();
    Ok(Outcome {
        pass: order >= NEWTON_MIN_ORDER && e2 < 1e-2 * scale,
        detail: format!(
            "mismatch {e1:.3e} -> {e2:.3e} under dt-halving (|F|+|T| ~ {scale:.2e}), observed order {order:.2} (need {NEWTON_MIN_ORDER})"
        ),
    })
}

fn report(k: usize, started: Instant, outcome: Result<Outcome>, failures: &mut usize) {
    let (pass, detail) = match outcome {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if !pass {
        *failures += 1;
    }
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {k:>2}: {verdict}  {detail}  [{:.1}s]", started.elapsed().as_secs_f64());
}

fn main() -> ExitCode {
    let mut failures = 0;
    let singles: [(usize, Criterion); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    for (k, f) in singles {
        let t0 = Instant::now();
        report(k, t0, f(), &mut failures);
    }
    let t0 = Instant::now();
    match criteria_8_9() {
        Ok((c8, c9)) => {
            report(8, t0, Ok(c8), &mut failures);
            report(9, t0, Ok(c9), &mut failures);
        }
        Err(e) => {
            let msg = e.to_string();
            report(8, t0, Err(e), &mut failures);
            report(9, t0, Ok(Outcome { pass: false, detail: format!("no trajectory: {msg}") }), &mut failures);
        }
    }
    let t0 = Instant::now();
    report(10, t0, criterion_10(), &mut failures);
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
