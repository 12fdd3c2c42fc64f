//! Driven time evolution for the two-dot system.
//!
//! Full frame: fixed-step 4th-order Runge-Kutta on
//! i·ψ′ = [H0 + (Ω/2)·cos(ωt)·σx_target]·ψ, integrated with the mean dot
//! energy shifted out (restored as an exact global phase afterwards) so the
//! step error stays tiny at the step cap.
//!
//! Rotating-wave frame: the frame W = diag(E00, E00+ω, E10, E10+ω) turns the
//! Hamiltonian into static per-control blocks [[0, Ω/4], [Ω/4, Δ(ε1)]] with
//! Δ(ε1) the detuning of the drive from that block's target transition; the
//! propagator is the exact 2×2 exponential per block, so the resonant Rabi
//! rate is Ω/2 and a π-pulse lasts T = 2π/Ω.

use num_complex::Complex64;
use serde::Serialize;

use super::{DotParams, DriveSpec, Frame};
use crate::error::{Error, Result};
use crate::qstate::{c, QReg};

/// Plain 4×4 complex matrix, row-major. This is a simulation output, not a
/// checked `Unitary`: integrator drift can exceed the library's unitarity
/// tolerance.
#[derive(Clone, Debug)]
pub struct GateMatrix {
    entries: [[Complex64; 4]; 4],
}

impl GateMatrix {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [c(0.0, 0.0); 4];
        for (i, row) in self.entries.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }
}

fn check_initial(initial: &QReg) -> Result<()> {
    if initial.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "driven evolution needs a 2-qubit state, got {} qubits",
            initial.n()
        )));
    }
    Ok(())
}

/// Raw full-frame integration: returns the final (unnormalized) amplitudes
/// and the norm deviation accumulated by the integrator.
fn integrate_full(
    p: &DotParams,
    d: &DriveSpec,
    initial: &[Complex64],
) -> Result<([Complex64; 4], f64)> {
    let diag = p.hamiltonian_diag()?;
    let mean: f64 = diag.iter().sum::<f64>() / 4.0;
    let shifted = [
        diag[0] - mean,
        diag[1] - mean,
        diag[2] - mean,
        diag[3] - mean,
    ];
    let half_amp = d.amplitude / 2.0;
    let omega = d.carrier;

    let deriv = |t: f64, y: &[Complex64; 4]| -> [Complex64; 4] {
        let g = half_amp * (omega * t).cos();
        let mi = c(0.0, -1.0);
        [
            mi * (shifted[0] * y[0] + g * y[1]),
            mi * (shifted[1] * y[1] + g * y[0]),
            mi * (shifted[2] * y[2] + g * y[3]),
            mi * (shifted[3] * y[3] + g * y[2]),
        ]
    };

    let n_steps = (d.duration / d.dt).ceil().max(1.0) as usize;
    let h = d.duration / n_steps as f64;
    let mut y = [initial[0], initial[1], initial[2], initial[3]];
    let mut t = 0.0;
    for step in 0..n_steps {
        t = step as f64 * h;
        let k1 = deriv(t, &y);
        let mut y2 = y;
        for i in 0..4 {
            y2[i] += 0.5 * h * k1[i];
        }
        let k2 = deriv(t + 0.5 * h, &y2);
        let mut y3 = y;
        for i in 0..4 {
            y3[i] += 0.5 * h * k2[i];
        }
        let k3 = deriv(t + 0.5 * h, &y3);
        let mut y4 = y;
        for i in 0..4 {
            y4[i] += h * k3[i];
        }
        let k4 = deriv(t + h, &y4);
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let _ = t;
    // Undo the energy shift: an exact global phase.
    let restore = c(0.0, -mean * d.duration).exp();
    for a in &mut y {
        *a *= restore;
    }
    let norm = y.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok((y, (norm - 1.0).abs()))
}

/// Exact 2×2 rotating-frame block exp(−i [[0, g], [g, delta]] t).
fn rwa_block(g: f64, delta: f64, t: f64) -> [[Complex64; 2]; 2] {
    let r = (g * g + 0.25 * delta * delta).sqrt();
    let common = c(0.0, -0.5 * delta * t).exp();
    if r == 0.0 {
        return [[common, c(0.0, 0.0)], [c(0.0, 0.0), common]];
    }
    let (cos_rt, sin_rt) = ((r * t).cos(), (r * t).sin());
    let zfac = 0.5 * delta / r * sin_rt;
    let xfac = g / r * sin_rt;
    [
        [common * c(cos_rt, zfac), common * c(0.0, -xfac)],
        [common * c(0.0, -xfac), common * c(cos_rt, -zfac)],
    ]
}

/// Lab-frame rotating-wave propagator at time `duration`.
pub fn rwa_propagator(p: &DotParams, d: &DriveSpec) -> Result<GateMatrix> {
    let diag = p.hamiltonian_diag()?;
    let g = d.amplitude / 4.0; // off-diagonal element: Rabi rate Ω/2, halved
    let mut entries = [[c(0.0, 0.0); 4]; 4];
    for e1 in 0..2usize {
        let delta = p.target_transition(e1 as u8)? - d.carrier;
        let block = rwa_block(g, delta, d.duration);
        // Frame restore: W diagonal is (E(ε1,0), E(ε1,0)+ω) inside the block.
        let w0 = diag[2 * e1];
        let phase0 = c(0.0, -w0 * d.duration).exp();
        let phase1 = c(0.0, -(w0 + d.carrier) * d.duration).exp();
        entries[2 * e1][2 * e1] = phase0 * block[0][0];
        entries[2 * e1][2 * e1 + 1] = phase0 * block[0][1];
        entries[2 * e1 + 1][2 * e1] = phase1 * block[1][0];
        entries[2 * e1 + 1][2 * e1 + 1] = phase1 * block[1][1];
    }
    Ok(GateMatrix { entries })
}

/// Evolves a 2-qubit state under the drive and reports the integrator's norm
/// deviation alongside the (renormalized) final state.
pub fn evolve_driven_detailed(
    p: &DotParams,
    d: &DriveSpec,
    initial: &QReg,
) -> Result<(QReg, f64)> {
    check_initial(initial)?;
    d.validate(p)?;
    let (raw, drift) = match d.frame {
        Frame::Full => integrate_full(p, d, initial.amps())?,
        Frame::Rwa => {
            let u = rwa_propagator(p, d)?;
            let v = [
                initial.amps()[0],
                initial.amps()[1],
                initial.amps()[2],
                initial.amps()[3],
            ];
            let out = u.mul_vec(&v);
            let norm = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            (out, (norm - 1.0).abs())
        }
    };
    if drift > 1e-8 {
        return Err(Error::BadDrive(format!(
            "integrator norm drift {drift:.3e} exceeds 1e-8; decrease dt"
        )));
    }
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state = QReg::new(2, raw.iter().map(|a| a / norm).collect())?;
    Ok((state, drift))
}

pub fn evolve_driven(p: &DotParams, d: &DriveSpec, initial: &QReg) -> Result<QReg> {
    Ok(evolve_driven_detailed(p, d, initial)?.0)
}

/// Simulated gate in the interaction picture of the free Hamiltonian:
/// columns are the evolved basis states with the deterministic free phases
/// e^{−iE_k T} removed. Also returns the worst per-column norm drift.
pub fn simulated_gate(p: &DotParams, d: &DriveSpec, frame: Frame) -> Result<(GateMatrix, f64)> {
    let mut spec = *d;
    spec.frame = frame;
    spec.validate(p)?;
    let diag = p.hamiltonian_diag()?;
    let mut entries = [[c(0.0, 0.0); 4]; 4];
    let mut worst_drift = 0.0f64;
    match frame {
        Frame::Rwa => {
            let u = rwa_propagator(p, &spec)?;
            for (i, row) in entries.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = u.get(i, j);
                }
            }
        }
        Frame::Full => {
            for j in 0..4 {
                let mut basis = [c(0.0, 0.0); 4];
                basis[j] = c(1.0, 0.0);
                let (col, drift) = integrate_full(p, &spec, &basis)?;
                worst_drift = worst_drift.max(drift);
                for i in 0..4 {
                    entries[i][j] = col[i];
                }
            }
        }
    }
    for (i, row) in entries.iter_mut().enumerate() {
        let undo = c(0.0, diag[i] * spec.duration).exp();
        for e in row.iter_mut() {
            *e *= undo;
        }
    }
    Ok((GateMatrix { entries }, worst_drift))
}

/// Largest |n0 + e^{−iφ}·n1| + |n2 + e^{−iφ}·n3| over the phase φ:
/// coarse scan plus golden-section polish.
fn max_two_norm_sum(n0: Complex64, n1: Complex64, n2: Complex64, n3: Complex64) -> f64 {
    let h = |phi: f64| {
        let e = Complex64::from_polar(1.0, -phi);
        (n0 + e * n1).norm() + (n2 + e * n3).norm()
    };
    let samples = 2048;
    let tau = std::f64::consts::TAU;
    let mut best_phi = 0.0;
    let mut best = f64::MIN;
    for k in 0..samples {
        let phi = tau * k as f64 / samples as f64;
        let v = h(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let mut lo = best_phi - tau / samples as f64;
    let mut hi = best_phi + tau / samples as f64;
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = h(x2);
        }
    }
    best.max(f1).max(f2)
}

/// Conditional-flip probabilities and gate fidelities against the
/// controlled-NOT for one pulse.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PulseReport {
    pub frame: Frame,
    /// P(|10⟩ → |11⟩): the conditional flip the pulse is meant to drive.
    pub p10_to_11: f64,
    pub p11_to_10: f64,
    /// P(|00⟩ → |00⟩) and P(|01⟩ → |01⟩): off-branch survival.
    pub p00_stay: f64,
    pub p01_stay: f64,
    /// P(|00⟩ → |01⟩): off-branch leakage.
    pub p00_flip: f64,
    /// |Tr(U_sim · CNOT†)| / 4 with no phase compensation.
    pub fidelity_raw: f64,
    /// Max over per-qubit phase pairs of |Tr(Φ† · U_sim · CNOT†)| / 4.
    pub fidelity_phase_opt: f64,
    pub norm_drift: f64,
}

pub fn cnot_fidelity(p: &DotParams, d: &DriveSpec) -> Result<PulseReport> {
    let (u, norm_drift) = simulated_gate(p, d, d.frame)?;
    // Diagonal of U_sim · CNOT (CNOT is self-adjoint; it swaps columns 2, 3).
    let n0 = u.get(0, 0);
    let n1 = u.get(1, 1);
    let n2 = u.get(2, 3);
    let n3 = u.get(3, 2);
    let fidelity_raw = (n0 + n1 + n2 + n3).norm() / 4.0;
    let fidelity_phase_opt = max_two_norm_sum(n0, n1, n2, n3) / 4.0;
    Ok(PulseReport {
        frame: d.frame,
        p10_to_11: u.get(3, 2).norm_sqr(),
        p11_to_10: u.get(2, 3).norm_sqr(),
        p00_stay: u.get(0, 0).norm_sqr(),
        p01_stay: u.get(1, 1).norm_sqr(),
        p00_flip: u.get(1, 0).norm_sqr(),
        fidelity_raw,
        fidelity_phase_opt,
        norm_drift,
    })
}

/// One carrier-sweep sample.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub omega_drive: f64,
    pub t: f64,
    pub p10_11: f64,
    pub p00_flip: f64,
    pub f_raw: f64,
    pub f_phase_opt: f64,
}

/// Runs the pulse at each drive carrier, keeping every other drive setting.
pub fn sweep(p: &DotParams, base: &DriveSpec, carriers: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(carriers.len());
    for &carrier in carriers {
        let mut d = *base;
        d.carrier = carrier;
        let report = cnot_fidelity(p, &d)?;
        rows.push(SweepRow {
            omega_drive: carrier,
            t: d.duration,
            p10_11: report.p10_to_11,
            p00_flip: report.p00_flip,
            f_raw: report.fidelity_raw,
            f_phase_opt: report.fidelity_phase_opt,
        });
    }
    Ok(rows)
}
