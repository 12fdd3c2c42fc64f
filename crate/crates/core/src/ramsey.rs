//! Cavity interferometry sequence R1 / C / R2: two π/2 pulses on the atom
//! sandwiching a dispersive photon-number-conserving phase, plus a parameter
//! search for phase settings that land the composite in the phased-CNOT
//! family. Qubit 0 is the field (photon number 0/1), qubit 1 the atom.
//!
//! Two dispersive models ship. `Literal` applies the phase
//! exp(i·(−1)^(1−ε2)·(ε1+ε2)·θ); at θ = π its two field blocks differ only by
//! an overall sign, so no pulse phases can make the sequence entangling — the
//! search reports that measurable fact. `Lightshift` applies the per-photon
//! phase exp(i·(−1)^(1−ε2)·ε1·θ), which does reach the family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gatelib::{extract_phased_cnot_params, phased_cnot_residual};
use crate::qstate::{c, Unitary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersiveModel {
    Literal,
    Lightshift,
}

impl std::str::FromStr for DispersiveModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "literal" => Ok(DispersiveModel::Literal),
            "lightshift" => Ok(DispersiveModel::Lightshift),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// Pulse phases for R1/R2 and the dispersive phase shift per photon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RamseyParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub theta: f64,
    pub model: DispersiveModel,
}

/// π/2 rotation of the atom's Bloch vector with pulse phase α:
/// (1/√2) [[1, −e^{−iα}], [e^{iα}, 1]].
///
/// The ε2 = 0 column reproduces |0⟩ → (|0⟩ + e^{iα}|1⟩)/√2 verbatim; the
/// second column carries the conjugate phase required for unitarity and
/// matches the verbatim ε2 = 1 action at α ∈ {0, π}.
pub fn half_flip(alpha: f64) -> Unitary {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = c(0.0, alpha).exp();
    Unitary::new(
        2,
        vec![c(h, 0.0), -e.conj() * h, e * h, c(h, 0.0)],
    )
    .expect("half flip is unitary")
}

/// Diagonal dispersive interaction on field ⊗ atom. Photon number never
/// changes; only phases accumulate.
pub fn dispersive(theta: f64, model: DispersiveModel) -> Unitary {
    let mut entries = vec![c(0.0, 0.0); 16];
    for e1 in 0..2usize {
        for e2 in 0..2usize {
            let sign = if e2 == 1 { 1.0 } else { -1.0 }; // (−1)^(1−ε2)
            let phase = match model {
                DispersiveModel::Literal => sign * (e1 + e2) as f64 * theta,
                DispersiveModel::Lightshift => sign * e1 as f64 * theta,
            };
            let idx = 2 * e1 + e2;
            entries[idx * 4 + idx] = c(0.0, phase).exp();
        }
    }
    Unitary::new(4, entries).expect("diagonal phases are unitary")
}

/// (I ⊗ half_flip(α2)) · dispersive(θ) · (I ⊗ half_flip(α1)).
pub fn compose_sequence(p: &RamseyParams) -> Unitary {
    let i2 = Unitary::identity(2);
    let r1 = i2.kron(&half_flip(p.alpha1));
    let r2 = i2.kron(&half_flip(p.alpha2));
    r2.mul(&dispersive(p.theta, p.model)).mul(&r1)
}

/// True when a field-conserving 4×4 matrix has blocks equal up to one scalar
/// phase — i.e. it acts as (phase ⊗ single-atom gate) and cannot entangle.
pub fn blocks_equal_up_to_phase(u: &Unitary) -> bool {
    block_phase_deviation(u) < 1e-10
}

/// Max elementwise deviation of block1 from phase·block0 after aligning the
/// scalar phase on the largest block0 entry; returns ∞ when the matrix is
/// not block-diagonal in the field.
fn block_phase_deviation(u: &Unitary) -> f64 {
    debug_assert_eq!(u.d(), 4);
    for row in 0..4 {
        for col in 0..4 {
            if (row < 2) != (col < 2) && u.get(row, col).norm() > 1e-12 {
                return f64::INFINITY;
            }
        }
    }
    let b0 = [u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1)];
    let b1 = [u.get(2, 2), u.get(2, 3), u.get(3, 2), u.get(3, 3)];
    let (k, _) = b0
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .unwrap();
    if b0[k].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let ratio = b1[k] / b0[k];
    if (ratio.norm() - 1.0).abs() > 1e-10 {
        return f64::INFINITY;
    }
    b0.iter()
        .zip(&b1)
        .map(|(x0, x1)| (x0 * ratio - x1).norm())
        .fold(0.0, f64::max)
}

/// Entangling = field-conserving with genuinely different conditional blocks.
pub fn is_entangling(u: &Unitary) -> bool {
    !blocks_equal_up_to_phase(u)
}

/// One grid/refinement result row.
#[derive(Clone, Debug, Serialize)]
pub struct SolveHit {
    #[serde(rename = "a1")]
    pub alpha1: f64,
    #[serde(rename = "a2")]
    pub alpha2: f64,
    pub theta: f64,
    pub residual: f64,
    /// θ00, θ01, θ10, θ11 read off the composite.
    pub phases: [f64; 4],
    pub entangling: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub model: DispersiveModel,
    pub grid: usize,
    /// Fixed dispersive phase when the scan was two-dimensional.
    pub theta_fixed: Option<f64>,
    /// Every parameter set with residual < 1e-8.
    pub hits: Vec<SolveHit>,
    /// Lowest-residual parameter set seen, hit or not.
    pub best: SolveHit,
}

pub const SOLVE_HIT_TOL: f64 = 1e-8;

fn evaluate(model: DispersiveModel, alpha1: f64, alpha2: f64, theta: f64) -> SolveHit {
    let params = RamseyParams {
        alpha1,
        alpha2,
        theta,
        model,
    };
    let u = compose_sequence(&params);
    SolveHit {
        alpha1,
        alpha2,
        theta,
        residual: phased_cnot_residual(&u),
        phases: extract_phased_cnot_params(&u).as_array(),
        entangling: is_entangling(&u),
    }
}

/// Golden-section line search on one coordinate of the residual.
fn refine_axis(
    model: DispersiveModel,
    point: &mut [f64; 3],
    axis: usize,
    radius: f64,
    fixed_theta: bool,
) {
    if axis == 2 && fixed_theta {
        return;
    }
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let mut lo = point[axis] - radius;
    let mut hi = point[axis] + radius;
    let eval = |x: f64, p: &[f64; 3]| {
        let mut q = *p;
        q[axis] = x;
        evaluate(model, q[0], q[1], q[2]).residual
    };
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = eval(x1, point);
    let mut f2 = eval(x2, point);
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = eval(x1, point);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = eval(x2, point);
        }
    }
    let mid = 0.5 * (lo + hi);
    if eval(mid, point) <= eval(point[axis], point) {
        point[axis] = mid;
    }
}

/// Scans (α1, α2, θ) ∈ [0, 2π)³ — or (α1, α2) at fixed θ — on a per-axis
/// grid, collecting every parameter set whose composite matches the
/// phased-CNOT pattern to better than 1e-8, plus the overall best row.
/// An empty hit list is a finding, not an error.
pub fn solve_phases(
    model: DispersiveModel,
    grid: usize,
    refine: bool,
    theta_fixed: Option<f64>,
) -> Result<SolveReport> {
    if grid < 16 {
        return Err(Error::GridTooSmall(grid));
    }
    let tau = std::f64::consts::TAU;
    let step = tau / grid as f64;
    let thetas: Vec<f64> = match theta_fixed {
        Some(t) => vec![t],
        None => (0..grid).map(|k| k as f64 * step).collect(),
    };
    let mut hits = Vec::new();
    let mut best: Option<SolveHit> = None;
    for &theta in &thetas {
        for i in 0..grid {
            let alpha1 = i as f64 * step;
            for j in 0..grid {
                let alpha2 = j as f64 * step;
                let row = evaluate(model, alpha1, alpha2, theta);
                let better = match &best {
                    Some(b) => {
                        row.residual < b.residual
                            || (row.residual == b.residual
                                && (row.theta, row.alpha1, row.alpha2)
                                    < (b.theta, b.alpha1, b.alpha2))
                    }
                    None => true,
                };
                if better {
                    best = Some(row.clone());
                }
                if row.residual < SOLVE_HIT_TOL {
                    hits.push(row);
                }
            }
        }
    }
    let mut best = best.expect("grid is non-empty");
    if refine && best.residual >= f64::EPSILON {
        let mut point = [best.alpha1, best.alpha2, best.theta];
        for pass in 0..3 {
            let radius = step / (1 << pass) as f64;
            for axis in 0..3 {
                refine_axis(model, &mut point, axis, radius, theta_fixed.is_some());
            }
        }
        let refined = evaluate(model, point[0], point[1], point[2]);
        if refined.residual < best.residual {
            best = refined;
            if best.residual < SOLVE_HIT_TOL && !hits.iter().any(|h| h.residual < SOLVE_HIT_TOL) {
                hits.push(best.clone());
            }
        }
    }
    Ok(SolveReport {
        model,
        grid,
        theta_fixed,
        hits,
        best,
    })
}
