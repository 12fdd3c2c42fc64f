//! Constructors for the controlled-NOT gate family and the composite gate
//! identities built from it: phased variants, general controlled-U blocks,
//! Bell pairs and Bell measurement, the three-CNOT swap, and basis
//! conjugation.
//!
//! Two-qubit matrices act on the ordered pair |ε1 ε2⟩ with index 2·ε1 + ε2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{c, ket_zero, QReg, Unitary};

/// Exact 0/1-entry controlled-NOT on a qubit pair. `control` and `target`
/// select which of the two positions conditions the flip; both are in {0, 1}.
pub fn cnot(control: usize, target: usize) -> Result<Unitary> {
    if control == target {
        return Err(Error::RepeatedTarget(control));
    }
    if control > 1 || target > 1 {
        return Err(Error::QubitOutOfRange {
            index: control.max(target),
            n: 2,
        });
    }
    let mut entries = vec![c(0.0, 0.0); 16];
    for e1 in 0..2usize {
        for e2 in 0..2usize {
            let bits = [e1, e2];
            let mut out = bits;
            out[target] ^= bits[control];
            let col = 2 * e1 + e2;
            let row = 2 * out[0] + out[1];
            entries[row * 4 + col] = c(1.0, 0.0);
        }
    }
    Unitary::new(4, entries)
}

/// Per-basis-state phases θ_{ε1 ε2} attached to the CNOT image. Reduction of
/// any phase mod 2π leaves the gate invariant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasedCnotParams {
    pub theta00: f64,
    pub theta01: f64,
    pub theta10: f64,
    pub theta11: f64,
}

impl PhasedCnotParams {
    pub fn zero() -> Self {
        PhasedCnotParams {
            theta00: 0.0,
            theta01: 0.0,
            theta10: 0.0,
            theta11: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta00, self.theta01, self.theta10, self.theta11]
    }
}

/// |ε1 ε2⟩ → e^{iθ_{ε1 ε2}} |ε1, ε1⊕ε2⟩.
pub fn phased_cnot(p: &PhasedCnotParams) -> Unitary {
    let thetas = p.as_array();
    let mut entries = vec![c(0.0, 0.0); 16];
    for e1 in 0..2usize {
        for e2 in 0..2usize {
            let col = 2 * e1 + e2;
            let row = 2 * e1 + (e1 ^ e2);
            entries[row * 4 + col] = c(0.0, thetas[col]).exp();
        }
    }
    Unitary::new(4, entries).expect("phased cnot is unitary by construction")
}

/// Conditional operation Σ_k |k⟩⟨k| ⊗ U_k over an orthogonal control family.
#[derive(Clone, Debug)]
pub struct ControlledOp {
    branches: Vec<Unitary>,
}

impl ControlledOp {
    pub fn new(branches: Vec<Unitary>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::EmptyBranches);
        }
        for b in &branches {
            if b.d() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "branch unitary is {}×{}, expected 2×2",
                    b.d(),
                    b.d()
                )));
            }
            let dev = b.unitarity_deviation();
            if dev > crate::qstate::NORM_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(ControlledOp { branches })
    }

    pub fn control_dim(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[Unitary] {
        &self.branches
    }

    /// Block-diagonal assembly; 4×4 when the control is a qubit.
    pub fn to_unitary(&self) -> Unitary {
        let k = self.branches.len();
        let d = 2 * k;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for (b, u) in self.branches.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    entries[(2 * b + i) * d + (2 * b + j)] = u.get(i, j);
                }
            }
        }
        Unitary::new(d, entries).expect("block-diagonal of unitaries is unitary")
    }
}

/// Builds the conditional operation from explicit 2×2 branch unitaries;
/// `[I, X]` reproduces the controlled-NOT.
pub fn controlled_u(branches: Vec<Unitary>) -> Result<ControlledOp> {
    ControlledOp::new(branches)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StdGate {
    X,
    Z,
    H,
}

impl std::str::FromStr for StdGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(StdGate::X),
            "Z" | "z" => Ok(StdGate::Z),
            "H" | "h" => Ok(StdGate::H),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

/// The three single-qubit matrices the protocols use: bit negation, the 1/√2
/// rotation, and diag(1, −1).
pub fn std_gate(gate: StdGate) -> Unitary {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let entries = match gate {
        StdGate::X => vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        StdGate::Z => vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        StdGate::H => vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)],
    };
    Unitary::new(2, entries).expect("standard gates are unitary")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

impl std::str::FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" => Ok(BellKind::PhiPlus),
            "phi-" | "phiminus" => Ok(BellKind::PhiMinus),
            "psi+" | "psiplus" => Ok(BellKind::PsiPlus),
            "psi-" | "psiminus" => Ok(BellKind::PsiMinus),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

/// The four maximally entangled two-qubit states.
pub fn bell_pair(kind: BellKind) -> QReg {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)],
        BellKind::PhiMinus => vec![c(h, 0.), c(0., 0.), c(0., 0.), c(-h, 0.)],
        BellKind::PsiPlus => vec![c(0., 0.), c(h, 0.), c(h, 0.), c(0., 0.)],
        BellKind::PsiMinus => vec![c(0., 0.), c(h, 0.), c(-h, 0.), c(0., 0.)],
    };
    QReg::new(2, amps).expect("Bell states are normalized")
}

/// Bell measurement by disentangling: apply C12, then the 1/√2 rotation on
/// the control, then read both qubits in the computational basis. Control
/// bit 0 maps to the "+" sign (H sends (|0⟩+|1⟩)/√2 to |0⟩), target bit 0
/// to the Φ family.
pub fn bell_measure(state: &QReg) -> Result<Vec<(BellKind, f64)>> {
    if state.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "bell_measure needs 2 qubits, got {}",
            state.n()
        )));
    }
    let disentangled = state
        .apply(&cnot(0, 1)?, &[0, 1])?
        .apply(&std_gate(StdGate::H), &[0])?;
    let mut out = Vec::with_capacity(4);
    for kind in BellKind::ALL {
        let (sign_bit, target_bit) = match kind {
            BellKind::PhiPlus => (0usize, 0usize),
            BellKind::PhiMinus => (1, 0),
            BellKind::PsiPlus => (0, 1),
            BellKind::PsiMinus => (1, 1),
        };
        let idx = 2 * sign_bit + target_bit;
        out.push((kind, disentangled.amps()[idx].norm_sqr()));
    }
    Ok(out)
}

/// SWAP from a cascade of three controlled-NOTs. The flag picks which qubit
/// controls the outer gates; both orderings compose to the same permutation.
pub fn swap3(control_first: bool) -> Unitary {
    let c12 = cnot(0, 1).expect("valid indices");
    let c21 = cnot(1, 0).expect("valid indices");
    if control_first {
        c12.mul(&c21).mul(&c12)
    } else {
        c21.mul(&c12).mul(&c21)
    }
}

/// (v⊗v) · u · (v⊗v)†: rewrites a two-qubit gate in the basis reached by
/// applying `v` to both qubits.
pub fn conjugate_basis(u: &Unitary, v: &Unitary) -> Result<Unitary> {
    if u.d() != 4 || v.d() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "conjugate_basis needs 4×4 and 2×2, got {}×{} and {}×{}",
            u.d(),
            u.d(),
            v.d(),
            v.d()
        )));
    }
    let vv = v.kron(v);
    Ok(vv.mul(u).mul(&vv.dagger()))
}

/// Maximum deviation of `u` from the phased-CNOT pattern: every column
/// (ε1, ε2) must put modulus 1 at row (ε1, ε1⊕ε2) and nothing anywhere else.
/// Moduli are global-phase free, so no phase alignment is needed.
pub fn phased_cnot_residual(u: &Unitary) -> f64 {
    debug_assert_eq!(u.d(), 4);
    let mut worst: f64 = 0.0;
    for e1 in 0..2usize {
        for e2 in 0..2usize {
            let col = 2 * e1 + e2;
            let hit = 2 * e1 + (e1 ^ e2);
            for row in 0..4 {
                let m = u.get(row, col).norm();
                let dev = if row == hit { (m - 1.0).abs() } else { m };
                worst = worst.max(dev);
            }
        }
    }
    worst
}

pub fn is_phased_cnot(u: &Unitary) -> bool {
    phased_cnot_residual(u) < 1e-8
}

/// Phase quadruple read off the pattern entries; meaningful when the
/// residual is small.
pub fn extract_phased_cnot_params(u: &Unitary) -> PhasedCnotParams {
    let arg = |e1: usize, e2: usize| u.get(2 * e1 + (e1 ^ e2), 2 * e1 + e2).arg();
    PhasedCnotParams {
        theta00: arg(0, 0),
        theta01: arg(0, 1),
        theta10: arg(1, 0),
        theta11: arg(1, 1),
    }
}

/// A register holding (a|0⟩+b|1⟩) ⊗ |0⟩, the measurement-gate input.
pub fn superposition_with_ancilla(a: Complex64, b: Complex64) -> Result<QReg> {
    QReg::prepare(&[[a, b], ket_zero()])
}
