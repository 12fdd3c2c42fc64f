//! Distributed two-party state swap over a classical-bit channel, a
//! teleportation baseline, and a brute-force correction calibrator.
//!
//! The swap uses six qubit spaces H0…H5 in register order. Alice holds
//! H0–H2, Bob holds H3–H5; the unknown inputs sit in H0 (Alice) and H5
//! (Bob), and two shared (|00⟩+|11⟩)/√2 pairs occupy H1⊗H3 and H2⊗H4.
//!
//! Protocol, executed literally:
//!   1. Alice applies C(1→0) then C(0→2); Bob applies C(5→4) then C(3→5).
//!   2. Alice measures H2, Bob measures H4, and each sends the other the
//!      one-bit result. On disagreement both negate the qubits still in
//!      their possession (the measured ones have left the coherent run).
//!   3. Alice applies the 1/√2 rotation in H1, Bob in H3.
//!   4. Alice measures H1, Bob H3; bits are exchanged again, and on
//!      disagreement Alice applies diag(1,−1) to H0 and Bob to H5.
//!
//! At the end H0 carries Bob's input and H5 carries Alice's.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gatelib::{cnot, std_gate, StdGate};
use crate::qstate::{ket_zero, QReg, Unitary};
use crate::random;

pub const SWAP_QUBITS: usize = 6;
pub const ALICE_QUBITS: [usize; 3] = [0, 1, 2];
pub const BOB_QUBITS: [usize; 3] = [3, 4, 5];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Party {
    Alice,
    Bob,
}

/// One local gate applied as a classical-bit-conditioned correction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub party: Party,
    pub qubit: usize,
    pub gate: &'static str,
}

/// Outcome of one measurement branch of the swap protocol.
#[derive(Clone, Debug, Serialize)]
pub struct BranchReport {
    /// Four bits: Step-2 Alice, Step-2 Bob, Step-4 Alice, Step-4 Bob.
    pub branch: String,
    #[serde(rename = "p")]
    pub probability: f64,
    /// |⟨β|final H0⟩|² — H0 should end holding Bob's input.
    #[serde(rename = "f0")]
    pub fidelity_h0: f64,
    /// |⟨α|final H5⟩|² — H5 should end holding Alice's input.
    #[serde(rename = "f5")]
    pub fidelity_h5: f64,
    pub corrections: Vec<Correction>,
}

/// Branch outcome with the full six-qubit final state attached; the
/// calibrator and the distributed runner need more than the report row.
#[derive(Clone, Debug)]
pub struct BranchOutcome {
    pub bits: [u8; 4],
    pub probability: f64,
    pub state: QReg,
    pub corrections: Vec<Correction>,
}

impl BranchOutcome {
    pub fn branch_string(&self) -> String {
        self.bits.iter().map(|b| b.to_string()).collect()
    }

    pub fn report(&self, alpha: &[Complex64; 2], beta: &[Complex64; 2]) -> Result<BranchReport> {
        Ok(BranchReport {
            branch: self.branch_string(),
            probability: self.probability,
            fidelity_h0: self.state.single_qubit_overlap(0, beta)?,
            fidelity_h5: self.state.single_qubit_overlap(5, alpha)?,
            corrections: self.corrections.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Deterministic walk over all reachable measurement branches.
    Enumerate,
    /// One seeded trajectory.
    Sample(u64),
}

/// Scope of the Step-2 negation. The measured qubits are classical by then,
/// so flipping them cannot change the swap fidelities; the flag exists so the
/// calibrator can compare both readings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NegationScope {
    #[default]
    UnmeasuredOnly,
    AllOwned,
}

impl NegationScope {
    fn alice_targets(&self) -> &'static [usize] {
        match self {
            NegationScope::UnmeasuredOnly => &[0, 1],
            NegationScope::AllOwned => &[0, 1, 2],
        }
    }

    fn bob_targets(&self) -> &'static [usize] {
        match self {
            NegationScope::UnmeasuredOnly => &[3, 5],
            NegationScope::AllOwned => &[3, 4, 5],
        }
    }
}

fn check_qubit_state(q: &[Complex64; 2]) -> Result<()> {
    let dev = (q[0].norm_sqr() + q[1].norm_sqr() - 1.0).abs();
    if dev > crate::qstate::NORM_TOL {
        return Err(Error::NotNormalized(dev));
    }
    Ok(())
}

/// |α⟩ ⊗ Φ+(H1,H3) ⊗ Φ+(H2,H4) ⊗ |β⟩, built from |0⟩s with H and CNOT.
pub fn initial_swap_state(alpha: &[Complex64; 2], beta: &[Complex64; 2]) -> Result<QReg> {
    check_qubit_state(alpha)?;
    check_qubit_state(beta)?;
    let h = std_gate(StdGate::H);
    let cx = cnot(0, 1)?;
    QReg::prepare(&[*alpha, ket_zero(), ket_zero(), ket_zero(), ket_zero(), *beta])?
        .apply(&h, &[1])?
        .apply(&cx, &[1, 3])?
        .apply(&h, &[2])?
        .apply(&cx, &[2, 4])
}

fn apply_step1(state: &QReg) -> Result<QReg> {
    let cx = cnot(0, 1)?;
    state
        .apply(&cx, &[1, 0])? // Alice C(1→0)
        .apply(&cx, &[0, 2])? // Alice C(0→2)
        .apply(&cx, &[5, 4])? // Bob C(5→4)
        .apply(&cx, &[3, 5]) // Bob C(3→5)
}

fn apply_step2_corrections(
    state: &QReg,
    scope: NegationScope,
    corrections: &mut Vec<Correction>,
) -> Result<QReg> {
    let x = std_gate(StdGate::X);
    let mut s = state.clone();
    for &q in scope.alice_targets() {
        s = s.apply(&x, &[q])?;
        corrections.push(Correction {
            party: Party::Alice,
            qubit: q,
            gate: "X",
        });
    }
    for &q in scope.bob_targets() {
        s = s.apply(&x, &[q])?;
        corrections.push(Correction {
            party: Party::Bob,
            qubit: q,
            gate: "X",
        });
    }
    Ok(s)
}

fn apply_step4_corrections(state: &QReg, corrections: &mut Vec<Correction>) -> Result<QReg> {
    let z = std_gate(StdGate::Z);
    let s = state.apply(&z, &[0])?.apply(&z, &[5])?;
    corrections.push(Correction {
        party: Party::Alice,
        qubit: 0,
        gate: "Z",
    });
    corrections.push(Correction {
        party: Party::Bob,
        qubit: 5,
        gate: "Z",
    });
    Ok(s)
}

fn finish_branch(
    after_step2: QReg,
    bits2: (u8, u8),
    p2: f64,
    scope: NegationScope,
    mode_rng: &mut Option<rand_chacha::ChaCha8Rng>,
    out: &mut Vec<BranchOutcome>,
) -> Result<()> {
    let mut corrections = Vec::new();
    let corrected = if bits2.0 != bits2.1 {
        apply_step2_corrections(&after_step2, scope, &mut corrections)?
    } else {
        after_step2
    };
    let h = std_gate(StdGate::H);
    let rotated = corrected.apply(&h, &[1])?.apply(&h, &[3])?;

    let step4_pairs: Vec<(crate::qstate::MeasBranch, crate::qstate::MeasBranch)> =
        match mode_rng {
            Some(rng) => {
                let ba = rotated.sample(1, rng)?;
                let post_a = ba.post_state.clone().expect("sampled branch is valid");
                let bb = post_a.sample(3, rng)?;
                vec![(ba, bb)]
            }
            None => {
                let (a0, a1) = rotated.measure(1)?;
                let mut pairs = Vec::new();
                for ba in [a0, a1] {
                    if let Some(post_a) = ba.post_state.clone() {
                        let (b0, b1) = post_a.measure(3)?;
                        for bb in [b0, b1] {
                            if bb.post_state.is_some() {
                                pairs.push((ba.clone(), bb));
                            }
                        }
                    }
                }
                pairs
            }
        };

    for (ba, bb) in step4_pairs {
        let p = p2 * ba.probability * bb.probability;
        let state = bb.post_state.clone().expect("branch with p>0 has a state");
        let mut corr = corrections.clone();
        let final_state = if ba.bit != bb.bit {
            apply_step4_corrections(&state, &mut corr)?
        } else {
            state
        };
        out.push(BranchOutcome {
            bits: [bits2.0, bits2.1, ba.bit, bb.bit],
            probability: p,
            state: final_state,
            corrections: corr,
        });
    }
    Ok(())
}

/// Runs the swap protocol and returns every reachable branch (enumerate) or
/// the single sampled trajectory. Branches appear in lexicographic bit order.
pub fn distributed_swap_outcomes(
    alpha: &[Complex64; 2],
    beta: &[Complex64; 2],
    mode: RunMode,
    scope: NegationScope,
) -> Result<Vec<BranchOutcome>> {
    let after_step1 = apply_step1(&initial_swap_state(alpha, beta)?)?;
    let mut out = Vec::new();
    match mode {
        RunMode::Sample(seed) => {
            let mut rng = random::rng_from_seed(seed);
            let ba = after_step1.sample(2, &mut rng)?;
            let post_a = ba.post_state.clone().expect("sampled branch is valid");
            let bb = post_a.sample(4, &mut rng)?;
            let post_b = bb.post_state.clone().expect("sampled branch is valid");
            let p2 = ba.probability * bb.probability;
            let mut rng_opt = Some(rng);
            finish_branch(post_b, (ba.bit, bb.bit), p2, scope, &mut rng_opt, &mut out)?;
        }
        RunMode::Enumerate => {
            let (a0, a1) = after_step1.measure(2)?;
            for ba in [a0, a1] {
                let Some(post_a) = ba.post_state.clone() else {
                    continue;
                };
                let (b0, b1) = post_a.measure(4)?;
                for bb in [b0, b1] {
                    let Some(post_b) = bb.post_state.clone() else {
                        continue;
                    };
                    let p2 = ba.probability * bb.probability;
                    finish_branch(
                        post_b,
                        (ba.bit, bb.bit),
                        p2,
                        scope,
                        &mut None,
                        &mut out,
                    )?;
                }
            }
        }
    }
    Ok(out)
}

/// Branch reports for the swap protocol under the default negation scope.
pub fn distributed_swap(
    alpha: &[Complex64; 2],
    beta: &[Complex64; 2],
    mode: RunMode,
) -> Result<Vec<BranchReport>> {
    distributed_swap_outcomes(alpha, beta, mode, NegationScope::default())?
        .iter()
        .map(|o| o.report(alpha, beta))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pauli {
    I,
    X,
    Z,
    XZ,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ];

    pub fn matrix(&self) -> Unitary {
        match self {
            Pauli::I => Unitary::identity(2),
            Pauli::X => std_gate(StdGate::X),
            Pauli::Z => std_gate(StdGate::Z),
            Pauli::XZ => std_gate(StdGate::X).mul(&std_gate(StdGate::Z)),
        }
    }
}

/// Extra correction search result for one branch.
#[derive(Clone, Debug, Serialize)]
pub struct CalibrationEntry {
    pub branch: String,
    /// First Pauli pair (H0, H5) that reaches fidelity 1 on every tested
    /// input, in the fixed order I, X, Z, XZ; `None` if no pair works.
    pub correction: Option<(Pauli, Pauli)>,
    /// Every passing pair, for the record.
    pub passing: Vec<(Pauli, Pauli)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationTable {
    pub entries: Vec<CalibrationEntry>,
}

impl CalibrationTable {
    /// True when the literal protocol corrections already succeed everywhere.
    pub fn is_identity_only(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.correction == Some((Pauli::I, Pauli::I)))
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| e.correction.is_some())
    }
}

const CAL_TOL: f64 = 1e-9;

/// Exhaustive search, on top of the literal protocol, for per-branch Pauli
/// pairs on (H0, H5) that reach fidelity 1 for every sampled input pair.
/// Identity-only output certifies the printed Step-2/Step-4 corrections.
pub fn calibrate_corrections(alpha_samples: usize, seed: u64) -> Result<CalibrationTable> {
    calibrate_with_scope(alpha_samples, seed, NegationScope::default())
}

pub fn calibrate_with_scope(
    alpha_samples: usize,
    seed: u64,
    scope: NegationScope,
) -> Result<CalibrationTable> {
    let mut rng = random::rng_from_seed(seed);
    let inputs: Vec<([Complex64; 2], [Complex64; 2])> = (0..alpha_samples.max(1))
        .map(|_| {
            (
                random::random_qubit(&mut rng),
                random::random_qubit(&mut rng),
            )
        })
        .collect();

    // branch id → per-input final states.
    type BranchCases<'a> = Vec<(&'a ([Complex64; 2], [Complex64; 2]), QReg)>;
    let mut per_branch: Vec<BranchCases> = (0..16).map(|_| Vec::new()).collect();
    for input in &inputs {
        let outcomes =
            distributed_swap_outcomes(&input.0, &input.1, RunMode::Enumerate, scope)?;
        for o in outcomes {
            let id = o.bits.iter().fold(0usize, |acc, b| (acc << 1) | *b as usize);
            per_branch[id].push((input, o.state));
        }
    }

    let mut entries = Vec::with_capacity(16);
    for (id, cases) in per_branch.iter().enumerate() {
        let branch = format!("{id:04b}");
        let mut passing = Vec::new();
        for p0 in Pauli::ALL {
            for p5 in Pauli::ALL {
                let m0 = p0.matrix();
                let m5 = p5.matrix();
                let ok = cases.iter().try_fold(true, |acc, (input, state)| {
                    if !acc {
                        return Ok::<bool, Error>(false);
                    }
                    let corrected = state.apply(&m0, &[0])?.apply(&m5, &[5])?;
                    let f0 = corrected.single_qubit_overlap(0, &input.1)?;
                    let f5 = corrected.single_qubit_overlap(5, &input.0)?;
                    Ok(f0 >= 1.0 - CAL_TOL && f5 >= 1.0 - CAL_TOL)
                })?;
                if ok && !cases.is_empty() {
                    passing.push((p0, p5));
                }
            }
        }
        entries.push(CalibrationEntry {
            branch,
            correction: passing.first().copied(),
            passing,
        });
    }
    Ok(CalibrationTable { entries })
}

/// One teleportation branch: two classical bits, Bob's corrected qubit.
#[derive(Clone, Debug, Serialize)]
pub struct TeleportReport {
    pub branch: String,
    #[serde(rename = "p")]
    pub probability: f64,
    /// |⟨ξ|Bob's final qubit⟩|².
    #[serde(rename = "f")]
    pub fidelity: f64,
    pub corrections: Vec<Correction>,
}

/// Teleports ξ from Alice to Bob through one shared pair: C(ξ→pair half),
/// 1/√2 rotation on ξ, two measurements, branch-indexed Pauli at Bob
/// (00→I, 01→X, 10→Z, 11→XZ).
pub fn teleport(xi: &[Complex64; 2], mode: RunMode) -> Result<Vec<TeleportReport>> {
    check_qubit_state(xi)?;
    let h = std_gate(StdGate::H);
    let cx = cnot(0, 1)?;
    let ready = QReg::prepare(&[*xi, ket_zero(), ket_zero()])?
        .apply(&h, &[1])?
        .apply(&cx, &[1, 2])? // share Φ+ on (1, 2)
        .apply(&cx, &[0, 1])?
        .apply(&h, &[0])?;

    let pairs: Vec<(crate::qstate::MeasBranch, crate::qstate::MeasBranch)> = match mode {
        RunMode::Sample(seed) => {
            let mut rng = random::rng_from_seed(seed);
            let bs = ready.sample(0, &mut rng)?;
            let post = bs.post_state.clone().expect("sampled branch is valid");
            let bt = post.sample(1, &mut rng)?;
            vec![(bs, bt)]
        }
        RunMode::Enumerate => {
            let (s0, s1) = ready.measure(0)?;
            let mut pairs = Vec::new();
            for bs in [s0, s1] {
                if let Some(post) = bs.post_state.clone() {
                    let (t0, t1) = post.measure(1)?;
                    for bt in [t0, t1] {
                        if bt.post_state.is_some() {
                            pairs.push((bs.clone(), bt));
                        }
                    }
                }
            }
            pairs
        }
    };

    let x = std_gate(StdGate::X);
    let z = std_gate(StdGate::Z);
    let mut reports = Vec::new();
    for (bs, bt) in pairs {
        let mut state = bt.post_state.clone().expect("branch with p>0 has a state");
        let mut corrections = Vec::new();
        if bt.bit == 1 {
            state = state.apply(&x, &[2])?;
            corrections.push(Correction {
                party: Party::Bob,
                qubit: 2,
                gate: "X",
            });
        }
        if bs.bit == 1 {
            state = state.apply(&z, &[2])?;
            corrections.push(Correction {
                party: Party::Bob,
                qubit: 2,
                gate: "Z",
            });
        }
        reports.push(TeleportReport {
            branch: format!("{}{}", bs.bit, bt.bit),
            probability: bs.probability * bt.probability,
            fidelity: state.single_qubit_overlap(2, xi)?,
            corrections,
        });
    }
    Ok(reports)
}

/// Entanglement and classical-communication budget of a protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceLedger {
    pub entangled_pairs: u32,
    pub bits_alice_to_bob: u32,
    pub bits_bob_to_alice: u32,
}

pub fn distributed_swap_ledger() -> ResourceLedger {
    ResourceLedger {
        entangled_pairs: 2,
        bits_alice_to_bob: 2,
        bits_bob_to_alice: 2,
    }
}

pub fn teleport_ledger() -> ResourceLedger {
    ResourceLedger {
        entangled_pairs: 1,
        bits_alice_to_bob: 2,
        bits_bob_to_alice: 0,
    }
}

/// Two teleportations, one per direction: the same budget as the swap.
pub fn double_teleport_ledger() -> ResourceLedger {
    ResourceLedger {
        entangled_pairs: 2,
        bits_alice_to_bob: 2,
        bits_bob_to_alice: 2,
    }
}
