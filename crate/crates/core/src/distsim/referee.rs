//! The referee owns the only copy of the simulated six-qubit register.
//! Parties drive it with APPLY/MEASURE requests and learn nothing beyond
//! their own RESULT bits, so the classical-channel constraint between the
//! participants is enforced structurally. The referee also relays the
//! party-to-party BIT messages and keeps the canonical transcript.
//!
//! Messages are processed in strict step order — Alice's messages for each
//! step before Bob's — which makes transcripts byte-identical across
//! transports for a fixed seed.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::wire::{decode, encode, Role, WireGate, WireMessage};
use crate::error::{Error, Result};
use crate::gatelib::{cnot, std_gate, StdGate};
use crate::protocols::{initial_swap_state, BranchReport, Correction, Party};
use crate::qstate::QReg;
use crate::random;

/// One transcript line; `dir` is one of A→R, R→A, B→R, R→B, A→B, B→A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub dir: String,
    pub raw: String,
}

pub type Transcript = Vec<TranscriptEntry>;

pub fn transcript_to_json_lines(t: &Transcript) -> String {
    t.iter()
        .map(|e| serde_json::to_string(e).expect("transcript entries serialize"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A duplex line channel to one party; the referee is the only consumer.
pub trait PartyChannel {
    /// Next line from this party, without the trailing newline. Blocks.
    fn recv_line(&mut self) -> Result<String>;
    /// Deliver one line to this party.
    fn send_line(&mut self, line: &str) -> Result<()>;
}

fn party_label(role: Role) -> &'static str {
    match role {
        Role::Alice => "A",
        Role::Bob => "B",
    }
}

fn owned(role: Role) -> [u8; 3] {
    match role {
        Role::Alice => [0, 1, 2],
        Role::Bob => [3, 4, 5],
    }
}

pub struct Referee {
    alpha: [Complex64; 2],
    beta: [Complex64; 2],
    state: QReg,
    rng: ChaCha8Rng,
    transcript: Transcript,
    corrections: Vec<Correction>,
    probability: f64,
    bits: [u8; 4],
}

impl Referee {
    pub fn new(alpha: [Complex64; 2], beta: [Complex64; 2], seed: u64) -> Result<Self> {
        Ok(Referee {
            alpha,
            beta,
            state: initial_swap_state(&alpha, &beta)?,
            rng: random::rng_from_seed(seed),
            transcript: Vec::new(),
            corrections: Vec::new(),
            probability: 1.0,
            bits: [0; 4],
        })
    }

    fn log(&mut self, dir: &str, raw: &str) {
        self.transcript.push(TranscriptEntry {
            dir: dir.to_string(),
            raw: raw.trim_end().to_string(),
        });
    }

    fn recv(&mut self, ch: &mut dyn PartyChannel) -> Result<(WireMessage, String)> {
        let line = ch.recv_line()?;
        let msg = decode(&line)?;
        Ok((msg, line.trim_end().to_string()))
    }

    fn check_ownership(&self, role: Role, raw: &str, qubits: &[u8]) -> Result<()> {
        for q in qubits {
            if !owned(role).contains(q) {
                return Err(Error::Ownership(format!(
                    "{} may not touch qubit {q} (`{raw}`)",
                    role.token()
                )));
            }
        }
        Ok(())
    }

    fn apply_gate(&mut self, role: Role, gate: WireGate, q: u8, q2: Option<u8>) -> Result<()> {
        match gate {
            WireGate::Cnot => {
                let target = q2.expect("decoder guarantees two qubits for CNOT");
                self.state = self
                    .state
                    .apply(&cnot(0, 1)?, &[usize::from(q), usize::from(target)])?;
            }
            WireGate::X | WireGate::H | WireGate::Z => {
                let (matrix, name) = match gate {
                    WireGate::X => (std_gate(StdGate::X), "X"),
                    WireGate::H => (std_gate(StdGate::H), "H"),
                    WireGate::Z => (std_gate(StdGate::Z), "Z"),
                    WireGate::Cnot => unreachable!(),
                };
                self.state = self.state.apply(&matrix, &[usize::from(q)])?;
                if matches!(gate, WireGate::X | WireGate::Z) {
                    self.corrections.push(Correction {
                        party: match role {
                            Role::Alice => Party::Alice,
                            Role::Bob => Party::Bob,
                        },
                        qubit: usize::from(q),
                        gate: name,
                    });
                }
            }
        }
        Ok(())
    }

    fn expect_hello(&mut self, role: Role, ch: &mut dyn PartyChannel) -> Result<()> {
        let (msg, raw) = self.recv(ch)?;
        match msg {
            WireMessage::Hello(r) if r == role => {
                self.log(&format!("{}→R", party_label(role)), &raw);
                Ok(())
            }
            _ => Err(Error::ProtocolOrder(format!(
                "expected HELLO {} first, got `{raw}`",
                role.token()
            ))),
        }
    }

    /// Consumes this party's APPLY burst, returning the stashed MEASURE line;
    /// the measurement itself runs once both parties finished the step.
    fn applies_until_measure(&mut self, role: Role, ch: &mut dyn PartyChannel) -> Result<String> {
        loop {
            let (msg, raw) = self.recv(ch)?;
            match msg {
                WireMessage::Apply(gate, q, q2) => {
                    let qubits: Vec<u8> = std::iter::once(q).chain(q2).collect();
                    self.check_ownership(role, &raw, &qubits)?;
                    self.log(&format!("{}→R", party_label(role)), &raw);
                    self.apply_gate(role, gate, q, q2)?;
                }
                WireMessage::Measure(q) => {
                    self.check_ownership(role, &raw, &[q])?;
                    return Ok(raw);
                }
                _ => {
                    return Err(Error::ProtocolOrder(format!(
                        "{} sent `{raw}` while gate operations were expected",
                        role.token()
                    )))
                }
            }
        }
    }

    /// Runs a stashed MEASURE: samples the branch, collapses the register,
    /// replies RESULT, and logs both lines.
    fn run_measure(
        &mut self,
        role: Role,
        ch: &mut dyn PartyChannel,
        raw: &str,
        bit_slot: usize,
    ) -> Result<u8> {
        let q = match decode(raw)? {
            WireMessage::Measure(q) => q,
            _ => unreachable!("only MEASURE lines are stashed"),
        };
        self.log(&format!("{}→R", party_label(role)), raw);
        let branch = self.state.sample(usize::from(q), &mut self.rng)?;
        self.state = branch
            .post_state
            .clone()
            .expect("sampled branches have positive probability");
        self.probability *= branch.probability;
        self.bits[bit_slot] = branch.bit;
        let reply = encode(&WireMessage::Result(branch.bit));
        self.log(&format!("R→{}", party_label(role)), &reply);
        ch.send_line(&reply)?;
        Ok(branch.bit)
    }

    /// Receives one BIT and relays it to the other party.
    fn relay_bit(
        &mut self,
        from: Role,
        ch_from: &mut dyn PartyChannel,
        ch_to: &mut dyn PartyChannel,
    ) -> Result<()> {
        let (msg, raw) = self.recv(ch_from)?;
        match msg {
            WireMessage::Bit(_) => {
                self.log(
                    &format!("{}→{}", party_label(from), party_label(from.other())),
                    &raw,
                );
                ch_to.send_line(&encode(&msg))
            }
            _ => Err(Error::ProtocolOrder(format!(
                "{} sent `{raw}` where a BIT was expected",
                from.token()
            ))),
        }
    }

    /// Consumes the closing burst (optional corrections, then DONE).
    fn applies_until_done(&mut self, role: Role, ch: &mut dyn PartyChannel) -> Result<()> {
        loop {
            let (msg, raw) = self.recv(ch)?;
            match msg {
                WireMessage::Apply(gate, q, q2) => {
                    let qubits: Vec<u8> = std::iter::once(q).chain(q2).collect();
                    self.check_ownership(role, &raw, &qubits)?;
                    self.log(&format!("{}→R", party_label(role)), &raw);
                    self.apply_gate(role, gate, q, q2)?;
                }
                WireMessage::Done => {
                    self.log(&format!("{}→R", party_label(role)), &raw);
                    return Ok(());
                }
                _ => {
                    return Err(Error::ProtocolOrder(format!(
                        "{} sent `{raw}` while closing the session",
                        role.token()
                    )))
                }
            }
        }
    }

    /// Drives one full protocol session over the two channels.
    pub fn run(
        mut self,
        alice: &mut dyn PartyChannel,
        bob: &mut dyn PartyChannel,
    ) -> Result<(BranchReport, Transcript)> {
        self.expect_hello(Role::Alice, alice)?;
        self.expect_hello(Role::Bob, bob)?;

        // Step 1 and the step-2 measurements.
        let stash_a = self.applies_until_measure(Role::Alice, alice)?;
        let stash_b = self.applies_until_measure(Role::Bob, bob)?;
        self.run_measure(Role::Alice, alice, &stash_a, 0)?;
        self.run_measure(Role::Bob, bob, &stash_b, 1)?;

        // Step-2 bit exchange.
        self.relay_bit(Role::Alice, alice, bob)?;
        self.relay_bit(Role::Bob, bob, alice)?;

        // Step-2 corrections, step-3 rotations, step-4 measurements.
        let stash_a = self.applies_until_measure(Role::Alice, alice)?;
        let stash_b = self.applies_until_measure(Role::Bob, bob)?;
        self.run_measure(Role::Alice, alice, &stash_a, 2)?;
        self.run_measure(Role::Bob, bob, &stash_b, 3)?;

        // Step-4 bit exchange.
        self.relay_bit(Role::Alice, alice, bob)?;
        self.relay_bit(Role::Bob, bob, alice)?;

        // Step-4 corrections and session close.
        self.applies_until_done(Role::Alice, alice)?;
        self.applies_until_done(Role::Bob, bob)?;

        let report = BranchReport {
            branch: self.bits.iter().map(|b| b.to_string()).collect(),
            probability: self.probability,
            fidelity_h0: self.state.single_qubit_overlap(0, &self.beta)?,
            fidelity_h5: self.state.single_qubit_overlap(5, &self.alpha)?,
            corrections: self.corrections.clone(),
        };
        Ok((report, self.transcript))
    }
}
