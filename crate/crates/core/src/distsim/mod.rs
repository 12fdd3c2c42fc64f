//! Distributed execution of the swap protocol: two party state machines
//! exchange classical bits through a referee that holds the only simulated
//! quantum register, over an in-memory channel or TCP loopback.

pub mod party;
pub mod referee;
pub mod transport;
pub mod wire;

pub use party::PartyMachine;
pub use referee::{transcript_to_json_lines, PartyChannel, Referee, Transcript, TranscriptEntry};
pub use transport::{accept_parties, run_party_client, MachineChannel, TcpChannel};
pub use wire::{decode, encode, Role, WireGate, WireMessage};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocols::BranchReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportKind {
    Memory,
    /// Loopback TCP; port 0 picks an ephemeral port.
    Tcp { port: u16 },
}

/// Runs one seeded protocol session end to end and returns the sampled
/// branch plus the canonical transcript. The result matches
/// `protocols::distributed_swap` in sample mode with the same seed.
pub fn run_distributed(
    alpha: &[Complex64; 2],
    beta: &[Complex64; 2],
    transport: TransportKind,
    seed: u64,
) -> Result<(BranchReport, Transcript)> {
    match transport {
        TransportKind::Memory => {
            let referee = Referee::new(*alpha, *beta, seed)?;
            let mut alice = MachineChannel::new(Role::Alice)?;
            let mut bob = MachineChannel::new(Role::Bob)?;
            referee.run(&mut alice, &mut bob)
        }
        TransportKind::Tcp { port } => {
            let listener = std::net::TcpListener::bind(("127.0.0.1", port))
                .map_err(|e| Error::Transport(format!("bind 127.0.0.1:{port}: {e}")))?;
            let addr = listener
                .local_addr()
                .map_err(|e| Error::Transport(format!("local_addr: {e}")))?
                .to_string();
            let addr_a = addr.clone();
            let addr_b = addr;
            let alice_thread =
                std::thread::spawn(move || run_party_client(Role::Alice, &addr_a));
            let bob_thread = std::thread::spawn(move || run_party_client(Role::Bob, &addr_b));

            let referee = Referee::new(*alpha, *beta, seed)?;
            let (mut alice, mut bob) = accept_parties(&listener)?;
            let result = referee.run(&mut alice, &mut bob);

            alice_thread
                .join()
                .map_err(|_| Error::Transport("alice thread panicked".to_string()))??;
            bob_thread
                .join()
                .map_err(|_| Error::Transport("bob thread panicked".to_string()))??;
            result
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{distributed_swap, RunMode};
    use crate::qstate::{c, ket_one, ket_zero};
    use crate::random;

    #[test]
    fn memory_run_matches_in_process_sampling() {
        let mut rng = random::rng_from_seed(71);
        let alpha = random::random_qubit(&mut rng);
        let beta = random::random_qubit(&mut rng);
        for seed in [0u64, 7, 41] {
            let (report, transcript) =
                run_distributed(&alpha, &beta, TransportKind::Memory, seed).unwrap();
            let sampled = distributed_swap(&alpha, &beta, RunMode::Sample(seed)).unwrap();
            assert_eq!(report.branch, sampled[0].branch);
            assert!((report.probability - sampled[0].probability).abs() < 1e-12);
            assert!((report.fidelity_h0 - sampled[0].fidelity_h0).abs() < 1e-12);
            assert!((report.fidelity_h5 - sampled[0].fidelity_h5).abs() < 1e-12);
            assert_eq!(report.corrections, sampled[0].corrections);
            assert!(!transcript.is_empty());
        }
    }

    #[test]
    fn tcp_and_memory_transcripts_are_identical() {
        let alpha = ket_one();
        let beta = [c(0.6, 0.0), c(0.0, 0.8)];
        for seed in [3u64, 9] {
            let (mem_report, mem_t) =
                run_distributed(&alpha, &beta, TransportKind::Memory, seed).unwrap();
            let (tcp_report, tcp_t) =
                run_distributed(&alpha, &beta, TransportKind::Tcp { port: 0 }, seed).unwrap();
            assert_eq!(
                transcript_to_json_lines(&mem_t),
                transcript_to_json_lines(&tcp_t)
            );
            assert_eq!(mem_report.branch, tcp_report.branch);
            assert_eq!(mem_report.probability, tcp_report.probability);
        }
    }

    #[test]
    fn transcript_structure_invariants() {
        let (_, transcript) =
            run_distributed(&ket_zero(), &ket_one(), TransportKind::Memory, 5).unwrap();
        let mut party_to_party = 0;
        for entry in &transcript {
            match entry.dir.as_str() {
                "A→B" | "B→A" => {
                    assert!(entry.raw.starts_with("BIT "), "{}", entry.raw);
                    party_to_party += 1;
                }
                "A→R" | "B→R" => {
                    // Parties only issue protocol verbs toward the referee.
                    assert!(
                        entry.raw.starts_with("HELLO")
                            || entry.raw.starts_with("APPLY")
                            || entry.raw.starts_with("MEASURE")
                            || entry.raw == "DONE"
                    );
                }
                "R→A" | "R→B" => assert!(entry.raw.starts_with("RESULT ")),
                other => panic!("unexpected direction {other}"),
            }
        }
        assert_eq!(party_to_party, 4, "exactly 2 bits each way");
    }

    #[test]
    fn ownership_in_transcripts() {
        let (_, transcript) =
            run_distributed(&ket_zero(), &ket_zero(), TransportKind::Memory, 11).unwrap();
        for entry in &transcript {
            let qubits: Vec<u8> = entry
                .raw
                .split(' ')
                .filter_map(|t| t.parse::<u8>().ok())
                .collect();
            let allowed: &[u8] = match entry.dir.as_str() {
                "A→R" if !entry.raw.starts_with("HELLO") => &[0, 1, 2],
                "B→R" if !entry.raw.starts_with("HELLO") => &[3, 4, 5],
                _ => continue,
            };
            for q in qubits {
                if entry.raw.starts_with("APPLY") || entry.raw.starts_with("MEASURE") {
                    assert!(allowed.contains(&q), "{} touched {q}", entry.dir);
                }
            }
        }
    }

    #[test]
    fn fixed_seed_means_identical_transcript_bytes() {
        let alpha = ket_zero();
        let beta = ket_one();
        let (_, t1) = run_distributed(&alpha, &beta, TransportKind::Memory, 99).unwrap();
        let (_, t2) = run_distributed(&alpha, &beta, TransportKind::Memory, 99).unwrap();
        assert_eq!(transcript_to_json_lines(&t1), transcript_to_json_lines(&t2));
    }

    #[test]
    fn referee_rejects_foreign_qubit_access() {
        // Drive the referee directly with a misbehaving Alice script.
        struct Script {
            lines: std::collections::VecDeque<&'static str>,
        }
        impl PartyChannel for Script {
            fn recv_line(&mut self) -> crate::error::Result<String> {
                self.lines
                    .pop_front()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Transport("script exhausted".to_string()))
            }
            fn send_line(&mut self, _line: &str) -> crate::error::Result<()> {
                Ok(())
            }
        }
        let referee = Referee::new(ket_zero(), ket_zero(), 1).unwrap();
        let mut alice = Script {
            lines: ["HELLO ALICE", "APPLY CNOT 1 0", "MEASURE 4"].into(),
        };
        let mut bob = Script {
            lines: ["HELLO BOB"].into(),
        };
        let err = referee.run(&mut alice, &mut bob).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("ownership violation"), "{text}");
        assert!(text.contains("MEASURE 4"), "{text}");

        // And a party acting out of turn is named in the diagnostic.
        let referee = Referee::new(ket_zero(), ket_zero(), 1).unwrap();
        let mut alice = Script {
            lines: ["HELLO ALICE", "BIT 0"].into(),
        };
        let mut bob = Script {
            lines: ["HELLO BOB"].into(),
        };
        let err = referee.run(&mut alice, &mut bob).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("protocol order violation"), "{text}");
        assert!(text.contains("BIT 0"), "{text}");
    }
}
