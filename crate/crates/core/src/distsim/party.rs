//! Scripted party state machines. Each party owns three qubits, follows the
//! four protocol steps in order, and never skips one: the machine only emits
//! the next burst of messages once the message it is blocked on arrives.

use super::wire::{Role, WireGate, WireMessage};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Opening,
    AwaitResult2,
    AwaitPeerBit2,
    AwaitResult4,
    AwaitPeerBit4,
    Finished,
}

/// One protocol participant. Outputs are wire messages for the referee hub;
/// `BIT` messages are addressed to the peer and relayed by the hub.
#[derive(Clone, Debug)]
pub struct PartyMachine {
    role: Role,
    step: Step,
    bit2: Option<u8>,
    peer_bit2: Option<u8>,
    bit4: Option<u8>,
    peer_bit4: Option<u8>,
}

impl PartyMachine {
    pub fn new(role: Role) -> Self {
        PartyMachine {
            role,
            step: Step::Opening,
            bit2: None,
            peer_bit2: None,
            bit4: None,
            peer_bit4: None,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn owned_qubits(&self) -> [u8; 3] {
        match self.role {
            Role::Alice => [0, 1, 2],
            Role::Bob => [3, 4, 5],
        }
    }

    pub fn is_done(&self) -> bool {
        self.step == Step::Finished
    }

    /// Recorded classical bits, available once the machine finished:
    /// (own step-2, peer step-2, own step-4, peer step-4).
    pub fn bits(&self) -> Option<(u8, u8, u8, u8)> {
        Some((self.bit2?, self.peer_bit2?, self.bit4?, self.peer_bit4?))
    }

    /// Step 1 plus the step-2 measurement request.
    pub fn start(&mut self) -> Result<Vec<WireMessage>> {
        if self.step != Step::Opening {
            return Err(Error::ProtocolOrder(format!(
                "{} started twice",
                self.role.token()
            )));
        }
        self.step = Step::AwaitResult2;
        let (cnots, measure) = match self.role {
            Role::Alice => ([(1u8, 0u8), (0, 2)], 2u8),
            Role::Bob => ([(5, 4), (3, 5)], 4),
        };
        Ok(vec![
            WireMessage::Hello(self.role),
            WireMessage::Apply(WireGate::Cnot, cnots[0].0, Some(cnots[0].1)),
            WireMessage::Apply(WireGate::Cnot, cnots[1].0, Some(cnots[1].1)),
            WireMessage::Measure(measure),
        ])
    }

    pub fn on_message(&mut self, msg: &WireMessage) -> Result<Vec<WireMessage>> {
        let unexpected = |step: Step| {
            Err(Error::ProtocolOrder(format!(
                "{} received `{}` during {:?}",
                self.role.token(),
                super::wire::encode(msg).trim_end(),
                step
            )))
        };
        match (self.step, msg) {
            (Step::AwaitResult2, WireMessage::Result(b)) => {
                self.bit2 = Some(*b);
                self.step = Step::AwaitPeerBit2;
                Ok(vec![WireMessage::Bit(*b)])
            }
            (Step::AwaitPeerBit2, WireMessage::Bit(b)) => {
                self.peer_bit2 = Some(*b);
                self.step = Step::AwaitResult4;
                let mut out = Vec::new();
                if self.bit2 != self.peer_bit2 {
                    // Negate every qubit still in play on this side.
                    let targets = match self.role {
                        Role::Alice => [0u8, 1],
                        Role::Bob => [3, 5],
                    };
                    for q in targets {
                        out.push(WireMessage::Apply(WireGate::X, q, None));
                    }
                }
                let rotate = match self.role {
                    Role::Alice => 1u8,
                    Role::Bob => 3,
                };
                out.push(WireMessage::Apply(WireGate::H, rotate, None));
                out.push(WireMessage::Measure(rotate));
                Ok(out)
            }
            (Step::AwaitResult4, WireMessage::Result(b)) => {
                self.bit4 = Some(*b);
                self.step = Step::AwaitPeerBit4;
                Ok(vec![WireMessage::Bit(*b)])
            }
            (Step::AwaitPeerBit4, WireMessage::Bit(b)) => {
                self.peer_bit4 = Some(*b);
                self.step = Step::Finished;
                let mut out = Vec::new();
                if self.bit4 != self.peer_bit4 {
                    let target = match self.role {
                        Role::Alice => 0u8,
                        Role::Bob => 5,
                    };
                    out.push(WireMessage::Apply(WireGate::Z, target, None));
                }
                out.push(WireMessage::Done);
                Ok(out)
            }
            (step, _) => unexpected(step),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alice_script_shape() {
        let mut alice = PartyMachine::new(Role::Alice);
        let opening = alice.start().unwrap();
        assert_eq!(opening[0], WireMessage::Hello(Role::Alice));
        assert_eq!(
            opening[1],
            WireMessage::Apply(WireGate::Cnot, 1, Some(0))
        );
        assert_eq!(opening[3], WireMessage::Measure(2));

        let after_result = alice.on_message(&WireMessage::Result(1)).unwrap();
        assert_eq!(after_result, vec![WireMessage::Bit(1)]);

        // Peer disagrees: negations precede the rotation.
        let burst = alice.on_message(&WireMessage::Bit(0)).unwrap();
        assert_eq!(
            burst,
            vec![
                WireMessage::Apply(WireGate::X, 0, None),
                WireMessage::Apply(WireGate::X, 1, None),
                WireMessage::Apply(WireGate::H, 1, None),
                WireMessage::Measure(1),
            ]
        );

        let bit = alice.on_message(&WireMessage::Result(0)).unwrap();
        assert_eq!(bit, vec![WireMessage::Bit(0)]);
        let closing = alice.on_message(&WireMessage::Bit(0)).unwrap();
        assert_eq!(closing, vec![WireMessage::Done]);
        assert!(alice.is_done());
        assert_eq!(alice.bits(), Some((1, 0, 0, 0)));
    }

    #[test]
    fn bob_corrects_with_z_on_disagreement() {
        let mut bob = PartyMachine::new(Role::Bob);
        bob.start().unwrap();
        bob.on_message(&WireMessage::Result(0)).unwrap();
        let burst = bob.on_message(&WireMessage::Bit(0)).unwrap();
        assert_eq!(
            burst,
            vec![
                WireMessage::Apply(WireGate::H, 3, None),
                WireMessage::Measure(3),
            ]
        );
        bob.on_message(&WireMessage::Result(1)).unwrap();
        let closing = bob.on_message(&WireMessage::Bit(0)).unwrap();
        assert_eq!(
            closing,
            vec![
                WireMessage::Apply(WireGate::Z, 5, None),
                WireMessage::Done,
            ]
        );
    }

    #[test]
    fn out_of_order_messages_are_rejected() {
        let mut alice = PartyMachine::new(Role::Alice);
        alice.start().unwrap();
        let err = alice.on_message(&WireMessage::Bit(0)).unwrap_err();
        assert!(err.to_string().contains("BIT 0"));
    }
}
