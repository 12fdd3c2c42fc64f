//! Newline-delimited ASCII wire format for the distributed runner.
//!
//! Grammar, bit-exact:
//! ```text
//! HELLO <ALICE|BOB>\n
//! APPLY <CNOT|X|H|Z> <q> [<q2>]\n
//! MEASURE <q>\n
//! RESULT <0|1>\n
//! BIT <0|1>\n
//! DONE\n
//! ```

use thiserror::Error;

pub const MAX_LINE_BYTES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WireError {
    #[error("unknown verb `{0}`")]
    UnknownVerb(String),
    #[error("malformed bit `{0}`")]
    MalformedBit(String),
    #[error("line exceeds {MAX_LINE_BYTES} bytes (got {0})")]
    Oversize(usize),
    #[error("malformed message: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn token(&self) -> &'static str {
        match self {
            Role::Alice => "ALICE",
            Role::Bob => "BOB",
        }
    }

    pub fn other(&self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireGate {
    Cnot,
    X,
    H,
    Z,
}

impl WireGate {
    pub fn token(&self) -> &'static str {
        match self {
            WireGate::Cnot => "CNOT",
            WireGate::X => "X",
            WireGate::H => "H",
            WireGate::Z => "Z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WireMessage {
    Hello(Role),
    /// Gate, first qubit, optional second qubit (CNOT: control then target).
    Apply(WireGate, u8, Option<u8>),
    Measure(u8),
    Result(u8),
    Bit(u8),
    Done,
}

pub fn encode(msg: &WireMessage) -> String {
    match msg {
        WireMessage::Hello(role) => format!("HELLO {}\n", role.token()),
        WireMessage::Apply(gate, q, None) => format!("APPLY {} {q}\n", gate.token()),
        WireMessage::Apply(gate, q, Some(q2)) => {
            format!("APPLY {} {q} {q2}\n", gate.token())
        }
        WireMessage::Measure(q) => format!("MEASURE {q}\n"),
        WireMessage::Result(b) => format!("RESULT {b}\n"),
        WireMessage::Bit(b) => format!("BIT {b}\n"),
        WireMessage::Done => "DONE\n".to_string(),
    }
}

fn parse_bit(tok: &str) -> Result<u8, WireError> {
    match tok {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(WireError::MalformedBit(other.to_string())),
    }
}

fn parse_qubit(tok: &str) -> Result<u8, WireError> {
    tok.parse::<u8>()
        .ok()
        .filter(|q| *q < 6)
        .ok_or_else(|| WireError::Malformed(format!("bad qubit index `{tok}`")))
}

pub fn decode(line: &str) -> Result<WireMessage, WireError> {
    if line.len() > MAX_LINE_BYTES {
        return Err(WireError::Oversize(line.len()));
    }
    let trimmed = line.strip_suffix('\n').unwrap_or(line);
    let mut toks = trimmed.split(' ');
    let verb = toks.next().unwrap_or("");
    let rest: Vec<&str> = toks.collect();
    let arity = |want: usize| -> Result<(), WireError> {
        if rest.len() == want {
            Ok(())
        } else {
            Err(WireError::Malformed(format!(
                "`{verb}` takes {want} argument(s), got {}",
                rest.len()
            )))
        }
    };
    match verb {
        "HELLO" => {
            arity(1)?;
            match rest[0] {
                "ALICE" => Ok(WireMessage::Hello(Role::Alice)),
                "BOB" => Ok(WireMessage::Hello(Role::Bob)),
                other => Err(WireError::Malformed(format!("bad role `{other}`"))),
            }
        }
        "APPLY" => {
            if rest.len() != 2 && rest.len() != 3 {
                return Err(WireError::Malformed(format!(
                    "`APPLY` takes 2 or 3 arguments, got {}",
                    rest.len()
                )));
            }
            let gate = match rest[0] {
                "CNOT" => WireGate::Cnot,
                "X" => WireGate::X,
                "H" => WireGate::H,
                "Z" => WireGate::Z,
                other => return Err(WireError::Malformed(format!("bad gate `{other}`"))),
            };
            let q = parse_qubit(rest[1])?;
            let q2 = if rest.len() == 3 {
                Some(parse_qubit(rest[2])?)
            } else {
                None
            };
            if gate == WireGate::Cnot && q2.is_none() {
                return Err(WireError::Malformed("CNOT needs two qubits".to_string()));
            }
            if gate != WireGate::Cnot && q2.is_some() {
                return Err(WireError::Malformed(format!(
                    "{} takes one qubit",
                    gate.token()
                )));
            }
            Ok(WireMessage::Apply(gate, q, q2))
        }
        "MEASURE" => {
            arity(1)?;
            Ok(WireMessage::Measure(parse_qubit(rest[0])?))
        }
        "RESULT" => {
            arity(1)?;
            Ok(WireMessage::Result(parse_bit(rest[0])?))
        }
        "BIT" => {
            arity(1)?;
            Ok(WireMessage::Bit(parse_bit(rest[0])?))
        }
        "DONE" => {
            arity(0)?;
            Ok(WireMessage::Done)
        }
        other => Err(WireError::UnknownVerb(other.to_string())),
    }
}
