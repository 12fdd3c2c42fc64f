//! Transports: an in-memory cooperative channel that steps a `PartyMachine`
//! directly, and a newline-delimited TCP loopback channel with the same
//! message contract.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};

use super::party::PartyMachine;
use super::referee::PartyChannel;
use super::wire::{decode, encode, Role, WireMessage, MAX_LINE_BYTES};
use crate::error::{Error, Result};

/// Runs a party machine in process. The referee pulls lines out and pushes
/// RESULT/BIT lines in; pushing may enqueue the machine's next burst.
pub struct MachineChannel {
    machine: PartyMachine,
    outbox: VecDeque<String>,
}

impl MachineChannel {
    pub fn new(role: Role) -> Result<Self> {
        let mut machine = PartyMachine::new(role);
        let outbox = machine.start()?.iter().map(encode).collect();
        Ok(MachineChannel { machine, outbox })
    }

    pub fn machine(&self) -> &PartyMachine {
        &self.machine
    }
}

impl PartyChannel for MachineChannel {
    fn recv_line(&mut self) -> Result<String> {
        self.outbox
            .pop_front()
            .map(|l| l.trim_end().to_string())
            .ok_or_else(|| {
                Error::Transport(format!(
                    "{} has no pending message; referee out of sync",
                    self.machine.role().token()
                ))
            })
    }

    fn send_line(&mut self, line: &str) -> Result<()> {
        let msg = decode(line)?;
        for out in self.machine.on_message(&msg)? {
            self.outbox.push_back(encode(&out));
        }
        Ok(())
    }
}

/// Line-oriented channel over a TCP stream.
pub struct TcpChannel {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    peeked: Option<String>,
}

impl TcpChannel {
    pub fn new(stream: TcpStream) -> Result<Self> {
        let writer = stream
            .try_clone()
            .map_err(|e| Error::Transport(format!("clone stream: {e}")))?;
        Ok(TcpChannel {
            reader: BufReader::new(stream),
            writer,
            peeked: None,
        })
    }

    /// Reads one line and keeps it for the next `recv_line`; used to learn a
    /// connection's role from its HELLO before wiring it to the referee.
    pub fn peek_line(&mut self) -> Result<String> {
        let line = self.read_one()?;
        self.peeked = Some(line.clone());
        Ok(line)
    }

    fn read_one(&mut self) -> Result<String> {
        let mut line = String::new();
        let n = self
            .reader
            .read_line(&mut line)
            .map_err(|e| Error::Transport(format!("read: {e}")))?;
        if n == 0 {
            return Err(Error::Transport("connection closed".to_string()));
        }
        if line.len() > MAX_LINE_BYTES {
            return Err(super::wire::WireError::Oversize(line.len()).into());
        }
        Ok(line.trim_end().to_string())
    }
}

impl PartyChannel for TcpChannel {
    fn recv_line(&mut self) -> Result<String> {
        if let Some(line) = self.peeked.take() {
            return Ok(line);
        }
        self.read_one()
    }

    fn send_line(&mut self, line: &str) -> Result<()> {
        let mut owned = line.to_string();
        if !owned.ends_with('\n') {
            owned.push('\n');
        }
        self.writer
            .write_all(owned.as_bytes())
            .and_then(|()| self.writer.flush())
            .map_err(|e| Error::Transport(format!("write: {e}")))
    }
}

/// Accepts the two party connections and identifies them by their HELLO
/// lines. Duplicate or missing roles abort the session.
pub fn accept_parties(listener: &TcpListener) -> Result<(TcpChannel, TcpChannel)> {
    let mut alice: Option<TcpChannel> = None;
    let mut bob: Option<TcpChannel> = None;
    for _ in 0..2 {
        let (stream, _) = listener
            .accept()
            .map_err(|e| Error::Transport(format!("accept: {e}")))?;
        let mut channel = TcpChannel::new(stream)?;
        let hello = channel.peek_line()?;
        match decode(&hello)? {
            WireMessage::Hello(Role::Alice) if alice.is_none() => alice = Some(channel),
            WireMessage::Hello(Role::Bob) if bob.is_none() => bob = Some(channel),
            WireMessage::Hello(role) => {
                return Err(Error::Transport(format!(
                    "duplicate HELLO {}",
                    role.token()
                )))
            }
            _ => {
                return Err(Error::ProtocolOrder(format!(
                    "expected HELLO as the first line, got `{hello}`"
                )))
            }
        }
    }
    Ok((
        alice.expect("two accepted connections include Alice"),
        bob.expect("two accepted connections include Bob"),
    ))
}

/// Client loop for one party process: connect, send the opening burst, then
/// react to every referee line until the script completes.
pub fn run_party_client(role: Role, addr: &str) -> Result<()> {
    let stream = TcpStream::connect(addr)
        .map_err(|e| Error::Transport(format!("connect {addr}: {e}")))?;
    let mut channel = TcpChannel::new(stream)?;
    let mut machine = PartyMachine::new(role);
    for msg in machine.start()? {
        channel.send_line(&encode(&msg))?;
    }
    while !machine.is_done() {
        let line = channel.recv_line()?;
        let msg = decode(&line)?;
        for out in machine.on_message(&msg)? {
            channel.send_line(&encode(&out))?;
        }
    }
    Ok(())
}
