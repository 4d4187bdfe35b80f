//! Objectives evaluated by a child process over a line protocol: the parent
//! writes one line of space-separated decimal coordinates, the child answers
//! with one line holding the objective value.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::format_float;
use crate::error::{Error, Result};
use crate::types::Objective;

/// Per-evaluation reply deadline.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// An [`Objective`] backed by a shell command. The child is killed when the
/// objective is dropped or a reply times out.
pub struct ExternalObjective {
    command: String,
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<std::io::Result<String>>,
    timeout: Duration,
    optimum: Option<f64>,
}

impl ExternalObjective {
    /// Starts `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::ChildExit(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, replies) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let failed = line.is_err();
                if tx.send(line).is_err() || failed {
                    break;
                }
            }
        });
        Ok(Self {
            command: command.to_string(),
            child,
            stdin,
            replies,
            timeout: DEFAULT_TIMEOUT,
            optimum: None,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Declares the known minimum, enabling tolerance-based termination.
    pub fn with_optimum(mut self, f_true: f64) -> Self {
        self.optimum = Some(f_true);
        self
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn exited(&mut self, what: &str) -> Error {
        let status = match self.child.try_wait() {
            Ok(Some(status)) => status.to_string(),
            Ok(None) => "still running".to_string(),
            Err(e) => e.to_string(),
        };
        Error::ChildExit(format!("`{}` {what} ({status})", self.command))
    }
}

impl Objective for ExternalObjective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let line: Vec<String> = x.iter().map(|&v| format_float(v)).collect();
        let sent = match self.stdin.as_mut() {
            Some(stdin) => writeln!(stdin, "{}", line.join(" ")).and_then(|_| stdin.flush()),
            None => Err(std::io::ErrorKind::BrokenPipe.into()),
        };
        if sent.is_err() {
            self.stdin = None;
            return Err(self.exited("stopped reading input"));
        }
        match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Protocol(format!("expected one number, got `{}`", reply.trim()))),
            Ok(Err(e)) => Err(Error::Protocol(format!("unreadable reply: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                let _ = self.child.kill();
                Err(Error::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => {
                let _ = self.child.wait();
                Err(self.exited("closed its output"))
            }
        }
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}

impl Drop for ExternalObjective {
    fn drop(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Child side of the protocol: answers every input line with the value of
/// `objective` until the input ends.
pub fn serve<O: Objective + ?Sized>(
    objective: &mut O,
    input: impl BufRead,
    mut output: impl Write,
) -> Result<()> {
    let broken = |e: std::io::Error| Error::ChildExit(format!("protocol stream failed: {e}"));
    for line in input.lines() {
        let line = line.map_err(broken)?;
        if line.trim().is_empty() {
            continue;
        }
        let x = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Protocol(format!("bad coordinate `{t}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let value = objective.evaluate(&x)?;
        writeln!(output, "{}", format_float(value)).map_err(broken)?;
        output.flush().map_err(broken)?;
    }
    Ok(())
}
