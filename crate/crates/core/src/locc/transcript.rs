use std::fmt;
use std::str::FromStr;

use super::{PartyName, Topology};
use crate::error::{Error, Result};
use crate::protocol::{Mode, ProtocolSpec};
use crate::quantum::Label;
use crate::random::GENERATOR;

pub const HEADER: &str = "rsp-transcript v1";

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Setup {
        spec: ProtocolSpec,
        topology: Topology,
        seed: u64,
    },
    MeasurementSampled {
        outcome: u8,
        probability: f64,
    },
    /// Alice's one-bit public message.
    Broadcast {
        bit: u8,
    },
    CorrectionApplied {
        party: PartyName,
        label: Label,
        gate: String,
    },
    FinalReport {
        fidelity_b: f64,
        fidelity_c: f64,
    },
}

impl fmt::Display for Event {
    /// One comma-separated record; floats use the shortest decimal that
    /// round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Setup {
                spec,
                topology,
                seed,
            } => write!(
                f,
                "setup,{},{:?},{:?},{},{},{}",
                spec.mode(),
                spec.angle(),
                spec.alpha(),
                topology,
                seed,
                GENERATOR
            ),
            Event::MeasurementSampled {
                outcome,
                probability,
            } => {
                write!(f, "measurement,{outcome},{probability:?}")
            }
            Event::Broadcast { bit } => write!(f, "broadcast,{bit}"),
            Event::CorrectionApplied { party, label, gate } => {
                write!(f, "correction,{party},{label},{gate}")
            }
            Event::FinalReport {
                fidelity_b,
                fidelity_c,
            } => {
                write!(f, "final,{fidelity_b:?},{fidelity_c:?}")
            }
        }
    }
}

fn field<T: FromStr>(raw: &str, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{raw}'")))
}

fn bit(raw: &str) -> Result<u8> {
    match raw {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(Error::Parse(format!("bad bit '{raw}'"))),
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split(',').collect();
        let arity = |n: usize| -> Result<()> {
            if parts.len() != n {
                return Err(Error::Parse(format!(
                    "'{}' record has {} fields, expected {n}",
                    parts[0],
                    parts.len()
                )));
            }
            Ok(())
        };
        match parts[0] {
            "setup" => {
                arity(7)?;
                let mode: Mode = parts[1].parse()?;
                let angle: f64 = field(parts[2], "angle")?;
                let alpha: f64 = field(parts[3], "alpha")?;
                let spec = match mode {
                    Mode::GeneralAlpha => ProtocolSpec::new(mode, angle, Some(alpha))?,
                    _ => ProtocolSpec::new(mode, angle, None)?,
                };
                if spec.alpha().to_bits() != alpha.to_bits() {
                    return Err(Error::Parse(format!(
                        "alpha {alpha} does not match {} mode",
                        mode
                    )));
                }
                if parts[6] != GENERATOR {
                    return Err(Error::Parse(format!(
                        "transcript generator '{}' is not {GENERATOR}",
                        parts[6]
                    )));
                }
                Ok(Event::Setup {
                    spec,
                    topology: parts[4].parse()?,
                    seed: field(parts[5], "seed")?,
                })
            }
            "measurement" => {
                arity(3)?;
                Ok(Event::MeasurementSampled {
                    outcome: bit(parts[1])?,
                    probability: field(parts[2], "probability")?,
                })
            }
            "broadcast" => {
                arity(2)?;
                Ok(Event::Broadcast {
                    bit: bit(parts[1])?,
                })
            }
            "correction" => {
                arity(4)?;
                let mut chars = parts[2].chars();
                let label = match (chars.next(), chars.next()) {
                    (Some(c), None) => c,
                    _ => return Err(Error::Parse(format!("bad label '{}'", parts[2]))),
                };
                Ok(Event::CorrectionApplied {
                    party: parts[1].parse()?,
                    label,
                    gate: parts[3].to_string(),
                })
            }
            "final" => {
                arity(3)?;
                Ok(Event::FinalReport {
                    fidelity_b: field(parts[1], "fidelity")?,
                    fidelity_c: field(parts[2], "fidelity")?,
                })
            }
            other => Err(Error::Parse(format!("unknown record '{other}'"))),
        }
    }
}

/// Ordered session events. Ordering rules are enforced on replay, not on
/// construction, so partial or tampered transcripts can still be parsed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub(crate) fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    /// FNV-1a over the serialized form.
    pub fn digest(&self) -> u64 {
        self.to_string()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325, |h, b| {
                (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
            })
    }

    pub fn final_report(&self) -> Option<(f64, f64)> {
        self.events.iter().find_map(|e| match e {
            Event::FinalReport {
                fidelity_b,
                fidelity_c,
            } => Some((*fidelity_b, *fidelity_c)),
            _ => None,
        })
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for Transcript {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header '{HEADER}', found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let events = lines.map(|l| l.trim().parse()).collect::<Result<_>>()?;
        Ok(Self { events })
    }
}

/// Total broadcast payload in bits.
pub fn classical_cost(t: &Transcript) -> usize {
    t.events
        .iter()
        .filter(|e| matches!(e, Event::Broadcast { .. }))
        .count()
}
