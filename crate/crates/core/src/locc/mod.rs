//! The protocol as a session between parties exchanging one public bit.
//!
//! A session is a list of [`Event`]s. [`run_session`] samples the
//! measurement outcome and emits the events; [`replay`] feeds recorded
//! events through the same engine, which enforces ownership and ordering
//! and recomputes every number it is told.

mod audit;
mod transcript;

pub use audit::{no_signaling_audit, AuditEntry, AuditReport, AUDIT_TOL};
pub use transcript::{classical_cost, Event, Transcript, HEADER};

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::protocol::{
    alice_basis, clone_states, correction, receiver_marginals, resource_state, ProtocolSpec,
    CLONE_LABELS,
};
use crate::quantum::{DensityMatrix, Label, StateVector};
use crate::random::{derive_seed, seeded};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Alice `{a, A}`, Bob `{B}`, Charlie `{C}`.
    #[default]
    Standard,
    /// Alice `{a}`, Bob `{A, B, C}`.
    SameLocation,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Standard => "standard",
            Topology::SameLocation => "same-location",
        }
    }

    pub fn holdings(self) -> Vec<(PartyName, Vec<Label>)> {
        match self {
            Topology::Standard => vec![
                (PartyName::Alice, vec!['a', 'A']),
                (PartyName::Bob, vec!['B']),
                (PartyName::Charlie, vec!['C']),
            ],
            Topology::SameLocation => vec![
                (PartyName::Alice, vec!['a']),
                (PartyName::Bob, vec!['A', 'B', 'C']),
            ],
        }
    }

    pub fn owner(self, label: Label) -> Option<PartyName> {
        self.holdings()
            .into_iter()
            .find(|(_, held)| held.contains(&label))
            .map(|(p, _)| p)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Topology::Standard),
            "same-location" => Ok(Topology::SameLocation),
            other => Err(Error::Parse(format!("unknown topology '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartyName {
    Alice,
    Bob,
    Charlie,
}

impl PartyName {
    pub fn as_str(self) -> &'static str {
        match self {
            PartyName::Alice => "Alice",
            PartyName::Bob => "Bob",
            PartyName::Charlie => "Charlie",
        }
    }
}

impl fmt::Display for PartyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Alice" => Ok(PartyName::Alice),
            "Bob" => Ok(PartyName::Bob),
            "Charlie" => Ok(PartyName::Charlie),
            other => Err(Error::Parse(format!("unknown party '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    AwaitingSetup,
    Measured,
    AwaitingBit,
    Corrected,
    Done,
}

impl Phase {
    fn next(self) -> Option<Phase> {
        match self {
            Phase::AwaitingSetup => Some(Phase::Measured),
            Phase::Measured => Some(Phase::AwaitingBit),
            Phase::AwaitingBit => Some(Phase::Corrected),
            Phase::Corrected => Some(Phase::Done),
            Phase::Done => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Party {
    pub name: PartyName,
    pub held_labels: Vec<Label>,
    phase: Phase,
}

impl Party {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    fn advance(&mut self, to: Phase) -> Result<()> {
        if self.phase.next() != Some(to) {
            return Err(Error::Transcript(format!(
                "{} cannot move from {:?} to {:?}",
                self.name, self.phase, to
            )));
        }
        self.phase = to;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SessionResult {
    pub transcript: Transcript,
    pub outcome: u8,
    /// `(A, B, C)` after corrections.
    pub final_state: StateVector,
    pub rho_b: DensityMatrix,
    pub rho_c: DensityMatrix,
    pub fidelity_b: f64,
    pub fidelity_c: f64,
    pub parties: Vec<Party>,
}

/// Applies events one at a time, rejecting anything out of order.
struct Engine {
    spec: Option<ProtocolSpec>,
    topology: Topology,
    parties: Vec<Party>,
    state: Option<StateVector>,
    outcome: Option<u8>,
    broadcast: Option<u8>,
    corrected: Vec<Label>,
    report: Option<(f64, f64, DensityMatrix, DensityMatrix)>,
    transcript: Transcript,
}

fn violation(msg: impl Into<String>) -> Error {
    Error::Transcript(msg.into())
}

impl Engine {
    fn new() -> Self {
        Self {
            spec: None,
            topology: Topology::Standard,
            parties: Vec::new(),
            state: None,
            outcome: None,
            broadcast: None,
            corrected: Vec::new(),
            report: None,
            transcript: Transcript::default(),
        }
    }

    fn spec(&self) -> Result<ProtocolSpec> {
        self.spec.ok_or_else(|| violation("event before setup"))
    }

    fn advance_all(&mut self, from: Phase, to: Phase) -> Result<()> {
        for p in self.parties.iter_mut().filter(|p| p.phase == from) {
            p.advance(to)?;
        }
        Ok(())
    }

    /// Branch probabilities for Alice's measurement on the current state.
    fn resolution(&self) -> Result<crate::quantum::MeasurementResolution> {
        let state = self.state.as_ref().ok_or_else(|| violation("no state"))?;
        state.measure_in_basis('a', &alice_basis(&self.spec()?))
    }

    fn apply(&mut self, event: Event) -> Result<()> {
        if self.report.is_some() {
            return Err(violation("event after final report"));
        }
        match &event {
            Event::Setup { spec, topology, .. } => {
                if self.spec.is_some() {
                    return Err(violation("second setup"));
                }
                let (phi0, phi1) = clone_states(spec);
                self.state = Some(resource_state(&phi0, &phi1)?);
                self.spec = Some(*spec);
                self.topology = *topology;
                self.parties = topology
                    .holdings()
                    .into_iter()
                    .map(|(name, held_labels)| Party {
                        name,
                        held_labels,
                        phase: Phase::AwaitingSetup,
                    })
                    .collect();
            }
            Event::MeasurementSampled {
                outcome,
                probability,
            } => {
                if self.outcome.is_some() {
                    return Err(violation("second measurement"));
                }
                let resolution = self.resolution()?;
                let expected = resolution.probability(*outcome as usize);
                if expected.to_bits() != probability.to_bits() {
                    return Err(violation(format!(
                        "outcome {outcome} has probability {expected}, transcript says {probability}"
                    )));
                }
                let post = resolution
                    .state(*outcome as usize)
                    .cloned()
                    .ok_or_else(|| violation(format!("outcome {outcome} is impossible")))?;
                self.state = Some(post);
                self.outcome = Some(*outcome);
                self.advance_all(Phase::AwaitingSetup, Phase::Measured)?;
            }
            Event::Broadcast { bit } => {
                let outcome = self
                    .outcome
                    .ok_or_else(|| violation("broadcast before measurement"))?;
                if self.broadcast.is_some() {
                    return Err(violation("second broadcast"));
                }
                if *bit != outcome {
                    return Err(violation(format!(
                        "broadcast {bit} but outcome was {outcome}"
                    )));
                }
                self.broadcast = Some(*bit);
                self.advance_all(Phase::Measured, Phase::AwaitingBit)?;
            }
            Event::CorrectionApplied { party, label, gate } => {
                let bit = self
                    .broadcast
                    .ok_or_else(|| violation("correction before broadcast"))?;
                if bit == 0 {
                    return Err(violation("correction after outcome 0"));
                }
                let expected = correction(&self.spec()?);
                if gate != expected.name() {
                    return Err(violation(format!(
                        "gate {gate}, expected {}",
                        expected.name()
                    )));
                }
                if !CLONE_LABELS.contains(label) || self.corrected.contains(label) {
                    return Err(violation(format!("unexpected correction on {label}")));
                }
                if self.topology.owner(*label) != Some(*party) {
                    return Err(violation(format!("{party} does not hold {label}")));
                }
                let holder = self
                    .parties
                    .iter_mut()
                    .find(|p| p.name == *party)
                    .ok_or_else(|| violation(format!("{party} is not in this session")))?;
                if holder.phase == Phase::AwaitingBit {
                    holder.advance(Phase::Corrected)?;
                }
                let state = self.state.take().expect("measured");
                self.state = Some(state.apply_single_qubit(&expected.gate(), *label)?);
                self.corrected.push(*label);
            }
            Event::FinalReport {
                fidelity_b,
                fidelity_c,
            } => {
                let bit = self
                    .broadcast
                    .ok_or_else(|| violation("report before broadcast"))?;
                let needed = if bit == 1 { CLONE_LABELS.len() } else { 0 };
                if self.corrected.len() != needed {
                    return Err(violation(format!(
                        "{} corrections applied, {needed} required",
                        self.corrected.len()
                    )));
                }
                let state = self.state.as_ref().expect("measured");
                let (rho_b, rho_c) = receiver_marginals(state)?;
                let target = self.spec()?.target();
                let fb = rho_b.fidelity_with_pure(&target)?;
                let fc = rho_c.fidelity_with_pure(&target)?;
                if fb.to_bits() != fidelity_b.to_bits() || fc.to_bits() != fidelity_c.to_bits() {
                    return Err(violation(format!(
                        "report ({fidelity_b}, {fidelity_c}) differs from recomputed ({fb}, {fc})"
                    )));
                }
                self.advance_all(Phase::AwaitingBit, Phase::Corrected)?;
                self.advance_all(Phase::Corrected, Phase::Done)?;
                self.report = Some((fb, fc, rho_b, rho_c));
            }
        }
        self.transcript.push(event);
        Ok(())
    }

    fn finish(self) -> Result<SessionResult> {
        let (fidelity_b, fidelity_c, rho_b, rho_c) = self
            .report
            .ok_or_else(|| violation("transcript has no final report"))?;
        Ok(SessionResult {
            transcript: self.transcript,
            outcome: self.outcome.expect("reported"),
            final_state: self.state.expect("reported"),
            rho_b,
            rho_c,
            fidelity_b,
            fidelity_c,
            parties: self.parties,
        })
    }
}

/// Runs one session, drawing Alice's outcome by inverse CDF from a
/// generator seeded with `seed`.
pub fn run_session(spec: &ProtocolSpec, topology: Topology, seed: u64) -> Result<SessionResult> {
    let mut engine = Engine::new();
    engine.apply(Event::Setup {
        spec: *spec,
        topology,
        seed,
    })?;
    let resolution = engine.resolution()?;
    let u: f64 = seeded(seed).random();
    let outcome = if u < resolution.probability(0) { 0 } else { 1 };
    engine.apply(Event::MeasurementSampled {
        outcome,
        probability: resolution.probability(outcome as usize),
    })?;
    engine.apply(Event::Broadcast { bit: outcome })?;
    if outcome == 1 {
        let gate = correction(spec).name().to_string();
        for label in CLONE_LABELS {
            let party = topology.owner(label).expect("clone qubits are always held");
            engine.apply(Event::CorrectionApplied {
                party,
                label,
                gate: gate.clone(),
            })?;
        }
    }
    let state = engine.state.as_ref().expect("measured");
    let (rho_b, rho_c) = receiver_marginals(state)?;
    let target = spec.target();
    engine.apply(Event::FinalReport {
        fidelity_b: rho_b.fidelity_with_pure(&target)?,
        fidelity_c: rho_c.fidelity_with_pure(&target)?,
    })?;
    engine.finish()
}

/// Re-executes a recorded transcript without sampling.
pub fn replay(transcript: &Transcript) -> Result<SessionResult> {
    let mut engine = Engine::new();
    for e in transcript.events() {
        engine.apply(e.clone())?;
    }
    engine.finish()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchFrequency {
    pub seed: u64,
    pub sessions: usize,
    pub ones: usize,
}

impl BatchFrequency {
    pub fn frequency(&self) -> f64 {
        self.ones as f64 / self.sessions as f64
    }

    /// Distance from `p·n` in binomial standard deviations.
    pub fn z_score(&self, p: f64) -> f64 {
        let n = self.sessions as f64;
        (self.ones as f64 - n * p) / (n * p * (1.0 - p)).sqrt()
    }
}

/// Runs `sessions` sessions with seeds derived from `seed` and counts
/// outcome 1.
pub fn outcome_batch(
    spec: &ProtocolSpec,
    topology: Topology,
    seed: u64,
    sessions: usize,
    exec: Execution,
) -> Result<BatchFrequency> {
    let outcomes = exec.map_range(sessions, |i| {
        run_session(spec, topology, derive_seed(seed, i as u64)).map(|s| s.outcome)
    });
    let mut ones = 0;
    for o in outcomes {
        ones += o? as usize;
    }
    Ok(BatchFrequency {
        seed,
        sessions,
        ones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn seed_with_outcome(spec: &ProtocolSpec, want: u8) -> u64 {
        (0..)
            .find(|&s| run_session(spec, Topology::Standard, s).unwrap().outcome == want)
            .unwrap()
    }

    #[test]
    fn outcome_one_broadcasts_then_corrects_each_clone() {
        let spec = ProtocolSpec::equatorial(1.3).unwrap();
        let s = run_session(&spec, Topology::Standard, seed_with_outcome(&spec, 1)).unwrap();
        let ev = s.transcript.events();
        assert!(matches!(ev[2], Event::Broadcast { bit: 1 }));
        let fixes: Vec<_> = ev
            .iter()
            .filter_map(|e| match e {
                Event::CorrectionApplied { party, label, gate } => {
                    Some((*party, *label, gate.as_str()))
                }
                _ => None,
            })
            .collect();
        assert_eq!(
            fixes,
            vec![
                (PartyName::Alice, 'A', "sigma_z"),
                (PartyName::Bob, 'B', "sigma_z"),
                (PartyName::Charlie, 'C', "sigma_z"),
            ]
        );
        let f = 0.5 + 0.5 * FRAC_1_SQRT_2;
        assert!((s.fidelity_b - f).abs() < 1e-12 && (s.fidelity_c - f).abs() < 1e-12);
        assert!(s.parties.iter().all(|p| p.phase() == Phase::Done));
        assert_eq!(classical_cost(&s.transcript), 1);
    }

    #[test]
    fn outcome_zero_needs_no_correction() {
        let spec = ProtocolSpec::polar(0.9).unwrap();
        let s = run_session(&spec, Topology::Standard, seed_with_outcome(&spec, 0)).unwrap();
        assert!(!s
            .transcript
            .events()
            .iter()
            .any(|e| matches!(e, Event::CorrectionApplied { .. })));
        assert!((s.fidelity_b - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn serialization_round_trips_and_replays() {
        let spec = ProtocolSpec::general_alpha(0.4, 0.9).unwrap();
        for seed in 0..8 {
            let s = run_session(&spec, Topology::SameLocation, seed).unwrap();
            let text = s.transcript.to_string();
            assert!(text.starts_with("rsp-transcript v1\n"));
            let parsed: Transcript = text.parse().unwrap();
            assert_eq!(parsed, s.transcript);
            let r = replay(&parsed).unwrap();
            assert_eq!(r.final_state, s.final_state);
            assert_eq!(r.transcript.digest(), s.transcript.digest());
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let spec = ProtocolSpec::equatorial(0.2).unwrap();
        let s = run_session(&spec, Topology::Standard, seed_with_outcome(&spec, 1)).unwrap();
        let mut ev = s.transcript.events().to_vec();
        // correction moved ahead of the broadcast
        let fix = ev.remove(3);
        ev.insert(2, fix);
        assert!(matches!(
            replay(&Transcript::new(ev)),
            Err(Error::Transcript(_))
        ));

        let mut ev = s.transcript.events().to_vec();
        ev[3] = Event::CorrectionApplied {
            party: PartyName::Bob,
            label: 'A',
            gate: "sigma_z".into(),
        };
        assert!(replay(&Transcript::new(ev)).is_err());

        let mut ev = s.transcript.events().to_vec();
        ev.insert(3, Event::Broadcast { bit: 1 });
        assert!(replay(&Transcript::new(ev)).is_err());

        let setup_only = Transcript::new(s.transcript.events()[..1].to_vec());
        assert_eq!(classical_cost(&setup_only), 0);
        assert!(replay(&setup_only).is_err());
    }

    #[test]
    fn parties_cannot_skip_phases() {
        let mut p = Party {
            name: PartyName::Bob,
            held_labels: vec!['B'],
            phase: Phase::AwaitingSetup,
        };
        assert!(p.advance(Phase::AwaitingBit).is_err());
        p.advance(Phase::Measured).unwrap();
        assert!(p.advance(Phase::Measured).is_err());
    }

    #[test]
    fn header_and_records_are_validated() {
        assert!("rsp-transcript v2\n".parse::<Transcript>().is_err());
        assert!("rsp-transcript v1\nbroadcast,2\n"
            .parse::<Transcript>()
            .is_err());
        assert!("rsp-transcript v1\nfinal,0.5\n"
            .parse::<Transcript>()
            .is_err());
        assert!(
            "rsp-transcript v1\nsetup,equatorial,1,0.5,standard,3,chacha20-rand_chacha0.9\n"
                .parse::<Transcript>()
                .is_err()
        );
    }

    #[test]
    fn batches_are_strategy_independent() {
        let spec = ProtocolSpec::equatorial(0.5).unwrap();
        let a = outcome_batch(&spec, Topology::Standard, 5, 200, Execution::Sequential).unwrap();
        let b = outcome_batch(&spec, Topology::Standard, 5, 200, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
