use super::Topology;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::protocol::{alice_basis, clone_states, resource_state, ProtocolSpec};
use crate::quantum::{DensityMatrix, Label};

pub const AUDIT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub party: &'static str,
    pub label: Label,
    /// `‖Σ_k p_k ρ_k − I/2‖_max` over Alice's outcomes, before any bit arrives.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub spec: ProtocolSpec,
    pub topology: Topology,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }
}

/// Checks that a receiver who has not yet heard the broadcast sees `I/2`
/// whatever Alice measured.
pub fn no_signaling_audit(spec: &ProtocolSpec, topology: Topology) -> Result<AuditReport> {
    let (phi0, phi1) = clone_states(spec);
    let resolution = resource_state(&phi0, &phi1)?.measure_in_basis('a', &alice_basis(spec))?;
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let mut entries = Vec::new();
    for label in ['B', 'C'] {
        let mut mixture = ComplexMatrix::zeros(2);
        for branch in &resolution.branches {
            if let Some(state) = &branch.state {
                let rho = DensityMatrix::from_state(state).partial_trace(&[label])?;
                mixture = &mixture + &rho.matrix().scale_real(branch.probability);
            }
        }
        let deviation = mixture.max_abs_diff(&half);
        let party = topology
            .owner(label)
            .expect("receivers hold B and C")
            .as_str();
        if deviation.is_nan() || deviation > AUDIT_TOL {
            return Err(Error::AuditFailure {
                party,
                deviation,
                matrix: mixture.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            });
        }
        entries.push(AuditEntry {
            party,
            label,
            deviation,
        });
    }
    Ok(AuditReport {
        spec: *spec,
        topology,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn protocol_grids_pass() {
        for k in 0..=32 {
            let phi = 2.0 * PI * k as f64 / 32.0;
            let theta = PI * k as f64 / 32.0;
            for spec in [
                ProtocolSpec::equatorial(phi).unwrap(),
                ProtocolSpec::polar(theta).unwrap(),
                ProtocolSpec::general_alpha(theta, 1.0).unwrap(),
            ] {
                for topology in [Topology::Standard, Topology::SameLocation] {
                    let r = no_signaling_audit(&spec, topology).unwrap();
                    assert!(r.max_deviation() <= AUDIT_TOL);
                }
            }
        }
    }

    #[test]
    fn entries_name_the_holder() {
        let spec = ProtocolSpec::polar(1.0).unwrap();
        let r = no_signaling_audit(&spec, Topology::SameLocation).unwrap();
        assert!(r.entries.iter().all(|e| e.party == "Bob"));
        let r = no_signaling_audit(&spec, Topology::Standard).unwrap();
        assert_eq!(r.entries[1].party, "Charlie");
    }
}
