//! Two-receiver remote state preparation.
//!
//! Alice holds qubits `a` and `A`, Bob holds `B`, Charlie holds `C`. The
//! shared resource is `(|0⟩_a|φ1⟩ − |1⟩_a|φ0⟩)/√2` where `φ0, φ1` are
//! tripartite clone states on `(A, B, C)`. Alice measures `a` in a basis
//! built from the target, broadcasts one bit, and on outcome 1 every
//! holder of `A`, `B`, `C` applies the same single-qubit correction.
//!
//! Outcome 0 is the `|φ⊥⟩` branch (no correction); outcome 1 is the `|φ⟩`
//! branch.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::quantum::{Basis2, DensityMatrix, Gate2, Label, StateVector};

pub const RESOURCE_LABELS: [Label; 4] = ['a', 'A', 'B', 'C'];
pub const CLONE_LABELS: [Label; 3] = ['A', 'B', 'C'];
/// Label given to single-qubit target states.
pub const TARGET_LABEL: Label = 't';

/// Largest fidelity reachable by the polar family (`α² = 2/3`).
pub const MAX_POLAR_FIDELITY: f64 = 5.0 / 6.0;

/// Tolerance for `α² + 2β² = 1`.
const FAMILY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Equatorial,
    Polar,
    GeneralAlpha,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Equatorial => "equatorial",
            Mode::Polar => "polar",
            Mode::GeneralAlpha => "general-alpha",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equatorial" => Ok(Mode::Equatorial),
            "polar" => Ok(Mode::Polar),
            "general-alpha" => Ok(Mode::GeneralAlpha),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

/// Which target family is prepared, at which angle, with which resource.
///
/// The angle is `φ` for the equatorial mode and `θ` otherwise. Both ranges
/// are closed so that the pole `θ = 0` can be evaluated directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolSpec {
    mode: Mode,
    angle: f64,
    alpha: f64,
}

fn check_angle(name: &'static str, value: f64, max: f64, range: &'static str) -> Result<()> {
    if !(0.0..=max).contains(&value) {
        return Err(Error::AngleOutOfRange { name, value, range });
    }
    Ok(())
}

impl ProtocolSpec {
    pub fn equatorial(phi: f64) -> Result<Self> {
        check_angle("phi", phi, 2.0 * PI, "[0, 2π]")?;
        Ok(Self {
            mode: Mode::Equatorial,
            angle: phi,
            alpha: FRAC_1_SQRT_2,
        })
    }

    pub fn polar(theta: f64) -> Result<Self> {
        check_angle("theta", theta, PI, "[0, π]")?;
        Ok(Self {
            mode: Mode::Polar,
            angle: theta,
            alpha: (2.0f64 / 3.0).sqrt(),
        })
    }

    pub fn general_alpha(theta: f64, alpha: f64) -> Result<Self> {
        check_angle("theta", theta, PI, "[0, π]")?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} is outside [0, 1]")));
        }
        Ok(Self {
            mode: Mode::GeneralAlpha,
            angle: theta,
            alpha,
        })
    }

    pub fn new(mode: Mode, angle: f64, alpha: Option<f64>) -> Result<Self> {
        match (mode, alpha) {
            (Mode::Equatorial, None) => Self::equatorial(angle),
            (Mode::Polar, None) => Self::polar(angle),
            (Mode::Polar | Mode::GeneralAlpha, Some(a)) => Self::general_alpha(angle, a),
            (Mode::GeneralAlpha, None) => Err(Error::Domain("general-alpha needs alpha".into())),
            (Mode::Equatorial, Some(_)) => {
                Err(Error::Domain("alpha only applies to polar targets".into()))
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `φ` (equatorial) or `θ` (polar, general-alpha).
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Weight of the `|000⟩`/`|111⟩` term of the clone states. The
    /// equatorial clone states belong to the same family at `α = 1/√2`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        beta_for(self.alpha)
    }

    /// The state Alice wants Bob and Charlie to hold.
    pub fn target(&self) -> StateVector {
        match self.mode {
            Mode::Equatorial => equatorial_state(self.angle),
            Mode::Polar | Mode::GeneralAlpha => polar_state(self.angle),
        }
    }
}

/// `β = √((1 − α²)/2)`
pub fn beta_for(alpha: f64) -> f64 {
    ((1.0 - alpha * alpha) / 2.0).max(0.0).sqrt()
}

fn equatorial_state(phi: f64) -> StateVector {
    StateVector::from_parts_unchecked(
        vec![TARGET_LABEL],
        vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, phi),
        ],
    )
}

fn polar_state(theta: f64) -> StateVector {
    StateVector::from_parts_unchecked(
        vec![TARGET_LABEL],
        vec![
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        ],
    )
}

/// `(|0⟩ + e^{iφ}|1⟩)/√2`
pub fn equatorial_target(phi: f64) -> Result<StateVector> {
    check_angle("phi", phi, 2.0 * PI, "[0, 2π]")?;
    Ok(equatorial_state(phi))
}

/// `cos θ|0⟩ + sin θ|1⟩`
pub fn polar_target(theta: f64) -> Result<StateVector> {
    check_angle("theta", theta, PI, "[0, π]")?;
    Ok(polar_state(theta))
}

/// `(φ0, φ1)` on `(A, B, C)`:
/// `φ0 = α|000⟩ + β|1⟩(|01⟩ + |10⟩)`, `φ1 = α|111⟩ + β|0⟩(|01⟩ + |10⟩)`.
pub fn clone_states(spec: &ProtocolSpec) -> (StateVector, StateVector) {
    let (alpha, beta) = (spec.alpha(), spec.beta());
    debug_assert!((alpha * alpha + 2.0 * beta * beta - 1.0).abs() <= FAMILY_TOL);
    let a = Complex64::new(alpha, 0.0);
    let b = Complex64::new(beta, 0.0);
    let mut phi0 = vec![ZERO; 8];
    let mut phi1 = vec![ZERO; 8];
    phi0[0b000] = a;
    phi0[0b101] = b;
    phi0[0b110] = b;
    phi1[0b111] = a;
    phi1[0b001] = b;
    phi1[0b010] = b;
    (
        StateVector::from_parts_unchecked(CLONE_LABELS.to_vec(), phi0),
        StateVector::from_parts_unchecked(CLONE_LABELS.to_vec(), phi1),
    )
}

/// `(|0⟩_a|φ1⟩ − |1⟩_a|φ0⟩)/√2` on `(a, A, B, C)`.
pub fn resource_state(phi0: &StateVector, phi1: &StateVector) -> Result<StateVector> {
    let err = [
        (phi0.norm() - 1.0).abs(),
        (phi1.norm() - 1.0).abs(),
        phi0.inner(phi1)?.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if err > 1e-10 || phi0.labels() != CLONE_LABELS || !err.is_finite() {
        return Err(Error::InputsNotOrthonormal(err));
    }
    let zero = StateVector::ket("0", &['a'])?;
    let one = StateVector::ket("1", &['a'])?;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::combine(&[(h, &zero.tensor(phi1)?), (-h, &one.tensor(phi0)?)])
}

/// Alice's measurement basis, ordered `[|φ⊥⟩, |φ⟩]` so that the basis
/// index is the broadcast bit.
///
/// Equatorial: `|φ⊥⟩ = (e^{−iφ}|0⟩ − |1⟩)/√2`, which makes
/// `|0⟩ = (|φ⟩ + e^{iφ}|φ⊥⟩)/√2` and `|1⟩ = (e^{−iφ}|φ⟩ − |φ⊥⟩)/√2` hold
/// exactly. Polar: `|φ′⊥⟩ = sin θ|0⟩ − cos θ|1⟩`.
pub fn alice_basis(spec: &ProtocolSpec) -> Basis2 {
    let theta = spec.angle();
    let (perp, along) = match spec.mode() {
        Mode::Equatorial => (
            [
                Complex64::from_polar(FRAC_1_SQRT_2, -theta),
                Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ],
            [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::from_polar(FRAC_1_SQRT_2, theta),
            ],
        ),
        Mode::Polar | Mode::GeneralAlpha => (
            [
                Complex64::new(theta.sin(), 0.0),
                Complex64::new(-theta.cos(), 0.0),
            ],
            [
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ],
        ),
    };
    Basis2::new(perp, along).expect("basis is orthonormal by construction")
}

/// Local correction applied to each of `A`, `B`, `C` after outcome 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Correction {
    SigmaZ,
    MinusISigmaY,
}

impl Correction {
    pub fn gate(self) -> Gate2 {
        match self {
            Correction::SigmaZ => Gate2::sigma_z(),
            Correction::MinusISigmaY => Gate2::minus_i_sigma_y(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Correction::SigmaZ => "sigma_z",
            Correction::MinusISigmaY => "minus_i_sigma_y",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sigma_z" => Ok(Correction::SigmaZ),
            "minus_i_sigma_y" => Ok(Correction::MinusISigmaY),
            other => Err(Error::Parse(format!("unknown correction '{other}'"))),
        }
    }

    /// The correction applied on every clone qubit.
    pub fn apply_all(self, state: &StateVector) -> Result<StateVector> {
        let gate = self.gate();
        CLONE_LABELS
            .iter()
            .try_fold(state.clone(), |s, &l| s.apply_single_qubit(&gate, l))
    }
}

/// `σz⊗σz⊗σz` for equatorial targets, `(−iσy)⊗3` otherwise.
pub fn correction(spec: &ProtocolSpec) -> Correction {
    match spec.mode() {
        Mode::Equatorial => Correction::SigmaZ,
        Mode::Polar | Mode::GeneralAlpha => Correction::MinusISigmaY,
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub outcome_bit: u8,
    pub probability: f64,
    /// Post-measurement state of `(A, B, C)` before any correction.
    pub pre_correction_state: StateVector,
    pub corrected_state: StateVector,
    pub rho_b: DensityMatrix,
    pub rho_c: DensityMatrix,
    pub fidelity_b: f64,
    pub fidelity_c: f64,
}

pub(crate) fn receiver_marginals(state: &StateVector) -> Result<(DensityMatrix, DensityMatrix)> {
    let d = DensityMatrix::from_state(state);
    Ok((d.partial_trace(&['B'])?, d.partial_trace(&['C'])?))
}

/// Deterministic resolution of both measurement outcomes.
pub fn run_protocol(spec: &ProtocolSpec) -> Result<[ProtocolOutcome; 2]> {
    let (phi0, phi1) = clone_states(spec);
    let resource = resource_state(&phi0, &phi1)?;
    let resolution = resource.measure_in_basis('a', &alice_basis(spec))?;
    let fix = correction(spec);
    let target = spec.target();
    let outcome = |bit: u8| -> Result<ProtocolOutcome> {
        let branch = &resolution.branches[bit as usize];
        let pre = branch
            .state
            .clone()
            .ok_or_else(|| Error::Domain(format!("outcome {bit} has zero probability")))?;
        let corrected = if bit == 1 {
            fix.apply_all(&pre)?
        } else {
            pre.clone()
        };
        let (rho_b, rho_c) = receiver_marginals(&corrected)?;
        Ok(ProtocolOutcome {
            outcome_bit: bit,
            probability: branch.probability,
            fidelity_b: rho_b.fidelity_with_pure(&target)?,
            fidelity_c: rho_c.fidelity_with_pure(&target)?,
            pre_correction_state: pre,
            corrected_state: corrected,
            rho_b,
            rho_c,
        })
    };
    Ok([outcome(0)?, outcome(1)?])
}

/// `(|φ0⟩ + e^{iφ}|φ1⟩)/√2` (equatorial) or `cos θ|φ0⟩ + sin θ|φ1⟩`.
pub fn one_parameter_tripartite(spec: &ProtocolSpec) -> StateVector {
    let (phi0, phi1) = clone_states(spec);
    let t = spec.angle();
    let (c0, c1) = match spec.mode() {
        Mode::Equatorial => (
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, t),
        ),
        Mode::Polar | Mode::GeneralAlpha => {
            (Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0))
        }
    };
    StateVector::combine(&[(c0, &phi0), (c1, &phi1)]).expect("clone states are orthonormal")
}

/// Analytic receiver fidelity at the pole, `(1 + α²)/2`.
pub fn pole_fidelity(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is outside [0, 1]")));
    }
    Ok((1.0 + alpha * alpha) / 2.0)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Entanglement required for receiver fidelity `F`, in bits:
/// `((3F−1)/2)log((3F−1)/2) + ((1−F)/2)log((1−F)/2) − F log(F/2)`
/// with `0·log 0 = 0`.
pub fn tradeoff_er(fidelity: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&fidelity) {
        return Err(Error::Domain(format!(
            "fidelity {fidelity} is outside [1/2, 1]"
        )));
    }
    let f = fidelity;
    Ok(xlog2x((3.0 * f - 1.0) / 2.0) + xlog2x((1.0 - f) / 2.0) - f * (f / 2.0).log2())
}

/// Fidelities above the polar maximum cannot be produced by the protocol.
pub fn within_protocol_reach(fidelity: f64) -> bool {
    fidelity <= MAX_POLAR_FIDELITY + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cut {
    /// `a : B`
    AB,
    /// `a : C`
    AC,
}

impl Cut {
    pub fn labels(self) -> [Label; 2] {
        match self {
            Cut::AB => ['a', 'B'],
            Cut::AC => ['a', 'C'],
        }
    }
}

/// Two-qubit reduced state of the resource across `a : B` or `a : C`.
pub fn cut_marginal(resource: &StateVector, cut: Cut) -> Result<DensityMatrix> {
    DensityMatrix::from_state(resource).partial_trace(&cut.labels())
}

/// Convenience: the `a : B` marginal of the resource for `spec`.
pub fn resource_cut(spec: &ProtocolSpec, cut: Cut) -> Result<DensityMatrix> {
    let (phi0, phi1) = clone_states(spec);
    cut_marginal(&resource_state(&phi0, &phi1)?, cut)
}

/// Simulated receiver fidelity (Bob, outcome 0).
pub fn simulated_fidelity(spec: &ProtocolSpec) -> Result<f64> {
    Ok(run_protocol(spec)?[0].fidelity_b)
}
