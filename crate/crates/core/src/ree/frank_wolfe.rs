use std::f64::consts::LN_2;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::gradient::log_gradient_matrix;
use super::lmo::{product_state_lmo, ProductState};
use super::{require_two_qubits, Atom, SeparableEnsemble};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::quantum::{cross_entropy_nats, entropy_bits, DensityMatrix};

/// How each iteration moves weight between atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// `σ ← (1−γ)σ + γω`.
    Classic,
    /// Classic step, or shrink the worst active atom when that direction
    /// has the larger linearized decrease.
    AwayStep,
    /// Move weight directly from the worst active atom to `ω`.
    Pairwise,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FwOptions {
    /// Stop once the duality gap is at most this many bits.
    pub gap_tol: f64,
    pub max_iters: usize,
    /// Bracket width at which the golden-section line search stops.
    pub line_search_tol: f64,
    /// Weight of `I/4` mixed into σ before the gradient is evaluated.
    pub regularization: f64,
    /// Atoms lighter than this are dropped after each step.
    pub prune_below: f64,
    pub step_rule: StepRule,
    /// Pairwise steps among active atoms after each LMO step.
    pub corrective_steps: usize,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-4,
            max_iters: 2000,
            line_search_tol: 1e-12,
            regularization: 1e-9,
            prune_below: 1e-12,
            step_rule: StepRule::AwayStep,
            corrective_steps: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EreResult {
    /// `S(ρ‖σ)` at the final iterate, in bits.
    pub value_bits: f64,
    pub sigma: DensityMatrix,
    pub ensemble: SeparableEnsemble,
    /// Duality gap at the final iterate; `value_bits − gap_bits` lower-bounds
    /// the minimum.
    pub gap_bits: f64,
    /// Best certified lower bound seen over all iterations.
    pub lower_bound_bits: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective in bits after each accepted step, starting at σ₀ = I/4.
    pub history: Vec<f64>,
}

struct Objective<'a> {
    rho: &'a ComplexMatrix,
    entropy_nats: f64,
}

impl Objective<'_> {
    /// `S(ρ‖σ)` in nats, `+∞` off the support.
    fn eval(&self, sigma: &ComplexMatrix) -> Result<f64> {
        Ok(match cross_entropy_nats(self.rho, sigma)? {
            Some(cross) => cross - self.entropy_nats,
            None => f64::INFINITY,
        })
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a convex function on `[0, upper]`; returns
/// the best evaluated point.
fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    upper: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, upper);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

fn mix(sigma: &ComplexMatrix, omega: &ComplexMatrix, gamma: f64) -> ComplexMatrix {
    &sigma.scale_real(1.0 - gamma) + &omega.scale_real(gamma)
}

/// `σ + t·d`
fn along(sigma: &ComplexMatrix, d: &ComplexMatrix, t: f64) -> ComplexMatrix {
    sigma + &d.scale_real(t)
}

/// Atoms whose product vectors agree with `ω` to this fidelity absorb its
/// weight instead of growing the list.
const MERGE_FIDELITY: f64 = 1.0 - 1e-12;

/// Real dimension of 4×4 Hermitian matrices; any separable two-qubit state
/// is a combination of at most this many product states.
const MAX_ATOMS: usize = 16;

fn add_weight(atoms: &mut Vec<Atom>, omega: &ProductState, w: f64) {
    let v = omega.vector();
    let same = atoms.iter().position(|a| {
        let o: Complex64 = a
            .product_vector()
            .iter()
            .zip(&v)
            .map(|(x, y)| x.conj() * y)
            .sum();
        o.norm_sqr() >= MERGE_FIDELITY
    });
    match same {
        Some(i) => atoms[i].weight += w,
        None => atoms.push(Atom {
            weight: w,
            left: omega.left,
            right: omega.right,
        }),
    }
}

/// `|v⟩⟨v|` as 16 real coordinates.
fn coordinates(a: &Atom) -> [f64; 16] {
    let v = a.product_vector();
    let mut out = [0.0; 16];
    let mut k = 0;
    for i in 0..4 {
        out[k] = v[i].norm_sqr();
        k += 1;
        for j in i + 1..4 {
            let e = v[i] * v[j].conj();
            out[k] = e.re;
            out[k + 1] = e.im;
            k += 2;
        }
    }
    out
}

/// Carathéodory reduction: while more than [`MAX_ATOMS`] atoms are active,
/// find a null combination of 17 of them and shift weight along it until
/// one weight hits zero. σ is unchanged up to rounding.
fn reduce_atoms(atoms: &mut Vec<Atom>) {
    while atoms.len() > MAX_ATOMS {
        let n = MAX_ATOMS + 1;
        let cols: Vec<[f64; 16]> = atoms[..n].iter().map(coordinates).collect();
        let gram = DMatrix::from_fn(n, n, |i, j| {
            cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(x, y)| x * y)
                .sum::<f64>()
        });
        let eig = SymmetricEigen::new(gram);
        let (k, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty");
        let c = eig.eigenvectors.column(k);
        // Σ c_k = 0 follows from unit trace; orient so some c_k > 0.
        let sign = if c.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 0.0 {
            1.0
        } else {
            -1.0
        };
        let (drop, t) = (0..n)
            .filter(|&i| sign * c[i] > 0.0)
            .map(|i| (i, atoms[i].weight / (sign * c[i])))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("null vector has a positive entry");
        for i in 0..n {
            atoms[i].weight -= t * sign * c[i];
        }
        atoms[drop].weight = 0.0;
        atoms.retain(|a| a.weight > 0.0);
    }
}

fn normalize(atoms: &mut Vec<Atom>, prune_below: f64) {
    atoms.retain(|a| a.weight >= prune_below);
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in atoms.iter_mut() {
        a.weight /= total;
    }
}

enum Step {
    Toward,
    Away(usize),
    Pairwise(usize),
}

struct Solver<'a> {
    objective: Objective<'a>,
    opts: &'a FwOptions,
    maximally_mixed: ComplexMatrix,
    atoms: Vec<Atom>,
    sigma: ComplexMatrix,
    value: f64,
}

impl Solver<'_> {
    fn gradient(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let sigma_reg = mix(&self.sigma, &self.maximally_mixed, self.opts.regularization);
        let g = log_gradient_matrix(self.objective.rho, &sigma_reg)?;
        Ok((sigma_reg, g))
    }

    fn atom_values(&self, g: &ComplexMatrix) -> Vec<f64> {
        self.atoms
            .iter()
            .map(|a| g.expectation(&a.product_vector()).re)
            .collect()
    }

    /// Exact line search along `dir` on `[0, upper]`; `Some((γ, f))` only if
    /// the objective decreases.
    fn search(&self, dir: &ComplexMatrix, upper: f64) -> Result<Option<f64>> {
        let (t, f) = golden_section(
            |t| self.objective.eval(&along(&self.sigma, dir, t)),
            upper,
            self.opts.line_search_tol,
        )?;
        Ok((f < self.value).then_some(t))
    }

    fn refresh(&mut self) -> Result<()> {
        normalize(&mut self.atoms, self.opts.prune_below);
        reduce_atoms(&mut self.atoms);
        normalize(&mut self.atoms, self.opts.prune_below);
        self.sigma = SeparableEnsemble::from_atoms_unchecked(self.atoms.clone()).matrix();
        self.value = self.objective.eval(&self.sigma)?;
        Ok(())
    }

    /// One step using the LMO atom `ω`; false if no direction descends.
    fn outer_step(
        &mut self,
        omega: &ProductState,
        g: &ComplexMatrix,
        sigma_g: f64,
        gap: f64,
    ) -> Result<bool> {
        let omega_m = ComplexMatrix::outer(&omega.vector());
        let values = self.atom_values(g);
        let worst = values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, &v)| (i, v));
        let preferred = match (self.opts.step_rule, worst) {
            (StepRule::AwayStep, Some((i, v)))
                if sigma_g - v > gap && self.atoms[i].weight < 1.0 =>
            {
                Step::Away(i)
            }
            (StepRule::Pairwise, Some((i, _))) => Step::Pairwise(i),
            _ => Step::Toward,
        };
        let mut candidates = vec![preferred];
        if !matches!(candidates[0], Step::Toward) {
            candidates.push(Step::Toward);
        }
        for step in candidates {
            let (dir, upper) = match step {
                Step::Toward => (&omega_m - &self.sigma, 1.0),
                Step::Away(i) => {
                    let w = self.atoms[i].weight;
                    (&self.sigma - &self.projector(i), w / (1.0 - w))
                }
                Step::Pairwise(i) => (&omega_m - &self.projector(i), self.atoms[i].weight),
            };
            let Some(gamma) = self.search(&dir, upper)? else {
                continue;
            };
            match step {
                Step::Toward => {
                    for a in self.atoms.iter_mut() {
                        a.weight *= 1.0 - gamma;
                    }
                    add_weight(&mut self.atoms, omega, gamma);
                }
                Step::Away(i) => {
                    for a in self.atoms.iter_mut() {
                        a.weight *= 1.0 + gamma;
                    }
                    self.atoms[i].weight = if gamma >= upper {
                        0.0
                    } else {
                        self.atoms[i].weight - gamma
                    };
                }
                Step::Pairwise(i) => {
                    self.atoms[i].weight = if gamma >= upper {
                        0.0
                    } else {
                        self.atoms[i].weight - gamma
                    };
                    add_weight(&mut self.atoms, omega, gamma);
                }
            }
            self.refresh()?;
            return Ok(true);
        }
        Ok(false)
    }

    /// Pairwise steps between active atoms only, no LMO call.
    fn corrective_steps(&mut self) -> Result<()> {
        for _ in 0..self.opts.corrective_steps {
            if self.atoms.len() < 2 {
                break;
            }
            let (_, g) = self.gradient()?;
            let values = self.atom_values(&g);
            let by_value = |x: &(usize, &f64), y: &(usize, &f64)| x.1.total_cmp(y.1);
            let (s, hi) = values
                .iter()
                .enumerate()
                .max_by(by_value)
                .expect("non-empty");
            let (v, lo) = values
                .iter()
                .enumerate()
                .min_by(by_value)
                .expect("non-empty");
            if (hi - lo) / LN_2 <= 0.1 * self.opts.gap_tol {
                break;
            }
            let dir = &self.projector(s) - &self.projector(v);
            let upper = self.atoms[v].weight;
            let Some(gamma) = self.search(&dir, upper)? else {
                break;
            };
            self.atoms[s].weight += gamma;
            self.atoms[v].weight = if gamma >= upper {
                0.0
            } else {
                self.atoms[v].weight - gamma
            };
            self.refresh()?;
        }
        Ok(())
    }

    fn projector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.atoms[i].product_vector())
    }
}

/// Relative entropy of entanglement of a two-qubit state by Frank–Wolfe.
///
/// Starts at `I/4`. Each iteration asks [`product_state_lmo`] for the
/// product state `ω` maximizing `Tr(ωG)`, `G` the gradient of `Tr ρ ln σ`,
/// line-searches along a direction picked by [`FwOptions::step_rule`], then
/// takes up to [`FwOptions::corrective_steps`] pairwise steps among the
/// active atoms. Iterates are always explicit convex combinations of at most
/// 16 product states, so they stay separable, and the objective never
/// increases.
///
/// Hitting `max_iters` is not an error; the last iterate is returned with
/// `converged = false`.
pub fn ree_frank_wolfe(rho: &DensityMatrix, opts: &FwOptions) -> Result<EreResult> {
    require_two_qubits(rho)?;
    let objective = Objective {
        rho: rho.matrix(),
        entropy_nats: entropy_bits(&rho.eigenvalues()) * LN_2,
    };
    let maximally_mixed = ComplexMatrix::identity(4).scale_real(0.25);
    let value = objective.eval(&maximally_mixed)?;
    let mut solver = Solver {
        objective,
        opts,
        sigma: maximally_mixed.clone(),
        maximally_mixed,
        atoms: SeparableEnsemble::maximally_mixed().atoms().to_vec(),
        value,
    };
    let mut history = vec![value / LN_2];
    let mut lower_bound = f64::NEG_INFINITY;
    let mut gap;
    let mut converged = false;
    let mut iterations = 0;

    loop {
        let (sigma_reg, g) = solver.gradient()?;
        let omega = product_state_lmo(&g)?;
        // Tr(σ_reg G) = Tr ρ = 1 analytically; computed for robustness.
        let sigma_g = sigma_reg.trace_product_re(&g);
        gap = (omega.value - sigma_g).max(0.0);
        lower_bound = lower_bound.max(solver.objective.eval(&sigma_reg)? - gap);
        if gap / LN_2 <= opts.gap_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        if !solver.outer_step(&omega, &g, sigma_g, gap)? {
            // No descent along any candidate direction; further steps
            // would repeat this one.
            break;
        }
        solver.corrective_steps()?;
        history.push(solver.value / LN_2);
        iterations += 1;
    }

    Ok(EreResult {
        value_bits: solver.value / LN_2,
        sigma: DensityMatrix::from_parts_unchecked(rho.labels().to_vec(), solver.sigma),
        ensemble: SeparableEnsemble::from_atoms_unchecked(solver.atoms),
        gap_bits: gap / LN_2,
        lower_bound_bits: lower_bound / LN_2,
        iterations,
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let (x, fx) = golden_section(|t| Ok((t - 0.3) * (t - 0.3)), 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx < 1e-17);
        let (x, _) =
            golden_section(|t| Ok(if t > 0.9 { f64::INFINITY } else { -t }), 1.0, 1e-12).unwrap();
        assert!((x - 0.9).abs() < 1e-9);
    }

    #[test]
    fn reduction_keeps_sigma_and_caps_atoms() {
        use crate::random::{random_qubit, random_simplex, seeded};
        let mut rng = seeded(9);
        let mut atoms: Vec<Atom> = random_simplex(&mut rng, 40)
            .into_iter()
            .map(|weight| Atom {
                weight,
                left: random_qubit(&mut rng),
                right: random_qubit(&mut rng),
            })
            .collect();
        let before = SeparableEnsemble::from_atoms_unchecked(atoms.clone()).matrix();
        reduce_atoms(&mut atoms);
        assert!(atoms.len() <= MAX_ATOMS);
        assert!(atoms.iter().all(|a| a.weight > 0.0));
        let after = SeparableEnsemble::from_atoms_unchecked(atoms).matrix();
        assert!(before.max_abs_diff(&after) < 1e-12);
    }
}
