//! Projected gradient ascent over per-spin marginals with fixed totals.
//!
//! The feasible set is the box [0,1]^N intersected with one sum constraint
//! per component; projection alternates a box clip with a uniform shift
//! until 1e-12 feasibility. Each iteration backtracks from unit step with an
//! Armijo test on the raw gradient while objective differences are
//! resolvable in f64; near stationarity it switches to a curvature-scaled
//! direction accepted only when the weighted projected-gradient norm
//! strictly shrinks, which contracts wall-hugging iterates down to tight
//! tolerances. Marginal pairs parked at a (0,0) or (1,1) corner make the
//! objective conical there; both stages retry with such pairs frozen so the
//! projection shift cannot leak mass into a corner at a lopsided ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::mix_seed;
use crate::states::SpinMarginals;

use super::avg_entropy_of_slices;

const LN_2: f64 = std::f64::consts::LN_2;
const FEASIBILITY_TOL: f64 = 1e-12;
const ARMIJO_C: f64 = 1e-4;
/// Below this predicted gain, f64 objective differences are dominated by
/// rounding and the ||pg||-monotone acceptance rule takes over.
const PREDICTED_GAIN_FLOOR: f64 = 1e-12;

/// Knobs of [`maximize_avg_ev`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizerConfig {
    /// Convergence threshold on the projected-gradient norm.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Number of independently seeded random starts.
    pub starts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tol: 1e-10,
            max_iter: 100_000,
            seed: 0,
            starts: 8,
        }
    }
}

/// Outcome of one ascent run. `converged = false` carries the best iterate
/// reached when the budget ran out or the step size underflowed.
#[derive(Clone, Debug)]
pub struct OptimRun {
    pub argmax: SpinMarginals,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Serialize)]
struct OptimRunDoc<'a> {
    n: usize,
    p0_up: &'a [f64],
    p1_up: &'a [f64],
    value: f64,
    iterations: usize,
    history_len: usize,
    grad_norm: f64,
    converged: bool,
}

impl Serialize for OptimRun {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        OptimRunDoc {
            n: self.argmax.n(),
            p0_up: self.argmax.p0_up(),
            p1_up: self.argmax.p1_up(),
            value: self.value,
            iterations: self.iterations,
            history_len: self.iterations + 1,
            grad_norm: self.grad_norm,
            converged: self.converged,
        }
        .serialize(serializer)
    }
}

/// Euclidean-feasible point of {x ∈ [0,1]^n : Σx = total} near `x`,
/// by alternating box clips with uniform shifts to 1e-12 feasibility.
pub fn project_onto_box_sum(x: &mut [f64], total: f64) {
    let n = x.len() as f64;
    for _ in 0..10_000 {
        for v in x.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        let shift = (total - x.iter().sum::<f64>()) / n;
        if shift.abs() * n <= FEASIBILITY_TOL {
            return;
        }
        for v in x.iter_mut() {
            *v += shift;
        }
    }
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Seeded random feasible marginal set with totals m0 + n/2 and m1 + n/2.
pub fn random_feasible_marginals(
    n: usize,
    m0: f64,
    m1: f64,
    rng: &mut impl Rng,
) -> Result<SpinMarginals> {
    check_feasible(n, m0, m1)?;
    let half_n = n as f64 / 2.0;
    let mut p0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut p1: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    project_onto_box_sum(&mut p0, m0 + half_n);
    project_onto_box_sum(&mut p1, m1 + half_n);
    SpinMarginals::new(p0, p1)
}

fn check_feasible(n: usize, m0: f64, m1: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("optimization needs at least 2 spins"));
    }
    let half_n = n as f64 / 2.0;
    for m in [m0, m1] {
        if !(-half_n..=half_n).contains(&m) {
            return Err(Error::domain(format!(
                "magnetization {m} infeasible for {n} spins (|M| <= N/2)"
            )));
        }
    }
    Ok(())
}

/// Log arguments are floored here, bounding gradient entries near the box
/// faces where the true derivative diverges.
const RATIO_FLOOR: f64 = 1e-15;

/// Unconstrained gradient of the average entropy in all 2N coordinates; the
/// projection absorbs the bounded pushes at clipped faces. The entropy has
/// conical kinks where both marginals of a spin meet at 0 (or at 1); the
/// branch ratios x/(x+y) stay well defined along rays into such a kink, so
/// they are evaluated before any flooring — collapsing x and y individually
/// would misprice a step into the kink as free and wedge the line search.
fn full_gradient(p0: &[f64], p1: &[f64], g: &mut [f64]) {
    let n = p0.len();
    let scale = -1.0 / (2.0 * n as f64 * LN_2);
    let ratio = |num: f64, den: f64| -> f64 {
        if den > 0.0 {
            (num / den).clamp(RATIO_FLOOR, 1.0)
        } else {
            0.5
        }
    };
    for j in 0..n {
        let (x, y) = (p0[j], p1[j]);
        let s = x + y;
        let t = 2.0 - s;
        g[j] = scale * (ratio(x, s).ln() - ratio(1.0 - x, t).ln());
        g[n + j] = scale * (ratio(y, s).ln() - ratio(1.0 - y, t).ln());
    }
}

/// Both marginals of a spin within this margin of the same box corner make
/// a conical kink of the objective.
const KINK_EPS: f64 = 1e-9;

/// Spins whose marginal pair sits in a (0,0) or (1,1) corner kink: the
/// entropy is conical there, and letting the projection shift mass into the
/// corner at an uneven ratio carries a first-order cost no single gradient
/// can price. Returns `None` when no pair is pinned.
fn kink_frozen_mask(x: &[f64], n: usize) -> Option<Vec<bool>> {
    let mut mask = vec![false; 2 * n];
    let mut any = false;
    for j in 0..n {
        let (a, b) = (x[j], x[n + j]);
        if (a <= KINK_EPS && b <= KINK_EPS) || (a >= 1.0 - KINK_EPS && b >= 1.0 - KINK_EPS) {
            mask[j] = true;
            mask[n + j] = true;
            any = true;
        }
    }
    any.then_some(mask)
}

struct Workspace {
    n: usize,
    s0: f64,
    s1: f64,
}

impl Workspace {
    fn project(&self, z: &mut [f64]) {
        let (a, b) = z.split_at_mut(self.n);
        project_onto_box_sum(a, self.s0);
        project_onto_box_sum(b, self.s1);
    }

    /// Project only the non-frozen coordinates of each half, holding frozen
    /// ones at their corner (snapped exactly to 0 or 1). Returns false when
    /// the free coordinates cannot reach the required totals.
    fn project_free(&self, z: &mut [f64], mask: &[bool]) -> bool {
        for (base, total) in [(0, self.s0), (self.n, self.s1)] {
            let mut held = 0.0;
            let mut idxs = Vec::new();
            let mut vals = Vec::new();
            for j in 0..self.n {
                let i = base + j;
                if mask[i] {
                    z[i] = z[i].round();
                    held += z[i];
                } else {
                    idxs.push(i);
                    vals.push(z[i]);
                }
            }
            let target = total - held;
            if idxs.is_empty() || !(-1e-9..=idxs.len() as f64 + 1e-9).contains(&target) {
                return false;
            }
            project_onto_box_sum(&mut vals, target.clamp(0.0, idxs.len() as f64));
            for (i, v) in idxs.into_iter().zip(vals) {
                z[i] = v;
            }
        }
        true
    }

    fn objective(&self, z: &[f64]) -> f64 {
        avg_entropy_of_slices(&z[..self.n], &z[self.n..])
    }

    /// Projected-gradient vector P(z + g) - z written into `scratch`;
    /// returns its Euclidean norm and its norm weighted by √(p(1-p)) per
    /// coordinate. The weighted norm is the Lyapunov quantity of the
    /// curvature-scaled iteration; the Euclidean norm is the convergence
    /// criterion.
    fn projected_gradient_norms(&self, z: &[f64], g: &[f64], scratch: &mut Vec<f64>) -> (f64, f64) {
        scratch.clear();
        scratch.extend(z.iter().zip(g).map(|(zi, gi)| zi + gi));
        self.project(scratch);
        let mut raw = 0.0;
        let mut weighted = 0.0;
        for (i, (c, zi)) in scratch.iter().zip(z).enumerate() {
            let d = c - zi;
            raw += d * d;
            weighted += d * d * curvature_scale(z[i]);
        }
        (raw.sqrt(), weighted.sqrt())
    }
}

/// Inverse of the local log curvature, 1/(p(1-p)) capped at the box faces.
fn curvature_scale(p: f64) -> f64 {
    (p * (1.0 - p)).max(1e-12)
}

fn ascend(ws: &Workspace, mut x: Vec<f64>, cfg: &OptimizerConfig) -> OptimRun {
    let dim = 2 * ws.n;
    let mut g = vec![0.0; dim];
    let mut gc = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    let mut scratch = Vec::with_capacity(dim);
    let mut cand = vec![0.0; dim];
    let mut converged = false;
    let mut steps = 0usize;
    let mut grad_norm = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        full_gradient(&x[..ws.n], &x[ws.n..], &mut g);
        let (raw, weighted) = ws.projected_gradient_norms(&x, &g, &mut scratch);
        grad_norm = raw;
        if grad_norm <= cfg.tol {
            converged = true;
            break;
        }
        let f0 = ws.objective(&x);
        let mut accepted = false;

        // Phase 1: backtracking Armijo on the raw gradient, restarted from
        // unit step every iteration, as long as the predicted gain is
        // resolvable in f64.
        let mut a = 1.0f64;
        while a > 1e-18 {
            cand.clear();
            cand.extend(x.iter().zip(&g).map(|(xi, gi)| xi + a * gi));
            ws.project(&mut cand);
            let predicted: f64 = g
                .iter()
                .zip(cand.iter().zip(&x))
                .map(|(gi, (ci, xi))| gi * (ci - xi))
                .sum();
            if predicted <= PREDICTED_GAIN_FLOOR {
                break;
            }
            if ws.objective(&cand) >= f0 + ARMIJO_C * predicted {
                std::mem::swap(&mut x, &mut cand);
                accepted = true;
                steps += 1;
                break;
            }
            a /= 2.0;
        }

        // Phase 1b: rescue for corner-kink pairs. The projection shift of a
        // full step leaks mass into a (0,0) or (1,1) kink at an uneven
        // ratio, a first-order conical cost the (zero) kink gradient cannot
        // price, which can veto every full step. Retry in the free
        // coordinates alone with the kinks held at their corner.
        if !accepted {
            if let Some(mask) = kink_frozen_mask(&x, ws.n) {
                let mut a = 1.0f64;
                while a > 1e-18 {
                    cand.clear();
                    cand.extend(x.iter().zip(&g).enumerate().map(|(i, (xi, gi))| {
                        if mask[i] {
                            *xi
                        } else {
                            xi + a * gi
                        }
                    }));
                    if !ws.project_free(&mut cand, &mask) {
                        break;
                    }
                    let predicted: f64 = g
                        .iter()
                        .zip(cand.iter().zip(&x))
                        .map(|(gi, (ci, xi))| gi * (ci - xi))
                        .sum();
                    if predicted <= PREDICTED_GAIN_FLOOR {
                        break;
                    }
                    if ws.objective(&cand) >= f0 + ARMIJO_C * predicted {
                        std::mem::swap(&mut x, &mut cand);
                        accepted = true;
                        steps += 1;
                        break;
                    }
                    a /= 2.0;
                }
            }
        }

        // Phase 2: near stationarity the objective differences drown in
        // rounding, and the log curvature (~1/(p(1-p)) at the box faces) can
        // be four orders stiffer than mid-range coordinates. Step along the
        // curvature-scaled *projected* gradient: scaling the raw gradient
        // would let its large constraint-normal component leak a spurious
        // tangent step of the same size as the signal. Accept on strict
        // decrease of the matching weighted projected-gradient norm, the
        // quantity this iteration contracts monotonically (the Euclidean
        // norm need not be monotone when the two halves carry different
        // scales). With corner kinks present, the kink-frozen variant of the
        // direction is retried after the full one, as in phase 1b.
        if !accepted {
            let mask = kink_frozen_mask(&x, ws.n);
            let variants: &[bool] = if mask.is_some() {
                &[false, true]
            } else {
                &[false]
            };
            'variants: for &use_mask in variants {
                // projected gradient of this variant, then curvature scaling
                scratch.clear();
                scratch.extend(x.iter().zip(&g).map(|(xi, gi)| xi + gi));
                let feasible = if use_mask {
                    ws.project_free(&mut scratch, mask.as_ref().expect("variant"))
                } else {
                    ws.project(&mut scratch);
                    true
                };
                if !feasible {
                    continue;
                }
                for (i, (pi, xi)) in scratch.iter().zip(&x).enumerate() {
                    dir[i] = (pi - xi) * curvature_scale(*xi);
                }
                let mut a = 1.0f64;
                while a > 1e-18 {
                    cand.clear();
                    cand.extend(x.iter().zip(&dir).map(|(xi, di)| xi + a * di));
                    let ok = if use_mask {
                        ws.project_free(&mut cand, mask.as_ref().expect("variant"))
                    } else {
                        ws.project(&mut cand);
                        true
                    };
                    if !ok {
                        continue 'variants;
                    }
                    full_gradient(&cand[..ws.n], &cand[ws.n..], &mut gc);
                    let (next_raw, next_weighted) =
                        ws.projected_gradient_norms(&cand, &gc, &mut scratch);
                    if next_weighted < weighted || next_raw <= cfg.tol {
                        std::mem::swap(&mut x, &mut cand);
                        accepted = true;
                        steps += 1;
                        break 'variants;
                    }
                    a /= 2.0;
                }
            }
        }
        if !accepted {
            break; // no progressing step exists; report the iterate honestly
        }
    }
    if !converged {
        // refresh the stationarity figure for the iterate actually returned
        full_gradient(&x[..ws.n], &x[ws.n..], &mut g);
        grad_norm = ws.projected_gradient_norms(&x, &g, &mut scratch).0;
        converged = grad_norm <= cfg.tol;
    }
    let value = ws.objective(&x);
    let argmax = SpinMarginals::new(x[..ws.n].to_vec(), x[ws.n..].to_vec())
        .expect("projected iterate is feasible");
    OptimRun {
        argmax,
        value,
        iterations: steps,
        grad_norm,
        converged,
    }
}

/// All ascent runs for `cfg.starts` seeded random starts.
pub fn maximize_avg_ev_runs(
    m0: f64,
    m1: f64,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<OptimRun>> {
    check_feasible(n, m0, m1)?;
    let ws = Workspace {
        n,
        s0: m0 + n as f64 / 2.0,
        s1: m1 + n as f64 / 2.0,
    };
    let starts = cfg.starts.max(1);
    let mut runs = Vec::with_capacity(starts);
    for s in 0..starts {
        let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(cfg.seed, s as u64));
        let mut x: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
        ws.project(&mut x);
        runs.push(ascend(&ws, x, cfg));
    }
    Ok(runs)
}

/// Best ascent run over the configured random starts.
pub fn maximize_avg_ev(m0: f64, m1: f64, n: usize, cfg: &OptimizerConfig) -> Result<OptimRun> {
    let runs = maximize_avg_ev_runs(m0, m1, n, cfg)?;
    Ok(runs
        .into_iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite objective"))
        .expect("at least one start"))
}
