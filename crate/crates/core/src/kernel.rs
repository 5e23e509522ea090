//! Evaluation of the kernel integrals: the absolute-value integral, the
//! complex derivative integral, the closed-form tau-integral lower bounds,
//! and the delta-halving divergence probe.

use std::cell::Cell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre::EnvelopeTable;
use crate::poly::Polynomial;
use crate::quad;
use crate::real::Real;
use crate::singular::{self, KernelQuery};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Absolute,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelStatus {
    Converged,
    Diverged,
    MarginNonpositive,
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelEvaluation<T> {
    pub kind: KernelKind,
    /// (re, im); im = 0 for the absolute kind. Absent when the integral is
    /// known to diverge.
    pub value: Option<(T, T)>,
    pub error_estimate: T,
    pub eta_truncation: T,
    pub status: KernelStatus,
    pub integrand_evals: u64,
}

impl<T: Real> KernelEvaluation<T> {
    pub fn scalar(&self) -> Option<T> {
        self.value.map(|(re, _)| re)
    }

    pub fn modulus(&self) -> Option<T> {
        self.value.map(|(re, im)| (re * re + im * im).sqrt())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelOptions<T> {
    pub tol: T,
    /// Cap on (eta, tau) integrand evaluations (each costing one inner
    /// Laplace quadrature).
    pub budget: u64,
    /// Multiplies the automatically chosen eta truncation; used for
    /// self-consistency checks under doubled truncation.
    pub truncation_scale: T,
}

impl<T: Real> KernelOptions<T> {
    pub fn new(tol: T, budget: u64) -> Self {
        KernelOptions {
            tol,
            budget,
            truncation_scale: T::one(),
        }
    }
}

pub const DEFAULT_BUDGET: u64 = 2_000_000;

const TAU_MIN: f64 = 1e-8;
const INNER_MAX_PANELS: usize = 400;
const OUTER_MAX_PANELS: usize = 2_000;
const LAPLACE_TOL: f64 = 1e-7;
const LAPLACE_MAX_PANELS: usize = 2_000;

struct Integration<'a, T> {
    b: &'a Polynomial<T>,
    x: T,
    r: T,
    delta: T,
    s: usize,
    m: usize,
    /// Phase coefficients tau * (phase_const + eta * phase_eta); both zero in
    /// the absolute integral.
    phase_const: T,
    phase_eta: T,
    absolute: bool,
    tol: T,
    budget: u64,
    evals: Cell<u64>,
    exhausted: Cell<bool>,
}

impl<'a, T: Real> Integration<'a, T> {
    /// Inner tau integral for one eta:
    /// int_0^inf e^{-tau(delta + A)} w(eta) tau^{m+1} e^{i tau phi(eta)}
    /// / I(eta, tau) d tau, computed on a log scale.
    fn inner(&self, eta: T) -> [T; 2] {
        if self.exhausted.get() {
            return [T::zero(); 2];
        }
        let sp = match quad::shift_poly(self.b, eta) {
            Ok(sp) => sp,
            Err(_) => return [T::zero(); 2],
        };
        let a = self.delta + self.b.eval(self.x) + self.b.eval(self.r)
            - eta * (self.x + self.r)
            + (sp.bstar + sp.bstar);
        if a <= T::zero() {
            // only reachable when the caller ignored a nonpositive margin
            return [T::infinity(); 2];
        }
        let weight = if self.absolute {
            eta.abs().powi(self.s as i32)
        } else {
            eta.powi(self.s as i32)
        };
        if weight == T::zero() && self.s > 0 {
            return [T::zero(); 2];
        }
        let m_pow = T::of_usize(self.m + 1);
        // tau_max from the underflow of e^{-a tau} against tau^{m+1.5} growth
        let mut tau_max = T::of(745.0) / a;
        for _ in 0..3 {
            let corr = (m_pow + T::of(1.5)) * tau_max.max(T::one()).ln();
            tau_max = (T::of(745.0) + corr) / a;
        }
        let tau_min = T::of(TAU_MIN);
        let phi = self.phase_const + eta * self.phase_eta;
        let f = |u: T| -> [T; 2] {
            let tau = u.exp();
            let mut local = 0u64;
            let i_val = match quad::laplace_integral_budgeted(
                &sp,
                tau,
                T::of(LAPLACE_TOL),
                LAPLACE_MAX_PANELS,
                &mut local,
            ) {
                Ok(v) => v,
                Err(_) => return [T::zero(); 2],
            };
            self.evals.set(self.evals.get() + 1);
            if self.evals.get() > self.budget {
                self.exhausted.set(true);
                return [T::zero(); 2];
            }
            // log-domain magnitude guards against overflow of tau^{m+1}
            let log_mag = -tau * a + m_pow * tau.ln() - i_val.value.ln() + u;
            if log_mag < T::of(-745.0) {
                return [T::zero(); 2];
            }
            let mag = log_mag.exp() * weight;
            if self.absolute {
                [mag, T::zero()]
            } else {
                let angle = tau * phi;
                [mag * angle.cos(), mag * angle.sin()]
            }
        };
        // panel seed at the integrand peak tau ~ (m + 2)/a
        let peak = ((m_pow + T::one()) / a)
            .max(tau_min + tau_min)
            .min(tau_max * T::of(0.5));
        let bounds = [tau_min.ln(), peak.ln(), tau_max.ln()];
        let mut dummy = 0u64;
        // well below the outer tolerance so inner noise does not floor the
        // outer error estimate
        let out = quad::adaptive(&f, &bounds, self.tol * T::of(0.02), INNER_MAX_PANELS, &mut dummy);
        out.value
    }

    fn inner_norm(&self, eta: T) -> T {
        let v = self.inner(eta);
        (v[0] * v[0] + v[1] * v[1]).sqrt()
    }
}

/// Decay exponent of the outer integrand at large |eta|:
/// |eta|^{-2 - (m - s) - (m + 3)/(2n - 1)}.
fn outer_decay_exponent<T: Real>(n2: usize, s: usize, m: usize) -> T {
    T::of(2.0) + T::of_usize(m - s) + T::of_usize(m + 3) / T::of_usize(n2 - 1)
}

fn evaluate<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    opts: KernelOptions<T>,
    absolute: bool,
) -> Result<KernelEvaluation<T>> {
    b.validate_domain()?;
    let kind = if absolute {
        KernelKind::Absolute
    } else {
        KernelKind::Complex
    };
    let margin = singular::convergence_margin(b, env, q);
    let margin_tol = T::of(1e-12) * (T::one() + b.eval(q.x).abs() + b.eval(q.r).abs());
    if margin <= margin_tol {
        // Divergence by classification, not by watching quadrature blow up.
        return Ok(KernelEvaluation {
            kind,
            value: None,
            error_estimate: T::infinity(),
            eta_truncation: T::zero(),
            status: if q.delta() <= margin_tol {
                KernelStatus::Diverged
            } else {
                KernelStatus::MarginNonpositive
            },
            integrand_evals: 0,
        });
    }

    let s = q.s_exp();
    let m = q.m_exp();
    let integ = Integration {
        b,
        x: q.x,
        r: q.r,
        delta: q.delta(),
        s,
        m,
        phase_const: if absolute { T::zero() } else { q.t - q.u },
        phase_eta: if absolute { T::zero() } else { q.y - q.s },
        absolute,
        tol: opts.tol,
        budget: opts.budget,
        evals: Cell::new(0),
        exhausted: Cell::new(false),
    };

    let db = b.derivative(1);
    let kappa = outer_decay_exponent::<T>(b.degree(), s, m);
    // interior panel seeds: the gap slopes (where the integrand spikes as
    // delta -> 0), the Fenchel-equality slopes of x and r, and 0
    let mut seeds: Vec<T> = vec![T::zero(), db.eval(q.x), db.eval(q.r)];
    for g in &env.gaps {
        seeds.push(g.c);
    }
    let mut m_cut = T::of(4.0);
    for &c in &seeds {
        m_cut = m_cut.max(c.abs() * T::of(2.0) + T::one());
    }
    m_cut = m_cut * opts.truncation_scale;

    // quadrature and truncation-tail errors each get half the tolerance so
    // their sum meets it
    let half_tol = opts.tol * T::of(0.5);
    let mut result: Option<(quad::QuadOutcome<T>, T, T)> = None;
    for _ in 0..24 {
        let tail_density = integ.inner_norm(m_cut) + integ.inner_norm(-m_cut);
        let tail = tail_density * m_cut / (kappa - T::one());
        let mut bounds: Vec<T> = vec![-m_cut];
        let interior = m_cut * T::of(0.999_999);
        for &c in &seeds {
            if c > -interior && c < interior {
                bounds.push(c);
            }
        }
        bounds.push(m_cut);
        bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bounds.dedup_by(|a, b| (*a - *b).abs() <= T::of(1e-12) * (T::one() + a.abs()));
        let mut dummy = 0u64;
        let out = quad::adaptive(
            &|eta| integ.inner(eta),
            &bounds,
            half_tol,
            OUTER_MAX_PANELS,
            &mut dummy,
        );
        if integ.exhausted.get() {
            return Ok(KernelEvaluation {
                kind,
                value: Some((out.value[0], out.value[1])),
                error_estimate: T::infinity(),
                eta_truncation: m_cut,
                status: KernelStatus::BudgetExceeded,
                integrand_evals: integ.evals.get(),
            });
        }
        let norm = out.norm();
        if tail <= half_tol * (T::one() + norm) {
            result = Some((out, tail, m_cut));
            break;
        }
        result = Some((out, tail, m_cut));
        m_cut = m_cut * T::of(2.0);
    }
    let (out, tail, m_used) = result.expect("at least one outer pass");
    let err = out.abs_error + tail;
    let converged = out.converged && err <= opts.tol * (T::one() + out.norm());
    Ok(KernelEvaluation {
        kind,
        value: Some((out.value[0], out.value[1])),
        error_estimate: err,
        eta_truncation: m_used,
        status: if converged {
            KernelStatus::Converged
        } else {
            KernelStatus::BudgetExceeded
        },
        integrand_evals: integ.evals.get(),
    })
}

/// The absolute-value integral: finite exactly on positive margin; returns a
/// divergence status without integrating otherwise.
pub fn abs_kernel<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    tol: T,
    budget: u64,
) -> Result<KernelEvaluation<T>> {
    abs_kernel_with(b, env, q, KernelOptions::new(tol, budget))
}

pub fn abs_kernel_with<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    opts: KernelOptions<T>,
) -> Result<KernelEvaluation<T>> {
    evaluate(b, env, q, opts, true)
}

/// The complex derivative integral with phase e^{i tau (t - u) + i eta tau
/// (y - s)}; normalization constant fixed to 1.
pub fn kernel<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    tol: T,
    budget: u64,
) -> Result<KernelEvaluation<T>> {
    kernel_with(b, env, q, KernelOptions::new(tol, budget))
}

pub fn kernel_with<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    opts: KernelOptions<T>,
) -> Result<KernelEvaluation<T>> {
    evaluate(b, env, q, opts, false)
}

/// Closed form of the tau integral in the j-th lower-bound term:
/// |eta|^s |b^(j)(lambda)|^{1/j} Gamma(m + 2 + 1/j) (delta + A)^{-(m+2+1/j)}.
#[allow(clippy::too_many_arguments)]
pub fn i_j_lower<T: Real>(
    b: &Polynomial<T>,
    x: T,
    r: T,
    delta: T,
    s: usize,
    m: usize,
    j: usize,
    eta: T,
) -> Result<T> {
    let d = singular::a_value(b, x, r, eta)?;
    let den = delta + d.a;
    if den <= T::zero() {
        return Err(Error::NonPositiveExponentGap(den.to_f64_lossy()));
    }
    let lam = crate::legendre::lambda_of(b, eta)?;
    let inv_j = T::one() / T::of_usize(j);
    let deriv = b.derivative(j).eval(lam).abs().powf(inv_j);
    let expo = T::of_usize(m + 2) + inv_j;
    Ok(eta.abs().powi(s as i32) * deriv * special::gamma(expo) * den.powf(-expo))
}

/// Table of absolute-kernel values along a geometric delta sequence.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceProbe<T> {
    pub deltas: Vec<T>,
    pub values: Vec<T>,
    /// values[i+1] / values[i]; bounded away from 1 on the singular set,
    /// tending to 1 where the delta = 0 limit is finite.
    pub growth_ratios: Vec<T>,
    pub complete: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn divergence_probe<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    x: T,
    r: T,
    delta0: T,
    halvings: usize,
    tol: T,
    budget: u64,
) -> Result<DivergenceProbe<T>> {
    if delta0 <= T::zero() {
        return Err(Error::NonPositiveExponentGap(delta0.to_f64_lossy()));
    }
    let mut deltas = Vec::with_capacity(halvings + 1);
    let mut values = Vec::new();
    let mut complete = true;
    let mut delta = delta0;
    for _ in 0..=halvings {
        deltas.push(delta);
        let q = KernelQuery::boundary(x, r).with_heights(delta, T::zero());
        let eval = abs_kernel(b, env, &q, tol, budget)?;
        match (eval.status, eval.scalar()) {
            (KernelStatus::Converged, Some(v)) => values.push(v),
            _ => {
                complete = false;
                break;
            }
        }
        delta = delta * T::of(0.5);
    }
    let growth_ratios = values.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(DivergenceProbe {
        deltas,
        values,
        growth_ratios,
        complete,
    })
}
