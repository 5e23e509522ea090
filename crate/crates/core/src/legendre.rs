//! Global minimization of the tilted family B_eta(x) = -eta*x + b(x):
//! lambda/sigma maps, the Legendre transform b*, the exceptional slope set
//! with its gap intervals, the biconjugate b**, and asymptotic diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::real::Real;
use crate::roots;

/// Default relative tolerance for declaring two minimum values tied.
pub const DEFAULT_TIE_TOL: f64 = 1e-10;

/// Global minimizers of B_eta for one eta.
#[derive(Debug, Clone, Serialize)]
pub struct MinimizerSet<T> {
    pub eta: T,
    /// All global minimizers, ascending.
    pub minimizers: Vec<T>,
    /// Smallest minimizer.
    pub sigma: T,
    /// Largest minimizer.
    pub lambda: T,
    /// min_x B_eta(x) = -b*(eta).
    pub min_value: T,
}

/// One skipped interval [sigma, lambda) of the range of lambda(.), together
/// with its bitangent slope.
#[derive(Debug, Clone, Serialize)]
pub struct Gap<T> {
    pub c: T,
    pub sigma: T,
    pub lambda: T,
    /// b(sigma); the affine bridge through the gap starts here with slope c.
    pub bridge_value: T,
    /// True when bitangent Newton refinement failed and the values come from
    /// the bisection bracket only.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degraded: bool,
}

/// The exceptional set of bitangent slopes with their gap intervals; defines
/// the convex envelope b**.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeTable<T> {
    pub gaps: Vec<Gap<T>>,
}

impl<T> Default for EnvelopeTable<T> {
    fn default() -> Self {
        EnvelopeTable { gaps: Vec::new() }
    }
}

impl<T: Real> EnvelopeTable<T> {
    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// The gap whose closed hull [sigma, lambda] contains u, if any.
    pub fn gap_containing(&self, u: T) -> Option<&Gap<T>> {
        self.gaps.iter().find(|g| g.sigma <= u && u <= g.lambda)
    }
}

fn tilted_value<T: Real>(b: &Polynomial<T>, eta: T, x: T) -> T {
    b.eval(x) - eta * x
}

/// All global minimizers of B_eta, found through the real roots of b' - eta.
pub fn minimizer_set<T: Real>(
    b: &Polynomial<T>,
    eta: T,
    tie_tol: T,
) -> Result<MinimizerSet<T>> {
    b.validate_domain()?;
    let db = b.derivative(1);
    let crit = roots::solve_real(&db, eta, T::of(1e-12))?;
    debug_assert!(!crit.is_empty(), "odd-degree derivative has a real root");
    let mut min_value = T::infinity();
    for &x in &crit {
        min_value = min_value.min(tilted_value(b, eta, x));
    }
    let tol = tie_tol * (T::one() + min_value.abs());
    let mut minimizers: Vec<T> = crit
        .into_iter()
        .filter(|&x| tilted_value(b, eta, x) <= min_value + tol)
        .collect();
    minimizers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    minimizers.dedup_by(|a, b| (*a - *b).abs() <= T::of(1e-9) * (T::one() + a.abs()));
    Ok(MinimizerSet {
        eta,
        sigma: minimizers[0],
        lambda: *minimizers.last().unwrap(),
        minimizers,
        min_value,
    })
}

/// The Legendre transform b*(eta) = sup_x [eta*x - b(x)].
pub fn legendre<T: Real>(b: &Polynomial<T>, eta: T) -> Result<T> {
    Ok(-minimizer_set(b, eta, T::of(DEFAULT_TIE_TOL))?.min_value)
}

/// Largest global minimizer lambda(eta).
pub fn lambda_of<T: Real>(b: &Polynomial<T>, eta: T) -> Result<T> {
    Ok(minimizer_set(b, eta, T::of(DEFAULT_TIE_TOL))?.lambda)
}

const JUMP_SCAN_POINTS: usize = 512;

/// Bisection width (in eta) down to which a lambda jump is localized.
const JUMP_ETA_WIDTH: f64 = 1e-12;

/// Smallest gap width the scanner reports; continuous steep growth of
/// lambda collapses below this threshold under bisection.
const MIN_GAP_WIDTH: f64 = 1e-6;

struct JumpCandidate<T> {
    c: T,
    sigma: T,
    lambda: T,
}

fn locate_jumps<T: Real>(
    b: &Polynomial<T>,
    eta_lo: T,
    lam_lo: T,
    eta_hi: T,
    lam_hi: T,
    out: &mut Vec<JumpCandidate<T>>,
    depth: usize,
) -> Result<()> {
    let min_gap = T::of(MIN_GAP_WIDTH) * (T::one() + lam_lo.abs().max(lam_hi.abs()));
    if lam_hi - lam_lo <= min_gap {
        return Ok(());
    }
    let mid = (eta_lo + eta_hi) * T::of(0.5);
    if depth > 80 || eta_hi - eta_lo <= T::of(JUMP_ETA_WIDTH) * (T::one() + mid.abs()) {
        out.push(JumpCandidate {
            c: mid,
            sigma: lam_lo,
            lambda: lam_hi,
        });
        return Ok(());
    }
    let lam_mid = lambda_of(b, mid)?;
    locate_jumps(b, eta_lo, lam_lo, mid, lam_mid, out, depth + 1)?;
    locate_jumps(b, mid, lam_mid, eta_hi, lam_hi, out, depth + 1)
}

/// Newton iteration for the bitangent system
/// b'(s)(l - s) = b(l) - b(s) = b'(l)(l - s).
fn polish_bitangent<T: Real>(b: &Polynomial<T>, s0: T, l0: T) -> Option<(T, T)> {
    let db = b.derivative(1);
    let ddb = b.derivative(2);
    let mut s = s0;
    let mut l = l0;
    let scale = T::one() + b.coeff_scale();
    for _ in 0..100 {
        let gap = l - s;
        if gap <= T::zero() {
            return None;
        }
        let secant = b.eval(l) - b.eval(s);
        let g1 = db.eval(s) * gap - secant;
        let g2 = db.eval(l) * gap - secant;
        // Jacobian
        let j11 = ddb.eval(s) * gap;
        let j12 = db.eval(s) - db.eval(l);
        let j21 = db.eval(s) - db.eval(l);
        let j22 = ddb.eval(l) * gap;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < T::of(1e-300) {
            return None;
        }
        let ds = (g1 * j22 - g2 * j12) / det;
        let dl = (j11 * g2 - j21 * g1) / det;
        s = s - ds;
        l = l - dl;
        if ds.abs() + dl.abs() <= T::of(1e-14) * (T::one() + s.abs() + l.abs()) {
            let gap = l - s;
            let resid = ((db.eval(s) * gap - (b.eval(l) - b.eval(s))).abs()
                + (db.eval(l) * gap - (b.eval(l) - b.eval(s))).abs())
                / (scale * (T::one() + gap.abs()));
            if resid < T::of(1e-9) && gap > T::zero() {
                return Some((s, l));
            }
            return None;
        }
    }
    None
}

/// Computes the exceptional slope set and its gap intervals by scanning
/// lambda(eta) for jump discontinuities over the concavity-driven slope
/// brackets, bisecting each jump, and Newton-polishing the bitangent system.
pub fn gap_intervals<T: Real>(b: &Polynomial<T>, tol: T) -> Result<EnvelopeTable<T>> {
    b.validate_domain()?;
    let concave = b.concavity_intervals();
    if concave.is_empty() {
        return Ok(EnvelopeTable::default());
    }
    let db = b.derivative(1);
    // On a concavity interval [u, v], b' is decreasing, so the bitangent
    // slope of any gap containing it lies in [b'(v), b'(u)].
    let mut brackets: Vec<(T, T)> = Vec::new();
    for &(u, v) in &concave {
        debug_assert!(u.is_finite() && v.is_finite());
        let lo = db.eval(v);
        let hi = db.eval(u);
        let pad = T::of(1e-6) * (T::one() + (hi - lo).abs());
        brackets.push((lo - pad, hi + pad));
    }
    brackets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<(T, T)> = Vec::new();
    for (lo, hi) in brackets {
        if let Some(last) = merged.last_mut() {
            if lo <= last.1 {
                last.1 = last.1.max(hi);
                continue;
            }
        }
        merged.push((lo, hi));
    }

    let mut candidates: Vec<JumpCandidate<T>> = Vec::new();
    for (lo, hi) in merged {
        let step = (hi - lo) / T::of_usize(JUMP_SCAN_POINTS);
        let mut eta_prev = lo;
        let mut lam_prev = lambda_of(b, lo)?;
        for i in 1..=JUMP_SCAN_POINTS {
            let eta = lo + step * T::of_usize(i);
            let lam = lambda_of(b, eta)?;
            locate_jumps(b, eta_prev, lam_prev, eta, lam, &mut candidates, 0)?;
            eta_prev = eta;
            lam_prev = lam;
        }
    }

    let tie_tol = tol.max(T::of(DEFAULT_TIE_TOL));
    let mut gaps: Vec<Gap<T>> = Vec::new();
    for cand in candidates {
        let (sigma, lambda, c, degraded) = match polish_bitangent(b, cand.sigma, cand.lambda) {
            Some((s, l)) => {
                let c = (b.eval(l) - b.eval(s)) / (l - s);
                (s, l, c, false)
            }
            None => (cand.sigma, cand.lambda, cand.c, true),
        };
        // Both endpoints must achieve the global minimum of B_c; discards
        // spurious jumps and bitangents of non-global pockets.
        let ms = minimizer_set(b, c, tie_tol)?;
        let vtol = T::of(1e-7) * (T::one() + ms.min_value.abs());
        if (tilted_value(b, c, sigma) - ms.min_value).abs() > vtol
            || (tilted_value(b, c, lambda) - ms.min_value).abs() > vtol
        {
            continue;
        }
        if lambda - sigma <= T::of(MIN_GAP_WIDTH) {
            continue;
        }
        gaps.push(Gap {
            c,
            sigma,
            lambda,
            bridge_value: b.eval(sigma),
            degraded,
        });
    }
    gaps.sort_by(|a, b| a.c.partial_cmp(&b.c).unwrap());
    gaps.dedup_by(|a, b| (a.c - b.c).abs() <= T::of(1e-8) * (T::one() + a.c.abs()));
    Ok(EnvelopeTable { gaps })
}

/// The biconjugate b**(u): the convex envelope of b, read from the gap table
/// as b itself off the gaps and the affine bridge across each gap.
pub fn biconjugate<T: Real>(b: &Polynomial<T>, env: &EnvelopeTable<T>, u: T) -> T {
    match env.gap_containing(u) {
        Some(g) => g.bridge_value + g.c * (u - g.sigma),
        None => b.eval(u),
    }
}

/// Asymptotic ratio diagnostics at large |eta|.
///
/// The comparators are stated for a general positive leading coefficient: with
/// gamma = 2n * a_{2n}, lambda(eta) ~ (eta/gamma)^{1/(2n-1)},
/// b*(eta) ~ gamma (2n-1)/(2n) (eta/gamma)^{2n/(2n-1)}, and
/// b^{(j)}(lambda) ~ gamma (2n-1)!/(2n-j)! (eta/gamma)^{(2n-j)/(2n-1)}.
/// Fractional powers of negative eta use the real odd root.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRatios<T> {
    pub eta: T,
    pub lambda_ratio: T,
    pub bstar_ratio: T,
    /// (j, ratio) for j = 2..=2n.
    pub derivative_ratios: Vec<(usize, T)>,
    /// Set when lambda(eta) is not a simple critical point (b''(lambda) ~ 0),
    /// where the ratios are not meaningful.
    pub degenerate: bool,
}

pub fn asymptotic_ratios<T: Real>(b: &Polynomial<T>, eta: T) -> Result<AsymptoticRatios<T>> {
    b.validate_domain()?;
    if eta == T::zero() {
        return Err(Error::ZeroEta);
    }
    let two_n = b.degree();
    let gamma = T::of_usize(two_n) * b.leading();
    let ms = minimizer_set(b, eta, T::of(DEFAULT_TIE_TOL))?;
    let lam = ms.lambda;
    let bstar = -ms.min_value;
    let degenerate = b.derivative(2).eval(lam).abs()
        <= T::of(1e-9) * (T::one() + eta.abs());
    // real odd root of eta / gamma
    let root = (eta / gamma).signed_pow(T::one() / T::of_usize(two_n - 1));
    let lambda_ratio = lam / root;
    let bstar_comp = gamma * T::of_usize(two_n - 1) / T::of_usize(two_n)
        * root.powi(two_n as i32);
    let bstar_ratio = bstar / bstar_comp;
    let mut derivative_ratios = Vec::with_capacity(two_n - 1);
    // (2n-1)!/(2n-j)! built up incrementally
    let mut falling = T::of_usize(two_n - 1);
    for j in 2..=two_n {
        let comp = gamma * falling * root.powi((two_n - j) as i32);
        let val = b.derivative(j).eval(lam);
        derivative_ratios.push((j, val / comp));
        if two_n > j {
            falling = falling * T::of_usize(two_n - j);
        }
    }
    Ok(AsymptoticRatios {
        eta,
        lambda_ratio,
        bstar_ratio,
        derivative_ratios,
        degenerate,
    })
}
