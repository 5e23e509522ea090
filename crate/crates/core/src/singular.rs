//! Classification of point pairs against the singular set and the diagonal,
//! the convergence margin, and the functions A, A_x, A_r.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre::{self, EnvelopeTable};
use crate::poly::Polynomial;
use crate::real::Real;

/// A pair of points in boundary coordinates plus derivative orders.
///
/// First point z = (x + iy, t + i(b(x) + h)), second point
/// w = (r + is, u + i(b(r) + k)); h, k >= 0 with h = k = 0 on the boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelQuery<T> {
    pub x: T,
    pub y: T,
    pub t: T,
    pub h: T,
    pub r: T,
    pub s: T,
    pub u: T,
    pub k: T,
    pub i1: usize,
    pub j1: usize,
    pub i2: usize,
    pub j2: usize,
}

impl<T: Real> KernelQuery<T> {
    /// Boundary pair (delta = 0) with no derivatives, determined by x and r.
    pub fn boundary(x: T, r: T) -> Self {
        KernelQuery {
            x,
            y: T::zero(),
            t: T::zero(),
            h: T::zero(),
            r,
            s: T::zero(),
            u: T::zero(),
            k: T::zero(),
            i1: 0,
            j1: 0,
            i2: 0,
            j2: 0,
        }
    }

    pub fn with_heights(mut self, h: T, k: T) -> Self {
        self.h = h;
        self.k = k;
        self
    }

    pub fn with_derivs(mut self, i1: usize, j1: usize, i2: usize, j2: usize) -> Self {
        self.i1 = i1;
        self.j1 = j1;
        self.i2 = i2;
        self.j2 = j2;
        self
    }

    /// delta = h + k.
    pub fn delta(&self) -> T {
        self.h + self.k
    }

    /// eta exponent s = i1 + j1.
    pub fn s_exp(&self) -> usize {
        self.i1 + self.j1
    }

    /// tau exponent m = i1 + j1 + i2 + j2.
    pub fn m_exp(&self) -> usize {
        self.i1 + self.j1 + self.i2 + self.j2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairLocation {
    /// delta > 0: at least one point off the boundary.
    InteriorTouching,
    /// delta = 0: both points on the boundary.
    Boundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairClassification<T> {
    pub location: PairLocation,
    pub on_diagonal: bool,
    pub in_sigma: bool,
    pub margin: T,
}

/// The convergence margin h + k + b(x) + b(r) - 2 b**((x+r)/2).
///
/// Nonnegative up to rounding; positive exactly on the region where the
/// kernel integral and all its derivative integrals converge absolutely.
pub fn convergence_margin<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
) -> T {
    let mid = (q.x + q.r) * T::of(0.5);
    q.h + q.k + b.eval(q.x) + b.eval(q.r)
        - T::of(2.0) * legendre::biconjugate(b, env, mid)
}

/// A_x(eta) = b*(eta) - [eta x - b(x)] >= 0, the Fenchel defect at x.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FenchelDefects<T> {
    pub a_x: T,
    pub a_r: T,
    pub a: T,
}

pub fn a_value<T: Real>(b: &Polynomial<T>, x: T, r: T, eta: T) -> Result<FenchelDefects<T>> {
    let bstar = legendre::legendre(b, eta)?;
    let a_x = bstar - (eta * x - b.eval(x));
    let a_r = bstar - (eta * r - b.eval(r));
    Ok(FenchelDefects {
        a_x,
        a_r,
        a: a_x + a_r,
    })
}

/// Membership of a single abscissa in the minimizer range: x lies in no open
/// gap interval (sigma(c), lambda(c)). Gap endpoints count as members.
pub fn in_lambda_range<T: Real>(env: &EnvelopeTable<T>, x: T, tol: T) -> bool {
    !env.gaps
        .iter()
        .any(|g| x > g.sigma + tol && x < g.lambda - tol)
}

/// Classifies a pair against the singular set: in_sigma holds iff delta = 0
/// and either x = r with x in the minimizer range, or x and r are both global
/// minimizers at some common bitangent slope c (tested through the Fenchel
/// defects at c). Cross-checked against the margin.
pub fn classify_pair<T: Real>(
    b: &Polynomial<T>,
    env: &EnvelopeTable<T>,
    q: &KernelQuery<T>,
    tol: T,
) -> Result<PairClassification<T>> {
    let delta = q.delta();
    let location = if delta > tol {
        PairLocation::InteriorTouching
    } else {
        PairLocation::Boundary
    };
    let on_diagonal = (q.x - q.r).abs() <= tol
        && (q.y - q.s).abs() <= tol
        && (q.t - q.u).abs() <= tol
        && q.h.abs() <= tol
        && q.k.abs() <= tol;
    let margin = convergence_margin(b, env, q);

    let mut in_sigma = false;
    if delta <= tol {
        if (q.x - q.r).abs() <= tol {
            in_sigma = in_lambda_range(env, q.x, tol);
        }
        if !in_sigma {
            for g in &env.gaps {
                let d = a_value(b, q.x, q.r, g.c)?;
                let vtol = tol * (T::one() + b.eval(q.x).abs() + b.eval(q.r).abs());
                if d.a_x.abs() <= vtol && d.a_r.abs() <= vtol {
                    in_sigma = true;
                    break;
                }
            }
        }
    }

    // Exact criterion: the margin vanishes on Sigma and only there
    // among boundary pairs. A disagreement signals an inaccurate gap table.
    let consistency_tol = tol.max(T::of(1e-7)) * (T::one() + b.eval(q.x).abs() + b.eval(q.r).abs());
    if delta <= tol {
        let margin_zero = margin.abs() <= consistency_tol;
        if margin_zero != in_sigma {
            return Err(Error::InconsistentClassification {
                margin: margin.to_f64_lossy(),
                in_sigma,
            });
        }
    }

    Ok(PairClassification {
        location,
        on_diagonal,
        in_sigma,
        margin,
    })
}

/// F_x(eta) = A_x(eta) / (eta - eta0) for eta > eta0, where x is a global
/// minimizer at eta0; bounded on each interval (eta0, eta0 + eps).
pub fn vanishing_factor<T: Real>(
    b: &Polynomial<T>,
    x: T,
    eta0: T,
    eta: T,
) -> Result<T> {
    if eta <= eta0 {
        return Err(Error::EtaNotAbove {
            eta: eta.to_f64_lossy(),
            eta0: eta0.to_f64_lossy(),
        });
    }
    let d0 = a_value(b, x, x, eta0)?;
    let vtol = T::of(1e-8) * (T::one() + b.eval(x).abs());
    if d0.a_x > vtol {
        return Err(Error::NotMinimizer {
            x: x.to_f64_lossy(),
            eta0: eta0.to_f64_lossy(),
            a_x: d0.a_x.to_f64_lossy(),
        });
    }
    let d = a_value(b, x, x, eta)?;
    Ok(d.a_x / (eta - eta0))
}
