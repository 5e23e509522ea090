//! Root extraction via Aberth-Ehrlich simultaneous iteration with Newton
//! polishing, plus the nonnegative-polynomial quadratic factorization.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::real::Real;

/// Real and complex roots of a real polynomial, with multiplicities.
#[derive(Debug, Clone, Serialize)]
pub struct RootList<T> {
    /// (location, multiplicity), strictly increasing in location.
    real_roots: Vec<(T, usize)>,
    /// (re, im > 0, multiplicity); each pair stands for a conjugate pair.
    complex_pairs: Vec<(T, T, usize)>,
}

impl<T: Real> RootList<T> {
    pub fn real_roots(&self) -> &[(T, usize)] {
        &self.real_roots
    }

    pub fn complex_pairs(&self) -> &[(T, T, usize)] {
        &self.complex_pairs
    }

    pub fn real_locations(&self) -> Vec<T> {
        self.real_roots.iter().map(|&(r, _)| r).collect()
    }

    /// Total root count: real multiplicities plus twice the pair counts.
    pub fn total_multiplicity(&self) -> usize {
        let r: usize = self.real_roots.iter().map(|&(_, m)| m).sum();
        let c: usize = self.complex_pairs.iter().map(|&(_, _, m)| m).sum();
        r + 2 * c
    }
}

fn horner_complex<T: Real>(coeffs: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, T::zero());
    }
    (p, dp)
}

/// All complex roots by Aberth-Ehrlich iteration. Coefficients ascending.
fn aberth<T: Real>(coeffs: &[T]) -> Vec<Complex<T>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    // Cauchy bound for the root radius
    let mut radius = T::zero();
    for &c in &coeffs[..d] {
        radius = radius.max((c / lead).abs());
    }
    radius = radius + T::one();
    let mut z: Vec<Complex<T>> = (0..d)
        .map(|k| {
            let theta = T::of(2.0 * std::f64::consts::PI) * T::of_usize(k) / T::of_usize(d)
                + T::of(0.7);
            Complex::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    let eps = T::of(1e-14);
    for _ in 0..300 {
        let mut done = true;
        for i in 0..d {
            let (p, dp) = horner_complex(coeffs, z[i]);
            if p.norm() == T::zero() {
                continue;
            }
            let newton = if dp.norm() == T::zero() {
                Complex::new(eps, eps)
            } else {
                p / dp
            };
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > T::zero() {
                        s = s + Complex::new(T::one(), T::zero()) / diff;
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - newton * s;
            let w = if denom.norm() < T::of(1e-30) {
                newton
            } else {
                newton / denom
            };
            z[i] = z[i] - w;
            if w.norm() > eps * (T::one() + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    z
}

/// One cluster of nearly coincident roots.
#[derive(Debug, Clone)]
struct Cluster<T> {
    center: Complex<T>,
    multiplicity: usize,
}

fn cluster_roots<T: Real>(mut roots: Vec<Complex<T>>, tol: T) -> Vec<Cluster<T>> {
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    while let Some(seed) = roots.pop() {
        let mut members = vec![seed];
        let mut i = 0;
        while i < roots.len() {
            let c = {
                let mut s = Complex::new(T::zero(), T::zero());
                for m in &members {
                    s = s + *m;
                }
                s / Complex::new(T::of_usize(members.len()), T::zero())
            };
            if (roots[i] - c).norm() <= tol * (T::one() + c.norm()) {
                members.push(roots.swap_remove(i));
                i = 0;
            } else {
                i += 1;
            }
        }
        let mut s = Complex::new(T::zero(), T::zero());
        for m in &members {
            s = s + *m;
        }
        clusters.push(Cluster {
            center: s / Complex::new(T::of_usize(members.len()), T::zero()),
            multiplicity: members.len(),
        });
    }
    clusters
}

/// Newton-polish a multiplicity-m real root: it is a simple root of the
/// (m-1)-th derivative.
fn polish_real<T: Real>(p: &Polynomial<T>, x0: T, mult: usize) -> T {
    let q = p.derivative(mult - 1);
    let dq = q.derivative(1);
    let mut x = x0;
    for _ in 0..50 {
        let f = q.eval(x);
        let df = dq.eval(x);
        if df == T::zero() {
            break;
        }
        let step = f / df;
        x = x - step;
        if step.abs() <= T::of(1e-16) * (T::one() + x.abs()) {
            break;
        }
    }
    x
}

/// Same polishing for a multiplicity-m complex root.
fn polish_complex<T: Real>(p: &Polynomial<T>, z0: Complex<T>, mult: usize) -> Complex<T> {
    let q = p.derivative(mult - 1);
    let mut z = z0;
    for _ in 0..50 {
        let (f, df) = horner_complex(q.coeffs(), z);
        if df.norm() == T::zero() {
            break;
        }
        let step = f / df;
        z = z - step;
        if step.norm() <= T::of(1e-16) * (T::one() + z.norm()) {
            break;
        }
    }
    z
}

/// All roots of `p` with multiplicities; roots within
/// `tol * (1 + |root|)` of each other are merged into one cluster.
pub fn real_roots<T: Real>(p: &Polynomial<T>, tol: T) -> Result<RootList<T>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(RootList {
            real_roots: vec![],
            complex_pairs: vec![],
        });
    }
    // strip leading coefficients that are negligible relative to the scale
    // (purely defensive: Polynomial::new already trims exact zeros)
    // fold into the closed upper half plane before clustering: conjugate
    // pairs land on one cluster of doubled multiplicity, and a perturbed
    // multiple real root cannot lose its below-axis half
    let raw: Vec<Complex<T>> = aberth(p.coeffs())
        .into_iter()
        .map(|z| Complex::new(z.re, z.im.abs()))
        .collect();
    let cluster_tol = tol.max(T::of(1e-7));
    let clusters = cluster_roots(raw, cluster_tol);

    let mut real: Vec<(T, usize)> = Vec::new();
    let mut complex: Vec<(T, T, usize)> = Vec::new();
    for cl in clusters {
        let re = cl.center.re;
        let im = cl.center.im;
        if im.abs() <= cluster_tol * (T::one() + re.abs()) {
            let x = polish_real(p, re, cl.multiplicity);
            real.push((x, cl.multiplicity));
        } else {
            let pairs = cl.multiplicity / 2;
            if pairs > 0 {
                let z = polish_complex(p, cl.center, pairs);
                complex.push((z.re, z.im.abs(), pairs));
            }
            if cl.multiplicity % 2 == 1 {
                // an odd folded count means one member was really a noisy
                // real root
                let x = polish_real(p, re, 1);
                real.push((x, 1));
            }
        }
    }
    // merge real clusters that polishing brought together
    real.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(T, usize)> = Vec::new();
    for (x, m) in real {
        if let Some(last) = merged.last_mut() {
            if (x - last.0).abs() <= cluster_tol * (T::one() + x.abs()) {
                last.1 += m;
                last.0 = polish_real(p, last.0, last.1);
                continue;
            }
        }
        merged.push((x, m));
    }
    complex.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    Ok(RootList {
        real_roots: merged,
        complex_pairs: complex,
    })
}

/// Real roots of `p(x) = rhs`, ascending.
pub fn solve_real<T: Real>(p: &Polynomial<T>, rhs: T, tol: T) -> Result<Vec<T>> {
    let mut c = p.coeffs().to_vec();
    c[0] = c[0] - rhs;
    let shifted = Polynomial::new(c);
    Ok(real_roots(&shifted, tol)?.real_locations())
}

/// Factorization of a nonnegative polynomial vanishing to even order at 0:
/// `leading * xi^m * prod_j [(xi - h_j)^2 + k_j^2]`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticFactorization<T> {
    pub leading: T,
    pub even_order_root_at_zero: usize,
    /// (h_j, k_j >= 0), ordered by h_j ascending.
    pub factors: Vec<(T, T)>,
}

impl<T: Real> QuadraticFactorization<T> {
    pub fn expand(&self) -> Polynomial<T> {
        let mut p = Polynomial::new({
            let mut c = vec![T::zero(); self.even_order_root_at_zero + 1];
            c[self.even_order_root_at_zero] = self.leading;
            c
        });
        for &(h, k) in &self.factors {
            let q = Polynomial::new(vec![h * h + k * k, -(h + h), T::one()]);
            p = p.mul(&q);
        }
        p
    }
}

/// Factors a polynomial that is nonnegative on all of R and vanishes to even
/// order at the origin. Reports a witness point if the input is detectably
/// negative.
pub fn factor_nonneg<T: Real>(
    p: &Polynomial<T>,
    tol: T,
) -> Result<QuadraticFactorization<T>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let scale = p.coeff_scale();
    if p.leading() <= T::zero() {
        // negative at large |x|
        let witness = T::of(1e6);
        return Err(Error::NegativeWitness {
            witness: witness.to_f64_lossy(),
            value: p.eval(witness).to_f64_lossy(),
        });
    }
    // vanishing order at 0
    let mut order = 0usize;
    for &c in p.coeffs() {
        if c.abs() > tol * scale {
            break;
        }
        order += 1;
    }
    if order % 2 != 0 {
        return Err(Error::OddVanishingOrder { order });
    }
    let reduced = Polynomial::new(p.coeffs()[order..].to_vec());
    let mut factors: Vec<(T, T)> = Vec::new();
    if reduced.degree() > 0 {
        let roots = real_roots(&reduced, tol)?;
        for &(r, m) in roots.real_roots() {
            if m % 2 != 0 {
                // sign change at r: find a nearby point where p < 0
                let step = T::of(1e-3) * (T::one() + r.abs());
                let mut witness = r;
                let mut value = T::zero();
                for i in 1..=200 {
                    let s = step * T::of_usize(i);
                    for cand in [r - s, r + s] {
                        let v = p.eval(cand);
                        if v < -tol * scale * (T::one() + cand.abs().powi(p.degree() as i32)) {
                            witness = cand;
                            value = v;
                            break;
                        }
                    }
                    if value < T::zero() {
                        break;
                    }
                }
                return Err(Error::NegativeWitness {
                    witness: witness.to_f64_lossy(),
                    value: value.to_f64_lossy(),
                });
            }
            for _ in 0..m / 2 {
                factors.push((r, T::zero()));
            }
        }
        for &(h, k, m) in roots.complex_pairs() {
            for _ in 0..m {
                factors.push((h, k));
            }
        }
    }
    factors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(QuadraticFactorization {
        leading: p.leading(),
        even_order_root_at_zero: order,
        factors,
    })
}
