//! Scalar numerics shared by the rest of the crate.
//!
//! The zeta-family evaluators use a direct series with an Euler-Maclaurin
//! correction; the alternating series uses a Chebyshev-weighted
//! acceleration that converges at a fixed geometric rate, so it stays
//! accurate down to `s -> 0` where the functional equation degenerates.
//! The cosine transform integrates between consecutive zeros of the
//! oscillating factor and certifies its truncation point from the decay
//! certificate of the integrand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{flt, Scalar};

/// Shared stopping-rule bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<T = f64> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Tolerance {
            abs_tol: flt(1e-10),
            rel_tol: flt(1e-12),
            max_iter: 10_000,
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    /// Tolerance with the given absolute target and default companions.
    pub fn abs(abs_tol: T) -> Self {
        Tolerance {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Certified far-field bound `|f(x)| <= magnitude * |x|^(-1-exponent)`
/// valid for `|x| > onset`.
///
/// `exponent > 0` certifies absolute integrability of the tail; the
/// magnitude may be zero for functions that vanish identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCertificate<T = f64> {
    pub magnitude: T,
    pub exponent: T,
    pub onset: T,
}

impl<T: Scalar> DecayCertificate<T> {
    /// Bound on `integral_a^inf |f|` for `a >= onset`.
    pub fn tail_integral_bound(&self, a: T) -> T {
        self.magnitude * a.powf(-self.exponent) / self.exponent
    }

    /// Certificate for a sum of functions: magnitudes add, the slowest
    /// exponent wins, and the onset is pushed to at least 1 so that the
    /// per-term bounds stay comparable beyond it.
    ///
    /// Terms with zero magnitude contribute nothing to the tail, so they
    /// must not drag the combined exponent down; a placeholder certificate
    /// for the zero function would otherwise poison the whole sum.
    pub fn combine(parts: &[DecayCertificate<T>]) -> DecayCertificate<T> {
        let one = T::one();
        let mut magnitude = T::zero();
        let mut exponent = T::infinity();
        let mut onset = one;
        for c in parts {
            magnitude += c.magnitude;
            if c.magnitude > T::zero() {
                exponent = exponent.min(c.exponent);
                onset = onset.max(c.onset);
            }
        }
        if !exponent.is_finite() {
            exponent = one;
        }
        DecayCertificate {
            magnitude,
            exponent,
            onset,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError<T: Scalar> {
    #[error("argument {arg} outside domain: {requirement}")]
    Domain { arg: T, requirement: &'static str },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: T, hi: T },
    #[error("did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("tail is not certified integrable (decay exponent {exponent} <= 0)")]
    NotIntegrable { exponent: T },
    #[error("quadrature missed the requested tolerance (estimated error {estimate})")]
    QuadratureTolerance { estimate: T },
}

/// Compensated accumulator. The energy sums mix magnitudes across many
/// orders, and plain summation would eat the 1e-12 budgets.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kahan<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> Kahan<T> {
    pub fn new() -> Self {
        Kahan {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

/// `B_{2k} / (2k)!` for the Euler-Maclaurin correction.
const EM_COEFFS: [f64; 12] = [
    8.333333333333333e-2,
    -1.3888888888888889e-3,
    3.3068783068783067e-5,
    -8.267195767195768e-7,
    2.08767569878681e-8,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.389680296322583e-13,
    8.586062056277845e-15,
    -2.174868698558062e-16,
    5.50900282836023e-18,
    -1.3954464685812522e-19,
];

/// Tail `sum_{m>=0} (a+m)^(-s)` for `s > 1`, `a > 0`.
///
/// Terms are summed directly until the base reaches 16, then the
/// Euler-Maclaurin correction finishes the job at full precision.
pub(crate) fn hurwitz_tail<T: Scalar>(s: T, a: T) -> T {
    debug_assert!(s > T::one() && a > T::zero());
    let one = T::one();
    let two = flt::<T>(2.0);
    let mut acc = Kahan::new();
    let mut base = a;
    while base < flt(16.0) {
        acc.add(base.powf(-s));
        base += one;
    }
    acc.add(base.powf(one - s) / (s - one));
    acc.add(base.powf(-s) / two);
    let mut rising = s;
    for (k, c) in EM_COEFFS.iter().enumerate() {
        let k = (k + 1) as f64;
        acc.add(flt::<T>(*c) * rising * base.powf(-s - flt(2.0 * k - 1.0)));
        rising = rising * (s + flt(2.0 * k - 1.0)) * (s + flt(2.0 * k));
    }
    acc.value()
}

/// Riemann zeta for `s > 1`, relative error around 1e-14 in `f64`.
pub fn riemann_zeta<T: Scalar>(s: T) -> Result<T, NumericsError<T>> {
    if !(s > T::one()) {
        return Err(NumericsError::Domain {
            arg: s,
            requirement: "riemann_zeta needs s > 1",
        });
    }
    if s > flt(60.0) {
        // 4^(-60) is below f64 resolution of the leading 1.
        let one = T::one();
        return Ok(one
            + flt::<T>(2.0).powf(-s)
            + flt::<T>(3.0).powf(-s)
            + flt::<T>(4.0).powf(-s));
    }
    Ok(hurwitz_tail(s, T::one()))
}

/// Weighted alternating sum `sum_{k>=0} (-1)^k a(k)` with the fixed-rate
/// acceleration of Cohen, Rodriguez Villegas and Zagier (n = 24 gives
/// roughly (3+sqrt 8)^(-24) ~ 1e-18 relative error for totally monotone
/// terms).
fn accelerated_alternating<T: Scalar>(term: impl Fn(usize) -> T) -> T {
    const N: usize = 24;
    let one = T::one();
    let half = flt::<T>(0.5);
    let nf = flt::<T>(N as f64);
    let mut d = (flt::<T>(3.0) + flt::<T>(8.0).sqrt()).powi(N as i32);
    d = (d + d.recip()) * half;
    let mut b = -one;
    let mut c = -d;
    let mut acc = T::zero();
    for k in 0..N {
        c = b - c;
        acc += c * term(k);
        let kf = flt::<T>(k as f64);
        b = (kf + nf) * (kf - nf) * b / ((kf + half) * (kf + one));
    }
    acc / d
}

/// Dirichlet eta for `s > 0`.
///
/// Above 1 the functional equation `eta = (1 - 2^(1-s)) zeta(s)` is used
/// with an `exp_m1` prefactor so nothing cancels as `s -> 1+`; at and
/// below 1 the alternating series is summed with acceleration.
pub fn dirichlet_eta<T: Scalar>(s: T) -> Result<T, NumericsError<T>> {
    if !(s > T::zero()) {
        return Err(NumericsError::Domain {
            arg: s,
            requirement: "dirichlet_eta needs s > 0",
        });
    }
    if s > T::one() {
        let ln2 = flt::<T>(std::f64::consts::LN_2);
        let prefactor = -((T::one() - s) * ln2).exp_m1();
        Ok(prefactor * riemann_zeta(s)?)
    } else {
        Ok(accelerated_alternating(|k| {
            flt::<T>((k + 1) as f64).powf(-s)
        }))
    }
}

/// Exposed for cross-checking the two eta evaluation paths in tests.
#[cfg(test)]
pub(crate) fn eta_by_acceleration<T: Scalar>(s: T) -> T {
    accelerated_alternating(|k| flt::<T>((k + 1) as f64).powf(-s))
}

/// Root of `f` on `[lo, hi]` by bisection.
///
/// Stops when the bracket width drops to `tol.abs_tol`; the returned
/// value is the bracket midpoint.
pub fn bisect_root<T: Scalar>(
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    tol: &Tolerance<T>,
) -> Result<T, NumericsError<T>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::Domain {
            arg: lo,
            requirement: "bisect_root needs a finite bracket lo < hi",
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    if flo == T::zero() {
        return Ok(lo);
    }
    let fhi = f(hi);
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(NumericsError::NoSignChange { lo, hi });
    }
    let low_is_negative = flo < T::zero();
    let half = flt::<T>(0.5);
    for _ in 0..tol.max_iter {
        let mid = (lo + hi) * half;
        if hi - lo <= tol.abs_tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm < T::zero()) == low_is_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(NumericsError::NoConvergence(tol.max_iter))
}

/// Central second difference quotient `(f(x+h) - 2 f(x) + f(x-h)) / h^2`.
pub fn second_difference<T: Scalar>(f: impl Fn(T) -> T, x: T, h: T) -> T {
    let two = flt::<T>(2.0);
    (f(x + h) - two * f(x) + f(x - h)) / (h * h)
}

// ---------------------------------------------------------------------
// Cosine transform
// ---------------------------------------------------------------------

/// Adaptive Simpson on `[a, b]` with a per-interval error budget.
/// Returns the integral; accumulated error estimate lands in `err_used`.
fn adaptive_simpson<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    budget: T,
    err_used: &mut T,
) -> T {
    let half = flt::<T>(0.5);
    let six = flt::<T>(6.0);
    let m = (a + b) * half;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / six * (fa + flt::<T>(4.0) * fm + fb);
    simpson_step(f, a, fa, m, fm, b, fb, whole, budget, 48, err_used)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    a: T,
    fa: T,
    m: T,
    fm: T,
    b: T,
    fb: T,
    whole: T,
    budget: T,
    depth: usize,
    err_used: &mut T,
) -> T {
    let half = flt::<T>(0.5);
    let six = flt::<T>(6.0);
    let four = flt::<T>(4.0);
    let fifteen = flt::<T>(15.0);
    let lm = (a + m) * half;
    let rm = (m + b) * half;
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= fifteen * budget {
        *err_used += delta.abs() / fifteen;
        left + right + delta / fifteen
    } else {
        simpson_step(f, a, fa, lm, flm, m, fm, left, budget * half, depth - 1, err_used)
            + simpson_step(f, m, fm, rm, frm, b, fb, right, budget * half, depth - 1, err_used)
    }
}

/// Iterated Aitken extrapolation of a partial-sum sequence.
fn aitken_limit<T: Scalar>(s: &[T]) -> T {
    let tiny = T::min_positive_value() * flt(16.0);
    let mut v = s.to_vec();
    while v.len() >= 3 {
        let mut w = Vec::with_capacity(v.len() - 2);
        for i in 0..v.len() - 2 {
            let d1 = v[i + 1] - v[i];
            let d2 = v[i + 2] - v[i + 1];
            let denom = d2 - d1;
            if denom.abs() <= tiny {
                w.push(v[i + 2]);
            } else {
                w.push(v[i + 2] - d2 * d2 / denom);
            }
        }
        v = w;
    }
    *v.last().expect("aitken_limit needs a nonempty sequence")
}

/// Cosine transform `(2 pi)^(-1/2) integral_R f(x) cos(kx) dx` of a
/// mirror-symmetric integrable function, supplied through its values on
/// `x > 0` plus a decay certificate for the tail.
///
/// `f` must be finite on `[0, inf)`; integrability at the origin is the
/// caller's responsibility (every registered integrable potential is
/// bounded there). The oscillatory part is integrated between
/// consecutive zeros of `cos(kx)` up to a cutoff at which the
/// certificate bounds the remaining tail below `tol.abs_tol / 2`; when
/// the certified cutoff is unaffordably far, the alternating sequence of
/// half-period integrals is extrapolated instead and the result carries
/// an estimated (not certified) error.
pub fn cosine_transform<T: Scalar, F: Fn(T) -> T>(
    f: F,
    decay: &DecayCertificate<T>,
    k: T,
    tol: &Tolerance<T>,
) -> Result<T, NumericsError<T>> {
    let zero = T::zero();
    let one = T::one();
    let two = flt::<T>(2.0);
    if !(decay.exponent > zero) {
        return Err(NumericsError::NotIntegrable {
            exponent: decay.exponent,
        });
    }
    let k = k.abs();
    let pi = flt::<T>(std::f64::consts::PI);
    let norm = (two / pi).sqrt(); // result = norm * integral_0^inf
    let eps = tol.abs_tol.max(flt(1e-15)) / norm;
    let eps_tail = eps * flt(0.5);
    let eps_quad = eps * flt(0.5);

    // Certified cutoff: beyond it the remaining tail integral is < eps_tail.
    let base = decay.onset.max(one);
    let cut = if decay.magnitude <= zero {
        base
    } else {
        let needed = (decay.magnitude / (decay.exponent * eps_tail))
            .powf(decay.exponent.recip());
        needed.max(base)
    };

    let integrand = |x: T| {
        if k == zero {
            f(x)
        } else {
            f(x) * (k * x).cos()
        }
    };

    // Head boundaries: geometric refinement so a coarse first probe cannot
    // step over all the structure of a narrow f.
    let head_boundaries = |to: T| {
        let mut bs = vec![zero];
        let mut b = (one / flt(16.0)).min(to * flt(0.5));
        while b < to {
            bs.push(b);
            b = b * two;
        }
        bs.push(to);
        bs
    };

    let first_zero = if k > zero {
        pi / (two * k)
    } else {
        T::infinity()
    };

    if first_zero >= cut {
        // No oscillation inside the certified range.
        if cut > flt(1e9) {
            // Power tail too slow to cut off and nothing alternates.
            return Err(NumericsError::QuadratureTolerance {
                estimate: decay.tail_integral_bound(base),
            });
        }
        let bounds = head_boundaries(cut);
        let budget = eps_quad / flt((bounds.len() - 1) as f64);
        let mut total = Kahan::new();
        let mut err = zero;
        for w in bounds.windows(2) {
            total.add(adaptive_simpson(&integrand, w[0], w[1], budget, &mut err));
        }
        let estimate = err + decay.tail_integral_bound(cut.max(decay.onset));
        if estimate > eps * flt(4.0) {
            return Err(NumericsError::QuadratureTolerance {
                estimate: estimate * norm,
            });
        }
        return Ok(total.value() * norm);
    }

    let half_period = pi / k;
    let panels_needed = ((cut - first_zero) / half_period).ceil();
    const PANEL_CAP: f64 = 16_384.0;

    if panels_needed <= flt(PANEL_CAP) {
        // Direct certified path: head + full half-periods past the cutoff.
        let n_panels = panels_needed.to_usize().unwrap_or(usize::MAX).max(1);
        let mut bounds = head_boundaries(first_zero);
        let mut z = first_zero;
        for _ in 0..n_panels {
            z += half_period;
            bounds.push(z);
        }
        let budget = eps_quad / flt((bounds.len() - 1) as f64);
        let mut total = Kahan::new();
        let mut err = zero;
        for w in bounds.windows(2) {
            total.add(adaptive_simpson(&integrand, w[0], w[1], budget, &mut err));
        }
        let estimate = err + decay.tail_integral_bound(z);
        if estimate > eps * flt(4.0) {
            return Err(NumericsError::QuadratureTolerance {
                estimate: estimate * norm,
            });
        }
        Ok(total.value() * norm)
    } else {
        // The certified cutoff is out of reach; extrapolate the
        // alternating half-period contributions instead.
        let mut err = zero;
        let mut total = Kahan::new();
        for w in head_boundaries(first_zero).windows(2) {
            total.add(adaptive_simpson(&integrand, w[0], w[1], eps_quad / flt(64.0), &mut err));
        }
        let mut partials = Vec::with_capacity(256);
        partials.push(total.value());
        let mut z = first_zero;
        let mut previous = T::nan();
        for j in 0..2048usize {
            let next = z + half_period;
            total.add(adaptive_simpson(&integrand, z, next, eps_quad / flt(1024.0), &mut err));
            z = next;
            partials.push(total.value());
            if j >= 12 && j % 4 == 0 {
                let window = &partials[partials.len().saturating_sub(16)..];
                let limit = aitken_limit(window);
                if previous.is_finite() && (limit - previous).abs() <= eps_tail {
                    return Ok(limit * norm);
                }
                previous = limit;
            }
        }
        let estimate = if previous.is_finite() {
            (previous - *partials.last().unwrap()).abs() * norm
        } else {
            T::infinity()
        };
        Err(NumericsError::QuadratureTolerance { estimate })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (diff {})", (a - b).abs());
    }

    #[test]
    fn zeta_closed_forms() {
        let z2 = riemann_zeta(2.0).unwrap();
        close(z2, PI * PI / 6.0, 1e-13);
        let z4 = riemann_zeta(4.0).unwrap();
        close(z4, PI.powi(4) / 90.0, 1e-13);
        close(riemann_zeta(3.0).unwrap(), 1.2020569031595943, 1e-13);
        close(riemann_zeta(1.5).unwrap(), 2.6123753486854883, 1e-12);
    }

    #[test]
    fn zeta_against_direct_summation() {
        // Independent oracle: plain truncated series plus the integral and
        // half-term corrections, no Bernoulli machinery involved.
        for s in [1.5f64, 3.0] {
            let n = 5_000_000u64;
            let mut acc = Kahan::<f64>::new();
            for m in 1..n {
                acc.add((m as f64).powf(-s));
            }
            let nf = n as f64;
            let direct = acc.value() + nf.powf(1.0 - s) / (s - 1.0) + nf.powf(-s) / 2.0;
            close(riemann_zeta(s).unwrap(), direct, 1e-12);
        }
    }

    #[test]
    fn zeta_near_one_and_large() {
        // Reference values from 30-digit arithmetic.
        let z = riemann_zeta(1.0000001).unwrap();
        assert!((z / 10_000_000.577_215_672_f64 - 1.0).abs() < 1e-9);
        close(riemann_zeta(50.0).unwrap(), 1.0 + 2f64.powi(-50), 1e-15);
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(0.5).is_err());
    }

    #[test]
    fn eta_values() {
        close(dirichlet_eta(1.0).unwrap(), std::f64::consts::LN_2, 1e-13);
        close(dirichlet_eta(2.0).unwrap(), PI * PI / 12.0, 1e-13);
        close(dirichlet_eta(3.0).unwrap(), 0.9015426773696957, 1e-13);
        close(dirichlet_eta(0.5).unwrap(), 0.6048986434216304, 1e-13);
        assert!(dirichlet_eta(0.0).is_err());
        assert!(dirichlet_eta(-1.0).is_err());
    }

    #[test]
    fn eta_functional_equation() {
        for s in [1.5f64, 2.0, 3.0, 5.0] {
            let lhs = dirichlet_eta(s).unwrap();
            let rhs = (1.0 - 2f64.powf(1.0 - s)) * riemann_zeta(s).unwrap();
            close(lhs, rhs, 1e-12 * lhs.abs());
        }
    }

    #[test]
    fn eta_two_paths_agree_above_one() {
        // The accelerated series is not restricted to s <= 1; compare it
        // against the functional-equation path on (1, 2].
        for s in [1.2f64, 1.5, 2.0] {
            let a = eta_by_acceleration(s);
            let b = dirichlet_eta(s).unwrap();
            close(a, b, 1e-13);
        }
    }

    #[test]
    fn eta_continuous_at_one() {
        let at = dirichlet_eta(1.0).unwrap();
        let above = dirichlet_eta(1.0 + 1e-9).unwrap();
        let below = dirichlet_eta(1.0 - 1e-9).unwrap();
        close(above, at, 1e-8);
        close(below, at, 1e-8);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let tol = Tolerance::abs(1e-12);
        let r = bisect_root(|x: f64| x * x - 2.0, 1.0, 2.0, &tol).unwrap();
        close(r, 2f64.sqrt(), 1e-11);
    }

    #[test]
    fn bisection_endpoint_roots_and_errors() {
        let tol = Tolerance::default();
        assert_eq!(bisect_root(|x: f64| x, 0.0, 1.0, &tol).unwrap(), 0.0);
        assert!(matches!(
            bisect_root(|x: f64| x * x + 1.0, -1.0, 1.0, &tol),
            Err(NumericsError::NoSignChange { .. })
        ));
        assert!(bisect_root(|x: f64| x, 1.0, 0.0, &tol).is_err());
    }

    #[test]
    fn second_difference_of_cubic_is_exact() {
        let got = second_difference(|x: f64| x * x * x, 2.0, 1e-4);
        close(got, 12.0, 1e-6);
    }

    #[test]
    fn transform_of_gaussian_matches_closed_form() {
        // f(x) = exp(-x^2/2), fhat(k) = exp(-k^2/2) in this convention.
        let cert = DecayCertificate {
            magnitude: 4f64.powi(8) * (-8f64).exp(),
            exponent: 7.0,
            onset: 4.0,
        };
        let tol = Tolerance::abs(1e-10);
        for k in [0.0f64, 0.5, 1.0, 2.0, 5.0] {
            let got = cosine_transform(|x: f64| (-x * x / 2.0).exp(), &cert, k, &tol).unwrap();
            close(got, (-k * k / 2.0).exp(), 1e-9);
        }
    }

    #[test]
    fn transform_of_exponential_matches_closed_form() {
        // f(x) = exp(-|x|), fhat(k) = sqrt(2/pi) / (1 + k^2).
        let cert = DecayCertificate {
            magnitude: 5f64.powi(5) * (-5f64).exp(),
            exponent: 4.0,
            onset: 5.0,
        };
        let tol = Tolerance::abs(1e-10);
        for k in [0.0f64, 0.5, 1.0, 2.0, 5.0] {
            let got = cosine_transform(|x: f64| (-x).exp(), &cert, k, &tol).unwrap();
            let want = (2.0 / PI).sqrt() / (1.0 + k * k);
            close(got, want, 1e-9);
        }
    }

    #[test]
    fn transform_extrapolates_when_cutoff_is_unaffordable() {
        // Same exponential, but certified only with a nearly useless decay
        // exponent: the certified cutoff explodes and the alternating
        // extrapolation path must take over.
        let cert = DecayCertificate {
            magnitude: 5f64.powf(1.05) * (-5f64).exp(),
            exponent: 0.05,
            onset: 5.0,
        };
        let tol = Tolerance::abs(1e-10);
        for k in [0.5f64, 1.0, 3.0] {
            let got = cosine_transform(|x: f64| (-x).exp(), &cert, k, &tol).unwrap();
            let want = (2.0 / PI).sqrt() / (1.0 + k * k);
            close(got, want, 1e-8);
        }
    }

    #[test]
    fn transform_rejects_uncertified_tails() {
        let cert = DecayCertificate {
            magnitude: 1.0,
            exponent: 0.0,
            onset: 1.0,
        };
        let tol = Tolerance::default();
        assert!(matches!(
            cosine_transform(|x: f64| (-x).exp(), &cert, 1.0, &tol),
            Err(NumericsError::NotIntegrable { .. })
        ));
    }

    #[test]
    fn combined_certificate_is_conservative() {
        let a = DecayCertificate {
            magnitude: 2.0,
            exponent: 3.0,
            onset: 0.5,
        };
        let b = DecayCertificate {
            magnitude: 1.0,
            exponent: 1.5,
            onset: 2.0,
        };
        let c = DecayCertificate::combine(&[a, b]);
        assert_eq!(c.magnitude, 3.0);
        assert_eq!(c.exponent, 1.5);
        assert_eq!(c.onset, 2.0);
    }

    #[test]
    fn hurwitz_tail_matches_reference() {
        // zeta(3, 9.3) from 30-digit arithmetic.
        close(hurwitz_tail(3.0, 9.3), 0.006435922471861777, 1e-16);
        close(hurwitz_tail(2.0, 1.0), PI * PI / 6.0, 1e-14);
    }
}
