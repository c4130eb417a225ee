//! Mirror-symmetric pair potentials, the species interaction table and
//! its split into convex parts.
//!
//! Every registered kind knows its derivatives in closed form and
//! reports certified far-field bounds for the value and the first two
//! derivatives; the energy and criteria layers lean on those
//! certificates for all truncation arguments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::DecayCertificate;
use crate::{flt, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError<T: Scalar> {
    #[error("potential is singular at x = 0")]
    SingularPoint,
    #[error("derivative order {0} not supported (use 0, 1 or 2)")]
    InvalidOrder(u8),
    #[error("invalid parameter: {0} (got {1})")]
    InvalidParameter(&'static str, T),
    #[error("no convex split: {0}")]
    NoConvexSplit(&'static str),
    #[error("series diverges: power-law part needs p > 1")]
    DivergentSeries,
}

/// Pair potential `f(x) = f(|x|)`.
///
/// The Morse well is written with an explicit equilibrium radius:
/// `D (e^{2a(r_e-|x|)} - 2 e^{a(r_e-|x|)})`, which is finite at the
/// origin but keeps the mirror kink there, so its derivatives are only
/// defined away from 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential<T = f64> {
    /// `c |x|^-p`, `p > 0`.
    PowerLaw { c: T, p: T },
    /// `c exp(-x^2 / (2 w^2))`, `w > 0`.
    Gaussian { c: T, w: T },
    /// `D (e^{2a(r_e-|x|)} - 2 e^{a(r_e-|x|)})`, `a > 0`, `r_e >= 0`.
    Morse {
        #[serde(rename = "D")]
        d: T,
        a: T,
        r_e: T,
    },
    Zero,
}

impl<T: Scalar> Potential<T> {
    pub fn validate(&self) -> Result<(), PotentialError<T>> {
        let zero = T::zero();
        match *self {
            Potential::PowerLaw { c, p } => {
                if !(p > zero) || !p.is_finite() {
                    return Err(PotentialError::InvalidParameter("power-law exponent must be > 0", p));
                }
                if !c.is_finite() {
                    return Err(PotentialError::InvalidParameter("power-law coefficient must be finite", c));
                }
            }
            Potential::Gaussian { c, w } => {
                if !(w > zero) || !w.is_finite() {
                    return Err(PotentialError::InvalidParameter("gaussian width must be > 0", w));
                }
                if !c.is_finite() {
                    return Err(PotentialError::InvalidParameter("gaussian coefficient must be finite", c));
                }
            }
            Potential::Morse { d, a, r_e } => {
                if !(a > zero) || !a.is_finite() {
                    return Err(PotentialError::InvalidParameter("morse stiffness must be > 0", a));
                }
                if !(r_e >= zero) || !r_e.is_finite() {
                    return Err(PotentialError::InvalidParameter("morse equilibrium must be >= 0", r_e));
                }
                if !d.is_finite() {
                    return Err(PotentialError::InvalidParameter("morse depth must be finite", d));
                }
            }
            Potential::Zero => {}
        }
        Ok(())
    }

    /// Value (`order = 0`) or derivative (`order = 1, 2`) at `x`.
    ///
    /// `x` is signed; odd derivative orders carry the mirror sign. Kinds
    /// that are singular or kinked at the origin reject `x = 0` there.
    pub fn eval(&self, x: T, order: u8) -> Result<T, PotentialError<T>> {
        self.validate()?;
        let zero = T::zero();
        let one = T::one();
        let two = flt::<T>(2.0);
        match *self {
            Potential::Zero => match order {
                0..=2 => Ok(zero),
                _ => Err(PotentialError::InvalidOrder(order)),
            },
            Potential::PowerLaw { c, p } => {
                if x == zero {
                    return Err(PotentialError::SingularPoint);
                }
                let r = x.abs();
                match order {
                    0 => Ok(c * r.powf(-p)),
                    1 => Ok(-c * p * r.powf(-p - one) * x.signum()),
                    2 => Ok(c * p * (p + one) * r.powf(-p - two)),
                    _ => Err(PotentialError::InvalidOrder(order)),
                }
            }
            Potential::Gaussian { c, w } => {
                let w2 = w * w;
                let g = c * (-x * x / (two * w2)).exp();
                match order {
                    0 => Ok(g),
                    1 => Ok(-x / w2 * g),
                    2 => Ok((x * x / (w2 * w2) - one / w2) * g),
                    _ => Err(PotentialError::InvalidOrder(order)),
                }
            }
            Potential::Morse { d, a, r_e } => {
                if x == zero && order > 0 {
                    // |x| kinks the mirror image at the origin.
                    return Err(PotentialError::SingularPoint);
                }
                let r = x.abs();
                let u = (a * (r_e - r)).exp();
                match order {
                    0 => Ok(d * (u * u - two * u)),
                    1 => Ok(-two * a * d * u * (u - one) * x.signum()),
                    2 => Ok(two * a * a * d * u * (two * u - one)),
                    _ => Err(PotentialError::InvalidOrder(order)),
                }
            }
        }
    }

    /// Certified far-field bound on the value, when one exists.
    ///
    /// Power laws with `p <= 1` have none (the tail is not summable);
    /// everything else decays at least like `|x|^-5`.
    pub fn decay(&self) -> Option<DecayCertificate<T>> {
        let zero = T::zero();
        let one = T::one();
        match *self {
            Potential::Zero => Some(DecayCertificate {
                magnitude: zero,
                exponent: one,
                onset: zero,
            }),
            Potential::PowerLaw { c, p } => {
                if p > one {
                    Some(DecayCertificate {
                        magnitude: c.abs(),
                        exponent: p - one,
                        onset: zero,
                    })
                } else {
                    None
                }
            }
            Potential::Gaussian { c, w } => {
                // sup of x^8 e^{-x^2/2w^2} over x >= 4w sits at the onset.
                let onset = flt::<T>(4.0) * w;
                Some(DecayCertificate {
                    magnitude: c.abs() * onset.powi(8) * flt((-8f64).exp()),
                    exponent: flt(7.0),
                    onset,
                })
            }
            Potential::Morse { d, a, r_e } => {
                // |f| <= 2|D| e^{a(r_e - x)} once x >= r_e.
                let onset = r_e + flt::<T>(5.0) / a;
                Some(DecayCertificate {
                    magnitude: flt::<T>(2.0) * d.abs() * onset.powi(5) * flt((-5f64).exp()),
                    exponent: flt(4.0),
                    onset,
                })
            }
        }
    }

    /// Far-field bound on the first derivative.
    pub fn derivative_decay(&self) -> Option<DecayCertificate<T>> {
        let zero = T::zero();
        match *self {
            Potential::Zero => Some(DecayCertificate {
                magnitude: zero,
                exponent: T::one(),
                onset: zero,
            }),
            Potential::PowerLaw { c, p } => Some(DecayCertificate {
                magnitude: c.abs() * p,
                exponent: p,
                onset: zero,
            }),
            Potential::Gaussian { c, w } => {
                let onset = flt::<T>(4.0) * w;
                Some(DecayCertificate {
                    magnitude: c.abs() / (w * w) * onset.powi(9) * flt((-8f64).exp()),
                    exponent: flt(7.0),
                    onset,
                })
            }
            Potential::Morse { d, a, r_e } => {
                let onset = r_e + flt::<T>(5.0) / a;
                Some(DecayCertificate {
                    magnitude: flt::<T>(4.0) * a * d.abs() * onset.powi(5) * flt((-5f64).exp()),
                    exponent: flt(4.0),
                    onset,
                })
            }
        }
    }

    /// Far-field bound on the second derivative.
    pub fn second_derivative_decay(&self) -> Option<DecayCertificate<T>> {
        let zero = T::zero();
        let one = T::one();
        match *self {
            Potential::Zero => Some(DecayCertificate {
                magnitude: zero,
                exponent: one,
                onset: zero,
            }),
            Potential::PowerLaw { c, p } => Some(DecayCertificate {
                magnitude: c.abs() * p * (p + one),
                exponent: p + one,
                onset: zero,
            }),
            Potential::Gaussian { c, w } => {
                let onset = flt::<T>(4.0) * w;
                let w2 = w * w;
                Some(DecayCertificate {
                    magnitude: c.abs() / (w2 * w2) * onset.powi(10) * flt((-8f64).exp()),
                    exponent: flt(7.0),
                    onset,
                })
            }
            Potential::Morse { d, a, r_e } => {
                let onset = r_e + flt::<T>(5.0) / a;
                Some(DecayCertificate {
                    magnitude: flt::<T>(6.0) * a * a * d.abs() * onset.powi(5) * flt((-5f64).exp()),
                    exponent: flt(4.0),
                    onset,
                })
            }
        }
    }

    /// Bounded at the origin and absolutely integrable over the line.
    pub fn is_integrable(&self) -> bool {
        !matches!(self, Potential::PowerLaw { .. })
    }

    /// Same shape, coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Potential<T> {
        match *self {
            Potential::PowerLaw { c, p } => Potential::PowerLaw { c: c * factor, p },
            Potential::Gaussian { c, w } => Potential::Gaussian { c: c * factor, w },
            Potential::Morse { d, a, r_e } => Potential::Morse { d: d * factor, a, r_e },
            Potential::Zero => Potential::Zero,
        }
    }
}

/// Interaction table of an alternating two-species chain: `f12` couples
/// unlike species, `f11`/`f22` couple like species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialTriple<T = f64> {
    pub f12: Potential<T>,
    pub f11: Potential<T>,
    pub f22: Potential<T>,
}

impl<T: Scalar> PotentialTriple<T> {
    /// Unlike species repel, like species attract, all with the same
    /// power-law profile `|x|^-p`.
    pub fn riesz(p: T) -> Result<Self, PotentialError<T>> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(PotentialError::InvalidParameter("riesz exponent must be > 0", p));
        }
        let one = T::one();
        Ok(PotentialTriple {
            f12: Potential::PowerLaw { c: one, p },
            f11: Potential::PowerLaw { c: -one, p },
            f22: Potential::PowerLaw { c: -one, p },
        })
    }

    /// Power-law table with coupling strength `m`: `f12 = m |x|^-p`,
    /// `f11 = -|x|^-p`, `f22 = -m^2 |x|^-p`.
    ///
    /// Requires `p > 1`: this table is not sign-neutral, so for smaller
    /// exponents the chain energy is conditionally divergent and the
    /// model is rejected outright.
    pub fn power_law(p: T, m: T) -> Result<Self, PotentialError<T>> {
        if !(p > T::one()) || !p.is_finite() {
            return Err(PotentialError::InvalidParameter(
                "non-neutral power-law triple needs p > 1",
                p,
            ));
        }
        if !(m > T::zero()) || !m.is_finite() {
            return Err(PotentialError::InvalidParameter("coupling strength must be > 0", m));
        }
        let one = T::one();
        Ok(PotentialTriple {
            f12: Potential::PowerLaw { c: m, p },
            f11: Potential::PowerLaw { c: -one, p },
            f22: Potential::PowerLaw { c: -m * m, p },
        })
    }

    /// The same table under the opposite sign convention.
    pub fn negate(&self) -> Self {
        let minus = -T::one();
        PotentialTriple {
            f12: self.f12.scaled(minus),
            f11: self.f11.scaled(minus),
            f22: self.f22.scaled(minus),
        }
    }

    pub fn validate(&self) -> Result<(), PotentialError<T>> {
        self.f12.validate()?;
        self.f11.validate()?;
        self.f22.validate()
    }

    /// All components bounded at the origin and absolutely integrable.
    pub fn is_integrable(&self) -> bool {
        self.f12.is_integrable() && self.f11.is_integrable() && self.f22.is_integrable()
    }

    /// Components in a fixed labelled order.
    pub fn labelled(&self) -> [(&'static str, &Potential<T>); 3] {
        [("f12", &self.f12), ("f11", &self.f11), ("f22", &self.f22)]
    }
}

/// One convex summand on `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexPart<T = f64> {
    Zero,
    /// `c r^-p` with `c >= 0`.
    PowerLaw { c: T, p: T },
    /// `amplitude e^{-rate r}` with nonnegative amplitude, positive rate.
    Exponential { amplitude: T, rate: T },
}

impl<T: Scalar> ConvexPart<T> {
    pub fn value(&self, r: T) -> T {
        match *self {
            ConvexPart::Zero => T::zero(),
            ConvexPart::PowerLaw { c, p } => c * r.powf(-p),
            ConvexPart::Exponential { amplitude, rate } => amplitude * (-rate * r).exp(),
        }
    }

    /// Far-field bound; `None` for power laws too slow to sum.
    pub fn decay(&self) -> Option<DecayCertificate<T>> {
        let zero = T::zero();
        let one = T::one();
        match *self {
            ConvexPart::Zero => Some(DecayCertificate {
                magnitude: zero,
                exponent: one,
                onset: zero,
            }),
            ConvexPart::PowerLaw { c, p } => {
                if p > one {
                    Some(DecayCertificate {
                        magnitude: c.abs(),
                        exponent: p - one,
                        onset: zero,
                    })
                } else {
                    None
                }
            }
            ConvexPart::Exponential { amplitude, rate } => {
                let onset = flt::<T>(5.0) / rate;
                Some(DecayCertificate {
                    magnitude: amplitude.abs() * onset.powi(5) * flt((-5f64).exp()),
                    exponent: flt(4.0),
                    onset,
                })
            }
        }
    }

    /// `sum_{k>=1} part(2 k r)` in closed form.
    pub fn sum_even_multiples(&self, r: T) -> Result<T, PotentialError<T>> {
        let one = T::one();
        let two = flt::<T>(2.0);
        match *self {
            ConvexPart::Zero => Ok(T::zero()),
            ConvexPart::PowerLaw { c, p } => {
                if !(p > one) {
                    return Err(PotentialError::DivergentSeries);
                }
                let zeta = crate::numerics::riemann_zeta(p).expect("p > 1 checked");
                Ok(c * (two * r).powf(-p) * zeta)
            }
            ConvexPart::Exponential { amplitude, rate } => {
                // geometric series starting at e^{-2 rate r}
                let q = (-two * rate * r).exp();
                Ok(amplitude * q / (one - q))
            }
        }
    }

    /// `sum_{k>=1} part((2k - 1) r)` in closed form.
    pub fn sum_odd_multiples(&self, r: T) -> Result<T, PotentialError<T>> {
        let one = T::one();
        let two = flt::<T>(2.0);
        match *self {
            ConvexPart::Zero => Ok(T::zero()),
            ConvexPart::PowerLaw { c, p } => {
                if !(p > one) {
                    return Err(PotentialError::DivergentSeries);
                }
                let zeta = crate::numerics::riemann_zeta(p).expect("p > 1 checked");
                Ok(c * r.powf(-p) * (one - two.powf(-p)) * zeta)
            }
            ConvexPart::Exponential { amplitude, rate } => {
                let q = (-rate * r).exp();
                Ok(amplitude * q / (one - q * q))
            }
        }
    }
}

/// Split of one pair potential as `plus(|x|) - minus(|x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDecomposition<T = f64> {
    pub plus: ConvexPart<T>,
    pub minus: ConvexPart<T>,
}

impl<T: Scalar> PairDecomposition<T> {
    pub fn value(&self, r: T) -> T {
        self.plus.value(r) - self.minus.value(r)
    }
}

/// Convex splits of all three pair potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexDecomposition<T = f64> {
    pub f12: PairDecomposition<T>,
    pub f11: PairDecomposition<T>,
    pub f22: PairDecomposition<T>,
}

impl<T: Scalar> ConvexDecomposition<T> {
    /// All six parts with pair and side labels, in a fixed order.
    pub fn labelled_parts(&self) -> [(&'static str, &'static str, &ConvexPart<T>); 6] {
        [
            ("f12", "plus", &self.f12.plus),
            ("f12", "minus", &self.f12.minus),
            ("f11", "plus", &self.f11.plus),
            ("f11", "minus", &self.f11.minus),
            ("f22", "plus", &self.f22.plus),
            ("f22", "minus", &self.f22.minus),
        ]
    }
}

fn split_component<T: Scalar>(p: &Potential<T>) -> Result<PairDecomposition<T>, PotentialError<T>> {
    let zero = T::zero();
    let two = flt::<T>(2.0);
    Ok(match *p {
        Potential::Zero => PairDecomposition {
            plus: ConvexPart::Zero,
            minus: ConvexPart::Zero,
        },
        Potential::PowerLaw { c, p } => {
            if c == zero {
                PairDecomposition {
                    plus: ConvexPart::Zero,
                    minus: ConvexPart::Zero,
                }
            } else if c > zero {
                PairDecomposition {
                    plus: ConvexPart::PowerLaw { c, p },
                    minus: ConvexPart::Zero,
                }
            } else {
                PairDecomposition {
                    plus: ConvexPart::Zero,
                    minus: ConvexPart::PowerLaw { c: -c, p },
                }
            }
        }
        Potential::Morse { d, a, r_e } => {
            // D (u^2 - 2u) with u = e^{a(r_e - r)}: both summands are
            // positive multiples of decaying exponentials in r.
            let repulsive = ConvexPart::Exponential {
                amplitude: d.abs() * (two * a * r_e).exp(),
                rate: two * a,
            };
            let attractive = ConvexPart::Exponential {
                amplitude: two * d.abs() * (a * r_e).exp(),
                rate: a,
            };
            if d == zero {
                PairDecomposition {
                    plus: ConvexPart::Zero,
                    minus: ConvexPart::Zero,
                }
            } else if d > zero {
                PairDecomposition {
                    plus: repulsive,
                    minus: attractive,
                }
            } else {
                PairDecomposition {
                    plus: attractive,
                    minus: repulsive,
                }
            }
        }
        Potential::Gaussian { .. } => {
            return Err(PotentialError::NoConvexSplit(
                "a gaussian component has no split into the registered convex parts \
                 (it is concave inside its inflection radius)",
            ))
        }
    })
}

/// Splits every component of the table as `plus - minus` with both parts
/// convex and decreasing on `(0, inf)`.
pub fn decompose<T: Scalar>(
    triple: &PotentialTriple<T>,
) -> Result<ConvexDecomposition<T>, PotentialError<T>> {
    triple.validate()?;
    Ok(ConvexDecomposition {
        f12: split_component(&triple.f12)?,
        f11: split_component(&triple.f11)?,
        f22: split_component(&triple.f22)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (diff {})", (a - b).abs());
    }

    #[test]
    fn power_law_values_and_derivatives() {
        let f = Potential::PowerLaw { c: 1.0, p: 3.0 };
        assert_eq!(f.eval(2.0, 0).unwrap(), 0.125);
        assert_eq!(f.eval(2.0, 1).unwrap(), -0.1875);
        assert_eq!(f.eval(2.0, 2).unwrap(), 0.375);
        assert!(matches!(f.eval(0.0, 0), Err(PotentialError::SingularPoint)));
        assert!(matches!(f.eval(1.0, 3), Err(PotentialError::InvalidOrder(3))));
    }

    #[test]
    fn gaussian_and_morse_at_reference_points() {
        let g = Potential::Gaussian { c: 1.0, w: 1.0 };
        assert_eq!(g.eval(0.0, 0).unwrap(), 1.0);
        assert_eq!(g.eval(0.0, 1).unwrap(), 0.0);
        let m = Potential::Morse { d: 1.0, a: 1.0, r_e: 1.0 };
        close(m.eval(1.0, 0).unwrap(), -1.0, 1e-15);
        // kinked at the origin
        assert!(m.eval(0.0, 0).is_ok());
        assert!(matches!(m.eval(0.0, 1), Err(PotentialError::SingularPoint)));
    }

    #[test]
    fn mirror_symmetry_is_exact() {
        let kinds: [Potential<f64>; 3] = [
            Potential::PowerLaw { c: 2.0, p: 1.5 },
            Potential::Gaussian { c: -1.0, w: 0.7 },
            Potential::Morse { d: 1.3, a: 2.0, r_e: 1.1 },
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x: f64 = rng.random_range(0.1..10.0);
            for f in &kinds {
                assert_eq!(f.eval(x, 0).unwrap(), f.eval(-x, 0).unwrap());
                assert_eq!(f.eval(x, 1).unwrap(), -f.eval(-x, 1).unwrap());
                assert_eq!(f.eval(x, 2).unwrap(), f.eval(-x, 2).unwrap());
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let kinds: [Potential<f64>; 3] = [
            Potential::PowerLaw { c: 1.0, p: 2.0 },
            Potential::Gaussian { c: 1.0, w: 1.0 },
            Potential::Morse { d: 1.0, a: 1.0, r_e: 1.0 },
        ];
        let h = 1e-5;
        for f in &kinds {
            for x in [0.5f64, 1.0, 2.0, 5.0] {
                let v = |y: f64| f.eval(y, 0).unwrap();
                let d1 = (v(x + h) - v(x - h)) / (2.0 * h);
                let d2 = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
                let a1 = f.eval(x, 1).unwrap();
                let a2 = f.eval(x, 2).unwrap();
                assert!((a1 - d1).abs() <= 1e-6 * a1.abs().max(1.0), "{f:?} order 1 at {x}");
                assert!((a2 - d2).abs() <= 1e-5 * a2.abs().max(1.0), "{f:?} order 2 at {x}");
            }
        }
    }

    #[test]
    fn decay_certificates_are_sound() {
        let kinds: [Potential<f64>; 4] = [
            Potential::PowerLaw { c: -3.0, p: 2.5 },
            Potential::Gaussian { c: 2.0, w: 1.3 },
            Potential::Morse { d: 0.8, a: 1.7, r_e: 0.9 },
            Potential::Zero,
        ];
        for f in &kinds {
            for (cert, order) in [
                (f.decay(), 0u8),
                (f.derivative_decay(), 1),
                (f.second_derivative_decay(), 2),
            ] {
                let cert = cert.expect("registered kinds all certify decay");
                let r0 = cert.onset.max(1.0);
                for x in [2.0 * r0, 10.0 * r0, 100.0 * r0] {
                    let v = f.eval(x, order).unwrap().abs();
                    let bound = cert.magnitude * x.powf(-1.0 - cert.exponent);
                    assert!(
                        v <= bound * (1.0 + 1e-12),
                        "{f:?} order {order} at {x}: {v} > {bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn slow_power_law_has_no_value_certificate() {
        let f: Potential<f64> = Potential::PowerLaw { c: 1.0, p: 1.0 };
        assert!(f.decay().is_none());
        assert!(f.second_derivative_decay().is_some());
    }

    #[test]
    fn riesz_and_power_law_tables() {
        let r: PotentialTriple<f64> = PotentialTriple::riesz(1.0).unwrap();
        assert_eq!(r.f12, Potential::PowerLaw { c: 1.0, p: 1.0 });
        assert_eq!(r.f11, Potential::PowerLaw { c: -1.0, p: 1.0 });
        assert!(PotentialTriple::<f64>::riesz(-0.5).is_err());

        let t: PotentialTriple<f64> = PotentialTriple::power_law(3.0, 2.0).unwrap();
        assert_eq!(t.f12, Potential::PowerLaw { c: 2.0, p: 3.0 });
        assert_eq!(t.f22, Potential::PowerLaw { c: -4.0, p: 3.0 });
        assert!(PotentialTriple::<f64>::power_law(1.0, 1.0).is_err());
        assert!(PotentialTriple::<f64>::power_law(3.0, -1.0).is_err());

        let n = t.negate();
        assert_eq!(n.f12, Potential::PowerLaw { c: -2.0, p: 3.0 });
        assert_eq!(n.f22, Potential::PowerLaw { c: 4.0, p: 3.0 });
    }

    #[test]
    fn morse_split_matches_registered_form() {
        let triple = PotentialTriple {
            f12: Potential::Morse { d: 1.0, a: 1.0, r_e: 1.0 },
            f11: Potential::Zero,
            f22: Potential::PowerLaw { c: -1.0, p: 2.0 },
        };
        let d = decompose(&triple).unwrap();
        match d.f12.plus {
            ConvexPart::Exponential { amplitude, rate } => {
                close(amplitude, (2f64).exp(), 1e-15);
                assert_eq!(rate, 2.0);
            }
            other => panic!("unexpected plus part {other:?}"),
        }
        match d.f12.minus {
            ConvexPart::Exponential { amplitude, rate } => {
                close(amplitude, 2.0 * (1f64).exp(), 1e-15);
                assert_eq!(rate, 1.0);
            }
            other => panic!("unexpected minus part {other:?}"),
        }
        assert_eq!(d.f11.plus, ConvexPart::Zero);
        assert_eq!(d.f22.minus, ConvexPart::PowerLaw { c: 1.0, p: 2.0 });
        assert_eq!(d.f22.plus, ConvexPart::Zero);
    }

    #[test]
    fn gaussian_refuses_to_split() {
        let triple = PotentialTriple {
            f12: Potential::Gaussian { c: 1.0, w: 1.0 },
            f11: Potential::Zero,
            f22: Potential::Zero,
        };
        assert!(matches!(
            decompose(&triple),
            Err(PotentialError::NoConvexSplit(_))
        ));
    }

    #[test]
    fn split_reassembles_to_the_potential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f: Potential<f64> = if rng.random_bool(0.5) {
                Potential::PowerLaw {
                    c: rng.random_range(-3.0..3.0),
                    p: rng.random_range(0.5..4.0),
                }
            } else {
                Potential::Morse {
                    d: rng.random_range(-2.0..2.0),
                    a: rng.random_range(0.5..3.0),
                    r_e: rng.random_range(0.0..2.0),
                }
            };
            let split = split_component(&f).unwrap();
            for i in 1..40 {
                let x = 0.25 * i as f64;
                let direct = f.eval(x, 0).unwrap();
                let re = split.value(x.abs());
                assert!(
                    (direct - re).abs() <= 1e-12 * direct.abs().max(1.0),
                    "{f:?} at {x}: {direct} vs {re}"
                );
            }
        }
    }

    #[test]
    fn part_lattice_sums_match_truncated_series() {
        let parts: [ConvexPart<f64>; 2] = [
            ConvexPart::PowerLaw { c: 1.5, p: 2.5 },
            ConvexPart::Exponential { amplitude: 2.0, rate: 1.3 },
        ];
        for part in &parts {
            for r in [0.5f64, 1.0, 2.0] {
                let mut even = 0.0;
                let mut odd = 0.0;
                for k in 1..400_000u64 {
                    even += part.value(2.0 * k as f64 * r);
                    odd += part.value((2.0 * k as f64 - 1.0) * r);
                }
                close(part.sum_even_multiples(r).unwrap(), even, 1e-6);
                close(part.sum_odd_multiples(r).unwrap(), odd, 1e-6);
            }
        }
    }

    #[test]
    fn slow_power_law_part_sums_diverge() {
        let part: ConvexPart<f64> = ConvexPart::PowerLaw { c: 1.0, p: 1.0 };
        assert!(matches!(
            part.sum_even_multiples(1.0),
            Err(PotentialError::DivergentSeries)
        ));
    }

    #[test]
    fn triple_json_schema_round_trips() {
        let text = r#"{
            "f12": {"kind": "powerlaw", "c": 1.0, "p": 3.0},
            "f11": {"kind": "powerlaw", "c": -1.0, "p": 3.0},
            "f22": {"kind": "powerlaw", "c": -1.0, "p": 3.0}
        }"#;
        let triple: PotentialTriple<f64> = serde_json::from_str(text).unwrap();
        assert_eq!(triple, PotentialTriple::riesz(3.0).unwrap());
        let back = serde_json::to_string(&triple).unwrap();
        let again: PotentialTriple<f64> = serde_json::from_str(&back).unwrap();
        assert_eq!(triple, again);

        let mixed = r#"{
            "f12": {"kind": "gaussian", "c": 1.0, "w": 1.0},
            "f11": {"kind": "morse", "D": 1.0, "a": 1.0, "r_e": 1.0},
            "f22": {"kind": "zero"}
        }"#;
        let t: PotentialTriple<f64> = serde_json::from_str(mixed).unwrap();
        assert_eq!(t.f22, Potential::Zero);
    }

    #[test]
    fn unknown_kind_is_rejected_by_name() {
        let text = r#"{
            "f12": {"kind": "lennardjones", "sigma": 1.0},
            "f11": {"kind": "zero"},
            "f22": {"kind": "zero"}
        }"#;
        let err = serde_json::from_str::<PotentialTriple<f64>>(text).unwrap_err();
        assert!(err.to_string().contains("lennardjones"), "{err}");
    }
}
