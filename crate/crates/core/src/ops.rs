//! Operation counting and kind-aware arithmetic.
//!
//! Every kernel computes through an [`Arith`], which performs the exact
//! operation on rationals, rounds once when the working kind is fixed, and
//! tallies what it did in an [`OpCounter`].

use std::fmt;
use std::ops::AddAssign;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{exact_sqrt, sqrt_rounded, Rational, Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
    pub sqrts: u64,
    /// Number of times an exact intermediate was rounded to the working spec.
    pub roundings: u64,
}

impl OpCounter {
    /// Arithmetic operations, excluding roundings.
    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs + self.sqrts
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.subs += rhs.subs;
        self.muls += rhs.muls;
        self.divs += rhs.divs;
        self.sqrts += rhs.sqrts;
        self.roundings += rhs.roundings;
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adds={} subs={} muls={} divs={} sqrts={} roundings={} total={}",
            self.adds,
            self.subs,
            self.muls,
            self.divs,
            self.sqrts,
            self.roundings,
            self.total()
        )
    }
}

/// Arithmetic context for one computation.
#[derive(Clone, Debug)]
pub struct Arith {
    kind: ScalarKind,
    counter: OpCounter,
}

impl Arith {
    pub fn new(kind: ScalarKind) -> Self {
        Self {
            kind,
            counter: OpCounter::default(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn counter(&self) -> OpCounter {
        self.counter
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self.kind)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self.kind)
    }

    /// Writes an exact intermediate down in the working kind.
    pub fn store(&mut self, q: Rational) -> Scalar {
        if let ScalarKind::Fixed(_) = self.kind {
            self.counter.roundings += 1;
        }
        Scalar::from_rational(q, self.kind)
    }

    pub fn add(&mut self, a: &Scalar, b: &Scalar) -> Scalar {
        self.counter.adds += 1;
        self.store(a.to_rational() + b.to_rational())
    }

    pub fn sub(&mut self, a: &Scalar, b: &Scalar) -> Scalar {
        self.counter.subs += 1;
        self.store(a.to_rational() - b.to_rational())
    }

    pub fn mul(&mut self, a: &Scalar, b: &Scalar) -> Scalar {
        self.counter.muls += 1;
        self.store(a.to_rational() * b.to_rational())
    }

    pub fn div(&mut self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.counter.divs += 1;
        Ok(self.store(a.to_rational() / b.to_rational()))
    }

    /// Sign change is free: it never needs rounding and was never counted by
    /// hand computers.
    pub fn neg(&self, a: &Scalar) -> Scalar {
        Scalar::from_rational(-a.to_rational(), self.kind)
    }

    /// Exact `seed + Σ a·b` before any rounding.
    fn accumulate<'a, I>(&mut self, seed: &Scalar, pairs: I, subtract: bool) -> Rational
    where
        I: IntoIterator<Item = (&'a Scalar, &'a Scalar)>,
    {
        let mut acc = seed.to_rational();
        for (a, b) in pairs {
            self.counter.muls += 1;
            let p = a.to_rational() * b.to_rational();
            if subtract {
                self.counter.subs += 1;
                acc -= p;
            } else {
                self.counter.adds += 1;
                acc += p;
            }
        }
        acc
    }

    /// Column sum of already-written values, rounded once.
    pub fn sum<'a, I>(&mut self, items: I) -> Scalar
    where
        I: IntoIterator<Item = &'a Scalar>,
    {
        let mut acc = Rational::zero();
        for (i, v) in items.into_iter().enumerate() {
            if i > 0 {
                self.counter.adds += 1;
            }
            acc += v.to_rational();
        }
        self.store(acc)
    }

    /// `seed + Σ a·b`, accumulated exactly and rounded once.
    pub fn dot<'a, I>(&mut self, seed: &Scalar, pairs: I) -> Scalar
    where
        I: IntoIterator<Item = (&'a Scalar, &'a Scalar)>,
    {
        let q = self.accumulate(seed, pairs, false);
        self.store(q)
    }

    /// `seed − Σ a·b`, accumulated exactly and rounded once.
    pub fn dot_sub<'a, I>(&mut self, seed: &Scalar, pairs: I) -> Scalar
    where
        I: IntoIterator<Item = (&'a Scalar, &'a Scalar)>,
    {
        let q = self.accumulate(seed, pairs, true);
        self.store(q)
    }

    /// `(seed − Σ a·b) / divisor` as one continuous machine operation: a
    /// single rounding at the end.
    pub fn dot_sub_div<'a, I>(&mut self, seed: &Scalar, pairs: I, divisor: &Scalar) -> Result<Scalar>
    where
        I: IntoIterator<Item = (&'a Scalar, &'a Scalar)>,
    {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let q = self.accumulate(seed, pairs, true);
        self.counter.divs += 1;
        Ok(self.store(q / divisor.to_rational()))
    }

    /// Square root. Exact kind succeeds only on perfect squares.
    pub fn sqrt(&mut self, x: &Scalar, step: usize) -> Result<Scalar> {
        let q = x.to_rational();
        if q.is_negative() || q.is_zero() {
            return Err(Error::NotPositiveDefinite { step });
        }
        self.counter.sqrts += 1;
        match self.kind {
            ScalarKind::Exact => exact_sqrt(&q)
                .map(Scalar::Exact)
                .ok_or(Error::IrrationalRoot { step }),
            ScalarKind::Fixed(spec) => {
                self.counter.roundings += 1;
                Ok(Scalar::Fixed(sqrt_rounded(&q, spec)?))
            }
        }
    }

    /// Whether `x` cannot serve as a divisor: zero in exact arithmetic, or
    /// smaller than one unit in the last place of the working spec.
    pub fn is_negligible(&self, x: &Scalar) -> bool {
        match self.kind {
            ScalarKind::Exact => x.is_zero(),
            ScalarKind::Fixed(spec) => {
                let q = x.to_rational();
                q.is_zero() || q.abs() < spec.ulp(&q)
            }
        }
    }
}
