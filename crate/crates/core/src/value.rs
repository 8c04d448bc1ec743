//! Signed log-domain numbers and compensated summation.

use core::fmt;
use core::ops::{Mul, Neg};

/// Sign of a real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Beyond this log-magnitude `exp` leaves the normal f64 range, so sums switch
/// from real arithmetic to log-sum-exp.
const REAL_RANGE: f64 = 700.0;

/// A real number stored as `sign · exp(logmag)`.
///
/// Zero is represented by `Sign::Zero` together with `logmag = −∞`; no other
/// value uses that sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    sign: Sign,
    logmag: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: Sign::Zero,
        logmag: f64::NEG_INFINITY,
    };

    pub const ONE: SignedLogValue = SignedLogValue {
        sign: Sign::Positive,
        logmag: 0.0,
    };

    /// Builds a value from its parts. Returns `None` when the parts violate the
    /// zero-sentinel invariant or `logmag` is NaN / `+∞`.
    pub fn new(sign: Sign, logmag: f64) -> Option<Self> {
        match sign {
            Sign::Zero if logmag == f64::NEG_INFINITY => Some(Self::ZERO),
            Sign::Zero => None,
            _ if logmag.is_finite() => Some(SignedLogValue { sign, logmag }),
            _ => None,
        }
    }

    /// `sign · exp(logmag)` for a nonzero sign; `logmag` must be finite.
    pub fn from_parts(sign: Sign, logmag: f64) -> Self {
        debug_assert!(sign != Sign::Zero && logmag.is_finite());
        SignedLogValue { sign, logmag }
    }

    /// A positive value given by its natural log.
    pub fn from_log(logmag: f64) -> Self {
        Self::from_parts(Sign::Positive, logmag)
    }

    /// Converts a finite real. Non-finite input yields `None`.
    pub fn from_real(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::ZERO);
        }
        Some(SignedLogValue {
            sign: Sign::of(x),
            logmag: libm::log(libm::fabs(x)),
        })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Real value; overflows to `±∞` / underflows to `0` outside f64 range.
    pub fn to_real(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * libm::exp(self.logmag),
        }
    }

    pub fn abs(self) -> Self {
        match self.sign {
            Sign::Zero => self,
            _ => SignedLogValue {
                sign: Sign::Positive,
                logmag: self.logmag,
            },
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        SignedLogValue {
            sign: self.sign * rhs.sign,
            logmag: self.logmag + rhs.logmag,
        }
    }

    /// `None` when dividing by zero.
    pub fn div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::ZERO);
        }
        Some(SignedLogValue {
            sign: self.sign * rhs.sign,
            logmag: self.logmag - rhs.logmag,
        })
    }

    /// Sum of two values. Operands inside the normal f64 range are added as
    /// reals; larger ones go through log-sum-exp.
    pub fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if libm::fabs(self.logmag) < REAL_RANGE && libm::fabs(rhs.logmag) < REAL_RANGE {
            // Both finite and < e^700, so the sum cannot overflow.
            return Self::from_real(self.to_real() + rhs.to_real()).unwrap_or(Self::ZERO);
        }
        let (hi, lo) = if self.logmag >= rhs.logmag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = lo.logmag - hi.logmag;
        if hi.sign == lo.sign {
            SignedLogValue {
                sign: hi.sign,
                logmag: hi.logmag + libm::log1p(libm::exp(d)),
            }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                sign: hi.sign,
                logmag: hi.logmag + libm::log(-libm::expm1(d)),
            }
        }
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.add(-rhs)
    }
}

impl Neg for SignedLogValue {
    type Output = SignedLogValue;

    fn neg(self) -> SignedLogValue {
        SignedLogValue {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl fmt::Display for SignedLogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => f.write_str("0"),
            Sign::Positive => write!(f, "exp({})", self.logmag),
            Sign::Negative => write!(f, "-exp({})", self.logmag),
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one, keeping both compensations.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        s.extend(iter);
        s
    }
}
