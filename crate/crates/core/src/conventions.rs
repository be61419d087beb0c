use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{rat_int, Rational};

/// A global orientation sign, serialized as `1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_rational(self) -> Rational {
        rat_int(self.value())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(r: &Rational) -> Option<Sign> {
        use num_traits::Signed;
        if r.is_positive() {
            Some(Sign::Plus)
        } else if r.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// The two orientation choices the recursion depends on.
///
/// `sign_kernel` orients the recursion kernel (the direction of the
/// integration path between a point and its conjugate); `sign_psirec` is the
/// sign in the shifted-coordinate recursion between consecutive Ψ̂ forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conventions {
    pub sign_kernel: Sign,
    pub sign_psirec: Sign,
}

impl Conventions {
    pub fn new(sign_kernel: Sign, sign_psirec: Sign) -> Self {
        Conventions {
            sign_kernel,
            sign_psirec,
        }
    }
}

impl fmt::Display for Conventions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ_K={}, σ_Ψrec={}", self.sign_kernel, self.sign_psirec)
    }
}
