//! The closed registry of integrand functions `f`.
//!
//! Every registered function is bounded and globally Hölder,
//! `|f(x) - f(y)| <= K |x - y|^a`; the certificate is checked numerically
//! when a [`FunctionalF`] is constructed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CERTIFICATE_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FunctionalTag {
    Constant(f64),
    Sine,
    Cosine,
    /// `x` clamped to `[-C, C]`.
    ClampedIdentity(f64),
    /// `1 / (1 + x²)`.
    ReciprocalQuadratic,
}

impl fmt::Display for FunctionalTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::Sine => f.write_str("sine"),
            Self::Cosine => f.write_str("cosine"),
            Self::ClampedIdentity(c) => write!(f, "clamped_identity:{c}"),
            Self::ReciprocalQuadratic => f.write_str("reciprocal_quadratic"),
        }
    }
}

impl FromStr for FunctionalTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        let parse_arg = |arg: Option<&str>| -> Result<f64> {
            arg.ok_or_else(|| {
                Error::Config(format!(
                    "functional `{name}` needs a parameter, e.g. `{name}:1`"
                ))
            })?
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad parameter for `{name}`: {e}")))
        };
        match (name, arg) {
            ("sine", None) => Ok(Self::Sine),
            ("cosine", None) => Ok(Self::Cosine),
            ("reciprocal_quadratic", None) => Ok(Self::ReciprocalQuadratic),
            ("constant", a) => Ok(Self::Constant(parse_arg(a)?)),
            ("clamped_identity", a) => Ok(Self::ClampedIdentity(parse_arg(a)?)),
            _ => Err(Error::Config(format!("unknown functional `{s}`"))),
        }
    }
}

impl TryFrom<String> for FunctionalTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FunctionalTag> for String {
    fn from(tag: FunctionalTag) -> String {
        tag.to_string()
    }
}

/// A registered integrand together with its Hölder constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FunctionalF {
    tag: FunctionalTag,
    holder_k: f64,
    holder_a: f64,
}

impl FunctionalF {
    pub fn new(tag: FunctionalTag) -> Result<Self> {
        let (holder_k, holder_a) = match tag {
            FunctionalTag::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "constant {c} is not finite"
                    )));
                }
                (1.0, 1.0)
            }
            FunctionalTag::Sine | FunctionalTag::Cosine => (1.0, 1.0),
            FunctionalTag::ClampedIdentity(c) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "clamp bound {c} must be positive"
                    )));
                }
                (1.0, 1.0)
            }
            // sup |d/dx (1 + x²)^-1| = 3√3/8
            FunctionalTag::ReciprocalQuadratic => (0.65, 1.0),
        };
        let f = Self {
            tag,
            holder_k,
            holder_a,
        };
        f.certify()?;
        Ok(f)
    }

    pub fn sine() -> Self {
        Self::new(FunctionalTag::Sine).expect("sine is registered")
    }

    pub fn tag(&self) -> FunctionalTag {
        self.tag
    }

    pub fn holder_k(&self) -> f64 {
        self.holder_k
    }

    pub fn holder_a(&self) -> f64 {
        self.holder_a
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.tag {
            FunctionalTag::Constant(c) => c,
            FunctionalTag::Sine => x.sin(),
            FunctionalTag::Cosine => x.cos(),
            FunctionalTag::ClampedIdentity(c) => x.clamp(-c, c),
            FunctionalTag::ReciprocalQuadratic => 1.0 / (1.0 + x * x),
        }
    }

    /// `sup |f|`.
    pub fn bound(&self) -> f64 {
        match self.tag {
            FunctionalTag::Constant(c) => c.abs(),
            FunctionalTag::Sine | FunctionalTag::Cosine | FunctionalTag::ReciprocalQuadratic => 1.0,
            FunctionalTag::ClampedIdentity(c) => c,
        }
    }

    /// Checks the Hölder bound on a fixed pseudo-random set of pairs spanning
    /// separations from 1e-6 to 10.
    fn certify(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x486f_6c64_6572);
        for _ in 0..CERTIFICATE_PAIRS {
            let x: f64 = rng.random_range(-50.0..50.0);
            let gap = 10f64.powf(rng.random_range(-6.0..1.0));
            let y = if rng.random::<bool>() {
                x + gap
            } else {
                x - gap
            };
            let lhs = (self.eval(x) - self.eval(y)).abs();
            let rhs = self.holder_k * (x - y).abs().powf(self.holder_a);
            if lhs > rhs * (1.0 + 1e-9) + 1e-15 {
                return Err(Error::InvalidParameter(format!(
                    "{} violates its Hölder bound at ({x}, {y})",
                    self.tag
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for FunctionalF {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

impl From<FunctionalF> for String {
    fn from(f: FunctionalF) -> String {
        f.tag.to_string()
    }
}

impl fmt::Display for FunctionalF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tag.fmt(f)
    }
}
