use alloc::format;

use crate::error::{Error, Result};

/// sign(x) with sign(0) = 0, unlike `f64::signum`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The model constants a, b, c, d and the jump-penalty weight λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
}

impl AbcdParams {
    /// Validates `b, d ≥ 0`; λ defaults to 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::with_lambda(a, b, c, d, 1.0)
    }

    pub fn with_lambda(a: f64, b: f64, c: f64, d: f64, lambda: f64) -> Result<Self> {
        if ![a, b, c, d, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite value in ({a}, {b}, {c}, {d}, λ={lambda})")));
        }
        if b < 0.0 || d < 0.0 {
            return Err(Error::InvalidParams(format!("b and d must be non-negative, got b={b}, d={d}")));
        }
        if lambda <= 0.0 {
            return Err(Error::InvalidParams(format!("penalty weight must be positive, got {lambda}")));
        }
        Ok(Self { a, b, c, d, lambda })
    }

    pub fn sign_a(&self) -> f64 {
        sign(self.a)
    }

    pub fn sign_c(&self) -> f64 {
        sign(self.c)
    }

    /// Deviation of a+b+c+d from 1/3 when it exceeds 1e−12. Advisory only:
    /// some classical test configurations do not satisfy the relation.
    pub fn sum_rule_violation(&self) -> Option<f64> {
        let dev = self.a + self.b + self.c + self.d - 1.0 / 3.0;
        (dev.abs() > 1e-12).then_some(dev)
    }
}

/// When the global Lax–Friedrichs speed α is recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaPolicy {
    /// Once at the start of every time step.
    #[default]
    PerStep,
    /// At every Runge–Kutta stage.
    PerStage,
    /// Once, from the initial data.
    Initial,
}

impl AlphaPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlphaPolicy::PerStep => "per-step",
            AlphaPolicy::PerStage => "per-stage",
            AlphaPolicy::Initial => "initial",
        }
    }
}

impl core::str::FromStr for AlphaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-step" => Ok(AlphaPolicy::PerStep),
            "per-stage" => Ok(AlphaPolicy::PerStage),
            "initial" => Ok(AlphaPolicy::Initial),
            other => Err(Error::InvalidParams(format!("unknown alpha policy '{other}'"))),
        }
    }
}
