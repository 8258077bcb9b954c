//! Closed-form noise schedules for the forward process, plus the sinusoidal
//! drift-strength schedule used during guided inference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which signal-retention curve `alpha_bar` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `sqrt((T - t) / T)`: decays much more slowly than the baselines,
    /// destroying information late in the chain.
    Gentle,
    /// `cos^2(((t/T + s) / (1 + s)) * pi/2)` with `s = 0.008`.
    Cosine,
    /// `1 - sqrt(t/T + 0.0001)`, clamped into `[0, 1]`.
    Sqrt,
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScheduleKind::Gentle => "gentle",
            ScheduleKind::Cosine => "cosine",
            ScheduleKind::Sqrt => "sqrt",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gentle" => Ok(ScheduleKind::Gentle),
            "cosine" => Ok(ScheduleKind::Cosine),
            "sqrt" => Ok(ScheduleKind::Sqrt),
            other => Err(Error::Config(format!(
                "unknown schedule kind {other:?} (expected gentle|cosine|sqrt)"
            ))),
        }
    }
}

/// Closed-form value of the schedule at step `t`, without building a table.
///
/// All kinds satisfy: strictly decreasing in `t`, values in `[0, 1]`. The
/// gentle schedule additionally hits the endpoints exactly:
/// `alpha_bar(0) = 1`, `alpha_bar(T) = 0`.
pub fn alpha_bar(kind: ScheduleKind, t_total: usize, t: usize) -> Result<f64> {
    if t_total == 0 {
        return Err(Error::Domain("schedule requires T >= 1".into()));
    }
    if t > t_total {
        return Err(Error::Domain(format!(
            "timestep {t} out of range 0..={t_total}"
        )));
    }
    let tt = t_total as f64;
    let tf = t as f64;
    let v = match kind {
        ScheduleKind::Gentle => ((tt - tf) / tt).sqrt(),
        ScheduleKind::Cosine => {
            const S: f64 = 0.008;
            let inner = ((tf / tt + S) / (1.0 + S)) * std::f64::consts::FRAC_PI_2;
            inner.cos().powi(2)
        }
        ScheduleKind::Sqrt => {
            const S: f64 = 0.0001;
            (1.0 - (tf / tt + S).sqrt()).clamp(0.0, 1.0)
        }
    };
    Ok(v)
}

/// Precomputed `alpha_bar` table for `t = 0..=T`.
///
/// Built once and shared between training and inference so both sides see
/// bit-identical values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub kind: ScheduleKind,
    pub t_total: usize,
    alpha_bar: Vec<f64>,
}

impl NoiseSchedule {
    pub fn new(kind: ScheduleKind, t_total: usize) -> Result<Self> {
        let mut table = Vec::with_capacity(t_total + 1);
        for t in 0..=t_total {
            table.push(alpha_bar(kind, t_total, t)?);
        }
        Ok(NoiseSchedule {
            kind,
            t_total,
            alpha_bar: table,
        })
    }

    /// Table lookup; `t` must be in `0..=T`.
    pub fn alpha_bar(&self, t: usize) -> Result<f64> {
        self.alpha_bar
            .get(t)
            .copied()
            .ok_or_else(|| Error::Domain(format!("timestep {t} out of range 0..={}", self.t_total)))
    }

    pub fn table(&self) -> &[f64] {
        &self.alpha_bar
    }
}

/// Sinusoidal drift-strength schedule: `lambda_t = lambda * sin(pi * t / T)`.
///
/// Strength rises from zero, peaks mid-chain and anneals back to zero, so
/// guidance neither fights the incoherent early predictions nor wrecks the
/// nearly-final text. Endpoints are exactly zero by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GuidanceSchedule {
    pub lambda_base: f64,
    pub t_total: usize,
}

impl GuidanceSchedule {
    pub fn new(lambda_base: f64, t_total: usize) -> Result<Self> {
        if lambda_base < 0.0 || !lambda_base.is_finite() {
            return Err(Error::Domain(format!(
                "lambda_base must be finite and >= 0, got {lambda_base}"
            )));
        }
        if t_total == 0 {
            return Err(Error::Domain("guidance schedule requires T >= 1".into()));
        }
        Ok(GuidanceSchedule {
            lambda_base,
            t_total,
        })
    }

    pub fn strength(&self, t: usize) -> Result<f64> {
        guidance_strength(self.lambda_base, t, self.t_total)
    }
}

/// `lambda * sin(pi * t / T)`, exactly zero at both endpoints.
pub fn guidance_strength(lambda_base: f64, t: usize, t_total: usize) -> Result<f64> {
    if t_total == 0 {
        return Err(Error::Domain("guidance schedule requires T >= 1".into()));
    }
    if t > t_total {
        return Err(Error::Domain(format!(
            "timestep {t} out of range 0..={t_total}"
        )));
    }
    if t == 0 || t == t_total {
        return Ok(0.0);
    }
    Ok(lambda_base * (std::f64::consts::PI * t as f64 / t_total as f64).sin())
}
