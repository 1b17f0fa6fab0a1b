use serde::{Deserialize, Serialize};

use super::mixed::schedule_norm;
use super::schedule::{make_schedule, ScheduleKind};
use super::sobolev::sobolev_norm;
use super::trajectory::Trajectory;
use crate::error::Result;
use crate::spectral::SpectralField;

/// The data events on which the contraction argument closes.
///
/// Each compares `||phi^omega||_{H^s} + ||A z||_S` against a threshold, where
/// `z = S(t) phi^omega` is supplied as a trajectory over the relevant window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoodSet {
    /// `S = S0`, `A = <grad>^s`, `<=`.
    ER,
    /// `S = S0'`, `A = 1`, `<=`.
    ERPrime,
    /// `S = S0'` on `(-T, T)`, `A = <grad>^s`, `<`.
    OmegaT,
    /// `S = S0`, `A = <grad>^s`, `<`.
    OmegaPhi,
    /// As `ER`, evaluated on dilated data.
    OmegaMu,
}

impl GoodSet {
    pub fn schedule_kind(self) -> ScheduleKind {
        match self {
            GoodSet::ER | GoodSet::OmegaPhi | GoodSet::OmegaMu => ScheduleKind::S0,
            GoodSet::ERPrime | GoodSet::OmegaT => ScheduleKind::S0Prime,
        }
    }

    fn strict(self) -> bool {
        matches!(self, GoodSet::OmegaT | GoodSet::OmegaPhi)
    }

    fn smooths_linear_part(self) -> bool {
        self != GoodSet::ERPrime
    }
}

/// The statistic `||phi^omega||_{H^s} + ||A z||_S` with its two parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodSetStatistic {
    pub data_norm: f64,
    pub linear_norm: f64,
}

impl GoodSetStatistic {
    pub fn total(&self) -> f64 {
        self.data_norm + self.linear_norm
    }
}

pub fn good_set_statistic(
    phi: &SpectralField,
    z: &Trajectory,
    s: f64,
    kind: GoodSet,
    delta: f64,
) -> Result<GoodSetStatistic> {
    let schedule = make_schedule(kind.schedule_kind(), z.grid().dim(), delta)?;
    let smooth = if kind.smooths_linear_part() { s } else { 0.0 };
    Ok(GoodSetStatistic {
        data_norm: sobolev_norm(phi, s, false),
        linear_norm: schedule_norm(z, &schedule, smooth)?,
    })
}

/// Membership in the event together with the statistic that decided it.
pub fn good_set_member(
    phi: &SpectralField,
    z: &Trajectory,
    s: f64,
    threshold: f64,
    kind: GoodSet,
    delta: f64,
) -> Result<(bool, f64)> {
    let stat = good_set_statistic(phi, z, s, kind, delta)?.total();
    Ok((decide(kind, stat, threshold), stat))
}

pub(crate) fn decide(kind: GoodSet, stat: f64, threshold: f64) -> bool {
    if kind.strict() {
        stat < threshold
    } else {
        stat <= threshold
    }
}
