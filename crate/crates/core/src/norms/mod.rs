//! Sobolev and space-time norms, admissible pairs and exponent schedules.

mod exponent;
mod good_set;
mod mixed;
mod schedule;
mod sobolev;
mod trajectory;

pub use exponent::{is_admissible, AdmissiblePair, Exponent, PairKind, Rational};
pub use good_set::{good_set_member, good_set_statistic, GoodSet, GoodSetStatistic};
pub(crate) use good_set::decide;
pub use mixed::{
    mixed_norm, mixed_norm_with, schedule_norm, schedule_values, time_norm, NormTerm, SpaceTimeNorms,
};
pub use schedule::{
    default_delta, make_schedule, schedule_entries, NormSchedule, ScheduleEntry, ScheduleKind, Weight,
};
pub use sobolev::sobolev_norm;
pub use trajectory::Trajectory;
