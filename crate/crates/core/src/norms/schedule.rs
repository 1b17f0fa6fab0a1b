use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::exponent::{rational_from_f64, Exponent, Rational};
use crate::error::{Error, Result};

/// Which exponent table a schedule realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    /// The four-term norm behind `X^s`.
    X,
    /// The probabilistic data norm on `R`.
    S0,
    /// The relaxed data norm used on finite windows.
    S0Prime,
}

/// Derivative weight `w` of one entry, applied as `|grad|^w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Zero,
    TwoOverQ,
    Fixed(Rational),
}

/// One `||grad|^w u|_{L^q_t L^r_x}` term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub q: Exponent,
    pub r: Exponent,
    pub weight: Weight,
    /// The entry as a formula in `d` and `delta`.
    pub formula: String,
}

impl ScheduleEntry {
    fn new(inv_q: Rational, inv_r: Rational, weight: Weight, formula: &str) -> Self {
        Self {
            q: Exponent::from_reciprocal(inv_q),
            r: Exponent::from_reciprocal(inv_r),
            weight,
            formula: formula.to_string(),
        }
    }

    pub fn weight_value(&self) -> Rational {
        match self.weight {
            Weight::Zero => Rational::zero(),
            Weight::TwoOverQ => Rational::from_integer(2) * self.q.reciprocal(),
            Weight::Fixed(w) => w,
        }
    }

    pub fn w(&self) -> f64 {
        let w = self.weight_value();
        *w.numer() as f64 / *w.denom() as f64
    }
}

impl fmt::Display for ScheduleEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ({}, {})", self.formula, self.q, self.r)
    }
}

/// `sum over groups of (max over entries)` of mixed norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSchedule {
    pub kind: ScheduleKind,
    pub dim: usize,
    pub delta: Rational,
    pub groups: Vec<Vec<ScheduleEntry>>,
}

impl NormSchedule {
    pub fn entries(&self) -> impl Iterator<Item = &ScheduleEntry> {
        self.groups.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.entries().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Combine per-entry values (in [`entries`](Self::entries) order).
    pub fn aggregate(&self, values: &[f64]) -> f64 {
        let mut it = values.iter();
        self.groups
            .iter()
            .map(|g| g.iter().map(|_| *it.next().expect("one value per entry")).fold(0.0, f64::max))
            .sum()
    }

    /// A schedule with the single entry `(q, r, w)`.
    pub fn single(dim: usize, q: Exponent, r: Exponent, w: Rational) -> Self {
        Self {
            kind: ScheduleKind::X,
            dim,
            delta: Rational::zero(),
            groups: vec![vec![ScheduleEntry {
                q,
                r,
                weight: Weight::Fixed(w),
                formula: "custom".into(),
            }]],
        }
    }
}

/// The entry table for `(kind, d, delta)` without range checks.
pub fn schedule_entries(kind: ScheduleKind, dim: usize, delta: Rational) -> Vec<Vec<ScheduleEntry>> {
    let d = Rational::from_integer(dim as i64);
    let one = Rational::one();
    let r = |n: i64| Rational::from_integer(n);
    let e = ScheduleEntry::new;
    match kind {
        ScheduleKind::X => vec![
            vec![e(r(0), one / 2, Weight::TwoOverQ, "(inf, 2)")],
            vec![e(one / 2, (d - 2) / (d * 2), Weight::TwoOverQ, "(2, 2d/(d-2))")],
            vec![e(one / 4, (d - 1) / (d * 2), Weight::TwoOverQ, "(4, 2d/(d-1))")],
            vec![e(delta, (d - delta * 4) / (d * 2), Weight::TwoOverQ, "(1/delta, 2d/(d-4delta))")],
        ],
        ScheduleKind::S0 | ScheduleKind::S0Prime => {
            let prime = kind == ScheduleKind::S0Prime;
            let (a_tail, b4, b2, b3) = if prime {
                (delta / 2, (one - delta) / 4, (one - delta * 3) / 2, (one - delta * 5) / 2)
            } else {
                (delta, one / 4, (one - delta * 2) / 2, (one - delta * 4) / 2)
            };
            let f = |plain: &'static str, relaxed: &'static str| if prime { relaxed } else { plain };
            let w0 = Weight::Zero;
            let w2 = Weight::TwoOverQ;
            vec![
                vec![
                    e(delta, (d - delta * 8) / (d * 2), w0, "(1/delta, 2d/(d-8delta))"),
                    e(a_tail, one / d, w0, f("(1/delta, d)", "(2/delta, d)")),
                    e(a_tail, (one - delta * 2) / d, w0, f("(1/delta, d/(1-2delta))", "(2/delta, d/(1-2delta))")),
                    e(a_tail, (d - 1 + delta * 8) / (d * 4), w0, f("(1/delta, 4d/(d-1+8delta))", "(2/delta, 4d/(d-1+8delta))")),
                ],
                vec![
                    e(b4, one / (d * 2), w2, f("(4, 2d)", "(4/(1-delta), 2d)")),
                    e(b4, (one + delta * 16) / (d * 4), w2, f("(4, 4d/(1+16delta))", "(4/(1-delta), 4d/(1+16delta))")),
                    e(b2, delta * 4 / d, w2, f("(2/(1-2delta), d/(4delta))", "(2/(1-3delta), d/(4delta))")),
                    e(b2, one / (d * 4), w2, f("(2/(1-2delta), 4d)", "(2/(1-3delta), 4d)")),
                    e(b2, (d - 3 + delta * 16) / (d * 4), w2, f("(2/(1-2delta), 4d/(d-3+16delta))", "(2/(1-3delta), 4d/(d-3+16delta))")),
                    e(b3, (d - 2) / (d * 2), w2, f("(2/(1-4delta), 2d/(d-2))", "(2/(1-5delta), 2d/(d-2))")),
                    e(b3, delta * 8 / d, w2, f("(2/(1-4delta), d/(8delta))", "(2/(1-5delta), d/(8delta))")),
                    e(b3, (d - 4 + delta * 16) / (d * 2), w2, f("(2/(1-4delta), 2d/(d-4+16delta))", "(2/(1-5delta), 2d/(d-4+16delta))")),
                    e(b3, (d - 1 + delta * 8) / (d * 4), w2, f("(2/(1-4delta), 4d/(d-1+8delta))", "(2/(1-5delta), 4d/(d-1+8delta))")),
                ],
            ]
        }
    }
}

/// Default `delta`: `1/10` in `d = 3`, where the `S0` table needs `delta > 1/16`,
/// and `1/100` otherwise.
pub fn default_delta(dim: usize) -> f64 {
    if dim == 3 {
        0.1
    } else {
        0.01
    }
}

/// Build and validate a schedule.
///
/// Every time exponent must satisfy `2 <= q < inf` and every space exponent
/// `2 <= r < inf`, except the energy entry `(inf, 2)` of `X`. The error names
/// the first entry that fails.
pub fn make_schedule(kind: ScheduleKind, dim: usize, delta: f64) -> Result<NormSchedule> {
    if dim < 3 {
        return Err(Error::param("d", format!("schedules need d >= 3, got {dim}")));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param("delta", format!("must be positive, got {delta}")));
    }
    let delta = rational_from_f64(delta)
        .ok_or_else(|| Error::param("delta", format!("{delta} is not representable")))?;
    let groups = schedule_entries(kind, dim, delta);
    let half = Rational::new(1, 2);
    for entry in groups.iter().flatten() {
        let energy = kind == ScheduleKind::X && entry.q.is_infinite();
        let check = |e: Exponent, name: &str| -> Result<()> {
            let inv = e.reciprocal();
            if inv > half {
                return Err(violation(entry, format!("{name} = {} < 2", e)));
            }
            if inv <= Rational::zero() && !energy {
                let shown = if inv < Rational::zero() { "negative".to_string() } else { "infinite".to_string() };
                return Err(violation(entry, format!("{name} is {shown}, need 2 <= {name} < inf")));
            }
            Ok(())
        };
        check(entry.q, "q")?;
        check(entry.r, "r")?;
    }
    Ok(NormSchedule { kind, dim, delta, groups })
}

fn violation(entry: &ScheduleEntry, constraint: String) -> Error {
    Error::ScheduleConstraint {
        entry: entry.formula.clone(),
        constraint,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::exponent::{is_admissible, PairKind};

    #[test]
    fn x_schedule_three_dimensions() {
        let s = make_schedule(ScheduleKind::X, 3, 0.01).unwrap();
        let e: Vec<_> = s.entries().collect();
        assert_eq!(e.len(), 4);
        assert_eq!(e[1].q, Exponent::integer(2));
        assert_eq!(e[1].r, Exponent::integer(6));
        assert_eq!(e[1].weight_value(), Rational::one());
        assert_eq!(e[3].weight_value(), Rational::new(1, 50));
        for entry in &e {
            assert!(is_admissible(entry.q, entry.r, 3, PairKind::Schrodinger));
        }
    }

    #[test]
    fn s0_first_entry() {
        let groups = schedule_entries(ScheduleKind::S0, 3, Rational::new(1, 100));
        let first = &groups[0][0];
        assert_eq!(first.q, Exponent::integer(100));
        // 2d/(d-8 delta) = 6/2.92
        assert_eq!(first.r.reciprocal().recip(), Rational::new(600, 292));
    }

    #[test]
    fn s0_counts_and_weights() {
        for kind in [ScheduleKind::S0, ScheduleKind::S0Prime] {
            let s = make_schedule(kind, 4, 0.01).unwrap();
            assert_eq!(s.groups[0].len(), 4);
            assert_eq!(s.groups[1].len(), 9);
            assert!(s.groups[0].iter().all(|e| e.weight_value().is_zero()));
            assert!(s.groups[1].iter().all(|e| e.weight_value() == e.q.reciprocal() * 2));
        }
    }

    #[test]
    fn large_delta_names_entry() {
        let err = make_schedule(ScheduleKind::S0, 3, 0.2).unwrap_err();
        match err {
            Error::ScheduleConstraint { entry, .. } => assert_eq!(entry, "(2/(1-4delta), d/(8delta))"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn small_delta_in_three_dimensions_is_rejected() {
        // d - 4 + 16 delta <= 0 for delta <= 1/16.
        let err = make_schedule(ScheduleKind::S0, 3, 0.01).unwrap_err();
        match err {
            Error::ScheduleConstraint { entry, .. } => assert_eq!(entry, "(2/(1-4delta), 2d/(d-4+16delta))"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(make_schedule(ScheduleKind::S0, 3, default_delta(3)).is_ok());
        assert!(make_schedule(ScheduleKind::S0Prime, 3, default_delta(3)).is_ok());
    }

    #[test]
    fn aggregate_is_sum_of_group_maxima() {
        let s = make_schedule(ScheduleKind::S0, 4, 0.01).unwrap();
        let mut values = vec![0.0; 13];
        values[2] = 3.0;
        values[1] = 1.0;
        values[12] = 5.0;
        assert_eq!(s.aggregate(&values), 8.0);
    }
}
