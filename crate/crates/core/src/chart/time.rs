//! Calendar-aligned tick intervals for time scales (UTC).

use chrono::{DateTime, Datelike, NaiveDate};

const SECOND: i64 = 1000;
const MINUTE: i64 = 60 * SECOND;
const HOUR: i64 = 60 * MINUTE;
const DAY: i64 = 24 * HOUR;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeInterval {
    /// Fixed length, aligned to multiples since the epoch.
    Millis(i64),
    Months(u32),
    Years(i32),
}

const CANDIDATES: &[TimeInterval] = &[
    TimeInterval::Millis(SECOND),
    TimeInterval::Millis(5 * SECOND),
    TimeInterval::Millis(15 * SECOND),
    TimeInterval::Millis(30 * SECOND),
    TimeInterval::Millis(MINUTE),
    TimeInterval::Millis(5 * MINUTE),
    TimeInterval::Millis(15 * MINUTE),
    TimeInterval::Millis(30 * MINUTE),
    TimeInterval::Millis(HOUR),
    TimeInterval::Millis(3 * HOUR),
    TimeInterval::Millis(6 * HOUR),
    TimeInterval::Millis(12 * HOUR),
    TimeInterval::Millis(DAY),
    TimeInterval::Millis(2 * DAY),
    TimeInterval::Millis(7 * DAY),
    TimeInterval::Months(1),
    TimeInterval::Months(3),
    TimeInterval::Months(6),
    TimeInterval::Years(1),
    TimeInterval::Years(2),
    TimeInterval::Years(5),
    TimeInterval::Years(10),
    TimeInterval::Years(25),
    TimeInterval::Years(50),
    TimeInterval::Years(100),
];

fn month_index(t: i64) -> Option<i64> {
    let d = DateTime::from_timestamp_millis(t)?.date_naive();
    Some(i64::from(d.year()) * 12 + i64::from(d.month0()))
}

fn month_start(index: i64) -> Option<i64> {
    let year = i32::try_from(index.div_euclid(12)).ok()?;
    let d = NaiveDate::from_ymd_opt(year, index.rem_euclid(12) as u32 + 1, 1)?;
    Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis())
}

impl TimeInterval {
    /// Months per step for calendar intervals.
    fn months(self) -> Option<i64> {
        match self {
            TimeInterval::Millis(_) => None,
            TimeInterval::Months(m) => Some(i64::from(m)),
            TimeInterval::Years(y) => Some(i64::from(y) * 12),
        }
    }

    /// Largest boundary ≤ `t`.
    pub fn floor(self, t: i64) -> i64 {
        match self.months() {
            None => {
                let TimeInterval::Millis(ms) = self else { unreachable!() };
                t.div_euclid(ms) * ms
            }
            Some(k) => month_index(t).and_then(|i| month_start(i.div_euclid(k) * k)).unwrap_or(t),
        }
    }

    /// Smallest boundary ≥ `t`.
    pub fn ceil(self, t: i64) -> i64 {
        let f = self.floor(t);
        if f == t {
            t
        } else {
            self.next(f)
        }
    }

    /// Boundary following the boundary `t`.
    pub fn next(self, t: i64) -> i64 {
        match self.months() {
            None => {
                let TimeInterval::Millis(ms) = self else { unreachable!() };
                t + ms
            }
            Some(k) => month_index(t).and_then(|i| month_start(i + k)).unwrap_or(i64::MAX),
        }
    }

    /// Boundaries within `[min, max]`.
    pub fn ticks(self, min: i64, max: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut t = self.ceil(min);
        while t <= max && out.len() <= 10_000 {
            out.push(t);
            t = self.next(t);
        }
        out
    }

    /// `strftime` pattern suited to the interval.
    pub fn label_format(self) -> &'static str {
        match self {
            TimeInterval::Millis(ms) if ms < MINUTE => "%H:%M:%S",
            TimeInterval::Millis(ms) if ms < DAY => "%H:%M",
            TimeInterval::Millis(_) => "%Y-%m-%d",
            TimeInterval::Months(_) => "%Y-%m",
            TimeInterval::Years(_) => "%Y",
        }
    }
}

/// Interval whose tick count over `[min, max]` is closest to `target`;
/// ties prefer the longer interval.
pub fn time_interval(min: i64, max: i64, target: usize) -> TimeInterval {
    let mut best = (usize::MAX, CANDIDATES[0]);
    for &c in CANDIDATES {
        // Skip intervals far too fine to enumerate.
        if let TimeInterval::Millis(ms) = c {
            if (max - min) / ms > 10_000 {
                continue;
            }
        }
        let diff = c.ticks(min, max).len().abs_diff(target);
        if diff <= best.0 {
            best = (diff, c);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::parse_temporal;

    fn t(s: &str) -> i64 {
        parse_temporal(s).unwrap()
    }

    #[test]
    fn quarters_over_a_year() {
        let iv = time_interval(t("2024-01-01"), t("2024-12-01"), 8);
        assert_eq!(iv, TimeInterval::Months(3));
        assert_eq!(iv.ceil(t("2024-12-01")), t("2025-01-01"));
        let ticks = iv.ticks(t("2024-01-01"), t("2025-01-01"));
        let want: Vec<i64> = ["2024-01-01", "2024-04-01", "2024-07-01", "2024-10-01", "2025-01-01"].iter().map(|s| t(s)).collect();
        assert_eq!(ticks, want);
    }

    #[test]
    fn fixed_intervals_align_to_epoch() {
        let iv = TimeInterval::Millis(HOUR);
        assert_eq!(iv.floor(t("2024-03-05T10:42")), t("2024-03-05T10:00"));
        assert_eq!(iv.ceil(t("2024-03-05T10:00")), t("2024-03-05T10:00"));
    }

    #[test]
    fn years_before_epoch() {
        let iv = TimeInterval::Years(10);
        assert_eq!(iv.floor(t("1955-06-01")), t("1950-01-01"));
        assert_eq!(iv.next(t("1950-01-01")), t("1960-01-01"));
    }
}
