//! Trip-record ingestion: streaming CSV parse into per-time-bin
//! origin/destination demand counts.
//!
//! Schema: a header line `origin_zone,dest_zone,pickup_datetime` followed
//! by one row per trip; `pickup_datetime` is `YYYY-MM-DD HH:MM:SS`. Pickup
//! times are binned into 12-minute intervals starting at 09:00; rows
//! outside 09:00-12:00 are dropped.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenario::geometry::ZoneGeometry;

/// Minutes after midnight at which the horizon starts (09:00).
pub const WINDOW_START_MIN: u32 = 9 * 60;
/// Minutes after midnight at which the horizon ends (12:00, exclusive).
pub const WINDOW_END_MIN: u32 = 12 * 60;
/// Length of one time bin in minutes.
pub const BIN_MINUTES: u32 = 12;

/// Aggregated demand counts `N[t][origin][dest]` over the horizon.
#[derive(Debug, Clone)]
pub struct TripRecords {
    states: usize,
    horizon: usize,
    counts: Vec<f64>,
    ingested: usize,
    dropped: usize,
}

impl TripRecords {
    pub fn from_csv_reader(
        reader: impl Read,
        geometry: &ZoneGeometry,
        horizon: usize,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::validation("trip ingestion needs a positive horizon".to_string()));
        }
        let states = geometry.num_zones();
        let mut counts = vec![0.0; horizon * states * states];
        let mut ingested = 0usize;
        let mut dropped = 0usize;

        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("trip CSV is empty".to_string()))??;
        let expected = "origin_zone,dest_zone,pickup_datetime";
        if header.trim() != expected {
            return Err(Error::Config(format!(
                "trip CSV header {header:?} does not match {expected:?}"
            )));
        }

        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.splitn(3, ',');
            let origin: u32 = parse_field(fields.next(), lineno, "origin_zone")?;
            let dest: u32 = parse_field(fields.next(), lineno, "dest_zone")?;
            let dt = fields
                .next()
                .ok_or_else(|| Error::Config(format!("row {lineno}: missing pickup_datetime")))?;

            let origin_idx = geometry
                .index_of(origin)
                .ok_or_else(|| Error::Config(format!("row {lineno}: unknown origin zone {origin}")))?;
            let dest_idx = geometry
                .index_of(dest)
                .ok_or_else(|| Error::Config(format!("row {lineno}: unknown dest zone {dest}")))?;

            let minutes = parse_minutes(dt.trim())
                .ok_or_else(|| Error::Config(format!("row {lineno}: bad pickup_datetime {dt:?}")))?;
            if !(WINDOW_START_MIN..WINDOW_END_MIN).contains(&minutes) {
                dropped += 1;
                continue;
            }
            let bin = (((minutes - WINDOW_START_MIN) / BIN_MINUTES) as usize).min(horizon - 1);
            counts[(bin * states + origin_idx) * states + dest_idx] += 1.0;
            ingested += 1;
        }
        Ok(Self { states, horizon, counts, ingested, dropped })
    }

    pub fn from_csv_file(
        path: impl AsRef<Path>,
        geometry: &ZoneGeometry,
        horizon: usize,
    ) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, geometry, horizon)
    }

    /// Builds directly from a dense count tensor (used by the synthetic
    /// generator and tests).
    pub fn from_counts(states: usize, horizon: usize, counts: Vec<f64>) -> Result<Self> {
        if counts.len() != horizon * states * states {
            return Err(Error::dim("count tensor has the wrong length".to_string()));
        }
        if counts.iter().any(|&c| c < 0.0) {
            return Err(Error::validation("demand counts must be nonnegative".to_string()));
        }
        let ingested = counts.iter().sum::<f64>() as usize;
        Ok(Self { states, horizon, counts, ingested, dropped: 0 })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Demand count `N(origin, dest, t)`.
    pub fn count(&self, origin: usize, dest: usize, t: usize) -> f64 {
        self.counts[(t * self.states + origin) * self.states + dest]
    }

    /// Total demand out of `origin` at time bin `t`.
    pub fn total_demand(&self, origin: usize, t: usize) -> f64 {
        let base = (t * self.states + origin) * self.states;
        self.counts[base..base + self.states].iter().sum()
    }

    /// Number of rows that landed inside the horizon.
    pub fn ingested(&self) -> usize {
        self.ingested
    }

    /// Number of rows dropped for falling outside the time window.
    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    lineno: usize,
    name: &str,
) -> Result<T> {
    field
        .map(str::trim)
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::Config(format!("row {lineno}: bad {name}")))
}

/// Minutes after midnight from `YYYY-MM-DD HH:MM:SS`.
fn parse_minutes(dt: &str) -> Option<u32> {
    let time = dt.split_whitespace().nth(1)?;
    let mut parts = time.split(':');
    let hours: u32 = parts.next()?.parse().ok()?;
    let minutes: u32 = parts.next()?.parse().ok()?;
    if hours >= 24 || minutes >= 60 {
        return None;
    }
    Some(hours * 60 + minutes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::geometry::Zone;

    fn geometry() -> ZoneGeometry {
        ZoneGeometry::new(vec![
            Zone { id: 1, lat: 0.0, lon: 0.0, neighbors: vec![2] },
            Zone { id: 2, lat: 0.1, lon: 0.0, neighbors: vec![1] },
        ])
        .unwrap()
    }

    #[test]
    fn ingestion_conserves_in_window_counts() {
        let csv = "origin_zone,dest_zone,pickup_datetime\n\
                   1,2,2019-01-05 09:00:00\n\
                   1,2,2019-01-05 09:11:59\n\
                   2,1,2019-01-05 11:59:00\n\
                   1,1,2019-01-05 08:59:00\n\
                   2,2,2019-01-05 12:00:00\n";
        let trips = TripRecords::from_csv_reader(csv.as_bytes(), &geometry(), 15).unwrap();
        assert_eq!(trips.ingested(), 3);
        assert_eq!(trips.dropped(), 2);
        assert_eq!(trips.count(0, 1, 0), 2.0);
        assert_eq!(trips.count(1, 0, 14), 1.0);
        let total: f64 = (0..15)
            .map(|t| trips.total_demand(0, t) + trips.total_demand(1, t))
            .sum();
        assert_eq!(total, 3.0);
    }

    #[test]
    fn bin_boundaries_follow_twelve_minute_grid() {
        let csv = "origin_zone,dest_zone,pickup_datetime\n\
                   1,2,2019-01-05 09:12:00\n\
                   1,2,2019-01-05 09:23:59\n\
                   1,2,2019-01-05 09:24:00\n";
        let trips = TripRecords::from_csv_reader(csv.as_bytes(), &geometry(), 15).unwrap();
        assert_eq!(trips.count(0, 1, 1), 2.0);
        assert_eq!(trips.count(0, 1, 2), 1.0);
    }

    #[test]
    fn bad_header_is_rejected() {
        let csv = "origin,dest,when\n1,2,2019-01-05 09:00:00\n";
        assert!(TripRecords::from_csv_reader(csv.as_bytes(), &geometry(), 15).is_err());
    }

    #[test]
    fn unknown_zone_is_rejected() {
        let csv = "origin_zone,dest_zone,pickup_datetime\n9,2,2019-01-05 09:00:00\n";
        assert!(TripRecords::from_csv_reader(csv.as_bytes(), &geometry(), 15).is_err());
    }
}
