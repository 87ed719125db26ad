//! CSV time series and calendar-month rolling windows.

use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::transport::Sample;

const MODULE: &str = "io_cli";

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    pub name: String,
    pub dates: Option<Vec<NaiveDate>>,
    pub names: Vec<String>,
    /// One series per column, all of length `n`.
    pub series: Vec<Vec<f64>>,
}

impl TimeSeriesTable {
    pub fn n(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn d(&self) -> usize {
        self.series.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.series.iter().map(move |s| s[i])
    }

    pub fn to_sample(&self) -> Result<Sample<f64>> {
        self.sample_rows(0..self.n())
    }

    fn sample_rows(&self, rows: std::ops::Range<usize>) -> Result<Sample<f64>> {
        let mut flat = Vec::with_capacity(rows.len() * self.d());
        for i in rows {
            flat.extend(self.row(i));
        }
        Sample::new(PointSet::from_flat(flat, self.d())?)
    }

    /// `log(p_t / p_{t-1})` per column; the first row is consumed.
    pub fn log_returns(&self) -> Result<Self> {
        if self.n() < 2 {
            return Err(Error::insufficient_data(MODULE, "log returns need at least two rows"));
        }
        if let Some((j, _)) = self
            .series
            .iter()
            .enumerate()
            .find(|(_, s)| s.iter().any(|&v| !(v > 0.0)))
        {
            return Err(Error::invalid_data(
                MODULE,
                format!("column '{}' has nonpositive prices", self.names[j]),
            ));
        }
        Ok(Self {
            name: self.name.clone(),
            dates: self.dates.as_ref().map(|d| d[1..].to_vec()),
            names: self.names.clone(),
            series: self.series.iter().map(|s| s.windows(2).map(|w| (w[1] / w[0]).ln()).collect()).collect(),
        })
    }
}

/// Reads a headed CSV file; `date_column` names an ISO-8601 date column.
pub fn load_csv(path: impl AsRef<Path>, date_column: Option<&str>) -> Result<TimeSeriesTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    read_csv(file, &name, &path.display().to_string(), date_column)
}

pub fn read_csv<R: Read>(
    reader: R,
    name: &str,
    origin: &str,
    date_column: Option<&str>,
) -> Result<TimeSeriesTable> {
    let parse_err = |line: u64, msg: String| Error::Parse { path: origin.to_string(), line: line as usize, msg };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_err(1, "missing header row".into()));
    }
    let date_idx = match date_column {
        Some(c) => Some(
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| parse_err(1, format!("no column named '{c}'")))?,
        ),
        None => None,
    };
    let names: Vec<String> =
        header.iter().enumerate().filter(|(i, _)| Some(*i) != date_idx).map(|(_, h)| h.clone()).collect();
    if names.is_empty() {
        return Err(parse_err(1, "no numeric columns".into()));
    }
    let mut series = vec![Vec::new(); names.len()];
    let mut dates = date_idx.map(|_| Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let mut col = 0;
        for (i, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            if Some(i) == date_idx {
                let date = NaiveDate::parse_from_str(cell, "%Y-%m-%d")
                    .map_err(|_| parse_err(line, format!("unparseable date '{cell}'")))?;
                let ds = dates.as_mut().unwrap();
                if ds.last().is_some_and(|prev| *prev >= date) {
                    return Err(parse_err(line, format!("date {date} is not after the previous row")));
                }
                ds.push(date);
            } else {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| parse_err(line, format!("non-numeric value '{cell}' in column '{}'", names[col])))?;
                series[col].push(v);
                col += 1;
            }
        }
    }
    Ok(TimeSeriesTable { name: name.to_string(), dates, names, series })
}

fn month_index(d: NaiveDate) -> i32 {
    d.year() * 12 + d.month0() as i32
}

/// `"MM-YYYY"` for a month index.
fn month_label(idx: i32) -> String {
    format!("{:02}-{}", idx.rem_euclid(12) + 1, idx.div_euclid(12))
}

/// Trailing windows of `window_months` calendar months.
///
/// The window labeled with month `L` holds every row dated from the first day
/// of month `L - window_months + 1` through the last day of month `L`. The
/// first label is the first month for which a full window exists; labels then
/// advance by `step_months` while they do not pass the last data month.
/// Windows with no rows are skipped.
pub fn rolling_windows(
    table: &TimeSeriesTable,
    window_months: usize,
    step_months: usize,
) -> Result<Vec<(String, Sample<f64>)>> {
    let dates = table
        .dates
        .as_ref()
        .ok_or_else(|| Error::invalid_argument(MODULE, "rolling windows need a date column"))?;
    if window_months == 0 || step_months == 0 {
        return Err(Error::invalid_argument(MODULE, "window and step must be at least one month"));
    }
    let (Some(&first), Some(&last)) = (dates.first(), dates.last()) else {
        return Ok(Vec::new());
    };
    let months: Vec<i32> = dates.iter().map(|&d| month_index(d)).collect();
    let w = window_months as i32;
    let mut out = Vec::new();
    let mut label = month_index(first) + w - 1;
    while label <= month_index(last) {
        let lo = months.partition_point(|&m| m < label - w + 1);
        let hi = months.partition_point(|&m| m <= label);
        if hi > lo {
            out.push((month_label(label), table.sample_rows(lo..hi)?));
        }
        label += step_months as i32;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str, date: Option<&str>) -> Result<TimeSeriesTable> {
        read_csv(text.as_bytes(), "t", "t.csv", date)
    }

    #[test]
    fn numeric_table() {
        let mut s = String::from("a,b\n");
        for i in 0..10 {
            s += &format!("{i},{}\n", i * 2);
        }
        let t = table(&s, None).unwrap();
        assert_eq!((t.n(), t.d()), (10, 2));
        assert_eq!(t.to_sample().unwrap().rows.row(3), &[3.0, 6.0]);
    }

    #[test]
    fn dated_table() {
        let t = table("date,x,y\n2005-01-03,1,2\n2005-01-04,3,4\n", Some("date")).unwrap();
        assert_eq!(t.d(), 2);
        assert_eq!(t.dates.unwrap()[0], NaiveDate::from_ymd_opt(2005, 1, 3).unwrap());
    }

    #[test]
    fn parse_errors_name_lines() {
        match table("a,b\n1,2\n3\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match table("a,b\n1,2\n3,x\n", None) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("'b'"));
            }
            other => panic!("{other:?}"),
        }
        assert!(table("date,a\n2005-13-01,1\n", Some("date")).is_err());
        assert!(table("date,a\n2005-01-02,1\n2005-01-01,1\n", Some("date")).is_err());
        assert!(table("", None).is_err());
    }

    #[test]
    fn log_returns() {
        let t = table("p,q\n1,2\n2.718281828459045,2\n", None).unwrap();
        let r = t.log_returns().unwrap();
        assert_eq!(r.n(), 1);
        assert!((r.series[0][0] - 1.0).abs() < 1e-15);
        assert_eq!(r.series[1][0], 0.0);
    }

    fn daily(from: NaiveDate, to: NaiveDate) -> TimeSeriesTable {
        let dates: Vec<NaiveDate> = from.iter_days().take_while(|d| *d <= to).collect();
        let x: Vec<f64> = (0..dates.len()).map(|i| i as f64).collect();
        TimeSeriesTable { name: "d".into(), names: vec!["x".into()], series: vec![x], dates: Some(dates) }
    }

    #[test]
    fn three_year_window() {
        let ymd = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
        let t = daily(ymd(2005, 1, 1), ymd(2007, 12, 31));
        let w = rolling_windows(&t, 36, 1).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0, "12-2007");
        assert_eq!(w[0].1.n(), t.n());

        let t = daily(ymd(2005, 1, 1), ymd(2009, 12, 31));
        let w = rolling_windows(&t, 36, 1).unwrap();
        assert_eq!(w.len(), 25);
        assert_eq!(w[1].0, "01-2008");
        assert_eq!(w[1].1.rows.row(0)[0], 31.0);
        let annual = rolling_windows(&t, 36, 12).unwrap();
        let labels: Vec<&str> = annual.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["12-2007", "12-2008", "12-2009"]);

        assert!(rolling_windows(&t, 120, 1).unwrap().is_empty());
        let undated = TimeSeriesTable { dates: None, ..t };
        assert!(rolling_windows(&undated, 12, 1).is_err());
    }
}
