use std::fs::File;
use std::io;
use std::path::Path;

use crate::learn::EpisodeMetrics;
use crate::scalar::Scalar;

use super::{AggregateSeries, HarnessError, Metric, RawRow, TTestRow};

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>, HarnessError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err(path))
}

pub const RAW_HEADER: [&str; 6] = [
    "trial",
    "episode",
    "steps",
    "return",
    "visited_states",
    "qtable_pairs",
];

/// One row per trial and episode; `trials[k]` is written as trial `k`.
pub fn write_raw_csv<F: Scalar>(
    path: &Path,
    trials: &[Vec<EpisodeMetrics<F>>],
) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    let e = csv_err(path);
    w.write_record(RAW_HEADER).map_err(&e)?;
    for (k, metrics) in trials.iter().enumerate() {
        for (i, m) in metrics.iter().enumerate() {
            w.write_record([
                k.to_string(),
                (i + 1).to_string(),
                m.steps.to_string(),
                m.accumulated_return.to_string(),
                m.visited_states.to_string(),
                m.qtable_pairs.to_string(),
            ])
            .map_err(&e)?;
        }
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(RAW_HEADER) {
        return Err(HarnessError::Csv {
            path: path.to_path_buf(),
            message: format!("expected header {}", RAW_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let bad = |col: &str| HarnessError::Csv {
            path: path.to_path_buf(),
            message: format!("row {}: bad {col}", i + 2),
        };
        let int = |j: usize| rec.get(j).and_then(|v| v.parse::<usize>().ok());
        rows.push(RawRow {
            trial: int(0).ok_or_else(|| bad("trial"))?,
            episode: int(1).ok_or_else(|| bad("episode"))?,
            steps: int(2).ok_or_else(|| bad("steps"))?,
            accumulated_return: rec
                .get(3)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("return"))?,
            visited_states: int(4).ok_or_else(|| bad("visited_states"))?,
            qtable_pairs: int(5).ok_or_else(|| bad("qtable_pairs"))?,
        });
    }
    Ok(rows)
}

pub fn write_aggregate_csv(path: &Path, series: &AggregateSeries) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    let e = csv_err(path);
    let mut header = vec!["episode".to_string()];
    for m in Metric::ALL {
        header.push(format!("{}_mean", m.column()));
        header.push(format!("{}_sd", m.column()));
    }
    w.write_record(&header).map_err(&e)?;
    for row in &series.rows {
        let mut rec = vec![row.episode.to_string()];
        for j in 0..Metric::ALL.len() {
            rec.push(row.mean[j].to_string());
            rec.push(row.sd[j].to_string());
        }
        w.write_record(&rec).map_err(&e)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_ttest_csv(path: &Path, rows: &[TTestRow]) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_ttest(file, rows, path)
}

/// Same layout as [`write_ttest_csv`] to any sink; `label` names it in errors.
pub fn write_ttest<W: io::Write>(sink: W, rows: &[TTestRow], label: &Path) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let e = csv_err(label);
    w.write_record(["episode", "t", "df", "p"]).map_err(&e)?;
    for r in rows {
        w.write_record([
            r.episode.to_string(),
            r.test.t.to_string(),
            r.test.df.to_string(),
            r.test.p.to_string(),
        ])
        .map_err(&e)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: label.to_path_buf(),
        source,
    })
}
