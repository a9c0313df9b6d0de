use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::bench::{Aggregate, BenchReport};
use crate::error::{Error, Result};

pub const REPORT_FILE: &str = "report.csv";
pub const PLOTDATA_DIR: &str = "plotdata";

pub const REPORT_COLUMNS: [&str; 14] = [
    "axis_kind",
    "axis_value",
    "model",
    "graph_seed",
    "restart_seed",
    "f1_macro",
    "accuracy",
    "epochs",
    "epoch_time_s",
    "agg",
    "f1_macro_std",
    "accuracy_std",
    "params",
    "error",
];

const MISSING: &str = "NA";

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        MISSING.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| MISSING.to_string(), num)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.into(),
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Writes `report.csv` and the `plotdata/` TSVs under `dir`; returns the
/// paths written.
type MetricPick = fn(&Aggregate) -> Option<(f64, f64)>;

pub fn write_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join(PLOTDATA_DIR)).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(REPORT_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record(REPORT_COLUMNS).map_err(|e| csv_error(&path, e))?;
    for r in &report.records {
        w.write_record([
            report.axis_kind.clone(),
            r.axis_value.clone(),
            r.model.to_string(),
            r.graph_seed.to_string(),
            r.restart_seed.to_string(),
            num(r.f1_macro),
            num(r.accuracy),
            r.epochs.to_string(),
            opt(r.epoch_time_s),
            "0".into(),
            String::new(),
            String::new(),
            r.params.clone().unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(|e| csv_error(&path, e))?;
    }
    for a in &report.aggregates {
        w.write_record([
            report.axis_kind.clone(),
            a.axis_value.clone(),
            a.model.to_string(),
            String::new(),
            String::new(),
            num(a.f1_macro_mean),
            num(a.accuracy_mean),
            num(a.epochs_mean),
            opt(a.epoch_time_mean),
            "1".into(),
            num(a.f1_macro_std),
            num(a.accuracy_std),
            String::new(),
            if a.failures > 0 {
                format!("{} of {} runs failed", a.failures, a.failures + a.runs)
            } else {
                String::new()
            },
        ])
        .map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let mut written = vec![path];
    let metrics: [(&str, MetricPick); 3] = [
        ("f1_macro", |a| Some((a.f1_macro_mean, a.f1_macro_std))),
        ("accuracy", |a| Some((a.accuracy_mean, a.accuracy_std))),
        ("epoch_time", |a| a.epoch_time_mean.zip(a.epoch_time_std)),
    ];
    for (name, pick) in metrics {
        if report.aggregates.iter().all(|a| pick(a).is_none()) {
            continue;
        }
        let mut text = String::from("x\tmodel\tmean\tstd\n");
        for a in &report.aggregates {
            let (mean, std) = pick(a).unwrap_or((f64::NAN, f64::NAN));
            writeln!(text, "{}\t{}\t{}\t{}", a.axis_value, a.model, num(mean), num(std)).unwrap();
        }
        let p = dir
            .join(PLOTDATA_DIR)
            .join(format!("{}_{name}.tsv", report.axis_kind));
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        written.push(p);
    }
    Ok(written)
}

/// Aggregate rows of a report file, as an aligned text table.
pub fn render_report(path: &Path) -> Result<String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            path: path.into(),
            line: 1,
            message: format!("missing column `{name}`"),
        })
    };
    let idx: Vec<usize> = [
        "axis_kind",
        "axis_value",
        "model",
        "f1_macro",
        "f1_macro_std",
        "accuracy",
        "accuracy_std",
        "epoch_time_s",
        "agg",
        "error",
    ]
    .iter()
    .map(|c| col(c))
    .collect::<Result<_>>()?;

    let mut rows: Vec<[String; 6]> = Vec::new();
    let mut kind = String::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line: line + 2,
            message: e.to_string(),
        })?;
        let get = |i: usize| rec.get(idx[i]).unwrap_or("").to_string();
        if get(8) != "1" {
            continue;
        }
        kind = get(0);
        rows.push([
            get(1),
            get(2),
            format!("{} ± {}", short(&get(3)), short(&get(4))),
            format!("{} ± {}", short(&get(5)), short(&get(6))),
            short(&get(7)),
            get(9),
        ]);
    }
    let header = [kind.as_str(), "model", "f1_macro", "accuracy", "epoch_time_s", "note"];
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut push = |cells: Vec<&str>| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push(header.to_vec());
    for r in &rows {
        push(r.iter().map(String::as_str).collect());
    }
    Ok(out)
}

fn short(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if x != 0.0 && x.abs() < 1e-3 => format!("{x:.2e}"),
        Ok(x) => format!("{x:.4}"),
        Err(_) => v.to_string(),
    }
}
