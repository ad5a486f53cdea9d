//! Plot-ready CSV tables for the tabular results of a report.

use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::run::{ReportEnvelope, RunResult};

/// A float at 17 significant digits; infinities as `inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Header and rows of a tabular result; `None` for scalar reports.
pub fn table_of(result: &RunResult) -> Option<(String, Vec<&'static str>, Vec<Vec<String>>)> {
    let f = |x: f64| fmt_num(x);
    Some(match result {
        RunResult::Smallball(scan) => (
            "smallball".into(),
            vec!["s", "estimate", "stderr", "profile", "ratio"],
            scan.rows
                .iter()
                .map(|r| vec![f(r.s), f(r.estimate.value), f(r.estimate.stderr), f(r.profile), f(r.ratio)])
                .collect(),
        ),
        RunResult::Tail(t) => (
            "tail".into(),
            vec!["t", "estimate", "stderr", "rate", "flagged"],
            t.rows
                .iter()
                .map(|r| {
                    vec![f(r.t), f(r.estimate.value), f(r.estimate.stderr), r.rate.map_or_else(String::new, f), r.flagged.to_string()]
                })
                .collect(),
        ),
        RunResult::Divergence { degree, rows } => (
            format!("divergence-d{degree}"),
            vec!["a", "eps_star", "witness_ratio"],
            rows.iter().map(|r| vec![f(r.a), f(r.eps_star), f(r.witness_ratio)]).collect(),
        ),
        RunResult::Profile(cells) => (
            "profile".into(),
            vec!["d", "n", "best_ratio", "infinite_count"],
            cells
                .iter()
                .map(|c| vec![c.d.to_string(), c.n.to_string(), f(c.best_ratio), c.infinite_count.to_string()])
                .collect(),
        ),
        RunResult::Search(s) => (
            "search-trajectory".into(),
            vec!["start", "best_ratio"],
            s.trajectory.iter().map(|p| vec![p.start.to_string(), f(p.best_ratio)]).collect(),
        ),
        _ => return None,
    })
}

/// Writes one table to `path`, header first.
pub fn emit_table(result: &RunResult, path: &Path) -> Result<bool, CliError> {
    let Some((_, header, rows)) = table_of(result) else {
        return Ok(false);
    };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(true)
}

/// One CSV per tabular result, named `<stem>.<table>.csv` beside `json_path`.
pub fn emit_tables(env: &ReportEnvelope, json_path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let stem = json_path.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    let dir = json_path.parent().unwrap_or(Path::new(""));
    let mut written = Vec::new();
    for res in &env.results {
        if let Some((name, _, _)) = table_of(res) {
            let path = dir.join(format!("{stem}.{name}.csv"));
            emit_table(res, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyconc::search::DivergenceRow;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 123456789.123456789] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_table_has_header_only() {
        let dir = std::env::temp_dir().join(format!("polyconc-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        assert!(emit_table(&RunResult::Divergence { degree: 3, rows: vec![] }, &path).unwrap());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,eps_star,witness_ratio\n");
        let row = DivergenceRow { a: 10.0, eps_star: 0.5, witness_ratio: 2.0 };
        emit_table(&RunResult::Divergence { degree: 3, rows: vec![row] }, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "1.0000000000000000e1,5.0000000000000000e-1,2.0000000000000000e0");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
