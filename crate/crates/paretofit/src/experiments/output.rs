//! Result tables and report files.
//!
//! Every experiment produces a long-format table (one row per observation),
//! JSON aggregates and a set of 2-D series for the SVG report. Rows are
//! keyed and sorted before writing so results.csv is byte-identical across
//! reruns of the same config, regardless of execution order.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::Command;

use crate::error::{Error, Result};

/// One observation in the long-format results table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub method: String,
    /// Preference weights; empty for front-level metrics.
    pub lambda: Vec<f64>,
    /// Position of the weight vector in the experiment's grid, for sorting.
    pub lambda_index: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

/// A named polyline for the SVG report.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Everything an experiment hands to [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub experiment: String,
    pub rows: Vec<Row>,
    pub summary: serde_json::Value,
    pub config_echo: serde_json::Value,
    pub series: Vec<Series>,
    pub x_label: String,
    pub y_label: String,
}

fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn lambda_string(lambda: &[f64]) -> String {
    lambda
        .iter()
        .map(|w| fmt_f64(*w))
        .collect::<Vec<_>>()
        .join(";")
}

/// Render the sorted long-format CSV.
pub fn results_csv(output: &RunOutput) -> String {
    let mut rows: Vec<&Row> = output.rows.iter().collect();
    rows.sort_by(|a, b| {
        (&a.method, a.lambda_index, a.seed, &a.metric).cmp(&(
            &b.method,
            b.lambda_index,
            b.seed,
            &b.metric,
        ))
    });
    let mut out = String::from("experiment,method,lambda,seed,metric,value\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            output.experiment,
            row.method,
            lambda_string(&row.lambda),
            row.seed,
            row.metric,
            fmt_f64(row.value)
        );
    }
    out
}

/// Parse a results.csv produced by [`results_csv`] back into rows (the
/// lambda index is not stored in the file and comes back as zero).
pub fn parse_results_csv(text: &str) -> Result<Vec<(String, Row)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "experiment,method,lambda,seed,metric,value" {
                return Err(Error::Config(format!("unexpected header: {line}")));
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::Config(format!(
                "line {} has {} fields",
                i + 1,
                parts.len()
            )));
        }
        let lambda: Vec<f64> = if parts[2].is_empty() {
            Vec::new()
        } else {
            parts[2]
                .split(';')
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?
        };
        out.push((
            parts[0].to_string(),
            Row {
                method: parts[1].to_string(),
                lambda,
                lambda_index: 0,
                seed: parts[3]
                    .parse()
                    .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?,
                metric: parts[4].to_string(),
                value: parts[5]
                    .parse()
                    .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?,
            },
        ));
    }
    Ok(out)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

/// Minimal static SVG: axes, one polyline per series, a text legend.
pub fn front_svg(output: &RunOutput) -> String {
    let (w, h) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 20.0, 50.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let pts: Vec<(f64, f64)> = output
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\">no data</text>",
            w / 2.0 - 30.0,
            h / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb,
        w - mr,
        h - mb
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb
    );
    let _ = writeln!(
        svg,
        "<text x=\"{ml}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\">{:.4}</text>",
        h - mb + 16.0,
        x0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" text-anchor=\"end\">{:.4}</text>",
        w - mr,
        h - mb + 16.0,
        x1
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" text-anchor=\"end\">{:.4}</text>",
        ml - 6.0,
        h - mb,
        y0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" text-anchor=\"end\">{:.4}</text>",
        ml - 6.0,
        mt + 10.0,
        y1
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" text-anchor=\"middle\">{}</text>",
        (ml + w - mr) / 2.0,
        h - 12.0,
        output.x_label
    );
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
        output.y_label
    );
    for (i, series) in output.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y)))
            .collect();
        if path.len() > 1 {
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                path.join(" ")
            );
        } else if path.len() == 1 {
            let xy: Vec<&str> = path[0].split(',').collect();
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
                xy[0], xy[1]
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" fill=\"{color}\">{}</text>",
            w - mr - 200.0,
            mt + 14.0 * (i as f64 + 1.0),
            series.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unavailable".to_string())
}

/// Write results.csv, summary.json and front.svg into `out_dir`.
pub fn emit_outputs(output: &RunOutput, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.to_path_buf(), e))?;
    let write = |name: &str, contents: &str| -> Result<()> {
        let path = out_dir.join(name);
        let mut f = std::fs::File::create(&path).map_err(|e| Error::io(path.clone(), e))?;
        f.write_all(contents.as_bytes())
            .map_err(|e| Error::io(path.clone(), e))
    };
    write("results.csv", &results_csv(output))?;
    let summary = serde_json::json!({
        "experiment": output.experiment,
        "config": output.config_echo,
        "aggregates": output.summary,
        "rows": output.rows.len(),
        "git_describe": git_describe(),
    });
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    text.push('\n');
    write("summary.json", &text)?;
    write("front.svg", &front_svg(output))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_output(rows: Vec<Row>) -> RunOutput {
        RunOutput {
            experiment: "test".into(),
            rows,
            summary: serde_json::json!({}),
            config_echo: serde_json::json!({}),
            series: vec![],
            x_label: "x".into(),
            y_label: "y".into(),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = results_csv(&sample_output(vec![]));
        assert_eq!(csv, "experiment,method,lambda,seed,metric,value\n");
    }

    #[test]
    fn rows_sort_deterministically_and_roundtrip() {
        let rows = vec![
            Row {
                method: "b".into(),
                lambda: vec![0.5, 0.5],
                lambda_index: 1,
                seed: 2,
                metric: "m".into(),
                value: 1.25,
            },
            Row {
                method: "a".into(),
                lambda: vec![1.0, 0.0],
                lambda_index: 0,
                seed: 7,
                metric: "m".into(),
                value: -0.5,
            },
        ];
        let out = sample_output(rows.clone());
        let text = results_csv(&out);
        assert!(text.lines().nth(1).unwrap().starts_with("test,a,"));
        let parsed = parse_results_csv(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].1.method, "a");
        assert_eq!(parsed[0].1.value, -0.5);
        assert_eq!(parsed[1].1.lambda, vec![0.5, 0.5]);
        // Reversing input order changes nothing.
        let reversed = sample_output(vec![rows[1].clone(), rows[0].clone()]);
        assert_eq!(results_csv(&reversed), text);
    }

    #[test]
    fn svg_always_renders() {
        let mut out = sample_output(vec![]);
        assert!(front_svg(&out).contains("no data"));
        out.series.push(Series {
            name: "front".into(),
            points: vec![(0.0, 1.0), (0.5, 0.5), (1.0, 0.2)],
        });
        let svg = front_svg(&out);
        assert!(svg.contains("polyline"));
        assert!(svg.contains("front"));
    }
}
