//! CSV and standalone SVG output for pairwise scatter plots and
//! critical-difference diagrams.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::stats::{wilcoxon_signed_rank, win_tie_loss, PairedAccuracies, RankTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

fn outputs(stem: &Path) -> ReportFiles {
    ReportFiles {
        csv: stem.with_extension("csv"),
        svg: stem.with_extension("svg"),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::usage(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::usage(format!("csv encoding failed: {e}")))
}

const SCATTER_SIZE: f64 = 400.0;
const SCATTER_MARGIN: f64 = 60.0;

/// Renders the pairwise accuracy scatter for classifiers `labels.0` (x axis)
/// and `labels.1` (y axis). Writes `<stem>.csv` and `<stem>.svg`.
pub fn emit_scatter(
    pairs: &PairedAccuracies,
    labels: (&str, &str),
    stem: impl AsRef<Path>,
) -> Result<ReportFiles> {
    let files = outputs(stem.as_ref());
    let csv = csv_bytes(
        &["dataset", "acc_a", "acc_b"],
        pairs
            .rows()
            .iter()
            .map(|r| vec![r.dataset.clone(), r.acc_a.to_string(), r.acc_b.to_string()]),
    )?;
    write_file(&files.csv, &csv)?;
    write_file(&files.svg, scatter_svg(pairs, labels)?.as_bytes())?;
    Ok(files)
}

pub fn scatter_svg(pairs: &PairedAccuracies, labels: (&str, &str)) -> Result<String> {
    let (wins_a, ties, wins_b) = win_tie_loss(pairs)?;
    let p = wilcoxon_signed_rank(pairs)?.p_value;
    let m = SCATTER_MARGIN;
    let size = SCATTER_SIZE;
    let total = size + 2.0 * m;
    let x = |acc: f64| m + acc * size;
    let y = |acc: f64| m + (1.0 - acc) * size;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{total}" height="{total}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{m}" y="{m}" width="{size}" height="{size}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    );
    for tick in 0..=5 {
        let v = tick as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{v:.1}</text>"#,
            x(v),
            y(0.0) + 14.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{v:.1}</text>"#,
            x(0.0) - 4.0,
            y(v) + 3.0
        );
    }
    for r in pairs.rows() {
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"><title>{}</title></circle>"#,
            x(r.acc_a),
            y(r.acc_b),
            escape(&r.dataset)
        );
    }
    let (la, lb) = (escape(labels.0), escape(labels.1));
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{la}</text>"#,
        m + size / 2.0,
        total - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {:.2})">{lb}</text>"#,
        m + size / 2.0,
        m + size / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="summary" x="{:.2}" y="{:.2}" font-size="11">{la} wins: {wins_a}, ties: {ties}, {lb} wins: {wins_b}, Wilcoxon p = {p:.4}</text>"#,
        m,
        m - 20.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

const CD_WIDTH: f64 = 600.0;
const CD_MARGIN: f64 = 80.0;
const CD_AXIS_Y: f64 = 60.0;
const CD_ROW: f64 = 22.0;

/// Renders a critical-difference diagram: classifiers placed by mean rank on
/// an axis running from `k` (left) to 1 (right), with one bar per group of
/// indistinguishable classifiers. Writes `<stem>.csv` and `<stem>.svg`.
pub fn emit_cd(
    table: &RankTable,
    groups: &[Vec<usize>],
    stem: impl AsRef<Path>,
) -> Result<ReportFiles> {
    let files = outputs(stem.as_ref());
    let csv = csv_bytes(
        &["classifier", "mean_rank"],
        table
            .classifiers
            .iter()
            .zip(&table.mean_ranks)
            .map(|(c, r)| vec![c.clone(), r.to_string()]),
    )?;
    write_file(&files.csv, &csv)?;
    write_file(&files.svg, cd_svg(table, groups)?.as_bytes())?;
    Ok(files)
}

pub fn cd_svg(table: &RankTable, groups: &[Vec<usize>]) -> Result<String> {
    let k = table.classifiers.len();
    if k == 0 || table.mean_ranks.len() != k {
        return Err(Error::usage("rank table is empty or inconsistent"));
    }
    if let Some(bad) = groups.iter().flatten().find(|&&i| i >= k) {
        return Err(Error::usage(format!(
            "group member {bad} is not a classifier index"
        )));
    }
    let span = CD_WIDTH - 2.0 * CD_MARGIN;
    let lowest = k.max(2) as f64;
    let x = |rank: f64| CD_MARGIN + (lowest - rank) / (lowest - 1.0) * span;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| table.mean_ranks[b].total_cmp(&table.mean_ranks[a]));
    let labels_bottom = CD_AXIS_Y + 30.0 + CD_ROW * k as f64;
    let height = labels_bottom + 20.0 + 12.0 * groups.len() as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CD_WIDTH}" height="{height}" viewBox="0 0 {CD_WIDTH} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{CD_WIDTH}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{:.2}" y1="{CD_AXIS_Y}" x2="{:.2}" y2="{CD_AXIS_Y}" stroke="black"/>"#,
        x(lowest),
        x(1.0)
    );
    for r in 1..=k.max(2) {
        let rx = x(r as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{rx:.2}" y1="{:.2}" x2="{rx:.2}" y2="{CD_AXIS_Y}" stroke="black"/>"#,
            CD_AXIS_Y - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{rx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{r}</text>"#,
            CD_AXIS_Y - 10.0
        );
    }
    // Worse half labelled on the left, better half on the right.
    for (row, &c) in order.iter().enumerate() {
        let rank = table.mean_ranks[c];
        let rx = x(rank);
        let ly = CD_AXIS_Y + 30.0 + CD_ROW * row as f64;
        let left = row < k.div_ceil(2);
        let (tx, anchor) = if left {
            (CD_MARGIN - 10.0, "end")
        } else {
            (CD_WIDTH - CD_MARGIN + 10.0, "start")
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="black" points="{rx:.2},{CD_AXIS_Y} {rx:.2},{ly:.2} {:.2},{ly:.2}"/>"#,
            if left {
                CD_MARGIN - 5.0
            } else {
                CD_WIDTH - CD_MARGIN + 5.0
            }
        );
        let _ = writeln!(
            svg,
            r#"<text class="classifier" x="{tx:.2}" y="{:.2}" font-size="11" text-anchor="{anchor}">{} ({rank:.4})</text>"#,
            ly + 4.0,
            escape(&table.classifiers[c])
        );
    }
    for (g, group) in groups.iter().enumerate() {
        let ranks = group.iter().map(|&i| table.mean_ranks[i]);
        let worst = ranks.clone().fold(f64::NEG_INFINITY, f64::max);
        let best = ranks.fold(f64::INFINITY, f64::min);
        let gy = CD_AXIS_Y + 12.0 + 6.0 * g as f64;
        let _ = writeln!(
            svg,
            r#"<line class="clique" x1="{:.2}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}" stroke="black" stroke-width="4"/>"#,
            x(worst) - 3.0,
            x(best) + 3.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean_ranks, AccuracyMatrix};

    #[test]
    fn single_pair_scatter() {
        let dir = tempfile::tempdir().unwrap();
        let pairs = PairedAccuracies::from_columns(&[0.5], &[0.5]).unwrap();
        let files = emit_scatter(&pairs, ("a", "b"), dir.path().join("s")).unwrap();
        let csv = fs::read_to_string(&files.csv).unwrap();
        assert_eq!(csv, "dataset,acc_a,acc_b\nd0,0.5,0.5\n");
        let svg = fs::read_to_string(&files.svg).unwrap();
        assert_eq!(svg.matches("class=\"point\"").count(), 1);
        // The point sits on the diagonal: cx + cy = 2m + size.
        assert!(svg.contains(r#"cx="260.00" cy="260.00""#));
        assert!(svg.contains("class=\"diagonal\""));
        assert!(svg.contains("ties: 1"));
    }

    #[test]
    fn cd_without_groups_has_no_bars() {
        let m = AccuracyMatrix::new(
            vec!["x".into(), "y<&>".into()],
            vec!["d".into()],
            vec![vec![0.9, 0.1]],
        )
        .unwrap();
        let svg = cd_svg(&mean_ranks(&m), &[]).unwrap();
        assert!(!svg.contains("class=\"clique\""));
        assert!(svg.contains("y&lt;&amp;&gt;"));
        assert!(cd_svg(&mean_ranks(&m), &[vec![0, 5]]).is_err());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let pairs = PairedAccuracies::from_columns(&[0.5], &[0.5]).unwrap();
        let err = emit_scatter(&pairs, ("a", "b"), blocker.join("sub").join("s")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
