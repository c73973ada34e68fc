//! gnuplot data and scripts overlaying Monte Carlo means on theory curves.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::summary::{summarize, SummaryEntry};
use super::{Experiment, ExperimentRecord};
use crate::error::Result;

/// Splits a statistic into (series, x) when it is indexed by a trailing
/// integer such as `norm_n12` or `s_3`.
fn indexed(stat: &str) -> Option<(&str, f64)> {
    let digits = stat.len() - stat.bytes().rev().take_while(u8::is_ascii_digit).count();
    let (series, idx) = stat.split_at(digits);
    if idx.is_empty() || series.is_empty() || series.ends_with('x') || !series.ends_with(['n', '_']) {
        return None;
    }
    Some((series, idx.parse().ok()?))
}

fn fmt_num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => "NaN".into(),
    }
}

/// One plotted curve: a title and rows `x mean se theory`.
type Block = (String, Vec<(f64, f64, f64, Option<f64>)>);

fn blocks(entries: &[&SummaryEntry]) -> Vec<Block> {
    let mut map: BTreeMap<String, Vec<(f64, f64, f64, Option<f64>)>> = BTreeMap::new();
    for e in entries {
        let (title, x) = match indexed(&e.statistic) {
            Some((series, x)) => (format!("{series} N={} L={}", e.n, e.l), x),
            None => (format!("{} L={}", e.statistic, e.l), e.n as f64),
        };
        map.entry(title).or_default().push((x, e.mean, e.standard_error, e.theory));
    }
    map.into_iter()
        .map(|(t, mut rows)| {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            (t, rows)
        })
        .collect()
}

/// Writes `<experiment>.dat` and `<experiment>.gp` for every experiment in
/// `records` and returns the paths written. Contents depend only on the
/// records.
pub fn emit_plots(records: &[ExperimentRecord], output_dir: &Path) -> Result<Vec<PathBuf>> {
    let summary = summarize(records)?;
    fs::create_dir_all(output_dir)?;
    let mut by_exp: BTreeMap<Experiment, Vec<&SummaryEntry>> = BTreeMap::new();
    for e in &summary.entries {
        by_exp.entry(e.experiment).or_default().push(e);
    }
    let mut written = Vec::new();
    for (exp, entries) in by_exp {
        let name = exp.name();
        let blocks = blocks(&entries);
        let mut dat = format!("# {name}: x mean standard_error theory\n");
        for (i, (title, rows)) in blocks.iter().enumerate() {
            if i > 0 {
                dat.push_str("\n\n");
            }
            let _ = writeln!(dat, "# {title}");
            for (x, mean, se, th) in rows {
                let _ = writeln!(dat, "{x} {} {} {}", fmt_num(Some(*mean)), fmt_num(Some(*se)), fmt_num(*th));
            }
        }
        let mut gp = format!(
            "set terminal pngcairo size 900,600\nset output '{name}.png'\nset title '{name}'\nset key outside right\nplot \\\n"
        );
        let mut lines = Vec::new();
        for (i, (title, rows)) in blocks.iter().enumerate() {
            lines.push(format!("  '{name}.dat' index {i} using 1:2:3 with yerrorbars title '{title}'"));
            if rows.iter().any(|r| r.3.is_some()) {
                lines.push(format!("  '{name}.dat' index {i} using 1:4 with lines dashtype 2 title '{title} theory'"));
            }
        }
        gp.push_str(&lines.join(", \\\n"));
        gp.push('\n');
        let dat_path = output_dir.join(format!("{name}.dat"));
        let gp_path = output_dir.join(format!("{name}.gp"));
        fs::write(&dat_path, dat)?;
        fs::write(&gp_path, gp)?;
        written.push(dat_path);
        written.push(gp_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_statistics() {
        assert_eq!(indexed("norm_n12"), Some(("norm_n", 12.0)));
        assert_eq!(indexed("s_3"), Some(("s_", 3.0)));
        assert_eq!(indexed("sq_norm_n4"), Some(("sq_norm_n", 4.0)));
        assert_eq!(indexed("norm_2x2"), None);
        assert_eq!(indexed("b_mu"), None);
        assert_eq!(indexed("c2"), None);
    }
}
