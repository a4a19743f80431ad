//! Reads sweep CSVs (header-keyed, any column order) and renders one
//! self-contained SVG per distribution: a ratio panel showing the
//! realized optimal-to-FIFO ratio bracket with the analytic ratio
//! bound, and a panel with the analytic gap lower bound. Block size is
//! on a log axis; the ratio panel switches to a log axis too since
//! heavy-tailed ratios span many decades.

use std::io::Read;

use fifogap::{aggregate, BlockSummary, TrialRecord};

use crate::error::CliError;

const REQUIRED_COLUMNS: [&str; 16] = [
    "distribution",
    "block_size",
    "trial",
    "sub_seed",
    "n",
    "p0",
    "r_star",
    "p_fifo",
    "p_star",
    "k_bar",
    "m",
    "gap_lower",
    "ratio_lb",
    "ratio_ub",
    "bound_ratio",
    "condition_holds",
];

struct Columns {
    index: Vec<usize>,
}

impl Columns {
    fn resolve(headers: &csv::StringRecord) -> Result<Self, CliError> {
        let mut index = Vec::with_capacity(REQUIRED_COLUMNS.len());
        let mut missing = Vec::new();
        for name in REQUIRED_COLUMNS {
            match headers.iter().position(|h| h == name) {
                Some(pos) => index.push(pos),
                None => missing.push(name),
            }
        }
        if !missing.is_empty() {
            return Err(CliError::input(format!(
                "CSV header is missing column(s): {}",
                missing.join(", ")
            )));
        }
        Ok(Self { index })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, col: usize) -> &'r str {
        record.get(self.index[col]).unwrap_or("")
    }
}

fn parse_field<T: std::str::FromStr>(raw: &str, name: &str, row: usize) -> Result<T, CliError> {
    raw.parse::<T>().map_err(|_| {
        CliError::input(format!("row {row}: invalid {name} value {raw:?}"))
    })
}

fn parse_opt<T: std::str::FromStr>(
    raw: &str,
    name: &str,
    row: usize,
) -> Result<Option<T>, CliError> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_field(raw, name, row).map(Some)
    }
}

/// Parses a sweep CSV. Accepts any column order but requires every
/// schema column to be present and at least one data row.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<TrialRecord>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("cannot read CSV header: {e}")))?
        .clone();
    let columns = Columns::resolve(&headers)?;

    let mut records = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 2; // 1-based, counting the header line
        let rec = result.map_err(|e| CliError::input(format!("row {row}: {e}")))?;
        records.push(TrialRecord {
            distribution: columns.get(&rec, 0).to_string(),
            block_size: parse_field(columns.get(&rec, 1), "block_size", row)?,
            trial: parse_field(columns.get(&rec, 2), "trial", row)?,
            sub_seed: parse_field(columns.get(&rec, 3), "sub_seed", row)?,
            n: parse_field(columns.get(&rec, 4), "n", row)?,
            p0: parse_field(columns.get(&rec, 5), "p0", row)?,
            r_star: parse_field(columns.get(&rec, 6), "r_star", row)?,
            p_fifo: parse_field(columns.get(&rec, 7), "p_fifo", row)?,
            p_star: parse_opt(columns.get(&rec, 8), "p_star", row)?,
            k_bar: parse_field(columns.get(&rec, 9), "k_bar", row)?,
            m: parse_opt(columns.get(&rec, 10), "m", row)?,
            gap_lower: parse_field(columns.get(&rec, 11), "gap_lower", row)?,
            ratio_lb: parse_opt(columns.get(&rec, 12), "ratio_lb", row)?,
            ratio_ub: parse_opt(columns.get(&rec, 13), "ratio_ub", row)?,
            bound_ratio: parse_opt(columns.get(&rec, 14), "bound_ratio", row)?,
            condition_holds: parse_field(columns.get(&rec, 15), "condition_holds", row)?,
        });
    }
    if records.is_empty() {
        return Err(CliError::input("CSV contains a header but no data rows"));
    }
    Ok(records)
}

/// File-name slug for a distribution label: `lognormal(1,1)` becomes
/// `lognormal-1-1`.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

/// Renders one SVG document per distribution present in the records,
/// returning `(slug, svg)` pairs in first-appearance order.
pub fn render_figures(records: &[TrialRecord]) -> Result<Vec<(String, String)>, CliError> {
    let summaries = aggregate(records).map_err(|e| CliError::input(e.to_string()))?;
    let mut dists: Vec<String> = Vec::new();
    for s in &summaries {
        if !dists.contains(&s.distribution) {
            dists.push(s.distribution.clone());
        }
    }
    Ok(dists
        .into_iter()
        .map(|dist| {
            let rows: Vec<&BlockSummary> =
                summaries.iter().filter(|s| s.distribution == dist).collect();
            (slug(&dist), figure_svg(&dist, &rows))
        })
        .collect())
}

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

fn mean_points(rows: &[&BlockSummary], pick: impl Fn(&BlockSummary) -> Option<f64>) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|s| pick(s).map(|y| (s.block_size, y)))
        .collect()
}

fn figure_svg(dist: &str, rows: &[&BlockSummary]) -> String {
    const WIDTH: f64 = 980.0;
    const HEIGHT: f64 = 430.0;
    let ratio_series = vec![
        Series {
            label: "realized ratio (greedy / FIFO)",
            color: "#1f77b4",
            points: mean_points(rows, |s| s.ratio_lb.map(|t| t.mean)),
        },
        Series {
            label: "realized ratio (relaxation / FIFO)",
            color: "#ff7f0e",
            points: mean_points(rows, |s| s.ratio_ub.map(|t| t.mean)),
        },
        Series {
            label: "analytic ratio bound",
            color: "#2ca02c",
            points: mean_points(rows, |s| s.bound_ratio.map(|t| t.mean)),
        },
    ];
    let gap_series = vec![Series {
        label: "analytic gap lower bound",
        color: "#d62728",
        points: mean_points(rows, |s| s.gap_lower.map(|t| t.mean)),
    }];

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(dist)
    ));
    svg.push_str(&panel(
        Rect { x: 55.0, y: 45.0, w: 400.0, h: 320.0 },
        "block size (gas)",
        "mean optimal / FIFO utility ratio",
        &ratio_series,
        true,
        Some((0, 1)),
    ));
    svg.push_str(&panel(
        Rect { x: 555.0, y: 45.0, w: 400.0, h: 320.0 },
        "block size (gas)",
        "mean gap lower bound (L - U)",
        &gap_series,
        false,
        None,
    ));
    svg.push_str("</svg>\n");
    svg
}

struct Rect {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw_step = span / 5.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(magnitude);
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let abs = v.abs();
    if (1e-3..1e6).contains(&abs) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Draws one chart panel. `band` names two series indices to fill
/// between. Log-scaled axes drop nonpositive values.
fn panel(
    area: Rect,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_y: bool,
    band: Option<(usize, usize)>,
) -> String {
    let mut out = String::new();
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if x > 0.0 && (!log_y || y > 0.0) {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    out.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\"/>\n",
        area.x, area.y, area.w, area.h
    ));
    let label_y = area.y + area.h + 35.0;
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{label_y:.2}\" text-anchor=\"middle\">{}</text>\n",
        area.x + area.w / 2.0,
        xml_escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>\n",
        area.x - 42.0,
        area.y + area.h / 2.0,
        area.x - 42.0,
        area.y + area.h / 2.0,
        xml_escape(y_label)
    ));
    if xs.is_empty() {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#888\">no defined values</text>\n",
            area.x + area.w / 2.0,
            area.y + area.h / 2.0
        ));
        return out;
    }

    let (x_lo, x_hi) = padded_log_range(&xs);
    let to_x = |v: f64| area.x + (v.log10() - x_lo) / (x_hi - x_lo) * area.w;
    let (y_lo, y_hi, to_y): (f64, f64, Box<dyn Fn(f64) -> f64>) = if log_y {
        let (lo, hi) = padded_log_range(&ys);
        let (ax, ah) = (area.y, area.h);
        (
            lo,
            hi,
            Box::new(move |v: f64| ax + ah - (v.log10() - lo) / (hi - lo) * ah),
        )
    } else {
        let mut lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        let pad = (hi - lo) * 0.08;
        lo -= pad;
        hi += pad;
        let (ax, ah) = (area.y, area.h);
        (
            lo,
            hi,
            Box::new(move |v: f64| ax + ah - (v - lo) / (hi - lo) * ah),
        )
    };

    // x ticks at the distinct block sizes present.
    let mut x_ticks: Vec<f64> = xs.clone();
    x_ticks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    x_ticks.dedup();
    for &t in &x_ticks {
        let px = to_x(t);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>\n",
            area.y + area.h,
            area.y + area.h + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            area.y + area.h + 18.0,
            format_tick(t)
        ));
    }
    // y ticks: decades when logarithmic, nice steps otherwise.
    let y_ticks: Vec<f64> = if log_y {
        let lo = y_lo.ceil() as i32;
        let hi = y_hi.floor() as i32;
        (lo..=hi).map(|k| 10f64.powi(k)).collect()
    } else {
        nice_ticks(y_lo, y_hi)
    };
    for &t in &y_ticks {
        let py = to_y(t);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#ddd\"/>\n",
            area.x,
            area.x + area.w
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            area.x - 6.0,
            py + 4.0,
            format_tick(t)
        ));
    }

    let usable =
        |points: &[(f64, f64)]| -> Vec<(f64, f64)> {
            points
                .iter()
                .filter(|&&(x, y)| x > 0.0 && (!log_y || y > 0.0))
                .cloned()
                .collect()
        };
    if let Some((a, b)) = band {
        let lower = usable(&series[a].points);
        let upper = usable(&series[b].points);
        if lower.len() == upper.len() && lower.len() > 1 {
            let mut d = String::new();
            for (i, &(x, y)) in lower.iter().enumerate() {
                d.push_str(&format!(
                    "{}{:.2},{:.2} ",
                    if i == 0 { "M" } else { "L" },
                    to_x(x),
                    to_y(y)
                ));
            }
            for &(x, y) in upper.iter().rev() {
                d.push_str(&format!("L{:.2},{:.2} ", to_x(x), to_y(y)));
            }
            d.push('Z');
            out.push_str(&format!(
                "<path d=\"{d}\" fill=\"#1f77b4\" fill-opacity=\"0.12\" stroke=\"none\"/>\n"
            ));
        }
    }

    for s in series {
        let pts = usable(&s.points);
        if pts.is_empty() {
            continue;
        }
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", to_x(x), to_y(y)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>\n",
            path.join(" "),
            s.color
        ));
        for &(x, y) in &pts {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>\n",
                to_x(x),
                to_y(y),
                s.color
            ));
        }
    }

    // Legend, top-left inside the panel.
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let ly = area.y + 16.0 + i as f64 * 16.0;
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            area.x + 8.0,
            area.x + 28.0,
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            area.x + 33.0,
            ly + 4.0,
            xml_escape(s.label)
        ));
    }
    out
}

fn padded_log_range(values: &[f64]) -> (f64, f64) {
    let mut lo = values.iter().cloned().fold(f64::INFINITY, f64::min).log10();
    let mut hi = values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        .log10();
    if hi - lo < 0.2 {
        lo -= 0.2;
        hi += 0.2;
    } else {
        let pad = (hi - lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    (lo, hi)
}
