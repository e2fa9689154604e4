//! CSV results and self-contained SVG plots.
//!
//! Sweep CSV layout: `#`-prefixed lines carrying the resolved config, then
//! the header
//! `sweep_var,value,solver,nmse_mean,nmse_median,nmse_stderr,trials,mean_Q,seed,config_hash`
//! and one row per (sweep point, solver). Floats use Rust's shortest
//! round-trip formatting, so a replot from CSV is byte-identical to the
//! plot written at sweep time.

use super::config::{SolverId, SweepVar};
use super::{PointSummary, SweepResult};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str =
    "sweep_var,value,solver,nmse_mean,nmse_median,nmse_stderr,trials,mean_Q,seed,config_hash";

/// Sweep rows as read back from a CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub config_text: String,
    pub seed: u64,
    pub config_hash: String,
    pub rows: Vec<PointSummary>,
}

impl SweepTable {
    pub fn from_result(r: &SweepResult) -> Self {
        Self {
            config_text: r.config.to_text(),
            seed: r.config.seed,
            config_hash: r.fingerprint.clone(),
            rows: r.summaries.clone(),
        }
    }

    /// Solvers in order of first appearance.
    pub fn solvers(&self) -> Vec<SolverId> {
        let mut out: Vec<SolverId> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.solver) {
                out.push(r.solver);
            }
        }
        out
    }
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::new();
    for line in table.config_text.lines() {
        let _ = writeln!(s, "# {line}");
    }
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.var,
            r.value,
            r.solver,
            r.nmse_mean,
            r.nmse_median,
            r.nmse_stderr,
            r.trials,
            r.mean_q,
            table.seed,
            table.config_hash
        );
    }
    s
}

fn field<T: std::str::FromStr>(v: &str, name: &str, line: usize) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("CSV line {line}: bad {name} '{v}'")))
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepTable> {
    let mut config_text = String::new();
    let mut rows = Vec::new();
    let mut seed = 0;
    let mut hash = String::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if let Some(c) = line.strip_prefix("# ") {
            config_text.push_str(c);
            config_text.push('\n');
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != CSV_HEADER {
                return Err(Error::Config(format!("CSV line {n}: unexpected header")));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Config(format!("CSV line {n}: expected 10 fields")));
        }
        let var: SweepVar = f[0].parse()?;
        let solver: SolverId = f[2].parse()?;
        seed = field(f[8], "seed", n)?;
        hash = f[9].trim().to_string();
        rows.push(PointSummary {
            var,
            value: field(f[1], "value", n)?,
            solver,
            nmse_mean: field(f[3], "nmse_mean", n)?,
            nmse_median: field(f[4], "nmse_median", n)?,
            nmse_stderr: field(f[5], "nmse_stderr", n)?,
            trials: field(f[6], "trials", n)?,
            mean_q: field(f[7], "mean_Q", n)?,
        });
    }
    if !saw_header {
        return Err(Error::Config("CSV has no header".into()));
    }
    Ok(SweepTable {
        config_text,
        seed,
        config_hash: hash,
        rows,
    })
}

/// A line chart rendered to standalone SVG.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub markers: bool,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
    /// Free text stored in the SVG `<desc>` element.
    pub description: String,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let (w, h) = (720.0, 480.0);
        let (ml, mr, mt, mb) = (80.0, 170.0, 40.0, 60.0);
        let pw = w - ml - mr;
        let ph = h - mt - mb;

        let usable = |y: f64| y.is_finite() && (!self.log_y || y > 0.0);
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|(_, s)| s.iter().cloned())
            .filter(|&(x, y)| x.is_finite() && usable(y))
            .collect();
        let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        let ty = |y: f64| if self.log_y { y.log10() } else { y };
        let (mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(ty(p.1)), a.1.max(ty(p.1))));
        if !y0.is_finite() {
            (y0, y1) = (0.0, 1.0);
        }
        if self.log_y {
            y0 = y0.floor();
            y1 = y1.ceil();
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| mt + ph - (ty(y) - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, "<desc>{}</desc>", xml_escape(&self.description));
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            ml + pw / 2.0,
            xml_escape(&self.title)
        );
        // y grid and ticks
        if self.log_y {
            for e in (y0 as i64)..=(y1 as i64) {
                let py = sy(10f64.powi(e as i32));
                let _ = writeln!(s, r##"<line x1="{ml:.1}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##, ml + pw);
                let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#, ml - 6.0, py + 4.0);
            }
        } else {
            for i in 0..=5 {
                let v = y0 + (y1 - y0) * i as f64 / 5.0;
                let py = sy(v);
                let _ = writeln!(s, r##"<line x1="{ml:.1}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##, ml + pw);
                let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, ml - 6.0, py + 4.0);
            }
        }
        for i in 0..=5 {
            let v = x0 + (x1 - x0) * i as f64 / 5.0;
            let px = sx(v);
            let _ = writeln!(s, r##"<line x1="{px:.1}" y1="{mt:.1}" x2="{px:.1}" y2="{:.1}" stroke="#eee"/>"##, mt + ph);
            let _ = writeln!(s, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, mt + ph + 18.0, fmt_tick(v));
        }
        let _ = writeln!(s, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            h - 16.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(20 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );

        for (i, (name, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = pts
                .iter()
                .filter(|&&(x, y)| x.is_finite() && usable(y))
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<g class="series" data-name="{}"><polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
                xml_escape(name),
                coords.join(" ")
            );
            if self.markers {
                for c in &coords {
                    let (cx, cy) = c.split_once(',').unwrap_or(("0", "0"));
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
                }
            }
            let _ = writeln!(s, "</g>");
            let ly = mt + 14.0 + 18.0 * i as f64;
            let lx = ml + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                xml_escape(name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

/// NMSE-vs-sweep-variable plot, one series per solver.
pub fn sweep_plot(table: &SweepTable) -> LinePlot {
    let var = table.rows.first().map_or(SweepVar::SnrDb, |r| r.var);
    let series = table
        .solvers()
        .into_iter()
        .map(|solver| {
            let pts = table
                .rows
                .iter()
                .filter(|r| r.solver == solver)
                .map(|r| (r.value, r.nmse_mean))
                .collect();
            (solver.to_string(), pts)
        })
        .collect();
    let x_label = match var {
        SweepVar::SnrDb => "SNR (dB)".to_string(),
        SweepVar::RollOff => "roll-off L_w (samples)".to_string(),
        SweepVar::Oversampling => "Doppler oversampling u_nu".to_string(),
        SweepVar::PilotLen => "pilot length L".to_string(),
    };
    LinePlot {
        title: format!("NMSE vs {var} (config {})", table.config_hash),
        x_label,
        y_label: "NMSE".into(),
        log_y: true,
        markers: true,
        series,
        description: table.config_text.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Plot,
}

/// Writes `<name>.csv` and/or `<name>.svg` into `dir`.
pub fn emit_outputs(result: &SweepResult, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let table = SweepTable::from_result(result);
    let mut written = Vec::new();
    for f in formats {
        let (ext, body) = match f {
            OutputFormat::Csv => ("csv", sweep_csv(&table)),
            OutputFormat::Plot => ("svg", sweep_plot(&table).to_svg()),
        };
        let p = dir.join(format!("{}.{ext}", result.config.name));
        std::fs::write(&p, body)?;
        written.push(p);
    }
    Ok(written)
}

/// Re-renders the plot of a saved sweep CSV.
pub fn replot(csv_path: &Path, svg_path: &Path) -> Result<()> {
    let table = parse_sweep_csv(&std::fs::read_to_string(csv_path)?)?;
    std::fs::write(svg_path, sweep_plot(&table).to_svg())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SweepTable {
        let mut rows = Vec::new();
        for solver in SolverId::all() {
            for (i, v) in [0.0, 10.0, 20.0].iter().enumerate() {
                rows.push(PointSummary {
                    var: SweepVar::SnrDb,
                    value: *v,
                    solver,
                    nmse_mean: 0.1f64.powi(i as i32 + 1) / 3.0,
                    nmse_median: 0.01,
                    nmse_stderr: f64::NAN,
                    trials: 10,
                    mean_q: 4.5,
                });
            }
        }
        SweepTable {
            config_text: "frame.L=128\nsolver.list=a<b\n".into(),
            seed: 9,
            config_hash: "abc123".into(),
            rows,
        }
    }

    #[test]
    fn csv_round_trip_and_row_count() {
        let t = table();
        let text = sweep_csv(&t);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 12);
        let back = parse_sweep_csv(&text).unwrap();
        assert_eq!(back.rows.len(), 12);
        assert_eq!(back.config_text, t.config_text);
        assert_eq!(back.seed, 9);
        assert_eq!(sweep_csv(&back), text);
        assert_eq!(sweep_plot(&back).to_svg(), sweep_plot(&t).to_svg());
    }

    #[test]
    fn plot_has_one_series_per_solver() {
        let svg = sweep_plot(&table()).to_svg();
        assert_eq!(svg.matches(r#"class="series""#).count(), 4);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn rejects_malformed_csv() {
        assert!(parse_sweep_csv("").is_err());
        assert!(parse_sweep_csv("a,b\n").is_err());
        let bad = format!("{CSV_HEADER}\nsnr_db,1,da_omp_rcos,1\n");
        assert!(parse_sweep_csv(&bad).is_err());
    }
}
