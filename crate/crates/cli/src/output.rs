//! File emitters: CSV tables that round-trip exactly, and self-contained
//! SVG plots (line charts for sweep tables, heatmaps for Wigner grids).

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use kpo_spinlab::{SeriesTable, WignerGrid};

/// Serialize one float so that parsing it back restores the exact bits:
/// scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Write a series table: `#`-prefixed metadata lines, one header row,
/// then comma-separated data rows. UTF-8, LF line endings.
pub fn write_table_csv(path: &Path, table: &SeriesTable) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (key, value) in table.meta() {
        writeln!(out, "# {key} = {value}")?;
    }
    let header: Vec<&str> = table.columns().iter().map(|(n, _)| n.as_str()).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in 0..table.rows() {
        let cells: Vec<String> = table
            .columns()
            .iter()
            .map(|(_, v)| format_value(v[row]))
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Write a Wigner grid as `x,y,w` triples, x fastest, with metadata lines.
pub fn write_wigner_csv(
    path: &Path,
    grid: &WignerGrid,
    meta: &[(String, String)],
) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (key, value) in meta {
        writeln!(out, "# {key} = {value}")?;
    }
    writeln!(out, "x,y,w")?;
    for (iy, &y) in grid.y_axis().iter().enumerate() {
        for (ix, &x) in grid.x_axis().iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                format_value(x),
                format_value(y),
                format_value(grid.value(ix, iy))
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    let s = if (1e-3..1e4).contains(&a) {
        format!("{v:.4}")
    } else {
        return format!("{v:.2e}");
    };
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn from_values<'a>(values: impl Iterator<Item = &'a f64>) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            if v.is_finite() {
                min = min.min(v);
                max = max.max(v);
            }
        }
        if !min.is_finite() || !max.is_finite() {
            return Axis { min: 0.0, max: 1.0 };
        }
        if min == max {
            return Axis {
                min: min - 1.0,
                max: max + 1.0,
            };
        }
        let pad = 0.03 * (max - min);
        Axis {
            min: min - pad,
            max: max + pad,
        }
    }

    fn project(&self, v: f64, lo_px: f64, hi_px: f64) -> f64 {
        lo_px + (v - self.min) / (self.max - self.min) * (hi_px - lo_px)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
            .collect()
    }
}

/// Line chart of a table: first column is the x axis, every other column
/// is a series. NaN points break the line so failed sweep points stay
/// visible as gaps.
pub fn line_plot_svg(table: &SeriesTable, title: &str) -> String {
    let (width, height) = (900.0, 560.0);
    let (left, right, top, bottom) = (70.0, width - 200.0, 50.0, height - 60.0);
    let columns = table.columns();
    let (x_name, xs) = match columns.first() {
        Some((n, v)) => (n.as_str(), v.as_slice()),
        None => ("", &[][..]),
    };
    let x_axis = Axis::from_values(xs.iter());
    let y_axis = Axis::from_values(columns.iter().skip(1).flat_map(|(_, v)| v.iter()));

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = write!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<text x="{}" y="28" font-size="18" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        xml_escape(title)
    );

    // Frame and ticks.
    let _ = write!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        right - left,
        bottom - top
    );
    for t in x_axis.ticks(5) {
        let px = x_axis.project(t, left, right);
        let _ = write!(
            svg,
            r##"<line x1="{px:.1}" y1="{bottom}" x2="{px:.1}" y2="{}" stroke="#333"/>"##,
            bottom + 5.0
        );
        let _ = write!(
            svg,
            r#"<text x="{px:.1}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            bottom + 20.0,
            tick_label(t)
        );
    }
    for t in y_axis.ticks(5) {
        let py = y_axis.project(t, bottom, top);
        let _ = write!(
            svg,
            r##"<line x1="{}" y1="{py:.1}" x2="{left}" y2="{py:.1}" stroke="#333"/>"##,
            left - 5.0
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="12" text-anchor="end">{}</text>"#,
            left - 9.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        height - 18.0,
        xml_escape(x_name)
    );

    // Series as polyline segments split at NaN.
    for (si, (name, values)) in columns.iter().skip(1).enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush_segment = |seg: &mut Vec<String>, svg: &mut String| {
            if seg.len() >= 2 {
                let _ = write!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                    seg.join(" ")
                );
            }
            seg.clear();
        };
        for (&x, &y) in xs.iter().zip(values) {
            if x.is_finite() && y.is_finite() {
                segment.push(format!(
                    "{:.2},{:.2}",
                    x_axis.project(x, left, right),
                    y_axis.project(y, bottom, top)
                ));
            } else {
                flush_segment(&mut segment, &mut svg);
            }
        }
        flush_segment(&mut segment, &mut svg);

        let ly = top + 16.0 * si as f64;
        let _ = write!(
            svg,
            r#"<line x1="{}" y1="{ly:.1}" x2="{}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            right + 8.0,
            right + 32.0
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="11">{}</text>"#,
            right + 38.0,
            ly + 4.0,
            xml_escape(name)
        );
    }
    svg.push_str("</svg>");
    svg
}

/// Diverging color for a normalized value in [-1, 1]: blue for negative,
/// white for zero, red for positive.
fn diverging_color(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Heatmap of a Wigner grid with a symmetric diverging scale centered at
/// zero, so negativity is immediately visible.
pub fn heatmap_svg(grid: &WignerGrid, title: &str) -> String {
    let (width, height) = (760.0, 700.0);
    let (left, right, top, bottom) = (70.0, 620.0, 60.0, 650.0);
    let xs = grid.x_axis();
    let ys = grid.y_axis();
    let (nx, ny) = (xs.len(), ys.len());
    let scale = grid.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let cw = (right - left) / nx as f64;
    let ch = (bottom - top) / ny as f64;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = write!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<text x="{}" y="32" font-size="18" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        xml_escape(title)
    );
    for iy in 0..ny {
        // Row iy=0 is the lowest y value; SVG y grows downward.
        let py = bottom - ch * (iy + 1) as f64;
        for ix in 0..nx {
            let v = grid.value(ix, iy);
            let color = if v.is_nan() {
                "#bbbbbb".to_string()
            } else {
                diverging_color(v / scale)
            };
            let px = left + cw * ix as f64;
            let _ = write!(
                svg,
                r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = write!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        right - left,
        bottom - top
    );
    for (v, px) in [(xs[0], left), (xs[nx - 1], right)] {
        let _ = write!(
            svg,
            r#"<text x="{px:.1}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(v)
        );
    }
    for (v, py) in [(ys[0], bottom), (ys[ny - 1], top)] {
        let _ = write!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="12" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(v)
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">x</text>"#,
        (left + right) / 2.0,
        height - 10.0
    );
    let _ = write!(
        svg,
        r#"<text x="20" y="{}" font-size="14" text-anchor="middle">y</text>"#,
        (top + bottom) / 2.0
    );

    // Color bar.
    let (bar_x, bar_w) = (right + 30.0, 18.0);
    let steps = 64;
    let bar_h = (bottom - top) / steps as f64;
    for i in 0..steps {
        let t = 1.0 - 2.0 * i as f64 / (steps - 1) as f64;
        let _ = write!(
            svg,
            r#"<rect x="{bar_x}" y="{:.2}" width="{bar_w}" height="{:.2}" fill="{}"/>"#,
            top + bar_h * i as f64,
            bar_h + 0.05,
            diverging_color(t)
        );
    }
    let _ = write!(
        svg,
        r##"<rect x="{bar_x}" y="{top}" width="{bar_w}" height="{}" fill="none" stroke="#333"/>"##,
        bottom - top
    );
    for (t, py) in [(scale, top), (0.0, (top + bottom) / 2.0), (-scale, bottom)] {
        let _ = write!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="11">{}</text>"#,
            bar_x + bar_w + 6.0,
            py + 4.0,
            tick_label(t)
        );
    }
    svg.push_str("</svg>");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_text(path: &Path, content: &str) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(content.as_bytes())?;
    out.flush()?;
    Ok(())
}
