//! Dependency-free SVG charts: line, bar and correlation heatmap.
//!
//! Everything is emitted with fixed two-decimal coordinates so identical
//! inputs produce byte-identical files.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Svg {
        Svg {
            body: String::new(),
            width,
            height,
        }
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: u32, content: &str, extra: &str) {
        let _ = writeln!(
            self.body,
            "  <text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" font-size=\"{size}\" font-family=\"sans-serif\"{extra}>{}</text>",
            escape(content)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, title: Option<&str>) {
        match title {
            Some(t) => {
                let _ = writeln!(
                    self.body,
                    "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"><title>{}</title></rect>",
                    escape(t)
                );
            }
            None => {
                let _ = writeln!(
                    self.body,
                    "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>"
                );
            }
        }
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.body,
            "  <polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\" points=\"{}\"/>",
            coords.join(" ")
        );
    }

    fn save(self, path: &Path) -> Result<(), CliError> {
        let doc = format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        );
        let mut file = std::fs::File::create(path).map_err(CliError::io(path))?;
        file.write_all(doc.as_bytes()).map_err(CliError::io(path))
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Flat series: pad so scaling stays finite.
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

/// Multi-series line chart with min/max axis labels and a legend.
pub fn write_line_chart(
    path: &Path,
    title: &str,
    series: &[Series],
) -> Result<(), CliError> {
    let (x_lo, x_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = Svg::new(WIDTH, HEIGHT);
    svg.text(WIDTH / 2.0, 28.0, "middle", 18, title, "");
    svg.line(MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM, "#333333", 1.0);
    svg.line(
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM,
        "#333333",
        1.0,
    );
    svg.text(MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM + 20.0, "start", 12, &format!("{x_lo:.0}"), "");
    svg.text(
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM + 20.0,
        "end",
        12,
        &format!("{x_hi:.0}"),
        "",
    );
    svg.text(MARGIN_LEFT - 8.0, HEIGHT - MARGIN_BOTTOM, "end", 12, &format!("{y_lo:.6e}"), "");
    svg.text(MARGIN_LEFT - 8.0, MARGIN_TOP + 6.0, "end", 12, &format!("{y_hi:.6e}"), "");

    for (i, s) in series.iter().enumerate() {
        let pixels: Vec<(f64, f64)> = s.points.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        svg.polyline(&pixels, s.color);
        let ly = MARGIN_TOP + 16.0 * i as f64;
        svg.line(WIDTH - 180.0, ly, WIDTH - 160.0, ly, s.color, 2.0);
        svg.text(WIDTH - 154.0, ly + 4.0, "start", 12, &s.name, "");
    }
    svg.save(path)
}

/// Horizontal-label bar chart; values are annotated above each bar.
pub fn write_bar_chart(path: &Path, title: &str, bars: &[(String, f64)]) -> Result<(), CliError> {
    let mut svg = Svg::new(WIDTH, HEIGHT);
    svg.text(WIDTH / 2.0, 28.0, "middle", 18, title, "");
    if bars.is_empty() {
        return svg.save(path);
    }
    let max = bars.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let slot = plot_w / bars.len() as f64;
    let bar_w = slot * 0.6;
    for (i, (label, value)) in bars.iter().enumerate() {
        let h = if max > 0.0 { value / max * plot_h } else { 0.0 };
        let x = MARGIN_LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
        let y = MARGIN_TOP + plot_h - h;
        svg.rect(x, y, bar_w, h, "#4878a8", Some(&format!("{label}: {value}")));
        svg.text(x + bar_w / 2.0, HEIGHT - MARGIN_BOTTOM + 18.0, "middle", 12, label, "");
        svg.text(x + bar_w / 2.0, y - 6.0, "middle", 11, &format!("{value:.0}"), "");
    }
    svg.line(
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM,
        "#333333",
        1.0,
    );
    svg.save(path)
}

/// Correlation value to fill color: blue for −1, white for 0, red for +1.
fn correlation_color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v >= 0.0 {
        let t = 1.0 - v;
        (255.0, 255.0 * t, 255.0 * t)
    } else {
        let t = 1.0 + v;
        (255.0 * t, 255.0 * t, 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Square heatmap of the correlation matrix; missing cells are gray.
pub fn write_heatmap(
    path: &Path,
    title: &str,
    names: &[String],
    values: &[Vec<Option<f64>>],
) -> Result<(), CliError> {
    let n = names.len();
    let cell = 18.0;
    let label_space = 140.0;
    let size = label_space + cell * n as f64 + 40.0;
    let mut svg = Svg::new(size, size);
    svg.text(size / 2.0, 24.0, "middle", 16, title, "");
    for (i, name) in names.iter().enumerate() {
        let y = label_space + cell * i as f64 + cell * 0.7;
        svg.text(label_space - 6.0, y, "end", 10, name, "");
        let cx = label_space + cell * i as f64 + cell / 2.0;
        let extra = format!(" transform=\"rotate(-60 {cx:.2} {:.2})\"", label_space - 6.0);
        svg.text(cx, label_space - 6.0, "start", 10, name, &extra);
    }
    for (i, row) in values.iter().enumerate() {
        for (j, cell_value) in row.iter().enumerate() {
            let x = label_space + cell * j as f64;
            let y = label_space + cell * i as f64;
            match cell_value {
                Some(v) => svg.rect(
                    x,
                    y,
                    cell - 1.0,
                    cell - 1.0,
                    &correlation_color(*v),
                    Some(&format!("{} / {}: {v:.4}", names[i], names[j])),
                ),
                None => svg.rect(x, y, cell - 1.0, cell - 1.0, "#d8d8d8", None),
            }
        }
    }
    svg.save(path)
}
