//! Barcode plots as plain SVG markup.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::prh::Barcode;

const WIDTH: f64 = 640.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const BAR_STEP: f64 = 8.0;
const GROUP_GAP: f64 = 18.0;
const AXIS_HEIGHT: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#d62728", "#8c564b"];

fn num(x: f64) -> String {
    format!("{:.3}", x)
}

/// Render one horizontal segment per bar, grouped and colored by dimension,
/// over an axis ticked at the distinct birth and death values.
pub fn render_svg(barcode: &Barcode) -> String {
    let mut bars: Vec<_> = barcode.bars.iter().collect();
    bars.sort_by(|a, b| a.cmp_interval(b));

    let mut ticks: Vec<f64> = bars.iter().flat_map(|b| [b.birth, b.death]).collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    let lo = ticks.first().copied().unwrap_or(0.0).min(0.0);
    let hi = ticks.last().copied().unwrap_or(1.0);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let x = |t: f64| MARGIN_LEFT + (t - lo) / span * plot_w;

    let mut groups: Vec<(usize, usize)> = Vec::new();
    for b in &bars {
        match groups.last_mut() {
            Some((d, n)) if *d == b.dim => *n += 1,
            _ => groups.push((b.dim, 1)),
        }
    }
    let body: f64 = groups.iter().map(|&(_, n)| n as f64 * BAR_STEP + GROUP_GAP).sum();
    let height = MARGIN_TOP + body + AXIS_HEIGHT;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(WIDTH),
        h = num(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut y = MARGIN_TOP;
    let mut idx = 0;
    for &(dim, n) in &groups {
        let color = COLORS[dim % COLORS.len()];
        let _ = writeln!(out, r#"<g class="dim-{dim}" stroke="{color}" stroke-width="4">"#);
        let _ = writeln!(
            out,
            r#"<text x="8" y="{}" font-size="11" font-family="sans-serif" fill="{color}" stroke="none">H{dim}</text>"#,
            num(y + 10.0)
        );
        for b in &bars[idx..idx + n] {
            y += BAR_STEP;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(x(b.birth)),
                num(y),
                num(x(b.death)),
                num(y)
            );
        }
        let _ = writeln!(out, "</g>");
        idx += n;
        y += GROUP_GAP;
    }

    let axis_y = y + 4.0;
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{ay}" x2="{}" y2="{ay}" stroke="black" stroke-width="1"/>"#,
        num(MARGIN_LEFT),
        num(WIDTH - MARGIN_RIGHT),
        ay = num(axis_y)
    );
    for t in &ticks {
        let tx = num(x(*t));
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{tx}" y1="{}" x2="{tx}" y2="{}" stroke="black" stroke-width="1"/>"#,
            num(axis_y),
            num(axis_y + 4.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{tx}" y="{}" font-size="9" font-family="sans-serif" text-anchor="middle">{}</text>"#,
            num(axis_y + 15.0),
            num(*t)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(barcode: &Barcode, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_svg(barcode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Chain;
    use crate::prh::{Bar, Pipeline};

    fn bar(dim: usize, birth: f64, death: f64) -> Bar {
        Bar {
            dim,
            birth,
            death,
            representative: Chain::new(vec![(0, 1)]),
        }
    }

    #[test]
    fn empty_barcode_has_only_an_axis() {
        let svg = render_svg(&Barcode::new(vec![], 2, Pipeline::General, 0));
        assert!(svg.contains(r#"class="axis""#));
        assert!(!svg.contains("<g class=\"dim-"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn one_bar_one_segment() {
        let svg = render_svg(&Barcode::new(vec![bar(0, 0.0, 1.0)], 2, Pipeline::General, 1));
        assert_eq!(svg.matches("<line x1=").count(), 1);
        assert_eq!(svg.matches(r#"class="tick""#).count(), 2);
    }

    #[test]
    fn groups_by_dimension_deterministically() {
        let bc = Barcode::new(
            vec![bar(2, 0.7, 0.9), bar(0, 0.0, 0.5), bar(1, 0.5, 0.75), bar(1, 0.5, 0.7)],
            2,
            Pipeline::Lag,
            4,
        );
        let svg = render_svg(&bc);
        assert_eq!(svg.matches("<g class=\"dim-").count(), 3);
        assert_eq!(svg, render_svg(&bc.clone()));
        let (d0, d1, d2) = (svg.find("dim-0").unwrap(), svg.find("dim-1").unwrap(), svg.find("dim-2").unwrap());
        assert!(d0 < d1 && d1 < d2);
    }

    #[test]
    fn unwritable_path_errors() {
        let bc = Barcode::new(vec![], 2, Pipeline::General, 0);
        assert!(emit_svg(&bc, Path::new("/nonexistent-dir/x/plot.svg")).is_err());
    }
}
