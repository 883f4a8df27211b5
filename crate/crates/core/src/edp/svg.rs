//! Stacked-bar SVG rendering for EDPs and error zooms. Output is plain SVG 1.1
//! text and depends only on the input, so identical inputs give identical bytes.

use std::fmt::Write;

use super::outcome::{sort_codes_by, ConfusionDistribution, OutcomeCode};
use super::{EdpResult, ZoomView};

const HIT_COLOR: &str = "#9ecae1";
const MISS_PALETTE: [&str; 12] = [
    "#e6550d", "#756bb1", "#31a354", "#d62728", "#8c564b", "#e377c2", "#bcbd22", "#17becf",
    "#636363", "#fd8d3c", "#393b79", "#843c39",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub bar_width: f64,
    pub bar_gap: f64,
    pub plot_height: f64,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            bar_width: 56.0,
            bar_gap: 24.0,
            plot_height: 300.0,
            title: None,
        }
    }
}

fn color(code: OutcomeCode, n_classes: usize) -> &'static str {
    match code {
        OutcomeCode::Hit => HIT_COLOR,
        miss => MISS_PALETTE[(miss.rank(n_classes) - 1) % MISS_PALETTE.len()],
    }
}

struct Bar {
    label: String,
    dist: ConfusionDistribution,
    caption: String,
}

struct Chart {
    title: String,
    n_classes: usize,
    bars: Vec<Bar>,
    footer: Option<String>,
    empty_message: Option<&'static str>,
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

pub fn render_edp_svg(edp: &EdpResult, opts: &SvgOptions) -> String {
    let n = edp.global.total();
    let mut bars: Vec<Bar> = edp
        .bins
        .iter()
        .map(|b| Bar {
            label: b.bin.label.clone(),
            dist: b.distribution.clone(),
            caption: format!("{} ({})", b.count(), pct(b.share)),
        })
        .collect();
    bars.push(Bar {
        label: "GLOBAL".into(),
        dist: edp.global.clone(),
        caption: format!("{n} (100.0%)"),
    });
    let footer = (edp.missing > 0).then(|| format!("{} missing", edp.missing));
    let chart = Chart {
        title: opts
            .title
            .clone()
            .unwrap_or_else(|| format!("Error dependence plot: {}", edp.predictor)),
        n_classes: edp.global.n_classes(),
        empty_message: (n == 0).then_some("no cases"),
        bars,
        footer,
    };
    render(&chart, opts)
}

pub fn render_zoom_svg(zoom: &ZoomView, opts: &SvgOptions) -> String {
    let mut bars: Vec<Bar> = zoom
        .bins
        .iter()
        .map(|b| Bar {
            label: b.bin.label.clone(),
            dist: b.errors.clone(),
            caption: format!("{} ({})", b.errors.total(), pct(b.error_share)),
        })
        .collect();
    bars.push(Bar {
        label: "GLOBAL".into(),
        dist: zoom.global_errors.clone(),
        caption: format!("{} (100.0%)", zoom.global_errors.total()),
    });
    let chart = Chart {
        title: opts
            .title
            .clone()
            .unwrap_or_else(|| format!("Error zoom: {}", zoom.predictor)),
        n_classes: zoom.global_errors.n_classes(),
        bars,
        footer: None,
        empty_message: zoom.is_empty().then_some("no errors"),
    };
    render(&chart, opts)
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn render(chart: &Chart, opts: &SvgOptions) -> String {
    let left = 60.0;
    let top = 50.0;
    let step = opts.bar_width + opts.bar_gap;
    let plot_w = chart.bars.len() as f64 * step + opts.bar_gap;
    let legend_x = left + plot_w + 30.0;

    let mut codes: Vec<OutcomeCode> = Vec::new();
    for b in &chart.bars {
        for c in b.dist.codes() {
            if !codes.contains(&c) {
                codes.push(c);
            }
        }
    }
    sort_codes_by(&mut codes, chart.n_classes, |c| *c);

    let width = legend_x + 110.0;
    let legend_h = 20.0 * codes.len() as f64 + 30.0;
    let height = (top + opts.plot_height + 90.0).max(top + legend_h);
    let base = top + opts.plot_height;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="25" font-size="14" font-weight="bold">{}</text>"#,
        esc(&chart.title)
    );

    // y axis with 0..100% ticks
    let _ = writeln!(
        s,
        r##"<line x1="{left}" y1="{top}" x2="{left}" y2="{base}" stroke="#333"/>"##
    );
    for i in 0..=4 {
        let y = base - opts.plot_height * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{left}" y2="{y:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}%</text>"##,
            left - 4.0,
            left - 6.0,
            y + 4.0,
            i * 25
        );
    }

    if let Some(msg) = chart.empty_message {
        let _ = writeln!(
            s,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="16" fill="#666">{msg}</text>"##,
            left + plot_w / 2.0,
            top + opts.plot_height / 2.0
        );
    }

    for (i, bar) in chart.bars.iter().enumerate() {
        let x = left + opts.bar_gap + i as f64 * step;
        let cx = x + opts.bar_width / 2.0;
        let _ = writeln!(s, r#"<g class="bar" data-label="{}">"#, esc(&bar.label));
        let mut y = base;
        let total = bar.dist.total();
        if total == 0 {
            let _ = writeln!(
                s,
                r##"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#bbb" stroke-dasharray="3,3"/>"##,
                top, opts.bar_width, opts.plot_height
            );
        }
        for (code, k) in bar.dist.cells() {
            let h = opts.plot_height * k as f64 / total as f64;
            y -= h;
            let label = code.display(chart.n_classes);
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{y:.2}" width="{:.1}" height="{h:.2}" fill="{}"><title>{}: {} ({})</title></rect>"#,
                opts.bar_width,
                color(code, chart.n_classes),
                esc(&label),
                k,
                pct(bar.dist.proportion(code))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            base + 16.0,
            esc(&bar.label)
        );
        let _ = writeln!(
            s,
            r##"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" fill="#555">{}</text>"##,
            base + 31.0,
            esc(&bar.caption)
        );
        let _ = writeln!(s, "</g>");
    }

    if let Some(f) = &chart.footer {
        let _ = writeln!(
            s,
            r##"<text x="{left}" y="{:.1}" fill="#555">{}</text>"##,
            base + 56.0,
            esc(f)
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{legend_x:.1}" y="{top}" font-weight="bold">outcome</text>"#
    );
    for (i, code) in codes.iter().enumerate() {
        let y = top + 12.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{legend_x:.1}" y="{y:.1}" width="12" height="12" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            color(*code, chart.n_classes),
            legend_x + 18.0,
            y + 10.0,
            esc(&code.display(chart.n_classes))
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::PredictionSet;
    use crate::edp::{compute_edp, error_zoom};
    use crate::ingest::{Column, ColumnKind, Dataset, Value};

    fn data(preds_hit: bool) -> (Dataset, PredictionSet) {
        let n = 40;
        let rows = (0..n)
            .map(|i| {
                vec![
                    Some(Value::Num(f64::from(i))),
                    Some(Value::Cat(if i % 3 == 0 { "a&b" } else { "c" }.into())),
                ]
            })
            .collect();
        let ds = Dataset::new(
            vec![
                Column::new("x<1>", ColumnKind::Numeric),
                Column::new("y", ColumnKind::Categorical),
            ],
            rows,
            "y",
        )
        .unwrap();
        let preds: Vec<&str> = (0..n)
            .map(|i| {
                let truth = if i % 3 == 0 { "a&b" } else { "c" };
                if preds_hit || i % 7 != 0 {
                    truth
                } else if truth == "c" {
                    "a&b"
                } else {
                    "c"
                }
            })
            .collect();
        let p = PredictionSet::from_labels(&ds, &preds).unwrap();
        (ds, p)
    }

    #[test]
    fn one_bar_per_bin_plus_global() {
        let (ds, p) = data(false);
        let edp = compute_edp(&ds, &p, "x<1>", None).unwrap();
        assert_eq!(edp.bins.len(), 5);
        let svg = render_edp_svg(&edp, &SvgOptions::default());
        assert_eq!(svg.matches(r#"<g class="bar""#).count(), 6);
        assert!(svg.contains("x&lt;1&gt;"));
        assert!(!svg.contains("a&b"));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn deterministic_bytes() {
        let (ds, p) = data(false);
        let edp = compute_edp(&ds, &p, "x<1>", None).unwrap();
        let o = SvgOptions::default();
        assert_eq!(render_edp_svg(&edp, &o), render_edp_svg(&edp, &o));
        let z = error_zoom(&edp);
        assert_eq!(render_zoom_svg(&z, &o), render_zoom_svg(&z, &o));
    }

    #[test]
    fn perfect_zoom_says_no_errors() {
        let (ds, p) = data(true);
        let z = error_zoom(&compute_edp(&ds, &p, "x<1>", None).unwrap());
        let svg = render_zoom_svg(&z, &SvgOptions::default());
        assert!(svg.contains(">no errors</text>"));
    }

    #[test]
    fn stable_colors() {
        assert_eq!(color(OutcomeCode::Hit, 2), HIT_COLOR);
        assert_ne!(
            color(OutcomeCode::of(0, 1), 2),
            color(OutcomeCode::of(1, 0), 2)
        );
    }
}
