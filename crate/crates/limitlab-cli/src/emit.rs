//! Deterministic text rendering: significant-digit float formatting shared by
//! every CSV and diagnostic line, and a small hand-rolled SVG line chart.

/// Formats to nine significant digits, then strips what the shortest faithful
/// rendering does not need.  Values whose decimal exponent sits in a sane
/// window come out in plain positional notation ("0.05", "123456789000"),
/// everything else in scientific notation ("1e-9").  The result never depends
/// on platform printf quirks, so identical runs emit identical bytes.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }

    let sci = format!("{:.8e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always emits an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };

    // exp is the power of ten of the leading digit.
    if (-4..=12).contains(&exp) {
        let point = exp + 1; // digits before the decimal point
        if point <= 0 {
            format!("{sign}0.{}{digits}", "0".repeat(-point as usize))
        } else if (point as usize) >= digits.len() {
            format!(
                "{sign}{digits}{}",
                "0".repeat(point as usize - digits.len())
            )
        } else {
            let (int, frac) = digits.split_at(point as usize);
            format!("{sign}{int}.{frac}")
        }
    } else if digits.len() == 1 {
        format!("{sign}{digits}e{exp}")
    } else {
        let (lead, rest) = digits.split_at(1);
        format!("{sign}{lead}.{rest}e{exp}")
    }
}

/// One polyline of an [`svg_chart`].
pub struct Curve<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub label: &'a str,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 54.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 40.0;

/// Renders the curves into a self-contained SVG document: shared axes with
/// 5% padding, zero lines when the origin is in range, numeric range labels
/// in the corners, and a legend keyed by curve color.
pub fn svg_chart(curves: &[Curve], title: &str) -> String {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for c in curves {
        for &(x, y) in c.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    let xpad = 0.05 * (xmax - xmin).max(1e-12);
    let ypad = 0.05 * (ymax - ymin).max(1e-12);
    let (x0, x1) = (xmin - xpad, xmax + xpad);
    let (y0, y1) = (ymin - ypad, ymax + ypad);

    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));

    // Frame and, when the origin is inside the range, zero lines.
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    ));
    if x0 < 0.0 && x1 > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{MARGIN_T}\" x2=\"{0:.2}\" y2=\"{1:.2}\" \
             stroke=\"#ccc\" stroke-width=\"1\"/>\n",
            px(0.0),
            HEIGHT - MARGIN_B
        ));
    }
    if y0 < 0.0 && y1 > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" \
             stroke=\"#ccc\" stroke-width=\"1\"/>\n",
            py(0.0),
            WIDTH - MARGIN_R
        ));
    }

    // Corner range labels.
    let label = |x: f64, y: f64, anchor: &str, text: String| {
        format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#555\" text-anchor=\"{anchor}\">{text}</text>\n"
        )
    };
    svg.push_str(&label(
        MARGIN_L,
        HEIGHT - MARGIN_B + 16.0,
        "middle",
        fmt_sig(x0),
    ));
    svg.push_str(&label(
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B + 16.0,
        "middle",
        fmt_sig(x1),
    ));
    svg.push_str(&label(
        MARGIN_L - 6.0,
        HEIGHT - MARGIN_B,
        "end",
        fmt_sig(y0),
    ));
    svg.push_str(&label(MARGIN_L - 6.0, MARGIN_T + 4.0, "end", fmt_sig(y1)));

    for c in curves {
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            c.color,
            pts.join(" ")
        ));
    }

    for (i, c) in curves.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN_R - 150.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" \
             stroke=\"{2}\" stroke-width=\"2\"/>\n",
            y - 4.0,
            x + 22.0,
            c.color
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            x + 28.0,
            y,
            xml_escape(c.label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_formatting_picks_the_shortest_faithful_form() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(6.0), "6");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(0.05), "0.05");
        assert_eq!(fmt_sig(1.0 / 6.0), "0.166666667");
        assert_eq!(fmt_sig(1e-9), "1e-9");
        assert_eq!(fmt_sig(1.23456789e11), "123456789000");
        assert_eq!(fmt_sig(1.5e13), "1.5e13");
        assert_eq!(fmt_sig(-1.0 / 3.0), "-0.333333333");
    }

    #[test]
    fn formatted_values_round_trip_within_nine_digits() {
        let samples = [
            1.0 / 7.0,
            -9.81,
            6.02e23,
            2.2250738585072014e-308,
            123.456,
            0.001953125,
        ];
        for &v in &samples {
            let parsed: f64 = fmt_sig(v).parse().expect("output parses back");
            assert!(
                ((parsed - v) / v).abs() < 1e-8,
                "{v} formatted as {} reparsed as {parsed}",
                fmt_sig(v)
            );
        }
    }

    #[test]
    fn chart_contains_each_curve_and_label() {
        let a = [(0.0, 0.0), (1.0, 1.0)];
        let b = [(0.0, 1.0), (1.0, 0.0)];
        let svg = svg_chart(
            &[
                Curve {
                    points: &a,
                    color: "#111111",
                    label: "up",
                },
                Curve {
                    points: &b,
                    color: "#222222",
                    label: "down",
                },
            ],
            "crossing lines",
        );
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("#111111") && svg.contains("#222222"));
        assert!(svg.contains(">up</text>") && svg.contains(">down</text>"));
        assert!(svg.contains("crossing lines"));
    }
}
