//! Deterministic SVG figures drawn from an analysis report.

use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use serde_json::Value;

use crate::error::ModelError;
use crate::scalar::{ExactScalar, Extended};

const WIDTH: i64 = 640;
const BAR_AREA: i64 = 200;
const BAR_WIDTH: i64 = 48;
const BLOCK_ROW: i64 = 36;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Distinct `δ*` values in increasing order (`inf` last) with their multiplicities.
fn spectrum(report: &Value) -> Result<Vec<(Extended, usize)>, ModelError> {
    let observables = report
        .get("observables")
        .and_then(Value::as_array)
        .ok_or_else(|| ModelError::Malformed("report has no observable list".into()))?;
    let mut values = observables
        .iter()
        .map(|o| {
            o.get("delta_star")
                .and_then(Value::as_str)
                .ok_or_else(|| ModelError::Malformed("observable without delta_star".into()))?
                .parse::<Extended>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    values.sort();
    let mut out: Vec<(Extended, usize)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    Ok(out)
}

fn blocks(report: &Value) -> Result<(String, Vec<Vec<String>>), ModelError> {
    let first = report
        .pointer("/quotients/0")
        .ok_or_else(|| ModelError::Malformed("report has no quotient".into()))?;
    let threshold = first
        .get("threshold")
        .and_then(Value::as_str)
        .unwrap_or("?")
        .to_string();
    let blocks: Vec<Vec<String>> = serde_json::from_value(
        first.get("blocks").cloned().unwrap_or(Value::Null),
    )
    .map_err(|_| ModelError::Malformed("quotient blocks are not lists of point ids".into()))?;
    Ok((threshold, blocks))
}

/// Height in pixels of a finite bar, scaled so the largest finite value fills the area.
fn bar_height(value: &ExactScalar, largest: &ExactScalar) -> i64 {
    if largest.is_zero() {
        return BAR_AREA;
    }
    let scaled = value * ExactScalar::from_integer((BAR_AREA - 20).into()) / largest;
    scaled
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(BAR_AREA)
        .max(1)
}

/// The δ*-spectrum chart (omitted without observables) above the quotient-block diagram.
pub fn render(report: &Value) -> Result<String, ModelError> {
    let spectrum = spectrum(report)?;
    let (threshold, blocks) = blocks(report)?;
    let resolution = report
        .get("resolution")
        .and_then(Value::as_str)
        .unwrap_or("?");

    let chart_height = if spectrum.is_empty() {
        0
    } else {
        BAR_AREA + 60
    };
    let height = chart_height + 50 + BLOCK_ROW * blocks.len() as i64;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="monospace" font-size="12">"#
    );
    if !spectrum.is_empty() {
        let largest = spectrum
            .iter()
            .filter_map(|(v, _)| v.finite().cloned())
            .max()
            .unwrap_or_else(ExactScalar::zero);
        let _ = writeln!(svg, r#"  <g id="spectrum">"#);
        let _ = writeln!(
            svg,
            r#"    <text x="10" y="20">delta* spectrum at resolution {}</text>"#,
            escape(resolution)
        );
        let base = BAR_AREA + 30;
        for (i, (value, count)) in spectrum.iter().enumerate() {
            let x = 20 + i as i64 * (BAR_WIDTH + 16);
            let (h, fill) = match value.finite() {
                Some(v) => (bar_height(v, &largest), "#4a7ab5"),
                None => (BAR_AREA, "#b54a4a"),
            };
            let label = escape(&value.to_string());
            let _ = writeln!(
                svg,
                r#"    <rect x="{x}" y="{}" width="{BAR_WIDTH}" height="{h}" fill="{fill}"><title>{label} x{count}</title></rect>"#,
                base - h
            );
            let _ = writeln!(svg, r#"    <text x="{x}" y="{}">{label}</text>"#, base + 16);
            let _ = writeln!(
                svg,
                r#"    <text x="{x}" y="{}">x{count}</text>"#,
                base - h - 4
            );
        }
        let _ = writeln!(svg, "  </g>");
    }
    let top = chart_height + 20;
    let _ = writeln!(svg, r#"  <g id="blocks">"#);
    let _ = writeln!(
        svg,
        r#"    <text x="10" y="{top}">quotient at threshold {}: {} block(s)</text>"#,
        escape(&threshold),
        blocks.len()
    );
    for (i, block) in blocks.iter().enumerate() {
        let y = top + 12 + i as i64 * BLOCK_ROW;
        let members = escape(&block.join(", "));
        let w = (WIDTH - 40).min(24 + 8 * members.chars().count() as i64);
        let _ = writeln!(
            svg,
            r##"    <rect x="20" y="{y}" width="{w}" height="{}" rx="6" fill="#e8eef6" stroke="#4a7ab5"/>"##,
            BLOCK_ROW - 8
        );
        let _ = writeln!(svg, r#"    <text x="32" y="{}">{members}</text>"#, y + 18);
    }
    let _ = writeln!(svg, "  </g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
