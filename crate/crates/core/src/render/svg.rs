use std::fmt::Write;

use super::{num, DiagramEdge, DiagramSpec, StyleConfig, LINE_HEIGHT};

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
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

fn line(out: &mut String, class: &str, e: &DiagramEdge, colour: &str, width: f64, extra: &str) {
    writeln!(
        out,
        r#"    <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="{}"{extra}/>"#,
        num(e.x1),
        num(e.y1),
        num(e.x2),
        num(e.y2),
        num(width)
    )
    .expect("write to string");
}

/// SVG document for a diagram. Random objects are underlined; degrees of
/// freedom, maximum levels, partial crossings and arrows follow the style
/// toggles.
pub fn emit_svg(spec: &DiagramSpec, style: &StyleConfig) -> String {
    let mut out = String::new();
    let w = num(spec.width);
    let h = num(spec.height);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="{}">"#,
        escape(&style.font_family)
    )
    .expect("write to string");

    let arrows = style.show_arrows && !spec.arrows.is_empty();
    let arrow_colour = style.colour(&style.arrow_colour);
    if arrows {
        writeln!(
            out,
            r#"  <defs>
    <marker id="arrowhead" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse">
      <path d="M 0 0 L 10 5 L 0 10 z" fill="{arrow_colour}"/>
    </marker>
  </defs>"#
        )
        .expect("write to string");
    }

    out.push_str("  <g class=\"edges\">\n");
    for e in &spec.edges {
        line(
            &mut out,
            "edge",
            e,
            style.colour(&style.structural_colour),
            style.structural_width,
            "",
        );
    }
    out.push_str("  </g>\n");

    if style.show_partial && !spec.partial.is_empty() {
        out.push_str("  <g class=\"partial-edges\">\n");
        for e in &spec.partial {
            line(
                &mut out,
                "partial",
                e,
                style.colour(&style.partial_colour),
                style.partial_width,
                r#" stroke-dasharray="2 4""#,
            );
        }
        out.push_str("  </g>\n");
    }

    if arrows {
        out.push_str("  <g class=\"arrows\">\n");
        for e in &spec.arrows {
            // Bow the arrow sideways so it does not hide a cover edge.
            let (mx, my) = ((e.x1 + e.x2) / 2.0, (e.y1 + e.y2) / 2.0);
            let (dx, dy) = (e.x2 - e.x1, e.y2 - e.y1);
            let len = (dx * dx + dy * dy).sqrt().max(1.0);
            let bow = 0.12 * len;
            let (cx, cy) = (mx - dy / len * bow, my + dx / len * bow);
            writeln!(
                out,
                r#"    <path class="arrow" d="M {} {} Q {} {} {} {}" fill="none" stroke="{arrow_colour}" stroke-width="{}" marker-end="url(#arrowhead)"/>"#,
                num(e.x1),
                num(e.y1),
                num(cx),
                num(cy),
                num(e.x2),
                num(e.y2),
                num(style.arrow_width)
            )
            .expect("write to string");
        }
        out.push_str("  </g>\n");
    }

    out.push_str("  <g class=\"nodes\">\n");
    let object_colour = style.colour(&style.object_colour);
    let df_colour = style.colour(&style.df_colour);
    for node in &spec.nodes {
        let px = style.font_px(node.font);
        let step = LINE_HEIGHT * px;
        let top = node.y - node.height / 2.0 + px;
        let x = num(node.x);
        let size = num(px);
        writeln!(out, r#"    <g class="node" id="node-{}">"#, node.object).expect("write to string");
        let underline = if node.underline {
            r#" text-decoration="underline""#
        } else {
            ""
        };
        writeln!(
            out,
            r#"      <text class="node-name" x="{x}" y="{}" font-size="{size}" text-anchor="middle" fill="{object_colour}"{underline}>{}</text>"#,
            num(top),
            escape(&node.name)
        )
        .expect("write to string");
        let max = match node.max_levels {
            Some(m) if style.show_max_levels => format!(r#"<tspan class="maxlevels"> ({m})</tspan>"#),
            _ => String::new(),
        };
        writeln!(
            out,
            r#"      <text class="levels" x="{x}" y="{}" font-size="{size}" text-anchor="middle" fill="{object_colour}">{}{max}</text>"#,
            num(top + step),
            node.levels
        )
        .expect("write to string");
        if style.show_df {
            writeln!(
                out,
                r#"      <text class="df" x="{x}" y="{}" font-size="{size}" text-anchor="middle" fill="{df_colour}">{}</text>"#,
                num(top + 2.0 * step),
                node.df
            )
            .expect("write to string");
        }
        out.push_str("    </g>\n");
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::render::layout_diagram;
    use crate::LayoutStructure;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn deterministic() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let style = StyleConfig::default();
        let a = emit_svg(&layout_diagram(&ls, &style), &style);
        let b = emit_svg(&layout_diagram(&ls, &style), &style);
        assert_eq!(a, b);
        assert!(a.contains("Plots=Bl^Va"));
        assert!(a.contains(r#"<tspan class="maxlevels"> (60)</tspan>"#));
    }
}
