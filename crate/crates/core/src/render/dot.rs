use std::fmt::Write;

use super::{levels_text, num, DiagramSpec, StyleConfig};

fn html(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Graphviz source for a diagram: one node per object, a rank per tier,
/// cover edges, dotted partial crossings and randomisation arrows.
pub fn emit_dot(spec: &DiagramSpec, style: &StyleConfig) -> String {
    let mut out = String::from("digraph hasse {\n");
    writeln!(
        out,
        "  graph [rankdir=TB, nodesep=0.4, ranksep=0.8];\n  node [shape=plaintext, fontname=\"{}\", fontcolor=\"{}\"];",
        html(&style.font_family),
        style.colour(&style.object_colour)
    )
    .expect("write to string");

    for (i, node) in spec.nodes.iter().enumerate() {
        let mut name = html(&node.name);
        if node.underline {
            name = format!("<U>{name}</U>");
        }
        let levels = if style.show_max_levels {
            levels_text(node.levels, node.max_levels)
        } else {
            node.levels.to_string()
        };
        let mut label = format!("{name}<BR/>{}", html(&levels));
        if style.show_df {
            write!(
                label,
                "<BR/><FONT COLOR=\"{}\">{}</FONT>",
                style.colour(&style.df_colour),
                node.df
            )
            .expect("write to string");
        }
        writeln!(
            out,
            "  n{i} [label=<{label}>, fontsize={}];",
            num(style.font_px(node.font))
        )
        .expect("write to string");
    }

    let depth = spec.nodes.iter().map(|n| n.tier).max();
    for tier in 0..=depth.unwrap_or(0) {
        let members: Vec<String> = (0..spec.nodes.len())
            .filter(|&i| spec.nodes[i].tier == tier)
            .map(|i| format!("n{i};"))
            .collect();
        if members.len() > 1 {
            writeln!(out, "  {{ rank=same; {} }}", members.join(" ")).expect("write to string");
        }
    }

    for e in &spec.edges {
        writeln!(
            out,
            "  n{} -> n{} [class=\"edge\", dir=none, color=\"{}\", penwidth={}];",
            e.from,
            e.to,
            style.colour(&style.structural_colour),
            num(style.structural_width)
        )
        .expect("write to string");
    }
    if style.show_partial {
        for e in &spec.partial {
            writeln!(
                out,
                "  n{} -> n{} [class=\"partial\", dir=none, style=dotted, constraint=false, color=\"{}\", penwidth={}];",
                e.from,
                e.to,
                style.colour(&style.partial_colour),
                num(style.partial_width)
            )
            .expect("write to string");
        }
    }
    if style.show_arrows {
        for e in &spec.arrows {
            writeln!(
                out,
                "  n{} -> n{} [class=\"arrow\", constraint=false, color=\"{}\", penwidth={}];",
                e.from,
                e.to,
                style.colour(&style.arrow_colour),
                num(style.arrow_width)
            )
            .expect("write to string");
        }
    }
    out.push_str("}\n");
    out
}
