//! Hasse diagram geometry and output.
//!
//! Objects sit on horizontal tiers by their depth below the Mean and are
//! centred within each tier. Node sizes are estimated from label lengths
//! (0.6 em per character), so the same input always yields the same
//! coordinates.

mod dot;
mod svg;

use thiserror::Error;

pub use dot::emit_dot;
pub use svg::emit_svg;

use crate::layout::{LayoutStructure, RefinementOrder};
use crate::{Relationship, RestrictedLayoutStructure};

#[derive(Debug, Clone, PartialEq)]
pub struct StyleConfig {
    pub show_partial: bool,
    pub show_df: bool,
    pub show_max_levels: bool,
    pub show_arrows: bool,
    pub monochrome: bool,
    pub structural_colour: String,
    pub partial_colour: String,
    pub object_colour: String,
    pub df_colour: String,
    pub arrow_colour: String,
    pub structural_width: f64,
    pub partial_width: f64,
    pub arrow_width: f64,
    /// Larger values end arrows further from their target.
    pub arrow_pos: f64,
    pub font_family: String,
    pub font_size: f64,
    pub larger_multiplier: f64,
    pub middle_multiplier: f64,
    pub smaller_multiplier: f64,
}

impl Default for StyleConfig {
    fn default() -> Self {
        StyleConfig {
            show_partial: true,
            show_df: true,
            show_max_levels: true,
            show_arrows: true,
            monochrome: false,
            structural_colour: "grey".into(),
            partial_colour: "orange".into(),
            object_colour: "mediumblue".into(),
            df_colour: "red".into(),
            arrow_colour: "mediumblue".into(),
            structural_width: 2.0,
            partial_width: 1.5,
            arrow_width: 1.5,
            arrow_pos: 7.5,
            font_family: "sans-serif".into(),
            font_size: 12.0,
            larger_multiplier: 1.0,
            middle_multiplier: 1.0,
            smaller_multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid style: {0}")]
pub struct StyleError(pub String);

impl StyleConfig {
    pub fn validate(&self) -> Result<(), StyleError> {
        let positive = [
            ("structural width", self.structural_width),
            ("partial width", self.partial_width),
            ("arrow width", self.arrow_width),
            ("arrow position", self.arrow_pos),
            ("font size", self.font_size),
            ("larger font multiplier", self.larger_multiplier),
            ("middle font multiplier", self.middle_multiplier),
            ("smaller font multiplier", self.smaller_multiplier),
        ];
        for (what, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(StyleError(format!("{what} must be positive, got {v}")));
            }
        }
        for (what, c) in [
            ("structural colour", &self.structural_colour),
            ("partial colour", &self.partial_colour),
            ("object colour", &self.object_colour),
            ("df colour", &self.df_colour),
            ("arrow colour", &self.arrow_colour),
        ] {
            if c.is_empty() || c.contains(['"', '<', '>', '&', '\'']) {
                return Err(StyleError(format!("{what} `{c}` is not a colour")));
            }
        }
        Ok(())
    }

    /// The colour actually drawn.
    pub fn colour<'a>(&self, c: &'a str) -> &'a str {
        if self.monochrome {
            "black"
        } else {
            c
        }
    }

    fn multiplier(&self, font: FontClass) -> f64 {
        match font {
            FontClass::Larger => self.larger_multiplier,
            FontClass::Middle => self.middle_multiplier,
            FontClass::Smaller => self.smaller_multiplier,
        }
    }

    pub fn font_px(&self, font: FontClass) -> f64 {
        self.font_size * self.multiplier(font)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FontClass {
    /// Tier with four or fewer objects.
    Larger,
    /// Object that merges a factor with an equivalent generalised factor.
    Middle,
    /// Tier with five or more objects.
    Smaller,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramNode {
    /// Structural object id.
    pub object: usize,
    pub tier: usize,
    pub slot: usize,
    /// Centre of the label block.
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub name: String,
    pub underline: bool,
    pub levels: usize,
    pub max_levels: Option<u64>,
    pub df: i64,
    pub font: FontClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramEdge {
    /// Node indices.
    pub from: usize,
    pub to: usize,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSpec {
    pub width: f64,
    pub height: f64,
    pub nodes: Vec<DiagramNode>,
    /// Cover relations.
    pub edges: Vec<DiagramEdge>,
    /// Partially crossed pairs.
    pub partial: Vec<DiagramEdge>,
    /// Randomisation arrows; arrows from an object to itself are left out.
    pub arrows: Vec<DiagramEdge>,
}

const MARGIN: f64 = 30.0;
const TIER_GAP: f64 = 110.0;
const SLOT_GAP: f64 = 30.0;
const CHAR_WIDTH: f64 = 0.6;
const LINE_HEIGHT: f64 = 1.25;
const EDGE_PAD: f64 = 4.0;
const ARROW_REACH: f64 = 150.0;

struct NodeInput {
    object: usize,
    name: String,
    underline: bool,
    levels: usize,
    max_levels: Option<u64>,
    df: i64,
    merged: bool,
}

fn levels_text(levels: usize, max: Option<u64>) -> String {
    match max {
        Some(m) => format!("{levels} ({m})"),
        None => levels.to_string(),
    }
}

fn build(
    inputs: Vec<NodeInput>,
    order: &RefinementOrder,
    partial_pairs: Vec<(usize, usize)>,
    arrows: &[(usize, usize)],
    style: &StyleConfig,
) -> DiagramSpec {
    let tiers = order.tiers();
    let depth = tiers.iter().copied().max().unwrap_or(0);
    let mut tier_members: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (i, &t) in tiers.iter().enumerate() {
        tier_members[t].push(i);
    }
    let mut nodes: Vec<DiagramNode> = inputs
        .into_iter()
        .enumerate()
        .map(|(i, input)| {
            let tier = tiers[i];
            let font = if input.merged {
                FontClass::Middle
            } else if tier_members[tier].len() <= 4 {
                FontClass::Larger
            } else {
                FontClass::Smaller
            };
            let px = style.font_px(font);
            let chars = [
                input.name.chars().count(),
                levels_text(input.levels, input.max_levels).chars().count(),
                input.df.to_string().chars().count(),
            ]
            .into_iter()
            .max()
            .unwrap_or(1);
            DiagramNode {
                object: input.object,
                tier,
                slot: tier_members[tier].iter().position(|&j| j == i).expect("member"),
                x: 0.0,
                y: 0.0,
                width: chars as f64 * CHAR_WIDTH * px,
                height: 3.0 * LINE_HEIGHT * px,
                name: input.name,
                underline: input.underline,
                levels: input.levels,
                max_levels: input.max_levels,
                df: input.df,
                font,
            }
        })
        .collect();

    let slot_width = nodes.iter().map(|n| n.width).fold(0.0, f64::max) + SLOT_GAP;
    let tallest = nodes.iter().map(|n| n.height).fold(0.0, f64::max);
    let widest = tier_members.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let inner = widest * slot_width;
    let width = inner + 2.0 * MARGIN;
    let tier_step = TIER_GAP.max(tallest + 40.0);
    let height = 2.0 * MARGIN + tallest + depth as f64 * tier_step;
    for node in &mut nodes {
        let count = tier_members[node.tier].len() as f64;
        let offset = (inner - count * slot_width) / 2.0;
        node.x = MARGIN + offset + (node.slot as f64 + 0.5) * slot_width;
        node.y = MARGIN + tallest / 2.0 + node.tier as f64 * tier_step;
    }

    let connect = |from: usize, to: usize| -> DiagramEdge {
        let (a, b) = (&nodes[from], &nodes[to]);
        DiagramEdge {
            from,
            to,
            x1: a.x,
            y1: a.y + a.height / 2.0 + EDGE_PAD,
            x2: b.x,
            y2: b.y - b.height / 2.0 - EDGE_PAD,
        }
    };
    let edges = order.cover_edges().iter().map(|&(a, b)| connect(a, b)).collect();
    let partial = if style.show_partial {
        partial_pairs.into_iter().map(|(a, b)| connect(a, b)).collect()
    } else {
        Vec::new()
    };
    let shorten = ARROW_REACH / style.arrow_pos;
    let arrows = arrows
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| {
            let mut e = connect(a, b);
            let (dx, dy) = (e.x2 - e.x1, e.y2 - e.y1);
            let len = (dx * dx + dy * dy).sqrt();
            if len > 2.0 * shorten {
                e.x2 -= dx / len * shorten;
                e.y2 -= dy / len * shorten;
            }
            e
        })
        .collect();
    DiagramSpec {
        width,
        height,
        nodes,
        edges,
        partial,
        arrows,
    }
}

fn partial_pairs(n: usize, rel: impl Fn(usize, usize) -> Relationship) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rel(a, b) == Relationship::PartiallyCrossed {
                out.push((a, b));
            }
        }
    }
    out
}

/// Diagram of the full layout structure.
pub fn layout_diagram(ls: &LayoutStructure, style: &StyleConfig) -> DiagramSpec {
    let inputs = ls
        .objects()
        .iter()
        .map(|o| NodeInput {
            object: o.id,
            name: o.display_label.clone(),
            underline: o.is_random,
            levels: o.n_levels,
            max_levels: o.potential_max_levels,
            df: o.df,
            merged: o.is_merged(),
        })
        .collect();
    let pairs = partial_pairs(ls.len(), |a, b| ls.relationship(a, b));
    build(inputs, ls.order(), pairs, &[], style)
}

/// Diagram of a restricted layout structure, with its arrows.
pub fn rls_diagram(rls: &RestrictedLayoutStructure<'_>, style: &StyleConfig) -> DiagramSpec {
    let ls = rls.layout();
    let inputs = rls
        .ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let o = ls.object(id);
            NodeInput {
                object: id,
                name: rls.labels[i].clone(),
                underline: o.is_random,
                levels: o.n_levels,
                max_levels: o.potential_max_levels,
                df: rls.df[i],
                merged: o.is_merged(),
            }
        })
        .collect();
    let pairs = partial_pairs(rls.len(), |a, b| ls.relationship(rls.ids[a], rls.ids[b]));
    build(inputs, &rls.order, pairs, &rls.arrows, style)
}

/// Fixed-precision number for output.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
