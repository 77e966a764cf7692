use hasse_core::datasets;
use hasse_core::render::{emit_dot, emit_svg, layout_diagram, rls_diagram, StyleConfig};
use hasse_core::{LayoutStructure, RandomisationPlan, RestrictedLayoutStructure};

fn layouts() -> Vec<LayoutStructure> {
    datasets::all()
        .iter()
        .map(|f| LayoutStructure::build(&f.table).unwrap())
        .collect()
}

fn bibd_rls(ls: &LayoutStructure) -> RestrictedLayoutStructure<'_> {
    let mut plan = RandomisationPlan::empty(ls);
    for (id, label) in ["Mean", "Blocks", "Varieties", "Plot[Block]"].iter().enumerate() {
        plan.labels[id] = Some(label.to_string());
    }
    plan.arrows = vec![(2, 3)];
    RestrictedLayoutStructure::build(ls, &plan).unwrap()
}

#[test]
fn svg_is_well_formed_with_expected_counts() {
    let style = StyleConfig::default();
    for ls in layouts() {
        let spec = layout_diagram(&ls, &style);
        let svg = emit_svg(&spec, &style);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let count = |class: &str| {
            doc.descendants()
                .filter(|n| n.attribute("class") == Some(class))
                .count()
        };
        assert_eq!(count("node"), ls.len());
        assert_eq!(count("edge"), ls.cover_edges().len());
        assert_eq!(count("df"), ls.len());
        assert_eq!(count("partial"), spec.partial.len());
        assert_eq!(count("arrow"), 0);
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn nodes_stay_inside_the_canvas() {
    let style = StyleConfig::default();
    for ls in layouts() {
        let spec = layout_diagram(&ls, &style);
        for n in &spec.nodes {
            assert!(
                n.x - n.width / 2.0 >= 0.0 && n.x + n.width / 2.0 <= spec.width,
                "{}",
                n.name
            );
            assert!(
                n.y - n.height / 2.0 >= 0.0 && n.y + n.height / 2.0 <= spec.height,
                "{}",
                n.name
            );
        }
        for e in &spec.edges {
            assert!(spec.nodes[e.from].tier < spec.nodes[e.to].tier);
        }
    }
}

#[test]
fn hiding_partial_edges_keeps_geometry() {
    let ls = LayoutStructure::build(&datasets::splitplot().table).unwrap();
    let on = StyleConfig::default();
    let off = StyleConfig {
        show_partial: false,
        ..StyleConfig::default()
    };
    let a = layout_diagram(&ls, &on);
    let b = layout_diagram(&ls, &off);
    assert!(!a.partial.is_empty());
    assert!(b.partial.is_empty());
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.edges, b.edges);
    assert!(!emit_svg(&b, &off).contains("class=\"partial\""));
}

#[test]
fn monochrome_uses_black_only() {
    let ls = LayoutStructure::build(&datasets::splitplot().table).unwrap();
    let style = StyleConfig {
        monochrome: true,
        ..StyleConfig::default()
    };
    let svg = emit_svg(&layout_diagram(&ls, &style), &style);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    for node in doc.descendants() {
        for attr in ["stroke", "fill"] {
            if let Some(v) = node.attribute(attr) {
                assert!(v == "black" || v == "none", "{attr}={v}");
            }
        }
    }
    let dot = emit_dot(&layout_diagram(&ls, &style), &style);
    assert!(!dot.contains(&StyleConfig::default().partial_colour));
}

#[test]
fn random_objects_are_underlined() {
    let ls = LayoutStructure::build(&datasets::crossover().table).unwrap();
    let style = StyleConfig::default();
    let spec = layout_diagram(&ls, &style);
    for n in &spec.nodes {
        assert_eq!(n.underline, ls.object(n.object).is_random, "{}", n.name);
    }
    let svg = emit_svg(&spec, &style);
    assert_eq!(svg.matches("text-decoration=\"underline\"").count(), 2);
}

#[test]
fn rls_diagram_has_arrows() {
    let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
    let rls = bibd_rls(&ls);
    let style = StyleConfig::default();
    let spec = rls_diagram(&rls, &style);
    assert_eq!(spec.nodes.len(), 4);
    assert_eq!(spec.arrows.len(), 1);
    let svg = emit_svg(&spec, &style);
    roxmltree::Document::parse(&svg).unwrap();
    assert!(svg.contains("marker-end=\"url(#arrowhead)\""));
    let hidden = StyleConfig {
        show_arrows: false,
        ..StyleConfig::default()
    };
    let svg = emit_svg(&rls_diagram(&rls, &hidden), &hidden);
    assert!(!svg.contains("arrowhead"));
}

#[test]
fn dot_lists_every_node_and_edge() {
    let style = StyleConfig::default();
    for ls in layouts() {
        let dot = emit_dot(&layout_diagram(&ls, &style), &style);
        assert!(dot.starts_with("digraph"));
        assert!(dot.trim_end().ends_with('}'));
        assert_eq!(dot.matches("[label=<").count(), ls.len());
        assert_eq!(dot.matches("class=\"edge\"").count(), ls.cover_edges().len());
    }
}

#[test]
fn label_text_is_escaped() {
    let table = hasse_core::load_design("A<1>,B&2\nx,p\ny,p\nx,q\ny,q\n", None).unwrap();
    let ls = LayoutStructure::build(&table).unwrap();
    let style = StyleConfig::default();
    let spec = layout_diagram(&ls, &style);
    roxmltree::Document::parse(&emit_svg(&spec, &style)).unwrap();
    let dot = emit_dot(&spec, &style);
    assert!(dot.contains("A&lt;1&gt;"));
}

#[test]
fn style_validation() {
    assert!(StyleConfig::default().validate().is_ok());
    let bad = StyleConfig {
        arrow_pos: 0.0,
        ..StyleConfig::default()
    };
    assert!(bad.validate().is_err());
    let bad = StyleConfig {
        df_colour: "\"red".into(),
        ..StyleConfig::default()
    };
    assert!(bad.validate().is_err());
}
