//! Randomisation plans and the restricted layout structure.
//!
//! A plan gives some structural objects a randomisation label and lists
//! randomisation arrows between them. The objects with labels make up the
//! restricted layout structure, from which a mixed model is suggested.

mod expr;

use std::collections::BTreeSet;

use thiserror::Error;

pub use expr::{parse_rand_expr, rand_nest_set, resolve_factor_name, FactorRef, ParseError, RandExpr, UnsupportedExpr};

use crate::confound::{detect_confounding_in, ConfoundReport};
use crate::layout::{format_relation_table, smallest_by_names, RefinementOrder, RelationEntry};
use crate::{Diagnostic, FactorSet, LayoutStructure};

/// Printed in front of the model formula.
pub const MODEL_PREFIX: &str = "The suggested mixed model to be fitted is:";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RlsError {
    #[error("cannot parse `{label}`: {source}")]
    Parse {
        label: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Unsupported(#[from] UnsupportedExpr),
    #[error("`{label}` does not correspond to a structural object: {reason}")]
    Unresolvable { label: String, reason: String },
    #[error("label `{label}` was given for `{row}` but describes `{resolved}`")]
    LabelMismatch {
        row: String,
        label: String,
        resolved: String,
    },
    #[error("arrow `{from}` → `{to}` does not point downwards: the target must be nested in the source")]
    UpwardArrow { from: String, to: String },
    #[error("arrow `{from}` → `{to}` uses `{object}`, which has no randomisation label in the plan")]
    ArrowToAbsent { from: String, to: String, object: String },
    #[error("no randomisation objects other than the Mean are defined")]
    NoObjects,
    #[error("arrow index {index} is outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("arrow ({from}, {to}): in index form the second index must be greater than the first")]
    IndexOrder { from: usize, to: usize },
    #[error("plan line {line}: unknown structural object `{name}`")]
    UnknownRow { line: u64, name: String },
    #[error("plan lists `{0}` more than once")]
    DuplicateRow(String),
    #[error("{0}")]
    Format(String),
    #[error("plan has {found} labels for {expected} structural objects")]
    PlanSize { expected: usize, found: usize },
    #[error("unknown structural object id {0}")]
    UnknownId(usize),
}

fn parse(label: &str, ls: &LayoutStructure) -> Result<RandExpr, RlsError> {
    parse_rand_expr(label, ls.factor_names()).map_err(|source| RlsError::Parse {
        label: label.to_string(),
        source,
    })
}

/// The structural object an expression stands for: the object of the union
/// of its factor names, after checking that every `[context]` is coarser
/// than what it qualifies and that aliases agree.
pub fn resolve_expr(ls: &LayoutStructure, expr: &RandExpr) -> Result<usize, RlsError> {
    resolve_inner(ls, expr).map_err(|reason| RlsError::Unresolvable {
        label: expr.to_string(),
        reason,
    })
}

fn names_object(ls: &LayoutStructure, expr: &RandExpr) -> usize {
    ls.object_for(expr.factor_indices().into_iter().collect())
}

fn resolve_inner(ls: &LayoutStructure, expr: &RandExpr) -> Result<usize, String> {
    match expr {
        RandExpr::Alias { name, inner } => {
            let named = ls.object_for(FactorSet::single(name.index));
            let id = resolve_inner(ls, inner)?;
            if named != id {
                return Err(format!("`{}` is not equivalent to `{inner}`", name.name));
            }
            Ok(id)
        }
        RandExpr::Randomised { source, target } => {
            let s = resolve_inner(ls, source)?;
            let t = resolve_inner(ls, target)?;
            if s != t && !ls.is_coarser(s, t) {
                return Err(format!("`{target}` is not nested in `{source}`"));
            }
            Ok(t)
        }
        RandExpr::Within { inner, context } => {
            resolve_inner(ls, inner)?;
            let c = resolve_inner(ls, context)?;
            let whole = names_object(ls, expr);
            if !ls.is_coarser(c, whole) {
                return Err(format!("`{context}` is not coarser than `{}`", ls.object(whole).name));
            }
            Ok(whole)
        }
        RandExpr::Combine(parts) | RandExpr::Independent(parts) => {
            for p in parts {
                resolve_inner(ls, p)?;
            }
            Ok(names_object(ls, expr))
        }
        RandExpr::Mean | RandExpr::Base(_) => Ok(names_object(ls, expr)),
    }
}

/// Randomisation labels for (some of) the structural objects, plus arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomisationPlan {
    /// One entry per structural object id; `None` leaves the object out.
    pub labels: Vec<Option<String>>,
    /// `(from, to)` structural object ids.
    pub arrows: Vec<(usize, usize)>,
}

pub const PLAN_HEADER: [&str; 2] = ["structural_object", "randomisation_object"];

impl RandomisationPlan {
    /// Only the Mean is labelled.
    pub fn empty(ls: &LayoutStructure) -> Self {
        let mut labels = vec![None; ls.len()];
        labels[ls.mean_id()] = Some("Mean".to_string());
        RandomisationPlan {
            labels,
            arrows: Vec::new(),
        }
    }

    /// Two-column CSV, one row per structural object, `NULL` for objects
    /// without a label.
    pub fn to_csv(&self, ls: &LayoutStructure) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(PLAN_HEADER).expect("in-memory write");
        for (object, label) in ls.objects().iter().zip(&self.labels) {
            w.write_record([object.name.as_str(), label.as_deref().unwrap_or("NULL")])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
    }

    /// Reads labels from the CSV form. Rows name structural objects by name
    /// or display label; objects without a row are left out.
    pub fn from_csv(ls: &LayoutStructure, text: &str) -> Result<Self, RlsError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| RlsError::Format(e.to_string()))?.clone();
        if headers.len() < 2 {
            return Err(RlsError::Format(format!(
                "plan needs the columns {}",
                PLAN_HEADER.join(",")
            )));
        }
        let mut labels: Vec<Option<String>> = vec![None; ls.len()];
        let mut seen = vec![false; ls.len()];
        for record in reader.records() {
            let record = record.map_err(|e| RlsError::Format(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            let name = record.get(0).unwrap_or("");
            let id = find_object(ls, name).ok_or_else(|| RlsError::UnknownRow {
                line,
                name: name.to_string(),
            })?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(RlsError::DuplicateRow(name.to_string()));
            }
            let label = record.get(1).unwrap_or("");
            labels[id] = (!label.is_empty() && !label.eq_ignore_ascii_case("NULL")).then(|| label.to_string());
        }
        Ok(RandomisationPlan {
            labels,
            arrows: Vec::new(),
        })
    }

    /// Parses an arrows CSV with header `from,to`. Entries are either
    /// 1-based object indices (both numeric), or names: structural object
    /// names, labels used in this plan, or randomisation expressions.
    pub fn read_arrows(&mut self, ls: &LayoutStructure, text: &str) -> Result<(), RlsError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut arrows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| RlsError::Format(e.to_string()))?;
            if record.len() < 2 {
                return Err(RlsError::Format("arrow rows need two entries".to_string()));
            }
            let (from, to) = (&record[0], &record[1]);
            match (from.parse::<usize>(), to.parse::<usize>()) {
                (Ok(a), Ok(b)) => {
                    for i in [a, b] {
                        if i == 0 || i > ls.len() {
                            return Err(RlsError::IndexOutOfRange {
                                index: i,
                                max: ls.len(),
                            });
                        }
                    }
                    if b <= a {
                        return Err(RlsError::IndexOrder { from: a, to: b });
                    }
                    arrows.push((a - 1, b - 1));
                }
                _ => arrows.push((self.lookup(ls, from)?, self.lookup(ls, to)?)),
            }
        }
        self.arrows = arrows;
        Ok(())
    }

    fn lookup(&self, ls: &LayoutStructure, text: &str) -> Result<usize, RlsError> {
        if let Some(id) = self.labels.iter().position(|l| l.as_deref() == Some(text)) {
            return Ok(id);
        }
        if let Some(id) = find_object(ls, text) {
            return Ok(id);
        }
        resolve_expr(ls, &parse(text, ls)?)
    }

    /// Ids of labelled objects, in layout order.
    pub fn included(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i].is_some()).collect()
    }
}

/// Structural object by full name, display label or merged factor name.
pub fn find_object(ls: &LayoutStructure, name: &str) -> Option<usize> {
    let objects = ls.objects();
    objects
        .iter()
        .position(|o| o.name == name || o.display_label == name)
        .or_else(|| {
            objects.iter().position(|o| {
                o.aliases.iter().any(|f| ls.factor_names()[f] == name)
                    || o.factors.len() == 1 && ls.factor_names()[o.factors.iter().next().expect("one")] == name
            })
        })
}

/// Checks a plan against the layout structure. Returns warnings; errors
/// abort.
pub fn validate_plan(ls: &LayoutStructure, plan: &RandomisationPlan) -> Result<Vec<Diagnostic>, RlsError> {
    if plan.labels.len() != ls.len() {
        return Err(RlsError::PlanSize {
            expected: ls.len(),
            found: plan.labels.len(),
        });
    }
    for (id, label) in plan.labels.iter().enumerate() {
        let Some(label) = label else { continue };
        let resolved = resolve_expr(ls, &parse(label, ls)?)?;
        if resolved != id {
            return Err(RlsError::LabelMismatch {
                row: ls.object(id).name.clone(),
                label: label.clone(),
                resolved: ls.object(resolved).name.clone(),
            });
        }
    }
    for &(from, to) in &plan.arrows {
        for id in [from, to] {
            if id >= ls.len() {
                return Err(RlsError::UnknownId(id));
            }
        }
        let name = |id: usize| plan.labels[id].clone().unwrap_or_else(|| ls.object(id).name.clone());
        for id in [from, to] {
            if plan.labels[id].is_none() {
                return Err(RlsError::ArrowToAbsent {
                    from: name(from),
                    to: name(to),
                    object: ls.object(id).name.clone(),
                });
            }
        }
        if from != to && !ls.is_coarser(from, to) {
            return Err(RlsError::UpwardArrow {
                from: name(from),
                to: name(to),
            });
        }
    }
    if plan
        .labels
        .iter()
        .enumerate()
        .all(|(id, l)| l.is_none() || id == ls.mean_id())
    {
        return Err(RlsError::NoObjects);
    }
    let mut warnings = Vec::new();
    for id in [ls.mean_id(), ls.finest_id()] {
        if plan.labels[id].is_none() {
            warnings.push(Diagnostic::RequiredObjectAbsent {
                object: ls.object(id).name.clone(),
            });
        }
    }
    warnings.dedup();
    Ok(warnings)
}

/// Why an object was suggested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    /// Endpoint of an arrow.
    ArrowEnd = 1,
    /// Randomisation-nests an arrow endpoint.
    Nesting = 2,
    /// The Mean or the observational unit.
    Always = 3,
    /// Fixed generalised factor of randomised fixed factors.
    FixedCombination = 4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    /// Suggested object ids, in layout order, with the first rule that
    /// brought each in.
    pub objects: Vec<(usize, Rule)>,
    /// Proposed label per structural object id.
    pub labels: Vec<Option<String>>,
    pub arrows: Vec<(usize, usize)>,
}

impl Suggestion {
    pub fn ids(&self) -> Vec<usize> {
        self.objects.iter().map(|o| o.0).collect()
    }

    pub fn to_plan(&self) -> RandomisationPlan {
        RandomisationPlan {
            labels: self.labels.clone(),
            arrows: self.arrows.clone(),
        }
    }
}

/// Proposes the restricted layout structure for a set of randomisation
/// arrows given as `(source, target)` expressions.
pub fn suggest_rls_objects(ls: &LayoutStructure, arrows: &[(RandExpr, RandExpr)]) -> Result<Suggestion, RlsError> {
    let mut labels: Vec<Option<String>> = vec![None; ls.len()];
    let mut rule: Vec<Option<Rule>> = vec![None; ls.len()];
    let mut add = |id: usize, label: String, r: Rule, labels: &mut Vec<Option<String>>| {
        if rule[id].is_none_or(|old| r < old) {
            rule[id] = Some(r);
            labels[id] = Some(label);
        }
    };

    let mut resolved = Vec::with_capacity(arrows.len());
    let mut sources = FactorSet::EMPTY;
    let mut frontier: Vec<RandExpr> = Vec::new();
    for (from, to) in arrows {
        let a = resolve_expr(ls, from)?;
        let b = resolve_expr(ls, to)?;
        if a != b && !ls.is_coarser(a, b) {
            return Err(RlsError::UpwardArrow {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        add(a, from.to_string(), Rule::ArrowEnd, &mut labels);
        add(b, to.to_string(), Rule::ArrowEnd, &mut labels);
        resolved.push((a, b));
        sources = sources.union(from.factor_indices().into_iter().collect());
        frontier.push(from.clone());
        frontier.push(to.clone());
    }

    let mut done: BTreeSet<RandExpr> = BTreeSet::new();
    while let Some(e) = frontier.pop() {
        if !done.insert(e.clone()) {
            continue;
        }
        for nested in rand_nest_set(&e)? {
            let id = resolve_expr(ls, &nested)?;
            add(id, nested.to_string(), Rule::Nesting, &mut labels);
            frontier.push(nested);
        }
    }

    for id in [ls.mean_id(), ls.finest_id()] {
        add(id, plain_label(ls, id), Rule::Always, &mut labels);
    }

    for object in ls.objects() {
        if object.is_random || object.is_mean() {
            continue;
        }
        let qualifies = object
            .representations
            .iter()
            .any(|r| r.len() >= 2 && r.is_subset(sources) && r.iter().all(|f| !ls.factor_is_random(f)));
        if qualifies {
            add(
                object.id,
                plain_label(ls, object.id),
                Rule::FixedCombination,
                &mut labels,
            );
        }
    }

    let objects = (0..ls.len()).filter_map(|id| rule[id].map(|r| (id, r))).collect();
    Ok(Suggestion {
        objects,
        labels,
        arrows: resolved,
    })
}

/// A label for an object that no arrow mentions: a merged factor's name if
/// there is one, otherwise its factors joined with `∧`.
fn plain_label(ls: &LayoutStructure, id: usize) -> String {
    let object = ls.object(id);
    if object.is_mean() {
        return "Mean".to_string();
    }
    if let Some(f) = object.aliases.iter().next() {
        return ls.factor_names()[f].clone();
    }
    ls.factor_set_names(object.factors).join("∧")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelEquation {
    pub fixed: Vec<String>,
    pub random: Vec<String>,
}

impl ModelEquation {
    /// Formula in mixed-model notation, e.g. `Response ~ A + (1 | B)`.
    pub fn text(&self) -> String {
        let mut terms: Vec<String> = self.fixed.clone();
        terms.extend(self.random.iter().map(|t| format!("(1 | {t})")));
        if self.fixed.is_empty() {
            terms.insert(0, "1".to_string());
        }
        format!("Response ~ {}", terms.join(" + "))
    }

    /// Prefix line followed by the formula.
    pub fn report(&self) -> String {
        format!("{MODEL_PREFIX}\n{}\n", self.text())
    }
}

/// Model term for a structural object: a random object equal to a single
/// factor uses that factor's name; otherwise the smallest set of primary
/// factors producing it, joined with `:`.
pub fn model_term(ls: &LayoutStructure, id: usize) -> String {
    let object = ls.object(id);
    let names = ls.factor_names();
    if object.is_random {
        let mut singles: Vec<usize> = object
            .representations
            .iter()
            .filter(|r| r.len() == 1)
            .flat_map(|r| r.iter())
            .collect();
        singles.sort_by(|&a, &b| {
            ls.factor_is_random(b)
                .cmp(&ls.factor_is_random(a))
                .then_with(|| crate::layout::compare_names(&names[a], &names[b]))
        });
        if let Some(&f) = singles.first() {
            return names[f].clone();
        }
    }
    let primary = ls.primary_factors();
    let set = smallest_by_names(
        object.representations.iter().copied().filter(|r| r.is_subset(primary)),
        names,
    )
    .unwrap_or(object.factors);
    ls.factor_set_names(set).join(":")
}

pub fn model_equation(ls: &LayoutStructure, ids: &[usize]) -> ModelEquation {
    let mut model = ModelEquation {
        fixed: Vec::new(),
        random: Vec::new(),
    };
    for &id in ids {
        let object = ls.object(id);
        if object.is_mean() {
            continue;
        }
        let term = model_term(ls, id);
        if object.is_random {
            model.random.push(term);
        } else {
            model.fixed.push(term);
        }
    }
    model
}

/// The structural objects kept by a randomisation plan, with their own
/// order, degrees of freedom and suggested model.
#[derive(Debug, Clone)]
pub struct RestrictedLayoutStructure<'a> {
    layout: &'a LayoutStructure,
    /// Structural object ids, in layout order.
    pub ids: Vec<usize>,
    pub labels: Vec<String>,
    pub exprs: Vec<RandExpr>,
    /// Arrows as `(from, to)` positions in `ids`.
    pub arrows: Vec<(usize, usize)>,
    pub order: RefinementOrder,
    /// Degrees of freedom by subtraction within the restricted structure.
    pub df: Vec<i64>,
    pub model: ModelEquation,
    pub confounding: ConfoundReport,
    pub diagnostics: Vec<Diagnostic>,
}

impl<'a> RestrictedLayoutStructure<'a> {
    pub fn build(layout: &'a LayoutStructure, plan: &RandomisationPlan) -> Result<Self, RlsError> {
        let diagnostics = validate_plan(layout, plan)?;
        let ids = plan.included();
        let labels: Vec<String> = ids.iter().map(|&i| plan.labels[i].clone().expect("included")).collect();
        let exprs = labels.iter().map(|l| parse(l, layout)).collect::<Result<Vec<_>, _>>()?;
        let position = |id: usize| ids.iter().position(|&i| i == id).expect("validated arrow endpoint");
        let arrows = plan.arrows.iter().map(|&(a, b)| (position(a), position(b))).collect();
        let order = layout.order().restrict(&ids);
        let levels: Vec<usize> = ids.iter().map(|&i| layout.object(i).n_levels).collect();
        let df = order.subtraction_df(&levels);
        let model = model_equation(layout, &ids);
        let confounding = detect_confounding_in(layout, &ids);
        Ok(RestrictedLayoutStructure {
            layout,
            ids,
            labels,
            exprs,
            arrows,
            order,
            df,
            model,
            confounding,
            diagnostics,
        })
    }

    pub fn layout(&self) -> &LayoutStructure {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Position of a structural object id in this structure.
    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    /// Cover edges as positions.
    pub fn cover_edges(&self) -> &[(usize, usize)] {
        self.order.cover_edges()
    }

    pub fn relation_entry(&self, row: usize, col: usize) -> RelationEntry {
        self.layout.relation_entry(self.ids[row], self.ids[col])
    }

    pub fn relation_table(&self) -> String {
        format_relation_table(&self.labels, &self.labels, |r, c| self.relation_entry(r, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    fn arrows(ls: &LayoutStructure, pairs: &[(&str, &str)]) -> Vec<(RandExpr, RandExpr)> {
        pairs
            .iter()
            .map(|(a, b)| (parse(a, ls).unwrap(), parse(b, ls).unwrap()))
            .collect()
    }

    fn names(ls: &LayoutStructure, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| ls.object(i).name.clone()).collect()
    }

    #[test]
    fn bibd_suggestion_and_model() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let s = suggest_rls_objects(&ls, &arrows(&ls, &[("Varieties", "Plot[Block]")])).unwrap();
        assert_eq!(s.ids(), [0, 1, 2, 3]);
        let rls = RestrictedLayoutStructure::build(&ls, &s.to_plan()).unwrap();
        assert_eq!(rls.model.text(), "Response ~ Blocks + Varieties + Blocks:Varieties");
        assert!(rls.model.random.is_empty());
    }

    #[test]
    fn crossover_suggestion() {
        let ls = LayoutStructure::build(&datasets::crossover().table).unwrap();
        let s = suggest_rls_objects(
            &ls,
            &arrows(&ls, &[("Sequence", "Subject"), ("Treatment", "Period^Sequence")]),
        )
        .unwrap();
        assert_eq!(
            names(&ls, &s.ids()),
            [
                "Mean",
                "Period",
                "Sequence",
                "Treatment",
                "Subject",
                "Period^Sequence^Treatment",
                "Period^Sequence^Subject^Treatment"
            ]
        );
        let rls = RestrictedLayoutStructure::build(&ls, &s.to_plan()).unwrap();
        assert_eq!(rls.model.fixed, ["Period", "Sequence", "Treatment", "Period:Sequence"]);
        assert_eq!(rls.model.random, ["Subject", "Observation"]);
    }

    #[test]
    fn splitplot_suggestion() {
        let ls = LayoutStructure::build(&datasets::splitplot().table).unwrap();
        let s = suggest_rls_objects(
            &ls,
            &arrows(&ls, &[("Soil", "Plant[Bench]"), ("Treat", "{Bench ⊗ Lyr}[Soil]")]),
        )
        .unwrap();
        assert_eq!(
            names(&ls, &s.ids()),
            [
                "Mean",
                "Bench",
                "Soil",
                "Treat",
                "Bench^Soil",
                "Lyr^Soil",
                "Soil^Treat",
                "Bench^Lyr^Soil^Treat"
            ]
        );
        let rls = RestrictedLayoutStructure::build(&ls, &s.to_plan()).unwrap();
        assert_eq!(rls.df, [1, 2, 3, 2, 6, 8, 6, 8]);
    }

    #[test]
    fn upward_arrow_rejected() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let err = suggest_rls_objects(&ls, &arrows(&ls, &[("Plots", "Blocks")])).unwrap_err();
        assert!(matches!(err, RlsError::UpwardArrow { .. }));
        let mut plan = RandomisationPlan::empty(&ls);
        for id in 0..4 {
            plan.labels[id] = Some(ls.object(id).name.clone());
        }
        plan.arrows = vec![(3, 0)];
        assert!(matches!(validate_plan(&ls, &plan), Err(RlsError::UpwardArrow { .. })));
    }

    #[test]
    fn plan_validation() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let mut plan = RandomisationPlan::empty(&ls);
        assert_eq!(validate_plan(&ls, &plan), Err(RlsError::NoObjects));
        plan.labels[2] = Some("Varieties".into());
        plan.labels[3] = Some("Plot[Block]".into());
        plan.arrows = vec![(2, 3)];
        assert!(validate_plan(&ls, &plan).unwrap().is_empty());
        plan.arrows = vec![(1, 3)];
        assert!(matches!(validate_plan(&ls, &plan), Err(RlsError::ArrowToAbsent { .. })));
        plan.arrows.clear();
        plan.labels[2] = Some("Blocks".into());
        assert!(matches!(validate_plan(&ls, &plan), Err(RlsError::LabelMismatch { .. })));
        plan.labels[2] = Some("Varieties".into());
        plan.labels[3] = Some("Plots[Blocks^Varieties]".into());
        assert!(matches!(validate_plan(&ls, &plan), Err(RlsError::Unresolvable { .. })));
    }

    #[test]
    fn missing_finest_warns() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let mut plan = RandomisationPlan::empty(&ls);
        plan.labels[1] = Some("Blocks".into());
        let warnings = validate_plan(&ls, &plan).unwrap();
        assert_eq!(
            warnings,
            [Diagnostic::RequiredObjectAbsent {
                object: "Blocks^Varieties".into()
            }]
        );
    }

    #[test]
    fn plan_csv_round_trip() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let plan = RandomisationPlan::empty(&ls);
        let text = plan.to_csv(&ls);
        assert_eq!(
            text,
            "structural_object,randomisation_object\nMean,Mean\nBlocks,NULL\nVarieties,NULL\nBlocks^Varieties,NULL\n"
        );
        assert_eq!(RandomisationPlan::from_csv(&ls, &text).unwrap(), plan);
        let err = RandomisationPlan::from_csv(&ls, "structural_object,randomisation_object\nNope,NULL\n").unwrap_err();
        assert!(matches!(err, RlsError::UnknownRow { line: 2, .. }));
    }

    #[test]
    fn arrows_in_index_and_label_form() {
        let ls = LayoutStructure::build(&datasets::bibd_6_10_3().table).unwrap();
        let mut plan = RandomisationPlan::empty(&ls);
        plan.read_arrows(&ls, "from,to\n3,4\n").unwrap();
        assert_eq!(plan.arrows, [(2, 3)]);
        assert_eq!(
            plan.read_arrows(&ls, "from,to\n4,3\n"),
            Err(RlsError::IndexOrder { from: 4, to: 3 })
        );
        plan.read_arrows(&ls, "from,to\nVarieties,Plot[Block]\n").unwrap();
        assert_eq!(plan.arrows, [(2, 3)]);
    }

    #[test]
    fn empty_model() {
        let m = ModelEquation {
            fixed: vec![],
            random: vec![],
        };
        assert_eq!(m.text(), "Response ~ 1");
        assert_eq!(m.report(), "The suggested mixed model to be fitted is:\nResponse ~ 1\n");
    }
}
