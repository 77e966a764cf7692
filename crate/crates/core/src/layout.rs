//! The layout structure: structural objects, their refinement order, cover
//! edges, degrees of freedom by subtraction and the relation table.
//!
//! # Naming of structural objects
//!
//! Every subset of factors induces a partition of the units; subsets with
//! equal partitions form one structural object. To give each object a stable
//! name, factors are first split into *primary* and *derived* ones: factors
//! are visited by increasing level count (column order breaks ties) and a
//! factor is derived when its partition is already produced by some set of
//! primary factors seen so far (for example `Plant` in a split-plot, which
//! equals `Bench^Soil`). Every partition is then expressible using primary
//! factors only. An object's label factors are the primary factor it equals,
//! if any, otherwise the largest set of primary factors producing it; derived
//! factors equal to the object are listed in front, as in `Plant=Be^So`.
//!
//! Objects are ordered by tier (longest chain from the Mean), then by the
//! number of label factors, then alphabetically by label factor names.

use std::cmp::Ordering;
use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::relations::{classify_unchecked, refines_unchecked, Relationship};
use crate::{DesignTable, Diagnostic, Partition};

/// Hard ceiling on the factor cap; subsets are stored as 64-bit masks and
/// enumerated exhaustively.
pub const MAX_FACTOR_CAP: usize = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("design has {found} factors; at most {cap} are enumerated (raise the cap to override)")]
    TooManyFactors { found: usize, cap: usize },
    #[error("factor cap {0} exceeds the supported maximum of {MAX_FACTOR_CAP}")]
    CapTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutOptions {
    /// Largest number of factors whose subsets are enumerated.
    pub max_factors: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { max_factors: 16 }
    }
}

/// A set of factor indices, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FactorSet(u64);

impl FactorSet {
    pub const EMPTY: FactorSet = FactorSet(0);

    pub fn single(factor: usize) -> Self {
        FactorSet(1 << factor)
    }

    pub fn from_bits(bits: u64) -> Self {
        FactorSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, factor: usize) -> bool {
        self.0 >> factor & 1 == 1
    }

    pub fn is_subset(self, other: FactorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 | other.0)
    }

    pub fn difference(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 & !other.0)
    }

    /// Factor indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            (bits != 0).then(|| {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                i
            })
        })
    }
}

impl FromIterator<usize> for FactorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        FactorSet(iter.into_iter().fold(0, |acc, i| acc | 1 << i))
    }
}

/// A node of the layout structure: one distinct partition of the units.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralObject {
    pub id: usize,
    /// Label factors (empty for the Mean).
    pub factors: FactorSet,
    /// Derived factors whose own partition equals this object's.
    pub aliases: FactorSet,
    /// Every factor subset producing this partition, smallest first.
    pub representations: Vec<FactorSet>,
    pub partition: Partition,
    pub n_levels: usize,
    /// Product of the label factors' level counts; only for generalised
    /// factors (two or more label factors).
    pub potential_max_levels: Option<u64>,
    pub is_random: bool,
    /// Degrees of freedom by subtraction. Can be negative.
    pub df: i64,
    pub tier: usize,
    /// Full name, e.g. `Bench^Soil`.
    pub name: String,
    /// Name including merged factors, with generalised parts abbreviated,
    /// e.g. `Plant=Be^So`.
    pub display_label: String,
}

impl StructuralObject {
    pub fn is_mean(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when another factor was merged into this object.
    pub fn is_merged(&self) -> bool {
        !self.aliases.is_empty() && !self.is_mean()
    }

    /// Smallest subset producing this partition, ties broken by factor names.
    pub fn smallest_representation(&self, names: &[String]) -> FactorSet {
        smallest_by_names(self.representations.iter().copied(), names).unwrap_or(FactorSet::EMPTY)
    }
}

/// Entry of the relation table for (row, column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationEntry {
    /// Diagonal.
    Same,
    /// The row object is nested in the column object.
    Nested,
    FullyCrossed,
    /// Partially crossed, or the column object is nested in the row object.
    Other,
}

impl RelationEntry {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationEntry::Same => " ",
            RelationEntry::Nested => "1",
            RelationEntry::FullyCrossed => "0",
            RelationEntry::Other => "(0)",
        }
    }

    fn from_relationship(rel: Relationship) -> Self {
        match rel {
            Relationship::Equivalent => RelationEntry::Same,
            Relationship::NestedIn => RelationEntry::Nested,
            Relationship::FullyCrossed => RelationEntry::FullyCrossed,
            Relationship::Nests | Relationship::PartiallyCrossed => RelationEntry::Other,
        }
    }
}

/// Strict "coarser than" relation over a set of nodes `0..n`, with its
/// transitive reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementOrder {
    /// `coarser[v]` holds every node strictly coarser than `v`.
    coarser: Vec<FixedBitSet>,
    cover_edges: Vec<(usize, usize)>,
}

impl RefinementOrder {
    /// `is_coarser(a, b)` must say whether `a` is strictly coarser than `b`
    /// and be a strict partial order.
    pub fn from_relation(n: usize, mut is_coarser: impl FnMut(usize, usize) -> bool) -> Self {
        let coarser: Vec<FixedBitSet> = (0..n)
            .map(|v| {
                let mut set = FixedBitSet::with_capacity(n);
                for u in 0..n {
                    if u != v && is_coarser(u, v) {
                        set.insert(u);
                    }
                }
                set
            })
            .collect();
        let mut cover_edges = Vec::new();
        for (v, above) in coarser.iter().enumerate() {
            let mut direct = above.clone();
            for w in above.ones() {
                direct.difference_with(&coarser[w]);
            }
            cover_edges.extend(direct.ones().map(|u| (u, v)));
        }
        cover_edges.sort_unstable();
        RefinementOrder { coarser, cover_edges }
    }

    pub fn len(&self) -> usize {
        self.coarser.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coarser.is_empty()
    }

    /// Is `a` strictly coarser than `b`?
    pub fn is_coarser(&self, a: usize, b: usize) -> bool {
        self.coarser[b].contains(a)
    }

    pub fn coarser_than(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.coarser[v].ones()
    }

    /// `(coarse, fine)` pairs of the transitive reduction, sorted.
    pub fn cover_edges(&self) -> &[(usize, usize)] {
        &self.cover_edges
    }

    /// Immediate coarser neighbours of `v`.
    pub fn upper_covers(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.cover_edges.iter().filter(move |e| e.1 == v).map(|e| e.0)
    }

    /// Length of the longest chain from a maximal element down to each node.
    pub fn tiers(&self) -> Vec<usize> {
        let n = self.len();
        let mut tier = vec![usize::MAX; n];
        // Nodes with fewer strictly-coarser nodes come first in any linear
        // extension, so processing by that count is topological.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| self.coarser[v].count_ones(..));
        for v in order {
            tier[v] = self.coarser[v].ones().map(|u| tier[u] + 1).max().unwrap_or(0);
        }
        tier
    }

    /// A topological order, coarse to fine.
    pub fn topological(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&v| self.coarser[v].count_ones(..));
        order
    }

    /// Degrees of freedom by subtraction: each node's level count minus the
    /// sum over all strictly coarser nodes.
    pub fn subtraction_df(&self, n_levels: &[usize]) -> Vec<i64> {
        let mut df = vec![0i64; self.len()];
        for v in self.topological() {
            df[v] = n_levels[v] as i64 - self.coarser[v].ones().map(|u| df[u]).sum::<i64>();
        }
        df
    }

    /// The order restricted to `ids`; node `i` of the result is `ids[i]`.
    pub fn restrict(&self, ids: &[usize]) -> RefinementOrder {
        RefinementOrder::from_relation(ids.len(), |a, b| self.is_coarser(ids[a], ids[b]))
    }
}

/// The layout structure of a design.
#[derive(Debug, Clone)]
pub struct LayoutStructure {
    factor_names: Vec<String>,
    factor_levels: Vec<usize>,
    factor_random: Vec<bool>,
    primary: FactorSet,
    n_units: usize,
    objects: Vec<StructuralObject>,
    order: RefinementOrder,
    relationships: Vec<Relationship>,
    finest: usize,
    mask_object: Vec<u32>,
    diagnostics: Vec<Diagnostic>,
}

/// Result of subset enumeration, before the structure is assembled.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub objects: Vec<StructuralObject>,
    pub primary: FactorSet,
    /// Object id for every factor subset, indexed by mask bits.
    pub mask_object: Vec<u32>,
}

/// Finds every distinct partition among the factor subsets (the empty set
/// being the Mean) and names, orders and classifies them.
pub fn enumerate_structural_objects(table: &DesignTable, options: LayoutOptions) -> Result<Enumeration, LayoutError> {
    if options.max_factors > MAX_FACTOR_CAP {
        return Err(LayoutError::CapTooLarge(options.max_factors));
    }
    let k = table.n_factors();
    if k > options.max_factors {
        return Err(LayoutError::TooManyFactors {
            found: k,
            cap: options.max_factors,
        });
    }
    let names = table.factor_names();
    let base: Vec<Partition> = (0..k).map(|f| table.factor_partition(f)).collect();

    // Distinct partitions, in discovery order.
    let mut class_index: HashMap<Partition, u32> = HashMap::new();
    let mut partitions: Vec<Partition> = Vec::new();
    let mut members: Vec<Vec<FactorSet>> = Vec::new();
    let mut mask_class = vec![0u32; 1usize << k];
    {
        let mut record = |mask: u64, p: &Partition| {
            let id = match class_index.get(p) {
                Some(&id) => id,
                None => {
                    let id = partitions.len() as u32;
                    class_index.insert(p.clone(), id);
                    partitions.push(p.clone());
                    members.push(Vec::new());
                    id
                }
            };
            members[id as usize].push(FactorSet(mask));
            mask_class[mask as usize] = id;
        };
        let mean = Partition::mean(table.n_units());
        record(0, &mean);
        // Depth-first over subsets keeps at most k partitions alive.
        let mut stack: Vec<(u64, usize, Partition)> = vec![(0, 0, mean)];
        while let Some((mask, next, p)) = stack.pop() {
            for f in (next..k).rev() {
                let child = mask | 1 << f;
                let q = p.join(&base[f]);
                record(child, &q);
                if f + 1 < k {
                    stack.push((child, f + 1, q));
                }
            }
        }
    }

    // Primary factors: not reproducible from primaries with fewer levels.
    let mut by_levels: Vec<usize> = (0..k).collect();
    by_levels.sort_by_key(|&f| (table.factor(f).n_levels(), f));
    let mut primary = FactorSet::EMPTY;
    for f in by_levels {
        let class = mask_class[1 << f] as usize;
        let derived = members[class].iter().any(|m| m.is_subset(primary));
        if !derived {
            primary = primary.union(FactorSet::single(f));
        }
    }

    let n_classes = partitions.len();
    let mut label_sets = Vec::with_capacity(n_classes);
    let mut alias_sets = Vec::with_capacity(n_classes);
    for reps in &members {
        let singles: FactorSet = reps
            .iter()
            .filter(|m| m.len() == 1)
            .fold(FactorSet::EMPTY, |a, m| a.union(*m));
        let primary_single = singles.iter().find(|&f| primary.contains(f));
        let label = match primary_single {
            Some(f) => FactorSet::single(f),
            None => reps
                .iter()
                .filter(|m| m.is_subset(primary))
                .fold(FactorSet::EMPTY, |a, m| a.union(*m)),
        };
        label_sets.push(label);
        alias_sets.push(singles.difference(label));
    }

    let order = RefinementOrder::from_relation(n_classes, |a, b| {
        partitions[a].n_classes() < partitions[b].n_classes() && refines_unchecked(&partitions[b], &partitions[a])
    });
    let tiers = order.tiers();

    let sorted_names = |set: FactorSet| -> Vec<&str> { sorted_factor_names(set, &names) };
    let mut ranking: Vec<usize> = (0..n_classes).collect();
    ranking.sort_by(|&a, &b| {
        tiers[a]
            .cmp(&tiers[b])
            .then(label_sets[a].len().cmp(&label_sets[b].len()))
            .then_with(|| compare_name_lists(&sorted_names(label_sets[a]), &sorted_names(label_sets[b])))
    });
    let mut new_id = vec![0u32; n_classes];
    for (id, &class) in ranking.iter().enumerate() {
        new_id[class] = id as u32;
    }

    let random = table.random_flags();
    let mut objects = Vec::with_capacity(n_classes);
    for (id, &class) in ranking.iter().enumerate() {
        let factors = label_sets[class];
        let aliases = alias_sets[class];
        let mut representations = members[class].clone();
        representations.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| compare_name_lists(&sorted_names(*a), &sorted_names(*b)))
        });
        let is_random = representations.iter().any(|m| m.iter().any(|f| random[f]));
        let potential_max_levels = (factors.len() >= 2).then(|| {
            factors
                .iter()
                .map(|f| table.factor(f).n_levels() as u64)
                .fold(1u64, u64::saturating_mul)
        });
        let name = object_name(factors, &names);
        let display_label = display_label(factors, aliases, &names);
        let partition = partitions[class].clone();
        objects.push(StructuralObject {
            id,
            factors,
            aliases,
            representations,
            n_levels: partition.n_classes(),
            partition,
            potential_max_levels,
            is_random,
            df: 0,
            tier: tiers[class],
            name,
            display_label,
        });
    }
    let mask_object = mask_class.iter().map(|&c| new_id[c as usize]).collect();
    Ok(Enumeration {
        objects,
        primary,
        mask_object,
    })
}

/// Applies the randomness rule (an object is random iff some representation
/// involves a random factor) and reports every fixed factor that ends up in
/// a random object.
pub fn reclassify_randomness(
    mut objects: Vec<StructuralObject>,
    table: &DesignTable,
) -> (Vec<StructuralObject>, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    for object in &mut objects {
        object.is_random = object
            .representations
            .iter()
            .any(|m| m.iter().any(|f| table.factor(f).is_random));
        if !object.is_random {
            continue;
        }
        for rep in object.representations.iter().filter(|m| m.len() == 1) {
            let f = rep.iter().next().expect("singleton");
            if !table.factor(f).is_random {
                let via = object
                    .representations
                    .iter()
                    .find(|m| !m.contains(f) && m.iter().any(|g| table.factor(g).is_random))
                    .map(|m| object_name(*m, &table.factor_names()))
                    .unwrap_or_else(|| object.name.clone());
                diagnostics.push(Diagnostic::Reclassified {
                    factor: table.factor(f).name.clone(),
                    via,
                });
            }
        }
    }
    (objects, diagnostics)
}

/// Strict refinement between objects and its transitive reduction.
pub fn refinement_order(objects: &[StructuralObject]) -> RefinementOrder {
    RefinementOrder::from_relation(objects.len(), |a, b| {
        objects[a].n_levels < objects[b].n_levels && refines_unchecked(&objects[b].partition, &objects[a].partition)
    })
}

/// Fills in degrees of freedom by the subtraction method.
pub fn df_by_subtraction(objects: &mut [StructuralObject], order: &RefinementOrder) {
    let levels: Vec<usize> = objects.iter().map(|o| o.n_levels).collect();
    for (object, df) in objects.iter_mut().zip(order.subtraction_df(&levels)) {
        object.df = df;
    }
}

/// Product of the label factors' level counts, for generalised factors.
pub fn potential_max_levels(object: &StructuralObject, table: &DesignTable) -> Option<u64> {
    (object.factors.len() >= 2).then(|| {
        object
            .factors
            .iter()
            .map(|f| table.factor(f).n_levels() as u64)
            .fold(1u64, u64::saturating_mul)
    })
}

impl LayoutStructure {
    pub fn build(table: &DesignTable) -> Result<Self, LayoutError> {
        Self::build_with(table, LayoutOptions::default())
    }

    pub fn build_with(table: &DesignTable, options: LayoutOptions) -> Result<Self, LayoutError> {
        let Enumeration {
            objects,
            primary,
            mask_object,
        } = enumerate_structural_objects(table, options)?;
        let (mut objects, mut diagnostics) = reclassify_randomness(objects, table);
        let order = refinement_order(&objects);
        df_by_subtraction(&mut objects, &order);

        let m = objects.len();
        let mut relationships = Vec::with_capacity(m * m);
        for a in &objects {
            for b in &objects {
                relationships.push(classify_unchecked(&a.partition, &b.partition));
            }
        }
        let all = (1usize << table.n_factors()) - 1;
        let finest = mask_object[all] as usize;
        let mut design_diags = crate::check_design(table);
        design_diags.append(&mut diagnostics);
        Ok(LayoutStructure {
            factor_names: table.factor_names(),
            factor_levels: table.factors().iter().map(|f| f.n_levels()).collect(),
            factor_random: table.random_flags(),
            primary,
            n_units: table.n_units(),
            objects,
            order,
            relationships,
            finest,
            mask_object,
            diagnostics: design_diags,
        })
    }

    pub fn objects(&self) -> &[StructuralObject] {
        &self.objects
    }

    pub fn object(&self, id: usize) -> &StructuralObject {
        &self.objects[id]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn factor_levels(&self) -> &[usize] {
        &self.factor_levels
    }

    pub fn factor_is_random(&self, factor: usize) -> bool {
        self.factor_random[factor]
    }

    pub fn primary_factors(&self) -> FactorSet {
        self.primary
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn order(&self) -> &RefinementOrder {
        &self.order
    }

    pub fn cover_edges(&self) -> &[(usize, usize)] {
        self.order.cover_edges()
    }

    /// Is `a` strictly coarser than `b`?
    pub fn is_coarser(&self, a: usize, b: usize) -> bool {
        self.order.is_coarser(a, b)
    }

    pub fn relationship(&self, a: usize, b: usize) -> Relationship {
        self.relationships[a * self.objects.len() + b]
    }

    pub fn relation_entry(&self, row: usize, col: usize) -> RelationEntry {
        if row == col {
            RelationEntry::Same
        } else {
            RelationEntry::from_relationship(self.relationship(row, col))
        }
    }

    /// Id of the object every other object is coarser than (the join of all
    /// factors).
    pub fn finest_id(&self) -> usize {
        self.finest
    }

    pub fn mean_id(&self) -> usize {
        0
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    /// The object whose partition is produced by `set`.
    pub fn object_for(&self, set: FactorSet) -> usize {
        self.mask_object[set.bits() as usize] as usize
    }

    pub fn tier_sizes(&self) -> Vec<usize> {
        let depth = self.objects.iter().map(|o| o.tier).max().unwrap_or(0);
        let mut sizes = vec![0; depth + 1];
        for o in &self.objects {
            sizes[o.tier] += 1;
        }
        sizes
    }

    pub fn factor_set_names(&self, set: FactorSet) -> Vec<&str> {
        sorted_factor_names(set, &self.factor_names)
    }

    /// Column header used in the relation table.
    pub fn header_label(&self, id: usize) -> &str {
        &self.objects[id].display_label
    }

    /// Fixed-width relation table: `1` nested, `0` fully crossed, `(0)`
    /// otherwise, blank on the diagonal.
    pub fn relation_table(&self) -> String {
        let ids: Vec<usize> = (0..self.objects.len()).collect();
        let rows: Vec<String> = self.objects.iter().map(|o| o.name.clone()).collect();
        let headers: Vec<String> = self.objects.iter().map(|o| o.display_label.clone()).collect();
        format_relation_table(&rows, &headers, |r, c| self.relation_entry(ids[r], ids[c]))
    }

    /// JSON export with stable field order.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct FactorOut<'a> {
            name: &'a str,
            levels: usize,
            is_random: bool,
            primary: bool,
        }
        #[derive(Serialize)]
        struct ObjectOut<'a> {
            id: usize,
            name: &'a str,
            display_label: &'a str,
            factors: Vec<&'a str>,
            aliases: Vec<&'a str>,
            n_levels: usize,
            potential_max_levels: Option<u64>,
            is_random: bool,
            df: i64,
            tier: usize,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            n_units: usize,
            factors: Vec<FactorOut<'a>>,
            objects: Vec<ObjectOut<'a>>,
            cover_edges: &'a [(usize, usize)],
            finest_id: usize,
            relation_matrix: Vec<Vec<&'static str>>,
        }
        let out = Out {
            n_units: self.n_units,
            factors: self
                .factor_names
                .iter()
                .enumerate()
                .map(|(i, name)| FactorOut {
                    name,
                    levels: self.factor_levels[i],
                    is_random: self.factor_random[i],
                    primary: self.primary.contains(i),
                })
                .collect(),
            objects: self
                .objects
                .iter()
                .map(|o| ObjectOut {
                    id: o.id,
                    name: &o.name,
                    display_label: &o.display_label,
                    factors: self.factor_set_names(o.factors),
                    aliases: self.factor_set_names(o.aliases),
                    n_levels: o.n_levels,
                    potential_max_levels: o.potential_max_levels,
                    is_random: o.is_random,
                    df: o.df,
                    tier: o.tier,
                })
                .collect(),
            cover_edges: self.cover_edges(),
            finest_id: self.finest,
            relation_matrix: (0..self.objects.len())
                .map(|r| {
                    (0..self.objects.len())
                        .map(|c| self.relation_entry(r, c).as_str())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("plain data serialises")
    }
}

/// Lays out a quoted character matrix: row labels left-aligned to the
/// widest label, every cell quoted and left-aligned to its column width,
/// columns separated by one space.
pub(crate) fn format_relation_table(
    rows: &[String],
    headers: &[String],
    entry: impl Fn(usize, usize) -> RelationEntry,
) -> String {
    let label_width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let cells: Vec<Vec<String>> = (0..rows.len())
        .map(|r| {
            (0..headers.len())
                .map(|c| format!("\"{}\"", entry(r, c).as_str()))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(c, h)| {
            cells
                .iter()
                .map(|row| row[c].chars().count())
                .chain(std::iter::once(h.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    out.push_str(&" ".repeat(label_width));
    for (h, w) in headers.iter().zip(&widths) {
        out.push(' ');
        out.push_str(&pad(h, *w));
    }
    // The last header is not padded.
    let trimmed = out.trim_end().len();
    out.truncate(trimmed.max(label_width));
    out.push('\n');
    for (label, row) in rows.iter().zip(&cells) {
        out.push_str(&pad(label, label_width));
        for (cell, w) in row.iter().zip(&widths) {
            out.push(' ');
            out.push_str(&pad(cell, *w));
        }
        out.push('\n');
    }
    out
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    let mut out = s.to_string();
    out.extend(std::iter::repeat_n(' ', width.saturating_sub(n)));
    out
}

fn compare_name_lists(a: &[&str], b: &[&str]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = compare_names(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn compare_names(a: &str, b: &str) -> Ordering {
    a.to_lowercase().cmp(&b.to_lowercase()).then_with(|| a.cmp(b))
}

pub(crate) fn sorted_factor_names(set: FactorSet, names: &[String]) -> Vec<&str> {
    let mut v: Vec<&str> = set.iter().map(|f| names[f].as_str()).collect();
    v.sort_by(|a, b| compare_names(a, b));
    v
}

pub(crate) fn smallest_by_names(sets: impl Iterator<Item = FactorSet>, names: &[String]) -> Option<FactorSet> {
    sets.min_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| compare_name_lists(&sorted_factor_names(*a, names), &sorted_factor_names(*b, names)))
    })
}

pub(crate) fn object_name(set: FactorSet, names: &[String]) -> String {
    if set.is_empty() {
        "Mean".to_string()
    } else {
        sorted_factor_names(set, names).join("^")
    }
}

/// First two characters of a factor name.
pub fn abbreviate(name: &str) -> String {
    name.chars().take(2).collect()
}

fn display_label(factors: FactorSet, aliases: FactorSet, names: &[String]) -> String {
    if factors.is_empty() {
        return "Mean".to_string();
    }
    let sorted = sorted_factor_names(factors, names);
    let core = if sorted.len() == 1 {
        sorted[0].to_string()
    } else {
        sorted.iter().map(|n| abbreviate(n)).collect::<Vec<_>>().join("^")
    };
    let mut parts: Vec<String> = sorted_factor_names(aliases, names)
        .into_iter()
        .map(str::to_string)
        .collect();
    parts.push(core);
    parts.join("=")
}
