use std::collections::HashSet;

use proptest::prelude::*;

use hasse_core::rls::{parse_rand_expr, suggest_rls_objects, RandExpr};
use hasse_core::{
    classify, datasets, detect_confounding, load_design, partition_of, refines, DesignTable, FactorSet,
    LayoutStructure, Partition,
};

/// Columns of level indices over a shared number of units.
fn design() -> impl Strategy<Value = DesignTable> {
    (2usize..=24, 1usize..=5)
        .prop_flat_map(|(n, k)| {
            (
                prop::collection::vec((1u8..=5).prop_flat_map(move |m| prop::collection::vec(0..m, n)), k),
                prop::collection::vec(any::<bool>(), k),
            )
        })
        .prop_map(|(columns, random)| {
            let names: Vec<String> = (0..columns.len()).map(|f| format!("F{f}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let columns = columns
                .into_iter()
                .map(|c| c.into_iter().map(|l| l.to_string()).collect())
                .collect();
            DesignTable::from_columns(&refs, columns, &random).unwrap()
        })
}

fn keys() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..6, 1..30)
}

const PRIME: u64 = 1_000_000_007;

/// Exact rank of the block indicators of `parts`, modulo a prime.
fn exact_rank(parts: &[&Partition]) -> usize {
    let n = parts.first().map_or(0, |p| p.n_units());
    let mut rows: Vec<Vec<u64>> = parts
        .iter()
        .flat_map(|p| p.blocks())
        .map(|block| {
            let mut row = vec![0; n];
            for u in block {
                row[u] = 1;
            }
            row
        })
        .collect();
    let inverse = |mut a: u64| {
        let (mut acc, mut e) = (1u64, PRIME - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * a % PRIME;
            }
            a = a * a % PRIME;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = inverse(rows[rank][col]);
        let pivot: Vec<u64> = rows[rank].iter().map(|x| x * inv % PRIME).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f != 0 {
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = (*x + PRIME - f * p % PRIME) % PRIME;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

proptest! {
    #[test]
    fn partition_ids_are_contiguous_in_first_appearance_order(k in keys()) {
        let p = Partition::from_keys(k.iter());
        let mut next = 0;
        for &c in p.class_of() {
            prop_assert!(c <= next);
            if c == next {
                next += 1;
            }
        }
        prop_assert_eq!(next as usize, p.n_classes());
        prop_assert!(p.n_classes() <= p.n_units());
    }

    #[test]
    fn classify_is_antisymmetric((a, b) in (1usize..30).prop_flat_map(|n| (prop::collection::vec(0u8..4, n), prop::collection::vec(0u8..4, n)))) {
        let p = Partition::from_keys(a.iter());
        let q = Partition::from_keys(b.iter());
        prop_assert_eq!(classify(&p, &q).unwrap(), classify(&q, &p).unwrap().reversed());
        let j = p.join(&q);
        prop_assert!(refines(&j, &p).unwrap());
        prop_assert!(refines(&j, &q).unwrap());
        prop_assert!(refines(&p, &Partition::mean(p.n_units())).unwrap());
    }

    #[test]
    fn layout_invariants(table in design()) {
        let ls = LayoutStructure::build(&table).unwrap();
        let mean = ls.object(ls.mean_id());
        prop_assert!(mean.is_mean());
        prop_assert_eq!(mean.n_levels, 1);
        prop_assert_eq!(mean.df, 1);

        let finest = ls.finest_id();
        let total: i64 = ls.objects().iter().map(|o| o.df).sum();
        prop_assert_eq!(total, ls.object(finest).n_levels as i64);

        let distinct: HashSet<&Partition> = ls.objects().iter().map(|o| &o.partition).collect();
        prop_assert_eq!(distinct.len(), ls.len());

        for o in ls.objects() {
            prop_assert_eq!(o.partition.n_classes(), o.n_levels);
            for &rep in &o.representations {
                prop_assert_eq!(ls.object_for(rep), o.id);
                let factors: Vec<usize> = rep.iter().collect();
                prop_assert_eq!(&partition_of(&table, &factors), &o.partition);
            }
            if o.id != finest {
                prop_assert!(ls.is_coarser(o.id, finest));
            }
        }

        let tiers = ls.order().tiers();
        for &(a, b) in ls.cover_edges() {
            prop_assert!(ls.is_coarser(a, b));
            prop_assert!(tiers[a] < tiers[b]);
        }
        for w in ls.objects().windows(2) {
            prop_assert!(w[0].tier <= w[1].tier);
        }
    }

    #[test]
    fn layout_is_deterministic(table in design()) {
        let a = LayoutStructure::build(&table).unwrap();
        let b = LayoutStructure::build(&table).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.relation_table(), b.relation_table());
    }

    #[test]
    fn structure_ignores_column_order(table in design()) {
        let ls = LayoutStructure::build(&table).unwrap();
        let k = table.n_factors();
        let names: Vec<String> = table.factor_names().into_iter().rev().collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let columns: Vec<Vec<String>> = (0..k)
            .rev()
            .map(|f| (0..table.n_units()).map(|u| table.label(u, f).to_string()).collect())
            .collect();
        let random: Vec<bool> = table.random_flags().into_iter().rev().collect();
        let flipped = LayoutStructure::build(&DesignTable::from_columns(&refs, columns, &random).unwrap()).unwrap();
        let summary = |ls: &LayoutStructure| {
            let mut v: Vec<(usize, i64, bool)> = ls.objects().iter().map(|o| (o.n_levels, o.df, o.is_random)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(summary(&ls), summary(&flipped));
        prop_assert_eq!(ls.cover_edges().len(), flipped.cover_edges().len());
    }

    #[test]
    fn confounding_matches_exact_rank(table in design()) {
        let ls = LayoutStructure::build(&table).unwrap();
        let report = detect_confounding(&ls);
        let finest = ls.finest_id();
        let coarse: Vec<&Partition> = ls
            .objects()
            .iter()
            .filter(|o| o.id != finest)
            .map(|o| &o.partition)
            .collect();
        let claimed: i64 = ls.objects().iter().filter(|o| o.id != finest).map(|o| o.df).sum();
        let expected = (claimed - exact_rank(&coarse) as i64).max(0) as usize;
        prop_assert_eq!(report.total, expected);
        for row in &report.rows {
            let covers: Vec<&Partition> = ls.order().upper_covers(row.id).map(|u| &ls.object(u).partition).collect();
            let mut with = covers.clone();
            with.push(&ls.object(row.id).partition);
            prop_assert_eq!(row.df_rank, exact_rank(&with) - exact_rank(&covers));
        }
    }

    #[test]
    fn csv_round_trip(table in design()) {
        let flags = table.random_flags();
        let back = load_design(&table.to_csv(), Some(&flags)).unwrap();
        prop_assert_eq!(back, table);
    }
}

fn expr_tree() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["Alpha", "Beta", "Gamma", "Delta"]).prop_map(str::to_string);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| format!("{{{}}}", v.join(" ∧ "))),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| format!("{{{}}}", v.join(" ⊗ "))),
            (inner.clone(), inner).prop_map(|(a, b)| format!("{{{a}[{b}]}}")),
        ]
    })
}

const NAMES: [&str; 4] = ["Alpha", "Beta", "Gamma", "Delta"];

proptest! {
    #[test]
    fn display_round_trips(text in expr_tree()) {
        let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
        let parsed = parse_rand_expr(&text, &names).unwrap();
        let shown = parsed.to_string();
        let reparsed = parse_rand_expr(&shown, &names).unwrap();
        prop_assert_eq!(&reparsed, &parsed);
        prop_assert_eq!(reparsed.to_string(), shown);
    }

    #[test]
    fn factor_indices_cover_the_names(text in expr_tree()) {
        let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
        let parsed = parse_rand_expr(&text, &names).unwrap();
        let mut want: Vec<usize> = NAMES.iter().enumerate().filter(|(_, n)| text.contains(*n)).map(|(i, _)| i).collect();
        want.sort();
        let mut got = parsed.factor_indices();
        got.sort();
        got.dedup();
        prop_assert_eq!(got, want);
    }
}

/// Arrows between object names where the target is not coarser than the source.
fn candidate_arrows(ls: &LayoutStructure) -> Vec<(RandExpr, RandExpr)> {
    let parse = |id: usize| {
        let names = ls.factor_set_names(ls.object(id).factors).join("^");
        parse_rand_expr(&names, ls.factor_names()).unwrap()
    };
    let mut out = Vec::new();
    for a in 1..ls.len() {
        for b in 1..ls.len() {
            if ls.is_coarser(a, b) {
                out.push((parse(a), parse(b)));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn more_arrows_never_remove_objects(
        fixture in prop::sample::select(vec!["bibd_6_10_3", "crossover", "splitplot", "factorial_2p4"]),
        picks in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 1..6),
    ) {
        let ls = LayoutStructure::build(&datasets::by_name(fixture).unwrap().table).unwrap();
        let candidates = candidate_arrows(&ls);
        prop_assume!(!candidates.is_empty());
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (idx, in_small) in picks {
            let arrow = candidates[idx.index(candidates.len())].clone();
            if in_small {
                small.push(arrow.clone());
            }
            large.push(arrow);
        }
        let a: HashSet<usize> = suggest_rls_objects(&ls, &small).unwrap().ids().into_iter().collect();
        let b: HashSet<usize> = suggest_rls_objects(&ls, &large).unwrap().ids().into_iter().collect();
        prop_assert!(a.is_subset(&b), "{a:?} not within {b:?}");
        prop_assert!(b.contains(&ls.mean_id()) && b.contains(&ls.finest_id()));
    }
}

#[test]
fn factor_set_iteration_matches_bits() {
    let set = FactorSet::from_bits(0b1011);
    assert_eq!(set.iter().collect::<Vec<_>>(), [0, 1, 3]);
    assert_eq!(set.len(), 3);
    assert!(FactorSet::single(1).is_subset(set));
}
