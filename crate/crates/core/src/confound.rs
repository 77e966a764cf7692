//! Rank-based check of degrees of freedom obtained by subtraction.
//!
//! Each object's indicator matrix is projected off the column space of the
//! objects coarser than it; the rank of what remains is the object's own
//! degrees of freedom. When the subtraction count disagrees with that rank,
//! or when the object's contribution to the space spanned by the unrelated
//! objects differs from its subtraction count, the object is flagged.
//! The total counts how far the subtraction degrees of freedom of all
//! objects except the finest overshoot the rank of the space they span.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::layout::{LayoutStructure, RefinementOrder};
use crate::linalg::{column_basis, hstack, indicator, Basis};
use crate::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfoundRow {
    pub id: usize,
    pub name: String,
    pub n_levels: usize,
    pub df_subtraction: i64,
    /// Rank of the indicator columns after removing coarser objects.
    pub df_rank: usize,
    pub potential_max_levels: Option<u64>,
    pub confounded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfoundReport {
    /// Number of confounded degrees of freedom; never negative.
    pub total: usize,
    pub rows: Vec<ConfoundRow>,
    #[serde(skip)]
    pub diagnostics: Vec<Diagnostic>,
}

impl ConfoundReport {
    /// Worth showing to the user: something is confounded somewhere.
    pub fn has_confounding(&self) -> bool {
        self.total > 0 || self.rows.iter().any(|r| r.confounded)
    }

    pub fn headline(&self) -> String {
        if self.total == 1 {
            "There is 1 confounded degree of freedom".to_string()
        } else {
            format!("There are {} confounded degrees of freedom", self.total)
        }
    }

    /// Headline followed by one row per object other than the Mean.
    pub fn to_text(&self) -> String {
        let rows: Vec<&ConfoundRow> = self.rows.iter().filter(|r| r.name != "Mean").collect();
        let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
        let mut out = self.headline();
        out.push('\n');
        out.push_str(&format!(
            "{:width$} Actual levels DF by Subtraction Potential Confounded DF\n",
            ""
        ));
        for r in rows {
            out.push_str(&format!(
                "{:<width$} {:>13} {:>17} {:>23}\n",
                r.name,
                r.n_levels,
                r.df_subtraction,
                if r.confounded { "Yes" } else { "No" }
            ));
        }
        out
    }
}

/// Checks every object of the layout structure.
pub fn detect_confounding(ls: &LayoutStructure) -> ConfoundReport {
    let ids: Vec<usize> = (0..ls.len()).collect();
    detect_confounding_in(ls, &ids)
}

/// Checks the objects `ids` as a structure of their own: order, coarser
/// spaces and subtraction counts are all restricted to these objects.
pub fn detect_confounding_in(ls: &LayoutStructure, ids: &[usize]) -> ConfoundReport {
    let n = ls.n_units();
    let order: RefinementOrder = ls.order().restrict(ids);
    let levels: Vec<usize> = ids.iter().map(|&i| ls.object(i).n_levels).collect();
    let df_sub = order.subtraction_df(&levels);
    let x: Vec<DMatrix<f64>> = ids.iter().map(|&i| indicator(&ls.object(i).partition)).collect();
    let scale = Some((n as f64).sqrt());
    let m = ids.len();

    let finest = (0..m).find(|&v| (0..m).all(|u| u == v || order.is_coarser(u, v)));
    let is_mean = |v: usize| ls.object(ids[v]).is_mean();
    let mut near = vec![false; m];

    let span_of = |members: &[usize]| -> Basis {
        let parts: Vec<&DMatrix<f64>> = members.iter().map(|&v| &x[v]).collect();
        column_basis(&hstack(n, &parts), None)
    };

    let mut rows = Vec::with_capacity(m);
    for v in 0..m {
        let covers: Vec<usize> = order.upper_covers(v).collect();
        let coarse = span_of(&covers);
        let residual = column_basis(&coarse.project_out(&x[v]), scale);
        near[v] |= coarse.near_threshold || residual.near_threshold;
        let df_rank = residual.rank();

        let mut confounded = false;
        if !is_mean(v) && Some(v) != finest {
            confounded = df_rank as i64 != df_sub[v];
            if !confounded {
                let others: Vec<usize> = (0..m)
                    .filter(|&u| u != v && Some(u) != finest && !order.is_coarser(v, u))
                    .collect();
                let span = span_of(&others);
                let extra = column_basis(&span.project_out(&x[v]), scale);
                near[v] |= span.near_threshold || extra.near_threshold;
                confounded = extra.rank() as i64 != df_sub[v];
            }
        }
        let object = ls.object(ids[v]);
        rows.push(ConfoundRow {
            id: ids[v],
            name: object.name.clone(),
            n_levels: object.n_levels,
            df_subtraction: df_sub[v],
            df_rank,
            potential_max_levels: object.potential_max_levels,
            confounded,
        });
    }

    let coarse_part: Vec<usize> = (0..m).filter(|&v| Some(v) != finest).collect();
    let span = span_of(&coarse_part);
    let claimed: i64 = coarse_part.iter().map(|&v| df_sub[v]).sum();
    let total = (claimed - span.rank() as i64).max(0) as usize;

    let mut diagnostics: Vec<Diagnostic> = (0..m)
        .filter(|&v| near[v])
        .map(|v| Diagnostic::RankTolerance {
            object: ls.object(ids[v]).name.clone(),
        })
        .collect();
    if span.near_threshold && diagnostics.is_empty() {
        diagnostics.push(Diagnostic::RankTolerance {
            object: "all objects".to_string(),
        });
    }
    ConfoundReport {
        total,
        rows,
        diagnostics,
    }
}
