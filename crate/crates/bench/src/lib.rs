//! Synthetic designs for benchmarking.

use hasse_core::DesignTable;

/// Fully crossed design with `levels[i]` levels for factor `F{i}` plus a
/// unit factor, one unit per combination.
pub fn crossed(levels: &[usize]) -> DesignTable {
    let n: usize = levels.iter().product();
    let mut names: Vec<String> = (0..levels.len()).map(|i| format!("F{i}")).collect();
    names.push("Unit".to_string());
    let mut columns: Vec<Vec<String>> = vec![Vec::with_capacity(n); levels.len() + 1];
    for u in 0..n {
        let mut rest = u;
        for (f, &l) in levels.iter().enumerate() {
            columns[f].push((rest % l).to_string());
            rest /= l;
        }
        columns[levels.len()].push(u.to_string());
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    DesignTable::from_columns(&refs, columns, &vec![false; refs.len()]).expect("valid synthetic design")
}

/// `blocks` blocks of `plots` plots, nested.
pub fn nested(blocks: usize, plots: usize) -> DesignTable {
    let n = blocks * plots;
    let block: Vec<String> = (0..n).map(|u| (u / plots).to_string()).collect();
    let plot: Vec<String> = (0..n).map(|u| u.to_string()).collect();
    DesignTable::from_columns(&["Block", "Plot"], vec![block, plot], &[true, true]).expect("valid synthetic design")
}
