//! Built-in example designs.

use crate::DesignTable;

#[derive(Debug, Clone)]
pub struct FixtureDesign {
    pub name: &'static str,
    pub provenance: &'static str,
    pub table: DesignTable,
}

impl FixtureDesign {
    pub fn random_flags(&self) -> Vec<bool> {
        self.table.random_flags()
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 4] = ["splitplot", "factorial_2p4", "bibd_6_10_3", "crossover"];

pub fn by_name(name: &str) -> Option<FixtureDesign> {
    match name {
        "splitplot" => Some(splitplot()),
        "factorial_2p4" => Some(factorial_2p4()),
        "bibd_6_10_3" => Some(bibd_6_10_3()),
        "crossover" => Some(crossover()),
        _ => None,
    }
}

pub fn all() -> Vec<FixtureDesign> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

fn build(
    name: &'static str,
    provenance: &'static str,
    names: &[&str],
    columns: Vec<Vec<String>>,
    random: &[bool],
) -> FixtureDesign {
    let table = DesignTable::from_columns(names, columns, random).expect("fixture is well formed");
    FixtureDesign {
        name,
        provenance,
        table,
    }
}

fn strings<T: ToString>(values: impl IntoIterator<Item = T>) -> Vec<String> {
    values.into_iter().map(|v| v.to_string()).collect()
}

/// Glasshouse split-plot: 3 benches of 4 plants with 3 leaves each.
/// Soil is applied to plants, the treatment to leaf positions within
/// benches. Bench, Plant and Leaf are random.
pub fn splitplot() -> FixtureDesign {
    const SOIL: [u8; 36] = [
        3, 3, 3, 2, 2, 2, 1, 1, 1, 0, 0, 0, 0, 0, 0, 2, 2, 2, 1, 1, 1, 3, 3, 3, 3, 3, 3, 0, 0, 0, 2, 2, 2, 1, 1, 1,
    ];
    const TREAT: [u8; 36] = [
        2, 0, 1, 1, 0, 2, 0, 1, 2, 1, 0, 2, 0, 2, 1, 0, 2, 1, 1, 2, 0, 1, 2, 0, 0, 1, 2, 2, 1, 0, 2, 1, 0, 2, 0, 1,
    ];
    const LYR: [&str; 3] = ["Top", "Middle", "Bottom"];
    let bench = strings((0..36).map(|i| i / 12 + 1));
    let plant = strings((0..36).map(|i| i / 3 + 1));
    let lyr = strings((0..36).map(|i| LYR[i % 3]));
    let leaf = strings(1..=36);
    build(
        "splitplot",
        "split-plot glasshouse experiment, 36 leaves",
        &["Bench", "Plant", "Lyr", "Soil", "Treat", "Leaf"],
        vec![bench, plant, lyr, strings(SOIL), strings(TREAT), leaf],
        &[true, true, true, false, false, true],
    )
}

/// Full 2^4 factorial in 16 runs, all factors fixed.
pub fn factorial_2p4() -> FixtureDesign {
    let level = |run: usize, bit: usize, lo: u32, hi: u32| if run >> bit & 1 == 0 { lo } else { hi };
    let catalyst = strings((0..16).map(|r| level(r, 3, 10, 15)));
    let temperature = strings((0..16).map(|r| level(r, 2, 220, 240)));
    let pressure = strings((0..16).map(|r| level(r, 1, 50, 80)));
    let concentration = strings((0..16).map(|r| level(r, 0, 10, 12)));
    build(
        "factorial_2p4",
        "2^4 factorial, 16 runs",
        &["Catalyst", "Temperature", "Pressure", "Concentration", "Run"],
        vec![catalyst, temperature, pressure, concentration, strings(1..=16)],
        &[false; 5],
    )
}

/// Balanced incomplete block design: 6 varieties in 10 blocks of 3.
pub fn bibd_6_10_3() -> FixtureDesign {
    const BLOCKS: [[u8; 3]; 10] = [
        [1, 2, 3],
        [1, 2, 4],
        [1, 3, 5],
        [1, 4, 6],
        [1, 5, 6],
        [2, 3, 6],
        [2, 4, 5],
        [2, 5, 6],
        [3, 4, 5],
        [3, 4, 6],
    ];
    let blocks = strings((0..30).map(|i| i / 3 + 1));
    let varieties = strings(BLOCKS.iter().flatten());
    build(
        "bibd_6_10_3",
        "balanced incomplete block design, v=6, b=10, k=3",
        &["Blocks", "Varieties", "Plots"],
        vec![blocks, varieties, strings(1..=30)],
        &[false; 3],
    )
}

/// Three-period crossover in Williams squares: 6 sequences, 4 subjects per
/// sequence. Subject is random.
pub fn crossover() -> FixtureDesign {
    const SEQUENCES: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [1, 0, 2], [2, 1, 0]];
    const TREATMENTS: [&str; 3] = ["CHX1", "CHX2", "saline"];
    let mut columns: [Vec<String>; 5] = Default::default();
    let mut observation = 0;
    for (s, seq) in SEQUENCES.iter().enumerate() {
        for rep in 0..4 {
            let subject = s * 4 + rep + 1;
            for (period, &t) in seq.iter().enumerate() {
                observation += 1;
                let row = [
                    (s + 1).to_string(),
                    subject.to_string(),
                    (period + 1).to_string(),
                    TREATMENTS[t].to_string(),
                    observation.to_string(),
                ];
                for (col, value) in columns.iter_mut().zip(row) {
                    col.push(value);
                }
            }
        }
    }
    build(
        "crossover",
        "three-period crossover, 24 subjects in 6 sequences",
        &["Sequence", "Subject", "Period", "Treatment", "Observation"],
        columns.into(),
        &[false, true, false, false, false],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(splitplot().table.n_units(), 36);
        assert_eq!(factorial_2p4().table.n_units(), 16);
        assert_eq!(bibd_6_10_3().table.n_units(), 30);
        assert_eq!(crossover().table.n_units(), 72);
    }

    #[test]
    fn bibd_pairs_meet_twice() {
        let t = bibd_6_10_3().table;
        let mut count = [[0; 6]; 6];
        for b in 0..10 {
            let vs: Vec<usize> = (0..3)
                .map(|k| t.label(b * 3 + k, 1).parse::<usize>().unwrap() - 1)
                .collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    count[vs[i]][vs[j]] += 1;
                }
            }
        }
        for (i, row) in count.iter().enumerate() {
            assert!(row[i + 1..].iter().all(|&c| c == 2));
        }
    }

    #[test]
    fn lookup() {
        assert!(by_name("nope").is_none());
        assert_eq!(all().len(), 4);
    }
}
