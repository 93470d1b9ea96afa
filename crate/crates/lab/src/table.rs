//! The Kodaira registry as CSV and its checked-in golden copy.

use semiflat_core::fiber::{table_rows, TableRow};
use semiflat_core::sl2z::KodairaType;

use crate::output::{Cell, Table};

pub const HEADER: [&str; 10] =
    ["j_value", "j_multiplicity", "type", "matrix", "order", "tau1", "tau2", "N", "theta_incomplete", "theta_complete"];

/// The golden dump, transcribed by hand from the published table.
pub const GOLDEN: &str = include_str!("../data/kodaira_table.csv");

/// Does `row` match a type filter such as `II*`, `I_b`, or `I_3`?
pub fn row_matches(row: &TableRow, filter: &str) -> bool {
    if row.type_label == filter {
        return true;
    }
    match filter.parse::<KodairaType>() {
        Ok(t @ (KodairaType::I(b) | KodairaType::IStar(b))) if b > 0 => row.family.instantiate(b) == t,
        Ok(t) => row.family.instantiate(1) == t,
        Err(_) => false,
    }
}

pub fn registry_table(rows: &[TableRow]) -> Table {
    let mut t = Table::new(&HEADER);
    for r in rows {
        t.push(vec![
            Cell::from(r.j_value),
            r.j_multiplicity.into(),
            r.type_label.into(),
            r.matrix.into(),
            r.order.to_string().into(),
            r.tau1.into(),
            r.tau2.into(),
            r.n.into(),
            r.theta_incomplete.to_string().into(),
            r.theta_complete.to_string().into(),
        ]);
    }
    t
}

/// Registry rows, optionally filtered by type.
pub fn filtered_rows(filter: Option<&str>) -> Vec<TableRow> {
    table_rows().into_iter().filter(|r| filter.is_none_or(|f| row_matches(r, f))).collect()
}

/// Line-level differences between a dump and the golden copy, as
/// `(line number, expected, actual)`.
pub fn golden_diff(dump: &str, golden: &str) -> Vec<(usize, String, String)> {
    let a: Vec<&str> = golden.lines().collect();
    let b: Vec<&str> = dump.lines().collect();
    (0..a.len().max(b.len()))
        .filter_map(|i| {
            let (x, y) = (a.get(i).copied().unwrap_or(""), b.get(i).copied().unwrap_or(""));
            (x != y).then(|| (i + 1, x.to_string(), y.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_matches_golden() {
        let dump = registry_table(&table_rows()).to_csv();
        assert_eq!(golden_diff(&dump, GOLDEN), vec![]);
        assert_eq!(GOLDEN.lines().count(), 15);
    }

    #[test]
    fn filters() {
        assert_eq!(filtered_rows(None).len(), 14);
        assert_eq!(filtered_rows(Some("II*")).len(), 1);
        assert_eq!(filtered_rows(Some("I_0")).len(), 3);
        let ib = filtered_rows(Some("I_3"));
        assert_eq!((ib.len(), ib[0].type_label), (1, "I_b"));
        assert_eq!(filtered_rows(Some("I_b*")).len(), 1);
        assert!(filtered_rows(Some("V")).is_empty());
    }

    #[test]
    fn diff_reports_lines() {
        let d = golden_diff("a\nb\n", "a\nc\nd\n");
        assert_eq!(d, vec![(2, "c".into(), "b".into()), (3, "d".into(), "".into())]);
    }
}
