use std::f64::consts::PI;

use crate::algebra::rational_multiple;

use super::catalog::{ClassId, ManifoldDescriptor};
use super::energy::SingularEnergySolver;
use super::TopologyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

/// One class of a decomposition table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub id: ClassId,
    pub name: String,
    pub description: String,
    pub conjugates: usize,
    pub lambda: f64,
    pub decompositions: Vec<Vec<ClassId>>,
    pub singular_energy: f64,
}

pub const CSV_HEADER: [&str; 6] = ["name", "description", "conjugates", "lambda_over_pi", "decompositions", "esg_over_pi"];

/// Formats `x` as `p/q` when it is a small-denominator rational, otherwise with 12 significant digits.
fn over_pi(x: f64, max_den: i64) -> String {
    match rational_multiple(x, max_den, 1e-10) {
        Some((p, 1)) => format!("{p}"),
        Some((p, q)) => format!("{p}/{q}"),
        None => format!("{:.11e}", x).parse::<f64>().map(|v| v.to_string()).unwrap_or_default(),
    }
}

/// Rows of the decomposition table. Lattice models list classes of norm at most `norm_bound`.
pub fn table_rows(m: &ManifoldDescriptor, norm_bound: f64) -> Result<Vec<TableRow>, TopologyError> {
    let solver = SingularEnergySolver::new(m, if m.is_lattice() { 2.0 * norm_bound } else { 0.0 });
    m.classes(norm_bound)
        .into_iter()
        .map(|c| {
            let s = solver.solve(c)?;
            let e = m.entry(c);
            Ok(TableRow {
                id: c,
                name: e.name,
                description: e.description,
                conjugates: e.conjugates,
                lambda: e.lambda,
                decompositions: if m.is_trivial(c) { Vec::new() } else { s.decompositions },
                singular_energy: s.energy,
            })
        })
        .collect()
}

fn cells(m: &ManifoldDescriptor, row: &TableRow) -> [String; 6] {
    let decomps = row
        .decompositions
        .iter()
        .map(|d| d.iter().map(|&c| m.class_name(c)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" / ");
    [
        row.name.clone(),
        row.description.clone(),
        row.conjugates.to_string(),
        over_pi(row.lambda / PI, 12),
        decomps,
        over_pi(row.singular_energy / PI, 1000),
    ]
}

/// Decomposition table as aligned text or CSV with columns
/// `name, description, conjugates, lambda_over_pi, decompositions, esg_over_pi`.
pub fn table_report(m: &ManifoldDescriptor, format: TableFormat, norm_bound: f64) -> Result<String, TopologyError> {
    let rows = table_rows(m, norm_bound)?;
    let body: Vec<[String; 6]> = rows.iter().map(|r| cells(m, r)).collect();
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for r in &body {
                w.write_record(r).expect("in-memory write");
            }
            Ok(String::from_utf8(w.into_inner().expect("flush")).expect("utf8"))
        }
        TableFormat::Text => {
            let header = ["γ", "Description", "Conjugates", "λ/π", "Decompositions", "E_sg/π"];
            let mut width = header.map(|h| h.chars().count());
            for r in &body {
                for (w, c) in width.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cols: &[String]| {
                let padded: Vec<String> = cols
                    .iter()
                    .zip(width)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(&header.map(String::from));
            out += &line(&width.map(|w| "-".repeat(w)));
            for r in &body {
                out += &line(r);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::ManifoldKind;

    #[test]
    fn over_pi_formats() {
        assert_eq!(over_pi(2.0 / 3.0, 12), "2/3");
        assert_eq!(over_pi(25.0 / 144.0, 1000), "25/144");
        assert_eq!(over_pi(0.0, 12), "0");
        assert_eq!(over_pi(2f64.sqrt(), 12), "1.41421356237");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let m = ManifoldDescriptor::new(ManifoldKind::Tetrahedral);
        let s = table_report(&m, TableFormat::Csv, 0.0).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 8);
    }

    #[test]
    fn text_is_stable() {
        let m = ManifoldDescriptor::new(ManifoldKind::ProjectiveSpace(2));
        let a = table_report(&m, TableFormat::Text, 0.0).unwrap();
        assert_eq!(a, table_report(&m, TableFormat::Text, 0.0).unwrap());
        assert!(a.contains("geodesic between antipodal points"));
    }
}
