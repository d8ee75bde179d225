//! CSV output of convergence tables, variant comparisons and run diagnostics.

use std::fmt::Write;

use crate::analysis::{ConvergenceTable, VariantComparison};
use crate::scheme::StepDiagnostics;
use crate::{Error, Result};

pub const TABLE_HEADER: &str = "1/h,e1_L2,CR,e1_H1,CR,e2_L2,CR,e2_H1,CR";
const COLUMNS: [&str; 4] = ["e1_L2", "e1_H1", "e2_L2", "e2_H1"];

/// Scientific notation with six significant digits and a signed two-digit
/// exponent, e.g. `1.13217e-03`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn format_rate(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.2}")).unwrap_or_default()
}

pub fn table_csv(table: &ConvergenceTable) -> String {
    let mut s = String::new();
    s.push_str(TABLE_HEADER);
    s.push('\n');
    for (j, row) in table.rows.iter().enumerate() {
        let (e, r) = (row.errors.as_array(), table.rates(j));
        let _ = write!(s, "{}", row.level);
        for k in 0..4 {
            let _ = write!(s, ",{},{}", format_sci(e[k]), format_rate(r[k]));
        }
        s.push('\n');
    }
    s
}

/// Parses a table written by [`table_csv`] back into `(1/h, errors)` rows.
pub fn parse_table_csv(text: &str) -> Result<Vec<(usize, [f64; 4])>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TABLE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header '{TABLE_HEADER}'"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = |m: &str| Error::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != 9 {
                return Err(bad("expected 9 cells"));
            }
            let level = cells[0].trim().parse().map_err(|_| bad("bad 1/h cell"))?;
            let mut e = [0.0; 4];
            for (k, v) in e.iter_mut().enumerate() {
                *v = cells[1 + 2 * k].trim().parse().map_err(|_| bad("bad error cell"))?;
            }
            Ok((level, e))
        })
        .collect()
}

/// Both variants side by side followed by the AV/SAV ratio of every column.
pub fn comparison_csv(cmp: &VariantComparison) -> String {
    let mut s = String::from("1/h");
    for prefix in ["av", "sav", "ratio"] {
        for c in COLUMNS {
            let _ = write!(s, ",{prefix}_{c}");
        }
    }
    s.push('\n');
    for ((a, b), (level, ratio)) in cmp.av.rows.iter().zip(&cmp.sav.rows).zip(cmp.ratios()) {
        let _ = write!(s, "{level}");
        for v in a.errors.as_array().into_iter().chain(b.errors.as_array()) {
            let _ = write!(s, ",{}", format_sci(v));
        }
        for r in ratio {
            let _ = write!(s, ",{r:.4}");
        }
        s.push('\n');
    }
    s
}

pub const DIAGNOSTICS_HEADER: &str = "step,time,defect_energy,corrected_energy,interface_dissipation,divergence,\
defect_picard_1,defect_picard_2,correction_picard_1,correction_picard_2,stability_lhs,stability_rhs,probe_x,probe_y";

pub fn diagnostics_csv(diags: &[StepDiagnostics]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.10e}")).unwrap_or_default();
    for d in diags {
        let _ = writeln!(
            s,
            "{},{:.6},{:.10e},{:.10e},{:.10e},{:.3e},{},{},{},{},{},{},{},{}",
            d.step,
            d.time,
            d.defect_energy,
            d.corrected_energy,
            d.interface_dissipation,
            d.divergence,
            d.defect_picard[0],
            d.defect_picard[1],
            d.correction_picard[0],
            d.correction_picard[1],
            opt(d.stability.map(|r| r.lhs)),
            opt(d.stability.map(|r| r.rhs)),
            opt(d.probe.map(|p| p[0])),
            opt(d.probe.map(|p| p[1])),
        );
    }
    s
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &std::path::Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ConvergenceRow, ErrorNorms};
    use crate::scheme::Variant;

    fn row(level: usize, s: f64) -> ConvergenceRow {
        ConvergenceRow {
            level,
            errors: ErrorNorms {
                defect_l2: 1.13217e-3 * s,
                defect_h1: 1.20279e-2 * s,
                corrected_l2: 5.43879e-4 * s,
                corrected_h1: 8.87426e-3 * s,
            },
        }
    }

    #[test]
    fn scientific_format() {
        assert_eq!(format_sci(1.13217e-3), "1.13217e-03");
        assert_eq!(format_sci(2.5), "2.50000e+00");
        assert_eq!(format_sci(123456.7), "1.23457e+05");
        assert_eq!(format_sci(0.0), "0.00000e+00");
        assert_eq!(format_sci(1e-120), "1.00000e-120");
    }

    #[test]
    fn single_row_has_empty_rates() {
        let t = ConvergenceTable {
            variant: Variant::Sav,
            rows: vec![row(8, 1.0)],
        };
        let csv = table_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines[1], "8,1.13217e-03,,1.20279e-02,,5.43879e-04,,8.87426e-03,");
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn round_trip() {
        let t = ConvergenceTable {
            variant: Variant::Sav,
            rows: [(8, [1.13217e-3, 1.20279e-2, 5.43879e-4, 8.87426e-3]), (16, [4.01572e-4, 3.87974e-3, 1.27978e-4, 2.25343e-3])]
                .into_iter()
                .map(|(level, e)| ConvergenceRow {
                    level,
                    errors: ErrorNorms {
                        defect_l2: e[0],
                        defect_h1: e[1],
                        corrected_l2: e[2],
                        corrected_h1: e[3],
                    },
                })
                .collect(),
        };
        let csv = table_csv(&t);
        assert!(csv.lines().nth(2).unwrap().contains(",2.09,"), "{csv}");
        let back = parse_table_csv(&csv).unwrap();
        for (r, (level, e)) in t.rows.iter().zip(back) {
            assert_eq!(r.level, level);
            for (a, b) in r.errors.as_array().iter().zip(e) {
                assert!(((a - b) / a).abs() < 1e-6);
            }
        }
        // Arbitrary values come back within half a unit of the sixth digit.
        let t = ConvergenceTable {
            variant: Variant::Sav,
            rows: vec![row(8, 0.2718281828)],
        };
        let (_, e) = parse_table_csv(&table_csv(&t)).unwrap()[0];
        for (a, b) in t.rows[0].errors.as_array().iter().zip(e) {
            assert!(((a - b) / a).abs() <= 5e-6);
        }
    }

    #[test]
    fn comparison_has_one_ratio_per_error_column() {
        let cmp = VariantComparison {
            av: ConvergenceTable {
                variant: Variant::Av,
                rows: vec![row(8, 3.0)],
            },
            sav: ConvergenceTable {
                variant: Variant::Sav,
                rows: vec![row(8, 1.0)],
            },
        };
        let csv = comparison_csv(&cmp);
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        let ratios = header.iter().filter(|h| h.starts_with("ratio_")).count();
        let av = header.iter().filter(|h| h.starts_with("av_")).count();
        assert_eq!(ratios, av);
        assert!(csv.lines().nth(1).unwrap().ends_with("3.0000,3.0000,3.0000,3.0000"));
    }
}
