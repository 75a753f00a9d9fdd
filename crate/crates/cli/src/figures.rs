//! Figure datasets with the published parameter choices.
//!
//! | figure | files | content |
//! |---|---|---|
//! | fig2 | `fig2.csv` | `T, R, loss` against detuning for `sigma` in {0.01, 0.2} and `Omega` in {0, 1.6} |
//! | fig3 | `fig3_{detuning,purcell,sigma}.csv` | two-photon probabilities with the plane-wave/bound-state split |
//! | fig4 | `fig4_{detuning,purcell,sigma}.csv` | `P21` and `P31` |
//! | fig5 | `fig5_{lambda,n}.csv` | joint and uncorrelated spectra on a 201 x 201 grid |
//! | fig6 | `fig6.csv` | photon-number statistics at `nbar = 1` against detuning |
//! | fig7 | `fig7a.csv`, `fig7b.csv` | `g2(0)` map over `(P, Omega)` and `g2(tau)` curves |

use std::str::FromStr;

use wqed::coherent_stats::default_tau_grid;
use wqed::AtomKind;

use crate::commands::{
    g2_table, g2map_table, joint_spectrum_table, single, stats, three_photon, two_photon, Context,
    TWO_PHOTON_COLUMNS,
};
use crate::config::{Range, RunConfig, Sweep};
use crate::error::CliError;
use crate::output::{Cell, Manifest, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "fig2" | "2" => Figure::Fig2,
            "fig3" | "3" => Figure::Fig3,
            "fig4" | "4" => Figure::Fig4,
            "fig5" | "5" => Figure::Fig5,
            "fig6" | "6" => Figure::Fig6,
            "fig7" | "7" => Figure::Fig7,
            other => return Err(CliError::Param(format!("unknown figure '{other}' (fig2..fig7)"))),
        })
    }
}

const KINDS: [AtomKind; 2] = [AtomKind::Lambda3LS, AtomKind::N4LS];

fn preset(kind: AtomKind, sigma: f64) -> RunConfig {
    RunConfig {
        kind,
        purcell: 9.0,
        omega_rabi: 1.6,
        sigma,
        ..RunConfig::default()
    }
}

fn range(lo: f64, hi: f64, n: usize) -> Range {
    Range { lo, hi, n }
}

/// Columns of the fig4 tables after the leading `kind` and sweep columns.
const FIG4_COLUMNS: [&str; 5] = ["P21", "P31", "T", "P_RRR", "mc_err"];

type Builder = fn(&Context, &mut Manifest) -> Result<(Table, Option<CliError>), CliError>;

/// Runs `build` as a sweep of `var` for each kind and stacks the results
/// under a leading `kind` column.
#[allow(clippy::too_many_arguments)]
fn stacked(
    name: &str,
    base: &Context,
    kinds: &[AtomKind],
    sigma: f64,
    var: &str,
    r: Range,
    keep: Option<&[&str]>,
    build: Builder,
    manifest: &mut Manifest,
) -> Result<(Table, Option<CliError>), CliError> {
    let mut out: Option<Table> = None;
    let mut failure: Option<CliError> = None;
    for &kind in kinds {
        let ctx = Context {
            run: preset(kind, sigma),
            sweep: Some(Sweep {
                var: var.into(),
                range: r,
            }),
            ..base.clone()
        };
        let (t, f) = build(&ctx, manifest)?;
        if let Some(f) = f {
            failure = Some(match failure {
                Some(prev) => prev.worse(f),
                None => f,
            });
        }
        let picked: Vec<usize> = match keep {
            Some(cols) => std::iter::once(0)
                .chain(cols.iter().filter_map(|c| t.columns.iter().position(|x| x == c)))
                .collect(),
            None => (0..t.columns.len()).collect(),
        };
        let table = out.get_or_insert_with(|| {
            let mut cols = vec!["kind".to_string()];
            cols.extend(picked.iter().map(|&i| t.columns[i].clone()));
            Table::with_columns(name, cols)
        });
        for row in t.rows {
            let mut cells = vec![Cell::Text(kind.to_string())];
            cells.extend(picked.iter().map(|&i| row[i].clone()));
            table.push(cells);
        }
    }
    Ok((out.unwrap_or_else(|| Table::new(name, &["kind"])), failure))
}

/// Builds every dataset of `figure`. Tables are returned even when some
/// points failed; the failure is reported separately.
pub fn reproduce(
    figure: Figure,
    base: &Context,
    manifest: &mut Manifest,
) -> Result<(Vec<Table>, Option<CliError>), CliError> {
    let quad = base.quad()?;
    let mut tables = Vec::new();
    let mut failure: Option<CliError> = None;
    let mut note = |f: Option<CliError>| {
        if let Some(f) = f {
            failure = Some(match failure.take() {
                Some(prev) => prev.worse(f),
                None => f,
            });
        }
    };
    match figure {
        Figure::Fig2 => {
            let mut table = Table::new(
                "fig2",
                &["sigma", "omega_rabi", "delta_omega", "T", "R", "loss", "quad_err"],
            );
            for sigma in [0.01, 0.2] {
                for omega in [0.0, 1.6] {
                    let ctx = Context {
                        run: RunConfig {
                            omega_rabi: omega,
                            ..preset(AtomKind::Lambda3LS, sigma)
                        },
                        sweep: Some(Sweep {
                            var: "delta_omega".into(),
                            range: range(-3.0, 3.0, 121),
                        }),
                        ..base.clone()
                    };
                    let (t, f) = single(&ctx, manifest)?;
                    note(f);
                    for row in t.rows {
                        let mut cells = vec![sigma.into(), omega.into()];
                        cells.extend(row);
                        table.push(cells);
                    }
                }
            }
            tables.push(table);
        }
        Figure::Fig3 => {
            for (suffix, var, r) in [
                ("detuning", "delta_omega", range(-3.0, 3.0, 61)),
                ("purcell", "purcell", range(0.0, 20.0, 41)),
                ("sigma", "sigma", range(0.01, 1.0, 34)),
            ] {
                let (t, f) = stacked(
                    &format!("fig3_{suffix}"),
                    base,
                    &KINDS,
                    0.2,
                    var,
                    r,
                    Some(&TWO_PHOTON_COLUMNS),
                    two_photon,
                    manifest,
                )?;
                note(f);
                tables.push(t);
            }
        }
        Figure::Fig4 => {
            for (suffix, var, r) in [
                ("detuning", "delta_omega", range(-2.0, 2.0, 21)),
                ("purcell", "purcell", range(1.0, 20.0, 20)),
                ("sigma", "sigma", range(0.02, 0.5, 13)),
            ] {
                let (t, f) = stacked(
                    &format!("fig4_{suffix}"),
                    base,
                    &KINDS,
                    0.2,
                    var,
                    r,
                    Some(&["T", "P_RRR", "P31", "mc_err"]),
                    three_photon,
                    manifest,
                )?;
                note(f);
                let (t2, f2) = stacked(
                    "p21",
                    base,
                    &KINDS,
                    0.2,
                    var,
                    r,
                    Some(&["P21"]),
                    two_photon,
                    manifest,
                )?;
                note(f2);
                let mut merged = Table::with_columns(&t.name, {
                    let mut c = t.columns[..2].to_vec();
                    c.extend(FIG4_COLUMNS.map(String::from));
                    c
                });
                for (a, b) in t.rows.into_iter().zip(t2.rows) {
                    merged.push(vec![
                        a[0].clone(),
                        a[1].clone(),
                        b[2].clone(),
                        a[4].clone(),
                        a[2].clone(),
                        a[3].clone(),
                        a[5].clone(),
                    ]);
                }
                tables.push(merged);
            }
        }
        Figure::Fig5 => {
            for kind in KINDS {
                let name = format!("fig5_{kind}");
                tables.push(joint_spectrum_table(&name, &preset(kind, 0.01), &quad, 201, 5.0)?);
            }
        }
        Figure::Fig6 => {
            fn build(ctx: &Context, m: &mut Manifest) -> Result<(Table, Option<CliError>), CliError> {
                stats(ctx, 1.0, m)
            }
            let (t, f) = stacked(
                "fig6",
                base,
                &KINDS,
                0.01,
                "delta_omega",
                range(-1.0, 1.0, 21),
                None,
                build,
                manifest,
            )?;
            note(f);
            tables.push(t);
        }
        Figure::Fig7 => {
            let (map, _) = g2map_table(
                "fig7a",
                &preset(AtomKind::N4LS, 0.2),
                &quad,
                &range(0.1, 3.0, 30).values(),
                &range(0.0, 20.0, 30).values(),
            )?;
            tables.push(map);
            let mut curves = Table::new("fig7b", &["kind", "purcell", "tau", "g2"]);
            let tau = default_tau_grid();
            for kind in KINDS {
                for purcell in [1.0, 9.0] {
                    let cfg = RunConfig {
                        purcell,
                        ..preset(kind, 0.2)
                    };
                    let t = g2_table("g2", &cfg, &quad, &tau)?;
                    for row in t.rows {
                        let mut cells = vec![Cell::Text(kind.to_string()), purcell.into()];
                        cells.extend(row);
                        curves.push(cells);
                    }
                }
            }
            tables.push(curves);
        }
    }
    Ok((tables, failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::stats_wide_columns;

    fn golden(name: &str) -> Vec<String> {
        let text = include_str!("../../../schemas/datasets.json");
        let all: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text).unwrap();
        serde_json::from_value(all[name].clone()).unwrap()
    }

    // fig4 and fig6 take minutes to compute, so their headers are checked here
    #[test]
    fn slow_figure_schemas() {
        for (name, var) in [
            ("fig4_detuning", "delta_omega"),
            ("fig4_purcell", "purcell"),
            ("fig4_sigma", "sigma"),
        ] {
            let mut cols = vec!["kind".to_string(), var.to_string()];
            cols.extend(FIG4_COLUMNS.map(String::from));
            assert_eq!(cols, golden(name));
        }
        let mut fig6 = vec!["kind".to_string(), "delta_omega".to_string()];
        fig6.extend(stats_wide_columns());
        assert_eq!(fig6, golden("fig6"));
    }

    #[test]
    fn figure_names() {
        assert_eq!("fig5".parse::<Figure>().unwrap(), Figure::Fig5);
        assert_eq!("7".parse::<Figure>().unwrap(), Figure::Fig7);
        assert!("fig8".parse::<Figure>().is_err());
    }
}
