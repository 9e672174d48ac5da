//! Evaluates a validated [`RunConfig`] into a result table.

use rayon::prelude::*;

use imres_core::{
    deposition_rate, fisher_from_images, two_point_resolution, utility, FisherReport,
    Povm, Scenario,
};

use crate::config::{Analysis, Point, RunConfig, ScenarioConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub table: Table,
    pub reference: Table,
    pub summary: String,
}

fn fisher_at(scenario: &Scenario, povm: &Povm, theta: f64, config: &RunConfig) -> Result<FisherReport, CliError> {
    let options = config.fisher_options();
    Ok(fisher_from_images(|t| scenario.image_at(t, povm), theta, &options)?)
}

fn fisher(point: &Point, config: &RunConfig) -> Result<FisherReport, CliError> {
    fisher_at(&point.scenario, &point.povm, point.scenario.reference_theta(), config)
}

fn deposition(point: &Point, config: &RunConfig) -> Result<Option<f64>, CliError> {
    if point.povm.null_outcome().is_none() {
        return Ok(None);
    }
    if config.utility.reading == crate::config::Reading::Global && point.povm.is_bleeding() {
        return Ok(None);
    }
    match point.scenario.field()? {
        Some(field) => Ok(Some(deposition_rate(&field, &point.povm, &config.deposition_options())?)),
        None => Ok(None),
    }
}

fn n_pixels(point: &Point) -> u64 {
    match &point.scenario {
        Scenario::Lithography(s) => s.grid.n_pixels() as u64,
        Scenario::GaussianDot(s) => s.grid.n_pixels() as u64,
        Scenario::DoubleSlit(s) => s.n_samples as u64,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6e}")
}

/// Runs `config` on the current rayon pool; sweep rows keep sweep order.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let points = config.points()?;
    let scenario = config.scenario.name();
    let analysis = config.analysis.name();
    let mut reference = Table::new(["theta", "reference_fisher"]);
    let (table, detail) = match config.analysis {
        Analysis::Fisher | Analysis::Resolution => {
            let point = &points[0].1;
            let r = fisher(point, config)?;
            let mut t = if config.analysis == Analysis::Fisher {
                Table::new(["theta", "fisher", "resolution", "step", "floor", "normalization_term", "step_change"])
            } else {
                Table::new(["theta", "fisher", "resolution"])
            };
            let mut row = vec![Cell::Float(r.theta), Cell::Float(r.fisher), Cell::Float(r.resolution)];
            if config.analysis == Analysis::Fisher {
                row.extend([
                    Cell::Float(r.step.unwrap_or(0.0)),
                    Cell::Float(r.floor),
                    Cell::Float(r.normalization_term),
                    Cell::Float(r.step_change.unwrap_or(0.0)),
                ]);
            }
            t.push(row);
            reference = reference_rows(&config.scenario, r.theta);
            (t, format!("F0={} dtheta_min={}", fmt(r.fisher), fmt(r.resolution)))
        }
        Analysis::TwoPoint => {
            let point = &points[0].1;
            let bracket = config.two_point_bracket().expect("validated");
            let theta_min = two_point_resolution(
                |t| fisher_at(&point.scenario, &point.povm, t, config).map(|r| r.fisher).map_err(|e| match e {
                    CliError::Numerical(e) => e,
                    other => imres_core::Error::Unsupported(other.to_string()),
                }),
                bracket,
            )?;
            let f = fisher_at(&point.scenario, &point.povm, theta_min, config)?;
            let mut t = Table::new(["theta_min", "fisher", "bracket_lo", "bracket_hi"]);
            let mut row = vec![
                Cell::Float(theta_min),
                Cell::Float(f.fisher),
                Cell::Float(bracket.0),
                Cell::Float(bracket.1),
            ];
            let mut detail = format!("theta_min={}", fmt(theta_min));
            if let Scenario::DoubleSlit(s) = &point.scenario {
                let unit = s.wavelength / s.numerical_aperture;
                t.columns.extend(["theta_min_per_lambda_over_na".into(), "abbe_limit".into()]);
                row.extend([Cell::Float(theta_min / unit), Cell::Float(s.abbe_limit())]);
                detail.push_str(&format!(" theta_min_na_over_lambda={}", fmt(theta_min / unit)));
                reference = Table::new(["abbe_limit"]);
                reference.push(vec![Cell::Float(s.abbe_limit())]);
            }
            t.push(row);
            (t, detail)
        }
        Analysis::Deposition => {
            let point = &points[0].1;
            let d = deposition(point, config)?.expect("validated");
            let mut t = Table::new(["n_pixels", "deposition"]);
            t.push(vec![Cell::Int(n_pixels(point)), Cell::Float(d)]);
            (t, format!("D={}", fmt(d)))
        }
        Analysis::Utility => {
            let point = &points[0].1;
            let r = fisher(point, config)?;
            let d = deposition(point, config)?.expect("validated");
            let c = config.utility.cost_exponent;
            let u = utility(r.fisher, d, c)?;
            let mut t = Table::new(["fisher", "resolution", "deposition", "cost_exponent", "utility"]);
            t.push(vec![
                Cell::Float(r.fisher),
                Cell::Float(r.resolution),
                Cell::Float(d),
                Cell::Float(c),
                Cell::Float(u),
            ]);
            (
                t,
                format!("F0={} dtheta_min={} D={} U={}", fmt(r.fisher), fmt(r.resolution), fmt(d), fmt(u)),
            )
        }
        Analysis::Sweep => sweep(config, &points, &mut reference)?,
    };
    let summary = format!("scenario={scenario} analysis={analysis} {detail} rows={}", table.rows.len());
    Ok(RunOutcome {
        table,
        reference,
        summary,
    })
}

struct SweepRow {
    value: f64,
    fisher: f64,
    resolution: f64,
    reference_fisher: f64,
    deposition: Option<f64>,
}

fn sweep(
    config: &RunConfig,
    points: &[(Option<f64>, Point)],
    reference: &mut Table,
) -> Result<(Table, String), CliError> {
    let sweep = config.sweep.as_ref().expect("validated");
    let rows = points
        .par_iter()
        .map(|(value, point)| {
            let report = fisher(point, config)?;
            let f = report.fisher;
            let reference_fisher = if point.reference_povm == point.povm {
                f
            } else {
                fisher_at(&point.scenario, &point.reference_povm, point.scenario.reference_theta(), config)?.fisher
            };
            Ok(SweepRow {
                value: value.expect("sweep point"),
                fisher: f,
                resolution: report.resolution,
                reference_fisher,
                deposition: deposition(point, config)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let with_deposition = rows.iter().all(|r| r.deposition.is_some());
    let name = sweep.parameter_name();
    let mut columns = vec![name, "fisher", "resolution", "reference_fisher", "ratio"];
    if with_deposition {
        columns.extend(["deposition", "utility"]);
    }
    let mut t = Table::new(columns);
    for r in &rows {
        let ratio = if r.reference_fisher > 0.0 {
            r.fisher / r.reference_fisher
        } else {
            f64::NAN
        };
        let mut row = vec![
            Cell::Float(r.value),
            Cell::Float(r.fisher),
            Cell::Float(r.resolution),
            Cell::Float(r.reference_fisher),
            Cell::Float(ratio),
        ];
        if let Some(d) = r.deposition.filter(|_| with_deposition) {
            row.extend([Cell::Float(d), Cell::Float(utility(r.fisher, d, config.utility.cost_exponent)?)]);
        }
        t.push(row);
    }

    *reference = Table::new([name, "reference_fisher"]);
    for (value, point) in points {
        if let Some(f) = point.scenario_config.reference_fisher() {
            reference.push(vec![Cell::Float(value.expect("sweep point")), Cell::Float(f)]);
        }
    }
    if reference.rows.is_empty() {
        reference.columns.truncate(1);
    }

    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.fisher), hi.max(r.fisher)));
    let detail = format!("parameter={name} points={} F0_min={} F0_max={}", rows.len(), fmt(lo), fmt(hi));
    Ok((t, detail))
}

fn reference_rows(scenario: &ScenarioConfig, theta: f64) -> Table {
    let mut t = Table::new(["theta", "reference_fisher"]);
    if let Some(f) = scenario.reference_fisher() {
        t.push(vec![Cell::Float(theta), Cell::Float(f)]);
    }
    t
}
