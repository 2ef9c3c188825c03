//! Data behind the published figures, in long format: one row per
//! (curve, abscissa) with the curve's parameters repeated on every row.

use crate::commands::{sim_config, CliError, CliResult};
use crate::output::{Cell, Meta, Table};
use crate::spec::{db_to_linear, RunSpec};
use iftr::metrics::{
    avg_ber_asymptotic, ber_from_mixture, capacity_from_mixture, outage_cci_from_mixture,
    CciScenario, ModulationSpec,
};
use iftr::model::{build_mixture, GammaMixture, IftrParams};
use iftr::montecarlo::{self, Estimate, SimConfig};

/// (m1, m2, K, Δ)
type Shape = (f64, f64, f64, f64);

const DENSITY_SHAPES: [(f64, f64); 2] = [(2.0, 3.0), (2.7, 3.4)];

/// Shared by the capacity and outage figures.
const PERFORMANCE_SHAPES: [Shape; 4] = [
    (15.0, 7.5, 15.0, 0.5),
    (15.0, 7.5, 5.0, 0.5),
    (15.0, 7.5, 15.0, 0.9),
    (3.0, 30.0, 5.0, 0.5),
];

const DENSITY_POINTS: usize = 121;
const DENSITY_X_MAX: f64 = 4.0;

pub fn figure(number: u8, spec: &RunSpec, meta: &mut Meta) -> CliResult<Table> {
    match number {
        1 => {
            let shapes: Vec<Shape> = [0.1, 0.9]
                .iter()
                .flat_map(|&d| DENSITY_SHAPES.iter().map(move |&(a, b)| (a, b, 10.0, d)))
                .collect();
            density(&shapes, false, spec, meta)
        }
        2 => {
            let shapes: Vec<Shape> = [5.0, 15.0]
                .iter()
                .flat_map(|&k| DENSITY_SHAPES.iter().map(move |&(a, b)| (a, b, k, 0.5)))
                .collect();
            density(&shapes, false, spec, meta)
        }
        3 => {
            let shapes = [
                (2.0, 3.0, 10.0, 0.1),
                (2.0, 3.0, 10.0, 0.9),
                (2.7, 3.4, 5.0, 0.5),
                (2.7, 3.4, 15.0, 0.5),
            ];
            density(&shapes, true, spec, meta)
        }
        4 => snr_sweep(SnrMetric::Capacity, spec, meta),
        5 => snr_sweep(SnrMetric::Outage, spec, meta),
        6 => snr_sweep(SnrMetric::OutageCci(CciScenario::new(2, 1, 1.0, 1.0)?), spec, meta),
        7 => figure7(spec, meta),
        8 => figure8(spec, meta),
        n => Err(CliError::Validation(format!(
            "figure = {n} must be one of 1..=8"
        ))),
    }
}

fn params(shape: Shape, gamma_bar: f64) -> CliResult<IftrParams> {
    let (m1, m2, k, d) = shape;
    Ok(IftrParams::new(gamma_bar, m1, m2, k, d)?)
}

fn tracked(p: &IftrParams, terms: usize, meta: &mut Meta) -> CliResult<GammaMixture> {
    let mix = build_mixture(p, terms)?;
    meta.residual_mass = meta.residual_mass.max(mix.residual_mass());
    Ok(mix)
}

fn curve_label(shape: Shape) -> String {
    let (m1, m2, k, d) = shape;
    format!("m1={m1} m2={m2} K={k} delta={d}")
}

fn shape_cells(shape: Shape) -> Vec<Cell> {
    let (m1, m2, k, d) = shape;
    vec![
        Cell::Text(curve_label(shape)),
        m1.into(),
        m2.into(),
        k.into(),
        d.into(),
    ]
}

fn columns(extra: &[&str]) -> Vec<String> {
    ["curve", "m1", "m2", "K", "delta"]
        .iter()
        .chain(extra)
        .map(|s| s.to_string())
        .collect()
}

fn density(shapes: &[Shape], cumulative: bool, spec: &RunSpec, meta: &mut Meta) -> CliResult<Table> {
    let name = if cumulative { "cdf" } else { "pdf" };
    let analytic = format!("{name}_analytic");
    let mc_name = format!("{name}_mc");
    let mut extra = vec!["x", analytic.as_str()];
    if spec.monte_carlo {
        extra.push(&mc_name);
    }
    let mut t = Table {
        columns: columns(&extra),
        rows: Vec::new(),
    };
    let grid: Vec<f64> = (0..DENSITY_POINTS)
        .map(|i| DENSITY_X_MAX * i as f64 / (DENSITY_POINTS - 1) as f64)
        .collect();
    for &shape in shapes {
        let p = params(shape, spec.params.gamma_bar)?;
        let mix = tracked(&p, spec.terms, meta)?;
        let (xs, mc): (Vec<f64>, Option<Vec<f64>>) = if spec.monte_carlo {
            let samples = montecarlo::sample_snr(&p, spec.samples, spec.seed)?;
            if cumulative {
                let e = montecarlo::empirical_cdf(&samples, &grid)?;
                (grid.clone(), Some(e))
            } else {
                let h = montecarlo::empirical_pdf(&samples, DENSITY_POINTS - 1, DENSITY_X_MAX)?;
                let d = h.density.iter().map(|d| d * h.coverage).collect();
                (h.centres(), Some(d))
            }
        } else {
            (grid.clone(), None)
        };
        for (i, &x) in xs.iter().enumerate() {
            let v = if cumulative { mix.cdf(x) } else { mix.pdf(x) };
            let mut row = shape_cells(shape);
            row.push(x.into());
            row.push(v.into());
            if let Some(mc) = &mc {
                row.push(mc[i].into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

/// Metrics plotted against γ̄ from −10 to 30 dB. Outage uses γ_th = 0 dB and
/// the CCI scenario R_th = 0 dB.
enum SnrMetric {
    Capacity,
    Outage,
    OutageCci(CciScenario),
}

impl SnrMetric {
    fn name(&self) -> &'static str {
        match self {
            SnrMetric::Capacity => "capacity",
            SnrMetric::Outage => "outage",
            SnrMetric::OutageCci(_) => "outage_cci",
        }
    }

    fn analytic(&self, mix: &GammaMixture) -> CliResult<f64> {
        Ok(match self {
            SnrMetric::Capacity => capacity_from_mixture(mix)?,
            SnrMetric::Outage => mix.cdf(1.0),
            SnrMetric::OutageCci(sc) => outage_cci_from_mixture(mix, sc)?,
        })
    }

    fn simulate(&self, p: &IftrParams, cfg: &SimConfig) -> CliResult<Estimate> {
        Ok(match self {
            SnrMetric::Capacity => montecarlo::simulate_capacity(p, cfg)?,
            SnrMetric::Outage => montecarlo::simulate_outage(p, 1.0, cfg)?,
            SnrMetric::OutageCci(sc) => montecarlo::simulate_outage_cci(p, sc, cfg)?,
        })
    }
}

fn snr_sweep(metric: SnrMetric, spec: &RunSpec, meta: &mut Meta) -> CliResult<Table> {
    let name = metric.name();
    let mc_name = format!("{name}_mc");
    let se_name = format!("{name}_mc_se");
    let mut extra = vec!["gamma_bar_db", "gamma_bar", name];
    if spec.monte_carlo {
        extra.push(&mc_name);
        extra.push(&se_name);
    }
    let mut t = Table {
        columns: columns(&extra),
        rows: Vec::new(),
    };
    let cfg = sim_config(spec);
    let points = 21;
    for &shape in &PERFORMANCE_SHAPES {
        for i in 0..points {
            let db = -10.0 + 40.0 * i as f64 / (points - 1) as f64;
            let gb = db_to_linear(db);
            let p = params(shape, gb)?;
            let mix = tracked(&p, spec.terms, meta)?;
            let mut row = shape_cells(shape);
            row.extend([db.into(), gb.into(), metric.analytic(&mix)?.into()]);
            if spec.monte_carlo {
                let est = metric.simulate(&p, &cfg)?;
                row.extend([est.mean.into(), est.std_error.into()]);
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn figure7(spec: &RunSpec, meta: &mut Meta) -> CliResult<Table> {
    let shape = (3.0, 30.0, 5.0, 0.5);
    let mut extra = vec!["N", "L", "P_I", "R_th_db", "R_th", "outage_cci"];
    if spec.monte_carlo {
        extra.extend(["outage_cci_mc", "outage_cci_mc_se"]);
    }
    let mut t = Table {
        columns: columns(&extra),
        rows: Vec::new(),
    };
    let p = params(shape, spec.params.gamma_bar)?;
    let mix = tracked(&p, spec.terms, meta)?;
    let cfg = sim_config(spec);
    let points = 21;
    for n in 1..=3usize {
        for pi in [1.0, 2.0] {
            for i in 0..points {
                let db = -20.0 + 40.0 * i as f64 / (points - 1) as f64;
                let r = db_to_linear(db);
                let sc = CciScenario::new(n, 1, pi, r)?;
                let mut row = shape_cells(shape);
                row[0] = Cell::Text(format!("N={n} P_I={pi}"));
                row.extend([
                    n.into(),
                    1usize.into(),
                    pi.into(),
                    db.into(),
                    r.into(),
                    outage_cci_from_mixture(&mix, &sc)?.into(),
                ]);
                if spec.monte_carlo {
                    let est = montecarlo::simulate_outage_cci(&p, &sc, &cfg)?;
                    row.extend([est.mean.into(), est.std_error.into()]);
                }
                t.push(row);
            }
        }
    }
    Ok(t)
}

fn figure8(spec: &RunSpec, meta: &mut Meta) -> CliResult<Table> {
    let bpsk = ModulationSpec::bpsk();
    let mut extra = vec!["gamma_bar_db", "gamma_bar", "ber", "ber_asymptotic"];
    if spec.monte_carlo {
        extra.extend(["ber_mc", "ber_mc_se"]);
    }
    let mut t = Table {
        columns: columns(&extra),
        rows: Vec::new(),
    };
    let cfg = sim_config(spec);
    let points = 26;
    for d in [0.1, 0.5, 0.9] {
        let shape = (15.7, 5.1, 10.0, d);
        for i in 0..points {
            let db = 50.0 * i as f64 / (points - 1) as f64;
            let gb = db_to_linear(db);
            let p = params(shape, gb)?;
            let mix = tracked(&p, spec.terms, meta)?;
            let mut row = shape_cells(shape);
            row.extend([
                db.into(),
                gb.into(),
                ber_from_mixture(&mix, &bpsk).into(),
                avg_ber_asymptotic(&p, &bpsk)?.into(),
            ]);
            if spec.monte_carlo {
                let est = montecarlo::simulate_ber(&p, &bpsk, &cfg)?;
                row.extend([est.mean.into(), est.std_error.into()]);
            }
            t.push(row);
        }
    }
    Ok(t)
}
