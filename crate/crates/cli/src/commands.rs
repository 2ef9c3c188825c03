use crate::figures;
use crate::output::{Cell, Meta, Table};
use crate::spec::{Command, RunSpec};
use iftr::metrics::{
    avg_ber_asymptotic, ber_from_mixture, capacity_from_mixture, outage_cci, CciScenario,
    ModulationSpec,
};
use iftr::model::{
    aof, build_mixture, default_grid, gmgf_int, ks_truncation, moment_int, GammaMixture,
    IftrParams,
};
use iftr::montecarlo::{self, SimConfig};
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<iftr::Error> for CliError {
    fn from(e: iftr::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Table I rows: (K, m1, m2, Δ).
pub const KS_TABLE_ROWS: [(f64, f64, f64, f64); 5] = [
    (10.0, 8.0, 5.0, 0.5),
    (15.0, 8.0, 5.0, 0.5),
    (10.0, 8.0, 5.0, 0.8),
    (10.0, 8.0, 5.0, 0.3),
    (10.0, 15.0, 5.0, 0.5),
];

pub fn run(spec: &RunSpec) -> CliResult<(Table, Meta)> {
    if spec.terms == 0 {
        return Err(CliError::Validation("J must be >= 1".into()));
    }
    if spec.monte_carlo && spec.samples < 1000 {
        return Err(CliError::Validation(format!(
            "samples = {} must be >= 1000 for Monte Carlo columns",
            spec.samples
        )));
    }
    match &spec.sweep {
        None => run_point(spec),
        Some(sweep) => {
            if matches!(spec.command, Command::KsTable { .. } | Command::Figure { .. }) {
                return Err(CliError::Validation(format!(
                    "{} does not take --sweep",
                    spec.command.name()
                )));
            }
            let mut table = Table::default();
            let mut meta = Meta::default();
            for v in sweep.values() {
                let point = spec.with_var(sweep.var, v).map_err(CliError::Validation)?;
                let (mut t, m) = run_point(&point)?;
                meta.residual_mass = meta.residual_mass.max(m.residual_mass);
                t = t.with_leading(sweep.var.column(), Cell::Num(v));
                if sweep.db {
                    t = t.with_leading(
                        &format!("{}_db", sweep.var.column()),
                        Cell::Num(10.0 * v.log10()),
                    );
                }
                table.extend(t);
            }
            Ok((table, meta))
        }
    }
}

pub fn sim_config(spec: &RunSpec) -> SimConfig {
    SimConfig {
        num_samples: spec.samples,
        seed: spec.seed,
        ..SimConfig::default()
    }
}

fn mixture(p: &IftrParams, terms: usize, meta: &mut Meta) -> CliResult<GammaMixture> {
    let mix = build_mixture(p, terms)?;
    meta.residual_mass = meta.residual_mass.max(mix.residual_mass());
    Ok(mix)
}

fn run_point(spec: &RunSpec) -> CliResult<(Table, Meta)> {
    let mut meta = Meta::default();
    if let Command::Figure { number } = spec.command {
        let table = figures::figure(number, spec, &mut meta)?;
        return Ok((table, meta));
    }
    if let Command::KsTable {
        orders,
        reference,
        grid_points,
        custom,
    } = &spec.command
    {
        let table = ks_table(spec, orders, *reference, *grid_points, *custom, &mut meta)?;
        return Ok((table, meta));
    }
    let p = spec.params.build()?;
    let cfg = sim_config(spec);
    let mc = spec.monte_carlo;
    let table = match &spec.command {
        Command::Coeffs => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let mut t = Table::new(&["j", "A_j"]);
            for (j, &a) in mix.weights().iter().enumerate() {
                t.push(vec![j.into(), a.into()]);
            }
            t
        }
        Command::Pdf { x_max, points } => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            density_table(&p, &mix, spec, *x_max, *points, false)?
        }
        Command::Cdf { x_max, points } => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            density_table(&p, &mix, spec, *x_max, *points, true)?
        }
        Command::Gmgf { n, s } => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let series = mix.gmgf_real(*n, *s)?;
            if n.fract() == 0.0 && *n >= 0.0 && *n <= u32::MAX as f64 {
                let mut t = Table::new(&["n", "s", "gmgf_mixture", "gmgf_closed"]);
                let closed = gmgf_int(&p, *n as u32, *s)?;
                t.push(vec![(*n).into(), (*s).into(), series.into(), closed.into()]);
                t
            } else {
                let mut t = Table::new(&["n", "s", "gmgf_mixture"]);
                t.push(vec![(*n).into(), (*s).into(), series.into()]);
                t
            }
        }
        Command::Moments { max_order } => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let mut t = Table::new(&["n", "moment_closed", "moment_mixture"]);
            for n in 1..=*max_order {
                t.push(vec![
                    (n as f64).into(),
                    moment_int(&p, n).into(),
                    mix.moment_real(n as f64)?.into(),
                ]);
            }
            t
        }
        Command::Aof => {
            let mut t = Table::new(&["aof"]);
            t.push(vec![aof(&p).into()]);
            t
        }
        Command::Capacity => {
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let c = capacity_from_mixture(&mix)?;
            if mc {
                let est = montecarlo::simulate_capacity(&p, &cfg)?;
                let mut t = Table::new(&["capacity", "capacity_mc", "capacity_mc_se"]);
                t.push(vec![c.into(), est.mean.into(), est.std_error.into()]);
                t
            } else {
                let mut t = Table::new(&["capacity"]);
                t.push(vec![c.into()]);
                t
            }
        }
        Command::Outage { gamma_th } => {
            if !(*gamma_th >= 0.0) {
                return Err(CliError::Validation(format!(
                    "gamma_th = {gamma_th} must satisfy gamma_th >= 0"
                )));
            }
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let v = mix.cdf(*gamma_th);
            if mc {
                let est = montecarlo::simulate_outage(&p, *gamma_th, &cfg)?;
                let mut t = Table::new(&["outage", "outage_mc", "outage_mc_se"]);
                t.push(vec![v.into(), est.mean.into(), est.std_error.into()]);
                t
            } else {
                let mut t = Table::new(&["outage"]);
                t.push(vec![v.into()]);
                t
            }
        }
        Command::OutageCci {
            antennas,
            interferers,
            interference_power,
            sir_threshold,
        } => {
            let sc = CciScenario::new(*antennas, *interferers, *interference_power, *sir_threshold)?;
            let v = outage_cci(&p, &sc)?;
            if mc {
                let est = montecarlo::simulate_outage_cci(&p, &sc, &cfg)?;
                let mut t = Table::new(&["outage_cci", "outage_cci_mc", "outage_cci_mc_se"]);
                t.push(vec![v.into(), est.mean.into(), est.std_error.into()]);
                t
            } else {
                let mut t = Table::new(&["outage_cci"]);
                t.push(vec![v.into()]);
                t
            }
        }
        Command::Ber { modulation } => {
            let m = ModulationSpec::new(modulation.clone())?;
            let mix = mixture(&p, spec.terms, &mut meta)?;
            let exact = ber_from_mixture(&mix, &m);
            let asym = avg_ber_asymptotic(&p, &m)?;
            if mc {
                let est = montecarlo::simulate_ber(&p, &m, &cfg)?;
                let mut t = Table::new(&["ber", "ber_asymptotic", "ber_mc", "ber_mc_se"]);
                t.push(vec![exact.into(), asym.into(), est.mean.into(), est.std_error.into()]);
                t
            } else {
                let mut t = Table::new(&["ber", "ber_asymptotic"]);
                t.push(vec![exact.into(), asym.into()]);
                t
            }
        }
        Command::Simulate { gamma_th } => simulate_table(&p, spec, *gamma_th, &mut meta)?,
        Command::KsTable { .. } | Command::Figure { .. } => unreachable!("handled above"),
    };
    Ok((table, meta))
}

fn density_table(
    p: &IftrParams,
    mix: &GammaMixture,
    spec: &RunSpec,
    x_max: Option<f64>,
    points: usize,
    cumulative: bool,
) -> CliResult<Table> {
    if points < 2 {
        return Err(CliError::Validation(format!("points = {points} must be >= 2")));
    }
    let x_max = match x_max {
        Some(x) if x > 0.0 && x.is_finite() => x,
        Some(x) => return Err(CliError::Validation(format!("x_max = {x} must be > 0"))),
        None => *default_grid(p, spec.terms.saturating_sub(1), 2)?.last().unwrap_or(&1.0),
    };
    let name = if cumulative { "cdf" } else { "pdf" };
    let eval = |x: f64| if cumulative { mix.cdf(x) } else { mix.pdf(x) };
    let analytic = format!("{name}_analytic");
    if !spec.monte_carlo {
        let mut t = Table::new(&["x", &analytic]);
        for i in 0..points {
            let x = x_max * i as f64 / (points - 1) as f64;
            t.push(vec![x.into(), eval(x).into()]);
        }
        return Ok(t);
    }
    let samples = montecarlo::sample_snr(p, spec.samples, spec.seed)?;
    let mc_name = format!("{name}_mc");
    let mut t = Table::new(&["x", &analytic, &mc_name]);
    if cumulative {
        let grid: Vec<f64> = (0..points)
            .map(|i| x_max * i as f64 / (points - 1) as f64)
            .collect();
        let emp = montecarlo::empirical_cdf(&samples, &grid)?;
        for (x, e) in grid.iter().zip(emp) {
            t.push(vec![(*x).into(), eval(*x).into(), e.into()]);
        }
    } else {
        let h = montecarlo::empirical_pdf(&samples, points, x_max)?;
        for (x, d) in h.centres().into_iter().zip(&h.density) {
            t.push(vec![x.into(), eval(x).into(), (d * h.coverage).into()]);
        }
    }
    Ok(t)
}

fn ks_table(
    spec: &RunSpec,
    orders: &[usize],
    reference: usize,
    grid_points: usize,
    custom: bool,
    meta: &mut Meta,
) -> CliResult<Table> {
    let Some(&deepest) = orders.iter().max() else {
        return Err(CliError::Validation("ks-table needs at least one J".into()));
    };
    let rows: Vec<(f64, f64, f64, f64)> = if custom {
        vec![(spec.params.k, spec.params.m1, spec.params.m2, spec.params.delta)]
    } else {
        KS_TABLE_ROWS.to_vec()
    };
    let mut columns: Vec<String> = ["K", "m1", "m2", "delta"].iter().map(|s| s.to_string()).collect();
    columns.extend(orders.iter().map(|j| format!("ks_J{j}")));
    let mut t = Table {
        columns,
        rows: Vec::new(),
    };
    for (k, m1, m2, d) in rows {
        let p = IftrParams::new(spec.params.gamma_bar, m1, m2, k, d)?;
        let grid = default_grid(&p, reference, grid_points)?;
        mixture(&p, deepest + 1, meta)?;
        let mut row: Vec<Cell> = vec![k.into(), m1.into(), m2.into(), d.into()];
        for &j in orders {
            row.push(ks_truncation(&p, j, reference, &grid)?.into());
        }
        t.push(row);
    }
    Ok(t)
}

fn simulate_table(p: &IftrParams, spec: &RunSpec, gamma_th: f64, meta: &mut Meta) -> CliResult<Table> {
    if spec.samples < 1000 {
        return Err(CliError::Validation(format!(
            "samples = {} must be >= 1000",
            spec.samples
        )));
    }
    let mix = mixture(p, spec.terms, meta)?;
    let bpsk = ModulationSpec::bpsk();
    let samples = montecarlo::sample_snr(p, spec.samples, spec.seed)?;
    let n = samples.len() as f64;
    let mut t = Table::new(&["quantity", "simulated", "std_error", "analytic", "z"]);
    let mut push = |name: &str, sim: f64, se: f64, analytic: f64| {
        let z = if se > 0.0 { (sim - analytic).abs() / se } else { 0.0 };
        t.push(vec![name.into(), sim.into(), se.into(), analytic.into(), z.into()]);
    };
    let mean_of = |f: &dyn Fn(f64) -> f64| {
        let (s, s2) = samples
            .iter()
            .fold((0.0, 0.0), |acc, &x| (acc.0 + f(x), acc.1 + f(x) * f(x)));
        let mean = s / n;
        (mean, (((s2 - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt())
    };
    let (m, se) = mean_of(&|x| x);
    push("mean", m, se, moment_int(p, 1));
    let (m, se) = mean_of(&|x| x * x);
    push("second_moment", m, se, moment_int(p, 2));
    let (m, se) = mean_of(&|x| x.ln_1p() / std::f64::consts::LN_2);
    push("capacity", m, se, capacity_from_mixture(&mix)?);
    let (m, se) = mean_of(&|x| bpsk.conditional(x));
    push("ber_bpsk", m, se, ber_from_mixture(&mix, &bpsk));
    let (m, se) = mean_of(&|x| if x < gamma_th { 1.0 } else { 0.0 });
    push("outage", m, se, mix.cdf(gamma_th));
    let ks = montecarlo::ks_statistic(&samples, |x| mix.cdf(x))?;
    t.push(vec![
        "ks".into(),
        ks.into(),
        Cell::Num(f64::NAN),
        (1.63 / n.sqrt()).into(),
        Cell::Num(f64::NAN),
    ]);
    Ok(t)
}
