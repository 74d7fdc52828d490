use num_complex::Complex64;

use super::config::*;
use super::output::{Cell, RunOutput};
use crate::catalog::{BoundCatalog, ExperimentCatalog};
use crate::constants::{AMU, G_EARTH, HBAR, M_NUCLEON, R_C};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::grid::GridSpec;
use crate::measurement::{self, MeasurementSetup};
use crate::model::{CollapseModelParams, ModelKind};
use crate::noise::{substream, NoisePath};
use crate::qmupl::{self, GridSdeOptions, Hamiltonian, NaturalScales, QmuplRunConfig};
use crate::stats::{run_ensemble, Accumulator};
use crate::{bounds, csl, gravity, grw, interferometry};

pub(super) fn dispatch(config: &RunConfig) -> Result<RunOutput> {
    let n = config.n_trajectories;
    let seed = config.seed;
    match &config.parameters {
        Parameters::Qmupl(p) => qmupl_command(p, n, seed),
        Parameters::Measure(p) => measure_command(p, n, seed),
        Parameters::Grw(p) => grw_command(p, n, seed),
        Parameters::Csl(p) => csl_command(p),
        Parameters::Gravity(p) => gravity_command(p),
        Parameters::Interferometer(p) => interferometer_command(p),
        Parameters::Bounds(p) => bounds_command(p),
    }
}

struct QmuplRow {
    step: usize,
    t: f64,
    mean_q: f64,
    sigma_q: f64,
    mean_k: f64,
    sigma_k: f64,
}

fn qmupl_command(p: &QmuplParams, n: usize, seed: u64) -> Result<RunOutput> {
    let model = CollapseModelParams::new(ModelKind::Qmupl, p.lambda0, R_C, p.m0)?;
    let lambda = model.lambda_for_mass(p.mass);
    let omega = 2.0 * (HBAR * lambda / p.mass).sqrt();
    if !(omega > 0.0) || p.steps < 100 {
        return Err(Error::Config("qmupl needs lambda0 > 0 and at least 100 steps".into()));
    }
    let t_final = p.t_final_omega / omega;
    let si = QmuplRunConfig::new(p.mass, lambda, t_final, t_final / p.steps as f64, Hamiltonian::Free)?;
    let scales = NaturalScales {
        length: p.sigma0,
        time: 1.0 / omega,
        mass: p.mass,
    };
    let cfg = si.nondimensionalize(scales)?;
    let steps = cfg.n_steps();
    let record_every = p.record_every.max(1);
    let init = GaussianState::with_spread(1.0, 0.0, p.k0 * p.sigma0)?;

    let integrator = p.integrator.as_str();
    if integrator != "gaussian" && integrator != "grid" {
        return Err(Error::Config(format!("integrator must be 'gaussian' or 'grid', got '{integrator}'")));
    }
    let grid = GridSpec::centered(p.grid_half_width, p.grid_points)?;
    let psi0 = if integrator == "grid" { Some(init.to_grid(grid)?) } else { None };
    let options = GridSdeOptions {
        scheme: p.scheme,
        record_every,
        ..Default::default()
    };

    let runs = run_ensemble(n, |i| -> Result<Vec<QmuplRow>> {
        let noise = NoisePath::generate_stream(seed, substream(i, 0), cfg.dt, steps)?;
        match &psi0 {
            None => {
                let states = qmupl::propagate_gaussian(&cfg, init, &noise)?;
                Ok(states
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k % record_every == 0 || *k == steps)
                    .map(|(k, s)| QmuplRow {
                        step: k,
                        t: k as f64 * cfg.dt,
                        mean_q: s.x_mean,
                        sigma_q: s.sigma_q(),
                        mean_k: s.k_mean,
                        sigma_k: s.sigma_k(),
                    })
                    .collect())
            }
            Some(psi0) => {
                let tr = qmupl::integrate_grid_sde(&cfg, psi0, &noise, &options)?;
                Ok(tr
                    .samples
                    .iter()
                    .map(|s| QmuplRow {
                        step: s.step,
                        t: s.t,
                        mean_q: s.mean_q,
                        sigma_q: s.sigma_q,
                        mean_k: s.mean_k,
                        sigma_k: s.sigma_k,
                    })
                    .collect())
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let (l, t) = (scales.length, scales.time);
    let mut out = RunOutput::new(&["run", "step", "t", "mean_q", "sigma_q", "mean_p", "sigma_p"]);
    out.meta("units", "SI (s, m, kg m/s)");
    out.meta("nondim.length_unit", l);
    out.meta("nondim.time_unit", t);
    out.meta("nondim.hbar_over_m", cfg.hbar_over_m());
    out.meta("nondim.lambda", cfg.lambda);
    let mut final_sigma = Accumulator::new();
    let mut final_p = Accumulator::new();
    for (i, rows) in runs.iter().enumerate() {
        for r in rows {
            out.push(vec![
                i.into(),
                r.step.into(),
                (r.t * t).into(),
                (r.mean_q * l).into(),
                (r.sigma_q * l).into(),
                (HBAR * r.mean_k / l).into(),
                (HBAR * r.sigma_k / l).into(),
            ]);
        }
        if let Some(last) = rows.last() {
            final_sigma.push(last.sigma_q * l);
            final_p.push(HBAR * last.mean_k / l);
        }
    }
    let (sq, sp) = qmupl::asymptotic_spreads(p.mass, p.lambda0, p.m0)?;
    out.summary("omega", omega);
    out.summary("sigma_q_inf", sq);
    out.summary("sigma_p_inf", sp);
    out.summary("final_sigma_q_mean", final_sigma.mean());
    out.summary("final_mean_p_mean", final_p.mean());
    out.summary("final_mean_p_std_error", final_p.std_error());
    Ok(out)
}

fn measure_command(p: &MeasureParams, n: usize, seed: u64) -> Result<RunOutput> {
    let gamma0 = match p.gamma0 {
        Some(g) => g,
        None => measurement::gamma0_from_amplitudes(p.p_plus, 1.0 - p.p_plus)?,
    };
    let born = 0.5 * (1.0 + gamma0.tanh());
    let setup = MeasurementSetup::new(
        p.pointer_mass,
        p.kappa_hbar,
        p.t_interaction,
        Complex64::new(born.sqrt(), 0.0),
        Complex64::new((1.0 - born).sqrt(), 0.0),
        p.b,
    )?;
    let lambda = setup.lambda(p.lambda0, p.m0);
    let ens = measurement::run_hitting_ensemble(gamma0, p.b, p.ds, n, seed)?;
    let mut out = RunOutput::new(&["run", "outcome", "s_col", "t_col"]);
    out.meta("units", "s_col dimensionless, t_col in s");
    for (i, r) in ens.results.iter().enumerate() {
        let t_col = measurement::inverse_time_change(r.s_col, lambda, p.kappa_hbar, p.t_interaction)?;
        out.push(vec![i.into(), r.outcome.as_str().into(), r.s_col.into(), t_col.into()]);
    }
    let (pp, _) = measurement::collapse_probability(gamma0, p.b)?;
    out.summary("gamma0", gamma0);
    out.summary("p_plus", ens.p_plus);
    out.summary("p_plus_analytic", pp);
    out.summary("p_plus_sigma", crate::stats::binomial_sigma(pp, n));
    out.summary("mean_s", ens.mean_s);
    out.summary("mean_s_std_error", ens.std_s / (n as f64).sqrt());
    out.summary("mean_s_analytic", measurement::expected_collapse_s_from(gamma0, p.b)?);
    let chain = measurement::collapse_time_chain(&setup, p.lambda0, p.m0)?;
    out.summary("t_col_chain", chain.t_col);
    out.summary("separation_at_t_col", chain.separation);
    Ok(out)
}

fn grw_command(p: &GrwParams, n: usize, seed: u64) -> Result<RunOutput> {
    let hamiltonian = match p.hamiltonian.as_str() {
        "free" => grw::GrwHamiltonian::Free,
        "frozen" => grw::GrwHamiltonian::Frozen,
        other => return Err(Error::Config(format!("hamiltonian must be 'free' or 'frozen', got '{other}'"))),
    };
    let params = grw::GrwParams::new(p.lambda, p.r_c, p.n_particles)?;
    let cfg = grw::GrwRunConfig::new(p.t_final, p.sample_dt, p.hbar_over_m, hamiltonian)?;
    let grid = GridSpec::centered(p.grid_half_width, p.grid_points)?;
    let psi0 = grw::two_peak_state(grid, p.separation, p.sigma)?;
    let (x, y) = (-0.5 * p.separation, 0.5 * p.separation);
    let ens = grw::offdiagonal_ensemble(&psi0, &params, &cfg, x, y, n, seed)?;
    let mut out = RunOutput::new(&["run", "time", "center"]);
    for (i, jumps) in ens.jumps.iter().enumerate() {
        for j in jumps {
            out.push(vec![i.into(), j.time.into(), j.center.into()]);
        }
    }
    let counts: Accumulator = ens.jump_counts.iter().map(|&c| c as f64).collect();
    out.summary("mean_jumps", counts.mean());
    out.summary("expected_jumps", params.total_rate() * p.t_final);
    out.summary("offdiag_ratio_final", *ens.ratios.last().unwrap_or(&f64::NAN));
    out.summary("offdiag_rate_fitted", ens.fitted_rate());
    out.summary("offdiag_rate_analytic", grw::offdiag_decay_rate(x, y, params.total_rate(), p.r_c));
    Ok(out)
}

fn csl_command(p: &CslParams) -> Result<RunOutput> {
    let from_gamma = csl::CslParams::new(p.gamma, p.r_c)?.lambda();
    let lambda = p.lambda.unwrap_or(from_gamma);
    let mut out = RunOutput::new(&["n_per_cluster", "n_clusters", "lambda", "rate"]);
    for &size in &p.cluster_sizes {
        let rate = csl::cluster_rate(size, p.n_clusters, lambda)?;
        out.push(vec![size.into(), p.n_clusters.into(), lambda.into(), rate.into()]);
    }
    out.summary("lambda_from_gamma", from_gamma);
    Ok(out)
}

fn gravity_command(p: &GravityParams) -> Result<RunOutput> {
    let grid = bounds::log_grid(p.mass_min, p.mass_max, p.points)?;
    let mut out = RunOutput::new(&[
        "mass",
        "radius",
        "a_c",
        "a_c_regime",
        "tau_c",
        "l_crit",
        "l_crit_regime",
        "sn_width",
        "threshold_spread",
    ]);
    for m in grid {
        let body = gravity::BodySpec::sphere(m, (m / (4.0 / 3.0 * std::f64::consts::PI * p.density)).cbrt())?;
        let cell = gravity::coherence_cell(&body);
        let l = gravity::diosi_critical_length(&body);
        let regime = |r: gravity::Regime| -> Cell {
            match r {
                gravity::Regime::Micro => "micro".into(),
                gravity::Regime::Transition => "transition".into(),
                gravity::Regime::Macro => "macro".into(),
            }
        };
        out.push(vec![
            m.into(),
            body.radius.into(),
            cell.value.into(),
            regime(cell.regime),
            gravity::reduction_time(m, cell.value)?.into(),
            l.value.into(),
            regime(l.regime),
            gravity::sn_ground_width(m)?.into(),
            gravity::threshold_widths(m)?.spread().into(),
        ]);
    }
    let tr = gravity::karolyhazy_transition(p.density)?;
    out.summary("transition_a", tr.a_tr);
    out.summary("transition_tau", tr.tau_tr);
    out.summary("transition_mass", tr.m_tr);
    Ok(out)
}

fn interferometer_command(p: &InterferometerParams) -> Result<RunOutput> {
    let mut out = RunOutput::new(&[
        "mass_amu",
        "lambda_db",
        "talbot_length",
        "fall_speed",
        "collapse_rate",
        "visibility",
    ]);
    for &m_amu in &p.masses_amu {
        let m = m_amu * AMU;
        let ldb = interferometry::de_broglie_wavelength(m, p.velocity)?;
        let lt = interferometry::talbot_length(p.grating_period, ldb)?;
        let nucleons = (m / M_NUCLEON).round().max(1.0) as u64;
        let rate = csl::cluster_rate(nucleons, 1, p.lambda)?;
        out.push(vec![
            m_amu.into(),
            ldb.into(),
            lt.into(),
            interferometry::free_fall_speed(lt, G_EARTH)?.into(),
            rate.into(),
            interferometry::visibility_damping(rate, p.flight_time)?.into(),
        ]);
    }
    let lim = interferometry::tli_gravity_limit_earth(p.grating_period, p.velocity)?;
    out.summary("tli_max_mass_amu", lim.max_mass / AMU);
    out.summary("tli_talbot_length", lim.talbot_length);
    out.summary("tli_fall_speed", lim.fall_speed);
    let catalog = match &p.catalog {
        Some(path) => ExperimentCatalog::from_path(std::path::Path::new(path))?,
        None => ExperimentCatalog::builtin(),
    };
    for e in &catalog.experiments {
        let b = interferometry::interferometric_bound(e.nucleon_count, e.superposition_time)?;
        out.summary(&format!("bound[{}]", e.name), b);
    }
    Ok(out)
}

fn bounds_command(p: &BoundsParams) -> Result<RunOutput> {
    let catalog = match &p.catalog {
        Some(path) => BoundCatalog::from_path(std::path::Path::new(path))?,
        None => BoundCatalog::builtin(),
    };
    match p.view.as_str() {
        "table1" => {
            let mut columns = vec!["name".to_string(), "lambda_max".into(), "category".into()];
            for r in &catalog.references {
                columns.push(format!("distance_{}", r.name));
            }
            let cols: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
            let mut out = RunOutput::new(&cols);
            for row in bounds::bounds_table(&catalog)? {
                let mut cells: Vec<Cell> = vec![
                    row.name.into(),
                    row.lambda_max.into(),
                    match row.category {
                        crate::catalog::BoundCategory::Laboratory => "laboratory".into(),
                        crate::catalog::BoundCategory::Cosmological => "cosmological".into(),
                    },
                ];
                cells.extend(row.distances.iter().map(|d| Cell::Text(d.to_string())));
                out.push(cells);
            }
            for r in &catalog.references {
                out.summary(&format!("reference_{}", r.name), r.lambda);
            }
            Ok(out)
        }
        "map" => {
            let grid = bounds::log_grid(p.lambda_min, p.lambda_max, p.points)?;
            let mut columns = vec!["lambda".to_string(), "status".into(), "excluded_by".into(), "n_exceeded".into()];
            for r in &catalog.references {
                columns.push(format!("orders_from_{}", r.name));
            }
            let cols: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
            let mut out = RunOutput::new(&cols);
            for pt in bounds::exclusion_map(&catalog.bounds, &grid, &catalog.references)? {
                let (status, by) = match &pt.status {
                    bounds::ExclusionStatus::Allowed => ("allowed", String::new()),
                    bounds::ExclusionStatus::ExcludedBy(name) => ("excluded", name.clone()),
                };
                let mut cells: Vec<Cell> = vec![pt.lambda.into(), status.into(), by.into(), pt.n_exceeded.into()];
                cells.extend(pt.reference_orders.iter().map(|&o| Cell::Int(o as i64)));
                out.push(cells);
            }
            Ok(out)
        }
        other => Err(Error::Config(format!("bounds view must be 'table1' or 'map', got '{other}'"))),
    }
}
