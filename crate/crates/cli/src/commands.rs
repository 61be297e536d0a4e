//! The `potential`, `propagator` and `green` subcommands.

use rayon::prelude::*;
use std::time::Instant;

use susy_core::darboux::{transformed_potential, Action, BaseModel, DarbouxChain};
use susy_core::jets::BasisFunction;
use susy_core::oracle::{extrapolated_spectral_kernel, fd_eigensolve, spectral_kernel, EigenSystem, GridSpec};
use susy_core::propagators::{
    base_kernel, box_green, free_green, general_poly_kernel, spectral_green, theorem3_kernel, theorem4_kernel, Branch,
    ClosedKernel, ComplexTime, GreenFn, PartialFractions, Side,
};
use susy_core::{Complex64, Error};

use crate::config::{LoadedConfig, Route};
use crate::table::{fmt_f64, ResultTable};
use crate::{CliError, VERSION};

/// Options shared by every table-producing command.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub reproducible: bool,
}

type Evaluator = Box<dyn Fn(f64, f64, ComplexTime) -> susy_core::Result<Complex64> + Send + Sync>;

fn header(table: &mut ResultTable, command: &str, cfg: &LoadedConfig, run: RunOptions) {
    table.meta("program", "susyprop");
    table.meta("version", VERSION);
    table.meta("command", command);
    table.meta("config_sha256", &cfg.hash);
    table.meta("seed", run.seed);
    table.meta("base_model", format!("{:?}", cfg.config.base_model()));
    table.meta("chain", describe_chain(cfg.chain.as_ref()));
}

fn footer(table: &mut ResultTable, started: Instant, run: RunOptions) {
    table.meta("rows", table.rows.len());
    table.meta("flagged_rows", table.flagged());
    if !run.reproducible {
        table.meta("runtime_s", format!("{:.3}", started.elapsed().as_secs_f64()));
    }
}

pub fn describe_chain(chain: Option<&DarbouxChain>) -> String {
    let Some(chain) = chain else { return "none".into() };
    chain
        .functions()
        .iter()
        .zip(chain.actions())
        .map(|(f, a)| {
            let f = match f {
                BasisFunction::TrigBox { n } => format!("trig_box(n={n})"),
                BasisFunction::Cosh { a, b } => format!("cosh(a={a},b={b})"),
                BasisFunction::Sinh { a, b } => format!("sinh(a={a},b={b})"),
                BasisFunction::HermiteGaussian { k } => format!("hermite_gaussian(k={k})"),
                BasisFunction::PlaneExp { sign, a } => format!("plane_exp(sign={sign},a={a})"),
                other => format!("{other:?}"),
            };
            let a = match a {
                Action::RemoveLevel => "remove",
                Action::CreateLevel => "create",
                Action::Isospectral => "isospectral",
            };
            format!("{f}:{a}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn flag_of(e: &Error) -> String {
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::Argument(_) => "argument",
        Error::Degenerate(_) => "degenerate",
        Error::NodelessViolation { .. } => "nodeless",
        Error::ConditionViolation(_) => "condition",
        Error::Singularity(_) => "singularity",
        Error::Convergence(_) => "convergence",
        Error::Configuration(_) => "configuration",
        Error::Pole { .. } => "pole",
    };
    format!("{kind}: {e}")
}

/// `V_N(x)` on the x-range of the window.
pub fn cmd_potential(cfg: &LoadedConfig, run: RunOptions) -> Result<ResultTable, CliError> {
    let started = Instant::now();
    let model = cfg.config.base_model();
    let xs = cfg.config.xs();
    let values: Vec<susy_core::Result<f64>> = xs
        .par_iter()
        .map(|&x| match &cfg.chain {
            Some(chain) => transformed_potential(chain, x),
            None => Ok(model.potential(x)),
        })
        .collect();
    let mut table = ResultTable::new(&["x", "v"]);
    header(&mut table, "potential", cfg, run);
    for (x, v) in xs.iter().zip(values) {
        match v {
            Ok(v) => table.push(vec![*x, v], String::new()),
            Err(e) => table.push(vec![*x, f64::NAN], flag_of(&e)),
        }
    }
    footer(&mut table, started, run);
    Ok(table)
}

fn is_lowest_deletion(chain: &DarbouxChain) -> bool {
    let mut alphas = chain.alphas().to_vec();
    alphas.sort_by(f64::total_cmp);
    chain.actions().iter().all(|a| *a == Action::RemoveLevel)
        && alphas == chain.base_model().point_spectrum(chain.len())
}

const ROUTES: &str = "closed: empty chain, box without its ground level, oscillator pairs (k, k+1), transparent \
cosh/sinh chains; theorem: any admissible chain on the box or free line, deletions on the oscillator; \
oracle: any chain, Wick time only";

fn closed_evaluator(model: BaseModel, chain: Option<&DarbouxChain>) -> Result<Evaluator, CliError> {
    match chain {
        None => {
            let k = base_kernel(model);
            Ok(Box::new(move |x, y, t| k.eval(x, y, t)))
        }
        Some(chain) => {
            let k = ClosedKernel::for_chain(chain)
                .map_err(|e| CliError::Config(format!("{e}; routes available: {ROUTES}")))?;
            Ok(Box::new(move |x, y, t| susy_core::propagators::Kernel::eval(&k, x, y, t)))
        }
    }
}

fn theorem_evaluator(cfg: &LoadedConfig) -> Result<Evaluator, CliError> {
    let model = cfg.config.base_model();
    let opts = cfg.config.theorem_options();
    let Some(chain) = cfg.chain.clone() else {
        let k = base_kernel(model);
        return Ok(Box::new(move |x, y, t| k.eval(x, y, t)));
    };
    let k0 = base_kernel(model);
    if is_lowest_deletion(&chain) || (model == BaseModel::Oscillator && chain.actions().iter().all(|a| *a == Action::RemoveLevel)) {
        return Ok(Box::new(move |x, y, t| theorem3_kernel(k0.as_ref(), &chain, x, y, t, Branch::Lower, opts)));
    }
    let one_sided: Option<Vec<Side>> = chain
        .functions()
        .iter()
        .zip(chain.actions())
        .map(|(f, a)| match (f, a) {
            (BasisFunction::PlaneExp { sign, .. }, Action::Isospectral) => {
                Some(if *sign > 0 { Side::Lower } else { Side::Upper })
            }
            _ => None,
        })
        .collect();
    if let Some(sides) = one_sided {
        return Ok(Box::new(move |x, y, t| theorem4_kernel(k0.as_ref(), &chain, &sides, x, y, t, opts)));
    }
    if model == BaseModel::Oscillator {
        return Err(CliError::Config(format!("no theorem route for this oscillator chain; routes available: {ROUTES}")));
    }
    Ok(Box::new(move |x, y, t| general_poly_kernel(k0.as_ref(), Some(&chain), x, y, t, PartialFractions::NMinusJ, opts)))
}

/// Finite-difference spectrum of `h_N` on the configured grid, with the
/// half-spacing companion when Richardson extrapolation is on.
pub struct OracleSpectrum {
    pub coarse: EigenSystem,
    pub fine: Option<EigenSystem>,
}

pub fn oracle_spectrum(cfg: &LoadedConfig) -> Result<OracleSpectrum, CliError> {
    let model = cfg.config.base_model();
    let o = &cfg.config.oracle;
    let (interval, default_states) = match model {
        BaseModel::Box => ([0.0, 1.0], 400),
        BaseModel::FreeLine => ([-25.0, 25.0], 1200),
        BaseModel::Oscillator => ([-12.0, 12.0], 600),
    };
    let interval = o.interval.unwrap_or(interval);
    let states = o.states.unwrap_or(default_states);
    let chain = cfg.chain.clone();
    let v = move |x: f64| match &chain {
        Some(c) => transformed_potential(c, x).unwrap_or(f64::NAN),
        None => model.potential(x),
    };
    let solve = |h: f64| -> Result<EigenSystem, CliError> {
        let grid = GridSpec::with_spacing(interval[0], interval[1], h).map_err(CliError::from_core)?;
        let states = states.min(grid.n_points().saturating_sub(2));
        fd_eigensolve(&v, grid, states).map_err(CliError::from_core)
    };
    let coarse = solve(o.h)?;
    let fine = if o.richardson { Some(solve(o.h / 2.0)?) } else { None };
    Ok(OracleSpectrum { coarse, fine })
}

fn oracle_evaluator(cfg: &LoadedConfig) -> Result<Evaluator, CliError> {
    let spec = oracle_spectrum(cfg)?;
    Ok(Box::new(move |x, y, t| {
        if t.real_part() != 0.0 {
            return Err(Error::Domain("the spectral oracle needs pure Wick time".into()));
        }
        match &spec.fine {
            Some(fine) => extrapolated_spectral_kernel(&spec.coarse, fine, x, y, t.wick_part()),
            None => spectral_kernel(&spec.coarse, x, y, t.wick_part()),
        }
    }))
}

fn evaluator(cfg: &LoadedConfig, route: Route) -> Result<Evaluator, CliError> {
    if route == Route::Oracle && cfg.config.time()?.real_part() != 0.0 {
        return Err(CliError::Config("the oracle route needs time.real = 0".into()));
    }
    match route {
        Route::Closed => closed_evaluator(cfg.config.base_model(), cfg.chain.as_ref()),
        Route::Theorem => theorem_evaluator(cfg),
        Route::Oracle => oracle_evaluator(cfg),
    }
}

fn grid_eval(f: &Evaluator, xs: &[f64], ys: &[f64], t: ComplexTime) -> Vec<susy_core::Result<Complex64>> {
    // rows in parallel, flattened back in x-major order
    xs.par_iter()
        .map(|&x| ys.iter().map(|&y| f(x, y, t)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// `K(x, y; t)` on the window grid via the selected route.
pub fn cmd_propagator(cfg: &LoadedConfig, route: Route, run: RunOptions) -> Result<ResultTable, CliError> {
    let started = Instant::now();
    let t = cfg.config.time()?;
    let xs = cfg.config.xs();
    let ys = cfg.config.ys()?;
    let primary = evaluator(cfg, route)?;
    let values = grid_eval(&primary, &xs, &ys, t);
    let mut table = ResultTable::new(&["x", "y", "re_k", "im_k", "abs_k"]);
    header(&mut table, "propagator", cfg, run);
    table.meta("route", route.name());
    table.meta("time", format!("{} - {}i", fmt_f64(t.real_part()), fmt_f64(t.wick_part())));
    let mut k = 0;
    for &x in &xs {
        for &y in &ys {
            match &values[k] {
                Ok(v) => table.push(vec![x, y, v.re, v.im, v.norm()], String::new()),
                Err(e) => table.push(vec![x, y, f64::NAN, f64::NAN, f64::NAN], flag_of(e)),
            }
            k += 1;
        }
    }
    if let Some(other) = cfg.config.method.compare {
        let second = evaluator(cfg, other)?;
        let reference = grid_eval(&second, &xs, &ys, t);
        let mut worst: f64 = 0.0;
        let mut failed = 0;
        for (a, b) in values.iter().zip(&reference) {
            match (a, b) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).norm() / b.norm()),
                _ => failed += 1,
            }
        }
        table.meta("compare_route", other.name());
        table.meta("max_rel_deviation", fmt_f64(worst));
        table.meta("compare_failed_points", failed);
    }
    footer(&mut table, started, run);
    Ok(table)
}

/// `G(x, y; E)` of the base model (closed route) or of `h_N` from the
/// finite-difference spectrum (oracle route).
pub fn cmd_green(cfg: &LoadedConfig, route: Route, run: RunOptions) -> Result<ResultTable, CliError> {
    let started = Instant::now();
    let g = cfg.config.green.ok_or_else(|| CliError::Config("missing [green] section".into()))?;
    let e = Complex64::new(g.energy, g.energy_im);
    let model = cfg.config.base_model();
    let xs = cfg.config.xs();
    let ys = cfg.config.ys()?;
    let f: Box<dyn Fn(f64, f64) -> susy_core::Result<Complex64> + Send + Sync> = match route {
        Route::Closed => {
            if cfg.chain.is_some() {
                return Err(CliError::Config(
                    "the closed Green function is that of the base model; drop [[chain]] or use the oracle route".into(),
                ));
            }
            match (model, g.regularized_level) {
                (BaseModel::FreeLine, None) => Box::new(move |x, y| free_green(x, y, e)),
                (BaseModel::Box, None) => Box::new(move |x, y| box_green(x, y, e)),
                (BaseModel::Box, Some(level)) => {
                    let gf = GreenFn::box_regularized(level);
                    Box::new(move |x, y| gf.eval(x, y))
                }
                _ => return Err(CliError::Config(format!("no closed Green function for {model:?} with this setting"))),
            }
        }
        Route::Oracle => {
            let spec = oracle_spectrum(cfg)?;
            let exclude = g.regularized_level;
            Box::new(move |x, y| spectral_green(&spec.coarse, x, y, e, exclude))
        }
        Route::Theorem => return Err(CliError::Config("green supports the closed and oracle routes".into())),
    };
    let values: Vec<susy_core::Result<Complex64>> = xs
        .par_iter()
        .map(|&x| ys.iter().map(|&y| f(x, y)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut table = ResultTable::new(&["x", "y", "re_g", "im_g", "abs_g"]);
    header(&mut table, "green", cfg, run);
    table.meta("route", route.name());
    table.meta("energy", format!("{} + {}i", fmt_f64(e.re), fmt_f64(e.im)));
    let mut k = 0;
    for &x in &xs {
        for &y in &ys {
            match &values[k] {
                Ok(v) => table.push(vec![x, y, v.re, v.im, v.norm()], String::new()),
                Err(err) => table.push(vec![x, y, f64::NAN, f64::NAN, f64::NAN], flag_of(err)),
            }
            k += 1;
        }
    }
    footer(&mut table, started, run);
    Ok(table)
}
