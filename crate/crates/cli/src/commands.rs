use std::f64::consts::PI;

use anyhow::{ensure, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqlaser::lindblad::{
    build_liouvillian, spectrum_from_liouvillian, steady_density, validate_effective_with, DensityMatrix, FockConfig,
    MIN_STEPS_PER_PERIOD,
};
use sqlaser::numerics::ComplexMatrix;
use sqlaser::quadrature::minimum_variance;
use sqlaser::spectrum::half_width;
use sqlaser::{
    assemble, closed_form_steady, elastic_weight, incoherent_closed_form, incoherent_regression, squeezing_spectrum,
    variance_closed_form, variance_from_moments, variance_minus, CouplingMode, DressedParams, Moment, MomentVector,
    RegressionSubsystem, SystemParams,
};

use crate::config::{drive_for, RunConfig, VarianceAxis};
use crate::table::ResultTable;

const ALL_MODES: [CouplingMode; 2] = [CouplingMode::NonSecular, CouplingMode::Secular];

/// A finished command: its table and whether every check it ran passed.
pub struct Outcome {
    pub table: ResultTable,
    pub success: bool,
    pub summary: String,
}

impl Outcome {
    fn ok(table: ResultTable, summary: String) -> Self {
        Self { table, success: true, summary }
    }
}

fn mode_key(mode: CouplingMode) -> &'static str {
    match mode {
        CouplingMode::NonSecular => "nonsecular",
        CouplingMode::Secular => "secular",
    }
}

fn header(config: &RunConfig, command: &str) -> ResultTable {
    let mut t = ResultTable::new(&config.to_toml());
    t.meta("command", command);
    t.meta("version", env!("CARGO_PKG_VERSION"));
    t
}

fn describe_dressed(t: &mut ResultTable, d: &DressedParams) {
    let m = mode_key(d.mode);
    for (k, v) in [
        ("omega", d.omega),
        ("phi", d.phi),
        ("g1", d.g1),
        ("g2", d.g2),
        ("gamma0", d.gamma0),
        ("gamma_plus", d.gamma_plus),
        ("gamma_minus", d.gamma_minus),
        ("gamma1", d.gamma1),
        ("gamma2", d.gamma2),
        ("cavity_shift", d.cavity_shift()),
        ("two_photon", d.two_photon()),
    ] {
        t.meta_float(format!("{m}.{k}"), v);
    }
}

struct Resolved {
    params: SystemParams,
    dressed: Vec<DressedParams>,
}

fn resolve(config: &RunConfig, t: &mut ResultTable) -> Result<Resolved> {
    let params = config.system_params()?;
    let dressed = config.mode.modes().iter().map(|&m| config.dressed(&params, m)).collect::<Result<Vec<_>>>()?;
    for d in &dressed {
        describe_dressed(t, d);
    }
    Ok(Resolved { params, dressed })
}

fn find(dressed: &[DressedParams], mode: CouplingMode) -> Option<&DressedParams> {
    dressed.iter().find(|d| d.mode == mode)
}

fn argmax(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let i = (0..ys.len()).fold(0, |b, i| if ys[i] > ys[b] { i } else { b });
    (xs[i], ys[i])
}

fn moment_parts(m: Option<&MomentVector>, part: fn(Complex64) -> f64) -> Vec<Option<f64>> {
    Moment::ALL.iter().map(|&k| m.map(|m| part(m[k]))).collect()
}

pub fn steady(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "steady");
    let r = resolve(config, &mut t)?;
    let dc = r.params.delta_c;
    t.labels("moment", Moment::ALL.iter().map(|m| m.name().to_string()).collect());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let (exact, closed, oracle) = match find(&r.dressed, mode) {
            Some(d) => {
                let exact = assemble(d, dc).steady_state()?;
                let closed = if dc == 0.0 { Some(closed_form_steady(d, dc)?) } else { None };
                let oracle = match config.n_max {
                    Some(n) => {
                        let l = build_liouvillian(d, dc, FockConfig::new(n)?)?;
                        Some(l.moments(&steady_density(&l)?))
                    }
                    None => None,
                };
                t.meta_float(format!("{key}.photon_number"), exact.photon_number());
                summary.push(format!("{key} <a^dag a> = {:.6}", exact.photon_number()));
                (Some(exact), closed, oracle)
            }
            None => (None, None, None),
        };
        for (name, m) in [("exact", &exact), ("closed", &closed), ("oracle", &oracle)] {
            t.numbers(format!("{name}_re_{key}"), moment_parts(m.as_ref(), |z| z.re));
            t.numbers(format!("{name}_im_{key}"), moment_parts(m.as_ref(), |z| z.im));
        }
    }
    Ok(Outcome::ok(t, summary.join(", ")))
}

pub fn scan_detuning(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "scan-detuning");
    let r = resolve(config, &mut t)?;
    let grid = config.grid(-1.0, 1.0);
    t.dense("delta_c", grid.clone());
    let mut peaks = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let column = match find(&r.dressed, mode) {
            Some(d) => {
                let n = grid.iter().map(|&dc| Ok(assemble(d, dc).steady_state()?.photon_number())).collect::<Result<Vec<_>>>()?;
                let (at, peak) = argmax(&grid, &n);
                t.meta_float(format!("{key}.argmax_delta_c"), at);
                t.meta_float(format!("{key}.peak_photon_number"), peak);
                peaks.push((key, at, peak));
                n.into_iter().map(Some).collect()
            }
            None => vec![None; grid.len()],
        };
        t.numbers(format!("photon_number_{key}"), column);
    }
    if let [(_, _, a), (_, _, b)] = peaks[..] {
        t.meta_float("peak_ratio", a / b);
    }
    let summary = peaks.iter().map(|(k, at, p)| format!("{k} peak {p:.6} at delta_c = {at:+.4}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome::ok(t, summary))
}

pub fn variance(config: &RunConfig) -> Result<Outcome> {
    match config.variance_axis {
        VarianceAxis::Theta => variance_theta(config),
        VarianceAxis::DriveRatio => variance_drive(config),
    }
}

fn variance_theta(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "variance");
    let r = resolve(config, &mut t)?;
    let dc = r.params.delta_c;
    let grid = config.grid(0.0, PI);
    t.dense("theta", grid.clone());
    t.dense("theta_over_pi", grid.iter().map(|x| x / PI).collect());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let n = grid.len();
        let (mut plus, mut minus, mut closed) = (vec![None; n], vec![None; n], vec![None; n]);
        if let Some(d) = find(&r.dressed, mode) {
            let m = assemble(d, dc).steady_state()?;
            let closed_ok = dc == 0.0 && r.params.delta_a == 0.0;
            for (i, &th) in grid.iter().enumerate() {
                plus[i] = Some(variance_from_moments(&m, th)?.value);
                minus[i] = Some(variance_minus(&m, th)?.value);
                if closed_ok {
                    closed[i] = Some(variance_closed_form(d, th)?.value);
                }
            }
            let e = minimum_variance(&m)?;
            t.meta_float(format!("{key}.minimum_theta"), e.theta);
            t.meta_float(format!("{key}.minimum_variance"), e.value);
            summary.push(format!("{key} minimum {:.6} at theta = {:.4}", e.value, e.theta));
        }
        t.numbers(format!("variance_plus_{key}"), plus);
        t.numbers(format!("variance_minus_{key}"), minus);
        t.numbers(format!("closed_form_{key}"), closed);
    }
    Ok(Outcome::ok(t, summary.join(", ")))
}

fn variance_drive(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "variance");
    let omega = config.omega.context("the drive_ratio axis needs `omega`")?;
    let theta = config.require_theta()?;
    let base = resolve(config, &mut t)?.params;
    let ratios = config.grid(0.1, 10.0);
    ensure!(ratios[0] >= 0.0, "drive ratio must be >= 0");
    let detunings = config.detunings();
    let rows = ratios.len() * detunings.len();
    let (mut dc_col, mut ratio_col, mut eps_col, mut da_col) =
        (Vec::with_capacity(rows), Vec::with_capacity(rows), Vec::with_capacity(rows), Vec::with_capacity(rows));
    for &dc in &detunings {
        for &x in &ratios {
            let (eps, da) = SystemParams::drive_for_ratio(omega, x);
            dc_col.push(dc);
            ratio_col.push(x);
            eps_col.push(eps);
            da_col.push(da);
        }
    }
    t.dense("delta_c", dc_col.clone());
    t.dense("drive_ratio", ratio_col);
    t.dense("epsilon", eps_col.clone());
    t.dense("delta_a", da_col.clone());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let column = if config.mode.modes().contains(&mode) {
            let mut values = Vec::with_capacity(rows);
            for i in 0..rows {
                let p = SystemParams { epsilon: eps_col[i], delta_a: da_col[i], delta_c: dc_col[i], ..base };
                let d = config.dressed(&p, mode)?;
                values.push(variance_from_moments(&assemble(&d, p.delta_c).steady_state()?, theta)?.value);
            }
            for (j, dc) in detunings.iter().enumerate() {
                let last = values[(j + 1) * ratios.len() - 1];
                t.meta_float(format!("{key}.saturated[{dc}]"), last);
                summary.push(format!("{key} delta_c = {dc}: {last:.6}"));
            }
            let worst = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            t.meta_float(format!("{key}.largest_variance"), worst);
            values.into_iter().map(Some).collect()
        } else {
            vec![None; rows]
        };
        t.numbers(format!("variance_{key}"), column);
    }
    Ok(Outcome::ok(t, format!("variance at largest drive ratio: {}", summary.join(", "))))
}

pub fn spectrum(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "spectrum");
    let r = resolve(config, &mut t)?;
    let grid = config.grid(-1.0, 1.0);
    let detunings = config.detunings();
    let rows = grid.len() * detunings.len();
    t.dense("delta_c", detunings.iter().flat_map(|&dc| std::iter::repeat(dc).take(grid.len())).collect());
    t.dense("delta", detunings.iter().flat_map(|_| grid.iter().copied()).collect());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let (mut s, mut elastic, mut closed) = (vec![None; rows], vec![None; rows], vec![None; rows]);
        if let Some(d) = find(&r.dressed, mode) {
            for (j, &dc) in detunings.iter().enumerate() {
                let m = assemble(d, dc).steady_state()?;
                let values = incoherent_regression(d, dc, &m, &grid)?.values;
                let cf = if dc == 0.0 { Some(incoherent_closed_form(d, dc, &m, &grid)?.values) } else { None };
                let w = elastic_weight(&m);
                for i in 0..grid.len() {
                    let k = j * grid.len() + i;
                    s[k] = Some(values[i]);
                    elastic[k] = Some(w);
                    closed[k] = cf.as_ref().map(|c| c[i]);
                }
                let sub = RegressionSubsystem::new(d, dc, &m);
                let (center, peak) = argmax(&grid, &values);
                let hw = half_width(|x| sub.incoherent(x).unwrap_or(f64::NAN), center, 1e3 * d.kappa);
                t.meta_float(format!("{key}.peak_delta[{dc}]"), center);
                t.meta_float(format!("{key}.peak[{dc}]"), peak);
                if let Some(hw) = hw {
                    t.meta_float(format!("{key}.hwhm[{dc}]"), hw);
                }
                summary.push(format!("{key} delta_c = {dc}: peak {peak:.4e}"));
            }
        }
        t.numbers(format!("s_in_{key}"), s);
        t.numbers(format!("elastic_{key}"), elastic);
        t.numbers(format!("closed_form_{key}"), closed);
    }
    Ok(Outcome::ok(t, summary.join(", ")))
}

pub fn squeezing(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "squeezing");
    let r = resolve(config, &mut t)?;
    let theta = config.require_theta()?;
    let dc = r.params.delta_c;
    let grid = config.grid(-1.0, 1.0);
    t.dense("delta", grid.clone());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let n = grid.len();
        let (mut s, mut xp, mut xm) = (vec![None; n], vec![None; n], vec![None; n]);
        if let Some(d) = find(&r.dressed, mode) {
            let m = assemble(d, dc).steady_state()?;
            let inc = incoherent_regression(d, dc, &m, &grid)?.values;
            let (plus, minus) = squeezing_spectrum(d, dc, &m, theta, &grid)?;
            let max_plus = plus.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            t.meta_float(format!("{key}.max_x_plus"), max_plus);
            summary.push(format!("{key} max X+ = {max_plus:.4e}"));
            for i in 0..n {
                s[i] = Some(inc[i]);
                xp[i] = Some(plus.values[i]);
                xm[i] = Some(minus.values[i]);
            }
        }
        t.numbers(format!("s_in_{key}"), s);
        t.numbers(format!("x_plus_{key}"), xp);
        t.numbers(format!("x_minus_{key}"), xm);
    }
    Ok(Outcome::ok(t, summary.join(", ")))
}

fn random_density(fock: FockConfig, cutoff: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let d = fock.dim();
    let inside = |i: usize| i % fock.levels() <= cutoff;
    let g = ComplexMatrix::from_fn(d, d, |i, j| {
        if inside(i) && inside(j) {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(DensityMatrix::from_factor(&g)?)
}

pub fn oracle_check(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "oracle-check");
    let r = resolve(config, &mut t)?;
    let dc = r.params.delta_c;
    let fock = FockConfig::new(config.n_max.unwrap_or(25))?;
    let tol_m = config.tol_moments.unwrap_or(1e-6);
    let tol_s = config.tol_spectrum.unwrap_or(1e-4);
    let tol_c = config.tol_closure.unwrap_or(1e-10);
    let samples = config.closure_samples.unwrap_or(20);
    let grid = config.grid(-4.0, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));

    let (mut names, mut modes, mut devs, mut tols) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut push = |name: &str, mode: CouplingMode, dev: f64, tol: f64| {
        names.push(name.to_string());
        modes.push(mode_key(mode).to_string());
        devs.push(dev);
        tols.push(tol);
    };
    for d in &r.dressed {
        let exact = assemble(d, dc).steady_state()?;
        let l = build_liouvillian(d, dc, fock)?;
        push("trace_preservation", d.mode, l.trace_preservation_error(), 1e-12);
        let rho = steady_density(&l)?;
        push("moments_oracle", d.mode, l.moments(&rho).max_relative_difference(&exact), tol_m);
        let regression = incoherent_regression(d, dc, &exact, &grid)?.values;
        let peak = regression.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let oracle = spectrum_from_liouvillian(&l, &rho, &grid)?.values;
        let dev = oracle.iter().zip(&regression).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        push("spectrum_oracle", d.mode, if peak > 0.0 { dev / peak } else { dev }, tol_s);
        let sys = assemble(d, dc);
        let mut closure: f64 = 0.0;
        for _ in 0..samples {
            closure = closure.max(l.closure_residual(&sys, &random_density(fock, fock.n_max / 2, &mut rng)?));
        }
        push("moment_closure", d.mode, closure, tol_c);
        if dc == 0.0 {
            push("moments_closed_form", d.mode, closed_form_steady(d, dc)?.max_relative_difference(&exact), tol_m);
            let cf = incoherent_closed_form(d, dc, &exact, &grid)?.values;
            let dev = cf.iter().zip(&regression).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            push("spectrum_closed_form", d.mode, if peak > 0.0 { dev / peak } else { dev }, tol_s);
        }
    }
    let pass: Vec<bool> = devs.iter().zip(&tols).map(|(d, t)| d <= t).collect();
    let failed = pass.iter().filter(|p| !**p).count();
    t.meta("n_max", fock.n_max);
    t.meta("failed", failed);
    t.labels("check", names);
    t.labels("mode", modes);
    t.dense("deviation", devs);
    t.dense("tolerance", tols);
    t.dense("pass", pass.iter().map(|&p| if p { 1.0 } else { 0.0 }).collect());
    let summary = format!("{} of {} checks passed at n_max = {}", pass.len() - failed, pass.len(), fock.n_max);
    Ok(Outcome { table: t, success: failed == 0, summary })
}

pub fn validate_effective(config: &RunConfig) -> Result<Outcome> {
    let mut t = header(config, "validate-effective");
    let base = resolve(config, &mut t)?.params;
    let omegas = config.omegas.clone().unwrap_or_else(|| vec![25.0, 50.0, 100.0]);
    let fock = FockConfig::new(config.n_max.unwrap_or(10))?;
    let t_final = config.t_final.unwrap_or(3.0);
    let per_period = config.steps_per_period.unwrap_or(MIN_STEPS_PER_PERIOD);
    t.dense("omega", omegas.clone());
    t.dense("g_over_omega", omegas.iter().map(|w| base.g / w).collect());
    let mut summary = Vec::new();
    for mode in ALL_MODES {
        let key = mode_key(mode);
        let n = omegas.len();
        let (mut disc, mut steps) = (vec![None; n], vec![None; n]);
        if config.mode.modes().contains(&mode) {
            for (i, &w) in omegas.iter().enumerate() {
                let p = SystemParams { epsilon: drive_for(w, base.delta_a)?, ..base };
                let d = config.dressed(&p, mode)?;
                let report = validate_effective_with(&d, &p, fock, t_final, per_period)?;
                disc[i] = Some(report.max_discrepancy);
                steps[i] = Some(report.steps as f64);
            }
            let pts: Vec<(f64, f64)> = omegas.iter().zip(&disc).filter_map(|(w, d)| d.filter(|d| *d > 0.0).map(|d| (w.ln(), d.ln()))).collect();
            if pts.len() >= 2 {
                let order = -slope(&pts);
                t.meta_float(format!("{key}.order"), order);
                summary.push(format!("{key} order {order:.3}"));
            }
        }
        t.numbers(format!("discrepancy_{key}"), disc);
        t.numbers(format!("steps_{key}"), steps);
    }
    Ok(Outcome::ok(t, format!("discrepancy decay in Omega: {}", summary.join(", "))))
}

/// Least-squares slope.
fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> RunConfig {
        RunConfig::parse(&format!("g = 10.0\nomega = 100.0\ngamma_plus = 10.0\ngamma_minus = 0.0\n{extra}")).unwrap()
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0].iter().map(|x| (x.ln(), (3.0 * x.powi(-2)).ln())).collect();
        assert!((slope(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn steady_fills_only_selected_modes() {
        let c = config("mode = \"secular\"\n");
        let t = steady(&c).unwrap().table;
        let csv = t.render().unwrap();
        let header = csv.lines().find(|l| l.starts_with("moment,")).unwrap();
        assert_eq!(header.split(',').count(), 1 + 6 * 2);
        let row = csv.lines().find(|l| l.starts_with("adag_a,")).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert!(cells[1].is_empty());
        assert!((cells[7].parse::<f64>().unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn scan_finds_pulled_peak() {
        let c = config("grid_min = -0.5\ngrid_max = 0.5\ngrid_points = 201\n");
        let t = scan_detuning(&c).unwrap().table.render().unwrap();
        let meta = |key: &str| -> f64 {
            let prefix = format!("#! {key} = ");
            t.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap().parse().unwrap()
        };
        assert!((meta("nonsecular.argmax_delta_c") + 0.16).abs() < 1e-9);
        assert!(meta("secular.argmax_delta_c").abs() < 1e-12);
        assert!(meta("peak_ratio") > 1.0);
    }

    #[test]
    fn squeezing_requires_theta() {
        assert!(squeezing(&config("")).is_err());
    }
}
