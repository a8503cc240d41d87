//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crofton::bodies::ConvexBody;
use crofton::crofton_coeffs::{
    alternating_sum_check, c_coeff, binomial_identity_holds, CroftonTable, MeasurementFunction,
};
use crofton::estimators::curves::{curve_by_quadrature, gamma_grid, variance_curve, CurveKind};
use crofton::estimators::mc::{mc_run, try_mc_run, McOptions, McSummary, RngStream};
use crofton::estimators::sampling::{
    orthogonal_frame, sample_iur_line, sample_line_in_section, sample_offset, sample_vur_flat, uniform_direction,
    uniform_in_plane,
};
use crofton::estimators::weighted::{est_weighted, Component, DirectionDensity, WeightedSampler};
use crofton::estimators::{
    est_hitmiss, est_projection, est_vertical, est_vertical_width, systematic_estimator_2d, ReferenceSet,
};
use crofton::experiments::{self, Figure2Config};
use crofton::ground_truth::{
    crofton_rhs, relative_gap, surface_tensor, HitMeasureGrid, QuadratureMethod, QuadratureSpec,
};
use crofton::particle_process::{
    draw_directions, section_intensity, simulate, specific_tensor_estimates, specific_tensor_truth, DirectionDesign,
    ParticleProcessModel,
};
use crofton::quadrature::direction_grid;
use crofton::symtensor::{LinearDirection, SymmetricTensor};
use crofton::linalg;
use rand::Rng;

use crate::config::{
    canonical, require, BodyArg, CoeffsOpts, CurvesOpts, EstimateOpts, Figure1Opts, Figure2Opts, GrainArg,
    ProcessOpts, SelfcheckOpts, TruthOpts,
};
use crate::output::{self, num, opt_num, sibling, Csv};
use crate::CliError;

type Files = Result<Vec<PathBuf>, CliError>;

fn even_rank(s: usize) -> Result<usize, CliError> {
    if s % 2 == 1 {
        return Err(CliError::Config(format!("rank s = {s} must be even")));
    }
    if s > 20 {
        return Err(CliError::Config(format!("rank s = {s} exceeds 20")));
    }
    Ok(s)
}

fn reps(r: u64) -> Result<u64, CliError> {
    if r < 2 {
        return Err(CliError::Config(format!("reps = {r} must be at least 2")));
    }
    Ok(r)
}

fn component_labels(t: &SymmetricTensor) -> Vec<String> {
    t.multi_indices().iter().map(|ix| ix.iter().map(|i| (i + 1).to_string()).collect::<String>()).map(|s| if s.is_empty() { "scalar".into() } else { s }).collect()
}

/// Writes the CSV and the manifest; returns both paths plus `extra`.
fn finish(out: &Path, command: &str, canonical: &str, seed: Option<u64>, csv: &Csv, extra: Vec<PathBuf>) -> Files {
    csv.write(out)?;
    let mut files = vec![out.to_path_buf()];
    files.extend(extra);
    let manifest = output::write_manifest(out, command, canonical, seed, &files)?;
    files.push(manifest);
    Ok(files)
}

fn quadrature(n: usize, dir: Option<usize>, off: Option<usize>) -> Result<QuadratureSpec, CliError> {
    let std = QuadratureSpec::standard(n);
    Ok(QuadratureSpec::new(
        dir.unwrap_or(std.direction_nodes),
        off.unwrap_or(std.offset_nodes),
        QuadratureMethod::BoundaryParametrization,
    )?)
}

pub fn coeffs(o: CoeffsOpts, out: &Path) -> Files {
    let o = o.merge(CoeffsOpts { s: Some(4), n: Some(2) });
    let s = even_rank(require(&o.s, "s")?)?;
    let n = require(&o.n, "n")?;
    if !(2..=10).contains(&n) {
        return Err(CliError::Config(format!("dimension n = {n} outside 2..=10")));
    }
    let canon = canonical(&o)?;
    let hash = output::config_hash(&canon);
    let table = CroftonTable::new(n, s)?;
    let mut csv = Csv::new(&["table", "i", "j", "value"], &hash);
    let m = s / 2;
    for i in 0..=m {
        for k in 0..=i {
            csv.row(&["c".into(), i.to_string(), k.to_string(), num(c_coeff(i, k)?)]);
        }
    }
    for (j, v) in table.normalizers().iter().enumerate() {
        csv.row(&["C".into(), (2 * j).to_string(), String::new(), num(*v)]);
    }
    for (i, row) in table.d().iter().enumerate() {
        for (j, v) in row.iter().enumerate().take(i + 1) {
            csv.row(&["d".into(), i.to_string(), j.to_string(), num(*v)]);
        }
    }
    for j in 0..=m {
        csv.row(&["G_weight".into(), j.to_string(), String::new(), num(table.g_weight(j))]);
    }
    let g = MeasurementFunction::new(n, s)?.eval(&LinearDirection::axis(n, 0));
    for (label, v) in component_labels(&g).iter().zip(g.coeffs()) {
        csv.row(&["G_e1".into(), label.clone(), String::new(), num(*v)]);
    }
    finish(out, "coeffs", &canon, None, &csv, vec![])
}

fn resolve_truth(o: TruthOpts) -> TruthOpts {
    o.merge(TruthOpts { body: Some(BodyArg::Name("disk".into())), s: Some(2), direction_nodes: None, offset_nodes: None })
}

pub fn truth(o: TruthOpts, base: &Path, out: &Path) -> Files {
    let o = resolve_truth(o);
    let body = require(&o.body, "body")?.build(base)?;
    let s = even_rank(require(&o.s, "s")?)?;
    let q = quadrature(body.dim(), o.direction_nodes, o.offset_nodes)?;
    let canon = canonical(&o)?;
    let t = surface_tensor(&body, s, &q)?;
    let mut csv = Csv::new(&["component", "value"], &output::config_hash(&canon));
    for (label, v) in component_labels(&t).iter().zip(t.coeffs()) {
        csv.row(&[label.clone(), num(*v)]);
    }
    finish(out, "truth", &canon, None, &csv, vec![])
}

pub fn oracle(o: TruthOpts, base: &Path, out: &Path) -> Files {
    let o = resolve_truth(o);
    let body = require(&o.body, "body")?.build(base)?;
    let s = require(&o.s, "s")?;
    if s > 20 {
        return Err(CliError::Config(format!("rank s = {s} exceeds 20")));
    }
    let q = quadrature(body.dim(), o.direction_nodes, o.offset_nodes)?;
    let canon = canonical(&o)?;
    let grid = HitMeasureGrid::new(&body, &q);
    let lhs = grid.crofton_integral(s);
    let mut csv = Csv::new(
        &["component", "crofton_integral", "tensor_combination", "inverse", "reconstruction", "truth"],
        &output::config_hash(&canon),
    );
    if s % 2 == 1 {
        for (label, v) in component_labels(&lhs).iter().zip(lhs.coeffs()) {
            csv.row(&[label.clone(), num(*v), num(0.0), String::new(), String::new(), String::new()]);
        }
    } else {
        let rhs = crofton_rhs(&body, s, &q)?;
        let inv = grid.inverse_crofton(s)?;
        let rec = grid.reconstruct(s)?;
        let t = surface_tensor(&body, s, &q)?;
        let labels = component_labels(&t);
        for i in 0..labels.len() {
            csv.row(&[
                labels[i].clone(),
                num(lhs.coeffs()[i]),
                num(rhs.coeffs()[i]),
                num(inv.coeffs()[i]),
                num(rec.coeffs()[i]),
                num(t.coeffs()[i]),
            ]);
        }
    }
    finish(out, "oracle", &canon, None, &csv, vec![])
}

/// `1.05 · max h(K, u)` over a direction grid, supports taken from the origin.
fn default_reference_radius(k: &ConvexBody) -> f64 {
    let n = k.dim();
    let nodes = if n == 2 { 720 } else { 24 };
    let m = direction_grid(n, nodes)
        .iter()
        .map(|(u, _)| k.support(u).max(k.support(&linalg::scale(u, -1.0))))
        .fold(0.0, f64::max);
    1.05 * m
}

fn summary_rows(csv: &mut Csv, labels: &[String], truth: &[f64], s: &McSummary) {
    for (i, label) in labels.iter().enumerate() {
        let z = if s.std_error[i] > 0.0 { num((s.mean[i] - truth[i]) / s.std_error[i]) } else { String::new() };
        csv.row(&[
            label.clone(),
            num(truth[i]),
            num(s.mean[i]),
            num(s.variance[i]),
            num(s.std_error[i]),
            opt_num(s.cv[i]),
            z,
        ]);
    }
}

pub fn estimate(o: EstimateOpts, base: &Path, out: &Path) -> Files {
    let o = o.merge(EstimateOpts {
        design: Some("iur".into()),
        body: Some(BodyArg::Name("disk".into())),
        s: Some(2),
        reps: Some(100_000),
        seed: Some(1),
        reference_radius: None,
        lines: Some(1),
        component: Some("11".into()),
        density: Some("fstar".into()),
        vertical: Some(vec![0.0, 0.0, 1.0]),
    });
    let k = require(&o.body, "body")?.build(base)?;
    let n = k.dim();
    let s = even_rank(require(&o.s, "s")?)?;
    let design = require(&o.design, "design")?;
    let replications = reps(require(&o.reps, "reps")?)?;
    let seed = require(&o.seed, "seed")?;
    let lines = require(&o.lines, "lines")?;
    if lines == 0 {
        return Err(CliError::Config("lines must be positive".into()));
    }
    let o = EstimateOpts { reference_radius: Some(o.reference_radius.unwrap_or_else(|| default_reference_radius(&k))), ..o };
    let radius = require(&o.reference_radius, "reference_radius")?;
    let a = ReferenceSet::ball(&vec![0.0; n], radius)?;
    a.require_contains(&k)?;
    let q = QuadratureSpec::standard(n);
    let truth = surface_tensor(&k, s, &q)?;
    let g = MeasurementFunction::new(n, s)?;
    let stream = RngStream::new(seed);
    let posdef = McOptions { posdef_dim: (s == 2).then_some(n) };
    let need = |cond: bool, what: &str| -> Result<(), CliError> {
        if cond {
            Ok(())
        } else {
            Err(CliError::Config(format!("design `{design}` needs {what}")))
        }
    };
    let (labels, truth_vals, run) = match design.as_str() {
        "iur" => (component_labels(&truth), truth.coeffs().to_vec(), mc_run(replications, &stream, posdef, |rng| {
            est_hitmiss(&k, &a, &sample_iur_line(&a, rng), &g).into_coeffs()
        })?),
        "frame_iur" => (component_labels(&truth), truth.coeffs().to_vec(), mc_run(replications, &stream, posdef, |rng| {
            let mut acc = SymmetricTensor::zeros(n, s);
            for d in orthogonal_frame(n, rng) {
                let line = sample_offset(a.body(), d, rng);
                let _ = acc.add_scaled(1.0 / n as f64, &est_hitmiss(&k, &a, &line, &g));
            }
            acc.into_coeffs()
        })?),
        "proj" => (component_labels(&truth), truth.coeffs().to_vec(), try_mc_run(replications, &stream, posdef, |rng| {
            let dirs: Vec<LinearDirection> = (0..lines).map(|_| uniform_direction(n, rng)).collect();
            Ok(est_projection(&k, &dirs, &g)?.into_coeffs())
        })?),
        "frame" => (component_labels(&truth), truth.coeffs().to_vec(), try_mc_run(replications, &stream, posdef, |rng| {
            Ok(est_projection(&k, &orthogonal_frame(n, rng), &g)?.into_coeffs())
        })?),
        "syst" => {
            need(n == 2 && s == 2, "n = 2 and s = 2")?;
            (component_labels(&truth), truth.coeffs().to_vec(), try_mc_run(replications, &stream, posdef, |rng| {
                let phi0 = rng.random::<f64>() * PI / lines as f64;
                Ok(systematic_estimator_2d(&k, lines, phi0)?.into_coeffs())
            })?)
        }
        "vert" | "vert_width" => {
            need(n == 3, "n = 3")?;
            let v = require(&o.vertical, "vertical")?;
            let l0 = LinearDirection::new(&v).map_err(|e| CliError::Config(format!("vertical axis: {e}")))?;
            let by_width = design == "vert_width";
            (component_labels(&truth), truth.coeffs().to_vec(), try_mc_run(replications, &stream, posdef, |rng| {
                let h = sample_vur_flat(&a, &l0, rng)?;
                let t = if by_width {
                    est_vertical_width(&k, &a, &h, uniform_in_plane(rng), &g)?
                } else {
                    match sample_line_in_section(&a.body().flat_section(&h)?, rng) {
                        Some(e) => est_vertical(&k, &a, &h, &e, &g)?,
                        None => SymmetricTensor::zeros(n, s),
                    }
                };
                Ok(t.into_coeffs())
            })?)
        }
        "weighted" => {
            need(n == 2 && s == 2, "n = 2 and s = 2")?;
            let cs = require(&o.component, "component")?;
            let c = match cs.as_str() {
                "11" => Component::new(0, 0),
                "12" | "21" => Component::new(0, 1),
                "22" => Component::new(1, 1),
                other => return Err(CliError::Config(format!("component `{other}` is not one of 11, 12, 22"))),
            }?;
            let density = match require(&o.density, "density")?.as_str() {
                "uniform" => DirectionDensity::Uniform,
                "fstar" => DirectionDensity::FStar(c),
                "fstarK" => DirectionDensity::FStarK { component: c, body: k.clone(), radius },
                "cosine" => DirectionDensity::Cosine { amplitude: 0.9, shift: 0.0 },
                "power4" => DirectionDensity::Power4 { shift: 0.7, floor: 0.1 },
                other => return Err(CliError::Config(format!("unknown density `{other}`"))),
            };
            let sampler = WeightedSampler::table(&density)?;
            let (i, j) = c.indices();
            (vec![c.label()], vec![truth.get(&[i, j])?], try_mc_run(replications, &stream, McOptions::default(), |rng| {
                Ok(vec![est_weighted(&k, &a, c, &sampler, rng)?])
            })?)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown design `{other}` (iur, frame_iur, proj, frame, syst, vert, vert_width, weighted)"
            )))
        }
    };
    let canon = canonical(&o)?;
    let summary = run.summary();
    let mut csv = Csv::new(&["component", "truth", "mean", "variance", "std_error", "cv", "z"], &output::config_hash(&canon));
    summary_rows(&mut csv, &labels, &truth_vals, &summary);
    if let Some(p) = summary.posdef_fraction {
        csv.row(&["posdef_fraction".into(), String::new(), num(p), String::new(), String::new(), String::new(), String::new()]);
    }
    finish(out, "estimate", &canon, Some(seed), &csv, vec![])
}

pub fn figure1(o: Figure1Opts, out: &Path) -> Files {
    let o = o.merge(Figure1Opts { eps: Some(0.1), grid: Some(500), max_lines: Some(10) });
    let eps = require(&o.eps, "eps")?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Config(format!("eps = {eps} must lie in (0, 1)")));
    }
    let grid = require(&o.grid, "grid")?;
    let max_lines = require(&o.max_lines, "max_lines")?;
    if grid == 0 || max_lines == 0 {
        return Err(CliError::Config("grid and max_lines must be positive".into()));
    }
    let canon = canonical(&o)?;
    let rows = experiments::figure1(eps, grid, max_lines)?;
    let mut csv = Csv::new(&["body", "lines", "posdef_fraction"], &output::config_hash(&canon));
    for r in &rows {
        csv.row(&[r.body.clone(), r.lines.to_string(), num(r.posdef_fraction)]);
    }
    let script = sibling(out, ".gp");
    csv.write(out)?;
    output::write_text(&script, &output::figure1_script(out, &["K1".into(), "K2".into(), "K3".into()]))?;
    finish(out, "figure1", &canon, None, &csv, vec![script])
}

pub fn figure2(o: Figure2Opts, out: &Path) -> Files {
    let d = Figure2Config::default();
    let o = o.merge(Figure2Opts {
        elongations: Some(d.elongations.clone()),
        hit_probability: Some(d.hit_probability),
        reps: Some(d.replications),
        seed: Some(d.seed),
    });
    let config = Figure2Config {
        elongations: require(&o.elongations, "elongations")?,
        hit_probability: require(&o.hit_probability, "hit_probability")?,
        replications: reps(require(&o.reps, "reps")?)?,
        seed: require(&o.seed, "seed")?,
    };
    if config.elongations.is_empty() || config.elongations.iter().any(|l| !(*l > 0.0)) {
        return Err(CliError::Config("elongations must be positive".into()));
    }
    let canon = canonical(&o)?;
    let hash = output::config_hash(&canon);
    let res = experiments::figure2(&config, &QuadratureSpec::standard(3))?;
    let mut csv = Csv::new(&["l", "estimator", "component", "truth", "mean", "variance", "cv"], &hash);
    for r in &res.rows {
        csv.row(&[
            num(r.elongation),
            r.estimator.clone(),
            r.component.clone(),
            num(r.truth),
            num(r.mean),
            num(r.variance),
            opt_num(r.cv.map(f64::abs)),
        ]);
    }
    let ratios_path = sibling(out, "_ratios.csv");
    let mut ratios = Csv::new(&["ratio", "value"], &hash);
    ratios.row(&["cv_pr1_over_hm1".into(), num(res.ratio_pr1_hm1)]);
    ratios.row(&["cv_pr3_over_hm3".into(), num(res.ratio_pr3_hm3)]);
    ratios.row(&["cv_hm3_over_hm3iid".into(), num(res.ratio_hm3_iid)]);
    ratios.row(&["ball_pr3_max_variance".into(), opt_num(res.ball_pr3_variance)]);
    ratios.write(&ratios_path)?;
    let script = sibling(out, ".gp");
    csv.write(out)?;
    output::write_text(&script, &output::figure2_script(out))?;
    finish(out, "figure2", &canon, Some(config.seed), &csv, vec![ratios_path, script])
}

pub fn curves(o: CurvesOpts, out: &Path) -> Files {
    let o = o.merge(CurvesOpts { grid: Some(1001) });
    let grid = require(&o.grid, "grid")?;
    if grid < 2 {
        return Err(CliError::Config("grid must have at least 2 points".into()));
    }
    let canon = canonical(&o)?;
    let kinds = CurveKind::all();
    let mut cols = vec!["gamma"];
    cols.extend(kinds.iter().map(|k| k.label()));
    let mut csv = Csv::new(&cols, &output::config_hash(&canon));
    let gammas = gamma_grid(grid);
    use rayon::prelude::*;
    let rows: Vec<Vec<String>> = gammas
        .par_iter()
        .map(|&g| {
            let mut r = vec![num(g)];
            r.extend(kinds.iter().map(|k| num(variance_curve(*k, g))));
            r
        })
        .collect();
    for r in &rows {
        csv.row(r);
    }
    let script = sibling(out, ".gp");
    csv.write(out)?;
    output::write_text(&script, &output::curves_script(out, &cols[1..]))?;
    finish(out, "curves", &canon, None, &csv, vec![script])
}

pub fn process(o: ProcessOpts, base: &Path, out: &Path) -> Files {
    let o = o.merge(ProcessOpts {
        gamma: Some(5.0),
        grain: Some(GrainArg::Name("disk".into())),
        window: Some(10.0),
        s: Some(vec![0, 2, 4]),
        lines: Some(4),
        seglen: None,
        design: Some("systematic".into()),
        reps: Some(1000),
        seed: Some(1),
    });
    let o = ProcessOpts { seglen: Some(o.seglen.unwrap_or(0.8 * o.window.unwrap_or(10.0))), ..o };
    let grain = require(&o.grain, "grain")?.build(base)?;
    let model = ParticleProcessModel::cube(require(&o.gamma, "gamma")?, grain, require(&o.window, "window")?)?;
    let ranks = require(&o.s, "s")?;
    if ranks.is_empty() {
        return Err(CliError::Config("need at least one rank in `s`".into()));
    }
    for s in &ranks {
        even_rank(*s)?;
    }
    let lines = require(&o.lines, "lines")?;
    if lines == 0 {
        return Err(CliError::Config("lines must be positive".into()));
    }
    let seglen = require(&o.seglen, "seglen")?;
    let design = match require(&o.design, "design")?.as_str() {
        "iid" => DirectionDesign::Iid,
        "systematic" => DirectionDesign::Systematic,
        other => return Err(CliError::Config(format!("unknown direction design `{other}` (iid, systematic)"))),
    };
    let replications = reps(require(&o.reps, "reps")?)?;
    let seed = require(&o.seed, "seed")?;
    // reject segments that leave the window before simulating
    let n = model.dim();
    for i in 0..n {
        section_intensity(&model, &[], &LinearDirection::axis(n, i), seglen)?;
    }
    let diag = LinearDirection::new(&vec![1.0; n])?;
    section_intensity(&model, &[], &diag, seglen)?;
    let canon = canonical(&o)?;
    let q = QuadratureSpec::standard(n);
    let mut labels = vec![("L".to_string(), "gamma_L".to_string())];
    let mut truth = vec![model.section_intensity_truth(&q)?];
    for &s in &ranks {
        let t = specific_tensor_truth(&model, s, &q)?;
        labels.extend(component_labels(&t).into_iter().map(|c| (s.to_string(), c)));
        truth.extend_from_slice(t.coeffs());
    }
    let run = try_mc_run(replications, &RngStream::new(seed), McOptions::default(), |rng| {
        let particles = simulate(&model, rng)?;
        let dirs = draw_directions(n, lines, design, rng);
        let est = specific_tensor_estimates(&model, &particles, &dirs, seglen, &ranks)?;
        let hits: usize = est.first().map_or(0, |e| e.hits_per_line.iter().sum());
        let mut v = vec![hits as f64 / (lines as f64 * seglen)];
        for e in est {
            v.extend(e.tensor.into_coeffs());
        }
        Ok(v)
    })?;
    let summary = run.summary();
    let mut csv = Csv::new(&["rank", "component", "truth", "mean", "std_error", "z"], &output::config_hash(&canon));
    for (i, (rank, comp)) in labels.iter().enumerate() {
        let se = summary.std_error[i];
        let z = if se > 0.0 { num((summary.mean[i] - truth[i]) / se) } else { String::new() };
        csv.row(&[rank.clone(), comp.clone(), num(truth[i]), num(summary.mean[i]), num(se), z]);
    }
    finish(out, "process", &canon, Some(seed), &csv, vec![])
}

pub fn selfcheck(o: SelfcheckOpts, out: &Path) -> Files {
    let o = o.merge(SelfcheckOpts { identity_max: Some(30) });
    let identity_max = require(&o.identity_max, "identity_max")?;
    let canon = canonical(&o)?;
    let mut csv = Csv::new(&["check", "value", "tolerance", "pass"], &output::config_hash(&canon));
    let mut failed = Vec::new();
    let mut check = |name: String, value: f64, tol: f64| {
        let pass = value.abs() <= tol;
        if !pass {
            failed.push(name.clone());
        }
        csv.row(&[name, num(value), num(tol), pass.to_string()]);
    };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    check("c00".into(), rel(c_coeff(0, 0)?, 2.0), 1e-12);
    check("c11".into(), rel(c_coeff(1, 1)?, 8.0 * PI), 1e-12);
    check("c22".into(), rel(c_coeff(2, 2)?, -64.0 * PI * PI / 3.0), 1e-12);
    let t4 = CroftonTable::new(2, 4)?;
    check("d22".into(), rel(t4.d()[2][2], -3.0 / (64.0 * PI * PI)), 1e-12);
    for s in (0..=20).step_by(2) {
        check(format!("dc_identity_s{s}"), CroftonTable::new(3, s)?.dc_identity_error(), 1e-10);
    }
    let mut identity_bad = 0.0;
    for nn in 0..=identity_max {
        for m in 0..=nn {
            if !binomial_identity_holds(nn, m) {
                identity_bad += 1.0;
            }
        }
    }
    check(format!("binomial_identity_n_le_{identity_max}"), identity_bad, 0.0);
    let worst = (0..=30).map(alternating_sum_check).fold(0.0, f64::max);
    check("alternating_sum_m_le_30".into(), worst, 1e-10);
    let q = QuadratureSpec::standard(2);
    for (name, body) in [("disk", "disk"), ("square", "square"), ("triangle", "triangle"), ("ellipse", "ellipse")] {
        let k = crate::config::body_preset(body).ok_or_else(|| CliError::Config(format!("preset {body}")))?;
        let grid = HitMeasureGrid::new(&k, &q);
        for s in [0, 2, 4] {
            let gap = relative_gap(&grid.crofton_integral(s), &crofton_rhs(&k, s, &q)?)?;
            check(format!("oracle_{name}_s{s}"), gap, 1e-3);
        }
        check(format!("oracle_{name}_odd"), grid.crofton_integral(3).max_abs(), 1e-10);
    }
    for kind in [CurveKind::PIur, CurveKind::PFstar, CurveKind::QIur, CurveKind::QFstar] {
        let worst = gamma_grid(101)
            .iter()
            .map(|&g| (variance_curve(kind, g) - curve_by_quadrature(kind, g)).abs())
            .fold(0.0, f64::max);
        check(format!("curve_{}", kind.label()), worst, 1e-8);
    }
    let files = finish(out, "selfcheck", &canon, None, &csv, vec![])?;
    if failed.is_empty() {
        Ok(files)
    } else {
        Err(CliError::Contract(format!("failed checks: {}", failed.join(", "))))
    }
}
