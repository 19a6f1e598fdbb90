//! One function per subcommand; each returns the finished report.

use anyhow::{bail, Context, Result};
use fraclen_core::{
    el_residual, jacobian_report, kappa_sigma, lemma_int_target, len_sigma_with, limit_constant,
    limit_sweep, projection_limit_constant, random_manifold_point, verify_lemma_int, Classifier,
    CurvatureOptions, CurvatureResult, Disc, LengthOptions, MapId, SampleStream, SamplingOptions,
    SigmaParam, Tolerances, Unbiasing, UnitVecN, VecN, Window,
};
use serde_json::{json, Value};

use crate::args::{
    ClassifyArgs, CurvatureArgs, LengthArgs, LimitSweepArgs, RunArgs, ToleranceArgs, UnbiasingArg,
    VerifyJacobiansArgs, VerifyLemmaIntArgs, WindowArgs,
};
use crate::report::{num, Report};
use crate::spec::{self, sha256_hex, LoadedCurve};

fn sampling(samples: u64, run: &RunArgs) -> SamplingOptions {
    SamplingOptions {
        workers: run.workers,
        ..SamplingOptions::new(samples, run.seed)
    }
}

fn tolerances(args: &ToleranceArgs) -> Result<Tolerances> {
    let defaults = Tolerances::default();
    let tol = Tolerances {
        plane: args.tol_plane.unwrap_or(defaults.plane),
        radius: args.tol_radius.unwrap_or(defaults.radius),
        tangent: args.tol_tangent.unwrap_or(defaults.tangent),
        grid: args.grid.unwrap_or(defaults.grid),
    };
    tol.validate()?;
    Ok(tol)
}

fn tolerance_json(t: &Tolerances) -> Value {
    json!({ "plane": t.plane, "radius": t.radius, "tangent": t.tangent, "grid": t.grid })
}

fn curve_json(c: &LoadedCurve) -> Value {
    json!({ "source": c.source, "dimension": c.curve.dim(), "sha256": c.digest })
}

fn window(args: &WindowArgs, curve: &LoadedCurve) -> Result<Window> {
    let center = match &args.window_center {
        Some(c) => VecN::new(c)?,
        None => curve.curve.centroid().clone(),
    };
    if center.dim() != curve.curve.dim() {
        bail!(
            "window center has {} components but the curve lives in R^{}",
            center.dim(),
            curve.curve.dim()
        );
    }
    let w = Window::new(center, args.window_radius)?;
    if !w.contains_curve(&curve.curve) {
        bail!(
            "the window ball of radius {} does not contain the curve",
            args.window_radius
        );
    }
    Ok(w)
}

fn unbiasing(u: UnbiasingArg) -> Unbiasing {
    match u {
        UnbiasingArg::Canonical => Unbiasing::CanonicalSelection,
        UnbiasingArg::Multiplicity => Unbiasing::MultiplicityDivision,
    }
}

fn unbiasing_name(u: UnbiasingArg) -> &'static str {
    match u {
        UnbiasingArg::Canonical => "canonical",
        UnbiasingArg::Multiplicity => "multiplicity",
    }
}

fn vec_json(v: &VecN) -> Value {
    json!(v.as_slice())
}

fn vec_text(v: &VecN) -> String {
    v.as_slice()
        .iter()
        .map(|x| format!("{x:.6e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn length(args: &LengthArgs) -> Result<Report> {
    let curve = spec::load(&args.curve)?;
    let window = window(&args.window, &curve)?;
    let sigma = SigmaParam::new(args.sigma)?;
    let tol = tolerances(&args.tolerances)?;
    let options = LengthOptions {
        sampling: sampling(args.samples, &args.run),
        tolerances: tol,
        unbiasing: unbiasing(args.unbiasing),
        ..LengthOptions::new(args.samples, args.run.seed)
    };
    let result = len_sigma_with(&curve.curve, &window, sigma, &options)?;
    let config = json!({
        "command": "length",
        "curve": curve_json(&curve),
        "sigma": args.sigma,
        "window": { "center": vec_json(&window.center), "radius": window.radius },
        "n_samples": args.samples,
        "seed": args.run.seed,
        "unbiasing": unbiasing_name(args.unbiasing),
        "tolerances": tolerance_json(&tol),
    });
    let mut report = Report::new(
        "length",
        config,
        args.run.seed,
        Some(curve.digest.clone()),
        &[
            "sigma",
            "estimate",
            "std_error",
            "scaled_estimate",
            "scaled_std_error",
            "n_samples",
            "n_rejected_degenerate",
            "seed",
        ],
    );
    let k = 1.0 - args.sigma;
    report.row(vec![
        num(args.sigma),
        num(result.estimate),
        num(result.std_error),
        num(k * result.estimate),
        num(k * result.std_error),
        result.n_samples.to_string(),
        result.n_rejected_degenerate.to_string(),
        result.seed.to_string(),
    ]);
    report.summary("estimate", num(result.estimate));
    report.summary("std_error", num(result.std_error));
    report.summary("scaled_estimate (1-sigma)*Len", num(k * result.estimate));
    report.summary("proposal", serde_json::to_string(&result.proposal)?);
    for w in &result.warnings {
        report.summary("warning", w.clone());
    }
    Ok(report)
}

pub fn limit(args: &LimitSweepArgs) -> Result<Report> {
    let curve = spec::load(&args.curve)?;
    let window = window(&args.window, &curve)?;
    let sigmas = args
        .sigmas
        .iter()
        .map(|&s| SigmaParam::new(s))
        .collect::<fraclen_core::Result<Vec<_>>>()?;
    let tol = tolerances(&args.tolerances)?;
    let options = LengthOptions {
        sampling: sampling(args.samples, &args.run),
        tolerances: tol,
        unbiasing: unbiasing(args.unbiasing),
        ..LengthOptions::new(args.samples, args.run.seed)
    };
    let sweep = limit_sweep(&curve.curve, &window, &sigmas, &options)?;
    let n = curve.curve.dim();
    let target = limit_constant(n)? * sweep.arclength;
    let projection = projection_limit_constant(n)? * sweep.arclength;
    let config = json!({
        "command": "limit-sweep",
        "curve": curve_json(&curve),
        "sigmas": args.sigmas,
        "window": { "center": vec_json(&window.center), "radius": window.radius },
        "n_samples": args.samples,
        "seed": args.run.seed,
        "unbiasing": unbiasing_name(args.unbiasing),
        "tolerances": tolerance_json(&tol),
    });
    let mut report = Report::new(
        "limit-sweep",
        config,
        args.run.seed,
        Some(curve.digest.clone()),
        &[
            "row",
            "sigma",
            "scaled_estimate",
            "std_error",
            "estimate",
            "n_samples",
            "n_rejected_degenerate",
            "seed",
        ],
    );
    for row in &sweep.rows {
        report.row(vec![
            "sigma".into(),
            num(row.sigma),
            num(row.scaled_estimate),
            num(row.std_error),
            num(row.result.estimate),
            row.result.n_samples.to_string(),
            row.result.n_rejected_degenerate.to_string(),
            row.result.seed.to_string(),
        ]);
    }
    report.row(vec![
        "extrapolated".into(),
        num(1.0),
        num(sweep.extrapolated),
        num(sweep.extrapolated_std_error),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    let deviation = (sweep.extrapolated - target) / sweep.extrapolated_std_error;
    report.summary(
        "extrapolated (1-sigma)*Len at sigma=1",
        num(sweep.extrapolated),
    );
    report.summary("extrapolated std_error", num(sweep.extrapolated_std_error));
    report.summary("arclength", num(sweep.arclength));
    report.summary(
        "target 4*alpha_{n-1}*alpha_{n-2}/(n-1) * arclength",
        format!("{} (= 4*pi*arclength for n = 3)", num(target)),
    );
    report.summary("deviation from target [std errors]", num(deviation));
    report.summary(
        "relative deviation from target",
        num((sweep.extrapolated - target) / target),
    );
    report.summary("2*alpha_{n-1}^2 * arclength", num(projection));
    report.summary("fit slope", num(sweep.slope));
    Ok(report)
}

fn curvature_report(args: &CurvatureArgs, el: bool) -> Result<Report> {
    let curve = spec::load(&args.curve)?;
    let sigma = SigmaParam::new(args.sigma)?;
    let tol = tolerances(&args.tolerances)?;
    let options = CurvatureOptions {
        sampling: sampling(args.samples, &args.run),
        tolerances: tol,
        r_min: args.r_min,
        r_max: args.r_max,
    };
    let result: CurvatureResult = if el {
        el_residual(&curve.curve, args.s, sigma, &options)?
    } else {
        kappa_sigma(&curve.curve, args.s, sigma, &options)?
    };
    let name = if el { "el-residual" } else { "curvature" };
    let config = json!({
        "command": name,
        "curve": curve_json(&curve),
        "s": args.s,
        "sigma": args.sigma,
        "r_min": result.r_min,
        "r_max": result.r_max,
        "n_samples": args.samples,
        "seed": args.run.seed,
        "tolerances": tolerance_json(&tol),
    });
    let n = curve.curve.dim();
    let mut columns: Vec<String> = ["row", "s", "sigma", "r_min", "r_max"]
        .iter()
        .map(|c| c.to_string())
        .collect();
    columns.extend((0..n).map(|i| format!("kappa_{i}")));
    columns.push("kappa_scalar".into());
    columns.extend((0..n).map(|i| format!("std_error_{i}")));
    let column_refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let mut report = Report::new(
        name,
        config,
        args.run.seed,
        Some(curve.digest.clone()),
        &column_refs,
    );
    for (k, row) in result.sweep.iter().enumerate() {
        let mut cells = vec![
            if k == 0 {
                "estimate".to_string()
            } else {
                format!("sweep_{k}")
            },
            num(result.s),
            num(result.sigma),
            num(row.r_min),
            num(result.r_max),
        ];
        cells.extend(row.kappa_vector.as_slice().iter().map(|&x| num(x)));
        cells.push(num(row.kappa_vector.norm()));
        cells.extend(row.std_error_vector.as_slice().iter().map(|&x| num(x)));
        report.row(cells);
    }
    let t = curve.curve.tangent(args.s);
    let se_norm = result.std_error_vector.norm();
    report.summary("point", vec_text(&result.point));
    report.summary("vector", vec_text(&result.kappa_vector));
    report.summary("std_error", vec_text(&result.std_error_vector));
    report.summary("norm", num(result.kappa_scalar));
    report.summary("norm / |std_error|", num(result.kappa_scalar / se_norm));
    report.summary("vector . tangent", num(result.kappa_vector.dot(t.as_vec())));
    report.summary(
        "n_rejected_degenerate",
        result.n_rejected_degenerate.to_string(),
    );
    for w in &result.warnings {
        report.summary("warning", w.clone());
    }
    Ok(report)
}

pub fn curvature(args: &CurvatureArgs) -> Result<Report> {
    curvature_report(args, false)
}

pub fn residual(args: &CurvatureArgs) -> Result<Report> {
    curvature_report(args, true)
}

pub fn classify(args: &ClassifyArgs) -> Result<Report> {
    let curve = spec::load(&args.curve)?;
    let tol = tolerances(&args.tolerances)?;
    let normal = UnitVecN::new(VecN::new(&args.normal)?).context("disc normal must be nonzero")?;
    let disc = Disc::new(VecN::new(&args.center)?, normal, args.radius)?;
    if disc.center.dim() != curve.curve.dim() {
        bail!(
            "disc lives in R^{} but the curve lives in R^{}",
            disc.center.dim(),
            curve.curve.dim()
        );
    }
    let class = Classifier::new(&curve.curve, tol)?.classify(&disc);
    let config = json!({
        "command": "classify",
        "curve": curve_json(&curve),
        "disc": { "center": args.center, "normal": vec_json(disc.normal.as_vec()), "radius": args.radius },
        "seed": args.run.seed,
        "tolerances": tolerance_json(&tol),
    });
    let n = curve.curve.dim();
    let mut columns: Vec<String> = vec!["hit".into(), "s".into(), "distance".into()];
    columns.extend((0..n).map(|i| format!("x_{i}")));
    let refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let mut report = Report::new(
        "classify",
        config,
        args.run.seed,
        Some(curve.digest.clone()),
        &refs,
    );
    for (k, hit) in class.interior_hits.iter().enumerate() {
        let mut cells = vec![k.to_string(), num(hit.s), num(hit.distance)];
        cells.extend(hit.point.as_slice().iter().map(|&x| num(x)));
        report.row(cells);
    }
    report.summary("label", format!("{:?}", class.label).to_lowercase());
    report.summary("interior crossings", class.count.to_string());
    Ok(report)
}

fn default_jacobian_curve(n: usize) -> Result<&'static str> {
    match n {
        3 => Ok("helix"),
        4 => Ok("fourier4"),
        _ => bail!("no default curve for n = {n}; pass --curve"),
    }
}

pub fn jacobians(args: &VerifyJacobiansArgs) -> Result<Report> {
    let source = match &args.curve {
        Some(c) => c.clone(),
        None => default_jacobian_curve(args.n)?.to_string(),
    };
    let curve = spec::load(&source)?;
    if args.curve.is_some() && args.n != curve.curve.dim() && args.n != 3 {
        bail!(
            "--n {} disagrees with the curve dimension {}",
            args.n,
            curve.curve.dim()
        );
    }
    if args.points == 0 {
        bail!("--points must be positive");
    }
    let config = json!({
        "command": "verify-jacobians",
        "curve": curve_json(&curve),
        "points": args.points,
        "h": args.h,
        "min_projection": args.min_projection,
        "threshold": args.threshold,
        "seed": args.run.seed,
    });
    let mut report = Report::new(
        "verify-jacobians",
        config,
        args.run.seed,
        Some(curve.digest.clone()),
        &[
            "map",
            "point_digest",
            "fd_gram_sqrt",
            "closed_form",
            "rel_error",
            "fd_gram_embedded",
            "exact",
            "exact_rel_error",
        ],
    );
    let stream = SampleStream::new(args.run.seed);
    for (m, map) in MapId::ALL.into_iter().enumerate() {
        let mut worst = 0.0f64;
        let mut worst_exact = 0.0f64;
        let mut passed = 0;
        for i in 0..args.points {
            let mut rng = stream.rng((m * args.points + i) as u64);
            let point = random_manifold_point(&curve.curve, map, args.min_projection, &mut rng)?;
            let rep = jacobian_report(&curve.curve, map, &point, args.h)?;
            let bytes: Vec<u8> = point
                .coordinates()
                .iter()
                .flat_map(|x| x.to_le_bytes())
                .collect();
            report.row(vec![
                map.to_string(),
                sha256_hex(&bytes)[..16].to_string(),
                num(rep.fd_gram_sqrt),
                num(rep.closed_form),
                num(rep.rel_error),
                num(rep.fd_gram_embedded),
                num(rep.exact),
                num(rep.exact_rel_error),
            ]);
            worst = worst.max(rep.rel_error);
            worst_exact = worst_exact.max(rep.exact_rel_error);
            if rep.rel_error <= args.threshold {
                passed += 1;
            }
        }
        report.summary(
            &format!("{map} closed form"),
            format!(
                "{passed}/{} within {:e}; max rel_error {}",
                args.points,
                args.threshold,
                num(worst)
            ),
        );
        report.summary(
            &format!("{map} derived product-measure value"),
            format!("max rel_error {}", num(worst_exact)),
        );
    }
    Ok(report)
}

pub fn lemma_int(args: &VerifyLemmaIntArgs) -> Result<Report> {
    if args.n < 3 {
        bail!("--n must be at least 3, got {}", args.n);
    }
    let c = match &args.direction {
        Some(d) => UnitVecN::new(VecN::new(d)?).context("direction must be nonzero")?,
        None => UnitVecN::basis(args.n, 0),
    };
    if c.dim() != args.n {
        bail!("direction has {} components but n = {}", c.dim(), args.n);
    }
    let rep = verify_lemma_int(args.n, &c, &sampling(args.samples, &args.run))?;
    let config = json!({
        "command": "verify-lemma-int",
        "n": args.n,
        "direction": vec_json(c.as_vec()),
        "n_samples": args.samples,
        "seed": args.run.seed,
    });
    let mut report = Report::new(
        "verify-lemma-int",
        config,
        args.run.seed,
        None,
        &[
            "n",
            "estimate",
            "std_error",
            "target",
            "z_score",
            "exact",
            "exact_z_score",
            "n_samples",
            "seed",
        ],
    );
    report.row(vec![
        args.n.to_string(),
        num(rep.result.estimate),
        num(rep.result.std_error),
        num(rep.target),
        num(rep.z_score),
        num(rep.exact),
        num(rep.exact_z_score),
        rep.result.n_samples.to_string(),
        rep.result.seed.to_string(),
    ]);
    debug_assert_eq!(rep.target, lemma_int_target(args.n));
    let target_name = if args.n == 3 {
        " (= 8*pi)".to_string()
    } else {
        String::new()
    };
    report.summary("estimate", num(rep.result.estimate));
    report.summary("std_error", num(rep.result.std_error));
    report.summary(
        "target 4*alpha_{n-1}*alpha_{n-2}",
        format!("{}{target_name}", num(rep.target)),
    );
    report.summary("z-score against target", num(rep.z_score));
    report.summary("exact 2*(n-1)*alpha_{n-1}^2", num(rep.exact));
    report.summary("z-score against exact", num(rep.exact_z_score));
    Ok(report)
}
