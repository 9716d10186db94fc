use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spacelike::curvature::{alpha_from_curvatures, field_csv, FieldHeader};
use spacelike::pdeverify::{attach_slope, refinements, Residual};
use spacelike::representations::{h_to_w, w_to_g, xi_to_g, PairSpec};
use spacelike::weierstrass::{export_mesh, integrate_surface, jet, second_fundamental};
use spacelike::{
    alpha_field, curvatures, log_polar, phi_frame, residual_complex, residual_system1, residual_system_xy,
    same_solution, transform, Alpha, Curvatures, Grid, Mask, Pair, PairG, Params, Rep, ResidualReport,
};

use crate::config::RunConfig;
use crate::CliError;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn generator(cfg: &RunConfig) -> Result<Pair, CliError> {
    let (f1, f2) = cfg.exprs()?;
    Pair::parse(cfg.rep, f1, f2).map_err(|e| CliError::Input(e.to_string()))
}

fn as_g(g: &Pair) -> Result<PairG<f64>, CliError> {
    Ok(match g {
        Pair::G(p) => p.clone(),
        Pair::W(p) => w_to_g(p),
        Pair::H(p) => w_to_g(&h_to_w(p)),
        Pair::Xi(p) => xi_to_g(p),
        Pair::Theta(_) | Pair::Eta(_) => {
            return Err(CliError::Input(format!("representation {} has no g-pair form", g.rep())))
        }
    })
}

fn mask_breakdown(mask: &Mask) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in mask.reasons.iter().flatten() {
        *counts.entry(r.as_str()).or_default() += 1;
    }
    counts.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", ")
}

fn require_admissible(mask: &Mask) -> Result<(), CliError> {
    if mask.count() == 0 {
        return Err(CliError::Numeric(format!("no admissible grid point ({})", mask_breakdown(mask))));
    }
    Ok(())
}

fn range(values: &[Option<f64>]) -> Option<(f64, f64)> {
    values.iter().flatten().fold(None, |acc, &x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

fn fmt_range(r: Option<(f64, f64)>) -> String {
    match r {
        Some((lo, hi)) => format!("[{lo:.6e}, {hi:.6e}]"),
        None => "(none)".into(),
    }
}

fn grid_line(g: &Grid) -> String {
    format!("grid {}x{} on [{}, {}]x[{}, {}]", g.nu, g.nv, g.u0, g.u1, g.v0, g.v1)
}

pub fn curvature(cfg: &RunConfig) -> Result<String, CliError> {
    let g = generator(cfg)?;
    let a = alpha_field(&g, &cfg.grid, cfg.tol);
    require_admissible(&a.mask)?;
    let c = curvatures(&a);
    write(&cfg.out, "field.csv", &field_csv(&a))?;
    write(&cfg.out, "field.json", &json(&FieldHeader::new(&a, Some(&g), cfg.tol, "field.csv")))?;
    write(&cfg.out, "mask.csv", &a.mask.to_csv())?;

    let mut s = String::new();
    let _ = writeln!(s, "rep {}, {}", g.rep(), grid_line(&cfg.grid));
    let _ = writeln!(s, "admissible {}/{} ({:.2}%)", a.mask.count(), cfg.grid.len(), 100.0 * a.mask.fraction());
    if a.mask.count() < cfg.grid.len() {
        let _ = writeln!(s, "masked: {}", mask_breakdown(&a.mask));
    }
    let _ = writeln!(s, "K     in {}", fmt_range(range(&c.k)));
    let _ = writeln!(s, "kappa in {}", fmt_range(range(&c.kappa)));
    if let Some(b) = a.mask.basepoint() {
        let (u, v) = cfg.grid.uv(b);
        let _ = writeln!(s, "at ({u}, {v}): K = {}, kappa = {}", c.k[b].unwrap(), c.kappa[b].unwrap());
    }
    let _ = writeln!(s, "wrote field.csv, field.json, mask.csv to {}", cfg.out.display());
    Ok(s)
}

#[derive(Serialize)]
struct VerifyLevel {
    nu: usize,
    nv: usize,
    admissible: usize,
    reports: Vec<ResidualReport>,
}

#[derive(Serialize)]
struct VerifyOutput {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    caveat: Option<String>,
    levels: Vec<VerifyLevel>,
    slopes: BTreeMap<String, Option<f64>>,
}

const FIELD_CAVEAT: &str = "the natural equations hold in canonical coordinates; an externally supplied field is checked as given";

fn residuals(a: &Alpha, c: &Curvatures, tol: f64) -> Result<Vec<Residual<f64>>, CliError> {
    require_admissible(&a.mask)?;
    let lp = log_polar(a);
    if !lp.is_unwrapped() {
        return Err(CliError::Numeric(format!(
            "arg(alpha) could not be unwrapped on {} component(s)",
            lp.non_unwrappable.len()
        )));
    }
    let (r1, failed) = residual_system1(c, tol);
    if !failed.is_empty() {
        return Err(CliError::Numeric(format!("atan2(kappa, K) could not be unwrapped on {} component(s)", failed.len())));
    }
    let out = vec![r1, residual_system_xy(&lp), residual_complex(a)];
    if out.iter().any(|r| r.report.n_interior == 0) {
        return Err(CliError::Numeric("no interior point with a complete admissible stencil".into()));
    }
    Ok(out)
}

pub fn verify(cfg: &RunConfig, refine: Option<usize>, from_field: Option<&Path>) -> Result<String, CliError> {
    let refine = refine.or(cfg.file.refine);
    let from_field = from_field.or(cfg.file.from_field.as_deref());
    let mut s = String::new();
    let (source, caveat, levels) = match from_field {
        Some(path) => {
            if refine.is_some_and(|k| k > 1) {
                return Err(CliError::Input("--refine cannot be combined with --from-field".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let c = Curvatures::from_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let a = alpha_from_curvatures(&c, cfg.tol);
            let _ = writeln!(s, "note: {FIELD_CAVEAT}");
            (format!("field {}", path.display()), Some(FIELD_CAVEAT.to_string()), vec![(a, c)])
        }
        None => {
            let g = generator(cfg)?;
            let k = refine.unwrap_or(1);
            if k == 0 {
                return Err(CliError::Input("--refine must be at least 1".into()));
            }
            let levels = refinements(&cfg.grid, k)
                .into_iter()
                .map(|grid| {
                    let a = alpha_field(&g, &grid, cfg.tol);
                    let c = curvatures(&a);
                    (a, c)
                })
                .collect();
            (format!("rep {} f1 {} f2 {}", g.rep(), g.exprs().0, g.exprs().1), None, levels)
        }
    };

    let mut computed = Vec::new();
    for (a, c) in &levels {
        computed.push(residuals(a, c, cfg.tol)?);
    }
    let n_eq = computed[0].len();
    let mut slopes = BTreeMap::new();
    for e in 0..n_eq {
        let mut reps: Vec<ResidualReport> = computed.iter().map(|l| l[e].report.clone()).collect();
        let slope = if reps.len() > 1 { attach_slope(&mut reps) } else { None };
        for (l, r) in computed.iter_mut().zip(reps) {
            l[e].report = r;
        }
        slopes.insert(computed[0][e].report.equation.clone(), slope);
    }

    let out = VerifyOutput {
        source,
        caveat,
        levels: levels
            .iter()
            .zip(&computed)
            .map(|((a, _), r)| VerifyLevel {
                nu: a.grid.nu,
                nv: a.grid.nv,
                admissible: a.mask.count(),
                reports: r.iter().map(|x| x.report.clone()).collect(),
            })
            .collect(),
        slopes,
    };
    write(&cfg.out, "residuals.json", &json(&out))?;
    let finest = computed.last().expect("at least one level");
    for r in finest {
        write(&cfg.out, &format!("residual_{}.csv", r.report.equation), &r.to_csv())?;
    }

    let _ = writeln!(s, "{}", out.source);
    for (lvl, r) in out.levels.iter().zip(&computed) {
        let _ = writeln!(s, "grid {}x{} (h = {:.4e}):", lvl.nu, lvl.nv, r[0].report.h());
        for x in r {
            let _ = writeln!(
                s,
                "  {:<10} max {:.6e}  l2 {:.6e}  interior {}",
                x.report.equation, x.report.max_abs, x.report.l2, x.report.n_interior
            );
        }
    }
    for (eq, slope) in &out.slopes {
        if let Some(p) = slope {
            let _ = writeln!(s, "slope {eq:<10} {p:.4}");
        }
    }
    let _ = writeln!(s, "wrote residuals.json to {}", cfg.out.display());
    Ok(s)
}

#[derive(Serialize)]
struct SurfaceReport {
    vertices: usize,
    triangles: usize,
    closure_residual: f64,
    branch_conflicts: usize,
    canonicity_max: [f64; 2],
    conformal_factor_alpha: [f64; 2],
}

pub fn surface(cfg: &RunConfig, proj: Option<&str>) -> Result<String, CliError> {
    let g = generator(cfg)?;
    let proj = cfg.projection(proj)?;
    let frame = phi_frame(&g, &cfg.grid, cfg.tol).map_err(|e| CliError::Input(e.to_string()))?;
    require_admissible(&frame.mask)?;
    let comps = frame.mask.components(frame.basepoint).len();
    if comps > 1 {
        return Err(CliError::Numeric(format!(
            "admissible set splits into {comps} components; the basepoint component does not cover it ({})",
            mask_breakdown(&frame.mask)
        )));
    }
    let a = alpha_field(&g, &cfg.grid, cfg.tol);
    let mesh = integrate_surface(&frame)
        .map_err(|e| CliError::Numeric(e.to_string()))?
        .with_curvatures(&curvatures(&a));
    let sf = second_fundamental(&jet(&frame, cfg.tol));
    let mut can = [0.0f64; 2];
    let mut ea: Option<(f64, f64)> = None;
    for (idx, p) in sf.points.iter().enumerate() {
        let Some(p) = p else { continue };
        let (c1, c2) = p.canonicity();
        can[0] = can[0].max(c1.abs());
        can[1] = can[1].max((c2 - 1.0).abs());
        if let Some(al) = a.values[idx] {
            let x = p.e * al.norm();
            ea = Some(ea.map_or((x, x), |(lo, hi)| (lo.min(x), hi.max(x))));
        }
    }
    export_mesh(&mesh, proj, &cfg.out, "surface").map_err(|e| CliError::Input(e.to_string()))?;
    let ea = ea.unwrap_or((f64::NAN, f64::NAN));
    let report = SurfaceReport {
        vertices: mesh.vertex_count(),
        triangles: mesh.triangles.len(),
        closure_residual: mesh.closure_residual,
        branch_conflicts: frame.branch_conflicts,
        canonicity_max: can,
        conformal_factor_alpha: [ea.0, ea.1],
    };
    write(&cfg.out, "surface.json", &json(&report))?;

    let mut s = String::new();
    let _ = writeln!(s, "rep {}, {}", g.rep(), grid_line(&cfg.grid));
    let _ = writeln!(s, "vertices {}, triangles {}", report.vertices, report.triangles);
    let _ = writeln!(s, "closure residual {:.3e}", report.closure_residual);
    if report.branch_conflicts > 0 {
        let _ = writeln!(s, "warning: {} edges cross a branch cut of the square root", report.branch_conflicts);
    }
    let _ = writeln!(s, "canonicity: max |<s11,s12>| = {:.3e}, max |<s11,s11> - <s12,s12> - 1| = {:.3e}", can[0], can[1]);
    let _ = writeln!(s, "E*|alpha| in [{:.15}, {:.15}]", ea.0, ea.1);
    let [x, y, z] = proj.0;
    let _ = writeln!(s, "wrote surface.obj (axes x{x} x{y} x{z}), surface.csv, surface.json to {}", cfg.out.display());
    Ok(s)
}

fn params_or_random(cfg: &RunConfig, flag: Option<&str>) -> Result<Params, CliError> {
    Ok(match cfg.params(flag)? {
        Some(p) => p,
        None => Params::random(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    })
}

#[derive(Serialize)]
struct TransformOutput {
    input: PairSpec,
    params: Params,
    output: PairSpec,
}

fn g_spec(p: &PairG<f64>) -> PairSpec {
    Pair::G(p.clone()).to_spec()
}

pub fn transform_cmd(cfg: &RunConfig, params: Option<&str>) -> Result<String, CliError> {
    let p = as_g(&generator(cfg)?)?;
    let m = params_or_random(cfg, params)?;
    let q = transform(&p, &m);
    let out = TransformOutput { input: g_spec(&p), params: m, output: g_spec(&q) };
    write(&cfg.out, "transformed.json", &json(&out))?;
    let mut s = String::new();
    let _ = writeln!(s, "params {}", serde_json::to_string(&m).expect("serialisable"));
    let _ = writeln!(s, "g1 = {}", out.output.f1);
    let _ = writeln!(s, "g2 = {}", out.output.f2);
    let _ = writeln!(s, "wrote transformed.json to {}", cfg.out.display());
    Ok(s)
}

#[derive(Serialize)]
struct EquivOutput {
    first: PairSpec,
    second: PairSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Params>,
    evidence: spacelike::Evidence,
}

pub fn equiv(
    cfg: &RunConfig,
    other: (Option<&str>, Option<&str>),
    params: Option<&str>,
    rel_tol: Option<f64>,
) -> Result<String, CliError> {
    let g = generator(cfg)?;
    let p = as_g(&g)?;
    let other_f1 = other.0.or(cfg.file.other_f1.as_deref());
    let other_f2 = other.1.or(cfg.file.other_f2.as_deref());
    let (q, m) = match (other_f1, other_f2) {
        (Some(a), Some(b)) => {
            let h = Pair::parse(cfg.rep, a, b).map_err(|e| CliError::Input(format!("other pair: {e}")))?;
            (as_g(&h)?, None)
        }
        (None, None) => {
            let m = params_or_random(cfg, params)?;
            (transform(&p, &m), Some(m))
        }
        _ => return Err(CliError::Input("--other-f1 and --other-f2 must be given together".into())),
    };
    let rel_tol = rel_tol.or(cfg.file.rel_tol).unwrap_or(1e-9);
    let e = same_solution(&p, &q, &cfg.grid, cfg.tol, rel_tol).map_err(|e| CliError::Numeric(e.to_string()))?;
    let out = EquivOutput { first: g_spec(&p), second: g_spec(&q), params: m, evidence: e.clone() };
    write(&cfg.out, "equiv.json", &json(&out))?;
    let mut s = String::new();
    let _ = writeln!(s, "first  g1 = {}, g2 = {}", out.first.f1, out.first.f2);
    let _ = writeln!(s, "second g1 = {}, g2 = {}", out.second.f1, out.second.f2);
    let _ = writeln!(s, "common admissible points {}/{}", e.n_common, e.n_total);
    let _ = writeln!(
        s,
        "max relative deviation {:.6e} at ({}, {})",
        e.max_rel_deviation, e.worst_point[0], e.worst_point[1]
    );
    let _ = writeln!(s, "same solution: {}", e.same);
    if cfg.rep != Rep::G {
        let _ = writeln!(s, "(pairs compared through their g-form)");
    }
    Ok(s)
}
