//! One handler per subcommand. Handlers validate, compute through the
//! library, and assemble the `results` block; the envelope plumbing lives
//! in `main`. Numbers in results are emitted as {value, tol} pairs so a
//! report states how accurate each entry is, not just what it is.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use h2xr::annulussolver::{build_chart, solve, ChartSpec, SolveOptions};
use h2xr::catenoid::Catenoid;
use h2xr::flux_center::{
    catenoid_end_traces, center_invariants, conservation_residuals, finite_radius_vertical_flux,
    flux_dilational, flux_rotational, flux_vertical, membership,
    translated_catenoid_bottom_defect,
};
use h2xr::geometry::DiskPoint;
use h2xr::graphsolver::{solve_annulus, solve_disk, GraphSolution, GridSpec, NewtonOptions};
use h2xr::jacobi::{
    kernel_report, translation_field_residual, vertical_field_residual, WeightForm,
};
use h2xr::mesh;
use h2xr::obstruction;
use h2xr::par::Exec;
use h2xr::tallrect::TallRectangle;
use h2xr::verify;

use crate::input;
use crate::{CliError, CliResult, Completed};

/// {value, tol} — tol is the accuracy the number was computed to.
fn q(value: f64, tol: f64) -> Value {
    json!({"value": value, "tol": tol})
}

fn config_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("config serializes")
}

fn out_path(path: &Option<PathBuf>) -> Option<PathBuf> {
    path.as_ref().map(|p| input::resolve_out(p))
}

/// Shared --kappa/--half-height resolution; returns the catenoid and the
/// accuracy of its parameter (exact if given, root-solve tol if derived).
fn catenoid_of(kappa: Option<f64>, half_height: Option<f64>) -> CliResult<(Catenoid, f64)> {
    match (kappa, half_height) {
        (Some(k), None) => Ok((Catenoid::from_kappa(k)?, 0.0)),
        (None, Some(h)) => Ok((Catenoid::from_half_height(h)?, 1e-12)),
        _ => Err(CliError::Usage(
            "exactly one of --kappa and --half-height is required".into(),
        )),
    }
}

fn save_mesh(mesh: &mesh::TriMesh, path: &PathBuf) -> CliResult<PathBuf> {
    let resolved = input::resolve_out(path);
    mesh.save(&resolved, input::mesh_format(&resolved))?;
    Ok(resolved)
}

// ---------------------------------------------------------------- catenoid

#[derive(Args, Serialize)]
pub struct CatenoidArgs {
    /// Asymptotic slope parameter κ > 0.
    #[arg(long, required_unless_present = "half_height", conflicts_with = "half_height")]
    kappa: Option<f64>,
    /// Half-height h ∈ (0, π/2) of the pair of ideal boundary circles.
    #[arg(long)]
    half_height: Option<f64>,
    /// Profile nodes; an odd count puts a node exactly on the waist.
    #[arg(long, default_value_t = 513)]
    nodes: usize,
    /// Write the profile as CSV (t, r, r_prime).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the surface of revolution (.obj, or .ply by extension).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Angular sectors of the exported mesh.
    #[arg(long, default_value_t = 96)]
    sectors: usize,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn catenoid(args: &CatenoidArgs) -> CliResult<Completed> {
    let (cat, kappa_tol) = catenoid_of(args.kappa, args.half_height)?;
    let profile = cat.profile(args.nodes)?;
    let kappa = cat.kappa();
    let closed_neck = (1.0 + kappa * kappa).sqrt() - kappa;

    let mut results = json!({
        "kappa": q(kappa, kappa_tol),
        "half_height": q(cat.half_height(), 1e-11),
        "neck_radius": q(cat.neck_radius(), 1e-15),
        "neck_closed_form_residual": q((cat.neck_radius() - closed_neck).abs(), 1e-15),
        "outer_radius": q(cat.outer_root(), 1e-14),
        "ideal_boundary_slope": q(cat.ideal_boundary_slope(), 1e-15),
        "first_integral_residual": {
            "value": profile.first_integral_residual(),
            "tol": 1e-4,
            "nodes": args.nodes,
        },
    });

    if let Some(path) = &args.out {
        let resolved = input::resolve_out(path);
        let mut csv = String::from("t,r,r_prime\n");
        for k in 0..profile.len() {
            csv.push_str(&format!(
                "{:.12e},{:.12e},{:.12e}\n",
                profile.t[k], profile.r[k], profile.r_prime[k]
            ));
        }
        input::write_text(&resolved, &csv)?;
        results["profile_csv"] = json!(resolved.display().to_string());
    }
    if let Some(path) = &args.mesh {
        let m = mesh::catenoid_mesh(&cat, args.nodes.saturating_sub(1).max(2), args.sectors)?;
        let resolved = save_mesh(&m, path)?;
        results["mesh"] = json!(resolved.display().to_string());
    }

    Ok(Completed {
        command: "catenoid",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// ------------------------------------------------------------------ jacobi

#[derive(Args, Serialize)]
pub struct JacobiArgs {
    /// Asymptotic slope parameter κ > 0.
    #[arg(long, required_unless_present = "half_height", conflicts_with = "half_height")]
    kappa: Option<f64>,
    /// Half-height h ∈ (0, π/2).
    #[arg(long)]
    half_height: Option<f64>,
    /// Interior nodes at the coarsest refinement level.
    #[arg(long, default_value_t = 128)]
    base_nodes: usize,
    /// Largest angular mode in the census.
    #[arg(long, default_value_t = 3)]
    modes: usize,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn jacobi(args: &JacobiArgs, exec: Exec) -> CliResult<Completed> {
    let (cat, _) = catenoid_of(args.kappa, args.half_height)?;
    let report = kernel_report(&cat, args.base_nodes, args.modes, WeightForm::Flat, exec)?;
    let scale = (cat.kappa() * cat.kappa()).max(1.0);
    let results = json!({
        "kernel_dimension": report.dimension,
        "modes": serde_json::to_value(&report.modes).expect("modes serialize"),
        // Classification thresholds, in the operator scale max(1, κ²).
        "scale": scale,
        "kernel_zero_threshold": 1e-6 * scale,
        "nonzero_floor": 1e-4 * scale,
        "field_residuals": {
            "horizontal": {"value": translation_field_residual(&cat, 512)?, "tol": 1e-3 * scale, "nodes": 512},
            "vertical": {"value": vertical_field_residual(&cat, 512)?, "tol": 1e-3 * scale, "nodes": 512},
        },
    });
    Ok(Completed {
        command: "jacobi",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// ------------------------------------------------------------------- graph

#[derive(Args, Serialize)]
pub struct GraphArgs {
    /// Boundary curve on the unit circle (JSON terms or samples).
    #[arg(long)]
    outer: PathBuf,
    /// Inner boundary curve; switches to the annulus domain.
    #[arg(long, requires = "inner_radius")]
    inner: Option<PathBuf>,
    /// Radius of the inner circle, in (0, 1).
    #[arg(long, requires = "inner")]
    inner_radius: Option<f64>,
    #[arg(long, default_value_t = 96)]
    rings: usize,
    #[arg(long, default_value_t = 96)]
    sectors: usize,
    /// Newton residual target (∞-norm). The attainable floor grows with
    /// grid size; the solver refuses rather than report a stalled state.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Export the solved graph surface (.obj or .ply).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn flux_summary(sol: &GraphSolution, rings: usize) -> (Value, f64, f64) {
    let probe = [rings / 4, rings / 2, rings - 1];
    let values: Vec<f64> = probe.iter().map(|&r| sol.ring_flux(r)).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    let per_ring: Vec<Value> = probe
        .iter()
        .zip(&values)
        .map(|(r, v)| json!({"ring": r, "value": v}))
        .collect();
    (json!(per_ring), mean, spread)
}

pub fn graph(args: &GraphArgs) -> CliResult<Completed> {
    let outer = input::load_curve(&args.outer)?;
    let grid = GridSpec { rings: args.rings, sectors: args.sectors };
    let opts = NewtonOptions { tol: args.tol, max_iter: args.max_iter };
    let (sol, domain) = match (&args.inner, args.inner_radius) {
        (Some(path), Some(r)) => {
            let inner = input::load_curve(path)?;
            (solve_annulus(r, &inner, &outer, grid, &opts)?, "annulus")
        }
        _ => (solve_disk(&outer, grid, &opts)?, "disk"),
    };

    let (per_ring, mean, spread) = flux_summary(&sol, args.rings);
    let mut results = json!({
        "domain": domain,
        "iterations": sol.newton_residuals.len(),
        "newton_residuals": sol.newton_residuals,
        // Discrete fluxes telescope, so the spread across rings bounds the
        // extraction error of the flux itself.
        "vertical_flux": q(mean, spread.max(1e-12)),
        "ring_fluxes": per_ring,
        "flux_constancy_spread": q(spread, 1e-6),
    });
    if domain == "disk" {
        results["net_flux_bound"] = q(mean.abs(), 1e-4);
    }
    if let Some(path) = &args.mesh {
        let resolved = save_mesh(&mesh::graph_mesh(&sol), path)?;
        results["mesh"] = json!(resolved.display().to_string());
    }
    Ok(Completed {
        command: "graph",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// ----------------------------------------------------------------- annulus

#[derive(Args, Serialize)]
pub struct AnnulusArgs {
    /// Asymptotic slope parameter of the chart catenoid.
    #[arg(long, required_unless_present = "half_height", conflicts_with = "half_height")]
    kappa: Option<f64>,
    /// Half-height of the chart catenoid.
    #[arg(long)]
    half_height: Option<f64>,
    /// Boundary pair file (JSON: upper/lower terms or samples).
    #[arg(long)]
    pair: PathBuf,
    #[arg(long, default_value_t = 96)]
    t_intervals: usize,
    #[arg(long, default_value_t = 96)]
    sectors: usize,
    /// Blend width of the transversal field (default h/8).
    #[arg(long)]
    blend: Option<f64>,
    /// Rotational fold order m; detected from the pair when omitted.
    #[arg(long)]
    symmetry: Option<usize>,
    /// Push through a near-singular unfolded linearization.
    #[arg(long)]
    damped: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Export the solved annulus (.obj or .ply).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn annulus(args: &AnnulusArgs) -> CliResult<Completed> {
    let (cat, _) = catenoid_of(args.kappa, args.half_height)?;
    let pair = input::load_pair(&args.pair)?;
    let chart = build_chart(
        &cat,
        &ChartSpec {
            t_intervals: args.t_intervals,
            sectors: args.sectors,
            blend_width: args.blend,
        },
    )?;
    // Invariance under order m implies invariance under every divisor, so
    // the detected order folds down to the sector count safely.
    let symmetry = match args.symmetry {
        Some(m) => m,
        None => gcd(
            obstruction::symmetry_detect(&pair, 1e-10, obstruction::DEFAULT_SYMMETRY_MAX).order,
            args.sectors,
        ),
    };
    let opts = SolveOptions {
        symmetry,
        tol: args.tol,
        max_iter: args.max_iter,
        damped_least_squares: args.damped,
    };
    let sol = solve(&chart, &pair, &opts)?;
    let (top, bottom) = sol.end_traces()?;
    let cons = conservation_residuals(&top, &bottom)?;
    let reference = std::f64::consts::TAU / cat.kappa();

    let mut results = json!({
        "symmetry_used": symmetry,
        "iterations": sol.newton_residuals.len(),
        "newton_residuals": sol.newton_residuals,
        "conservation": {
            "vertical": q(cons.vertical, 1e-4),
            "rotational": q(cons.rotational, 1e-4),
            "dilational": q(cons.dilational, 1e-4),
        },
        "vertical_flux": {
            "top": q(flux_vertical(&top), cons.vertical.max(1e-6)),
            "bottom": q(flux_vertical(&bottom), cons.vertical.max(1e-6)),
            "catenoid_reference": q(reference, 1e-12),
        },
    });
    if let Some(path) = &args.mesh {
        let resolved = save_mesh(&mesh::annulus_mesh(&sol), path)?;
        results["mesh"] = json!(resolved.display().to_string());
    }
    Ok(Completed {
        command: "annulus",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// -------------------------------------------------------------------- flux

#[derive(Args, Serialize)]
pub struct FluxArgs {
    /// Asymptotic slope parameter κ > 0.
    #[arg(long, required_unless_present = "half_height", conflicts_with = "half_height")]
    kappa: Option<f64>,
    /// Half-height h ∈ (0, π/2).
    #[arg(long)]
    half_height: Option<f64>,
    /// Angular samples per end trace.
    #[arg(long, default_value_t = 128)]
    samples: usize,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn flux(args: &FluxArgs) -> CliResult<Completed> {
    let (cat, _) = catenoid_of(args.kappa, args.half_height)?;
    let kappa = cat.kappa();
    let expected = std::f64::consts::TAU / kappa;
    let (top, bottom) = catenoid_end_traces(&cat, args.samples);
    let cons = conservation_residuals(&top, &bottom)?;

    let neck = cat.neck_radius();
    let mut finite: Vec<Value> = Vec::new();
    let mut spread = 0.0f64;
    for &frac in &[0.15, 0.35, 0.55, 0.75, 0.95] {
        let rho = neck + (1.0 - neck) * frac;
        let value = finite_radius_vertical_flux(&cat, rho)?;
        spread = spread.max((value - expected).abs());
        finite.push(json!({"radius": rho, "value": value}));
    }

    let results = json!({
        "reference_2pi_over_kappa": q(expected, 1e-14),
        "vertical_flux": {
            "top": q(flux_vertical(&top), 1e-10),
            "bottom": q(flux_vertical(&bottom), 1e-10),
        },
        "rotational_flux": {
            "top": q(flux_rotational(&top), 1e-12),
            "bottom": q(flux_rotational(&bottom), 1e-12),
        },
        "dilational_flux": {
            "top": q(flux_dilational(&top, 0.0), 1e-12),
            "bottom": q(flux_dilational(&bottom, 0.0), 1e-12),
        },
        "conservation": {
            "vertical": q(cons.vertical, 1e-12),
            "rotational": q(cons.rotational, 1e-12),
            "dilational": q(cons.dilational, 1e-12),
        },
        "finite_radius_flux": finite,
        "finite_radius_spread": q(spread, 1e-6),
    });
    Ok(Completed {
        command: "flux",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// ------------------------------------------------------------------ center

#[derive(Args, Serialize)]
pub struct CenterArgs {
    /// Asymptotic slope parameter κ > 0.
    #[arg(long, required_unless_present = "half_height", conflicts_with = "half_height")]
    kappa: Option<f64>,
    /// Half-height h ∈ (0, π/2).
    #[arg(long)]
    half_height: Option<f64>,
    /// Horizontal translation applied to the annulus (disk coordinates).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y: f64,
    /// Angular samples of the bottom-end defect.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn center(args: &CenterArgs) -> CliResult<Completed> {
    let (cat, _) = catenoid_of(args.kappa, args.half_height)?;
    let z0 = DiskPoint::new(args.x, args.y)?;
    let defect = translated_catenoid_bottom_defect(&cat, &z0, args.samples)?;
    let inv = center_invariants(&defect)?;
    let (cx, cy) = inv.center;
    let results = json!({
        "membership": membership(&defect),
        "invariants": serde_json::to_value(inv).expect("invariants serialize"),
        "center": {"x": q(cx, 1e-4), "y": q(cy, 1e-4)},
        "recovery_error": q((cx - args.x).hypot(cy - args.y), 1e-4),
    });
    Ok(Completed {
        command: "center",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// ---------------------------------------------------------------- tallrect

#[derive(Args, Serialize)]
pub struct TallrectArgs {
    /// Half-width parameter d > 1 of the rectangle pair.
    #[arg(long)]
    d: f64,
    /// Cut-family exponent; a safe default is picked from the shape.
    #[arg(long)]
    n: Option<usize>,
    /// Scan for a certified area-comparison witness.
    #[arg(long)]
    scan: bool,
    /// Export the doubled slab surface (.obj or .ply).
    #[arg(long)]
    export: Option<PathBuf>,
    /// Window radius for the exported mesh.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Window angle for the exported mesh, as a fraction of θ0.
    #[arg(long, default_value_t = 0.25)]
    theta_frac: f64,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn tallrect(args: &TallrectArgs, exec: Exec) -> CliResult<Completed> {
    let rect = TallRectangle::new(args.d)?;
    let mut results = json!({
        "theta0": q(rect.theta0(), 1e-15),
        "height": q(rect.height(), rect.height_error()),
        "height_excess_over_pi": q(rect.height() - std::f64::consts::PI, rect.height_error()),
        "minimal_power": rect.minimal_power(),
    });
    if args.scan {
        let witness = rect.find_witness(args.n, exec)?;
        results["witness"] = serde_json::to_value(witness).expect("witness serializes");
        // The certified statement: f exceeds 1 by at least the margin.
        results["f_value"] = q(witness.ratio, witness.error_bound);
        results["margin"] = q(witness.margin(), 0.0);
    }
    if let Some(path) = &args.export {
        let theta_min = args.theta_frac * rect.theta0();
        let m = mesh::tallrect_mesh(&rect, args.r, theta_min, 48, 24)?;
        let resolved = save_mesh(&m, path)?;
        results["mesh"] = json!(resolved.display().to_string());
    }
    Ok(Completed {
        command: "tallrect",
        config: config_of(args),
        results,
        out: out_path(&args.report),
    })
}

// -------------------------------------------------------------------- gate

#[derive(Args, Serialize)]
pub struct GateArgs {
    /// Boundary pair file (JSON: upper/lower terms or samples).
    #[arg(long)]
    pair: PathBuf,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn gate(args: &GateArgs) -> CliResult<Completed> {
    let pair = input::load_pair(&args.pair)?;
    let report = obstruction::evaluate(&pair);
    Ok(Completed {
        command: "gate",
        config: config_of(args),
        results: serde_json::to_value(report).expect("report serializes"),
        out: out_path(&args.report),
    })
}

// -------------------------------------------------------------- verify-all

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// Run a single named check instead of the full battery.
    #[arg(long)]
    check: Option<String>,
    /// Emit the JSON envelope instead of the text table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON envelope here.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Owns its exit code: 0 all passed, 1 unknown check name, 3 any failure.
pub fn verify_all(args: &VerifyArgs, exec: Exec) -> i32 {
    let started = Instant::now();
    let checks = match &args.check {
        Some(name) => match verify::run_check(name, exec) {
            Some(check) => vec![check],
            None => {
                eprintln!(
                    "error: unknown check '{name}'; available: {}",
                    verify::CHECK_NAMES.join(", ")
                );
                return 1;
            }
        },
        None => verify::run_all(exec),
    };
    let all_passed = checks.iter().all(|c| c.passed);

    let needs_json = args.json || args.report.is_some();
    let envelope = if needs_json {
        // Per-check seconds move into the timing block so the results stay
        // byte-identical across runs.
        let stripped: Vec<Value> = checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "error": c.error,
                    "measurements": serde_json::to_value(&c.measurements).expect("measurements serialize"),
                })
            })
            .collect();
        let per_check: serde_json::Map<String, Value> = checks
            .iter()
            .map(|c| (c.name.to_string(), json!(c.seconds)))
            .collect();
        Some(json!({
            "command": "verify-all",
            "config": config_of(args),
            "results": {"all_passed": all_passed, "checks": stripped},
            "timing": {"seconds": started.elapsed().as_secs_f64(), "per_check": per_check},
            "version": env!("CARGO_PKG_VERSION"),
        }))
    } else {
        None
    };

    if let Some(envelope) = &envelope {
        let text = serde_json::to_string_pretty(envelope).expect("envelope serializes");
        if args.json {
            println!("{text}");
        }
        if let Some(path) = &args.report {
            let resolved = input::resolve_out(path);
            if let Err(e) = std::fs::write(&resolved, text.clone() + "\n") {
                eprintln!("error: cannot write {}: {e}", resolved.display());
                return 2;
            }
        }
    }
    if !args.json {
        for check in &checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            println!("{status}  {:<26} {:>7.2} s", check.name, check.seconds);
            if let Some(err) = &check.error {
                println!("      aborted: {err}");
            } else if !check.passed {
                for m in check.measurements.iter().filter(|m| !m.ok) {
                    let rel = match m.direction {
                        verify::Direction::Below => "<",
                        verify::Direction::Above => ">",
                    };
                    println!("      {}: {:.6e} {} {:.6e} violated", m.label, m.value, rel, m.bound);
                }
            }
        }
        let passed = checks.iter().filter(|c| c.passed).count();
        println!(
            "{passed}/{} checks passed in {:.2} s",
            checks.len(),
            started.elapsed().as_secs_f64()
        );
    }
    if all_passed { 0 } else { 3 }
}
