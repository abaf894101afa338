use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use mixsyn::fir::expand;
use mixsyn::lti::Polynomial;
use mixsyn::synthesis::admissible_interval;
use mixsyn::{design, solve_bezout, verify, Controller, Design, Error, Result};

use crate::config::RunConfig;

/// Outcome of a subcommand that ran to completion but did not meet its
/// acceptance condition.
pub enum Status {
    Ok,
    ToleranceExceeded(String),
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_controller(path: &Path) -> Result<Controller> {
    Controller::load(path)
        .inspect_err(|_| eprintln!("error: cannot load controller from {}", path.display()))
}

fn coeff_row(out: &mut String, label: &str, p: &Polynomial) {
    let _ = write!(out, "{label:<8}");
    for c in p.coeffs() {
        let _ = write!(out, " {c:>14.6}");
    }
    out.push('\n');
}

pub fn summary(d: &Design) -> String {
    let c = &d.controller;
    let s = &d.search;
    let (lo, hi) = admissible_interval(&d.weights);
    let mut out = String::new();
    let _ = writeln!(out, "gamma_opt = {:.4}", s.gamma_opt);
    let _ = writeln!(out, "gamma_opt (full precision) = {:.16e}", s.gamma_opt);
    let _ = writeln!(out, "admissible interval = ({lo:.6}, {hi:.6})");
    let _ = writeln!(out, "sigma_min / sigma_max at gamma_opt = {:.3e}", s.ratio);
    let _ = writeln!(
        out,
        "null vector [l10, l11, l20, l21] = [{:.6}, {:.6}, {:.6}, {:.6}]",
        s.l[0], s.l[1], s.l[2], s.l[3]
    );
    let _ = writeln!(out, "k_f = {:.6}", c.k_f);
    let _ = writeln!(out, "h = {}", c.h);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "C(s) = (k_f + (A(s) + B(s) e^(-hs)) / D(s)) / K1(s), K1 = N1 / D1"
    );
    let _ = writeln!(out, "coefficients in ascending powers of s:");
    coeff_row(&mut out, "N1", c.k1.num());
    coeff_row(&mut out, "D1", c.k1.den());
    coeff_row(&mut out, "A", c.a.num());
    coeff_row(&mut out, "B", c.b.num());
    coeff_row(&mut out, "D", c.shared_den());
    out
}

pub fn synthesize(cfg: &RunConfig, out_dir: &Path) -> Result<Status> {
    let d = design(cfg.plant, cfg.weights)?;
    fs::create_dir_all(out_dir)?;
    d.controller.save(&out_dir.join("controller.json"))?;

    let mut scan = create(&out_dir.join("gamma_scan.csv"))?;
    writeln!(scan, "gamma,ratio")?;
    for (g, r) in &d.search.curve {
        writeln!(scan, "{g:.16e},{r:.16e}")?;
    }
    scan.flush()?;

    let text = summary(&d);
    fs::write(out_dir.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(Status::Ok)
}

pub fn verify_controller(cfg: &RunConfig, controller: &Path, out_dir: &Path) -> Result<Status> {
    let c = load_controller(controller)?;
    if c.h != cfg.plant.h {
        return Err(Error::InvalidParams(format!(
            "controller delay h = {} differs from plant delay h = {}",
            c.h, cfg.plant.h
        )));
    }
    let fact = mixsyn::factor_plant(cfg.plant)?;
    let bez = solve_bezout(&fact)?;
    let report = verify(&fact, &bez, &c, &cfg.weights, c.gamma_opt, &cfg.grid)?;

    fs::create_dir_all(out_dir)?;
    report.save_json(&out_dir.join("report.json"))?;
    let mut csv = create(&out_dir.join("magnitude.csv"))?;
    report.write_magnitude_csv(&mut csv)?;
    csv.flush()?;

    println!("gamma_opt = {:.6}", report.gamma_opt);
    println!("achieved_norm = {:.6}", report.achieved_norm);
    println!("relative_error = {:.3e}", report.relative_error);
    println!("peak_frequency = {:.6}", report.peak_frequency);
    println!("max |Q1(jw)| = {:.6}", report.q1_bound);
    if report.within(cfg.tolerance) {
        Ok(Status::Ok)
    } else {
        Ok(Status::ToleranceExceeded(format!(
            "achieved norm {:.6} differs from gamma_opt {:.6} by {:.3e} (tolerance {:.3e})",
            report.achieved_norm, report.gamma_opt, report.relative_error, cfg.tolerance
        )))
    }
}

pub fn impulse(controller: &Path, t_max: f64, dt: f64, out: &Path) -> Result<Status> {
    let c = load_controller(controller)?;
    let e = expand(&c)?;
    // Validate the window before touching the output file.
    e.sample(t_max, dt)?;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = create(out)?;
    let inside = e.write_trace(&mut w, t_max, dt)?;
    w.flush()?;
    let (th, weight) = e.delta();
    println!(
        "finite_support_residual = {:.3e}",
        e.finite_support_residual()
    );
    if inside {
        println!("delta at t = {th}, weight = {weight:.6}");
    } else {
        eprintln!(
            "warning: t_max = {t_max} < h = {th}; the delta atom at t = h lies outside the trace"
        );
    }
    Ok(Status::Ok)
}
