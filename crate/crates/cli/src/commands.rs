use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use cnroots::analyze::{
    check_hermitian, check_positive_definite, check_power_identity, check_support, classic_atoms,
    classic_pair, explore_cn, phase_profile, Atom, CfGrid, ClassicWhich, PdMethod, PdParams,
    PdTarget, PhaseProfile, PhaseTolerances, VerificationReport,
};
use cnroots::config::{OutputFormat, RunConfig, Tolerances};
use cnroots::construct::{Blueprint, Member};
use cnroots::distribution::DensityView;
use cnroots::family::{enumerate, manifest, PhaseVector};
use cnroots::kernel::verify_kernel;
use cnroots::Error;
use serde::Serialize;

pub const OUT_ENV: &str = "CNROOTS_OUT";

/// A failed run, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    /// A requested check did not pass (exit 1).
    Check(String),
    /// Bad input: config, curve files, flags (exit 2).
    Input(String),
    /// A tolerance the library should always meet was not met (exit 3).
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal tolerance breach: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ToleranceUnreachable { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Command-line settings that take precedence over the config file.
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tol: Vec<String>,
}

struct Run {
    config: RunConfig,
    out: PathBuf,
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn apply_tolerances(
    base: Tolerances,
    pairs: &[String],
) -> std::result::Result<Tolerances, Failure> {
    if pairs.is_empty() {
        return Ok(base);
    }
    let mut value = serde_json::to_value(base).expect("tolerances serialize");
    for pair in pairs {
        let (name, raw) = pair
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("--tol expects NAME=VALUE, got `{pair}`")))?;
        let v: f64 = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("--tol {name}: `{raw}` is not a number")))?;
        if v.is_nan() || v < 0.0 {
            return Err(Failure::Input(format!("--tol {name}: must be nonnegative")));
        }
        value[name.trim()] = serde_json::json!(v);
    }
    serde_json::from_value(value).map_err(|e| Failure::Input(format!("--tol: {e}")))
}

fn load(path: &Path, ov: &Overrides) -> std::result::Result<Run, Failure> {
    let text = read(path)?;
    let mut config = RunConfig::from_json(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    config.tolerances = apply_tolerances(config.tolerances, &ov.tol)?;
    let out = output_dir(ov, config.output.clone());
    Ok(Run { config, out })
}

fn output_dir(ov: &Overrides, from_config: Option<PathBuf>) -> PathBuf {
    ov.out
        .clone()
        .or(from_config)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(dir: &Path, name: &str, contents: &str) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn order(run: &Run, n: Option<u32>) -> std::result::Result<u32, Failure> {
    let n = n.unwrap_or(run.config.n);
    if n < 2 {
        return Err(Error::InvalidOrder(n).into());
    }
    Ok(n)
}

fn blueprint(run: &Run) -> std::result::Result<Blueprint, Failure> {
    Ok(Blueprint::try_from_spec(&run.config.spec)?)
}

fn omega_or_zero(
    bp: &Blueprint,
    omega: Option<&str>,
    n: u32,
) -> std::result::Result<PhaseVector, Failure> {
    let omega = match omega {
        Some(text) => PhaseVector::parse(text, n)?,
        None => PhaseVector::zero(bp.k(), n)?,
    };
    if omega.k() != bp.k() {
        return Err(Error::DimensionMismatch {
            expected: bp.k(),
            got: omega.k(),
        }
        .into());
    }
    Ok(omega)
}

fn pd_params(run: &Run) -> PdParams {
    PdParams {
        t_domain: run.config.t_domain,
        t_step: run.config.t_step,
        x_step: run.config.grid.step,
        tol: None,
    }
}

fn sample_grid(
    run: &Run,
    f: impl Fn(f64) -> cnroots::Complex64 + Sync,
) -> std::result::Result<CfGrid, Failure> {
    Ok(CfGrid::sample(
        run.config.grid.halfwidth,
        run.config.grid.step,
        f,
    )?)
}

pub fn validate(path: &Path, ov: &Overrides) -> Outcome {
    let run = load(path, ov)?;
    let spec = &run.config.spec;
    println!("comp={} rho={}", spec.comp(), spec.rho());
    Ok(())
}

pub fn build(path: &Path, ov: &Overrides) -> Outcome {
    let run = load(path, ov)?;
    let bp = blueprint(&run)?;
    let mut text = bp.to_json();
    text.push('\n');
    write(&run.out, "blueprint.json", &text)
}

pub fn family(path: &Path, ov: &Overrides, n: Option<u32>, cap: Option<u64>) -> Outcome {
    let run = load(path, ov)?;
    let n = order(&run, n)?;
    let bp = blueprint(&run)?;
    let m = manifest(&bp, n, cap.unwrap_or(run.config.enumeration_cap))?;
    write(&run.out, "manifest.json", &to_json(&m))?;
    println!(
        "members={} min_separation={}",
        m.members.len(),
        m.certificate.min_separation
    );
    if !m.certificate.all_distinct {
        return Err(Failure::Internal(format!(
            "family members are not separated: {} < {}",
            m.certificate.min_separation, m.certificate.lower_bound
        )));
    }
    Ok(())
}

fn verify_member(
    run: &Run,
    f: &CfGrid,
    g: &Member<'_>,
    n: u32,
) -> std::result::Result<VerificationReport, Failure> {
    let tol = &run.config.tolerances;
    let spec = &run.config.spec;
    let grid = sample_grid(run, |x| g.eval(x))?;
    let mut params = pd_params(run);
    let tag = g.omega().tag();
    let mut report = VerificationReport::default();
    let mut add = |mut check: cnroots::analyze::CheckReport| {
        check.name = format!("{tag}/{}", check.name);
        report.push(check);
    };
    add(check_hermitian(&grid, tol.hermitian)?);
    add(check_power_identity(f, &grid, n, tol.power)?);
    // The half-infinite tail decays like 2^{-x/rho}, so any relative floor
    // would eventually cut it off; there the support is "exactly nonzero".
    let zero_tol = if spec.has_half_infinite() {
        0.0
    } else {
        tol.zero_rel * grid.max_modulus()
    };
    add(check_support(&grid, spec, Some(zero_tol))?);
    params.tol = Some(tol.pd_closed_form);
    add(check_positive_definite(
        PdTarget::Member(g),
        PdMethod::ClosedForm,
        &params,
    )?);
    if !spec.has_half_infinite() {
        params.tol = Some(tol.pd_quadrature);
        add(check_positive_definite(
            PdTarget::Member(g),
            PdMethod::Quadrature,
            &params,
        )?);
    }
    Ok(report)
}

pub fn verify(path: &Path, ov: &Overrides, n: Option<u32>, omega: Option<&str>) -> Outcome {
    let run = load(path, ov)?;
    let n = order(&run, n)?;
    let bp = blueprint(&run)?;
    let omegas: Vec<PhaseVector> = match omega {
        Some(_) => vec![omega_or_zero(&bp, omega, n)?],
        None => enumerate(n, bp.k(), run.config.enumeration_cap)?.collect(),
    };
    let f = sample_grid(&run, |x| bp.eval_f(x))?;

    let mut report = VerificationReport::default();
    let kernel = verify_kernel(bp.kernel(), run.config.grid.step, run.config.t_domain);
    report.push(kernel_check(kernel)?);
    for omega in &omegas {
        let g = bp.member(omega)?;
        report.merge(verify_member(&run, &f, &g, n)?);
    }
    write(&run.out, "report.json", &to_json(&report))?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    println!("checks={} failed={}", report.checks.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join(", ")))
    }
}

fn kernel_check(
    result: cnroots::Result<cnroots::kernel::KernelReport>,
) -> std::result::Result<cnroots::analyze::CheckReport, Failure> {
    let (passed, measured) = match result {
        Ok(r) => {
            let value = serde_json::to_value(&r).expect("kernel report serializes");
            let measured = value
                .as_object()
                .expect("struct")
                .iter()
                .filter_map(|(k, v)| v.as_f64().map(|v| (k.clone(), v)))
                .collect();
            (true, measured)
        }
        Err(Error::KernelViolation { property, detail }) => {
            eprintln!("kernel violation ({property}): {detail}");
            (false, Default::default())
        }
        Err(e) => return Err(e.into()),
    };
    Ok(cnroots::analyze::CheckReport {
        name: "kernel".into(),
        passed,
        tolerance: 1e-9,
        measured,
    })
}

#[derive(Serialize)]
struct PhaseOutput<'a> {
    #[serde(flatten)]
    profile: &'a PhaseProfile,
    n: u32,
    /// `m_j` with `lambda_j = e^{2πi m_j/n}`, when every constant is a root.
    roots: Option<Vec<u32>>,
}

pub fn phase(path: &Path, ov: &Overrides, f: &Path, g: &Path, n: Option<u32>) -> Outcome {
    let run = load(path, ov)?;
    let n = order(&run, n)?;
    let fg =
        CfGrid::from_csv(&read(f)?).map_err(|e| Failure::Input(format!("{}: {e}", f.display())))?;
    let gg =
        CfGrid::from_csv(&read(g)?).map_err(|e| Failure::Input(format!("{}: {e}", g.display())))?;
    let tol = &run.config.tolerances;
    let ptol = PhaseTolerances {
        modulus: tol.modulus,
        residual: tol.phase_residual,
        zero_rel: tol.zero_rel,
    };
    let profile = match phase_profile(&fg, &gg, &run.config.spec, &ptol) {
        Err(e @ (Error::ModulusMismatch { .. } | Error::NonConstantRatio { .. })) => {
            return Err(Failure::Check(e.to_string()))
        }
        other => other?,
    };
    let roots = profile.roots(n, tol.identify);
    write(
        &run.out,
        "profile.json",
        &to_json(&PhaseOutput {
            profile: &profile,
            n,
            roots: roots.clone(),
        }),
    )?;
    for c in &profile.components {
        println!(
            "lambda[{}] = {:+.12} {:+.12}i",
            c.index, c.lambda.re, c.lambda.im
        );
    }
    match roots {
        Some(r) => {
            let parts: Vec<String> = r.iter().map(u32::to_string).collect();
            println!("roots=({})", parts.join(","));
            Ok(())
        }
        None => Err(Failure::Check(format!(
            "phase constants are not {n}-th roots of unity"
        ))),
    }
}

pub fn explore(path: &Path, ov: &Overrides, f: &Path, n: Option<u32>, cap: Option<u64>) -> Outcome {
    let run = load(path, ov)?;
    let n = order(&run, n)?;
    let fg =
        CfGrid::from_csv(&read(f)?).map_err(|e| Failure::Input(format!("{}: {e}", f.display())))?;
    let mut params = pd_params(&run);
    params.tol = Some(run.config.tolerances.pd_quadrature);
    let cap = cap.unwrap_or(run.config.enumeration_cap);
    let candidates = explore_cn(&fg, &run.config.spec, n, &params, cap)?;
    match run.config.format {
        OutputFormat::Json => write(&run.out, "explore.json", &to_json(&candidates))?,
        OutputFormat::Csv => {
            let mut s = String::from("omega,min_inverse,max_imag,pd_pass\n");
            for c in &candidates {
                let parts: Vec<String> = c.roots.entries().iter().map(u32::to_string).collect();
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    parts.join(" "),
                    c.min_inverse,
                    c.max_imag,
                    c.pd_pass
                );
            }
            write(&run.out, "explore.csv", &s)?;
        }
    }
    let passing = candidates.iter().filter(|c| c.pd_pass).count();
    println!("candidates={} passing={}", candidates.len(), passing);
    Ok(())
}

pub fn density(path: &Path, ov: &Overrides, n: Option<u32>, omega: Option<&str>) -> Outcome {
    let run = load(path, ov)?;
    let n = order(&run, n)?;
    let bp = blueprint(&run)?;
    let omega = omega_or_zero(&bp, omega, n)?;
    let view = DensityView::new(bp.member(&omega)?);
    let tag = omega.tag();
    let curve = view.density_csv(run.config.t_domain, run.config.t_step)?;
    write(&run.out, &format!("density_{tag}.csv"), &curve)?;
    let cf = sample_grid(&run, |x| view.cf(x))?;
    write(&run.out, &format!("cf_{tag}.csv"), &cf.to_csv())
}

pub fn sample(
    path: &Path,
    ov: &Overrides,
    n: Option<u32>,
    omega: Option<&str>,
    count: usize,
    seed: Option<u64>,
) -> Outcome {
    let run = load(path, ov)?;
    if count == 0 {
        return Err(Failure::Input("--count must be at least 1".into()));
    }
    let n = order(&run, n)?;
    let bp = blueprint(&run)?;
    let omega = omega_or_zero(&bp, omega, n)?;
    let view = DensityView::new(bp.member(&omega)?);
    let seed = seed.unwrap_or(run.config.seed);
    let batch = view.sample(count, seed);
    write(
        &run.out,
        &format!("samples_{}.csv", omega.tag()),
        &batch.to_csv(),
    )
}

fn atoms_csv(atoms: &[Atom]) -> String {
    let mut s = String::from("location,weight\n");
    for a in atoms {
        let _ = writeln!(s, "{},{}", a.location, a.weight);
    }
    s
}

pub fn classic(ov: &Overrides, max_harmonic: u32, step: f64) -> Outcome {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Failure::Input(format!(
            "--step must be in (0, 1], got {step}"
        )));
    }
    let out = output_dir(ov, None);
    // one common period, [-2, 2]
    let m = (2.0 / step + 1e-9).floor() as i64;
    let mut curves = String::from("x,f,g\n");
    for i in -m..=m {
        let x = i as f64 * step;
        let (f, g) = classic_pair(x);
        let _ = writeln!(curves, "{x},{f},{g}");
    }
    write(&out, "classic_curves.csv", &curves)?;
    for (which, name) in [(ClassicWhich::F, "f"), (ClassicWhich::G, "g")] {
        let atoms = classic_atoms(which, max_harmonic);
        write(
            &out,
            &format!("classic_atoms_{name}.csv"),
            &atoms_csv(&atoms),
        )?;
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        println!("{name}: atoms={} mass={total}", atoms.len());
    }
    Ok(())
}
