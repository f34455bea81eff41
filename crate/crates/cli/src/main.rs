use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use qrf::error::Error;
use qrf::group::{load_group, FiniteGroup};
use qrf::invariant::DEFAULT_DIM_BUDGET;
use qrf::linalg::{random_complex, seeded_rng, CVector, C64};
use qrf::relative::IDENTITY_TOL;
use qrf::report::VerificationReport;
use qrf::repr::{load_irrep_table, load_rep, validate_irrep_table, IrrepTable, UnitaryRep};
use qrf::suite::{run_suite, SuiteConfig};
use qrf::transform::{build_two_frame, frame_rotation_demo, zero_charge_map, zero_charge_trial};

#[derive(Parser)]
#[command(
    name = "qrf",
    version,
    about = "Finite-group quantum reference frame checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a group table and its irrep table.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full identity suite.
    Suite {
        #[command(flatten)]
        inputs: Inputs,
        /// System representation file.
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario and dump its data as CSV.
    Demo {
        /// `frame-rotation` or `zero-charge`.
        name: String,
        #[command(flatten)]
        inputs: Inputs,
        /// System representation file (default: trivial, dimension 1).
        #[arg(long)]
        system: Option<PathBuf>,
        /// Frame amplitudes φ(g) for frame-rotation, comma separated;
        /// complex values as `re:im`. Default: uniform.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        /// System state ψ for frame-rotation, same format. Default: |0⟩.
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        /// CSV destination (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report destination.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Inputs {
    /// Group file.
    #[arg(long)]
    group: PathBuf,
    /// Irrep table file.
    #[arg(long)]
    irreps: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_DIM_BUDGET)]
    dim_budget: usize,
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
}

impl RunArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            trials: self.trials,
            dim_budget: self.dim_budget,
            tolerance_scale: self.tolerance_scale,
        }
    }
}

/// Failure modes mapped to exit codes.
enum Failure {
    Validation(String),
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DimBudgetExceeded { .. } => Failure::Budget(msg),
            Error::MalformedDocument(_)
            | Error::UnknownDemo(_)
            | Error::DimMismatch { .. }
            | Error::NotNormalized(_)
            | Error::IndexOutOfRange { .. } => Failure::Input(msg),
            _ => Failure::Validation(msg),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_inputs(inputs: &Inputs) -> Result<(Arc<FiniteGroup>, IrrepTable), Failure> {
    let group = Arc::new(load_group(&read(&inputs.group)?)?);
    let table = load_irrep_table(group.clone(), &read(&inputs.irreps)?)?;
    Ok((group, table))
}

fn load_system(group: &Arc<FiniteGroup>, path: Option<&Path>) -> Result<UnitaryRep, Failure> {
    match path {
        Some(p) => Ok(load_rep(group.clone(), &read(p)?)?),
        None => Ok(UnitaryRep::trivial(group.clone(), 1)),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn verdict(report: &VerificationReport) -> Result<(), Failure> {
    if report.passed() {
        return Ok(());
    }
    let names: Vec<&str> = report.failures().map(|e| e.name.as_str()).collect();
    Err(Failure::Validation(format!("failed: {}", names.join(", "))))
}

fn validate(inputs: &Inputs, out: Option<&Path>) -> Result<(), Failure> {
    let (group, table) = load_inputs(inputs)?;
    let mut report = VerificationReport::new(format!("validate {}", group.name()));
    report.check(
        "group axioms",
        "closure, identity, inverses, associativity",
        0.0,
        0.0,
    );
    report.extend(validate_irrep_table(&table));
    emit(&report.to_json(), out)?;
    verdict(&report)
}

fn suite(inputs: &Inputs, system: &Path, run: &RunArgs, out: Option<&Path>) -> Result<(), Failure> {
    let (group, table) = load_inputs(inputs)?;
    let system = load_system(&group, Some(system))?;
    let checks = validate_irrep_table(&table);
    if !checks.passed() {
        emit(&checks.to_json(), out)?;
        return verdict(&checks);
    }
    let report = run_suite(&table, &system, &run.config())?;
    emit(&report.to_json(), out)?;
    for e in report.skipped() {
        eprintln!("SKIPPED {}: {}", e.name, e.note.as_deref().unwrap_or(""));
    }
    verdict(&report)
}

fn parse_amplitudes(text: &str) -> Result<Vec<C64>, Failure> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (re, im) = match tok.split_once(':') {
                Some((r, i)) => (r, i),
                None => (tok, "0"),
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Failure::Input(format!("amplitude `{tok}`: {e}")))
            };
            Ok(C64::new(parse(re)?, parse(im)?))
        })
        .collect()
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn write_csv(rows: Vec<Vec<String>>, out: Option<&Path>) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(
            fs::File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.write_record(&r).map_err(csv_failure)?;
    }
    w.flush().map_err(|e| Failure::Input(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn demo(
    name: &str,
    inputs: &Inputs,
    system: Option<&Path>,
    phi: Option<&str>,
    psi: Option<&str>,
    run: &RunArgs,
    out: Option<&Path>,
    report_out: Option<&Path>,
) -> Result<(), Failure> {
    if !matches!(name, "frame-rotation" | "zero-charge") {
        return Err(Error::UnknownDemo(name.to_string()).into());
    }
    let (group, table) = load_inputs(inputs)?;
    let system = load_system(&group, system)?;
    let setup = build_two_frame(&table, &system, run.dim_budget)?;
    let n = group.order();
    let d = system.dim();
    let (rows, report) = if name == "frame-rotation" {
        let phi = match phi {
            Some(t) => parse_amplitudes(t)?,
            None => vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n],
        };
        let psi = match psi {
            Some(t) => CVector::from_vec(parse_amplitudes(t)?),
            None => {
                let mut v = CVector::zeros(d);
                v[0] = C64::new(1.0, 0.0);
                v
            }
        };
        let out = frame_rotation_demo(&setup, &phi, &psi)?;
        let mut rows = vec![vec!["record", "name", "row", "col", "re", "im"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()];
        let scalar = |record: &str, name: &str, v: f64| {
            vec![
                record.into(),
                name.into(),
                String::new(),
                String::new(),
                v.to_string(),
                "0".into(),
            ]
        };
        rows.push(scalar("purity", "reduced", out.reduced_purity));
        rows.push(scalar("purity", "global", out.global_purity));
        rows.push(scalar("purity", "predicted", out.predicted_purity));
        for e in &out.report.entries {
            rows.push(scalar("residual", &e.name, e.residual.unwrap_or(f64::NAN)));
        }
        let m = out.reduced_state.matrix();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                rows.push(vec![
                    "reduced_state".into(),
                    "rho_AS|B".into(),
                    i.to_string(),
                    j.to_string(),
                    m[(i, j)].re.to_string(),
                    m[(i, j)].im.to_string(),
                ]);
            }
        }
        (rows, out.report)
    } else {
        let spec = setup.twirl_spec()?;
        let dhat = zero_charge_map(&setup)?;
        let mut rng = seeded_rng(run.seed);
        let mut rows = vec![vec![
            "trial".to_string(),
            "invariance_residual".into(),
            "residual".into(),
        ]];
        let (mut inv_max, mut res_max): (f64, f64) = (0.0, 0.0);
        let mut trial = 0;
        while trial < run.trials {
            let phi = CVector::from_fn(setup.dim(), |_, _| random_complex(&mut rng));
            let Some((inv, res)) = zero_charge_trial(&setup, &spec, &dhat, &phi) else {
                continue;
            };
            inv_max = inv_max.max(inv);
            res_max = res_max.max(res);
            rows.push(vec![trial.to_string(), inv.to_string(), res.to_string()]);
            trial += 1;
        }
        let tol = IDENTITY_TOL * run.tolerance_scale;
        let mut report = VerificationReport::new("zero charge demo");
        report.check(
            "group-averaged states are invariant",
            "coherent group averaging",
            inv_max,
            tol,
        );
        report.check(
            "zero-charge map agrees with the frame change",
            "zero-charge sector: D̂ V_A |Ψ⟩ = V_B |Ψ⟩",
            res_max,
            tol,
        );
        (rows, report)
    };
    write_csv(rows, out)?;
    if let Some(p) = report_out {
        emit(&report.to_json(), Some(p))?;
    }
    verdict(&report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { inputs, out } => validate(inputs, out.as_deref()),
        Command::Suite {
            inputs,
            system,
            run,
            out,
        } => suite(inputs, system, run, out.as_deref()),
        Command::Demo {
            name,
            inputs,
            system,
            phi,
            psi,
            run,
            out,
            report,
        } => demo(
            name,
            inputs,
            system.as_deref(),
            phi.as_deref(),
            psi.as_deref(),
            run,
            out.as_deref(),
            report.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qrf: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
