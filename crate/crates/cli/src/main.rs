use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use upml::checks::{kernel_suite, profile_suite};
use upml::config::{unix_now, Config, MediumKind, RunManifest, ValidatedConfig, RNG_ALGORITHM};
use upml::lab::{self, DecayFit, ErrorReport, FIT_CSV_HEADER};
use upml::snapshot;
use upml::yee::{cfl_timestep, ProbeSeries};
use upml::{Error, Medium, Result, Simulation, StretchedKernels};

#[derive(Parser, Debug)]
#[command(name = "upml", version, about = "Time-domain PML truncation: kernels, solver and convergence lab")]
struct Cli {
    /// TOML configuration; every key has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the sampled property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for the inner parallel loops.
    #[arg(long, global = true, env = "UPML_THREADS")]
    threads: Option<usize>,
    /// Also write whitespace-separated `.dat` files for gnuplot.
    #[arg(long, global = true)]
    emit_plots: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Profile and kernel property suites plus the decay-bound report.
    CheckKernels,
    /// One layer run with probe, energy and stability outputs.
    Simulate,
    /// Enlarged-domain vacuum reference recorded on B1.
    Reference,
    /// Reference plus one layer run per (sigma0, d).
    Sweep,
    /// Exponential decay fit of a sweep CSV.
    Fit,
    /// Human-readable summary of the sweep and fit CSVs.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CheckKernels => "check-kernels",
            Command::Simulate => "simulate",
            Command::Reference => "reference",
            Command::Sweep => "sweep",
            Command::Fit => "fit",
            Command::Report => "report",
        }
    }
}

struct Run {
    cli: Cli,
    config: Config,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.cli.out.join(name);
        fs::write(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    fn validated(&self) -> Result<ValidatedConfig> {
        let v = self.config.clone().validate()?;
        for w in &v.warnings {
            log::warn!("{w:?}");
        }
        Ok(v)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    fs::create_dir_all(&cli.out)?;
    let started = unix_now();
    let command = cli.command;
    let mut run = Run { cli, config, outputs: Vec::new() };
    let canonical = run.config.canonical()?;
    run.write("config.echo.toml", &canonical)?;
    let code = match command {
        Command::CheckKernels => check_kernels(&mut run)?,
        Command::Simulate => simulate(&mut run)?,
        Command::Reference => reference(&mut run)?,
        Command::Sweep => sweep(&mut run)?,
        Command::Fit => fit(&mut run)?,
        Command::Report => report(&mut run)?,
    };
    let manifest = RunManifest {
        config_digest: run.config.digest()?,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        started_unix: started,
        finished_unix: unix_now(),
        seed: run.cli.seed,
        rng: RNG_ALGORITHM.to_string(),
        outputs: run.outputs.clone(),
    };
    let path = run.cli.out.join(format!("manifest-{}.toml", command.name()));
    fs::write(path, manifest.to_toml())?;
    Ok(code)
}

fn check_kernels(run: &mut Run) -> Result<u8> {
    let v = run.validated()?;
    let mut rng = ChaCha20Rng::seed_from_u64(run.cli.seed);
    let samples = v.raw.kernels.samples;
    let mut checks = profile_suite(&v.params, samples, &mut rng);
    let kernels = StretchedKernels::new(v.params);
    let (kchecks, report) = kernel_suite(&kernels, samples, 100, &mut rng)?;
    checks.extend(kchecks);
    let mut text = String::new();
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    print!("{text}");
    run.write("kernel_checks.txt", &text)?;
    run.write("decay_bound.csv", report.to_csv())?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        eprintln!("{failed} property checks failed");
        return Ok(3);
    }
    Ok(0)
}

fn simulate(run: &mut Run) -> Result<u8> {
    let v = run.validated()?;
    let dt = cfl_timestep(&v.grid, &v.params, v.raw.grid.cfl)?;
    let medium = match v.raw.pml.medium {
        MediumKind::Pml => Medium::pml(&v.params),
        MediumKind::Vacuum => Medium::vacuum(v.params.eps, v.params.mu),
    };
    let mut sim = Simulation::new(v.grid, medium, dt, &v.params, Some(v.source), v.scatterer)?;
    let probe_at = v.raw.simulate.probe.unwrap_or(v.source.location);
    let mut probe = ProbeSeries::default();
    let mut energy = Vec::new();
    let report = lab::probe_simulation(&mut sim, &v.params, v.raw.simulate.sample_every.max(1), |s| {
        probe.rows.push((s.time(), s.probe(probe_at)));
        energy.push((s.time(), s.energy()));
    })?;
    let mut fields = Vec::new();
    snapshot::write_state(&mut fields, sim.state())?;
    run.write("fields.bin", fields)?;
    run.write("probe.csv", probe.to_csv())?;
    let mut ecsv = String::from("t,energy\n");
    for (t, e) in &energy {
        ecsv.push_str(&format!("{t:.17e},{e:.17e}\n"));
    }
    run.write("energy.csv", ecsv)?;
    run.write("stability.csv", report.to_csv())?;
    if run.cli.emit_plots {
        run.write("probe.dat", csv_to_dat(&probe.to_csv()))?;
        run.write("energy.dat", energy.iter().map(|(t, e)| format!("{t:.10e} {e:.10e}\n")).collect::<String>())?;
    }
    println!(
        "simulate: {} steps, dt = {:.6e}, stability ratio {:.6e}",
        report.steps, dt, report.ratio
    );
    Ok(0)
}

fn reference(run: &mut Run) -> Result<u8> {
    let v = run.validated()?;
    let cfg = v.raw.sweep_config()?;
    cfg.validate()?;
    let time = cfg.time_grid()?;
    let hist = lab::reference_run(&cfg, &time)?;
    let mut csv = String::from("t,l2_E,l2_H\n");
    let h3 = hist.h.powi(3);
    for (t, s) in hist.times.iter().zip(&hist.snapshots) {
        let sq = |fs: &[upml::yee::Field3; 3]| fs.iter().flat_map(|f| f.data.iter()).map(|x| x * x).sum::<f64>();
        csv.push_str(&format!("{t:.17e},{:.17e},{:.17e}\n", (sq(&s.e) * h3).sqrt(), (sq(&s.h) * h3).sqrt()));
    }
    run.write("reference.csv", &csv)?;
    if let (Some(t), Some(last)) = (hist.times.last(), hist.snapshots.last()) {
        let mut buf = Vec::new();
        for (a, f) in last.e.iter().enumerate() {
            snapshot::write_field(&mut buf, upml::Component::electric(a), *t, f)?;
        }
        for (a, f) in last.h.iter().enumerate() {
            snapshot::write_field(&mut buf, upml::Component::magnetic(a), *t, f)?;
        }
        run.write("reference_final.bin", buf)?;
    }
    if run.cli.emit_plots {
        run.write("reference.dat", csv_to_dat(&csv))?;
    }
    println!("reference: {} snapshots, dt = {:.6e}, {} steps", hist.len(), time.dt, time.steps);
    Ok(0)
}

fn sweep(run: &mut Run) -> Result<u8> {
    let v = run.validated()?;
    let cfg = v.raw.sweep_config()?;
    let outcome = lab::sweep(&cfg)?;
    let csv = lab::sweep_csv(&outcome.reports);
    run.write("sweep.csv", &csv)?;
    if run.cli.emit_plots {
        run.write("sweep.dat", csv_to_dat(&csv))?;
    }
    print!("{}", render_sweep(&outcome.reports));
    Ok(0)
}

fn read_sweep(run: &Run) -> Result<Vec<ErrorReport>> {
    let path = run.cli.out.join("sweep.csv");
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}; run `upml sweep` first", path.display())))?;
    lab::parse_sweep_csv(&text)
}

fn fit(run: &mut Run) -> Result<u8> {
    let reports = read_sweep(run)?;
    let f = lab::fit_decay(&reports)?;
    run.write("fit.csv", f.to_csv())?;
    println!("fit: rate {:.6} r^2 {:.6} on {} points", f.rate, f.r_squared, f.n_points_used);
    Ok(0)
}

fn read_fit(path: &Path) -> Result<Option<DecayFit>> {
    let Ok(text) = fs::read_to_string(path) else { return Ok(None) };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(FIT_CSV_HEADER) {
        return Err(Error::Shape(format!("unexpected fit CSV header in {}", path.display())));
    }
    let row = lines.next().ok_or_else(|| Error::Shape("fit CSV has no data row".into()))?;
    let c: Vec<&str> = row.split(',').map(str::trim).collect();
    let num = |i: usize| -> Result<f64> {
        c.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Shape(format!("bad fit CSV column {i}")))
    };
    Ok(Some(DecayFit {
        rate: num(0)?,
        intercept: num(1)?,
        r_squared: num(2)?,
        n_points_used: num(3)? as usize,
    }))
}

fn render_sweep(reports: &[ErrorReport]) -> String {
    let mut out = format!(
        "{:>8} {:>6} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "sigma0", "d", "theory", "L2 E", "L2 H", "Linf E", "Linf H", "floor"
    );
    for r in reports {
        out.push_str(&format!(
            "{:>8.3} {:>6.3} {:>8.3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}\n",
            r.sigma0, r.d, r.theory_exponent, r.l2_hcurl_e, r.l2_hcurl_h, r.linf_hcurl_e, r.linf_hcurl_h, r.floor_estimate
        ));
    }
    out
}

fn report(run: &mut Run) -> Result<u8> {
    let reports = read_sweep(run)?;
    let mut text = String::from("Truncation error sweep (theory column: sigma0 d sqrt(eps mu) / 2)\n\n");
    text.push_str(&render_sweep(&reports));
    match read_fit(&run.cli.out.join("fit.csv"))? {
        Some(f) => text.push_str(&format!(
            "\nDecay fit: rate {:.4}, intercept {:.4}, r^2 {:.4}, {} pre-floor points\n",
            f.rate, f.intercept, f.r_squared, f.n_points_used
        )),
        None => text.push_str("\nNo fit.csv found; run `upml fit` for the decay rate.\n"),
    }
    print!("{text}");
    run.write("report.txt", &text)?;
    Ok(0)
}

/// CSV to whitespace-separated columns with a commented header.
fn csv_to_dat(csv: &str) -> String {
    let mut out = String::new();
    for (n, line) in csv.lines().enumerate() {
        if n == 0 {
            out.push_str("# ");
        }
        out.push_str(&line.replace(',', " "));
        out.push('\n');
    }
    out
}
