mod args;
mod manifest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use ldpc_waterfall::channel::{sigma_to_ebn0, AwgnParam, ChannelArg, ChannelKind};
use ldpc_waterfall::de::{find_threshold, DEConfig};
use ldpc_waterfall::ensemble::{parse_regular, Ensemble, EnsembleFile};
use ldpc_waterfall::output::{fmt_real, write_comparison, write_predictions, write_simulations, SimRow};
use ldpc_waterfall::predictor::{baseline_curve, predict_curve, GridOptions, RealizationSource};
use ldpc_waterfall::sim::{node_counts, run_monte_carlo, GraphMode, SimConfig};
use ldpc_waterfall::sweep::{sweep_points, Axis, SweepPoint, SweepRange};

use args::{ChannelArgs, Cli, Command, CompareArgs, EnsembleArgs, GridArgs, MethodArg, PredictArgs, SimArgs, SimulateArgs, ThresholdArgs};
use manifest::Manifest;

/// Default iteration limit of the simulated decoders.
const SIM_L_MAX: usize = 200;

enum CliError {
    /// Bad input; exit code 2.
    Usage { flag: &'static str, message: String },
    /// Failure while running; exit code 1.
    Run(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage(flag: &'static str, err: impl std::fmt::Display) -> CliError {
    CliError::Usage { flag, message: err.to_string() }
}

fn run_err(err: impl std::fmt::Display) -> CliError {
    CliError::Run(err.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(a) => cmd_predict(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage { flag, message }) => {
            eprintln!("error: {flag}: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Run(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

enum EnsembleSource {
    Regular(u32, u32),
    File(PathBuf, EnsembleFile),
}

impl EnsembleSource {
    fn load(args: &EnsembleArgs) -> CliResult<Self> {
        if let Some(text) = &args.regular {
            let (dv, dc) = parse_regular(text).map_err(|e| usage("--regular", e))?;
            Ensemble::regular(dv, dc, 1000).map_err(|e| usage("--regular", e))?;
            return Ok(EnsembleSource::Regular(dv, dc));
        }
        let path = args.ensemble.clone().ok_or_else(|| usage("--ensemble", "missing ensemble"))?;
        let text = std::fs::read_to_string(&path).map_err(|e| usage("--ensemble", format!("{}: {e}", path.display())))?;
        let file: EnsembleFile = text.parse().map_err(|e| usage("--ensemble", format!("{}: {e}", path.display())))?;
        file.ensemble(1000).map_err(|e| usage("--ensemble", format!("{}: {e}", path.display())))?;
        Ok(EnsembleSource::File(path, file))
    }

    fn build(&self, n: usize) -> CliResult<Ensemble> {
        match self {
            EnsembleSource::Regular(dv, dc) => Ensemble::regular(*dv, *dc, n),
            EnsembleSource::File(_, f) => f.ensemble(n),
        }
        .map_err(|e| usage("--n", e))
    }

    fn describe(&self) -> String {
        match self {
            EnsembleSource::Regular(dv, dc) => format!("regular {dv},{dc}"),
            EnsembleSource::File(path, _) => format!("file {}", path.display()),
        }
    }
}

struct Sweep {
    kind: ChannelKind,
    axis: Axis,
    spec: String,
    points: Vec<SweepPoint>,
}

fn resolve_sweep(args: &ChannelArgs, rate: f64) -> CliResult<Sweep> {
    let channel: ChannelArg = args.channel.parse().map_err(|e| usage("--channel", e))?;
    let kind = channel.kind();
    let natural_axis = if kind == ChannelKind::Awgn { Axis::Sigma } else { Axis::Epsilon };
    let (axis, range, flag) = match (&args.range, &args.range_ebn0) {
        (Some(r), _) => (natural_axis, r.parse::<SweepRange>().map_err(|e| usage("--range", e))?, "--range"),
        (None, Some(r)) => {
            if kind != ChannelKind::Awgn {
                return Err(usage("--range-ebn0", "only valid with --channel awgn"));
            }
            (Axis::EbN0, r.parse::<SweepRange>().map_err(|e| usage("--range-ebn0", e))?, "--range-ebn0")
        }
        (None, None) => {
            let (axis, value) = match channel {
                ChannelArg::Bec(Some(p)) | ChannelArg::Bsc(Some(p)) => (Axis::Epsilon, p),
                ChannelArg::Awgn(Some(AwgnParam::Sigma(s))) => (Axis::Sigma, s),
                ChannelArg::Awgn(Some(AwgnParam::EbN0(d))) => (Axis::EbN0, d),
                _ => return Err(usage("--channel", "give a channel parameter or a --range")),
            };
            (axis, SweepRange::point(value), "--channel")
        }
    };
    if flag != "--channel" && channel.has_param() {
        return Err(usage(flag, "the channel already fixes a point; drop its parameter or the range"));
    }
    let points = sweep_points(kind, axis, &range.values(), rate).map_err(|e| usage(flag, e))?;
    let spec = if flag == "--channel" { format!("point {}", range.start) } else { range.to_string() };
    Ok(Sweep { kind, axis, spec, points })
}

fn de_config(lmax: Option<usize>) -> CliResult<DEConfig> {
    let cfg = DEConfig { l_max: lmax.unwrap_or(DEConfig::default().l_max), ..DEConfig::default() };
    cfg.validate().map_err(|e| usage("--lmax", e))?;
    Ok(cfg)
}

fn grid_options(args: &GridArgs) -> CliResult<GridOptions> {
    if args.cells < 8 {
        return Err(usage("--cells", "need at least 8 cells"));
    }
    Ok(GridOptions {
        discrete: if args.gaussian { RealizationSource::GaussianApprox } else { RealizationSource::ExactBinomial },
        awgn_cells: args.cells,
        ..GridOptions::default()
    })
}

fn sim_config(args: &SimArgs, lmax: Option<usize>) -> CliResult<SimConfig> {
    let cfg = SimConfig {
        max_frames: args.max_frames,
        min_bit_errors: args.min_errors,
        l_max: lmax.unwrap_or(SIM_L_MAX),
        seed: args.seed,
        graph_resample: if args.fixed_graph { GraphMode::Fixed } else { GraphMode::PerFrame },
    };
    cfg.validate().map_err(|e| usage("--max-frames", e))?;
    Ok(cfg)
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| usage("--workers", e))?;
    Ok(pool.install(f))
}

fn check_block_lengths(source: &EnsembleSource, ns: &[usize], need_graph: bool) -> CliResult<Vec<Ensemble>> {
    ns.iter()
        .map(|&n| {
            let e = source.build(n)?;
            if need_graph {
                node_counts(&e, n).map_err(|err| usage("--n", err))?;
            }
            Ok(e)
        })
        .collect()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| run_err(format!("{}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| run_err(format!("{}: {e}", path.display())))
}

fn base_manifest(subcommand: &str, source: &EnsembleSource, first: &Ensemble, sweep: &Sweep, ns: &[usize]) -> Manifest {
    let mut m = Manifest::new(subcommand);
    m.push("ensemble", first.label());
    m.push("ensemble_source", source.describe());
    m.push("design_rate", fmt_real(first.design_rate()));
    m.push("channel", sweep.kind);
    m.push("axis", sweep.axis.as_str());
    m.push("range", &sweep.spec);
    m.push("points", sweep.points.len());
    m.push("n", ns.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    m
}

fn push_de(m: &mut Manifest, cfg: &DEConfig, grid: &GridOptions) {
    m.push("de.l_max", cfg.l_max);
    m.push("de.convergence_tol", format!("{:e}", cfg.convergence_tol));
    m.push("de.floor", format!("{:e}", cfg.floor));
    m.push(
        "grid.discrete",
        match grid.discrete {
            RealizationSource::ExactBinomial => "exact-binomial",
            RealizationSource::GaussianApprox => "gaussian-approx",
        },
    );
    m.push("grid.truncation", format!("{:e}", grid.truncation));
    m.push("grid.awgn_cells", grid.awgn_cells);
    m.push("grid.awgn_span_sigmas", grid.awgn_span_sigmas);
}

fn push_sim(m: &mut Manifest, cfg: &SimConfig) {
    m.push("sim.max_frames", cfg.max_frames);
    m.push("sim.min_bit_errors", cfg.min_bit_errors);
    m.push("sim.l_max", cfg.l_max);
    m.push("sim.seed", cfg.seed);
    m.push("sim.graph", cfg.graph_resample.as_str());
}

fn cmd_predict(a: PredictArgs) -> CliResult<()> {
    let source = EnsembleSource::load(&a.ensemble)?;
    let ensembles = check_block_lengths(&source, &a.n, false)?;
    let sweep = resolve_sweep(&a.channel, ensembles[0].design_rate())?;
    let cfg = de_config(a.common.lmax)?;
    let grid = grid_options(&a.grid)?;
    let curves = with_workers(a.common.workers, || {
        ensembles
            .iter()
            .map(|e| predict_curve(e, &sweep.points, &cfg, &grid))
            .collect::<ldpc_waterfall::Result<Vec<_>>>()
    })?
    .map_err(run_err)?;

    let path = &a.common.out;
    let mut w = create(path)?;
    write_predictions(&mut w, &curves).map_err(run_err)?;
    finish(w, path)?;
    let mut m = base_manifest("predict", &source, &ensembles[0], &sweep, &a.n);
    push_de(&mut m, &cfg, &grid);
    m.push("workers", a.common.workers);
    m.write(path)
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let source = EnsembleSource::load(&a.ensemble)?;
    let ensembles = check_block_lengths(&source, &a.n, true)?;
    let sweep = resolve_sweep(&a.channel, ensembles[0].design_rate())?;
    let cfg = sim_config(&a.sim, a.common.lmax)?;
    let rows = with_workers(a.common.workers, || simulate_rows(&ensembles, &sweep.points, &cfg))??;

    let path = &a.common.out;
    let mut w = create(path)?;
    write_simulations(&mut w, &rows).map_err(run_err)?;
    finish(w, path)?;
    let mut m = base_manifest("simulate", &source, &ensembles[0], &sweep, &a.n);
    push_sim(&mut m, &cfg);
    m.push("workers", a.common.workers);
    m.write(path)
}

fn simulate_rows(ensembles: &[Ensemble], points: &[SweepPoint], cfg: &SimConfig) -> CliResult<Vec<SimRow>> {
    let mut rows = Vec::new();
    for e in ensembles {
        for p in points {
            let result = run_monte_carlo(e, &p.channel, cfg).map_err(run_err)?;
            log::info!("n={} {}: {} errors in {} frames", e.n(), p.channel, result.bit_errors, result.frames);
            rows.push(SimRow { param: p.param, result });
        }
    }
    Ok(rows)
}

fn cmd_compare(a: CompareArgs) -> CliResult<()> {
    let source = EnsembleSource::load(&a.ensemble)?;
    let simulate = a.methods.contains(&MethodArg::Simulate);
    let ensembles = check_block_lengths(&source, &a.n, simulate)?;
    let sweep = resolve_sweep(&a.channel, ensembles[0].design_rate())?;
    let de = de_config(a.common.lmax)?;
    let grid = grid_options(&a.grid)?;
    let sim = sim_config(&a.sim, a.common.lmax)?;
    let threshold = find_threshold(&ensembles[0], sweep.kind, &de, 1e-7).map_err(run_err)?;

    let (curves, rows) = with_workers(a.common.workers, || -> CliResult<_> {
        let mut curves = Vec::new();
        for e in &ensembles {
            if a.methods.contains(&MethodArg::Predict) {
                curves.push(predict_curve(e, &sweep.points, &de, &grid).map_err(run_err)?);
            }
            if a.methods.contains(&MethodArg::Baseline) {
                curves.push(baseline_curve(e, &sweep.points, threshold, &de, &grid).map_err(run_err)?);
            }
        }
        let rows = if simulate { simulate_rows(&ensembles, &sweep.points, &sim)? } else { Vec::new() };
        Ok((curves, rows))
    })??;

    let path = &a.common.out;
    let mut w = create(path)?;
    write_comparison(&mut w, &curves, &rows, sim.l_max).map_err(run_err)?;
    finish(w, path)?;
    let mut m = base_manifest("compare", &source, &ensembles[0], &sweep, &a.n);
    let methods: Vec<&str> = a
        .methods
        .iter()
        .map(|m| match m {
            MethodArg::Predict => "proposed",
            MethodArg::Baseline => "threshold-baseline",
            MethodArg::Simulate => "simulation",
        })
        .collect();
    m.push("methods", methods.join(","));
    m.push("threshold", format!("{threshold:.6}"));
    push_de(&mut m, &de, &grid);
    if simulate {
        push_sim(&mut m, &sim);
    }
    m.push("workers", a.common.workers);
    m.write(path)
}

fn cmd_threshold(a: ThresholdArgs) -> CliResult<()> {
    let source = EnsembleSource::load(&a.ensemble)?;
    let kind = a.channel.parse::<ChannelArg>().map_err(|e| usage("--channel", e))?.kind();
    let cfg = de_config(a.lmax)?;
    if !(a.tol > 0.0 && a.tol < 0.1) {
        return Err(usage("--tol", "must lie in (0, 0.1)"));
    }
    let e = source.build(1000)?;
    let threshold = find_threshold(&e, kind, &cfg, a.tol).map_err(run_err)?;
    println!("{threshold:.6}");
    if let Some(path) = a.out {
        let ebn0 = match kind {
            ChannelKind::Awgn => fmt_real(sigma_to_ebn0(threshold, e.design_rate()).map_err(run_err)?),
            _ => String::new(),
        };
        let mut w = create(&path)?;
        writeln!(w, "channel,threshold,ebn0_db").map_err(run_err)?;
        writeln!(w, "{kind},{},{ebn0}", fmt_real(threshold)).map_err(run_err)?;
        finish(w, &path)?;
        let mut m = Manifest::new("threshold");
        m.push("ensemble", e.label());
        m.push("ensemble_source", source.describe());
        m.push("channel", kind);
        m.push("de.l_max", cfg.l_max);
        m.push("de.convergence_tol", format!("{:e}", cfg.convergence_tol));
        m.push("de.floor", format!("{:e}", cfg.floor));
        m.push("tol", format!("{:e}", a.tol));
        m.write(&path)?;
    }
    Ok(())
}
