use std::io::Write;
use std::path::Path;

use fedpnn_core::dataset::{self, DatasetError, LabelColumn};
use fedpnn_core::federation::{self, FederationReport};
use fedpnn_core::synthmetrics::QualityReport;

use crate::args::{Command, EvalSynthArgs, PartitionArgs, RunArgs, SweepArgs};
use crate::config::{load_dataset, Experiment};
use crate::sweep::{self, SweepPoint, SweepSpec};
use crate::CliError;

pub fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run(args) => cmd_run(&args, stdout).map(|_| ()),
        Command::Sweep(args) => cmd_sweep(&args, stdout).map(|_| ()),
        Command::EvalSynth(args) => cmd_eval_synth(&args, stdout).map(|_| ()),
        Command::Partition(args) => cmd_partition(&args, stdout),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn echo(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Runtime(format!("stdout: {e}")))
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<FederationReport, CliError> {
    let exp = Experiment::resolve(&args.experiment)?;
    let ds = exp.load_data()?;
    let report = federation::run_one_shot(&ds, &exp.federation)?;
    let text = report.to_text();
    if let Some(out) = &args.out {
        write_file(out, text.as_bytes())?;
    }
    echo(stdout, &text)?;
    Ok(report)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<Vec<SweepPoint>, CliError> {
    let exp = Experiment::resolve(&args.experiment)?;
    let spec = SweepSpec {
        axis: args.sweep_axis,
        start: args.sweep_start,
        stop: args.sweep_stop,
        step: args.sweep_step,
        base: exp.federation.clone(),
    };
    spec.validate()?;
    let ds = exp.load_data()?;
    let points = spec.run(&ds)?;
    write_file(&args.out, sweep::to_csv(&points).as_bytes())?;
    if let Some(dir) = &args.plot_dir {
        let (auc, centers) = sweep::charts(spec.axis, &points);
        write_file(&dir.join("auc.svg"), auc.to_svg().as_bytes())?;
        write_file(&dir.join("centers.svg"), centers.to_svg().as_bytes())?;
    }
    echo(
        stdout,
        &format!("{} grid points over {} written to {}\n", points.len(), spec.axis.name(), args.out.display()),
    )?;
    Ok(points)
}

pub fn cmd_eval_synth(args: &EvalSynthArgs, stdout: &mut dyn Write) -> Result<QualityReport, CliError> {
    let label: LabelColumn = args.label_col.parse().expect("infallible");
    let real = load_dataset(&args.real, &label)?;
    let synth = load_dataset(&args.synth, &label)?;
    let report = QualityReport::compute(&real, &synth).map_err(|e| CliError::Runtime(e.to_string()))?;
    let text = report.to_text();
    match &args.out {
        Some(out) => write_file(out, text.as_bytes())?,
        None => echo(stdout, &text)?,
    }
    Ok(report)
}

pub fn cmd_partition(args: &PartitionArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let label: LabelColumn = args.label_col.parse().expect("infallible");
    let ds = load_dataset(&args.input, &label)?;
    let plan = dataset::partition(&ds, args.clients, args.server_frac, args.seed, args.sharding.into()).map_err(
        |e| match e {
            DatasetError::InvalidParameter(m) => CliError::Validation(m),
            other => CliError::Runtime(other.to_string()),
        },
    )?;
    write_file(&args.out.join("manifest.txt"), plan.to_manifest().as_bytes())?;
    let shards = std::iter::once(("server".to_string(), &plan.server_rows))
        .chain(plan.client_rows.iter().enumerate().map(|(k, rows)| (format!("client_{k}"), rows)));
    for (name, rows) in shards {
        let path = args.out.join(format!("{name}.csv"));
        dataset::write_csv(&ds.select_rows(rows), &path).map_err(|e| CliError::Runtime(e.to_string()))?;
        echo(stdout, &format!("{name}: {} rows -> {}\n", rows.len(), path.display()))?;
    }
    Ok(())
}
