mod args;
mod error;
mod job;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, EXIT_INPUT};
use crate::job::{ConfigFile, Job};
use crate::manifest::RunManifest;
use crate::output::OutputDir;

fn resolve(cli: &Cli) -> Result<Job, CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let preset = cli.format.as_deref();
    Ok(match &cli.command {
        Command::Returns(a) => job::returns_job(a, preset, &file)?,
        Command::Mfdfa(a) => job::mfdfa_job(&a.input, &a.asset, &a.estimator, &file)?,
        Command::Roll(a) => job::roll_job(a, &file)?,
        Command::Generate(a) => job::generate_job(&a.kind),
        Command::Replay(a) => {
            let manifest = RunManifest::load(&a.manifest)?;
            manifest.verify_inputs()?;
            manifest.job
        }
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let job = resolve(cli)?;
    let mut out = OutputDir::create(&cli.out_dir)?;
    let summary = job::execute(&job, &mut out)?;
    let manifest = RunManifest::new(&job, out.written().to_vec())?;
    out.write(&RunManifest::file_name(&job), |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        writeln!(w)?;
        Ok(())
    })?;
    for line in summary {
        println!("{line}");
    }
    println!("outputs in {}", out.root().display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
