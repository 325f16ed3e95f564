use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;

use sshq::cli::{resolve_config, run, Command};

#[derive(Parser)]
#[command(name = "sshq", version, about = "Quench dynamics and entanglement of a pumped SSH lattice")]
struct Args {
    /// spectrum, hoppings, evolve, eigenstate, sd, sd-dynamics or sweep
    command: Command,
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    dump_config: bool,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let resolved = resolve_config(&text, Some(args.command), &args.set);
    let cfg = match &args.config {
        Some(path) => resolved.with_context(|| format!("config {}", path.display()))?,
        None => resolved?,
    };
    if args.dump_config {
        print!("{}", cfg.serialize());
        return Ok(());
    }
    for path in run(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}
