use clap::Parser;
use semiflat_lab::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
