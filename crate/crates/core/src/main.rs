use std::env;
use std::process;

fn main() {
    process::exit(clickgraph::cli::run_cli(env::args_os()));
}
