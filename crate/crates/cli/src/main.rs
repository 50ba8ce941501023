use clap::Parser;
use prologian_cli::{run, Cli};
use std::io::Write;

fn main() {
    let cli = Cli::parse();
    let output = run(cli);
    if !output.stdout.is_empty() {
        print!("{}", output.stdout);
        let _ = std::io::stdout().flush();
    }
    if !output.stderr.is_empty() {
        eprint!("{}", output.stderr);
    }
    std::process::exit(output.exit);
}
