use clap::Parser;
use qinterf_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = qinterf_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
