use clap::Parser;

fn main() {
    let cli = semsec_cli::args::Cli::parse();
    if let Err(e) = semsec_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
