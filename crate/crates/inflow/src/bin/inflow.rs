use clap::Parser;

fn main() {
    let cli = inflow::cli::Cli::parse();
    std::process::exit(inflow::cli::run(cli));
}
