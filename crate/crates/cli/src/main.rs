use clap::Parser;

fn main() {
    let cli = dkp_cli::Cli::parse();
    std::process::exit(dkp_cli::run(cli));
}
