use clap::Parser;

fn main() {
    let cli = cfinsler_cli::Cli::parse();
    std::process::exit(cfinsler_cli::run(&cli));
}
