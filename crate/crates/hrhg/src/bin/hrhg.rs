use clap::Parser;

fn main() {
    let cli = hrhg::cli::Cli::parse();
    std::process::exit(hrhg::cli::run(cli));
}
