use clap::Parser;

fn main() {
    let cli = fixlab::cli::Cli::parse();
    std::process::exit(fixlab::cli::execute(cli));
}
