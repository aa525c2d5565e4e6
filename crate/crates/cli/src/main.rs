use clap::Parser;

fn main() {
    let cli = volrep_cli::Cli::parse();
    let code = volrep_cli::run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
