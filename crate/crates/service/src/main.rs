use clap::Parser;
use scholarec_service::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli, &mut std::io::stdout().lock()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
