use clap::Parser;

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = mrenyi_cli::Cli::parse();
    mrenyi_cli::configure_threads()?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    mrenyi_cli::run(&cli, &mut lock)
}
