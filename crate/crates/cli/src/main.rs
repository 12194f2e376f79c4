use clap::Parser;

fn main() {
    let cli = boltid::Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    if let Err(e) = boltid::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
