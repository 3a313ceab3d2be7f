use clap::Parser;
use franson_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("franson: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
