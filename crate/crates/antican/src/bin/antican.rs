use clap::Parser;

use antican::cli::{run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    let json = matches!(
        cli.command,
        Command::Check { json: true, .. } | Command::Invariants { json: true, .. } | Command::Diff { json: true, .. }
    );
    let stdout = std::io::stdout();
    if let Err(e) = run(&cli, &mut stdout.lock()) {
        if json {
            println!("{}", e.to_json());
        }
        eprintln!("error[{}]: {e}", e.kind());
        std::process::exit(e.exit_code());
    }
}
