use std::io::Write;

use clap::Parser;

fn main() {
    let cli = pacdecide_cli::Cli::parse();
    let report = pacdecide_cli::execute(&cli);
    if let Some(e) = &report.error {
        eprintln!("pacdecide: {}", e.message);
    }
    // a closed pipe is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
    std::process::exit(report.status.exit_code());
}
