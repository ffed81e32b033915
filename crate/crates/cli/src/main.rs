use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = regrew_cli::run_cli(std::env::args());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    // Flush before exiting so short outputs survive piped stdout.
    let _ = std::io::stdout().flush();
    let _ = std::io::stderr().flush();
    ExitCode::from(outcome.exit)
}
