use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = loewner_lab::run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    loewner_lab::cli::exit_status(&outcome)
}
