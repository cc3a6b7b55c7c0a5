use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = frame_lab_cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(frame_lab_cli::EXIT_INVALID_INPUT as u8);
    }
    let outcome = frame_lab_cli::run(std::env::args_os());
    // A closed pipe is not worth a panic.
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
