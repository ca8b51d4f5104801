use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = locsys_cli::run_command(std::env::args_os());
    if code == locsys_cli::EXIT_INPUT {
        eprint!("{text}");
        if !text.ends_with('\n') {
            eprintln!();
        }
    } else {
        print!("{text}");
    }
    ExitCode::from(code as u8)
}
