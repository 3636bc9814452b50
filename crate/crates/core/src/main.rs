use std::process::ExitCode;

use fpmod::cli::{render, run_command};

fn main() -> ExitCode {
    let outcome = run_command(std::env::args_os());
    if let Some(note) = &outcome.note {
        eprintln!("{}", note.trim_end());
    }
    let text = render(&outcome);
    if !text.is_empty() {
        println!("{text}");
    }
    ExitCode::from(outcome.code as u8)
}
