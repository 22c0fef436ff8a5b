use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(teichflow_lab::cli::dispatch(std::env::args_os()))
}
