use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = <torushaar_cli::Cli as clap::Parser>::parse();
    match torushaar_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(torushaar_cli::exit_code(&err))
        }
    }
}
