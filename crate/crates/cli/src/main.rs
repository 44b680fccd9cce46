use clap::error::ErrorKind;
use clap::Parser;
use spectral_search_cli::args::Cli;
use spectral_search_cli::{execute, ExitCode};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::Success,
                _ => ExitCode::Usage,
            };
            let _ = e.print();
            std::process::exit(code.code());
        }
    };
    let status = match execute(cli).and_then(|outcome| outcome.emit().map(|()| outcome.exit)) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(status.code());
}
