use std::io::Write;
use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use hashigo::attempt_log::AttemptLog;
use hashigo::cli::{lessons_for, run, Cli, Command, Outcome, EXIT_ERROR};
use hashigo::server::{serve, AppState};

fn serve_cmd(cli: &Cli, port: u16) -> Outcome {
    let fail = |message: String| Outcome {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {message}\n"),
    };
    let setup = || -> Result<AppState, Outcome> {
        let engine = cli.engine(&cli.shapes_dir(None))?;
        let lessons = lessons_for(cli, &engine.library)?;
        let log = AttemptLog::open(&cli.data_dir()).map_err(|e| fail(e.to_string()))?;
        Ok(AppState::new(engine, lessons, Some(log)))
    };
    let state = match setup() {
        Ok(s) => Arc::new(s),
        Err(o) => return o,
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    match runtime.block_on(serve(addr, state)) {
        Ok(()) => Outcome {
            code: 0,
            stdout: String::new(),
            stderr: String::new(),
        },
        Err(e) => fail(format!("cannot serve on port {port}: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Usage errors must not look like a "no match" verdict.
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let out = match &cli.command {
        Command::Serve { port } => serve_cmd(&cli, *port),
        _ => run(&cli),
    };
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code.clamp(0, 255) as u8)
}
