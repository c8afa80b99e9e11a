use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var(gptforge::cli::MAX_DIM_VAR).ok();
    let code = gptforge::cli::run(
        std::env::args_os(),
        env.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
