use std::io::{self, Write};

fn main() {
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let code = synqa_cli::run(
        std::env::args_os(),
        &mut synqa_cli::Io { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr },
    );
    let _ = stdout.flush();
    std::process::exit(code);
}
