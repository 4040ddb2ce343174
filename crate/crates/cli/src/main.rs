use std::io::Write;

fn main() {
    let mut stdout = std::io::stdout().lock();
    let code = singmin_cli::run(std::env::args_os().skip(1), &mut stdout);
    let _ = stdout.flush();
    std::process::exit(code);
}
