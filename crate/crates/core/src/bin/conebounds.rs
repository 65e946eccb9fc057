use std::io::Write;

fn main() {
    let out = conebounds_core::cli::execute(std::env::args_os(), conebounds_core::cli::env_strict());
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr.trim_end());
    }
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    if !out.stdout.is_empty() && !out.stdout.ends_with('\n') {
        let _ = stdout.write_all(b"\n");
    }
    std::process::exit(out.code);
}
