use std::io;
use std::process;

fn main() {
    if let Ok(value) = std::env::var("LOEBARENA_THREADS") {
        let threads = match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("error: LOEBARENA_THREADS must be a positive integer, got `{value}`");
                process::exit(loebarena::ExitCode::Usage as i32);
            }
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure worker threads: {e}");
            process::exit(loebarena::ExitCode::Internal as i32);
        }
    }
    let code = loebarena::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    process::exit(code);
}
