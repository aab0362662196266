fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    std::process::exit(levycredit::cli::run_command(&args, &mut out, &mut err));
}
