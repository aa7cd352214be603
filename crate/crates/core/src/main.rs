fn main() {
    let code = relspin::cli::dispatch(std::env::args_os());
    std::process::exit(code);
}
