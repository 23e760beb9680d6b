fn main() {
    let code = plt_core::cli::run(std::env::args_os());
    std::process::exit(code);
}
