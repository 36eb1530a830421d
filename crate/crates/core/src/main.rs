fn main() {
    let code = holo_eikonal::cli::run(std::env::args_os());
    std::process::exit(code);
}
