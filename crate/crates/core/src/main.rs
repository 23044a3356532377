fn main() {
    let (code, out) = hahn_aut::cli::run(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
