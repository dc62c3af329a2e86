fn main() {
    std::process::exit(pqnb::cli::main_with(std::env::args_os()));
}
