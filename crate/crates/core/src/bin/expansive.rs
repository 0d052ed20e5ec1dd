fn main() {
    std::process::exit(expansive_core::cli::run(std::env::args_os()));
}
