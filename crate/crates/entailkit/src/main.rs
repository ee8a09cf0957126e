fn main() {
    std::process::exit(entailkit::cli::main_with_args(std::env::args_os()));
}
