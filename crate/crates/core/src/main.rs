fn main() {
    std::process::exit(rml::cli::main_with_args(std::env::args_os()));
}
