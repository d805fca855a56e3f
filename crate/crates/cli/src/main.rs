fn main() {
    std::process::exit(rfm_cli::main_with_std());
}
