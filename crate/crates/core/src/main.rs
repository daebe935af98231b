fn main() {
    std::process::exit(condim::cli::main_from_env());
}
