fn main() {
    std::process::exit(varfl::cli::main());
}
