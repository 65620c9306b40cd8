fn main() {
    std::process::exit(urnlab::cli::main());
}
