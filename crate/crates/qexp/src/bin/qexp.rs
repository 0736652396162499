fn main() {
    std::process::exit(qexp::cli::main());
}
