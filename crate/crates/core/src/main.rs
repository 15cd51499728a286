fn main() {
    std::process::exit(pmdg::cli::main());
}
