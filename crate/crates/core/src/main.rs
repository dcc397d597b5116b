fn main() {
    std::process::exit(linmu::cli::main());
}
