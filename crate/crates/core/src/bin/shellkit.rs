fn main() {
    std::process::exit(shellkit::cli::main());
}
