fn main() {
    std::process::exit(repairaf::cli::run());
}
