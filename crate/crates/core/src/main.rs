fn main() {
    std::process::exit(cmdeg_kit::cli::run(std::env::args()));
}
