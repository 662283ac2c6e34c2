fn main() {
    std::process::exit(swlane::cli::run());
}
