fn main() {
    std::process::exit(swistab::cli::run());
}
