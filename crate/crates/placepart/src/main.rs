fn main() {
    env_logger::init();
    std::process::exit(placepart::cli::run());
}
