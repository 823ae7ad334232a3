fn main() {
    std::process::exit(parareal_waves::cli::run());
}
