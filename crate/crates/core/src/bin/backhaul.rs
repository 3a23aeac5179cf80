fn main() {
    std::process::exit(backhaul::cli::run(std::env::args_os()));
}
