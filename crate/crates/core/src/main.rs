fn main() {
    std::process::exit(lerayflux::cli::run(std::env::args_os()));
}
