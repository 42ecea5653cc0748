fn main() {
    std::process::exit(boxn::cli::run(std::env::args_os()));
}
