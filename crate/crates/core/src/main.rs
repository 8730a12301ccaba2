fn main() {
    std::process::exit(grayaug::cli::run(std::env::args_os()));
}
