fn main() {
    std::process::exit(gsag::cli::run(std::env::args_os()));
}
