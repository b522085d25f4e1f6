fn main() {
    std::process::exit(piqec::cli::run(std::env::args_os()));
}
