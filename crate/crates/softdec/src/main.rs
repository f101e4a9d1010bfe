fn main() {
    std::process::exit(softdec::cli::run(std::env::args_os()));
}
