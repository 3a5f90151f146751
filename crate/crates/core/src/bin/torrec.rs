fn main() {
    std::process::exit(torrec::cli::run(std::env::args_os()));
}
