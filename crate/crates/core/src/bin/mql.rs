fn main() {
    std::process::exit(markoff::cli::run(std::env::args_os()));
}
