fn main() {
    std::process::exit(radontex::cli::run(std::env::args_os()));
}
