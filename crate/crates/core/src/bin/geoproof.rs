fn main() {
    std::process::exit(geoproof::cli::run(std::env::args_os()));
}
