fn main() {
    std::process::exit(ehe::cli::run(std::env::args().skip(1)));
}
