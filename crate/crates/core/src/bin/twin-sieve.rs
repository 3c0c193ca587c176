fn main() {
    std::process::exit(twin_sieve::cli::run(std::env::args_os()));
}
