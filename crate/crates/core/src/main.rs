fn main() {
    std::process::exit(cauchy_est::cli::run(std::env::args_os()));
}
