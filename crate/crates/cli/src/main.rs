fn main() {
    std::process::exit(srmc_cli::run(std::env::args_os()));
}
