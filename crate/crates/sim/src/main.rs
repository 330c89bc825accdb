fn main() {
    std::process::exit(fama_sim::cli::run(std::env::args_os()));
}
