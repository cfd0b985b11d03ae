fn main() {
    std::process::exit(qdmr_dg::cli::run(std::env::args_os()));
}
