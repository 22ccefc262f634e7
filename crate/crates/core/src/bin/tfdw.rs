fn main() {
    std::process::exit(tfdw::cli::run(std::env::args_os()));
}
