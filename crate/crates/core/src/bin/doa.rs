fn main() {
    std::process::exit(sparse_doa::cli::run(std::env::args_os()));
}
