fn main() {
    std::process::exit(riesz_eig::cli::run(std::env::args_os()));
}
