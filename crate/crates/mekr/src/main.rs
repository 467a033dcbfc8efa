fn main() {
    std::process::exit(mekr::cli::run(std::env::args_os()));
}
