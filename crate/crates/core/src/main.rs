fn main() {
    std::process::exit(heatlevels::cli::run(std::env::args_os()));
}
