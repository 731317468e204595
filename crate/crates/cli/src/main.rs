fn main() {
    std::process::exit(grd_cli::run(std::env::args_os()));
}
