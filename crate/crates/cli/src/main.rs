fn main() {
    std::process::exit(ncwb_cli::run(std::env::args_os()));
}
