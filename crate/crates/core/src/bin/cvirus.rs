fn main() {
    std::process::exit(cvirus::cli::cli_main(std::env::args_os()));
}
