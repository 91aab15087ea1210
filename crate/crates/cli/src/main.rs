fn main() {
    std::process::exit(crn_cli::cli_main(std::env::args_os()));
}
