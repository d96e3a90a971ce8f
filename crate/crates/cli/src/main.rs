fn main() {
    std::process::exit(stbc_ccm_cli::cli_main(std::env::args_os()));
}
